"""Command-line front end.

Exit status: 0 success, 1 invalid usage, 2 runtime failure. Failures print a
single ``quartersample: error: ...`` line on stderr.
"""

import argparse
import sys
from pathlib import Path

from . import __version__, bench, imfile, sensor, spectrum
from . import mask as masks
from .recon import FseConfig, psnr, reconstruct

PROG = "quartersample"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _b_arg(text):
    try:
        return bench.parse_b(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid block size {text!r}") from None


def build_parser():
    p = _Parser(prog=PROG, description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("mask-gen", help="generate a template (.qtpl) or mask (.pgm)")
    g.add_argument("--b", type=_b_arg, required=True, help="block size, or 'max'")
    g.add_argument("--width", type=int)
    g.add_argument("--height", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="mask.pgm")

    g = sub.add_parser("mask-inspect", help="print mask diagnostics")
    g.add_argument("mask")
    g.add_argument("--superpixels", action="store_true", help="list super-pixel positions")
    g.add_argument("--clumps", action="store_true", help="print the clump score")
    g.add_argument("--width", type=int, help="tile a template to this width")
    g.add_argument("--height", type=int, help="tile a template to this height")

    g = sub.add_parser("mask-spectrum", help="write the log-scaled amplitude spectrum")
    g.add_argument("mask")
    g.add_argument("--out", required=True)
    g.add_argument("--peaks", type=int, default=4, help="number of peaks to print")
    g.add_argument("--width", type=int)
    g.add_argument("--height", type=int)

    g = sub.add_parser("acquire", help="simulate the LR or the masked sensor")
    g.add_argument("image")
    g.add_argument("--mask")
    g.add_argument("--mode", choices=("lr", "masked"), required=True)
    g.add_argument("--out", required=True)

    g = sub.add_parser("reconstruct", help="reconstruct a masked image")
    g.add_argument("masked_image")
    g.add_argument("--mask", required=True)
    g.add_argument("--method", choices=("fse", "lin"), default="fse")
    g.add_argument("--config", help="FSE parameters as key = value lines")
    g.add_argument("--out", required=True)
    g.add_argument("--reference", help="print PSNR against this image")

    g = sub.add_parser("bench", help="run a benchmark spec")
    g.add_argument("--spec", required=True)
    g.add_argument("--out-dir", required=True)
    g.add_argument("--jobs", type=int, help="worker processes (overrides the spec)")

    g = sub.add_parser("report", help="re-render a benchmark CSV")
    g.add_argument("csv")
    g.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    return p


def _shape(args):
    if (args.width is None) != (args.height is None):
        raise UsageError("--width and --height go together")
    return None if args.width is None else (args.height, args.width)


def cmd_mask_gen(args):
    out = Path(args.out)
    shape = _shape(args)
    if out.suffix == ".qtpl":
        if args.b == masks.MAX:
            if shape is None or shape[0] != shape[1]:
                raise UsageError("a 'max' template needs a square --width/--height")
            mask = masks.generate_full_sensor_mask(*shape, args.seed)
            template = masks.QuadrantTemplate(mask.quadrants())
        else:
            template = masks.generate_template(args.b, args.seed)
        masks.save_template(template, out)
        print(f"wrote template b={template.block_size} to {out}")
        return
    if shape is None:
        raise UsageError("--width and --height are required for a mask image")
    if args.b == masks.MAX:
        mask = masks.generate_full_sensor_mask(*shape, args.seed)
    else:
        mask = masks.tile(masks.generate_template(args.b, args.seed), *shape)
    masks.save_mask(mask, out)
    print(f"wrote {shape[0]}x{shape[1]} mask b={mask.period} to {out}")


def cmd_mask_inspect(args):
    mask = masks.load_mask(args.mask, _shape(args))
    diag = masks.detect_superpixels(mask)
    print(f"size: {mask.shape[0]}x{mask.shape[1]}")
    print(f"period: {mask.period}")
    print(f"open_pixels: {int(mask.bits.sum())}")
    print(f"density: {diag.density}")
    print(f"superpixels: {len(diag.superpixel_positions)}")
    if args.superpixels:
        for r, c in diag.superpixel_positions:
            print(f"superpixel: {r} {c}")
    if args.clumps:
        print(f"clump_score: {diag.clump_score}")


def cmd_mask_spectrum(args):
    mask = masks.load_mask(args.mask, _shape(args))
    spec = spectrum.amplitude_spectrum(mask)
    spectrum.save_spectrum(spec, args.out)
    print(f"aliasing_ratio: {spectrum.aliasing_ratio(spec)!r}")
    for (k, l), mag in spectrum.dominant_peaks(spec, min(args.peaks, spec.size)):
        print(f"peak: {k} {l} {mag!r}")
    print(f"wrote log10(1 + 100 |S|) / log10(101) spectrum, DC centred, to {args.out}")


def cmd_acquire(args):
    hr = imfile.load(args.image)
    if args.mode == "lr":
        imfile.write_image(args.out, sensor.acquire_lr(hr))
    else:
        if not args.mask:
            raise UsageError("--mode masked needs --mask")
        mask = masks.load_mask(args.mask, hr.shape)
        imfile.write_image(args.out, sensor.acquire_masked(hr, mask).image)
    print(f"wrote {args.out}")


def cmd_reconstruct(args):
    sampled = imfile.load(args.masked_image)
    mask = masks.load_mask(args.mask, sampled.shape)
    masked = sensor.acquire_masked(sampled, mask)
    cfg = FseConfig.from_file(args.config) if args.config else FseConfig()
    result = reconstruct(masked, args.method, cfg)
    imfile.write_image(args.out, result.image)
    print(f"wrote {args.out}")
    if args.reference:
        print(f"psnr_db: {psnr(imfile.load(args.reference), result.image)!r}")


def cmd_bench(args):
    spec = bench.BenchSpec.from_file(args.spec)
    if args.jobs is not None:
        spec.jobs = args.jobs
    report = bench.run_benchmark(
        spec, progress=lambda d, n: print(f"masks done: {d}/{n}", file=sys.stderr))
    csv_path, md_path = bench.write_report(report, args.out_dir)
    sys.stdout.write(bench.emit_table(report, "markdown"))
    print(f"wrote {csv_path} and {md_path}")


def cmd_report(args):
    sys.stdout.write(bench.emit_table(bench.read_report(args.csv), args.format))


COMMANDS = {
    "mask-gen": cmd_mask_gen,
    "mask-inspect": cmd_mask_inspect,
    "mask-spectrum": cmd_mask_spectrum,
    "acquire": cmd_acquire,
    "reconstruct": cmd_reconstruct,
    "bench": cmd_bench,
    "report": cmd_report,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"{PROG}: error: {' '.join(str(exc).split())}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
