"""Benchmark protocol: mask sets per block size, reconstruction, PSNR tables.

For every block size ``b`` a set of masks is drawn; every test image is
masked with every mask, reconstructed by every method and scored against the
original. Per mask, PSNR is averaged over the images; the table reports the
mean of the best mask per ``(b, method)``.
"""

import logging
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__
from . import mask as masks
from .config import read_key_values
from .imfile import GRAY_CONVERSION, read_image
from .recon import FseConfig, psnr
from .recon.fse import reconstruct_fse
from .recon.lin import LinearPlan, reconstruct_lin
from .recon import RECONSTRUCTORS
from .sensor import acquire_masked

log = logging.getLogger(__name__)

CSV_HEADER = "image_id,b,mask_index,method,psnr_db"
IMAGE_SUFFIXES = (".pgm", ".png", ".pnm", ".tif", ".tiff", ".bmp")


def b_key(b):
    """Sort key placing numeric block sizes ascending and ``max`` last."""
    return (1, 0) if b == masks.MAX else (0, int(b))


def parse_b(text):
    text = str(text).strip()
    if text == masks.MAX:
        return masks.MAX
    b = int(text)
    masks.count_masks(b)  # validates
    return b


def format_psnr(value: float) -> str:
    return "inf" if math.isinf(value) else repr(float(value))


def parse_psnr(text: str) -> float:
    return float("inf") if text == "inf" else float(text)


# --- mask sets ---------------------------------------------------------------

def _seed_stream(master_seed, b):
    code = 0 if b == masks.MAX else int(b)
    rng = np.random.default_rng(np.random.SeedSequence([int(master_seed), code]))
    while True:
        yield int(rng.integers(0, 2**64, dtype=np.uint64))


@dataclass(frozen=True)
class MaskRecipe:
    """How to build one mask of a set for any sensor size."""

    b: object
    index: int
    seed: int | None
    template: masks.QuadrantTemplate | None

    def build(self, rows, cols) -> masks.SamplingMask:
        if self.template is not None:
            return masks.tile(self.template, rows, cols)
        return masks.generate_full_sensor_mask(rows, cols, self.seed)


def mask_recipes(b, count, master_seed) -> list:
    """Deterministic mask set for block size ``b``.

    ``b = 2`` always yields the four regular masks. If ``count`` equals the
    number of possible templates the set is the full enumeration. Otherwise
    templates are drawn from a seed stream derived from ``master_seed`` and
    duplicates are redrawn.
    """
    if b == 2:
        return [MaskRecipe(2, i, None, t) for i, t in enumerate(masks.enumerate_templates(2))]
    if count < 1:
        raise ValueError(f"mask count must be positive, got {count}")
    if b != masks.MAX:
        total = masks.count_masks(b)
        if count > total:
            raise ValueError(f"count {count} exceeds the {total} possible masks for b={b}")
        if count == total:
            return [MaskRecipe(b, i, None, t)
                    for i, t in enumerate(masks.enumerate_templates(b))]
    recipes, seen = [], set()
    for seed in _seed_stream(master_seed, b):
        if len(recipes) == count:
            break
        if b == masks.MAX:
            # collisions among whole-sensor draws are checked at the LR-cell level
            key = seed
            template = None
        else:
            template = masks.generate_template(b, seed)
            key = template
        if key in seen:
            continue
        seen.add(key)
        recipes.append(MaskRecipe(b, len(recipes), seed, template))
    return recipes


def sample_mask_set(b, count, master_seed, rows, cols) -> list:
    """Masks of one set, built for a ``rows x cols`` sensor."""
    recipes = mask_recipes(b, count, master_seed)
    out = [r.build(rows, cols) for r in recipes]
    if b == masks.MAX and len({m for m in out}) != len(out):  # pragma: no cover
        raise RuntimeError("duplicate whole-sensor masks drawn")
    return out


# --- spec and report -----------------------------------------------------------

@dataclass
class BenchSpec:
    """Benchmark configuration.

    ``images`` holds file paths or ``(image_id, array)`` pairs.
    """

    images: list
    block_sizes: list = field(default_factory=lambda: [2, 4, 8, masks.MAX])
    masks_per_b: int = 16
    methods: list = field(default_factory=lambda: ["fse", "lin"])
    master_seed: int = 0
    fse: FseConfig = field(default_factory=FseConfig)
    dataset: str = ""
    jobs: int = 1

    def __post_init__(self):
        self.block_sizes = sorted({parse_b(b) for b in self.block_sizes}, key=b_key)
        if not self.images:
            raise ValueError("benchmark needs at least one image")
        if not self.methods:
            raise ValueError("benchmark needs at least one method")
        for m in self.methods:
            if m not in RECONSTRUCTORS:
                raise ValueError(f"unknown reconstruction method {m!r}")
        if self.masks_per_b < 1:
            raise ValueError("masks_per_b must be positive")

    @classmethod
    def from_file(cls, path) -> "BenchSpec":
        """Read a ``key = value`` spec.

        Keys: ``images`` (comma-separated files or directories, relative to
        the spec file), ``max_images``, ``block_sizes``, ``masks_per_b``,
        ``methods``, ``master_seed``, ``dataset``, ``jobs`` and ``fse.<name>``
        for every :class:`FseConfig` field.
        """
        path = Path(path)
        kv = read_key_values(path)
        fse = {k[4:]: kv.pop(k) for k in list(kv) if k.startswith("fse.")}
        images = []
        for item in _split(kv.pop("images", "")):
            p = Path(item)
            if not p.is_absolute():
                p = path.parent / p
            if p.is_dir():
                images += sorted(q for q in p.iterdir() if q.suffix.lower() in IMAGE_SUFFIXES)
            else:
                images.append(p)
        if "max_images" in kv:
            images = images[:int(kv.pop("max_images"))]
        kwargs = {}
        if "block_sizes" in kv:
            kwargs["block_sizes"] = _split(kv.pop("block_sizes"))
        if "methods" in kv:
            kwargs["methods"] = _split(kv.pop("methods"))
        for key in ("masks_per_b", "master_seed", "jobs"):
            if key in kv:
                kwargs[key] = int(kv.pop(key))
        if "dataset" in kv:
            kwargs["dataset"] = kv.pop("dataset")
        if kv:
            raise ValueError(f"unknown benchmark spec keys: {', '.join(sorted(kv))}")
        return cls(images=images, fse=FseConfig.from_mapping(fse), **kwargs)


def _split(text):
    return [t.strip() for t in str(text).split(",") if t.strip()]


class Record(NamedTuple):
    image_id: str
    b: object
    mask_index: int
    method: str
    psnr_db: float


@dataclass
class BenchReport:
    records: list
    metadata: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    def per_mask_means(self) -> dict:
        """``(b, method) -> {mask_index: mean PSNR over images}``."""
        groups = defaultdict(lambda: defaultdict(list))
        for r in self.records:
            groups[(r.b, r.method)][r.mask_index].append(r.psnr_db)
        return {key: {i: float(np.mean(v)) for i, v in sorted(per.items())}
                for key, per in groups.items()}

    def aggregates(self) -> dict:
        """``(b, method) -> {"best", "worst", "best_mask", "worst_mask", "masks"}``."""
        out = {}
        for key, per in self.per_mask_means().items():
            best_mask = max(per, key=lambda i: (per[i], -i))
            worst_mask = min(per, key=lambda i: (per[i], i))
            out[key] = {"best": per[best_mask], "worst": per[worst_mask],
                        "best_mask": best_mask, "worst_mask": worst_mask,
                        "masks": len(per)}
        return out

    @property
    def block_sizes(self):
        return sorted({r.b for r in self.records}, key=b_key)

    @property
    def methods(self):
        seen = []
        for m in self.metadata.get("methods", "").split(","):
            if m and m not in seen:
                seen.append(m)
        for r in self.records:
            if r.method not in seen:
                seen.append(r.method)
        return seen


# --- running -------------------------------------------------------------------

def load_images(items):
    """Ingest images; unreadable ones become error strings."""
    images, errors = [], []
    for item in items:
        if isinstance(item, tuple):
            image_id, pixels = item
            pixels = np.asarray(pixels, dtype=np.float64)
        else:
            image_id = Path(item).stem
            try:
                pixels = read_image(item)
            except (OSError, ValueError) as exc:
                log.warning("skipping %s: %s", item, exc)
                errors.append(f"{image_id}: {exc}")
                continue
        rows, cols = pixels.shape
        if rows % 2 or cols % 2:
            log.warning("%s: odd size %dx%d, cropping to even", image_id, rows, cols)
            pixels = pixels[:rows - rows % 2, :cols - cols % 2]
        images.append((str(image_id), pixels))
    return images, errors


_WORKER_STATE = {}


def _init_worker(images, methods, fse):
    _WORKER_STATE.update(images=images, methods=methods, fse=fse)


def _run_recipe(recipe):
    images = _WORKER_STATE["images"]
    methods = _WORKER_STATE["methods"]
    fse = _WORKER_STATE["fse"]
    out = []
    plans = {}
    for image_id, hr in images:
        mask = recipe.build(*hr.shape)
        masked = acquire_masked(hr, mask)
        for method in methods:
            if method == "lin":
                plan = plans.get(hr.shape)
                if plan is None:
                    plan = plans[hr.shape] = LinearPlan(mask)
                result = reconstruct_lin(masked, plan)
            elif method == "fse":
                result = reconstruct_fse(masked, fse)
            else:
                result = RECONSTRUCTORS[method](masked, fse)
            out.append(Record(image_id, recipe.b, recipe.index, method, psnr(hr, result.image)))
    return out


def run_benchmark(spec: BenchSpec, progress=None) -> BenchReport:
    """Run the full protocol described by ``spec``.

    ``progress``, if given, is called with ``(done, total)`` after every
    mask.
    """
    images, errors = load_images(spec.images)
    if not images:
        raise RuntimeError("no readable images in the benchmark spec")
    recipes = [r for b in spec.block_sizes
               for r in mask_recipes(b, spec.masks_per_b, spec.master_seed)]
    records = []
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs, initializer=_init_worker,
                                 initargs=(images, spec.methods, spec.fse)) as pool:
            for i, recs in enumerate(pool.map(_run_recipe, recipes)):
                records += recs
                if progress:
                    progress(i + 1, len(recipes))
    else:
        _init_worker(images, spec.methods, spec.fse)
        for i, recipe in enumerate(recipes):
            records += _run_recipe(recipe)
            if progress:
                progress(i + 1, len(recipes))

    image_order = {image_id: i for i, (image_id, _) in enumerate(images)}
    method_order = {m: i for i, m in enumerate(spec.methods)}
    records.sort(key=lambda r: (b_key(r.b), r.mask_index, image_order[r.image_id],
                                method_order[r.method]))
    return BenchReport(records, _metadata(spec, images, recipes), errors)


def _metadata(spec, images, recipes):
    meta = {
        "version": __version__,
        "dataset": spec.dataset or "user supplied",
        "images": ",".join(i for i, _ in images),
        "image_sizes": ",".join(f"{p.shape[0]}x{p.shape[1]}" for _, p in images),
        "gray_conversion": GRAY_CONVERSION,
        "block_sizes": ",".join(str(b) for b in spec.block_sizes),
        "masks_per_b": str(spec.masks_per_b),
        "methods": ",".join(spec.methods),
        "master_seed": str(spec.master_seed),
        "prng": "numpy default_rng (PCG64); set seeds from SeedSequence([master_seed, b or 0])",
        "psnr": "10 log10(255^2 / MSE) over all pixels",
        "aggregate": "mean over images per mask; table cell = best mask per (b, method)",
    }
    for key, value in spec.fse.as_dict().items():
        meta[f"fse.{key}"] = str(value)
    for r in recipes:
        if r.seed is not None:
            meta[f"mask.{r.b}.{r.index}.seed"] = str(r.seed)
    return meta


# --- output --------------------------------------------------------------------

def _table_rows(report):
    if not report.records:
        raise ValueError("report has no records")
    methods = report.methods
    if not methods:
        raise ValueError("report has no methods")
    agg = report.aggregates()
    rows = []
    for b in report.block_sizes:
        cells = []
        for m in methods:
            a = agg.get((b, m))
            cells.append("" if a is None else ("inf" if math.isinf(a["best"])
                                               else f"{a['best']:.2f}"))
        rows.append((str(b), cells))
    return methods, rows


def emit_table(report: BenchReport, fmt: str = "markdown") -> str:
    """Render the best-mask mean PSNR table (rows: b, columns: methods).

    ``csv`` additionally carries the metadata and every record.
    """
    methods, rows = _table_rows(report)
    if fmt == "markdown":
        lines = ["| b | " + " | ".join(m.upper() for m in methods) + " |",
                 "|---|" + "---|" * len(methods)]
        lines += [f"| {b} | " + " | ".join(cells) + " |" for b, cells in rows]
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        lines = [f"# meta {k} = {v}" for k, v in report.metadata.items()]
        lines += [f"# error {e}" for e in report.errors]
        lines.append("# table b," + ",".join(methods))
        lines += [f"# table {b}," + ",".join(cells) for b, cells in rows]
        lines.append(CSV_HEADER)
        lines += [f"{r.image_id},{r.b},{r.mask_index},{r.method},{format_psnr(r.psnr_db)}"
                  for r in report.records]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")


def write_report(report: BenchReport, out_dir) -> tuple:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "report.csv"
    md_path = out_dir / "report.md"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(emit_table(report, "csv"))
    with open(md_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(emit_table(report, "markdown"))
    return csv_path, md_path


def read_report(path) -> BenchReport:
    """Parse a CSV written by :func:`emit_table`; aggregates are recomputed."""
    records, meta, errors = [], {}, []
    header_seen = False
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# meta "):
                key, _, value = line[7:].partition(" = ")
                meta[key] = value
            elif line.startswith("# error "):
                errors.append(line[8:])
            elif line.startswith("#"):
                continue
            elif not header_seen:
                if line != CSV_HEADER:
                    raise ValueError(f"{path}:{lineno}: expected header {CSV_HEADER!r}")
                header_seen = True
            else:
                parts = line.split(",")
                if len(parts) != 5:
                    raise ValueError(f"{path}:{lineno}: expected 5 fields")
                image_id, b, idx, method, value = parts
                records.append(Record(image_id, parse_b(b), int(idx), method, parse_psnr(value)))
    if not header_seen:
        raise ValueError(f"{path}: missing CSV header")
    return BenchReport(records, meta, errors)


def desk_scale_spec(images, **overrides) -> BenchSpec:
    """4 images, 16 masks per b, b in {2, 4, 8, max}, FSE and LIN."""
    kwargs = dict(images=images, block_sizes=[2, 4, 8, masks.MAX], masks_per_b=16,
                  methods=["fse", "lin"], master_seed=0)
    kwargs.update(overrides)
    return BenchSpec(**kwargs)
