"""
A small benchmark
=================

The harness masks every image with every mask of a set, reconstructs with
every method and reports the mean PSNR of the best mask per block size.
Full runs are driven from a spec file, see ``configs/``.
"""

from pathlib import Path

from quartersample import bench
from quartersample.recon import FseConfig
from _images import camera

images = [("camera", camera(64)), ("camera_t", camera(64).T.copy())]
spec = bench.BenchSpec(images, block_sizes=[2, 4, 8, "max"], masks_per_b=3,
                       fse=FseConfig(iterations=100), dataset="demo crops")
report = bench.run_benchmark(spec, progress=lambda d, n: print(f"{d}/{n} masks"))

print(bench.emit_table(report, "markdown"))
for (b, method), a in sorted(report.aggregates().items(), key=lambda kv: (bench.b_key(kv[0][0]), kv[0][1])):
    print(f"b={b} {method}: best {a['best']:.2f} dB (mask {a['best_mask']}), "
          f"worst {a['worst']:.2f} dB")

csv_path, md_path = bench.write_report(report, Path("demo_output") / "bench")
print("wrote", csv_path)
