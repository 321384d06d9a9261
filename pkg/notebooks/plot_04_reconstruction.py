"""
Reconstruction: FSE against linear interpolation
================================================

Frequency selective extrapolation fits a sparse set of 2D Fourier basis
functions to the samples around each block; LIN interpolates over a
Delaunay triangulation of the samples.
"""

from pathlib import Path

from quartersample import imfile, mask, sensor
from quartersample.recon import FseConfig, psnr, reconstruct_fse, reconstruct_lin
from _images import camera

out = Path("demo_output")
out.mkdir(exist_ok=True)

hr = camera(128)
masks = {
    "regular (b=2)": mask.regular_mask(*hr.shape),
    "b=8": mask.tile(mask.generate_template(8, seed=1), *hr.shape),
    "b=max": mask.generate_full_sensor_mask(*hr.shape, seed=1),
}

for label, m in masks.items():
    masked = sensor.acquire_masked(hr, m)
    fse = reconstruct_fse(masked)
    lin = reconstruct_lin(masked)
    print(f"{label:14s} FSE {psnr(hr, fse.image):6.2f} dB   LIN {psnr(hr, lin.image):6.2f} dB")
    imfile.write_image(out / f"fse_{label.split()[0]}.png", fse.image)

# Feeding reconstructed pixels back into later blocks helps non-regular
# masks. On a regular mask errors at unsampled positions cannot be told apart
# from aliases, so they are carried from block to block and grow.
no_feedback = FseConfig(feedback=False)
for label, m in masks.items():
    masked = sensor.acquire_masked(hr, m)
    print(f"{label:14s} FSE without feedback {psnr(hr, reconstruct_fse(masked, no_feedback).image):6.2f} dB")
