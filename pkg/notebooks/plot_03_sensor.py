"""
Simulating the sensor
=====================

The plain low-resolution sensor integrates each 2x2 block. Covering three
quadrants of every large pixel instead keeps one exact high-resolution
sample per cell.
"""

from pathlib import Path

import numpy as np

from quartersample import imfile, mask, sensor
from _images import camera

out = Path("demo_output")
out.mkdir(exist_ok=True)

hr = camera()
lr = sensor.acquire_lr(hr)
print("HR", hr.shape, "-> LR", lr.shape)

# A checkerboard at the Nyquist frequency vanishes entirely
m, n = np.mgrid[0:8, 0:8]
print(sensor.acquire_lr(255.0 * ((m + n) % 2)))

sampling = mask.generate_full_sensor_mask(*hr.shape, seed=3)
masked = sensor.acquire_masked(hr, sampling)
print("kept pixels:", int(sampling.bits.sum()), "of", hr.size)

imfile.write_image(out / "hr.png", hr)
imfile.write_image(out / "lr_upsampled.png", sensor.upsample_nearest(lr))
imfile.write_image(out / "masked.png", masked.image)
