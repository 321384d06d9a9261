"""
Sampling masks from block templates
===================================

A 1/4 sampling mask opens exactly one quadrant of every 2x2 cell of the
high-resolution grid. A template fixes that choice for a ``b x b`` block and
is repeated over the sensor; ``b = max`` draws the whole sensor at once.
"""

from pathlib import Path

import numpy as np

from quartersample import mask

out = Path("demo_output")
out.mkdir(exist_ok=True)

# How many templates exist per block size: 4 ** (b*b/4)
for b in (2, 4, 8):
    print(f"b={b}: {mask.count_masks(b)} templates")

# A seeded b=4 template and the mask it tiles into
template = mask.generate_template(4, seed=7)
print(mask.format_template(template))
tiled = mask.tile(template, 16, 16)
print(tiled.bits.astype(int))

# The same seed always gives the same template
assert mask.generate_template(4, seed=7) == template

# A whole-sensor mask has no repetition at all
full = mask.generate_full_sensor_mask(64, 64, seed=1)
print("density:", full.density)

# Super-pixels are 2x2 fully open groups spanning four cells; the clump
# score counts open 4-neighbour pairs
diag = mask.detect_superpixels(full)
print("super-pixels:", len(diag.superpixel_positions), "clump score:", diag.clump_score)

# The worst b=4 template: one solid 2x2 group per repetition
worst = mask.tile(mask.QuadrantTemplate([[3, 2], [1, 0]]), 16, 16)
print("worst case super-pixels:", mask.detect_superpixels(worst).superpixel_positions)

# Masks are stored as 0/255 PGM images, templates as small text files
mask.save_mask(full, out / "mask_max.pgm")
mask.save_template(template, out / "template_b4.qtpl")
assert np.array_equal(mask.load_mask(out / "mask_max.pgm").bits, full.bits)
