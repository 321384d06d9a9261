"""
Amplitude spectra and aliasing
==============================

Masking multiplies the image by the mask, which convolves the image
spectrum with the mask spectrum. A regular mask has four spectral peaks of
equal height, so three full-strength replicas land on the image spectrum.
Non-regular masks spread that energy out.
"""

from pathlib import Path

import numpy as np

from quartersample import mask, spectrum

out = Path("demo_output")
out.mkdir(exist_ok=True)

regular = spectrum.amplitude_spectrum(mask.regular_mask(64, 64))
print("regular peaks:", spectrum.dominant_peaks(regular, 4))
print("regular aliasing ratio:", spectrum.aliasing_ratio(regular))

# Mean aliasing ratio over 100 seeds per block size
for b in (2, 4, 8, 16, "max"):
    ratios = []
    for seed in range(100):
        if b == "max":
            m = mask.generate_full_sensor_mask(64, 64, seed)
        else:
            m = mask.tile(mask.generate_template(b, seed), 64, 64)
        ratios.append(spectrum.aliasing_ratio(spectrum.amplitude_spectrum(m)))
    print(f"b={b}: mean aliasing ratio {np.mean(ratios):.3f}")

# Log-scaled spectra with DC in the centre, as 8-bit PGM
spectrum.save_spectrum(regular, out / "spectrum_regular.pgm")
spectrum.save_spectrum(
    spectrum.amplitude_spectrum(mask.generate_full_sensor_mask(64, 64, 0)),
    out / "spectrum_max.pgm")
