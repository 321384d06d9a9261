"""Amplitude spectra of sampling masks.

Multiplying an image by a mask convolves its spectrum with the mask
spectrum, so every strong non-DC peak of the mask spectrum places a replica
of the image spectrum on top of the original: the aliasing potential.
"""

import numpy as np

from .mask import SamplingMask


def amplitude_spectrum(mask) -> np.ndarray:
    """``|DFT(s)|`` normalised to a maximum of 1.

    ``mask`` is a :class:`SamplingMask` or any binary array. It is
    non-negative, so the maximum sits at DC and equals the number of open
    pixels.
    """
    bits = mask.bits if isinstance(mask, SamplingMask) else np.asarray(mask, dtype=bool)
    mag = np.abs(np.fft.fft2(bits.astype(np.float64)))
    peak = mag.max()
    if peak == 0:
        raise ValueError("mask has no open pixels")
    return mag / peak


def dominant_peaks(spec, count: int):
    """The ``count`` largest magnitudes as ``((k, l), magnitude)``, largest first.

    Equal magnitudes keep row-major frequency order.
    """
    spec = np.asarray(spec)
    if count < 1 or count > spec.size:
        raise ValueError(f"count must lie in [1, {spec.size}], got {count}")
    flat = spec.ravel()
    order = np.argsort(-flat, kind="stable")[:count]
    cols = spec.shape[1]
    return [((int(i // cols), int(i % cols)), float(flat[i])) for i in order]


def aliasing_ratio(spec) -> float:
    """Largest magnitude at any non-DC frequency, relative to DC."""
    spec = np.asarray(spec, dtype=np.float64)
    if spec.size == 1:
        return 0.0
    rest = spec.copy()
    rest[0, 0] = 0.0
    return float(rest.max() / spec[0, 0])


def spectrum_image(spec) -> np.ndarray:
    """8-bit display of a spectrum, DC centred.

    Magnitudes map through ``log10(1 + 100 m) / log10(101)`` to [0, 255].
    """
    spec = np.fft.fftshift(np.asarray(spec, dtype=np.float64))
    scaled = np.log10(1.0 + 100.0 * spec) / np.log10(101.0)
    return np.clip(np.rint(255.0 * scaled), 0, 255).astype(np.uint8)


def save_spectrum(spec, path) -> None:
    from .imfile import write_pgm

    write_pgm(path, spectrum_image(spec))
