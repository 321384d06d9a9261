"""Acquisition models: plain LR sensor, masked LR sensor, ideal HR sensor.

Images are float64 2D arrays of 8-bit luma values in [0, 255].
"""

from dataclasses import dataclass

import numpy as np

from .mask import SamplingMask


def as_gray(image) -> np.ndarray:
    """Validate and return ``image`` as a float64 2D array in [0, 255]."""
    a = np.asarray(image, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a non-empty 2D image, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("image contains non-finite pixels")
    if a.min() < 0 or a.max() > 255:
        raise ValueError("image values must lie in [0, 255]")
    return a


@dataclass(frozen=True, eq=False)
class MaskedImage:
    """Output of the masked sensor: sampled values and zeros elsewhere."""

    image: np.ndarray
    mask: SamplingMask

    def __post_init__(self):
        image = as_gray(self.image)
        if image.shape != self.mask.shape:
            raise ValueError(
                f"dimension mismatch: image {image.shape} vs mask {self.mask.shape}")
        if np.any(image[~self.mask.bits] != 0):
            raise ValueError("masked image must be 0 at covered positions")
        image = image.copy()
        image.setflags(write=False)
        object.__setattr__(self, "image", image)


def acquire_lr(hr) -> np.ndarray:
    """Image of a sensor with pixels twice as large: mean over every 2x2 block."""
    hr = as_gray(hr)
    m, n = hr.shape
    if m % 2 or n % 2:
        raise ValueError(f"HR image dimensions must be even, got {hr.shape}")
    return hr.reshape(m // 2, 2, n // 2, 2).mean(axis=(1, 3))


def apply_mask(hr, bits) -> np.ndarray:
    """Elementwise product of the image with any binary array."""
    hr = as_gray(hr)
    bits = np.asarray(bits, dtype=bool)
    if hr.shape != bits.shape:
        raise ValueError(f"dimension mismatch: image {hr.shape} vs mask {bits.shape}")
    return np.where(bits, hr, 0.0)


def acquire_masked(hr, mask: SamplingMask) -> MaskedImage:
    """Masked sensor: open pixels keep their HR value exactly, the rest read 0."""
    return MaskedImage(apply_mask(hr, mask.bits), mask)


def acquire_hr(hr) -> np.ndarray:
    """The hypothetical HR sensor sees the scene unchanged."""
    return as_gray(hr).copy()


def upsample_nearest(lr) -> np.ndarray:
    return np.repeat(np.repeat(np.asarray(lr, dtype=np.float64), 2, axis=0), 2, axis=1)
