"""Grayscale image files: PGM (P5) and PNG.

Colour inputs are reduced to luma with the Rec. 601 weights
``0.299 R + 0.587 G + 0.114 B`` in floating point, without rounding.
"""

from pathlib import Path

import numpy as np
from PIL import Image

REC601 = np.array([0.299, 0.587, 0.114])
GRAY_CONVERSION = "Rec. 601 luma (0.299, 0.587, 0.114), float, no rounding"


def to_gray(pixels) -> np.ndarray:
    """Return a float64 2D image; RGB(A) arrays are converted with Rec. 601."""
    a = np.asarray(pixels)
    if a.ndim == 3:
        if a.shape[2] < 3:
            a = a[..., 0]
        else:
            a = a[..., :3].astype(np.float64) @ REC601
    if a.ndim != 2:
        raise ValueError(f"expected a 2D gray or 3D colour image, got shape {a.shape}")
    return a.astype(np.float64)


def read_image(path) -> np.ndarray:
    """Read a PGM/PNG (or any Pillow-readable) file as float64 gray values."""
    with Image.open(path) as im:
        if im.mode == "1":
            im = im.convert("L")
        if im.mode != "L":
            if im.mode.startswith("I"):
                raise ValueError(f"{path}: only 8-bit images are supported")
            im = im.convert("RGB")
        return to_gray(np.asarray(im))


def quantize(image) -> np.ndarray:
    """Round and clip to uint8."""
    return np.clip(np.rint(np.asarray(image, dtype=np.float64)), 0, 255).astype(np.uint8)


def write_image(path, image) -> None:
    """Write ``image`` as 8-bit gray; format follows the suffix (.pgm or .png).

    A ``.npy`` suffix stores the float array unquantized.
    """
    path = Path(path)
    if path.suffix.lower() == ".npy":
        np.save(path, np.asarray(image, dtype=np.float64))
        return
    if path.suffix.lower() in (".pgm", ".pnm"):
        write_pgm(path, quantize(image))
    else:
        Image.fromarray(quantize(image)).save(path)


def write_pgm(path, pixels) -> None:
    """Binary PGM: ``P5\\n<w> <h>\\n255\\n`` followed by raw rows."""
    a = np.asarray(pixels, dtype=np.uint8)
    h, w = a.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(a).tobytes())


def read_pgm(path) -> np.ndarray:
    with Image.open(path) as im:
        if im.format != "PPM" or im.mode != "L":
            raise ValueError(f"{path}: not an 8-bit PGM file")
        return np.asarray(im).copy()


def load(path) -> np.ndarray:
    """Read an image file, or a ``.npy`` float array."""
    path = Path(path)
    if path.suffix.lower() == ".npy":
        return to_gray(np.load(path))
    return read_image(path)
