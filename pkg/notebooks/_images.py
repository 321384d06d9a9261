"""Sample images for the demo scripts."""

import numpy as np

from quartersample.imfile import to_gray


def camera(size=256):
    """Central crop of the scikit-image camera man, or a synthetic stand-in."""
    try:
        from skimage import data
    except ImportError:
        m, n = np.mgrid[0:512, 0:512]
        img = 127.5 + 60 * np.sin(m / 13.0) * np.cos(n / 17.0) + 40 * ((m // 64 + n // 64) % 2)
        img = np.clip(img, 0, 255)
    else:
        img = to_gray(data.camera())
    r0 = (img.shape[0] - size) // 2
    c0 = (img.shape[1] - size) // 2
    return img[r0:r0 + size, c0:c0 + size]
