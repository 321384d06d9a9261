import numpy as np

PEAK = 255.0


def psnr(reference, test) -> float:
    """Peak signal-to-noise ratio in dB over all pixels, peak 255.

    Returns ``inf`` for identical images.
    """
    a = np.asarray(reference, dtype=np.float64)
    b = np.asarray(test, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return float("inf")
    return float(10.0 * np.log10(PEAK * PEAK / mse))
