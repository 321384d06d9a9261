"""Frequency selective extrapolation (FSE) of masked images.

Each ``B x B`` target block is modelled by a sparse superposition of 2D
Fourier basis functions fitted to the known pixels of an ``F x F`` support
window around the block. Basis functions are picked greedily by the largest
magnitude of the weighted residual spectrum; a spatial weight ``rho**d``
emphasises pixels close to the block. Evaluating the model inside the block
fills the missing pixels.

Two code paths are provided. :func:`reconstruct_fse` runs the compiled loop
from :mod:`._kernel`, which updates the residual spectrum analytically.
:func:`reconstruct_fse_reference` recomputes the residual and its transform
explicitly with numpy in every iteration and records the weighted residual
energy; it is slow and meant for verification.
"""

from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from ..sensor import MaskedImage
from . import _kernel
from .result import ReconResult


@dataclass(frozen=True)
class FseConfig:
    """Parameters of the extrapolation.

    Attributes
    ----------
    fft_size : int
        Side ``F`` of the support window; a power of two.
    block_size : int
        Side ``B`` of the target block, ``F >= 2 B`` and ``F - B`` even.
    iterations : int
        Number of greedy iterations per block.
    decay : float
        Spatial weighting decay ``rho`` in (0, 1).
    compensation : float
        Orthogonality deficiency compensation ``gamma`` in (0, 1].
    confidence : float
        Weight multiplier ``delta`` in [0, 1] for pixels reconstructed by
        earlier blocks.
    feedback : bool
        Use earlier reconstructions as support. When False the blocks are
        independent of each other.
    """

    fft_size: int = 32
    block_size: int = 4
    iterations: int = 200
    decay: float = 0.7
    compensation: float = 0.5
    confidence: float = 0.5
    feedback: bool = True

    def __post_init__(self):
        f, b = self.fft_size, self.block_size
        if not isinstance(f, (int, np.integer)) or f < 2 or f & (f - 1):
            raise ValueError(f"fft_size must be a power of two >= 2, got {f!r}")
        if not isinstance(b, (int, np.integer)) or b < 1:
            raise ValueError(f"block_size must be a positive integer, got {b!r}")
        if f < 2 * b or (f - b) % 2:
            raise ValueError(
                f"need fft_size >= 2*block_size with an even difference, got F={f}, B={b}")
        if not isinstance(self.iterations, (int, np.integer)) or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations!r}")
        if not 0.0 < self.decay < 1.0:
            raise ValueError(f"decay must lie in (0, 1), got {self.decay!r}")
        if not 0.0 < self.compensation <= 1.0:
            raise ValueError(f"compensation must lie in (0, 1], got {self.compensation!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must lie in [0, 1], got {self.confidence!r}")

    @property
    def border(self) -> int:
        return (self.fft_size - self.block_size) // 2

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, values: dict) -> "FseConfig":
        """Build a config from string or typed values; unknown keys raise."""
        kinds = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in kinds:
                raise ValueError(f"unknown FSE parameter {key!r}")
            kinds_name = kinds[key] if isinstance(kinds[key], str) else kinds[key].__name__
            kwargs[key] = _coerce(raw, kinds_name)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "FseConfig":
        from ..config import read_key_values

        return cls.from_mapping(read_key_values(Path(path)))


def _coerce(raw, kind):
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    if kind == "bool":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind == "int":
        return int(raw)
    return float(raw)


def decay_window(cfg: FseConfig) -> np.ndarray:
    """``rho**d`` over the support window, ``d`` measured from its centre."""
    centre = (cfg.fft_size - 1) / 2.0
    m, n = np.mgrid[0:cfg.fft_size, 0:cfg.fft_size]
    return cfg.decay ** np.hypot(m - centre, n - centre)


def _padded_state(masked: MaskedImage, cfg: FseConfig):
    image = masked.image
    if not np.all(np.isfinite(image)):
        raise ValueError("input image contains non-finite pixels")
    rows, cols = image.shape
    b = cfg.block_size
    extra_r = (-rows) % b
    extra_c = (-cols) % b
    pad = ((cfg.border, cfg.border + extra_r), (cfg.border, cfg.border + extra_c))
    # support outside the image carries zero weight
    conf = np.pad(masked.mask.bits.astype(np.float64), pad)
    values = np.pad(image.astype(np.float64), pad) * conf
    return values, conf, rows + extra_r, cols + extra_c


def _finish(values, masked, cfg, method_id, used):
    rows, cols = masked.image.shape
    border = cfg.border
    out = values[border:border + rows, border:border + cols].copy()
    # sampled pixels are passed through untouched
    out[masked.mask.bits] = masked.image[masked.mask.bits]
    return ReconResult(out, method_id, used)


def reconstruct_fse(masked: MaskedImage, cfg: FseConfig | None = None) -> ReconResult:
    """Fill the missing pixels of ``masked`` by frequency selective extrapolation.

    Parameters
    ----------
    masked : MaskedImage
        Sampled image and its mask.
    cfg : FseConfig, optional
        Extrapolation parameters, defaults to ``FseConfig()``.

    Returns
    -------
    ReconResult
        Reconstruction with ``per_block_iterations`` holding the number of
        greedy iterations run for every block (raster order).
    """
    cfg = cfg or FseConfig()
    values, conf, n_rows, n_cols = _padded_state(masked, cfg)
    bitrev, cos_t, sin_t = _kernel.fft_tables(cfg.fft_size)
    used = np.zeros((n_rows // cfg.block_size) * (n_cols // cfg.block_size), dtype=np.int64)
    _kernel.reconstruct_padded(
        values, conf, decay_window(cfg), n_rows, n_cols, cfg.block_size, cfg.border,
        int(cfg.iterations), float(cfg.compensation), float(cfg.confidence),
        bool(cfg.feedback), _kernel.TIE_RTOL, bitrev, cos_t, sin_t, used)
    return _finish(values, masked, cfg, "fse", used)


def _pick(tied):
    """Lowest signed frequency among the tied candidates, then row-major."""
    size = tied.shape[1]
    cands = np.argwhere(tied)
    signed = np.minimum(cands, size - cands)
    signed[:, 0] = cands[:, 0]
    norm = np.sum(signed ** 2, axis=1)
    return tuple(cands[np.argmin(norm)])


def extrapolate_block(window, weights, iterations, gamma, tie_rtol=_kernel.TIE_RTOL):
    """Reference greedy fit of one support window, written with plain numpy.

    Parameters
    ----------
    window : (F, F) array
        Pixel values; entries with zero weight are ignored.
    weights : (F, F) array
        Non-negative weights, zero at unknown pixels.
    iterations : int
    gamma : float

    Returns
    -------
    model : (F, F) ndarray
        Real-valued model evaluated over the whole window.
    energies : ndarray
        Weighted residual energy ``sum(w * r**2)`` before the first and
        after every iteration.
    """
    size = window.shape[0]
    w = np.asarray(weights, dtype=np.float64)
    r = np.where(w > 0, window, 0.0).astype(np.float64)
    w0 = w.sum()
    coeffs = np.zeros((size, size), dtype=complex)
    m, n = np.mgrid[0:size, 0:size]
    energies = [float(np.sum(w * r * r))]
    half = size // 2 + 1
    for _ in range(iterations if w0 > 0 else 0):
        spec = np.fft.fft2(r * w)[:half]
        mag2 = np.abs(spec) ** 2
        best = mag2.max()
        if best == 0.0:
            break
        k, l = _pick(mag2 >= best * (1.0 - tie_rtol) ** 2)
        dc = gamma * spec[k, l] / w0
        basis = np.exp(2j * np.pi * (k * m + l * n) / size)
        kc, lc = (-k) % size, (-l) % size
        if (kc, lc) == (k, l):
            coeffs[k, l] += dc.real
            r = r - dc.real * basis.real
        else:
            coeffs[k, l] += dc
            coeffs[kc, lc] += np.conj(dc)
            r = r - 2.0 * (dc * basis).real
        energies.append(float(np.sum(w * r * r)))
    model = (np.fft.ifft2(coeffs) * size * size).real
    return model, np.array(energies)


def reconstruct_fse_reference(masked: MaskedImage, cfg: FseConfig | None = None,
                              energy_log: list | None = None) -> ReconResult:
    """Slow numpy twin of :func:`reconstruct_fse`.

    When ``energy_log`` is a list, the energy trace of every block is
    appended to it.
    """
    cfg = cfg or FseConfig()
    values, conf, n_rows, n_cols = _padded_state(masked, cfg)
    decay = decay_window(cfg)
    size, b, border = cfg.fft_size, cfg.block_size, cfg.border
    used = []
    for by in range(0, n_rows, b):
        for bx in range(0, n_cols, b):
            win = values[by:by + size, bx:bx + size]
            weights = conf[by:by + size, bx:bx + size] * decay
            model, energies = extrapolate_block(win, weights, cfg.iterations, cfg.compensation)
            used.append(len(energies) - 1)
            if energy_log is not None:
                energy_log.append(energies)
            sl = (slice(by + border, by + border + b), slice(bx + border, bx + border + b))
            missing = conf[sl] == 0
            block = values[sl]
            block[missing] = np.clip(model[border:border + b, border:border + b][missing], 0, 255)
            if cfg.feedback:
                conf[sl][missing] = cfg.confidence
    return _finish(values, masked, cfg, "fse-reference", np.array(used))
