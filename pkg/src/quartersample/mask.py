"""1/4-sampling masks built from repeated block templates.

Every large (LR) sensor pixel covers a 2x2 cell of the HR grid and exposes
exactly one of its four quadrants to light. A template of block size ``b``
stores the open quadrant of each of the ``(b/2) x (b/2)`` LR cells in a
``b x b`` HR block; repeating it fills a sensor of any even size.

Quadrants are numbered row-major inside the cell::

    0 1
    2 3
"""

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAX = "max"
TEMPLATE_MAGIC = "QTPL v1"


def _check_block_size(b):
    if isinstance(b, bool) or not isinstance(b, (int, np.integer)) or b < 2 or b % 2:
        raise ValueError(f"block size b must be an even integer >= 2, got {b!r}")
    return int(b)


def _check_even_shape(rows, cols):
    for name, v in (("height", rows), ("width", cols)):
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 2 or v % 2:
            raise ValueError(f"{name} must be a positive even integer, got {v!r}")
    return int(rows), int(cols)


def _rng(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return np.random.default_rng(int(seed))


@dataclass(frozen=True, eq=False)
class QuadrantTemplate:
    """Open-quadrant index for each LR cell of a ``b x b`` block."""

    cells: np.ndarray

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.uint8)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1] or cells.shape[0] < 1:
            raise ValueError(f"template cells must be a non-empty square grid, got {cells.shape}")
        if np.any(cells > 3):
            raise ValueError("quadrant indices must lie in {0, 1, 2, 3}")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def block_size(self) -> int:
        return 2 * self.cells.shape[0]

    def expand(self) -> np.ndarray:
        """The template as a ``b x b`` boolean HR block."""
        return _expand(self.cells)

    def __eq__(self, other):
        if not isinstance(other, QuadrantTemplate):
            return NotImplemented
        return self.cells.shape == other.cells.shape and bool(np.all(self.cells == other.cells))

    def __hash__(self):
        return hash((self.cells.shape, self.cells.tobytes()))

    def __repr__(self):
        return f"QuadrantTemplate(b={self.block_size}, cells={self.cells.tolist()})"


@dataclass(frozen=True, eq=False)
class SamplingMask:
    """Binary HR mask with exactly one open pixel per aligned 2x2 cell.

    ``period`` is the template block size it was tiled from, or ``"max"``
    when the whole sensor is one template.
    """

    bits: np.ndarray
    period: object = MAX
    template: QuadrantTemplate | None = field(default=None, compare=False)

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError(f"mask must be 2D, got shape {bits.shape}")
        _check_even_shape(*bits.shape)
        per_cell = bits.reshape(bits.shape[0] // 2, 2, bits.shape[1] // 2, 2).sum(axis=(1, 3))
        if np.any(per_cell != 1):
            raise ValueError("not a 1/4-sampling mask: some 2x2 cell has != 1 open pixel")
        if self.period != MAX:
            _check_block_size(self.period)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def shape(self):
        return self.bits.shape

    @property
    def density(self) -> float:
        return float(self.bits.mean())

    def quadrants(self) -> np.ndarray:
        """Open-quadrant index of every LR cell, shape ``(M/2, N/2)``."""
        m, n = self.bits.shape
        cells = self.bits.reshape(m // 2, 2, n // 2, 2).transpose(0, 2, 1, 3)
        return np.argmax(cells.reshape(m // 2, n // 2, 4), axis=2).astype(np.uint8)

    def __eq__(self, other):
        if not isinstance(other, SamplingMask):
            return NotImplemented
        return self.period == other.period and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.period, self.bits.shape, self.bits.tobytes()))


@dataclass(frozen=True)
class MaskDiagnostics:
    superpixel_positions: list
    clump_score: int
    density: float


def _expand(cells: np.ndarray) -> np.ndarray:
    u, v = cells.shape
    out = np.zeros((2 * u, 2 * v), dtype=bool)
    for q in range(4):
        out[q // 2::2, q % 2::2] |= cells == q
    return out


def count_masks(b: int) -> int:
    """Number of distinct templates of block size ``b``: ``4**(b*b/4)``."""
    b = _check_block_size(b)
    return 4 ** (b * b // 4)


def generate_template(b: int, seed: int) -> QuadrantTemplate:
    """Draw every cell uniformly from {0, 1, 2, 3}.

    The generator is numpy's ``default_rng(seed)`` (PCG64); a given
    ``(b, seed)`` always yields the same template.
    """
    b = _check_block_size(b)
    return QuadrantTemplate(_rng(seed).integers(0, 4, size=(b // 2, b // 2), dtype=np.uint8))


def enumerate_templates(b: int):
    """Yield all templates of block size ``b`` in lexicographic cell order."""
    b = _check_block_size(b)
    cells = (b // 2) ** 2
    for digits in itertools.product(range(4), repeat=cells):
        yield QuadrantTemplate(np.array(digits, dtype=np.uint8).reshape(b // 2, b // 2))


def tile(template: QuadrantTemplate, rows: int, cols: int) -> SamplingMask:
    """Repeat ``template`` over a ``rows x cols`` sensor, cropping at the far edges."""
    rows, cols = _check_even_shape(rows, cols)
    u = template.cells.shape[0]
    reps = (-(-rows // (2 * u)), -(-cols // (2 * u)))
    cells = np.tile(template.cells, reps)[:rows // 2, :cols // 2]
    return SamplingMask(_expand(cells), template.block_size, template)


def generate_full_sensor_mask(rows: int, cols: int, seed: int) -> SamplingMask:
    """Mask that is non-regular over the whole sensor (``b = max``)."""
    rows, cols = _check_even_shape(rows, cols)
    cells = _rng(seed).integers(0, 4, size=(rows // 2, cols // 2), dtype=np.uint8)
    return SamplingMask(_expand(cells), MAX)


def regular_mask(rows: int, cols: int, quadrant: int = 0) -> SamplingMask:
    return tile(QuadrantTemplate([[quadrant]]), rows, cols)


def mask_from_quadrants(cells, period=MAX) -> SamplingMask:
    return SamplingMask(_expand(np.asarray(cells, dtype=np.uint8)), period)


def detect_superpixels(mask: SamplingMask) -> MaskDiagnostics:
    """Find solid 2x2 open blocks.

    Positions are the top-left HR corners of the blocks. Because each LR
    cell has one open pixel, such a block always straddles four cells, so
    only odd (row, col) corners can occur.
    """
    s = mask.bits
    solid = s[:-1, :-1] & s[:-1, 1:] & s[1:, :-1] & s[1:, 1:]
    positions = [(int(r), int(c)) for r, c in zip(*np.nonzero(solid))]
    return MaskDiagnostics(positions, clump_metric(mask), mask.density)


def clump_metric(mask: SamplingMask) -> int:
    """Number of horizontally or vertically adjacent pairs of open pixels."""
    s = mask.bits
    return int(np.count_nonzero(s[:, :-1] & s[:, 1:]) + np.count_nonzero(s[:-1, :] & s[1:, :]))


# --- files -----------------------------------------------------------------

def format_template(template: QuadrantTemplate) -> str:
    lines = [TEMPLATE_MAGIC, f"b={template.block_size}"]
    lines += [" ".join(str(int(q)) for q in row) for row in template.cells]
    return "\n".join(lines) + "\n"


def parse_template(text: str) -> QuadrantTemplate:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise ValueError("template file must be newline-terminated")
    if len(lines) < 2 or lines[0] != TEMPLATE_MAGIC:
        raise ValueError(f"not a template file: missing {TEMPLATE_MAGIC!r} header")
    if not lines[1].startswith("b="):
        raise ValueError("template file: second line must be 'b=<int>'")
    b = _check_block_size(int(lines[1][2:]))
    rows = lines[2:]
    if len(rows) != b // 2:
        raise ValueError(f"template file: expected {b // 2} rows, got {len(rows)}")
    cells = []
    for row in rows:
        digits = row.split(" ")
        if len(digits) != b // 2 or any(d not in ("0", "1", "2", "3") for d in digits):
            raise ValueError(f"template file: bad row {row!r}")
        cells.append([int(d) for d in digits])
    return QuadrantTemplate(np.array(cells, dtype=np.uint8))


def save_template(template: QuadrantTemplate, path) -> None:
    Path(path).write_text(format_template(template), encoding="ascii", newline="\n")


def load_template(path) -> QuadrantTemplate:
    return parse_template(Path(path).read_text(encoding="ascii"))


def save_mask(mask: SamplingMask, path) -> None:
    """Write the mask as 8-bit PGM (P5): 255 open, 0 covered."""
    from .imfile import write_pgm

    write_pgm(path, mask.bits.astype(np.uint8) * 255)


def load_mask(path, shape=None) -> SamplingMask:
    """Read a mask from a PGM export or a template file.

    Template files are tiled to ``shape`` (rows, cols) when given, else
    expanded to a single block. PGM masks must match ``shape`` if it is
    given.
    """
    from .imfile import read_pgm

    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(len(TEMPLATE_MAGIC))
    if head == TEMPLATE_MAGIC.encode():
        template = load_template(path)
        rows, cols = shape if shape is not None else (template.block_size,) * 2
        return tile(template, rows, cols)
    pixels = read_pgm(path)
    if not np.all((pixels == 0) | (pixels == 255)):
        raise ValueError(f"{path}: mask PGM must contain only 0 and 255")
    if shape is not None and tuple(pixels.shape) != tuple(shape):
        raise ValueError(f"{path}: mask dimension {pixels.shape} does not match {tuple(shape)}")
    mask = SamplingMask(pixels == 255)
    return _infer_period(mask)


def _infer_period(mask: SamplingMask) -> SamplingMask:
    # smallest power-of-two-or-even template reproducing the mask; "max" otherwise
    q = mask.quadrants()
    for half in range(1, min(q.shape) // 2 + 1):
        t = QuadrantTemplate(q[:half, :half])
        if np.array_equal(tile(t, *mask.shape).bits, mask.bits):
            return SamplingMask(mask.bits, t.block_size, t)
    return mask
