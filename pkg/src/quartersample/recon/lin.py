"""Linear interpolation over a Delaunay triangulation of the sampled pixels."""

import numpy as np
from scipy.spatial import Delaunay, QhullError, cKDTree

from ..sensor import MaskedImage
from .result import ReconResult


class DegenerateInputError(ValueError):
    """Too few, or only collinear, sampled positions to triangulate."""


def triangulate(points) -> Delaunay:
    points = np.asarray(points, dtype=np.float64)
    if len(points) < 3 or np.linalg.matrix_rank(points - points[0]) < 2:
        raise DegenerateInputError("need at least 3 non-collinear sampled pixels")
    try:
        return Delaunay(points)
    except QhullError as exc:  # pragma: no cover - guarded by the rank test
        raise DegenerateInputError(str(exc)) from exc


def nearest_sample(points, queries, k=16) -> np.ndarray:
    """Index of the closest point for every query; ties go to the lowest index.

    ``points`` are expected in row-major order, so the lowest index is the
    first in row-major order.
    """
    tree = cKDTree(points)
    k = min(k, len(points))
    dist, idx = tree.query(queries, k=k)
    dist = dist.reshape(len(queries), k)
    idx = idx.reshape(len(queries), k)
    out = np.empty(len(queries), dtype=np.int64)
    for i in range(len(queries)):
        d0 = dist[i, 0]
        if k < len(points) and dist[i, -1] <= d0 + 1e-9:
            # more ties than neighbours fetched
            cand = np.array(tree.query_ball_point(queries[i], d0 + 1e-9))
        else:
            cand = idx[i][dist[i] <= d0 + 1e-9]
        out[i] = cand.min()
    return out


class LinearPlan:
    """Interpolation weights for one mask, reusable across images.

    Every missing pixel is expressed as a weighted sum of three sampled
    pixels: barycentric weights of its Delaunay triangle inside the convex
    hull, a single weight of 1 on the nearest sample outside of it.
    """

    def __init__(self, mask):
        bits = mask.bits
        self.shape = bits.shape
        self.bits = bits
        points = np.argwhere(bits).astype(np.float64)
        self.triangulation = triangulate(points)
        queries = np.argwhere(~bits).astype(np.float64)
        simplex = self.triangulation.find_simplex(queries)
        inside = simplex >= 0
        s = simplex[inside]
        t = self.triangulation.transform[s]
        bary = np.einsum("ijk,ik->ij", t[:, :2], queries[inside] - t[:, 2])

        self.vertices = np.zeros((len(queries), 3), dtype=np.int64)
        self.weights = np.zeros((len(queries), 3))
        self.vertices[inside] = self.triangulation.simplices[s]
        self.weights[inside] = np.c_[bary, 1.0 - bary.sum(axis=1)]
        if np.any(~inside):
            self.vertices[~inside, 0] = nearest_sample(points, queries[~inside])
            self.weights[~inside, 0] = 1.0
        self.inside = inside

    def apply(self, sampled) -> np.ndarray:
        """Fill the missing pixels of a masked image laid out like the mask."""
        sampled = np.asarray(sampled, dtype=np.float64)
        if sampled.shape != self.shape:
            raise ValueError(f"dimension mismatch: image {sampled.shape} vs mask {self.shape}")
        values = sampled[self.bits]
        out = sampled.copy()
        out[~self.bits] = np.sum(values[self.vertices] * self.weights, axis=1)
        return out


def reconstruct_lin(masked: MaskedImage, plan: LinearPlan | None = None) -> ReconResult:
    """Barycentric interpolation inside the convex hull of the samples.

    Pixels outside the hull take the value of the nearest sampled pixel.
    Sampled pixels are passed through unchanged. ``plan`` may carry a
    precomputed :class:`LinearPlan` for ``masked.mask``.
    """
    if plan is None:
        plan = LinearPlan(masked.mask)
    elif not np.array_equal(plan.bits, masked.mask.bits):
        raise ValueError("interpolation plan was built for a different mask")
    return ReconResult(plan.apply(masked.image), "lin")
