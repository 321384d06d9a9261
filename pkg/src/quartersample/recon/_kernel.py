"""Compiled block loop of the frequency selective extrapolation.

The weighted residual spectrum is updated in place after every basis
selection, so no transform runs inside the iteration loop. Only the upper
half of the spectrum (rows ``0 .. F/2``) is stored: window and weights are
real, so the remaining rows are complex conjugates of the stored ones.

numba cannot call ``numpy.fft``, hence the small radix-2 transform below.
"""

import numba
import numpy as np

# Relative tolerance under which two candidate magnitudes count as tied.
# Regular masks make every frequency tie exactly with its aliases; ties go to
# the lowest signed frequency |k|^2 + |l|^2, then to row-major order.
TIE_RTOL = 1e-10


def fft_tables(size):
    """Bit-reversal permutation and full-period twiddle tables for ``size``."""
    bits = size.bit_length() - 1
    bitrev = np.array([int(format(i, f"0{bits}b")[::-1], 2) if bits else 0
                       for i in range(size)], dtype=np.int64)
    angle = 2.0 * np.pi * np.arange(size) / size
    return bitrev, np.cos(angle), np.sin(angle)


@numba.njit(cache=True)
def _fft_inplace(re, im, bitrev, cos_t, sin_t):
    n = re.shape[0]
    for i in range(n):
        j = bitrev[i]
        if j > i:
            re[i], re[j] = re[j], re[i]
            im[i], im[j] = im[j], im[i]
    half = 1
    while half < n:
        step = n // (2 * half)
        for start in range(0, n, 2 * half):
            for t in range(half):
                c = cos_t[t * step]
                s = -sin_t[t * step]
                i = start + t
                j = i + half
                xr = re[j] * c - im[j] * s
                xi = re[j] * s + im[j] * c
                re[j] = re[i] - xr
                im[j] = im[i] - xi
                re[i] += xr
                im[i] += xi
        half *= 2


@numba.njit(cache=True)
def fft2_inplace(re, im, bitrev, cos_t, sin_t):
    """Forward 2D DFT of a square complex array given as real/imag parts."""
    n = re.shape[0]
    br = np.empty(n)
    bi = np.empty(n)
    for m in range(n):
        for t in range(n):
            br[t] = re[m, t]
            bi[t] = im[m, t]
        _fft_inplace(br, bi, bitrev, cos_t, sin_t)
        for t in range(n):
            re[m, t] = br[t]
            im[m, t] = bi[t]
    for col in range(n):
        for t in range(n):
            br[t] = re[t, col]
            bi[t] = im[t, col]
        _fft_inplace(br, bi, bitrev, cos_t, sin_t)
        for t in range(n):
            re[t, col] = br[t]
            im[t, col] = bi[t]


@numba.njit(cache=True, fastmath=True)
def greedy_fit(rr, ri, wr, wi, cr, ci, iterations, gamma, tie_rtol):
    """Greedy selection loop on the half spectrum.

    ``rr``/``ri`` hold the upper half of ``DFT(r * w)`` and are updated in
    place. ``wr``/``wi`` hold ``DFT(w)`` tiled twice along both axes, so that
    shifted lookups need no modulo. ``cr``/``ci`` accumulate the expansion
    coefficients over the full ``F x F`` grid.

    Returns the number of iterations performed; it is smaller than
    ``iterations`` only when the weighted residual vanished.
    """
    rows, size = rr.shape
    w0 = wr[0, 0]
    # per-row maxima of |rw|^2 keep the selection scan short
    row_max = np.zeros(rows)
    for kk in range(rows):
        for ll in range(size):
            row_max[kk] = max(row_max[kk], rr[kk, ll] * rr[kk, ll] + ri[kk, ll] * ri[kk, ll])
    for it in range(iterations):
        best = 0.0
        for kk in range(rows):
            best = max(best, row_max[kk])
        if best == 0.0:
            return it
        # among (near-)ties take the lowest frequency, then row-major order
        limit = best * (1.0 - tie_rtol) ** 2
        k = 0
        l = 0
        norm = 4 * size * size
        for kk in range(rows):
            if row_max[kk] < limit or kk * kk >= norm:
                continue
            for ll in range(size):
                if rr[kk, ll] * rr[kk, ll] + ri[kk, ll] * ri[kk, ll] >= limit:
                    ls = ll if 2 * ll <= size else size - ll
                    if kk * kk + ls * ls < norm:
                        norm = kk * kk + ls * ls
                        k = kk
                        l = ll
        dr = gamma * rr[k, l] / w0
        di = gamma * ri[k, l] / w0
        kc = (size - k) % size
        lc = (size - l) % size
        if kc == k and lc == l:
            # real basis function, single real coefficient
            cr[k, l] += dr
            for kk in range(rows):
                xr = rr[kk]
                xi = ri[kk]
                a = wr[kk - k + size, size - l:2 * size - l]
                b = wi[kk - k + size, size - l:2 * size - l]
                rm = 0.0
                for ll in range(size):
                    x = xr[ll] - dr * a[ll]
                    y = xi[ll] - dr * b[ll]
                    xr[ll] = x
                    xi[ll] = y
                    m2 = x * x + y * y
                    rm = m2 if m2 > rm else rm
                row_max[kk] = rm
        else:
            cr[k, l] += dr
            ci[k, l] += di
            cr[kc, lc] += dr
            ci[kc, lc] -= di
            for kk in range(rows):
                xr = rr[kk]
                xi = ri[kk]
                a = wr[kk - k + size, size - l:2 * size - l]
                b = wi[kk - k + size, size - l:2 * size - l]
                p = wr[kk + k, l:l + size]
                q = wi[kk + k, l:l + size]
                rm = 0.0
                for ll in range(size):
                    x = xr[ll] - (dr * a[ll] - di * b[ll]) - (dr * p[ll] + di * q[ll])
                    y = xi[ll] - (dr * b[ll] + di * a[ll]) - (dr * q[ll] - di * p[ll])
                    xr[ll] = x
                    xi[ll] = y
                    m2 = x * x + y * y
                    rm = m2 if m2 > rm else rm
                row_max[kk] = rm
    return iterations


@numba.njit(cache=True)
def reconstruct_padded(values, conf, decay, n_rows, n_cols, block, border,
                       iterations, gamma, delta, feedback, tie_rtol,
                       bitrev, cos_t, sin_t, used):
    """Reconstruct all blocks of a padded image in raster order.

    ``values`` and ``conf`` are padded by ``border`` on every side (plus
    enough extra rows/columns that ``n_rows``/``n_cols`` are multiples of
    ``block``). ``conf`` is 1 for sampled pixels and 0 for missing ones;
    both arrays are modified in place. ``used`` receives the iteration count
    of every block.
    """
    size = decay.shape[0]
    wrap = size - 1
    half = size // 2 + 1
    f_re = np.empty((size, size))
    f_im = np.empty((size, size))
    wr = np.empty((2 * size, 2 * size))
    wi = np.empty((2 * size, 2 * size))
    rr = np.empty((half, size))
    ri = np.empty((half, size))
    cr = np.empty((size, size))
    ci = np.empty((size, size))
    tr = np.empty((block, size))
    ti = np.empty((block, size))
    idx = 0
    for by in range(0, n_rows, block):
        for bx in range(0, n_cols, block):
            # w and r*w are real: transform w + j*(r*w) once and split
            for m in range(size):
                for n in range(size):
                    wt = conf[by + m, bx + n] * decay[m, n]
                    f_re[m, n] = wt
                    f_im[m, n] = wt * values[by + m, bx + n]
            fft2_inplace(f_re, f_im, bitrev, cos_t, sin_t)
            for m in range(size):
                mc = (size - m) & wrap
                for n in range(size):
                    nc = (size - n) & wrap
                    a_re = f_re[m, n]
                    a_im = f_im[m, n]
                    b_re = f_re[mc, nc]
                    b_im = f_im[mc, nc]
                    x = 0.5 * (a_re + b_re)
                    y = 0.5 * (a_im - b_im)
                    wr[m, n] = x
                    wr[m + size, n] = x
                    wr[m, n + size] = x
                    wr[m + size, n + size] = x
                    wi[m, n] = y
                    wi[m + size, n] = y
                    wi[m, n + size] = y
                    wi[m + size, n + size] = y
                    if m < half:
                        rr[m, n] = 0.5 * (a_im + b_im)
                        ri[m, n] = -0.5 * (a_re - b_re)
            cr[:, :] = 0.0
            ci[:, :] = 0.0
            if wr[0, 0] > 0.0:
                used[idx] = greedy_fit(rr, ri, wr, wi, cr, ci,
                                       iterations, gamma, tie_rtol)
            else:
                used[idx] = 0
            idx += 1
            # evaluate the model on the target block only
            for i in range(block):
                m = border + i
                for l in range(size):
                    sr = 0.0
                    si = 0.0
                    for k in range(size):
                        t = (k * m) & wrap
                        c = cos_t[t]
                        s = sin_t[t]
                        sr += cr[k, l] * c - ci[k, l] * s
                        si += cr[k, l] * s + ci[k, l] * c
                    tr[i, l] = sr
                    ti[i, l] = si
            for i in range(block):
                for j in range(block):
                    py = by + border + i
                    px = bx + border + j
                    if conf[py, px] > 0.0:
                        continue
                    n = border + j
                    g = 0.0
                    for l in range(size):
                        t = (l * n) & wrap
                        g += tr[i, l] * cos_t[t] - ti[i, l] * sin_t[t]
                    values[py, px] = min(max(g, 0.0), 255.0)
                    if feedback:
                        conf[py, px] = delta
