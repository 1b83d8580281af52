"""Fincke-Pohst enumeration of short vectors in shifted integral lattices.

All kernels work in *scaled* integer coordinates: a vector of the coset
``L + gamma`` with ``d * gamma`` integral is written ``y / d`` where
``y = d*x + shift`` for an integer vector ``x`` and ``shift = d*gamma mod d``.
Norms are then the integers ``y^T G y`` (that is ``d**2`` times the true
norm), so every completeness and boundary decision is exact. Floating point
is used only to prune the search tree, with slack on every bound.
"""

import math

import numpy as np

from ._accel import njit, resolve_backend

_MODE_COUNT = 0
_MODE_LIST = 1
_MODE_HIST = 2

NUMPY_CHUNK = 1 << 18


def _prepare(gram):
    G = np.ascontiguousarray(np.asarray(gram, dtype=np.int64))
    R = np.linalg.cholesky(G.astype(np.float64)).T
    diag = np.diag(R).copy()
    q = diag * diag
    mu = np.ascontiguousarray(R / diag[:, None])
    return G, q, mu


def _slack(bound):
    return 1e-7 * (1.0 + bound)


@njit(cache=True)
def _fp_walk(G, q, mu, shift, d, bound, w, modulus, offset, mode, vecs, hist):
    n = G.shape[0]
    y = np.zeros(n, np.int64)
    cur = np.zeros(n, np.int64)
    hi = np.zeros(n, np.int64)
    centre = np.zeros(n)
    budget = np.zeros(n + 1)
    exact = np.zeros(n + 1, np.int64)
    pair = np.zeros(n + 1, np.int64)
    acc = np.zeros((n + 1, n), np.int64)
    cen = np.zeros((n + 1, n))
    budget[n] = bound + 1e-7 * (1.0 + bound)
    count = 0

    i = n - 1
    rho = math.sqrt(budget[n] / q[i])
    centre[i] = 0.0
    cur[i] = math.ceil((-rho - shift[i]) / d - 1e-9)
    hi[i] = math.floor((rho - shift[i]) / d + 1e-9)
    while True:
        if cur[i] > hi[i]:
            i += 1
            if i >= n:
                break
            cur[i] += 1
            continue
        yi = d * cur[i] + shift[i]
        if i == 0:
            norm = exact[1] + G[0, 0] * yi * yi + 2 * yi * acc[1, 0]
            if norm <= bound:
                if mode == 1:
                    vecs[count, 0] = yi
                    for k in range(1, n):
                        vecs[count, k] = y[k]
                elif mode == 2:
                    p = pair[1] + w[0] * yi
                    if modulus > 0:
                        p = p % modulus
                    else:
                        p += offset
                    hist[norm, p] += 1
                count += 1
            cur[0] += 1
            continue
        t = yi - centre[i]
        rem = budget[i + 1] - q[i] * t * t
        if rem < 0.0:
            rem = 0.0
        budget[i] = rem
        y[i] = yi
        exact[i] = exact[i + 1] + G[i, i] * yi * yi + 2 * yi * acc[i + 1, i]
        pair[i] = pair[i + 1] + w[i] * yi
        for k in range(i):
            acc[i, k] = acc[i + 1, k] + G[k, i] * yi
            cen[i, k] = cen[i + 1, k] + mu[k, i] * yi
        i -= 1
        c = -cen[i + 1, i]
        rho = math.sqrt(budget[i + 1] / q[i])
        centre[i] = c
        cur[i] = math.ceil((c - rho - shift[i]) / d - 1e-9)
        hi[i] = math.floor((c + rho - shift[i]) / d + 1e-9)
    return count


def _walk_numpy(G, q, mu, shift, d, bound, chunk=NUMPY_CHUNK):
    """Yield blocks of candidate vectors (rows of y) level by level.

    Candidates pass the float pruning; callers apply the exact norm test.
    """
    n = G.shape[0]
    Y0 = np.zeros((1, n), dtype=np.int64)
    B0 = np.array([bound + _slack(bound)])

    def rec(Y, B, i):
        if i + 1 < n:
            c = -(Y[:, i + 1:].astype(np.float64) @ mu[i, i + 1:])
        else:
            c = np.zeros(len(Y))
        rho = np.sqrt(np.maximum(B, 0.0) / q[i])
        lo = np.ceil((c - rho - shift[i]) / d - 1e-9).astype(np.int64)
        hi = np.floor((c + rho - shift[i]) / d + 1e-9).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        cum = np.cumsum(cnt)
        start = 0
        while start < len(Y):
            base = cum[start - 1] if start else 0
            end = int(np.searchsorted(cum, base + chunk, side="right"))
            end = max(end, start + 1)
            c_cnt = cnt[start:end]
            tot = int(c_cnt.sum())
            if tot:
                idx = np.repeat(np.arange(start, end), c_cnt)
                first = np.repeat(np.cumsum(c_cnt) - c_cnt, c_cnt)
                x = lo[idx] + (np.arange(tot) - first)
                yi = d * x + shift[i]
                Yn = Y[idx]
                Yn[:, i] = yi
                t = yi - c[idx]
                Bn = np.maximum(B[idx] - q[i] * t * t, 0.0)
                if i == 0:
                    yield Yn
                else:
                    yield from rec(Yn, Bn, i - 1)
            start = end

    yield from rec(Y0, B0, n - 1)


def _exact_norms(Y, G):
    # integer entries far below 2**53, so the float64 BLAS product is exact
    Yf = Y.astype(np.float64)
    return np.rint(((Yf @ G.astype(np.float64)) * Yf).sum(axis=1)).astype(np.int64)


def _check_args(gram, shift, d, bound):
    G, q, mu = _prepare(gram)
    shift = np.ascontiguousarray(np.asarray(shift, dtype=np.int64) % int(d))
    if shift.shape != (G.shape[0],):
        raise ValueError("shift has the wrong length")
    if d < 1:
        raise ValueError("denominator must be positive")
    return G, q, mu, shift, int(d), int(bound)


def short_vectors(gram, shift, d, bound, backend=None):
    """All integer ``y`` with ``y = shift (mod d)`` and ``y^T G y <= bound``.

    Returns an ``(k, n)`` int64 array; row order is unspecified.
    """
    G, q, mu, shift, d, bound = _check_args(gram, shift, d, bound)
    n = G.shape[0]
    if bound < 0:
        return np.zeros((0, n), dtype=np.int64)
    backend = resolve_backend(backend)
    w = np.zeros(n, dtype=np.int64)
    if backend == "numba":
        dummy_h = np.zeros((1, 1), dtype=np.int64)
        dummy_v = np.zeros((1, n), dtype=np.int64)
        k = _fp_walk(G, q, mu, shift, d, bound, w, 0, 0, _MODE_COUNT, dummy_v, dummy_h)
        out = np.zeros((k, n), dtype=np.int64)
        _fp_walk(G, q, mu, shift, d, bound, w, 0, 0, _MODE_LIST, out, dummy_h)
        return out
    blocks = []
    for Y in _walk_numpy(G, q, mu, shift, d, bound):
        blocks.append(Y[_exact_norms(Y, G) <= bound])
    if not blocks:
        return np.zeros((0, n), dtype=np.int64)
    return np.concatenate(blocks)


def pairing_offset(gram, w, bound):
    """Cauchy-Schwarz bound on ``|w . y|`` over ``y^T G y <= bound``."""
    w = np.asarray(w, dtype=np.float64)
    if not np.any(w):
        return 0
    dual = float(w @ np.linalg.solve(np.asarray(gram, dtype=np.float64), w))
    return int(math.isqrt(int(math.ceil(dual * max(bound, 0) * (1 + 1e-9))))) + 2


def theta_histogram(gram, shift, d, bound, w, modulus=0, backend=None):
    """Count coset vectors by exact scaled norm and by pairing with ``w``.

    Returns ``(hist, offset)``. ``hist[N, p]`` counts vectors ``y`` with
    ``y^T G y == N`` and ``w . y == p - offset``; when ``modulus > 0`` the
    pairing is reduced mod ``modulus`` instead and ``offset`` is 0.
    """
    G, q, mu, shift, d, bound = _check_args(gram, shift, d, bound)
    n = G.shape[0]
    w = np.ascontiguousarray(np.asarray(w, dtype=np.int64))
    if w.shape != (n,):
        raise ValueError("pairing vector has the wrong length")
    modulus = int(modulus)
    if modulus > 0:
        offset, width = 0, modulus
    else:
        offset = pairing_offset(G, w, bound)
        width = 2 * offset + 1
    hist = np.zeros((max(bound, -1) + 1, width), dtype=np.int64)
    if bound < 0:
        return hist, offset
    backend = resolve_backend(backend)
    if backend == "numba":
        dummy_v = np.zeros((1, n), dtype=np.int64)
        _fp_walk(G, q, mu, shift, d, bound, w, modulus, offset, _MODE_HIST, dummy_v, hist)
        return hist, offset
    for Y in _walk_numpy(G, q, mu, shift, d, bound):
        norms = _exact_norms(Y, G)
        keep = norms <= bound
        p = Y[keep] @ w
        p = p % modulus if modulus > 0 else p + offset
        hist += np.bincount(norms[keep] * width + p, minlength=hist.size).reshape(hist.shape)
    return hist, offset
