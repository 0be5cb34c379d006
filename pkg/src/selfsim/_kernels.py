"""Hot loop of subalgebra enumeration: bracket-closure test of Hermite candidates.

A candidate of index p^k is encoded as a row ``(k0, k1, k2, e, f, g)`` standing for
the column span of ``[[p^k0, e, f], [0, p^k1, g], [0, 0, p^k2]]``. Such a module
contains p^k L, so closure only depends on the structure constants mod p^k.

Set ``SELFSIM_DISABLE_NUMBA=1`` to force the numpy path.
"""
from __future__ import annotations

import os

import numpy as np

INT64_SAFE = 2**62

try:
    if os.environ.get("SELFSIM_DISABLE_NUMBA", "") not in ("", "0"):
        raise ImportError("numba disabled by SELFSIM_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def enumerate_candidates(p: int, k: int) -> np.ndarray:
    """All Hermite shapes of index p^k, lexicographic in (k0, k1, k2, e, f, g)."""
    rows = []
    for k0 in range(k + 1):
        for k1 in range(k - k0 + 1):
            k2 = k - k0 - k1
            q0, q1 = p**k0, p**k1
            for e in range(q0):
                for f in range(q0):
                    for g in range(q1):
                        rows.append((k0, k1, k2, e, f, g))
    dtype = np.int64 if p ** (2 * k) * 27 < INT64_SAFE else object
    return np.array(rows, dtype=dtype).reshape(-1, 6)


def _closure_mask_numpy(cands, tensor, p, modulus):
    """Vectorised over candidates; ``tensor`` is a flat 27-vector mod ``modulus``."""
    n = cands.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    P = modulus
    k0, k1, k2 = cands[:, 0], cands[:, 1], cands[:, 2]
    e, f, g = cands[:, 3], cands[:, 4], cands[:, 5]
    pw = np.array([p**i for i in range(int(cands[:, :3].max()) + 1)], dtype=cands.dtype)
    d0, d1, d2 = pw[k0.astype(np.int64)], pw[k1.astype(np.int64)], pw[k2.astype(np.int64)]
    zero = np.zeros(n, dtype=cands.dtype)
    cols = [(d0 % P, zero, zero), (e % P, d1 % P, zero), (f % P, g % P, d2 % P)]
    T = np.asarray(tensor, dtype=cands.dtype).reshape(3, 3, 3)
    ok = np.ones(n, dtype=bool)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        u, v = cols[a], cols[b]
        w = [zero.copy() for _ in range(3)]
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                uv = (u[i] * v[j]) % P
                for l in range(3):
                    if T[i, j, l]:
                        w[l] = (w[l] + uv * T[i, j, l]) % P
        ok &= (w[2] % d2) == 0
        c2 = w[2] // d2
        w1 = (w[1] - g * c2) % P
        ok &= (w1 % d1) == 0
        c1 = w1 // d1
        w0 = (w[0] - e * c1 - f * c2) % P
        ok &= (w0 % d0) == 0
    return ok


if HAVE_NUMBA:

    @njit(cache=True)
    def _closure_mask_numba(cands, tensor, p, modulus):
        n = cands.shape[0]
        P = modulus
        out = np.ones(n, dtype=np.bool_)
        cols = np.zeros((3, 3), dtype=np.int64)
        w = np.zeros(3, dtype=np.int64)
        for r in range(n):
            k0, k1, k2 = cands[r, 0], cands[r, 1], cands[r, 2]
            e, f, g = cands[r, 3], cands[r, 4], cands[r, 5]
            d0 = p**k0
            d1 = p**k1
            d2 = p**k2
            cols[:, :] = 0
            cols[0, 0] = d0 % P
            cols[0, 1] = e % P
            cols[1, 1] = d1 % P
            cols[0, 2] = f % P
            cols[1, 2] = g % P
            cols[2, 2] = d2 % P
            for pair in range(3):
                a = 0 if pair < 2 else 1
                b = 1 if pair == 0 else 2
                w[:] = 0
                for i in range(3):
                    for j in range(3):
                        if i == j:
                            continue
                        uv = (cols[i, a] * cols[j, b]) % P
                        if uv == 0:
                            continue
                        for l in range(3):
                            t = tensor[9 * i + 3 * j + l]
                            if t != 0:
                                w[l] = (w[l] + uv * t) % P
                if w[2] % d2 != 0:
                    out[r] = False
                    break
                c2 = w[2] // d2
                w1 = (w[1] - g * c2) % P
                if w1 % d1 != 0:
                    out[r] = False
                    break
                c1 = w1 // d1
                w0 = (w[0] - e * c1 - f * c2) % P
                if w0 % d0 != 0:
                    out[r] = False
                    break
        return out


def closure_mask(cands: np.ndarray, tensor, p: int, k: int, backend: str | None = None) -> np.ndarray:
    """Boolean mask: which candidates are closed under the bracket.

    ``tensor`` is the flat structure-constant tensor (index 9i+3j+l), any integer
    representatives. ``backend`` is ``"numba"``, ``"numpy"`` or ``None`` (auto).
    """
    P = p**k
    if backend is None:
        backend = "numba" if HAVE_NUMBA else "numpy"
    small = cands.dtype != object and P * P * 27 < INT64_SAFE
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        if small:
            t = np.array([int(x) % P for x in tensor], dtype=np.int64)
            return _closure_mask_numba(cands, t, p, P)
        backend = "numpy"
    if small:
        t = np.array([int(x) % P for x in tensor], dtype=np.int64)
    else:
        cands = cands.astype(object)
        t = np.array([int(x) % P for x in tensor], dtype=object)
    return _closure_mask_numpy(cands, t, p, P)
