"""Pure-numpy reference implementation of the term-array kernels.

Term arrays (shared convention with the numba backend):

* ``E``  int64, shape (t, 1+n): column 0 is the free-module component
  (always 0 for ring elements), columns 1.. are the exponents.
* ``C``  int64, shape (t,): nonzero coefficients, reduced into [1, p).
* ``K``  int64, shape (t, w): comparison keys, strictly descending in
  row-lexicographic order; the map term -> key row is injective and the
  last key column is minus the component.

Every kernel consumes and produces canonical arrays.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def modinv(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def sort_terms(E, C, K, p):
    """Sort terms descending by key, combine equal terms, drop zeros mod p."""
    if len(C) == 0:
        return E, C % p if len(C) else C, K
    order = np.lexsort(K[:, ::-1].T)[::-1]
    E = E[order]
    C = C[order] % p
    K = K[order]
    if len(C) > 1:
        fresh = np.empty(len(C), dtype=bool)
        fresh[0] = True
        np.any(K[1:] != K[:-1], axis=1, out=fresh[1:])
        starts = np.flatnonzero(fresh)
        C = np.add.reduceat(C, starts) % p
        E = E[starts]
        K = K[starts]
    keep = np.flatnonzero(C)
    if len(keep) != len(C):
        E, C, K = E[keep], C[keep], K[keep]
    return np.ascontiguousarray(E), np.ascontiguousarray(C), np.ascontiguousarray(K)


def merge_scaled(E1, C1, K1, E2, C2, K2, scale, p):
    """Return the canonical term arrays of  f1 + scale * f2."""
    if len(C2) == 0 or scale % p == 0:
        return E1, C1, K1
    if len(C1) == 0:
        return sort_terms(E2, C2 * (scale % p), K2, p)
    E = np.concatenate([E1, E2])
    C = np.concatenate([C1, C2 * (scale % p)])
    K = np.concatenate([K1, K2])
    return sort_terms(E, C, K, p)


def _find_reducer(headE, GleadE):
    same = GleadE[:, 0] == headE[0]
    if not same.any():
        return -1
    fits = same & np.all(GleadE[:, 1:] <= headE[1:], axis=1)
    hits = np.flatnonzero(fits)
    return int(hits[0]) if hits.size else -1


def normal_form(E, C, K, GE, GC, GK, Goff, p):
    """Fully reduce (E, C, K) modulo the reducer list; no term of the
    result is divisible by any reducer's leading term."""
    out = _nf(E, C, K, GE, GC, GK, Goff, p, trace=None)
    return out


def normal_form_trace(E, C, K, GE, GC, GK, Goff, p):
    """Like normal_form but also records the reduction steps.

    Returns (E, C, K, idx, coef, shift): the input equals the result plus
    sum_s coef[s] * x^shift[s] * G[idx[s]].  shift rows carry the full
    E-width (component delta is always zero).
    """
    trace = ([], [], [])
    E, C, K = _nf(E, C, K, GE, GC, GK, Goff, p, trace=trace)
    idx = np.array(trace[0], dtype=np.int64)
    coef = np.array(trace[1], dtype=np.int64)
    if trace[2]:
        shift = np.array(trace[2], dtype=np.int64)
    else:
        shift = np.empty((0, GE.shape[1]), dtype=np.int64)
    return E, C, K, idx, coef, shift


def _nf(E, C, K, GE, GC, GK, Goff, p, trace):
    ng = len(Goff) - 1
    if ng == 0:
        return E, C, K
    starts = Goff[:-1]
    GleadE = GE[starts]
    i = 0
    while i < len(C):
        g = _find_reducer(E[i], GleadE)
        if g < 0:
            i += 1
            continue
        s, e = int(Goff[g]), int(Goff[g + 1])
        shift = E[i] - GE[s]
        factor = (int(C[i]) * modinv(GC[s], p)) % p
        if trace is not None:
            trace[0].append(g)
            trace[1].append(factor)
            trace[2].append(shift.copy())
        kdelta = K[i] - GK[s]
        tE = GE[s + 1 : e] + shift
        tC = (-factor * GC[s + 1 : e]) % p
        tK = GK[s + 1 : e] + kdelta
        mE, mC, mK = merge_scaled(E[i + 1 :], C[i + 1 :], K[i + 1 :], tE, tC, tK, 1, p)
        E = np.concatenate([E[:i], mE])
        C = np.concatenate([C[:i], mC])
        K = np.concatenate([K[:i], mK])
    return np.ascontiguousarray(E), np.ascontiguousarray(C), np.ascontiguousarray(K)
