"""Numba-jitted term-array kernels (hot path).

Same contract as ``numpy_backend``; see that module for the array layout.
``sort_terms`` is shared with the numpy backend: it is a one-shot
vectorized lexsort and gains nothing from jitting.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .numpy_backend import modinv, sort_terms  # noqa: F401  (re-exported)

BACKEND_NAME = "numba"

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _modinv(a, p):
    a = a % p
    r = 1
    e = p - 2
    while e > 0:
        if e & 1:
            r = (r * a) % p
        a = (a * a) % p
        e >>= 1
    return r


@njit(**_JIT)
def _cmp_rows(A, i, B, j):
    # lexicographic compare of key rows: 1 if A[i] > B[j], -1 if <, 0 if equal
    for c in range(A.shape[1]):
        d = A[i, c] - B[j, c]
        if d > 0:
            return 1
        if d < 0:
            return -1
    return 0


@njit(**_JIT)
def _merge(E1, C1, K1, E2, C2, K2, scale, p):
    n1 = C1.shape[0]
    n2 = C2.shape[0]
    we = E1.shape[1] if n1 > 0 else E2.shape[1]
    wk = K1.shape[1] if n1 > 0 else K2.shape[1]
    E = np.empty((n1 + n2, we), np.int64)
    C = np.empty(n1 + n2, np.int64)
    K = np.empty((n1 + n2, wk), np.int64)
    a = 0
    b = 0
    w = 0
    while a < n1 and b < n2:
        c = _cmp_rows(K1, a, K2, b)
        if c > 0:
            E[w] = E1[a]
            C[w] = C1[a]
            K[w] = K1[a]
            a += 1
            w += 1
        elif c < 0:
            v = (C2[b] * scale) % p
            if v != 0:
                E[w] = E2[b]
                C[w] = v
                K[w] = K2[b]
                w += 1
            b += 1
        else:
            v = (C1[a] + C2[b] * scale) % p
            if v != 0:
                E[w] = E1[a]
                C[w] = v
                K[w] = K1[a]
                w += 1
            a += 1
            b += 1
    while a < n1:
        E[w] = E1[a]
        C[w] = C1[a]
        K[w] = K1[a]
        a += 1
        w += 1
    while b < n2:
        v = (C2[b] * scale) % p
        if v != 0:
            E[w] = E2[b]
            C[w] = v
            K[w] = K2[b]
            w += 1
        b += 1
    return E[:w].copy(), C[:w].copy(), K[:w].copy()


def merge_scaled(E1, C1, K1, E2, C2, K2, scale, p):
    """Return the canonical term arrays of  f1 + scale * f2."""
    scale %= p
    if len(C2) == 0 or scale == 0:
        return E1, C1, K1
    if len(C1) == 0:
        C = (C2 * scale) % p
        keep = np.flatnonzero(C)
        return E2[keep], C[keep], K2[keep]
    return _merge(E1, C1, K1, E2, C2, K2, scale, p)


@njit(**_JIT)
def _nf(E, C, K, GE, GC, GK, Goff, p, want_trace):
    we = E.shape[1]
    wk = K.shape[1]
    ng = Goff.shape[0] - 1
    hE = E.copy()
    hC = C.copy()
    hK = K.copy()
    hlen = C.shape[0]

    tcap = 16
    tidx = np.empty(tcap, np.int64)
    tcoef = np.empty(tcap, np.int64)
    tshift = np.empty((tcap, we), np.int64)
    tlen = 0

    i = 0
    while i < hlen:
        g = -1
        for gi in range(ng):
            s = Goff[gi]
            if GE[s, 0] != hE[i, 0]:
                continue
            ok = True
            for c in range(1, we):
                if GE[s, c] > hE[i, c]:
                    ok = False
                    break
            if ok:
                g = gi
                break
        if g < 0:
            i += 1
            continue
        s = Goff[g]
        e = Goff[g + 1]
        factor = (hC[i] * _modinv(GC[s], p)) % p
        if want_trace:
            if tlen == tcap:
                tcap *= 2
                nidx = np.empty(tcap, np.int64)
                ncoef = np.empty(tcap, np.int64)
                nshift = np.empty((tcap, we), np.int64)
                nidx[:tlen] = tidx[:tlen]
                ncoef[:tlen] = tcoef[:tlen]
                nshift[:tlen] = tshift[:tlen]
                tidx, tcoef, tshift = nidx, ncoef, nshift
            tidx[tlen] = g
            tcoef[tlen] = factor
            for c in range(we):
                tshift[tlen, c] = hE[i, c] - GE[s, c]
            tlen += 1
        gt = e - s - 1
        cap = i + (hlen - i - 1) + gt
        nE = np.empty((cap, we), np.int64)
        nC = np.empty(cap, np.int64)
        nK = np.empty((cap, wk), np.int64)
        for r in range(i):
            nE[r] = hE[r]
            nC[r] = hC[r]
            nK[r] = hK[r]
        # merge remaining tail with -factor * shifted reducer tail
        w = i
        a = i + 1
        b = s + 1
        scale = p - factor
        while a < hlen and b < e:
            c = 0
            for col in range(wk):
                d = hK[a, col] - (GK[b, col] + hK[i, col] - GK[s, col])
                if d > 0:
                    c = 1
                    break
                if d < 0:
                    c = -1
                    break
            if c > 0:
                nE[w] = hE[a]
                nC[w] = hC[a]
                nK[w] = hK[a]
                a += 1
                w += 1
            elif c < 0:
                v = (GC[b] * scale) % p
                if v != 0:
                    for col in range(we):
                        nE[w, col] = GE[b, col] + hE[i, col] - GE[s, col]
                    nC[w] = v
                    for col in range(wk):
                        nK[w, col] = GK[b, col] + hK[i, col] - GK[s, col]
                    w += 1
                b += 1
            else:
                v = (hC[a] + GC[b] * scale) % p
                if v != 0:
                    nE[w] = hE[a]
                    nC[w] = v
                    nK[w] = hK[a]
                    w += 1
                a += 1
                b += 1
        while a < hlen:
            nE[w] = hE[a]
            nC[w] = hC[a]
            nK[w] = hK[a]
            a += 1
            w += 1
        while b < e:
            v = (GC[b] * scale) % p
            if v != 0:
                for col in range(we):
                    nE[w, col] = GE[b, col] + hE[i, col] - GE[s, col]
                nC[w] = v
                for col in range(wk):
                    nK[w, col] = GK[b, col] + hK[i, col] - GK[s, col]
                w += 1
            b += 1
        hE = nE[:w]
        hC = nC[:w]
        hK = nK[:w]
        hlen = w
    return (
        hE[:hlen].copy(),
        hC[:hlen].copy(),
        hK[:hlen].copy(),
        tidx[:tlen].copy(),
        tcoef[:tlen].copy(),
        tshift[:tlen].copy(),
    )


def normal_form(E, C, K, GE, GC, GK, Goff, p):
    """Fully reduce (E, C, K) modulo the reducer list."""
    if len(C) == 0 or len(Goff) <= 1:
        return E, C, K
    rE, rC, rK, _, _, _ = _nf(E, C, K, GE, GC, GK, Goff, p, False)
    return rE, rC, rK


def normal_form_trace(E, C, K, GE, GC, GK, Goff, p):
    """Fully reduce and record the reduction steps (see numpy backend)."""
    if len(C) == 0 or len(Goff) <= 1:
        return (
            E,
            C,
            K,
            np.empty(0, np.int64),
            np.empty(0, np.int64),
            np.empty((0, E.shape[1]), np.int64),
        )
    return _nf(E, C, K, GE, GC, GK, Goff, p, True)
