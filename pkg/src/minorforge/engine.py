"""Shared Buchberger machinery over raw term arrays.

Operates on (E, C, K) triples for both ring elements (component column 0)
and free-module elements (component column = basis index).

``buchberger`` computes a basis with Gebauer-Moeller pair pruning,
optionally carrying division traces over the input columns.  Syzygies are
harvested separately by ``schreyer_syzygies``: given a Groebner basis it
reduces the S-pairs of the Schreyer frame (per lead component, the
divisibility-minimal quotient monomials) and returns the reduction-trace
syzygies, which form a Groebner basis of the syzygy module under the
induced order.

Pair selection is the normal strategy: minimal lcm degree, ties broken by
the key of the lcm, then by index; identical inputs give identical output.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import PairLimitExceeded, TimeLimitExceeded
from .ring import KeyContext


@dataclass(frozen=True)
class Caps:
    """Resource budget for one Groebner-type computation."""

    max_pairs: int = 2_000_000
    timeout: float = 600.0


DEFAULT_CAPS = Caps()


class FlatBasis:
    """Append-only store of canonical term arrays with flat kernel views."""

    def __init__(self, we: int, wk: int):
        self.we = we
        self.wk = wk
        cap = 1024
        self.E = np.empty((cap, we), np.int64)
        self.C = np.empty(cap, np.int64)
        self.K = np.empty((cap, wk), np.int64)
        self.off = np.zeros(1024, np.int64)
        self.n = 0
        self.used = 0
        self.leadE: list[np.ndarray] = []
        self.leadC: list[int] = []
        self.leadK: list[np.ndarray] = []

    def _reserve(self, extra: int):
        need = self.used + extra
        if need > self.E.shape[0]:
            cap = max(need, 2 * self.E.shape[0])
            for name in ("E", "K"):
                old = getattr(self, name)
                new = np.empty((cap, old.shape[1]), np.int64)
                new[: self.used] = old[: self.used]
                setattr(self, name, new)
            newC = np.empty(cap, np.int64)
            newC[: self.used] = self.C[: self.used]
            self.C = newC
        if self.n + 2 > len(self.off):
            newoff = np.zeros(2 * len(self.off), np.int64)
            newoff[: self.n + 1] = self.off[: self.n + 1]
            self.off = newoff

    def add(self, E, C, K) -> int:
        t = len(C)
        if t == 0:
            raise ValueError("cannot add zero element to basis")
        self._reserve(t)
        self.E[self.used : self.used + t] = E
        self.C[self.used : self.used + t] = C
        self.K[self.used : self.used + t] = K
        self.used += t
        self.n += 1
        self.off[self.n] = self.used
        self.leadE.append(np.array(E[0]))
        self.leadC.append(int(C[0]))
        self.leadK.append(np.array(K[0]))
        return self.n - 1

    def views(self):
        return (
            self.E[: self.used],
            self.C[: self.used],
            self.K[: self.used],
            self.off[: self.n + 1],
        )

    def element(self, i: int):
        s, e = int(self.off[i]), int(self.off[i + 1])
        return self.E[s:e].copy(), self.C[s:e].copy(), self.K[s:e].copy()


@dataclass
class GBResult:
    basis: list  # list of (E, C, K)
    traces: list  # list of (E, C, K) over input comps, when requested


def shift_scale(E, C, K, shiftE, coeff, ctx: KeyContext, p: int):
    """x^shift * coeff * element; shiftE carries a zero component column."""
    if len(C) == 0:
        return E, C, K
    return (E + shiftE, (C * (coeff % p)) % p, K + ctx.key_delta(shiftE))


def _lcm_row(leadE_i, leadE_j):
    lcm = np.maximum(leadE_i, leadE_j)
    lcm[0] = leadE_i[0]
    return lcm


def _divides(small, big) -> bool:
    return small[0] == big[0] and bool(np.all(small[1:] <= big[1:]))


class _PairQueue:
    def __init__(self, keyctx: KeyContext):
        self.heap: list = []
        self.alive: set = set()
        self.keyctx = keyctx

    def push(self, i, j, lcm):
        deg = int(lcm[1:].sum())
        key = tuple(int(v) for v in self.keyctx.keys(lcm[None, :])[0])
        heapq.heappush(self.heap, (deg, key, i, j))
        self.alive.add((i, j))

    def discard(self, i, j):
        self.alive.discard((i, j))

    def pop(self):
        while self.heap:
            _, _, i, j = heapq.heappop(self.heap)
            if (i, j) in self.alive:
                self.alive.remove((i, j))
                return i, j
        return None

    def __len__(self):
        return len(self.alive)

    def pairs(self):
        return set(self.alive)


def _update_pairs(queue: _PairQueue, basis: FlatBasis, t: int, coprime_ok: bool):
    """Gebauer-Moeller update after adding basis element t."""
    lmT = basis.leadE[t]

    # chain filter on existing pairs
    for (i, j) in sorted(queue.pairs()):
        lcm_ij = _lcm_row(basis.leadE[i], basis.leadE[j])
        if lmT[0] == lcm_ij[0] and bool(np.all(lmT[1:] <= lcm_ij[1:])):
            lcm_it = _lcm_row(basis.leadE[i], lmT)
            lcm_jt = _lcm_row(basis.leadE[j], lmT)
            if not np.array_equal(lcm_ij, lcm_it) and not np.array_equal(lcm_ij, lcm_jt):
                queue.discard(i, j)

    # group new pairs by lcm
    groups: dict[tuple, list[int]] = {}
    for i in range(t):
        if basis.leadE[i][0] != lmT[0]:
            continue
        lcm = _lcm_row(basis.leadE[i], lmT)
        groups.setdefault(tuple(int(v) for v in lcm), []).append(i)
    kept: list[tuple] = []
    for L in sorted(groups, key=lambda v: (sum(v[1:]), v)):
        Lrow = np.array(L, np.int64)
        if any(_divides(np.array(L2, np.int64), Lrow) for L2 in kept):
            continue
        kept.append(L)
        members = groups[L]
        if coprime_ok and lmT[0] == 0:
            prod_hit = False
            for i in members:
                if np.array_equal(
                    Lrow[1:], basis.leadE[i][1:] + lmT[1:]
                ):
                    prod_hit = True
                    break
            if prod_hit:
                continue
        queue.push(min(members), t, Lrow)


def buchberger(
    inputs,
    keyctx: KeyContext,
    p: int,
    caps: Caps = DEFAULT_CAPS,
    want_traces: bool = False,
):
    """Run Buchberger on canonical nonzero (E, C, K) triples.

    The returned basis equals the input list followed by the new elements
    in insertion order (nothing is discarded), so trace components refer
    to input positions.
    """
    if not inputs:
        return GBResult([], [])
    we = inputs[0][0].shape[1]
    wk = inputs[0][2].shape[1]
    basis = FlatBasis(we, wk)
    queue = _PairQueue(keyctx)
    coprime_ok = True
    traces: list = []
    trace_ctx = KeyContext(keyctx.W) if want_traces else None

    for idx, (E, C, K) in enumerate(inputs):
        t = basis.add(E, C, K)
        _update_pairs(queue, basis, t, coprime_ok)
        if want_traces:
            tE = np.zeros((1, we), np.int64)
            tE[0, 0] = idx
            tC = np.ones(1, np.int64)
            traces.append((tE, tC, trace_ctx.keys(tE)))

    deadline = time.monotonic() + caps.timeout
    processed = 0
    while len(queue):
        pair = queue.pop()
        if pair is None:
            break
        processed += 1
        if processed > caps.max_pairs:
            raise PairLimitExceeded(
                f"S-pair budget of {caps.max_pairs} exhausted"
            )
        if processed % 64 == 0 and time.monotonic() > deadline:
            raise TimeLimitExceeded(f"wall-clock budget of {caps.timeout}s exhausted")
        i, j = pair
        lcm = _lcm_row(basis.leadE[i], basis.leadE[j])
        ai = lcm - basis.leadE[i]
        aj = lcm - basis.leadE[j]
        ci = basis.leadC[i]
        cj = basis.leadC[j]
        Ei, Ci, Ki = basis.element(i)
        Ej, Cj, Kj = basis.element(j)
        sE, sC, sK = shift_scale(Ei, Ci, Ki, ai, cj, keyctx, p)
        s2 = shift_scale(Ej, Cj, Kj, aj, ci, keyctx, p)
        SE, SC, SK = kernels.merge_scaled(sE, sC, sK, s2[0], s2[1], s2[2], p - 1, p)
        GE, GC, GK, Goff = basis.views()
        if want_traces:
            rE, rC, rK, tr_idx, tr_coef, tr_shift = kernels.normal_form_trace(
                SE, SC, SK, GE, GC, GK, Goff, p
            )
        else:
            rE, rC, rK = kernels.normal_form(SE, SC, SK, GE, GC, GK, Goff, p)
        if len(rC):
            lc = int(rC[0])
            inv = kernels.modinv(lc, p)
            rC = (rC * inv) % p
            t = basis.add(rE, rC, rK)
            if want_traces:
                T = _combine_trace(
                    traces, i, j, ai, aj, ci, cj, tr_idx, tr_coef, tr_shift,
                    inv, trace_ctx, p,
                )
                traces.append(T)
            _update_pairs(queue, basis, t, coprime_ok)

    out = [basis.element(k) for k in range(basis.n)]
    return GBResult(out, traces)


def _combine_trace(traces, i, j, ai, aj, ci, cj, tr_idx, tr_coef, tr_shift,
                   inv, ctx, p):
    """Trace of the new basis element over the input columns."""
    E, C, K = shift_scale(*traces[i], ai, cj, ctx, p)
    t2 = shift_scale(*traces[j], aj, ci, ctx, p)
    E, C, K = kernels.merge_scaled(E, C, K, t2[0], t2[1], t2[2], p - 1, p)
    for s in range(len(tr_idx)):
        ts = shift_scale(*traces[int(tr_idx[s])], tr_shift[s], int(tr_coef[s]), ctx, p)
        E, C, K = kernels.merge_scaled(E, C, K, ts[0], ts[1], ts[2], p - 1, p)
    return E, (C * inv) % p, K


def schreyer_frame_pairs(leads: list[np.ndarray]) -> list[tuple[int, int]]:
    """The pairs whose S-syzygies' leads minimally generate the initial
    syzygy module: per index i, the divisibility-minimal monomials among
    lcm(lm_i, lm_j)/lm_i over j > i with the same lead component."""
    out = []
    t = len(leads)
    for i in range(t):
        quots = []
        for j in range(i + 1, t):
            if leads[j][0] != leads[i][0]:
                continue
            lcm = _lcm_row(leads[i], leads[j])
            quots.append((tuple(int(v) for v in (lcm - leads[i])[1:]), j))
        quots.sort(key=lambda q: (sum(q[0]), q[0], q[1]))
        kept: list[tuple] = []
        seen_mono: set = set()
        for mono, j in quots:
            if mono in seen_mono:
                continue
            if any(all(a <= b for a, b in zip(km, mono)) for km, _ in kept):
                continue
            seen_mono.add(mono)
            kept.append((mono, j))
            out.append((i, j))
    return out


def schreyer_syzygies(elements, ctx: KeyContext, p: int, caps: Caps = DEFAULT_CAPS):
    """S-pair reduction syzygies of a Groebner basis, as raw (E, C) term
    arrays over the basis components.  Under the induced Schreyer order
    these form a Groebner basis of the syzygy module."""
    if not elements:
        return []
    we = elements[0][0].shape[1]
    wk = elements[0][2].shape[1]
    basis = FlatBasis(we, wk)
    for e in elements:
        basis.add(*e)
    GE, GC, GK, Goff = basis.views()
    pairs = schreyer_frame_pairs(basis.leadE)

    def pair_key(pr):
        i, j = pr
        lcm = _lcm_row(basis.leadE[i], basis.leadE[j])
        return (int(lcm[1:].sum()), tuple(int(v) for v in ctx.keys(lcm[None, :])[0]), i, j)

    pairs.sort(key=pair_key)
    deadline = time.monotonic() + caps.timeout
    out = []
    for count, (i, j) in enumerate(pairs):
        if count > caps.max_pairs:
            raise PairLimitExceeded(f"S-pair budget of {caps.max_pairs} exhausted")
        if count % 64 == 0 and time.monotonic() > deadline:
            raise TimeLimitExceeded(f"wall-clock budget of {caps.timeout}s exhausted")
        lcm = _lcm_row(basis.leadE[i], basis.leadE[j])
        ai = lcm - basis.leadE[i]
        aj = lcm - basis.leadE[j]
        ci = basis.leadC[i]
        cj = basis.leadC[j]
        sE, sC, sK = shift_scale(*basis.element(i), ai, cj, ctx, p)
        s2 = shift_scale(*basis.element(j), aj, ci, ctx, p)
        SE, SC, SK = kernels.merge_scaled(sE, sC, sK, s2[0], s2[1], s2[2], p - 1, p)
        rE, rC, rK, tr_idx, tr_coef, tr_shift = kernels.normal_form_trace(
            SE, SC, SK, GE, GC, GK, Goff, p
        )
        if len(rC):
            raise AssertionError("S-pair of a Groebner basis did not reduce to zero")
        rows = [np.concatenate(([i], ai[1:])), np.concatenate(([j], aj[1:]))]
        coefs = [cj, -ci]
        for s in range(len(tr_idx)):
            rows.append(np.concatenate(([int(tr_idx[s])], tr_shift[s][1:])))
            coefs.append(-int(tr_coef[s]))
        out.append((np.array(rows, np.int64), np.array(coefs, np.int64)))
    return out


def assemble_raw(raws, ctx: KeyContext, p: int):
    """Canonicalize raw (E, C) term arrays under the given context."""
    out = []
    for E, C in raws:
        K = ctx.keys(E)
        E, C, K = kernels.sort_terms(E, C, K, p)
        if len(C):
            out.append((E, C, K))
    return out


def schreyer_context(base_ctx: KeyContext, leads: list[np.ndarray]) -> KeyContext:
    """Order on the free module over the basis with the given lead terms,
    induced in Schreyer's sense from base_ctx."""
    if not leads:
        return KeyContext(base_ctx.W, np.zeros((1, base_ctx.W.shape[1]), np.int64),
                          np.zeros((1, 1), np.int64))
    leadE = np.array(leads, np.int64)
    comp = leadE[:, 0]
    exps = leadE[:, 1:]
    if base_ctx.lmshift is not None:
        lmshift = base_ctx.lmshift[comp] + exps
    else:
        lmshift = exps.copy()
    newtie = -comp[:, None]
    if base_ctx.ties is not None:
        ties = np.concatenate([base_ctx.ties[comp], newtie], axis=1)
    else:
        ties = newtie
    return KeyContext(base_ctx.W, lmshift, ties)


def normal_form_list(elt, others, p):
    """Reduce (E, C, K) by a list of canonical (E, C, K) reducers."""
    if not others or len(elt[1]) == 0:
        return elt
    we = elt[0].shape[1]
    wk = elt[2].shape[1]
    basis = FlatBasis(we, wk)
    for o in others:
        basis.add(*o)
    GE, GC, GK, Goff = basis.views()
    return kernels.normal_form(elt[0], elt[1], elt[2], GE, GC, GK, Goff, p)


def interreduce(elements, p):
    """Reduced basis from a Groebner basis: minimal leads, reduced tails,
    monic, sorted ascending by lead key."""
    elems = [e for e in elements if len(e[1])]
    order = sorted(range(len(elems)), key=lambda k: tuple(int(v) for v in elems[k][2][0]))
    kept: list[int] = []
    for k in order:
        lead = elems[k][0][0]
        if any(_divides(elems[m][0][0], lead) for m in kept):
            continue
        kept.append(k)
    reduced = []
    kept_elems = [elems[k] for k in kept]
    for idx in range(len(kept_elems)):
        others = kept_elems[:idx] + kept_elems[idx + 1 :]
        E, C, K = normal_form_list(kept_elems[idx], others, p)
        if len(C) == 0:
            continue
        inv = kernels.modinv(int(C[0]), p)
        reduced.append((E, (C * inv) % p, K))
    reduced.sort(key=lambda e: tuple(int(v) for v in e[2][0]))
    return reduced
