"""Ideals and the Groebner-based toolbox.

Normal forms, reduced Groebner bases (cached per order), elimination,
intersection, colon and saturation, dimension and height, powers, minimal
generators, quadratic-GB tests and Hilbert numerators.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .engine import Caps, DEFAULT_CAPS, FlatBasis, buchberger, interreduce
from .errors import RingMismatchError, UnitIdealError
from .linalg import RowSpace
from .ring import (
    KeyContext,
    MonomialOrder,
    Poly,
    Ring,
    elimination_order,
    graded_components,
    is_homogeneous,
    make_ring,
    multidegree,
)

# ---------------------------------------------------------------------------
# conversions between Poly and engine term arrays


def to_ctx(f: Poly, ctx: KeyContext):
    K = ctx.keys(f.E)
    return kernels.sort_terms(f.E.copy(), f.C.copy(), K, f.ring.characteristic)


def from_arrays(ring: Ring, E, C) -> Poly:
    K = ring.keyctx().keys(E)
    E, C, K = kernels.sort_terms(E, C, K, ring.characteristic)
    return Poly(ring, E, C, K)


def _lead_key_tuple(f: Poly):
    return tuple(int(v) for v in f.K[0])


class Ideal:
    """Homogeneous ideal given by generators, with cached reduced GBs."""

    def __init__(self, ring: Ring, gens, _skip_checks: bool = False):
        self.ring = ring
        polys = []
        for g in gens:
            if isinstance(g, str):
                from .ring import parse_poly

                g = parse_poly(g, ring)
            if g.ring != ring:
                raise RingMismatchError("generator in wrong ring")
            if g.is_zero:
                continue
            if not _skip_checks and multidegree(g) is None:
                raise ValueError(f"inhomogeneous generator: {g}")
            polys.append(g)
        self.gens: tuple[Poly, ...] = tuple(polys)
        self._gb: dict[MonomialOrder, tuple[Poly, ...]] = {}
        self._mingens: tuple[Poly, ...] | None = None
        self._powers: dict[int, "Ideal"] = {}
        self._resolution = None

    @property
    def is_zero(self) -> bool:
        return not self.gens

    def __repr__(self):
        inside = ", ".join(str(g) for g in self.gens[:6])
        if len(self.gens) > 6:
            inside += f", ... ({len(self.gens)} gens)"
        return f"Ideal({inside})"

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return ideal_equal(self, other)

    def __hash__(self):
        return hash((self.ring, self.gens))


# ---------------------------------------------------------------------------
# normal forms and bases


def normal_form(f: Poly, G, order: MonomialOrder | None = None) -> Poly:
    """Remainder of f under division by the polynomial list G."""
    ring = f.ring
    order = order or ring.order
    ctx = ring.keyctx(order)
    reducers = [g for g in G if not g.is_zero]
    if f.is_zero or not reducers:
        return f
    basis = FlatBasis(ring.nvars + 1, ctx.width)
    for g in reducers:
        if g.ring != ring:
            raise RingMismatchError("reducer in wrong ring")
        basis.add(*to_ctx(g, ctx))
    E, C, K = to_ctx(f, ctx)
    GE, GC, GK, Goff = basis.views()
    E, C, K = kernels.normal_form(E, C, K, GE, GC, GK, Goff, ring.characteristic)
    return from_arrays(ring, E, C)


def groebner_basis(
    I: Ideal,
    order: MonomialOrder | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> tuple[Poly, ...]:
    """Reduced, monic, canonically sorted Groebner basis (cached)."""
    ring = I.ring
    order = order or ring.order
    if order in I._gb:
        return I._gb[order]
    ctx = ring.keyctx(order)
    arrays = [to_ctx(g, ctx) for g in I.gens]
    result = buchberger(arrays, ctx, ring.characteristic, caps, mode="ideal")
    reduced = interreduce(result.basis, ring.characteristic)
    polys = tuple(from_arrays(ring, E, C) for E, C, K in reduced)
    I._gb[order] = polys
    return polys


def ideal_membership(f: Poly, I: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
    if f.ring != I.ring:
        raise RingMismatchError("membership test across rings")
    if f.is_zero:
        return True
    gb = groebner_basis(I, caps=caps)
    return normal_form(f, gb).is_zero


def ideal_equal(I: Ideal, J: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
    if I.ring != J.ring:
        raise RingMismatchError("ideal comparison across rings")
    return groebner_basis(I, caps=caps) == groebner_basis(J, caps=caps)


def ideal_contains(I: Ideal, J: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
    """I contains J."""
    gb = groebner_basis(I, caps=caps)
    return all(normal_form(g, gb).is_zero for g in J.gens)


# ---------------------------------------------------------------------------
# ring extension / transport helpers


def extend_ring(ring: Ring, new_names, degree=None, front: bool = False) -> Ring:
    """Adjoin variables (default degree: first unit vector of the grading)."""
    new_names = tuple(new_names)
    g = ring.grading_arity
    if degree is None:
        degree = (1,) + (0,) * (g - 1)
    names = new_names + ring.names if front else ring.names + new_names
    extra = tuple(tuple(degree) for _ in new_names)
    grading = extra + ring.grading if front else ring.grading + extra
    return make_ring(names, ring.characteristic, grading, ring.order)


def transport(f: Poly, target: Ring) -> Poly:
    """Re-express f in a ring containing the same-named variables."""
    pos = [target.var_index[nm] for nm in f.ring.names]
    E = np.zeros((len(f.C), target.nvars + 1), np.int64)
    for src, dst in enumerate(pos):
        E[:, 1 + dst] = f.E[:, 1 + src]
    return from_arrays(target, E, f.C.copy())


def fresh_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name = name + "_"
    return name


# ---------------------------------------------------------------------------
# elimination, intersection, colon, saturation


def _engine_eliminate(ring: Ring, raw_gens, first_vars, caps: Caps):
    """Generators of the elimination ideal, as polynomials of `ring` free
    of first_vars.  Accepts inhomogeneous input (used by the aux-variable
    tricks); callers split graded components as needed."""
    order = elimination_order(tuple(sorted(first_vars, key=ring.var_index.get)))
    ctx = ring.keyctx(order)
    arrays = [to_ctx(g, ctx) for g in raw_gens if not g.is_zero]
    result = buchberger(arrays, ctx, ring.characteristic, caps, mode="ideal")
    reduced = interreduce(result.basis, ring.characteristic)
    cols = [ring.var_index[v] + 1 for v in first_vars]
    out = []
    for E, C, K in reduced:
        if len(C) and not E[:, cols].any():
            out.append(from_arrays(ring, E, C))
    return out


def eliminate(I: Ideal, first_vars, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """The ideal I ∩ K[remaining variables], inside the same ring."""
    first_vars = set(first_vars)
    unknown = first_vars - set(I.ring.names)
    if unknown:
        raise ValueError(f"unknown variables {sorted(unknown)}")
    if not first_vars:
        return Ideal(I.ring, I.gens)
    gens = _engine_eliminate(I.ring, list(I.gens), first_vars, caps)
    return Ideal(I.ring, gens)


def intersect(I: Ideal, J: Ideal, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """I ∩ J via elimination of t from t*I + (1-t)*J."""
    if I.ring != J.ring:
        raise RingMismatchError("intersection across rings")
    ring = I.ring
    if I.is_zero or J.is_zero:
        return Ideal(ring, ())
    t_name = fresh_name("_t", ring.names)
    big = extend_ring(ring, (t_name,), front=True)
    t = big.var(t_name)
    one_minus_t = big.one - t
    raw = [t * transport(f, big) for f in I.gens]
    raw += [one_minus_t * transport(g, big) for g in J.gens]
    elim = _engine_eliminate(big, raw, {t_name}, caps)
    gens = []
    for h in elim:
        back = _drop_variable(h, ring, t_name)
        gens.extend(graded_components(back))
    return Ideal(ring, gens)


def _drop_variable(f: Poly, target: Ring, name: str) -> Poly:
    """Transport f (which must not involve `name`) into the smaller ring."""
    src = f.ring
    col = src.var_index[name] + 1
    assert not f.E[:, col].any()
    keep = [i + 1 for i, nm in enumerate(src.names) if nm != name]
    E = np.zeros((len(f.C), target.nvars + 1), np.int64)
    for dst, srccol in enumerate(keep):
        E[:, 1 + target.var_index[src.names[srccol - 1]]] = f.E[:, srccol]
    return from_arrays(target, E, f.C.copy())


def exact_div(h: Poly, g: Poly) -> Poly:
    """Quotient h/g for exactly divisible h (raises otherwise)."""
    ring = h.ring
    if g.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if h.is_zero:
        return h
    ctx = ring.keyctx()
    basis = FlatBasis(ring.nvars + 1, ctx.width)
    basis.add(*to_ctx(g, ctx))
    E, C, K = to_ctx(h, ctx)
    GE, GC, GK, Goff = basis.views()
    rE, rC, rK, idx, coef, shift = kernels.normal_form_trace(
        E, C, K, GE, GC, GK, Goff, ring.characteristic
    )
    if len(rC):
        raise ValueError("not exactly divisible")
    qE = shift.copy()
    return from_arrays(ring, qE, coef.copy())


def colon(I: Ideal, J: Ideal, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """Colon ideal I : J, computed generator by generator of J."""
    if I.ring != J.ring:
        raise RingMismatchError("colon across rings")
    if J.is_zero:
        raise ValueError("colon by the zero ideal")
    result: Ideal | None = None
    for g in J.gens:
        inter = intersect(I, Ideal(I.ring, (g,)), caps)
        part = Ideal(I.ring, tuple(exact_div(h, g) for h in inter.gens))
        result = part if result is None else intersect(result, part, caps)
    return result


def saturate(I: Ideal, J: Ideal, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """I : J^infinity, by iterating colon until stable."""
    cur = I
    while True:
        nxt = colon(cur, J, caps)
        if ideal_equal(nxt, cur, caps):
            return cur
        cur = nxt


# ---------------------------------------------------------------------------
# dimension / height


def dim_and_height(I: Ideal, caps: Caps = DEFAULT_CAPS) -> tuple[int, int]:
    """(Krull dimension of S/I, height of I) via the initial ideal."""
    n = I.ring.nvars
    if I.is_zero:
        return n, 0
    gb = groebner_basis(I, caps=caps)
    masks = []
    for g in gb:
        exps = g.lead_exps()
        if not exps.any():
            raise UnitIdealError("dimension of the unit ideal is undefined")
        mask = 0
        for i in range(n):
            if exps[i]:
                mask |= 1 << i
        masks.append(mask)
    masks = sorted(set(masks))
    best = 0
    universe = list(range(n))

    def independent(subset_mask: int) -> bool:
        return all(m & ~subset_mask for m in masks)

    # depth-first over variable subsets with pruning by best-so-far
    def search(idx: int, mask: int, size: int):
        nonlocal best
        if size + (n - idx) <= best:
            return
        if idx == n:
            best = max(best, size)
            return
        cand = mask | (1 << universe[idx])
        if independent(cand):
            search(idx + 1, cand, size + 1)
        search(idx + 1, mask, size)

    search(0, 0, 0)
    return best, n - best


# ---------------------------------------------------------------------------
# minimal generators and powers


def minimal_generators(I: Ideal) -> tuple[Poly, ...]:
    """Minimal homogeneous generating set, degree by degree.

    Within one total degree the candidates are scanned largest leading
    monomial first; a candidate is kept iff it is not a combination of
    monomial multiples of previously kept generators.
    """
    if I._mingens is not None:
        return I._mingens
    ring = I.ring
    p = ring.characteristic
    cands = sorted(
        I.gens,
        key=lambda f: (f.total_degree(), tuple(-int(v) for v in f.K[0])),
    )
    kept: list[Poly] = []
    i = 0
    while i < len(cands):
        d = cands[i].total_degree()
        block = []
        while i < len(cands) and cands[i].total_degree() == d:
            block.append(cands[i])
            i += 1
        # column space: all monomials of total degree d that can occur
        cols: dict[tuple, int] = {}

        def colof(exps):
            key = tuple(int(e) for e in exps)
            if key not in cols:
                cols[key] = len(cols)
            return cols[key]

        rows_lower = []
        for g in kept:
            dg = g.total_degree()
            if dg >= d:
                continue
            for shift in ring.monomials_of_degree(d - dg):
                sh = np.array((0,) + shift, np.int64)
                prod_E = g.E + sh
                rows_lower.append((prod_E, g.C))
        for f in block:
            for e in f.E:
                colof(e[1:])
        for E, C in rows_lower:
            for e in E:
                colof(e[1:])
        space = RowSpace(len(cols), p)
        for E, C in rows_lower:
            vec = np.zeros(len(cols), np.int64)
            for r in range(len(C)):
                vec[colof(E[r, 1:])] = C[r]
            space.add(vec)
        for f in block:
            vec = np.zeros(len(cols), np.int64)
            for r in range(len(f.C)):
                vec[colof(f.E[r, 1:])] = f.C[r]
            if space.add(vec):
                kept.append(f)
    I._mingens = tuple(kept)
    return I._mingens


def ideal_power(I: Ideal, k: int) -> Ideal:
    """I^k with minimal generators, interreducing after each step."""
    if k < 1:
        raise ValueError("power must be >= 1")
    if k in I._powers:
        return I._powers[k]
    base = minimal_generators(I)
    if not base:
        return Ideal(I.ring, ())
    if k == 1:
        result = Ideal(I.ring, base)
        result._mingens = base
    else:
        prev = ideal_power(I, k - 1)
        prev_gens = minimal_generators(prev)
        seen = set()
        prods = []
        for a in prev_gens:
            for b in base:
                q = a * b
                if q not in seen:
                    seen.add(q)
                    prods.append(q)
        result = Ideal(I.ring, prods)
        result._mingens = minimal_generators(result)
        result = Ideal(I.ring, result._mingens)
        result._mingens = result.gens
    I._powers[k] = result
    return result


# ---------------------------------------------------------------------------
# quadratic GB test and Hilbert numerator


def is_quadratic_gb(
    I: Ideal, orders, caps: Caps = DEFAULT_CAPS
) -> list[bool]:
    """Per order: does the reduced GB consist of total degree <= 2 elements?"""
    out = []
    for order in orders:
        gb = groebner_basis(I, order, caps)
        out.append(all(g.total_degree() <= 2 for g in gb))
    return out


def hilbert_numerator(I: Ideal, caps: Caps = DEFAULT_CAPS) -> dict[tuple, int]:
    """K-polynomial of S/I as a map multidegree -> integer coefficient.

    Computed by the standard splitting recursion on the initial ideal.
    """
    ring = I.ring
    gb = groebner_basis(I, caps=caps)
    exps = [tuple(int(v) for v in g.lead_exps()) for g in gb]
    for e in exps:
        if not any(e):
            raise UnitIdealError("Hilbert numerator of the unit ideal")
    degs = ring.degs
    g = ring.grading_arity
    n = ring.nvars

    def mono_deg(e) -> tuple:
        return tuple(int(v) for v in np.array(e, np.int64) @ degs)

    def minimalize(ms):
        ms = sorted(set(ms), key=lambda e: (sum(e), e))
        out = []
        for m in ms:
            if not any(all(o[i] <= m[i] for i in range(n)) for o in out):
                out.append(m)
        return tuple(out)

    def kp_mul(a: dict, b: dict) -> dict:
        out: dict[tuple, int] = {}
        for da, ca in a.items():
            for db, cb in b.items():
                key = tuple(x + y for x, y in zip(da, db))
                out[key] = out.get(key, 0) + ca * cb
        return {k: v for k, v in out.items() if v}

    zero_deg = (0,) * g
    memo: dict[tuple, dict] = {}

    def rec(ms: tuple) -> dict:
        if ms in memo:
            return memo[ms]
        if not ms:
            return {zero_deg: 1}
        if len(ms) == 1 or _pairwise_coprime(ms):
            out = {zero_deg: 1}
            for m in ms:
                out = kp_mul(out, {zero_deg: 1, mono_deg(m): -1})
            memo[ms] = out
            return out
        # pivot: the most frequent variable among non-linear generators
        counts = [0] * n
        for m in ms:
            if sum(m) >= 2:
                for i in range(n):
                    if m[i]:
                        counts[i] += 1
        piv = max(range(n), key=lambda i: (counts[i], -i))
        ev = tuple(1 if i == piv else 0 for i in range(n))
        plus = minimalize([m for m in ms if not m[piv]] + [ev])
        quot = minimalize(
            [tuple(m[i] - (1 if i == piv and m[i] else 0) for i in range(n)) for m in ms]
        )
        a = rec(plus)
        b = kp_mul({mono_deg(ev): 1}, rec(quot))
        out = {}
        for k in set(a) | set(b):
            v = a.get(k, 0) + b.get(k, 0)
            if v:
                out[k] = v
        memo[ms] = out
        return out

    def _pairwise_coprime(ms) -> bool:
        used = [0] * n
        for m in ms:
            for i in range(n):
                if m[i]:
                    if used[i]:
                        return False
                    used[i] = 1
        return True

    return rec(minimalize(exps))


def hilbert_numerator_string(num: dict[tuple, int], vars=("t", "s")) -> str:
    if not num:
        return "0"
    parts = []
    for deg in sorted(num):
        c = num[deg]
        body = "".join(
            f"*{vars[i]}^{d}" if d > 1 else (f"*{vars[i]}" if d == 1 else "")
            for i, d in enumerate(deg)
        )
        if body and abs(c) == 1:
            mono = body[1:]
        elif body:
            mono = str(abs(c)) + body
        else:
            mono = str(abs(c))
        if not parts:
            parts.append(("-" if c < 0 else "") + mono)
        else:
            parts.append((" - " if c < 0 else " + ") + mono)
    return "".join(parts)
