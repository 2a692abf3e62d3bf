"""Minimal graded free resolutions, Betti tables, regularity.

The resolution is built Schreyer-style: level 0 is the reduced Groebner
basis of the ideal, each further level collects the S-pair reduction
traces of the previous level (a Groebner basis of the syzygy module under
the induced order), and the resulting non-minimal complex is minimized by
iterated cancellation of constant pivots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .engine import (
    Caps,
    DEFAULT_CAPS,
    assemble_sigmas,
    buchberger,
    interreduce,
    schreyer_context,
    shift_scale,
)
from .groebner import Ideal, groebner_basis, to_ctx
from .modules import FreeModule, ModuleMap, column_to_triple, triple_to_column
from .ring import KeyContext, Poly, Ring, multidegree


@dataclass
class Resolution:
    """Chain F_0 <- F_1 <- ... with maps[k]: F_{k+1} -> F_k."""

    ring: Ring
    modules: list[FreeModule]
    maps: list[ModuleMap]
    minimal: bool = True

    @property
    def length(self) -> int:
        return len(self.modules) - 1

    def check_complex(self):
        for k in range(len(self.maps) - 1):
            comp = self.maps[k].compose(self.maps[k + 1])
            if not comp.is_zero:
                raise AssertionError(f"d_{k} o d_{k+1} != 0")

    def check_minimal(self):
        for A in self.maps:
            for col in A.columns:
                for f in col.values():
                    if len(f.C) and f.total_degree() == 0:
                        raise AssertionError("constant entry in a differential")


class BettiTable:
    """Multiset (homological index, multidegree) -> multiplicity."""

    def __init__(self, entries: dict, arity: int, object_id: str = "module"):
        self.entries = dict(entries)
        self.arity = arity
        self.object_id = object_id

    def projdim(self) -> int:
        return max((i for i, _ in self.entries), default=0)

    def regularity(self) -> int:
        if self.arity != 1:
            raise ValueError("regularity needs a Z-graded table")
        return max(d[0] - i for (i, d) in self.entries)

    def reg_10(self) -> int:
        if self.arity != 2:
            raise ValueError("(1,0)-regularity needs a Z^2-graded table")
        return max(d[0] - i for (i, d) in self.entries)

    def total(self, i: int) -> int:
        return sum(m for (j, _), m in self.entries.items() if j == i)

    def generator_degrees(self) -> list[tuple]:
        out = []
        for (i, d), m in sorted(self.entries.items()):
            if i == 0:
                out.extend([d] * m)
        return out

    def text(self) -> str:
        """Golden-file format: header then one sorted line per entry."""
        lines = [f"betti {self.object_id} g={self.arity}"]
        for (i, d), m in sorted(self.entries.items()):
            comps = " ".join(str(x) for x in d)
            lines.append(f"{i} {comps} {m}")
        return "\n".join(lines)

    def __eq__(self, other):
        if not isinstance(other, BettiTable):
            return NotImplemented
        return self.entries == other.entries and self.arity == other.arity

    def __repr__(self):
        return self.text()


# ---------------------------------------------------------------------------
# Schreyer levels


def _schreyer_levels(I: Ideal, caps: Caps):
    """Non-minimal resolution data: list of (shifts, elements, ctx) per
    level plus the ring-level Groebner basis at level 0."""
    ring = I.ring
    p = ring.characteristic
    base_ctx = ring.keyctx()
    gb = groebner_basis(I, caps=caps)
    if not gb:
        return []
    level = [to_ctx(g, base_ctx) for g in gb]
    shifts = [multidegree(g) for g in gb]
    ctx = base_ctx
    out = [(tuple(shifts), level, ctx)]
    hard_cap = ring.nvars + 8
    for depth in range(hard_cap + 1):
        if depth == hard_cap:
            raise RuntimeError("Schreyer iteration exceeded the sanity cap")
        result = buchberger(level, ctx, p, caps, mode="syz")
        assert len(result.basis) == len(level), "input of a syzygy level must be a GB"
        next_ctx = schreyer_context(ctx, [E[0] for E, C, K in level])
        sig = assemble_sigmas(result.sigmas, next_ctx, ring.nvars + 1, p)
        sig = interreduce(sig, p)
        if not sig:
            break
        sig_shifts = []
        for E, C, K in sig:
            degs = E[:, 1:] @ ring.degs
            d0 = degs[0] + np.array(out[-1][0][int(E[0, 0])], np.int64)
            sig_shifts.append(tuple(int(v) for v in d0))
        out.append((tuple(sig_shifts), sig, next_ctx))
        level, ctx = sig, next_ctx
    return out


# ---------------------------------------------------------------------------
# minimization


def _minimize(shift_levels: list[list[tuple]], maps: list[dict]):
    """Cancel constant pivots in place.

    maps[k]: dict col -> dict row -> Poly for the map F_{k+1} -> F_k.
    Returns (alive sets per level, maps).
    """
    nlev = len(shift_levels)
    alive = [set(range(len(s))) for s in shift_levels]

    def find_pivot():
        for k, A in enumerate(maps):
            for c in sorted(A):
                col = A[c]
                for r in sorted(col):
                    f = col[r]
                    if len(f.C) == 1 and not f.E[0, 1:].any():
                        return k, r, c
        return None

    while True:
        hit = find_pivot()
        if hit is None:
            break
        k, r, c = hit
        A = maps[k]
        u = int(A[c][r].C[0])
        p = A[c][r].ring.characteristic
        uinv = kernels.modinv(u, p)
        pivot_col = A[c]
        for c2 in list(A):
            if c2 == c:
                continue
            col2 = A[c2]
            if r not in col2:
                continue
            factor = col2[r] * uinv
            for r2, f in pivot_col.items():
                new = col2.get(r2, f.ring.zero) - factor * f
                if new.is_zero:
                    col2.pop(r2, None)
                else:
                    col2[r2] = new
        del A[c]
        for col2 in A.values():
            col2.pop(r, None)
        alive[k + 1].discard(c)
        alive[k].discard(r)
        if k + 1 < len(maps):
            for col2 in maps[k + 1].values():
                col2.pop(c, None)
        if k > 0:
            maps[k - 1].pop(r, None)
    return alive, maps


def _build_resolution(I: Ideal, caps: Caps) -> Resolution:
    ring = I.ring
    levels = _schreyer_levels(I, caps)
    if not levels:
        return Resolution(ring, [], [], minimal=True)
    shift_levels = [list(sh) for sh, _, _ in levels]
    maps: list[dict] = []
    for k in range(1, len(levels)):
        _, elements, _ = levels[k]
        A: dict[int, dict[int, Poly]] = {}
        for c, (E, C, K) in enumerate(elements):
            A[c] = triple_to_column(E, C, ring)
        maps.append(A)
    alive, maps = _minimize(shift_levels, maps)
    # drop empty tail levels, compress indices
    while alive and not alive[-1]:
        alive.pop()
        shift_levels.pop()
        if maps:
            maps.pop()
    modules = []
    renum = []
    for lev in range(len(shift_levels)):
        keep = sorted(alive[lev])
        renum.append({old: new for new, old in enumerate(keep)})
        modules.append(
            FreeModule(ring, tuple(tuple(shift_levels[lev][o]) for o in keep))
        )
    mmaps = []
    for k, A in enumerate(maps):
        cols = []
        for c in sorted(alive[k + 1]):
            col = A.get(c, {})
            cols.append({renum[k][r]: f for r, f in col.items()})
        mmaps.append(ModuleMap(modules[k + 1], modules[k], cols))
    res = Resolution(ring, modules, mmaps, minimal=True)
    return res


def free_resolution(I: Ideal, length_bound: int | None = None,
                    caps: Caps = DEFAULT_CAPS) -> Resolution:
    """Minimal graded free resolution of the module I (cached on I)."""
    if I._resolution is None:
        I._resolution = _build_resolution(I, caps)
    res = I._resolution
    if length_bound is not None and res.length > length_bound:
        res = Resolution(
            res.ring,
            res.modules[: length_bound + 1],
            res.maps[:length_bound],
            minimal=True,
        )
    return res


# ---------------------------------------------------------------------------
# Betti tables and invariants


def betti_table(obj, object_id: str | None = None,
                caps: Caps = DEFAULT_CAPS) -> BettiTable:
    """Betti table of an Ideal (resolved as a module) or a Resolution."""
    if isinstance(obj, Ideal):
        res = free_resolution(obj, caps=caps)
        label = object_id or "ideal"
        ring = obj.ring
    else:
        res = obj
        label = object_id or "module"
        ring = res.ring
    entries: dict = {}
    for i, mod in enumerate(res.modules):
        for d in mod.shifts:
            entries[(i, d)] = entries.get((i, d), 0) + 1
    return BettiTable(entries, ring.grading_arity, label)


def betti_table_quotient(I: Ideal, object_id: str | None = None,
                         caps: Caps = DEFAULT_CAPS) -> BettiTable:
    """Betti table of S/I: beta_0 = 1 in degree 0, beta_{i+1} = beta_i(I)."""
    tab = betti_table(I, caps=caps)
    g = I.ring.grading_arity
    entries = {(0, (0,) * g): 1}
    for (i, d), m in tab.entries.items():
        entries[(i + 1, d)] = m
    return BettiTable(entries, g, object_id or "quotient")


def projdim(obj, caps: Caps = DEFAULT_CAPS) -> int:
    if isinstance(obj, Ideal):
        return free_resolution(obj, caps=caps).length
    return obj.length


def regularity(I: Ideal, caps: Caps = DEFAULT_CAPS) -> int:
    """Castelnuovo-Mumford regularity of the ideal (not the quotient):
    max degree minus homological index over the minimal resolution."""
    if I.ring.grading_arity != 1:
        raise ValueError("regularity requires a Z-graded ring")
    return betti_table(I, caps=caps).regularity()


def reg_10(I: Ideal, of_quotient: bool = True, caps: Caps = DEFAULT_CAPS) -> int:
    """sup{a - i} over nonzero beta_{i,(a,b)}; by default of the quotient
    ring A/I, which is the Rees-algebra convention."""
    if I.ring.grading_arity != 2:
        raise ValueError("(1,0)-regularity requires a Z^2-graded ring")
    if of_quotient:
        return betti_table_quotient(I, caps=caps).reg_10()
    return betti_table(I, caps=caps).reg_10()


def is_linear_resolution(I: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
    """True iff I is generated in one degree d and beta_{i,j} != 0 forces
    j = d + i (equivalently reg(I) = d)."""
    verdict, _ = linear_resolution_verdict(I, caps)
    return verdict


def linear_resolution_verdict(I: Ideal, caps: Caps = DEFAULT_CAPS):
    from .groebner import minimal_generators

    gens = minimal_generators(I)
    if not gens:
        return False, "zero ideal"
    degs = {g.total_degree() for g in gens}
    if len(degs) > 1:
        return False, "not equigenerated"
    d = degs.pop()
    r = regularity(I, caps)
    return r == d, f"reg {r} vs generation degree {d}"


# ---------------------------------------------------------------------------
# syzygies of explicit generator lists / maps


def syzygies(gens, caps: Caps = DEFAULT_CAPS) -> ModuleMap:
    """Generating syzygies of a polynomial list or of a ModuleMap's columns.

    Returns a map whose columns generate the full syzygy module; composing
    the input with each column gives zero.
    """
    if isinstance(gens, ModuleMap):
        ring = gens.source.ring
        target = gens.target
        ctx = ring.keyctx()
        inputs = [column_to_triple(col, ctx, ring) for col in gens.columns]
        in_shifts = gens.source.shifts
    else:
        gens = list(gens)
        if not gens:
            raise ValueError("syzygies of an empty list")
        ring = gens[0].ring
        ctx = ring.keyctx()
        inputs = [to_ctx(g, ctx) for g in gens]
        target = FreeModule(ring, ((0,) * ring.grading_arity,))
        in_shifts = tuple(multidegree(g) for g in gens)
    p = ring.characteristic
    live = [(i, e) for i, e in enumerate(inputs) if len(e[1])]
    result = buchberger([e for _, e in live], ctx, p, caps, mode="syz",
                        want_traces=True)
    trace_ctx = KeyContext(ctx.W)
    cols = []
    for sig in result.sigmas:
        from .engine import sigma_terms

        E, C = sigma_terms(sig, ring.nvars + 1)
        # project through traces onto the input coordinates
        acc = (
            np.empty((0, ring.nvars + 1), np.int64),
            np.empty(0, np.int64),
            np.empty((0, trace_ctx.width), np.int64),
        )
        for t in range(len(C)):
            comp = int(E[t, 0])
            shiftE = E[t].copy()
            shiftE[0] = 0
            piece = shift_scale(*result.traces[comp], shiftE, int(C[t]), trace_ctx, p)
            acc = kernels.merge_scaled(acc[0], acc[1], acc[2],
                                       piece[0], piece[1], piece[2], 1, p)
        if len(acc[1]):
            cols.append(acc)
    syz_cols = []
    shifts = []
    seen = set()
    for E, C, K in cols:
        col = triple_to_column(E, C, ring)
        col = {live[r][0]: f for r, f in col.items()}
        fp = tuple(
            sorted((r, f.E.tobytes(), f.C.tobytes()) for r, f in col.items())
        )
        if fp in seen:
            continue
        seen.add(fp)
        degs = E[:1, 1:] @ ring.degs
        d0 = tuple(int(v) for v in degs[0] + np.array(in_shifts[live[int(E[0, 0])][0]]))
        syz_cols.append(col)
        shifts.append(d0)
    source_of_input = FreeModule(ring, tuple(in_shifts))
    syz_source = FreeModule(ring, tuple(shifts))
    return ModuleMap(syz_source, source_of_input, syz_cols)


# ---------------------------------------------------------------------------
# consistency checks (used by the property suites)


def euler_characteristic_check(I: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
    """Alternating Betti sums of S/I reproduce the Hilbert numerator."""
    from .groebner import hilbert_numerator

    num = hilbert_numerator(I, caps)
    tab = betti_table(I, caps=caps)
    g = I.ring.grading_arity
    acc: dict[tuple, int] = {(0,) * g: 1}
    for (i, d), m in tab.entries.items():
        acc[d] = acc.get(d, 0) + (-1) ** (i + 1) * m
    acc = {k: v for k, v in acc.items() if v}
    return acc == num
