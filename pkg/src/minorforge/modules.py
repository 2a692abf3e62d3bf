"""Graded free modules and maps between them.

A ModuleMap stores its columns sparsely as {row index: Poly}; entry (r, c)
of the matrix is columns[c].get(r, 0).  Shifts are recorded exactly: the
degree of a nonzero entry equals shift_source(c) - shift_target(r).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .ring import KeyContext, Poly, Ring, multidegree


@dataclass(frozen=True)
class FreeModule:
    ring: Ring
    shifts: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.shifts)

    def __repr__(self):
        return f"FreeModule(rank {self.rank})"


class ModuleMap:
    """Map between free modules, columns = images of source basis vectors."""

    def __init__(self, source: FreeModule, target: FreeModule, columns):
        self.source = source
        self.target = target
        self.columns: tuple[dict[int, Poly], ...] = tuple(
            {r: f for r, f in col.items() if not f.is_zero} for col in columns
        )
        if len(self.columns) != source.rank:
            raise ValueError("column count must match source rank")

    def entry(self, r: int, c: int) -> Poly:
        return self.columns[c].get(r, self.source.ring.zero)

    @property
    def is_zero(self) -> bool:
        return all(not col for col in self.columns)

    def apply(self, vector: dict[int, Poly]) -> dict[int, Poly]:
        """Image of a source-coordinate vector, as target coordinates."""
        out: dict[int, Poly] = {}
        for c, f in vector.items():
            for r, g in self.columns[c].items():
                prod = f * g
                if r in out:
                    out[r] = out[r] + prod
                else:
                    out[r] = prod
        return {r: f for r, f in out.items() if not f.is_zero}

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self o other (other feeds into self)."""
        cols = [self.apply(col) for col in other.columns]
        return ModuleMap(other.source, self.target, cols)

    def check_graded(self):
        """Assert each entry is homogeneous of degree shift_src - shift_tgt."""
        for c, col in enumerate(self.columns):
            for r, f in col.items():
                d = multidegree(f)
                expect = tuple(
                    a - b for a, b in zip(self.source.shifts[c], self.target.shifts[r])
                )
                if d != expect:
                    raise AssertionError(
                        f"entry ({r},{c}) degree {d}, expected {expect}"
                    )


# -- conversions between sparse columns and engine term arrays --------------


def column_to_triple(col: dict[int, Poly], ctx: KeyContext, ring: Ring):
    rows = []
    coefs = []
    for r in sorted(col):
        f = col[r]
        E = f.E.copy()
        E[:, 0] = r
        rows.append(E)
        coefs.append(f.C)
    if not rows:
        n = ring.nvars
        return (
            np.empty((0, n + 1), np.int64),
            np.empty(0, np.int64),
            np.empty((0, ctx.width), np.int64),
        )
    E = np.concatenate(rows)
    C = np.concatenate(coefs)
    K = ctx.keys(E)
    return kernels.sort_terms(E, C, K, ring.characteristic)


def triple_to_column(E, C, ring: Ring) -> dict[int, Poly]:
    out: dict[int, Poly] = {}
    comps = E[:, 0]
    for comp in sorted(set(int(c) for c in comps)):
        idx = np.flatnonzero(comps == comp)
        Ec = E[idx].copy()
        Ec[:, 0] = 0
        from .groebner import from_arrays

        out[comp] = from_arrays(ring, Ec, C[idx].copy())
    return out
