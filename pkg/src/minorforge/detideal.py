"""Matrices of linear forms, minor ideals and the named families.

Families: generic m x n, generic symmetric n x n, rational normal scrolls
(block-Hankel convention), the two bundled counterexample matrices, and
custom matrices from JSON.  Heights, theorem-hypothesis reports and the
random y-perturbation live here as well.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .engine import Caps, DEFAULT_CAPS
from .errors import GenericityError
from .groebner import (
    Ideal,
    dim_and_height,
    extend_ring,
    fresh_name,
    minimal_generators,
    transport,
)
from .ring import Poly, Ring, make_ring, multidegree, parse_poly


@dataclass
class LinearMatrix:
    """m x n matrix of degree-1 forms (or zero) over a Z-graded ring."""

    ring: Ring
    rows: tuple[tuple[Poly, ...], ...]
    family: str = "custom"

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.rows[0]):
                raise ValueError("ragged matrix")
            for f in row:
                if f.is_zero:
                    continue
                if multidegree(f) != (1,) * f.ring.grading_arity and f.total_degree() != 1:
                    raise ValueError(f"entry {f} is not a linear form")
        if self.nrows > self.ncols:
            raise ValueError("matrix must satisfy m <= n (transpose first)")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def transpose(self) -> "LinearMatrix":
        rows = tuple(
            tuple(self.rows[i][j] for i in range(self.nrows))
            for j in range(self.ncols)
        )
        return LinearMatrix.__new__(LinearMatrix).__init_shallow__(
            self.ring, rows, self.family
        )

    def __init_shallow__(self, ring, rows, family):
        # transpose may break m <= n; used internally for height checks
        self.ring = ring
        self.rows = rows
        self.family = family
        return self

    def entry(self, i: int, j: int) -> Poly:
        return self.rows[i][j]

    def __repr__(self):
        return f"LinearMatrix({self.family}, {self.nrows}x{self.ncols})"


# ---------------------------------------------------------------------------
# family construction


def _matrix_from_entries(ring, entries, family):
    rows = tuple(tuple(r) for r in entries)
    return LinearMatrix(ring, rows, family)


def generic_matrix(m: int, n: int, p: int = 32003) -> LinearMatrix:
    if m > n:
        m, n = n, m
    names = [f"x{i}_{j}" for i in range(1, m + 1) for j in range(1, n + 1)]
    ring = make_ring(names, p)
    ent = [[ring.var(f"x{i}_{j}") for j in range(1, n + 1)] for i in range(1, m + 1)]
    return _matrix_from_entries(ring, ent, f"generic:{m}x{n}")


def symmetric_matrix(n: int, p: int = 32003) -> LinearMatrix:
    names = [f"x{i}{j}" for i in range(1, n + 1) for j in range(i, n + 1)]
    ring = make_ring(names, p)
    ent = [
        [ring.var(f"x{min(i, j)}{max(i, j)}") for j in range(1, n + 1)]
        for i in range(1, n + 1)
    ]
    return _matrix_from_entries(ring, ent, f"symmetric:{n}")


def scroll_matrix(blocks, p: int = 32003) -> LinearMatrix:
    """2 x (sum a_i) block-Hankel matrix: block i is
    [x_{i,0} .. x_{i,a_i - 1} / x_{i,1} .. x_{i,a_i}]."""
    blocks = tuple(int(a) for a in blocks)
    if not blocks or any(a <= 0 for a in blocks):
        raise ValueError("scroll blocks must be positive integers")
    if len(blocks) == 1:
        a = blocks[0]
        names = [f"x{j}" for j in range(a + 1)]
        ring = make_ring(names, p)
        top = [ring.var(f"x{j}") for j in range(a)]
        bot = [ring.var(f"x{j}") for j in range(1, a + 1)]
    else:
        names = []
        for i, a in enumerate(blocks, start=1):
            names += [f"x{i}_{j}" for j in range(a + 1)]
        ring = make_ring(names, p)
        top, bot = [], []
        for i, a in enumerate(blocks, start=1):
            top += [ring.var(f"x{i}_{j}") for j in range(a)]
            bot += [ring.var(f"x{i}_{j}") for j in range(1, a + 1)]
    label = "scroll:" + ",".join(str(a) for a in blocks)
    return _matrix_from_entries(ring, [top, bot], label)


_PAPER_M3X5 = [
    ["x1", "0", "0", "x2", "x4"],
    ["0", "0", "x3", "x2", "x5"],
    ["0", "x2", "x1", "x3", "x3"],
]

_PAPER_M4X5 = [
    ["x1", "0", "0", "0", "x3"],
    ["0", "x2", "0", "0", "x4"],
    ["0", "0", "x2", "x3", "0"],
    ["0", "0", "x1", "x4", "x3"],
]


def paper_matrix(which: str, p: int = 32003) -> LinearMatrix:
    """The two bundled counterexample displays (m3x5 and m4x5)."""
    if which == "m3x5":
        data, nv = _PAPER_M3X5, 5
    elif which == "m4x5":
        data, nv = _PAPER_M4X5, 4
    else:
        raise ValueError(f"unknown bundled matrix {which!r}")
    ring = make_ring([f"x{i}" for i in range(1, nv + 1)], p)
    ent = [
        [ring.zero if s == "0" else parse_poly(s, ring) for s in row] for row in data
    ]
    return _matrix_from_entries(ring, ent, f"paper:{which}")


def custom_matrix(desc: dict | str, p: int = 32003) -> LinearMatrix:
    """JSON form {"rows": [["x1","0",...], ...], "ring": {...}?}; without a
    ring descriptor the variables are collected from the entries."""
    if isinstance(desc, str):
        desc = json.loads(desc)
    rows = desc["rows"]
    if "ring" in desc:
        from .ring import ring_from_descriptor

        ring = ring_from_descriptor(desc["ring"])
    else:
        seen: list[str] = []
        for row in rows:
            for s in row:
                for nm in re.findall(r"[A-Za-z_][A-Za-z0-9_]*", s):
                    if nm not in seen:
                        seen.append(nm)
        ring = make_ring(seen, p)
    ent = [
        [ring.zero if s.strip() == "0" else parse_poly(s, ring) for s in row]
        for row in rows
    ]
    m, n = len(ent), len(ent[0])
    if m > n:
        ent = [list(col) for col in zip(*ent)]
    return _matrix_from_entries(ring, ent, "custom")


def build_family(spec: str, p: int = 32003) -> LinearMatrix:
    """Mini-language: generic:3x5  scroll:2,2,3  symmetric:3  paper:m3x5."""
    kind, _, arg = spec.partition(":")
    if kind == "generic":
        m, n = (int(v) for v in arg.lower().split("x"))
        return generic_matrix(m, n, p)
    if kind == "symmetric":
        return symmetric_matrix(int(arg), p)
    if kind == "scroll":
        return scroll_matrix([int(v) for v in arg.split(",")], p)
    if kind == "paper":
        return paper_matrix(arg, p)
    raise ValueError(f"unknown family spec {spec!r}")


# ---------------------------------------------------------------------------
# minors


def _det(rows_of_polys) -> Poly:
    k = len(rows_of_polys)
    ring = None
    for row in rows_of_polys:
        for f in row:
            ring = f.ring
            break
        if ring:
            break
    if k == 1:
        return rows_of_polys[0][0]

    def rec(rows, cols):
        if len(rows) == 1:
            return rows_of_polys[rows[0]][cols[0]]
        total = None
        sign = 1
        r = rows[0]
        for idx, c in enumerate(cols):
            f = rows_of_polys[r][c]
            if not f.is_zero:
                sub = rec(rows[1:], cols[:idx] + cols[idx + 1 :])
                term = f * sub if sign > 0 else -(f * sub)
                total = term if total is None else total + term
            sign = -sign
        return total if total is not None else ring.zero

    return rec(list(range(k)), list(range(k)))


def minors_ideal(X: LinearMatrix, j: int) -> Ideal:
    """Ideal of j x j minors, interreduced to minimal generators."""
    from itertools import combinations

    m, n = X.nrows, X.ncols
    if not (1 <= j <= m):
        raise ValueError(f"minor size {j} out of range 1..{m}")
    gens = []
    for rset in combinations(range(m), j):
        for cset in combinations(range(n), j):
            d = _det([[X.rows[r][c] for c in cset] for r in rset])
            if not d.is_zero:
                gens.append(d)
    I = Ideal(X.ring, gens)
    mg = minimal_generators(I)
    out = Ideal(X.ring, mg)
    out._mingens = mg
    return out


# ---------------------------------------------------------------------------
# heights and hypothesis checkers


def height_profile(X: LinearMatrix, caps: Caps = DEFAULT_CAPS) -> list[tuple[int, int]]:
    """[(j, height I_j(X)) for j = 1..m]."""
    out = []
    for j in range(1, X.nrows + 1):
        I = minors_ideal(X, j)
        _, h = dim_and_height(I, caps)
        out.append((j, h))
    return out


@dataclass
class HypothesisRow:
    j: int
    required: int
    actual: int
    satisfied: bool


@dataclass
class HypothesisReport:
    which: str
    m: int
    n: int
    N: int
    rows: list[HypothesisRow] = field(default_factory=list)
    p_threshold: int = 0

    @property
    def verdict(self) -> bool:
        return all(r.satisfied for r in self.rows)

    def to_json(self) -> dict:
        return {
            "which": self.which,
            "m": self.m,
            "n": self.n,
            "N": self.N,
            "p_threshold": self.p_threshold,
            "rows": [
                {
                    "j": r.j,
                    "required": r.required,
                    "actual": r.actual,
                    "satisfied": r.satisfied,
                }
                for r in self.rows
            ],
            "verdict": self.verdict,
        }


def check_hypotheses(
    X: LinearMatrix, which: str = "mainThm", caps: Caps = DEFAULT_CAPS
) -> HypothesisReport:
    """Evaluate the height inequalities of the main theorem or of the
    every-j variant on the actual height profile."""
    if which not in ("mainThm", "ABWEH"):
        raise ValueError("which must be 'mainThm' or 'ABWEH'")
    m, n = X.nrows, X.ncols
    heights = dict(height_profile(X, caps))
    N = heights[1]
    rep = HypothesisReport(which, m, n, N)
    if which == "mainThm":
        rep.rows.append(
            HypothesisRow(m, n - m + 1, heights[m], heights[m] >= n - m + 1)
        )
        for j in range(2, m):
            req = min((m + 1 - j) * (n - m) + 1, N)
            rep.rows.append(HypothesisRow(j, req, heights[j], heights[j] >= req))
    else:
        for j in range(1, m + 1):
            req = (m + 1 - j) * (n - m) + 1
            rep.rows.append(HypothesisRow(j, req, heights[j], heights[j] >= req))
    p = 0
    for cand in range(1, m + 1):
        if (m + 1 - cand) * (n - m) + 2 > N + 1:
            p = cand
    rep.p_threshold = p
    return rep


# ---------------------------------------------------------------------------
# random perturbation X + y*A


def perturb_matrix(
    X: LinearMatrix,
    seed: int,
    check: bool = False,
    retries: int = 5,
    caps: Caps = DEFAULT_CAPS,
):
    """X + y*A over the ring extended by a fresh variable y, with A drawn
    uniformly from F_p via the seed.  With check=True the expected height
    law min{(m+1-j)(n+1-j), height I_j(X)+1} is verified for every j,
    redrawing up to `retries` consecutive seeds before failing."""
    m, n = X.nrows, X.ncols
    p = X.ring.characteristic
    yname = fresh_name("y", X.ring.names)
    big = extend_ring(X.ring, (yname,))
    y = big.var(yname)
    base = None
    if check:
        base = dict(height_profile(X, caps))
    last = None
    for attempt in range(max(1, retries)):
        rng = np.random.Generator(np.random.PCG64(seed + attempt))
        A = rng.integers(0, p, size=(m, n))
        rows = tuple(
            tuple(
                transport(X.rows[i][j], big) + y * int(A[i, j])
                for j in range(n)
            )
            for i in range(m)
        )
        Y = LinearMatrix(big, rows, X.family + f"+y*A(seed={seed + attempt})")
        if not check:
            return Y, A
        ok = True
        for j, h in height_profile(Y, caps):
            want = min((m + 1 - j) * (n + 1 - j), base[j] + 1)
            if h != want:
                ok = False
                break
        if ok:
            return Y, A
        last = Y
    raise GenericityError(
        f"genericity failure: no seed in [{seed}, {seed + retries}) achieved "
        f"the expected height profile (last tried {last.family})"
    )
