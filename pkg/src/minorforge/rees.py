"""Rees presentation P(I), symmetric-algebra ideal Q(I), fiber ideal T(I),
fiber/linear-type classification and the (1,0)-regularity of the Rees ring.

The ambient bigraded ring is A = S[y_1..y_m] with deg x = (1,0) and
deg y = (0,1), the y_i matched to the minimal generators of I in
canonical order (largest leading monomial first within the degree).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import Caps, DEFAULT_CAPS
from .groebner import (
    Ideal,
    _engine_eliminate,
    eliminate,
    extend_ring,
    fresh_name,
    ideal_contains,
    ideal_equal,
    is_quadratic_gb,
    minimal_generators,
    transport,
)
from .resolve import reg_10, syzygies
from .ring import (
    MonomialOrder,
    Poly,
    Ring,
    graded_components,
    make_ring,
    multidegree,
)

DEFAULT_REG10_BUDGET = 12


def _bigraded_ring(S: Ring, m: int) -> tuple[Ring, list[str]]:
    ynames = []
    taken = set(S.names)
    for i in range(1, m + 1):
        nm = fresh_name(f"y{i}", taken)
        ynames.append(nm)
        taken.add(nm)
    names = S.names + tuple(ynames)
    grading = tuple((sum(d), 0) for d in S.grading) + tuple((0, 1) for _ in ynames)
    return make_ring(names, S.characteristic, grading, S.order), ynames


def rees_data(I: Ideal, caps: Caps = DEFAULT_CAPS):
    """(A, ynames, minimal generators) shared by the presentation ops."""
    if I.ring.grading_arity != 1:
        raise ValueError("Rees presentation expects a Z-graded base ring")
    fs = minimal_generators(I)
    if not fs:
        raise ValueError("Rees presentation of the zero ideal")
    degs = {f.total_degree() for f in fs}
    if len(degs) != 1:
        raise ValueError("ideal is not equigenerated; Rees toolkit requires one degree")
    A, ynames = _bigraded_ring(I.ring, len(fs))
    return A, ynames, fs


def rees_ideal(I: Ideal, caps: Caps = DEFAULT_CAPS) -> tuple[Ideal, Ring]:
    """Presentation ideal P(I) in A, via elimination of the tag variable
    from (y_i - t*f_i)."""
    A, ynames, fs = rees_data(I, caps)
    tname = fresh_name("_t", A.names)
    big = extend_ring(A, (tname,), front=True)
    t = big.var(tname)
    raw = [
        transport(A.var(ynames[i]), big) - t * transport(fs[i], big)
        for i in range(len(fs))
    ]
    elim = _engine_eliminate(big, raw, {tname}, caps)
    gens = []
    for h in elim:
        back = _shrink(h, A, tname)
        gens.extend(graded_components(back))
    P = Ideal(A, gens)
    return P, A


def _shrink(f: Poly, target: Ring, dropped: str) -> Poly:
    src = f.ring
    col = src.var_index[dropped] + 1
    assert not f.E[:, col].any()
    E = np.zeros((len(f.C), target.nvars + 1), np.int64)
    for i, nm in enumerate(src.names):
        if nm == dropped:
            continue
        E[:, 1 + target.var_index[nm]] = f.E[:, 1 + i]
    from .groebner import from_arrays

    return from_arrays(target, E, f.C.copy())


def symmetric_ideal(I: Ideal, A: Ring | None = None,
                    caps: Caps = DEFAULT_CAPS) -> tuple[Ideal, Ring]:
    """Symmetric-algebra ideal Q(I): linear y-forms from the first
    syzygies of the minimal generators."""
    if A is None:
        A, ynames, fs = rees_data(I, caps)
    else:
        fs = minimal_generators(I)
        ynames = [nm for nm in A.names if nm not in I.ring.var_index]
    syz = syzygies(list(fs), caps)
    gens = []
    for col in syz.columns:
        g = A.zero
        for r, coeff_poly in col.items():
            g = g + transport(coeff_poly, A) * A.var(ynames[r])
        if not g.is_zero:
            gens.append(g)
    return Ideal(A, gens), A


def fiber_ideal(P: Ideal, S: Ring, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """T(I) = P ∩ K[y..]: eliminate the base variables from P."""
    xvars = [nm for nm in P.ring.names if nm in S.var_index]
    return eliminate(P, xvars, caps)


@dataclass
class ReesPresentation:
    ring: Ring
    P: Ideal
    Q: Ideal
    T: Ideal
    mu: int
    bidegrees: list[tuple[int, int]]
    linear_type: bool
    fiber_type: bool
    quadratic_gb: dict[str, bool]
    reg10: int | str | None = None

    def to_json(self) -> dict:
        return {
            "mu": self.mu,
            "P_gens": [str(g) for g in minimal_generators(self.P)],
            "bidegrees": [list(d) for d in self.bidegrees],
            "linear_type": self.linear_type,
            "fiber_type": self.fiber_type,
            "quadratic_gb": dict(self.quadratic_gb),
            "reg10": self.reg10,
        }


def standard_orders(A: Ring, S: Ring) -> dict[str, MonomialOrder]:
    """degrevlex with x-first and with y-first precedence."""
    xnames = [nm for nm in A.names if nm in S.var_index]
    ynames = [nm for nm in A.names if nm not in S.var_index]
    return {
        "degrevlex_xy": MonomialOrder("degrevlex"),
        "degrevlex_yx": MonomialOrder(
            "degrevlex", precedence=tuple(ynames + xnames)
        ),
    }


def classify(
    I: Ideal,
    caps: Caps = DEFAULT_CAPS,
    extra_orders: dict[str, MonomialOrder] | None = None,
    reg10_budget: int = DEFAULT_REG10_BUDGET,
    with_reg10: bool = True,
) -> ReesPresentation:
    """Full Rees classification: P, Q, T, type flags, quadratic-GB probes
    and (budget permitting) the (1,0)-regularity."""
    P, A = rees_ideal(I, caps)
    Q, _ = symmetric_ideal(I, A, caps)
    T = fiber_ideal(P, I.ring, caps)
    if not ideal_contains(P, Q, caps):
        raise AssertionError("Q(I) not contained in P(I)")
    if not ideal_contains(P, T, caps):
        raise AssertionError("T(I) not contained in P(I)")
    mg = minimal_generators(P)
    bidegs = sorted(multidegree(g) for g in mg)
    fiber_by_bidegree = not any(a > 0 and b > 1 for (a, b) in bidegs)
    linear_type = ideal_equal(P, Q, caps)
    QT = Ideal(A, tuple(Q.gens) + tuple(T.gens))
    fiber_by_equality = ideal_equal(P, QT, caps)
    if fiber_by_bidegree != fiber_by_equality:
        raise AssertionError(
            "fiber-type criteria disagree: "
            f"bidegree says {fiber_by_bidegree}, ideal equality says {fiber_by_equality}"
        )
    orders = standard_orders(A, I.ring)
    if extra_orders:
        orders.update(extra_orders)
    flags = is_quadratic_gb(P, list(orders.values()), caps)
    quad = dict(zip(orders.keys(), flags))
    reg10: int | str | None = None
    if with_reg10:
        if A.nvars <= reg10_budget:
            reg10 = reg_10(P, of_quotient=True, caps=caps)
        else:
            reg10 = "skipped: budget"
    return ReesPresentation(
        A, P, Q, T, len(minimal_generators(I)), list(bidegs),
        linear_type, fiber_by_equality, quad, reg10,
    )


def rees_reg10(I: Ideal, caps: Caps = DEFAULT_CAPS,
               budget: int = DEFAULT_REG10_BUDGET) -> int | str:
    """(1,0)-regularity of the Rees ring A/P(I), or 'skipped: budget'."""
    P, A = rees_ideal(I, caps)
    if A.nvars > budget:
        return "skipped: budget"
    return reg_10(P, of_quotient=True, caps=caps)
