"""Polynomial rings over prime fields with Z- or Z^2-gradings.

Values are immutable after construction and safe to share across threads.
Polynomials keep their terms as int64 arrays (see ``minorforge.kernels``)
sorted strictly descending under the ring's active monomial order.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import ParseError, RingMismatchError

EXP_LIMIT = 1 << 16


def is_prime(p: int) -> bool:
    """Deterministic primality test, valid for p < 3.2e9."""
    if p < 2:
        return False
    for q in (2, 3, 5, 7):
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7):
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# monomial orders


@dataclass(frozen=True)
class MonomialOrder:
    """Descriptor of a total order on monomials.

    kind:
      * ``degrevlex``  degree then reverse lexicographic
      * ``lex``        lexicographic
      * ``block``      eliminate the variables in ``block`` first;
                       degrevlex inside each block
      * ``weight``     compare by ``weights`` first, ties by degrevlex

    ``precedence`` optionally lists all variable names from largest to
    smallest, overriding the ring's declared order.
    """

    kind: str = "degrevlex"
    block: tuple[str, ...] = ()
    weights: tuple[int, ...] = ()
    precedence: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "block", "weight"):
            raise ValueError(f"unknown monomial order kind {self.kind!r}")


DEGREVLEX = MonomialOrder("degrevlex")
LEX = MonomialOrder("lex")


def elimination_order(block_vars) -> MonomialOrder:
    return MonomialOrder("block", block=tuple(block_vars))


def weight_order(weights) -> MonomialOrder:
    return MonomialOrder("weight", weights=tuple(int(w) for w in weights))


def _degrevlex_rows(positions: list[int], n: int) -> list[np.ndarray]:
    rows = []
    total = np.zeros(n, dtype=np.int64)
    total[positions] = 1
    rows.append(total)
    for pos in positions[:0:-1]:
        r = np.zeros(n, dtype=np.int64)
        r[pos] = -1
        rows.append(r)
    return rows


def order_matrix(order: MonomialOrder, names: tuple[str, ...]) -> np.ndarray:
    """Integer matrix W such that mono comparison is lexicographic on W @ e."""
    n = len(names)
    index = {nm: i for i, nm in enumerate(names)}
    if order.precedence:
        if sorted(order.precedence) != sorted(names):
            raise ValueError("precedence must list every ring variable exactly once")
        seq = [index[nm] for nm in order.precedence]
    else:
        seq = list(range(n))

    if order.kind == "lex":
        rows = []
        for pos in seq:
            r = np.zeros(n, dtype=np.int64)
            r[pos] = 1
            rows.append(r)
    elif order.kind == "degrevlex":
        rows = _degrevlex_rows(seq, n)
    elif order.kind == "block":
        blk = set(order.block)
        unknown = blk - set(names)
        if unknown:
            raise ValueError(f"block variables not in ring: {sorted(unknown)}")
        first = [pos for pos in seq if names[pos] in blk]
        second = [pos for pos in seq if names[pos] not in blk]
        rows = []
        if first:
            rows += _degrevlex_rows(first, n)
        if second:
            rows += _degrevlex_rows(second, n)
    elif order.kind == "weight":
        if len(order.weights) != n:
            raise ValueError("weight vector length must match variable count")
        rows = [np.array(order.weights, dtype=np.int64)]
        rows += _degrevlex_rows(seq, n)
    else:  # pragma: no cover
        raise AssertionError
    return np.array(rows, dtype=np.int64)


class KeyContext:
    """Maps term arrays to comparison-key arrays for one monomial order.

    For module elements a Schreyer-style shift per component may be
    installed: the key of (comp, e) is W @ (e + lmshift[comp]) followed by
    inherited tie-break columns and finally -comp.
    """

    __slots__ = ("W", "lmshift", "ties", "width")

    def __init__(self, W: np.ndarray, lmshift=None, ties=None):
        self.W = W
        self.lmshift = lmshift
        self.ties = ties
        extra = 0 if ties is None else ties.shape[1]
        self.width = W.shape[0] + extra + 1

    def keys(self, E: np.ndarray) -> np.ndarray:
        t = E.shape[0]
        K = np.empty((t, self.width), dtype=np.int64)
        exps = E[:, 1:]
        if self.lmshift is not None:
            exps = exps + self.lmshift[E[:, 0]]
        np.matmul(exps, self.W.T, out=K[:, : self.W.shape[0]])
        if self.ties is not None:
            K[:, self.W.shape[0] : -1] = self.ties[E[:, 0]]
        K[:, -1] = -E[:, 0]
        return K

    def key_delta(self, shift: np.ndarray) -> np.ndarray:
        """Key increment of multiplication by the monomial x^shift
        (shift given with the component column, which must be 0)."""
        d = np.zeros(self.width, dtype=np.int64)
        d[: self.W.shape[0]] = self.W @ shift[1:]
        return d


# ---------------------------------------------------------------------------
# rings


@dataclass(frozen=True)
class Ring:
    """A polynomial ring F_p[x_1..x_n] with a Z^g grading and active order."""

    characteristic: int
    names: tuple[str, ...]
    grading: tuple[tuple[int, ...], ...]
    order: MonomialOrder = DEGREVLEX

    def __post_init__(self):
        p = self.characteristic
        if not (2 < p < 2**31) or not is_prime(p):
            raise ValueError(f"characteristic must be an odd prime < 2^31, got {p}")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        for nm in self.names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", nm):
                raise ValueError(f"bad variable name {nm!r}")
        if len(self.grading) != len(self.names):
            raise ValueError("grading must assign a degree to every variable")
        arities = {len(d) for d in self.grading}
        if arities - {1, 2} or len(arities) != 1:
            raise ValueError("grading arity must be 1 or 2, uniform across variables")
        for d in self.grading:
            if any(c < 0 for c in d) or all(c == 0 for c in d):
                raise ValueError("variable degrees must be nonzero, components >= 0")
        order_matrix(self.order, self.names)  # validates

    # -- structural helpers ------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def grading_arity(self) -> int:
        return len(self.grading[0])

    @property
    def var_index(self) -> dict[str, int]:
        return _var_index(self)

    @property
    def degs(self) -> np.ndarray:
        return _degs(self)

    def keyctx(self, order: MonomialOrder | None = None) -> KeyContext:
        return _keyctx(self, order or self.order)

    # -- element constructors ----------------------------------------------

    def _make(self, E, C, K) -> "Poly":
        return Poly(self, E, C, K)

    def from_terms(self, terms) -> "Poly":
        """Build a polynomial from (coefficient, exponent-sequence) pairs."""
        p = self.characteristic
        n = self.nvars
        rows, coefs = [], []
        for c, exps in terms:
            c %= p
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError("exponent vector length mismatch")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            if any(e >= EXP_LIMIT for e in exps):
                raise OverflowError("exponent exceeds 2^16")
            rows.append((0,) + exps)
            coefs.append(c)
        E = np.array(rows, dtype=np.int64).reshape(len(rows), n + 1)
        C = np.array(coefs, dtype=np.int64)
        K = self.keyctx().keys(E)
        E, C, K = kernels.sort_terms(E, C, K, p)
        return self._make(E, C, K)

    @property
    def zero(self) -> "Poly":
        return self.from_terms([])

    @property
    def one(self) -> "Poly":
        return self.from_terms([(1, (0,) * self.nvars)])

    def var(self, name: str) -> "Poly":
        i = self.var_index[name]
        exps = [0] * self.nvars
        exps[i] = 1
        return self.from_terms([(1, exps)])

    def gens(self) -> list["Poly"]:
        return [self.var(nm) for nm in self.names]

    def constant(self, c: int) -> "Poly":
        return self.from_terms([(c, (0,) * self.nvars)])

    def monomials_of_degree(self, total: int) -> list[tuple[int, ...]]:
        """All exponent vectors of the given total degree (sum of the
        multidegree components), using each variable's declared degree."""
        w = [sum(d) for d in self.grading]
        out = []

        def rec(i, rem, acc):
            if i == self.nvars:
                if rem == 0:
                    out.append(tuple(acc))
                return
            if rem == 0:
                out.append(tuple(acc + [0] * (self.nvars - i)))
                return
            for e in range(rem // w[i] + 1):
                rec(i + 1, rem - e * w[i], acc + [e])

        rec(0, total, [])
        return out

    def to_descriptor(self) -> dict:
        return {
            "char": self.characteristic,
            "vars": list(self.names),
            "grading": [list(d) for d in self.grading],
        }

    def __repr__(self):
        return (
            f"Ring(F_{self.characteristic}[{', '.join(self.names)}],"
            f" g={self.grading_arity}, {self.order.kind})"
        )


@lru_cache(maxsize=None)
def _var_index(ring: Ring) -> dict[str, int]:
    return {nm: i for i, nm in enumerate(ring.names)}


@lru_cache(maxsize=None)
def _degs(ring: Ring) -> np.ndarray:
    return np.array(ring.grading, dtype=np.int64)


@lru_cache(maxsize=None)
def _keyctx(ring: Ring, order: MonomialOrder) -> KeyContext:
    return KeyContext(order_matrix(order, ring.names))


def make_ring(names, p=32003, grading=None, order: MonomialOrder = DEGREVLEX) -> Ring:
    """Create a ring; default grading is standard (every variable degree 1)."""
    names = tuple(names)
    if grading is None:
        grading = tuple((1,) for _ in names)
    else:
        grading = tuple(tuple(int(c) for c in d) for d in grading)
    return Ring(int(p), names, grading, order)


def ring_from_descriptor(desc: dict | str) -> Ring:
    if isinstance(desc, str):
        desc = json.loads(desc)
    return make_ring(desc["vars"], desc["char"], desc.get("grading"))


def standard_graded(ring: Ring) -> Ring:
    """The same ring with every variable in degree 1 (used by tests on
    total-degree quantities)."""
    return make_ring(ring.names, ring.characteristic, None, ring.order)


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Immutable sparse polynomial in canonical form."""

    __slots__ = ("ring", "E", "C", "K", "_hash")

    def __init__(self, ring: Ring, E, C, K):
        self.ring = ring
        self.E = E
        self.C = C
        self.K = K
        self._hash = None
        E.flags.writeable = False
        C.flags.writeable = False
        K.flags.writeable = False

    # -- basic structure -----------------------------------------------------

    def __len__(self):
        return len(self.C)

    @property
    def is_zero(self) -> bool:
        return len(self.C) == 0

    def lead_exps(self) -> np.ndarray:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        return self.E[0, 1:]

    def lead_coeff(self) -> int:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        return int(self.C[0])

    def lead_monomial(self) -> "Poly":
        return self.ring.from_terms([(1, self.lead_exps())])

    def total_degree(self) -> int:
        """Max over terms of exponent sum (-1 for the zero polynomial)."""
        if self.is_zero:
            return -1
        return int(self.E[:, 1:].sum(axis=1).max())

    def terms(self):
        """Iterate (coefficient, exponent tuple) pairs, leading term first."""
        for i in range(len(self.C)):
            yield int(self.C[i]), tuple(int(e) for e in self.E[i, 1:])

    def monic(self) -> "Poly":
        if self.is_zero or self.C[0] == 1:
            return self
        return self * kernels.modinv(self.lead_coeff(), self.ring.characteristic)

    def is_monomial(self) -> bool:
        return len(self.C) == 1 and self.C[0] == 1

    def is_term(self) -> bool:
        return len(self.C) == 1

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: "Poly"):
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        self._check(other)
        E, C, K = kernels.merge_scaled(
            self.E, self.C, self.K, other.E, other.C, other.K, 1,
            self.ring.characteristic,
        )
        return Poly(self.ring, E, C, K)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        self._check(other)
        E, C, K = kernels.merge_scaled(
            self.E, self.C, self.K, other.E, other.C, other.K,
            self.ring.characteristic - 1, self.ring.characteristic,
        )
        return Poly(self.ring, E, C, K)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self * (self.ring.characteristic - 1)

    def __mul__(self, other):
        p = self.ring.characteristic
        if isinstance(other, (int, np.integer)):
            c = int(other) % p
            if c == 0 or self.is_zero:
                return self.ring.zero
            C = (self.C * c) % p
            return Poly(self.ring, self.E, C, self.K)
        self._check(other)
        if self.is_zero or other.is_zero:
            return self.ring.zero
        if len(other.C) == 1 and other.E[0, 0] == 0:
            return self._mul_term(other.E[0], int(other.C[0]))
        if len(self.C) == 1:
            return other._mul_term(self.E[0], int(self.C[0]))
        ta, tb = len(self.C), len(other.C)
        E = (self.E[:, None, :] + other.E[None, :, :]).reshape(ta * tb, -1)
        if E[:, 1:].max(initial=0) >= EXP_LIMIT:
            raise OverflowError("exponent exceeds 2^16")
        C = (self.C[:, None] * other.C[None, :]).reshape(-1) % p
        K = (self.K[:, None, :] + other.K[None, :, :]).reshape(ta * tb, -1)
        E, C, K = kernels.sort_terms(E, C, K, p)
        return Poly(self.ring, E, C, K)

    __rmul__ = __mul__

    def _mul_term(self, term_E: np.ndarray, coeff: int) -> "Poly":
        p = self.ring.characteristic
        E = self.E + term_E
        if E[:, 1:].max(initial=0) >= EXP_LIMIT:
            raise OverflowError("exponent exceeds 2^16")
        C = (self.C * coeff) % p
        K = self.K + self.ring.keyctx().key_delta(term_E)
        keep = np.flatnonzero(C)
        if len(keep) != len(C):
            E, C, K = E[keep], C[keep], K[keep]
        return Poly(self.ring, E, C, K)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- comparisons ------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, int):
                return self == self.ring.constant(other)
            return NotImplemented
        return (
            self.ring == other.ring
            and self.E.shape == other.E.shape
            and bool(np.array_equal(self.E, other.E))
            and bool(np.array_equal(self.C, other.C))
        )

    def __hash__(self):
        if self._hash is None:
            h = hash((self.ring, self.E.tobytes(), self.C.tobytes()))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __repr__(self):
        return format_poly(self)

    def __str__(self):
        return format_poly(self)


# ---------------------------------------------------------------------------
# grading


def multidegree(f: Poly):
    """Common multidegree of all terms, or None when inhomogeneous.

    Raises ValueError on the zero polynomial.
    """
    if f.is_zero:
        raise ValueError("multidegree of the zero polynomial is undefined")
    degs = f.E[:, 1:] @ f.ring.degs
    if np.any(degs != degs[0]):
        return None
    return tuple(int(c) for c in degs[0])


def is_homogeneous(f: Poly) -> bool:
    return f.is_zero or multidegree(f) is not None


def graded_components(f: Poly) -> list[Poly]:
    """Split into Z^g-homogeneous components, highest degree first."""
    if f.is_zero:
        return []
    degs = f.E[:, 1:] @ f.ring.degs
    seen = {}
    for i in range(len(f.C)):
        seen.setdefault(tuple(int(c) for c in degs[i]), []).append(i)
    out = []
    for d in sorted(seen, reverse=True):
        idx = np.array(seen[d], dtype=np.intp)
        out.append(Poly(f.ring, f.E[idx], f.C[idx], f.K[idx]))
    return out


# ---------------------------------------------------------------------------
# parsing and printing


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\^)|(\*)|(\+)|(-)|(.))")


def parse_poly(text: str, ring: Ring) -> Poly:
    """Parse the grammar: terms joined by + or -, each term an optional
    integer coefficient and '*'-joined variable powers ``v^e``."""
    tokens = []
    for m in _TOKEN.finditer(text):
        if m.group(7):
            raise ParseError(f"unexpected character {m.group(7)!r} in {text!r}")
        for gi, kind in ((1, "int"), (2, "name"), (3, "pow"), (4, "mul"),
                         (5, "plus"), (6, "minus")):
            if m.group(gi):
                tokens.append((kind, m.group(gi)))
                break
    pos = 0

    def peek():
        return tokens[pos][0] if pos < len(tokens) else None

    def take(kind):
        nonlocal pos
        if peek() != kind:
            raise ParseError(f"expected {kind} at token {pos} in {text!r}")
        tok = tokens[pos]
        pos += 1
        return tok[1]

    n = ring.nvars
    vidx = ring.var_index
    terms = []

    def parse_term(sign):
        coeff = sign
        exps = [0] * n
        saw_factor = False
        if peek() == "int":
            coeff = sign * int(take("int"))
            saw_factor = True
            if peek() == "mul":
                take("mul")
                if peek() != "name":
                    raise ParseError(f"dangling '*' in {text!r}")
        while peek() == "name":
            nm = take("name")
            if nm not in vidx:
                raise ParseError(f"unknown variable {nm!r} in {text!r}")
            e = 1
            if peek() == "pow":
                take("pow")
                e = int(take("int"))
            if e >= EXP_LIMIT:
                raise OverflowError("exponent exceeds 2^16")
            exps[vidx[nm]] += e
            saw_factor = True
            if peek() == "mul":
                take("mul")
                if peek() != "name":
                    raise ParseError(f"dangling '*' in {text!r}")
        if not saw_factor:
            raise ParseError(f"empty term in {text!r}")
        terms.append((coeff, exps))

    if not tokens:
        raise ParseError("empty polynomial text")
    sign = 1
    if peek() == "minus":
        take("minus")
        sign = -1
    elif peek() == "plus":
        take("plus")
    parse_term(sign)
    while pos < len(tokens):
        if peek() == "plus":
            take("plus")
            parse_term(1)
        elif peek() == "minus":
            take("minus")
            parse_term(-1)
        else:
            raise ParseError(f"expected '+' or '-' at token {pos} in {text!r}")
    return ring.from_terms(terms)


def format_poly(f: Poly) -> str:
    """Canonical text form; round-trips through parse_poly."""
    if f.is_zero:
        return "0"
    p = f.ring.characteristic
    names = f.ring.names
    pieces = []
    for i, (c, exps) in enumerate(f.terms()):
        if c > p // 2:
            c -= p
        neg = c < 0
        c = abs(c)
        factors = [
            nm if e == 1 else f"{nm}^{e}"
            for nm, e in zip(names, exps)
            if e
        ]
        if not factors:
            body = str(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(c)] + factors)
        if i == 0:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append((" - " if neg else " + ") + body)
    return "".join(pieces)


# ---------------------------------------------------------------------------
# substitution and random forms


def substitute(f: Poly, assignments: dict[str, Poly], target: Ring | None = None,
               strict: bool = False) -> Poly:
    """Apply the ring map sending each assigned variable to its image.

    Unassigned variables map to the same-named variable of the target
    ring; with strict=True every variable that occurs must be assigned.
    """
    if target is None:
        target = next(iter(assignments.values())).ring if assignments else f.ring
    for nm, g in assignments.items():
        if g.ring != target:
            raise RingMismatchError(f"image of {nm!r} lives in a different ring")
    images = []
    for i, nm in enumerate(f.ring.names):
        occurs = bool(f.E[:, 1 + i].any())
        if nm in assignments:
            images.append(assignments[nm])
        elif occurs and strict:
            raise ValueError(f"strict substitution: no assignment for {nm!r}")
        elif nm in target.var_index:
            images.append(target.var(nm))
        elif occurs:
            raise ValueError(f"variable {nm!r} has no image in the target ring")
        else:
            images.append(None)
    out = target.zero
    for c, exps in f.terms():
        term = target.constant(c)
        for i, e in enumerate(exps):
            if e:
                term = term * images[i] ** e
        out = out + term
    return out


def random_linear_form(ring: Ring, seed: int) -> Poly:
    """Seeded uniform degree-1 form: coefficients i.i.d. uniform on F_p."""
    rng = np.random.Generator(np.random.PCG64(seed))
    coeffs = rng.integers(0, ring.characteristic, size=ring.nvars)
    n = ring.nvars
    terms = []
    for i, c in enumerate(coeffs):
        exps = [0] * n
        exps[i] = 1
        terms.append((int(c), exps))
    return ring.from_terms(terms)
