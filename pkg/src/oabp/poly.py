"""Sparse multivariate polynomials with exact coefficients.

A polynomial is a map from monomials to nonzero field elements.  Monomials
are tuples of (variable, exponent) pairs sorted by variable, exponents >= 1;
the empty tuple is the constant monomial.  Variables come from two
namespaces that never mix in practice:

* program variables: 1-based ints (x_1 is plain 1)
* generator seed variables: strings like "z3", "u1", "v2"

Polynomials are immutable by convention; every operation returns a new one.
"""

from __future__ import annotations

from typing import Any, Iterable, Mapping

from .errors import BudgetError, StructureError
from .fields import Field

VarKey = Any  # int | str
Mono = tuple  # tuple[tuple[VarKey, int], ...]

# Terms a single expansion or composition may hold at once before erroring.
DEFAULT_TERM_BUDGET = 10**6

_KIND_RANK = {"z": 0, "u": 1, "v": 2, "y": 3, "w": 4}


def var_sort_key(v: VarKey) -> tuple:
    """Total order on variables: ints by value, then named seeds by kind/index."""
    if isinstance(v, int):
        return (0, 0, v)
    head = v.rstrip("0123456789")
    tail = v[len(head):]
    return (1, _KIND_RANK.get(head, 9), int(tail) if tail else 0, head)


def mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    merged: dict = {}
    for v, e in m1:
        merged[v] = e
    for v, e in m2:
        merged[v] = merged.get(v, 0) + e
    return tuple(sorted(merged.items(), key=lambda it: var_sort_key(it[0])))


def mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


def mono_sort_key(m: Mono) -> tuple:
    """Graded order: total degree first, then variable-wise lexicographic."""
    return (mono_degree(m), tuple((var_sort_key(v), e) for v, e in m))


class SparsePoly:
    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms: Mapping[Mono, Any] | None = None):
        clean: dict = {}
        zero = field.zero()
        if terms:
            for mono, coeff in terms.items():
                if coeff != zero:
                    clean[mono] = coeff
        self.field = field
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field: Field) -> "SparsePoly":
        return cls(field)

    @classmethod
    def const(cls, field: Field, value) -> "SparsePoly":
        return cls(field, {(): value})

    @classmethod
    def variable(cls, field: Field, v: VarKey) -> "SparsePoly":
        return cls(field, {((v, 1),): field.one()})

    @classmethod
    def from_pairs(cls, field: Field, pairs: Iterable[tuple[Mono, Any]]) -> "SparsePoly":
        acc: dict = {}
        for mono, coeff in pairs:
            if mono in acc:
                acc[mono] = field.add(acc[mono], coeff)
            else:
                acc[mono] = coeff
        return cls(field, acc)

    # -- predicates and measures --------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def variables(self) -> set:
        out: set = set()
        for mono in self.terms:
            for v, _ in mono:
                out.add(v)
        return out

    def degree_in(self, v: VarKey) -> int:
        best = 0
        for mono in self.terms:
            for w, e in mono:
                if w == v and e > best:
                    best = e
        return best

    def individual_degrees(self) -> dict:
        out: dict = {}
        for mono in self.terms:
            for v, e in mono:
                if e > out.get(v, 0):
                    out[v] = e
        return out

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def is_multilinear(self) -> bool:
        return all(e == 1 for mono in self.terms for _, e in mono)

    def constant_term(self):
        return self.terms.get((), self.field.zero())

    # -- arithmetic ----------------------------------------------------------

    def add(self, other: "SparsePoly") -> "SparsePoly":
        self._check_same_field(other)
        f = self.field
        acc = dict(self.terms)
        for mono, coeff in other.terms.items():
            if mono in acc:
                acc[mono] = f.add(acc[mono], coeff)
            else:
                acc[mono] = coeff
        return SparsePoly(f, acc)

    def neg(self) -> "SparsePoly":
        f = self.field
        return SparsePoly(f, {m: f.neg(c) for m, c in self.terms.items()})

    def sub(self, other: "SparsePoly") -> "SparsePoly":
        return self.add(other.neg())

    def scale(self, c) -> "SparsePoly":
        f = self.field
        if c == f.zero():
            return SparsePoly(f)
        return SparsePoly(f, {m: f.mul(co, c) for m, co in self.terms.items()})

    def mul(self, other: "SparsePoly", budget: int | None = None) -> "SparsePoly":
        self._check_same_field(other)
        f = self.field
        if budget is not None and self.num_terms * other.num_terms > budget:
            raise BudgetError(
                f"product of {self.num_terms} x {other.num_terms} terms "
                f"exceeds term budget {budget}"
            )
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                c = f.mul(c1, c2)
                if m in acc:
                    acc[m] = f.add(acc[m], c)
                else:
                    acc[m] = c
        return SparsePoly(f, acc)

    def pow_int(self, e: int, budget: int | None = None) -> "SparsePoly":
        if e < 0:
            raise StructureError("negative polynomial power")
        acc = SparsePoly.const(self.field, self.field.one())
        for _ in range(e):
            acc = acc.mul(self, budget=budget)
        return acc

    __add__ = add
    __sub__ = sub
    __neg__ = neg

    def __mul__(self, other):
        if isinstance(other, SparsePoly):
            return self.mul(other)
        return self.scale(other)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparsePoly)
            and self.field == other.field
            and self.terms == other.terms
        )

    __hash__ = None  # type: ignore[assignment]

    # -- evaluation and substitution ------------------------------------------

    def evaluate(self, assignment: Mapping[VarKey, Any]):
        """Value at a full assignment; every mentioned variable needs a value."""
        f = self.field
        total = f.zero()
        for mono, coeff in self.terms.items():
            val = coeff
            for v, e in mono:
                if v not in assignment:
                    raise StructureError(f"no value for variable {v!r}")
                val = f.mul(val, f.pow(assignment[v], e))
            total = f.add(total, val)
        return total

    def substitute(self, assignment: Mapping[VarKey, Any]) -> "SparsePoly":
        """Plug field constants into some variables, keep the rest symbolic."""
        f = self.field
        acc: dict = {}
        for mono, coeff in self.terms.items():
            val = coeff
            rest = []
            for v, e in mono:
                if v in assignment:
                    val = f.mul(val, f.pow(assignment[v], e))
                else:
                    rest.append((v, e))
            m = tuple(rest)
            if m in acc:
                acc[m] = f.add(acc[m], val)
            else:
                acc[m] = val
        return SparsePoly(f, acc)

    def derivative(self, v: VarKey) -> "SparsePoly":
        f = self.field
        acc: dict = {}
        for mono, coeff in self.terms.items():
            for idx, (w, e) in enumerate(mono):
                if w == v:
                    c = f.mul(coeff, f.from_int(e))
                    if e == 1:
                        m = mono[:idx] + mono[idx + 1:]
                    else:
                        m = mono[:idx] + ((w, e - 1),) + mono[idx + 1:]
                    if m in acc:
                        acc[m] = f.add(acc[m], c)
                    else:
                        acc[m] = c
                    break
        return SparsePoly(f, acc)

    def compose(
        self,
        images: Mapping[VarKey, "SparsePoly"],
        budget: int | None = DEFAULT_TERM_BUDGET,
    ) -> "SparsePoly":
        """Substitute a polynomial for every variable and expand.

        Every variable of self must have an image.  Partial products are
        cached on monomial prefixes, so terms sharing factors (always the
        case for multilinear inputs) reuse work.
        """
        f = self.field
        for v in self.variables():
            if v not in images:
                raise StructureError(f"no image for variable {v!r}")
        power_cache: dict = {}
        prefix_cache: dict = {(): SparsePoly.const(f, f.one())}

        def img_power(v: VarKey, e: int) -> SparsePoly:
            key = (v, e)
            got = power_cache.get(key)
            if got is None:
                got = images[v].pow_int(e, budget=budget)
                power_cache[key] = got
            return got

        def prefix_product(mono: Mono) -> SparsePoly:
            got = prefix_cache.get(mono)
            if got is None:
                head = prefix_product(mono[:-1])
                v, e = mono[-1]
                got = head.mul(img_power(v, e), budget=budget)
                prefix_cache[mono] = got
            return got

        total = SparsePoly.zero(f)
        for mono, coeff in sorted(self.terms.items(), key=lambda it: mono_sort_key(it[0])):
            total = total.add(prefix_product(mono).scale(coeff))
            if budget is not None and total.num_terms > budget:
                raise BudgetError(
                    f"composition exceeds term budget {budget}"
                )
        return total

    # -- presentation ----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Mono, Any]]:
        return sorted(self.terms.items(), key=lambda it: mono_sort_key(it[0]))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for mono, coeff in self.sorted_terms():
            factors = []
            cs = self.field.element_to_text(coeff)
            if not mono:
                parts.append(cs)
                continue
            if cs != "1":
                factors.append(cs)
            for v, e in mono:
                name = f"x{v}" if isinstance(v, int) else str(v)
                factors.append(name if e == 1 else f"{name}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"SparsePoly({self})"

    def _check_same_field(self, other: "SparsePoly") -> None:
        if self.field != other.field:
            raise StructureError("mixed fields in polynomial arithmetic")
