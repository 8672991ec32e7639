"""Obliviation, derivatives, cut decomposition, independence reduction."""

from fractions import Fraction

import pytest

from oabp.abp import (
    Abp,
    ConstLabel,
    Permutation,
    VarLabel,
    check_oblivious,
    check_order,
    expand,
    make_abp,
    stats,
)
from oabp.corpus import standard_corpus
from oabp.errors import StructureError
from oabp.fields import rationals
from oabp.linalg import matrix_rank
from oabp.poly import SparsePoly
from oabp.transforms import (
    cut_decompose,
    derivative_abp,
    obliviate,
    reduce_independent,
)

Q = rationals()


def pair_sum(dec):
    total = SparsePoly.zero(dec.left[0].field)
    for l, r in zip(dec.left, dec.right):
        total = total.add(l.mul(r))
    return total


def coefficient_rank(polys):
    """Rank of the coefficient matrix of a list of polynomials."""
    field = polys[0].field
    monos = sorted({m for p in polys for m in p.terms}, key=str)
    rows = [[p.terms.get(m, field.zero()) for m in monos] for p in polys]
    return matrix_rank(field, rows)


# -- obliviate ----------------------------------------------------------------


def test_obliviate_contract_on_corpus_sample():
    for member in standard_corpus()[:60]:
        a = member.abp
        b = obliviate(a)
        assert expand(b) == expand(a), member.name
        assert check_oblivious(b).ok, member.name
        assert check_order(b, a.order), member.name
        assert stats(b).reads == stats(a).reads, member.name
        assert stats(b).width <= 2 * stats(a).size, member.name


def test_obliviate_keeps_reads_through_cancelling_constants():
    # two s->m paths with weights 1 and -1: the collapsed constant edge into
    # the carry of m is zero, but both x1 edges must survive
    a = make_abp(
        Q,
        2,
        [["s"], ["p", "q"], ["m"], ["t"]],
        [
            ("s", "p", ConstLabel(Fraction(1))),
            ("s", "q", ConstLabel(Fraction(-1))),
            ("p", "m", VarLabel(1)),
            ("q", "m", VarLabel(1)),
            ("m", "t", VarLabel(2)),
        ],
    )
    assert expand(a).is_zero
    b = obliviate(a)
    assert expand(b).is_zero
    assert stats(b).reads == {1: 2, 2: 1}


def test_obliviate_respects_explicit_order():
    # reads x2 then x1; only the order 2,1 works
    a = make_abp(
        Q,
        2,
        [["s"], ["m"], ["t"]],
        [("s", "m", VarLabel(2)), ("m", "t", VarLabel(1))],
    )
    pi = Permutation.from_sequence([2, 1])
    b = obliviate(a, pi)
    assert expand(b) == expand(a)
    assert check_order(b, pi)
    with pytest.raises(StructureError):
        obliviate(a, Permutation.identity(2))


def test_obliviate_unorderable_program_raises():
    a = make_abp(
        Q,
        2,
        [["s"], ["a", "b"], ["t"]],
        [
            ("s", "a", VarLabel(1)),
            ("a", "t", VarLabel(2)),
            ("s", "b", VarLabel(2)),
            ("b", "t", VarLabel(1)),
        ],
    )
    with pytest.raises(StructureError):
        obliviate(a)


def test_obliviate_single_variable():
    a = make_abp(Q, 1, [["s"], ["t"]], [("s", "t", VarLabel(1))])
    b = obliviate(a)
    assert expand(b) == SparsePoly.variable(Q, 1)
    assert check_oblivious(b).ok


# -- derivative ---------------------------------------------------------------


def test_derivative_matches_polynomial_derivative():
    for member in standard_corpus()[:25]:
        if member.zero:
            continue
        b = obliviate(member.abp)
        p = expand(b)
        for i in sorted(p.variables()):
            assert expand(derivative_abp(b, i)) == p.derivative(i), (member.name, i)


def test_derivative_of_unread_variable_is_zero_program():
    a = make_abp(
        Q, 3, [["s"], ["m"], ["t"]], [("s", "m", VarLabel(1)), ("m", "t", VarLabel(3))]
    )
    d = derivative_abp(obliviate(a), 2)
    assert expand(d).is_zero


def test_derivative_needs_single_layer_reads():
    a = make_abp(
        Q, 1, [["s"], ["m"], ["t"]], [("s", "m", VarLabel(1)), ("m", "t", VarLabel(1))]
    )
    with pytest.raises(StructureError):
        derivative_abp(a, 1)


# -- cut decomposition --------------------------------------------------------


def test_cut_sum_identity_everywhere():
    for member in standard_corpus()[:30]:
        a = member.abp
        p = expand(a)
        for lvl in range(1, len(a.levels) - 1):
            try:
                dec = cut_decompose(a, lvl)
            except StructureError:
                continue
            assert pair_sum(dec) == p, (member.name, lvl)
            assert dec.width == len(dec.left) == len(dec.right)
            assert dec.cut_level == lvl


def test_cut_rejects_straddling_variable():
    # x1 read on both sides of every interior cut
    a = make_abp(
        Q,
        1,
        [["s"], ["m"], ["n"], ["t"]],
        [
            ("s", "m", VarLabel(1)),
            ("m", "n", ConstLabel(Fraction(2))),
            ("n", "t", VarLabel(1)),
        ],
    )
    for lvl in (1, 2):
        with pytest.raises(StructureError):
            cut_decompose(a, lvl)


def test_cut_rejects_boundary_levels():
    a = make_abp(Q, 1, [["s"], ["m"], ["t"]], [("s", "m", VarLabel(1)), ("m", "t", ConstLabel(Fraction(1)))])
    with pytest.raises(StructureError):
        cut_decompose(a, 0)
    with pytest.raises(StructureError):
        cut_decompose(a, 2)


# -- independence reduction ---------------------------------------------------


def test_reduce_yields_independent_pairs_and_preserves_sum():
    checked = 0
    for member in standard_corpus()[:40]:
        if member.zero:
            continue
        a = member.abp
        p = expand(a)
        for lvl in range(1, len(a.levels) - 1):
            try:
                dec = cut_decompose(a, lvl)
            except StructureError:
                continue
            red = reduce_independent(dec)
            assert pair_sum(red) == p, (member.name, lvl)
            assert red.width <= dec.width
            if red.left:
                assert coefficient_rank(red.left) == len(red.left), (member.name, lvl)
                assert coefficient_rank(red.right) == len(red.right), (member.name, lvl)
            checked += 1
    assert checked > 20


def test_reduce_collapses_duplicate_paths():
    # both middle nodes carry the same left polynomial x1, so one pair suffices
    a = make_abp(
        Q,
        2,
        [["s"], ["m", "n"], ["t"]],
        [
            ("s", "m", VarLabel(1)),
            ("s", "n", VarLabel(1)),
            ("m", "t", VarLabel(2)),
            ("n", "t", ConstLabel(Fraction(3))),
        ],
    )
    dec = cut_decompose(a, 1)
    assert dec.width == 2
    red = reduce_independent(dec)
    assert red.width == 1
    assert pair_sum(red) == expand(a)


def test_reduce_rejects_zero_sum():
    a = make_abp(
        Q,
        1,
        [["s"], ["m", "n"], ["t"]],
        [
            ("s", "m", VarLabel(1)),
            ("s", "n", VarLabel(1)),
            ("m", "t", ConstLabel(Fraction(1))),
            ("n", "t", ConstLabel(Fraction(-1))),
        ],
    )
    dec = cut_decompose(a, 1)
    assert pair_sum(dec).is_zero
    with pytest.raises(StructureError):
        reduce_independent(dec)
