"""Exact polynomial algebra: ring laws, partitions, closing-space bases."""

import random
from fractions import Fraction as Q

import pytest

from heatode.algebra import (
    GradedPoly,
    WeightMismatch,
    bare_monomials,
    closing_dim,
    closing_monomials,
    mono,
    monomial_basis,
    partition_count,
    solve_linear,
)


def enumerate_partitions(m):
    """Brute-force oracle: all descending part tuples summing to m."""
    def rec(total, maxpart):
        if total == 0:
            yield ()
            return
        for p in range(min(total, maxpart), 0, -1):
            for rest in rec(total - p, p):
                yield (p,) + rest
    return list(rec(m, m))


def random_poly(rng, weight, kmax, nterms=3):
    basis = monomial_basis(weight // 2, 2, kmax)
    if not basis:
        return GradedPoly.zero()
    terms = {}
    for m in rng.sample(basis, min(nterms, len(basis))):
        terms[m] = Q(rng.randint(-5, 5))
    return GradedPoly(terms)


x2 = GradedPoly.variable(2)
x3 = GradedPoly.variable(3)
x4 = GradedPoly.variable(4)


def test_additive_inverse():
    assert not (x2 + x2.scale(-1))


def test_like_terms():
    p = (x2 * x2).scale(3) + x2 * x2
    assert p == (x2 * x2).scale(4)


def test_weight_mismatch_raised():
    # ||(2,0)|| = 8 differs from ||(0,1)|| = 6
    with pytest.raises(WeightMismatch):
        x2 * x2 + x3


def test_zero_is_weight_wildcard():
    z = GradedPoly.zero()
    assert (z + x2) == x2
    assert (x3 + z) == x3
    assert not z * x2


def test_monomial_products():
    assert (x2 * x2).weight == 8
    assert (x2 * x3).weight == 10
    assert (x2 * x3) == GradedPoly({mono({2: 1, 3: 1}): Q(1)})


def test_partial_derivatives():
    assert (x2 * x2).partial(2) == x2.scale(2)
    assert not (x2 * x2).partial(3)
    assert (x2 * x3).partial(2) == x3


def test_partial_weight_drop():
    p = x2 * x2 * x3
    assert p.partial(2).weight == p.weight - 4
    assert p.partial(3).weight == p.weight - 6


def test_leibniz_rule_random():
    rng = random.Random(7)
    for _ in range(30):
        w1 = rng.choice([4, 6, 8, 10])
        w2 = rng.choice([4, 6, 8])
        a = random_poly(rng, w1, 5)
        b = random_poly(rng, w2, 5)
        k = rng.choice([2, 3, 4, 5])
        lhs = (a * b).partial(k)
        rhs = a.partial(k) * b + a * b.partial(k)
        assert lhs == rhs


def test_ring_axioms_random():
    rng = random.Random(11)
    for _ in range(20):
        w = rng.choice([4, 6, 8])
        a = random_poly(rng, w, 4)
        b = random_poly(rng, w, 4)
        c = random_poly(rng, rng.choice([4, 6]), 4)
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a


def test_partition_count_against_enumeration():
    for m in range(31):
        assert partition_count(m) == len(enumerate_partitions(m))


def test_partition_values():
    assert partition_count(0) == 1
    assert partition_count(4) == 5
    assert partition_count(6) == 11


def test_closing_dim_small_cases():
    # n = 0..4 per the worked special cases
    assert [closing_dim(n) for n in range(5)] == [0, 0, 1, 1, 3]


def test_closing_basis_matches_dim():
    for n in range(13):
        assert len(closing_monomials(n)) == closing_dim(n)


def test_closing_basis_explicit():
    assert closing_monomials(2) == [mono({2: 2})]
    assert closing_monomials(3) == [mono({2: 1, 3: 1})]
    assert closing_monomials(4) == [mono({2: 3}), mono({3: 2}), mono({2: 1, 4: 1})]


def test_closing_basis_weights():
    for n in range(2, 10):
        for m in closing_monomials(n):
            p = GradedPoly({m: Q(1)})
            assert p.weight == 2 * (n + 2)


def test_bare_monomials_count():
    # closings of the wide ansatz allow x_1: all partitions except the full part
    for n in range(9):
        assert len(bare_monomials(n)) == partition_count(n + 2) - 1


def test_subst_diagonal():
    p = (x2 * x2).scale(24)
    q = p.subst({2: x2.scale(Q(1, 12))})
    assert q == (x2 * x2).scale(Q(1, 6))


def test_eval_exact():
    p = x2 * x3 - (x2 * x3).scale(2)
    assert p.eval({2: Q(3), 3: Q(1, 2)}) == Q(-3, 2)


def test_text_form():
    p = (x2 * x2 * x2).scale(-45) - (x3 * x3).scale(26) - (x2 * x4).scale(31)
    assert p.text() == "-45*x2^3 - 26*x3^2 - 31*x2*x4"


def test_json_roundtrip():
    p = (x2 * x4).scale(Q(-31, 7)) + (x3 * x3).scale(2)
    assert GradedPoly.from_json(p.to_json()) == p


def test_solve_linear_exact():
    rows = [[Q(2), Q(1)], [Q(1), Q(-1)], [Q(3), Q(0)]]
    rhs = [Q(5), Q(1), Q(6)]
    sol, residual = solve_linear(rows, rhs)
    assert sol == [Q(2), Q(1)]
    assert all(r == 0 for r in residual)


def test_solve_linear_inconsistent():
    rows = [[Q(1)], [Q(1)]]
    rhs = [Q(1), Q(2)]
    sol, residual = solve_linear(rows, rhs)
    assert any(r != 0 for r in residual)
