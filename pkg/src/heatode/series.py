"""Series builders for the heat-equation ansatz.

Three independent constructions of the same object live here:

  ansatz_series   polynomial-level recursion for the coefficients of the
                  even/odd series z^delta + sum_k P_k(x) z^(2k+delta)/(2k+delta)!,
  coeff_table     the discrete recursion for the scalar coefficients a(J)
                  of the same series written monomial by monomial,
  sigma_series    the Taylor expansion of the Weierstrass sigma-function,
                  which the n = 2 series reproduces under x2 = g2/12,
                  x3 = g3/2.

Keeping the routes independent is the point: each one is an oracle for
the others, and the tests compare them term by term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Mapping, Sequence

from .algebra import GradedPoly, Mono, Q, WeightMismatch, mono


def default_c(delta: int) -> Fraction:
    """The normalisation c = -2(1+2*delta) used by the dynamical systems."""
    return Q(-2 * (1 + 2 * delta))


def _check_closing(n: int, closing: GradedPoly | None) -> GradedPoly:
    closing = closing if closing is not None else GradedPoly.zero()
    if closing:
        if n < 2:
            raise WeightMismatch(f"no nonzero closing exists at level n = {n}")
        if closing.weight != 2 * (n + 2):
            raise WeightMismatch(
                f"closing weight {closing.weight} is not {2 * (n + 2)}")
        if any(k < 2 or k > n + 1 for m in closing.terms for k, _ in m):
            raise WeightMismatch("closing must use x_2..x_{n+1}")
    return closing


@dataclass(frozen=True)
class AnsatzSeries:
    """Truncated series z^delta + sum_{k=2}^K P_k(x) z^(2k+delta)/(2k+delta)!."""

    n: int
    delta: int
    c: Fraction
    truncation: int
    coeffs: tuple[GradedPoly, ...]  # P_2 .. P_K

    def coeff(self, k: int) -> GradedPoly:
        if k == 0:
            return GradedPoly.one()
        if k == 1 or (k < 0):
            return GradedPoly.zero()
        if k > self.truncation:
            raise IndexError(f"series truncated at K = {self.truncation}")
        return self.coeffs[k - 2]

    def with_coeff(self, k: int, poly: GradedPoly) -> AnsatzSeries:
        """Copy with one coefficient replaced (fault-injection helper)."""
        coeffs = list(self.coeffs)
        coeffs[k - 2] = poly
        return AnsatzSeries(self.n, self.delta, self.c, self.truncation, tuple(coeffs))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta,
            "c": str(self.c),
            "K": self.truncation,
            "coeffs": [{"k": k, "poly": self.coeff(k).to_json()}
                       for k in range(2, self.truncation + 1)],
        }


def ansatz_series(n: int, closing: GradedPoly | None, c: Fraction | int,
                  delta: int, K: int) -> AnsatzSeries:
    """Build the series for the reduced system at level n.

    The reduced right-hand sides are p_{k+1} = x_{k+1} for k = 2..n and
    p_{n+2} = closing; the recursion is

        P_q = 2 sum_k p_{k+1} dP_{q-1}/dx_k
              + (2q+delta-3)(2q+delta-2)/(2(1+2*delta)) * P_2 * P_{q-2}

    with P_2 = c*x_2 and P_3 = 2c*p_3.  At n = 1 there is no x_3 and the
    closing space is zero, so p_3 = 0 and every odd coefficient vanishes.
    """
    if delta not in (0, 1):
        raise ValueError("delta must be 0 or 1")
    if K < 2:
        raise ValueError("K must be at least 2")
    c = Q(c)
    closing = _check_closing(n, closing)
    if n == 0:
        return AnsatzSeries(0, delta, c, K, tuple(GradedPoly.zero() for _ in range(K - 1)))
    # p[k] is the flow of x_k: x_{k+1} below the top, the closing at the top
    p = {k: GradedPoly.variable(k + 1) for k in range(2, n + 1)}
    p[n + 1] = closing
    coeffs = [GradedPoly.variable(2, c)]
    if K >= 3:
        coeffs.append(p[2].scale(2 * c) if n >= 2 else GradedPoly.zero())
    two_delta = Q(2 * (1 + 2 * delta))
    for q in range(4, K + 1):
        prev, prev2 = coeffs[-1], coeffs[-2]
        term = GradedPoly.zero()
        for k in range(2, n + 2):
            if p[k]:
                term = term + p[k] * prev.partial(k)
        term = term.scale(2)
        factor = Q((2 * q + delta - 3) * (2 * q + delta - 2)) / two_delta
        term = term + (coeffs[0] * prev2).scale(factor)
        if term and term.weight != 2 * q:
            raise WeightMismatch(f"coefficient {q} has weight {term.weight}")
        coeffs.append(term)
    return AnsatzSeries(n, delta, c, K, tuple(coeffs))


# -- the discrete route -------------------------------------------------------

Index = tuple[int, ...]  # dense (j_2, ..., j_{n+1})


@dataclass(frozen=True)
class CoeffTable:
    """Scalar coefficients a(J), complete for all ||J|| <= 2K."""

    n: int
    delta: int
    c: Fraction
    truncation: int
    entries: Mapping[Index, Fraction]

    def to_json(self) -> dict:
        rows = sorted(self.entries.items(), key=lambda t: (sum(2 * (i + 2) * j for i, j in enumerate(t[0])), t[0]))
        return {
            "n": self.n,
            "delta": self.delta,
            "c": str(self.c),
            "K": self.truncation,
            "entries": [{"J": list(j), "a": str(a)} for j, a in rows],
        }


def _index_weight(n: int, j: Index) -> int:
    return sum(2 * (i + 2) * e for i, e in enumerate(j))


def _indices_up_to(n: int, max_weight: int) -> list[Index]:
    ranges = [range(max_weight // (2 * (i + 2)) + 1) for i in range(n)]
    out = [j for j in iter_product(*ranges) if _index_weight(n, j) <= max_weight]
    out.sort(key=lambda j: (_index_weight(n, j), j))
    return out


def closing_index_map(n: int, closing: GradedPoly | None) -> dict[Index, Fraction]:
    """Closing polynomial as a dense multiindex -> coefficient map."""
    closing = _check_closing(n, closing)
    out: dict[Index, Fraction] = {}
    for m, coeff in closing.terms.items():
        dense = [0] * n
        for k, e in m:
            dense[k - 2] = e
        out[tuple(dense)] = coeff
    return out


def coeff_table(n: int, closing: GradedPoly | Mapping[Index, Fraction] | None,
                c: Fraction | int, delta: int, K: int) -> CoeffTable:
    """Fill a(J) for ||J|| <= 2K by the one-step discrete recursion.

    Each a(J) is a combination of values at strictly smaller weight:

      a(J) = c/(2(1+2d)) (||J||+d-2)(||J||+d-3) a(J - e2)
           + sum_{k=2}^{n} 2 (j_k + 1) a(J + e_k - e_{k+1})
           + sum_S 2 (j_{n+1} + 1) p(S) a(J - S + e_{n+1})

    with a(0) = 1 and a(J) = 0 off the nonnegative orthant.
    """
    if delta not in (0, 1):
        raise ValueError("delta must be 0 or 1")
    c = Q(c)
    if isinstance(closing, GradedPoly) or closing is None:
        pmap = closing_index_map(n, closing)
    else:
        pmap = {tuple(k): Q(v) for k, v in closing.items()}
        for s in pmap:
            if _index_weight(n, s) != 2 * (n + 2):
                raise WeightMismatch(f"closing monomial {s} has wrong weight")
    entries: dict[Index, Fraction] = {}

    def get(j: tuple[int, ...]) -> Fraction:
        if any(e < 0 for e in j):
            return Q(0)
        return entries[tuple(j)]

    for j in _indices_up_to(n, 2 * K):
        w = _index_weight(n, j)
        if w == 0:
            entries[j] = Q(1)
            continue
        value = Q(0)
        lowered = list(j)
        lowered[0] -= 1
        value += c / Q(2 * (1 + 2 * delta)) * (w + delta - 2) * (w + delta - 3) * get(tuple(lowered))
        for i in range(n - 1):  # k = i+2 runs over 2..n
            shifted = list(j)
            shifted[i] += 1
            shifted[i + 1] -= 1
            value += 2 * (j[i] + 1) * get(tuple(shifted))
        for s, ps in pmap.items():
            moved = [a - b for a, b in zip(j, s)]
            moved[n - 1] += 1
            value += 2 * (j[n - 1] + 1) * ps * get(tuple(moved))
        entries[j] = value
    return CoeffTable(n, delta, c, K, entries)


def series_from_table(table: CoeffTable) -> AnsatzSeries:
    """Regroup table entries by weight into series coefficients."""
    buckets: dict[int, dict[Mono, Fraction]] = {}
    for j, a in table.entries.items():
        w = _index_weight(table.n, j)
        if w == 0 or a == 0:
            continue
        m = mono({i + 2: e for i, e in enumerate(j) if e})
        buckets.setdefault(w // 2, {})[m] = a
    coeffs = tuple(GradedPoly(buckets.get(k, {}))
                   for k in range(2, table.truncation + 1))
    return AnsatzSeries(table.n, table.delta, table.c, table.truncation, coeffs)


# -- the wide (Gaussian-free) ansatz ------------------------------------------

@dataclass(frozen=True)
class BareSeries:
    """Series z^delta + sum_{k>=1} P_k(x) z^(2k+delta)/(2k+delta)! over x_1..x_{n+1}."""

    n: int
    delta: int
    truncation: int
    coeffs: tuple[GradedPoly, ...]  # P_1 .. P_K

    def coeff(self, k: int) -> GradedPoly:
        if k == 0:
            return GradedPoly.one()
        if k > self.truncation:
            raise IndexError(f"series truncated at K = {self.truncation}")
        return self.coeffs[k - 1]

    def r_rate(self) -> GradedPoly:
        """The side condition: r'(t) must equal half the first coefficient."""
        return self.coeff(1).scale(Q(1, 2))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta,
            "K": self.truncation,
            "coeffs": [{"k": k, "poly": self.coeff(k).to_json()}
                       for k in range(1, self.truncation + 1)],
        }


def bare_series(p_list: Sequence[GradedPoly], psi1: GradedPoly, K: int,
                delta: int = 0) -> BareSeries:
    """Build the wide-ansatz series from its one-step recursion.

    `p_list` gives the flows p_2..p_{n+2} of x_1..x_{n+1} (each p_{j+1}
    homogeneous of weight 2(j+1)); `psi1` is the weight-2 seed.  The
    recursion is P_{k+1} = 2 sum_j p_{j+1} dP_k/dx_j + P_1 * P_k.
    """
    n = len(p_list) - 1
    if n < 0:
        raise ValueError("p_list must cover x_1..x_{n+1}")
    for j, p in enumerate(p_list, start=1):
        if p and p.weight != 2 * (j + 1):
            raise WeightMismatch(
                f"flow of x_{j} has weight {p.weight}, expected {2 * (j + 1)}")
    if psi1 and psi1.weight != 2:
        raise WeightMismatch("the seed coefficient must have weight 2")
    coeffs = [psi1]
    for _ in range(1, K):
        prev = coeffs[-1]
        nxt = GradedPoly.zero()
        for j, p in enumerate(p_list, start=1):
            if p:
                nxt = nxt + p * prev.partial(j)
        nxt = nxt.scale(2) + psi1 * prev
        coeffs.append(nxt)
    return BareSeries(n, delta, K, tuple(coeffs))


# -- Weierstrass sigma --------------------------------------------------------

def sigma_series(K: int) -> list[GradedPoly]:
    """Taylor coefficients S_k of sigma = sum S_k z^(2k+1)/(2k+1)!, k <= K.

    Variables: slot 2 holds g2 (weight 4) and slot 3 holds g3 (weight 6).
    Solving the annihilating second-order operator order by order gives

        S_{m+1} = 2 l2(S_m) - m(2m+1)/6 * g2 * S_{m-1},

    with l2 = 6 g3 d/dg2 + (1/3) g2^2 d/dg3; the scaling operator is then
    satisfied automatically because every S_k is homogeneous of weight 2k
    (asserted below, not assumed).
    """
    g2 = GradedPoly.variable(2)
    out = [GradedPoly.one(), GradedPoly.zero()]
    for m in range(1, K):
        nxt = sigma_l2(out[m]).scale(2) - (g2 * out[m - 1]).scale(Q(m * (2 * m + 1), 6))
        if nxt and nxt.weight != 2 * (m + 1):
            raise WeightMismatch(f"sigma coefficient {m + 1} lost homogeneity")
        out.append(nxt)
    return out[:K + 1]


def sigma_l2(p: GradedPoly) -> GradedPoly:
    """The lowering field 6 g3 d/dg2 + (1/3) g2^2 d/dg3 on (g2, g3) polynomials."""
    g2 = GradedPoly.variable(2)
    g3 = GradedPoly.variable(3)
    return g3.scale(6) * p.partial(2) + (g2 * g2).scale(Q(1, 3)) * p.partial(3)


def sigma_l0(p: GradedPoly) -> GradedPoly:
    """The scaling field 4 g2 d/dg2 + 6 g3 d/dg3."""
    g2 = GradedPoly.variable(2)
    g3 = GradedPoly.variable(3)
    return g2.scale(4) * p.partial(2) + g3.scale(6) * p.partial(3)


# -- Hermite polynomials ------------------------------------------------------

def hermite(k: int) -> list[Fraction]:
    """Coefficient list of He_k (probabilists' convention).

    Defined by repeated differentiation of the Gaussian, which yields the
    recursion He_{k+1} = x He_k - He_k'.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    he = [Q(1)]
    for _ in range(k):
        shifted = [Q(0)] + he                                  # x * He
        deriv = [Q(i) * c for i, c in enumerate(he)][1:]       # He'
        he = [a - (deriv[i] if i < len(deriv) else Q(0))
              for i, a in enumerate(shifted)]
    return he


def hermite_eval(coeffs: Sequence[Fraction], x):
    value = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        value = value * x + c
    return value


# -- the single-variable eigenfunction check ----------------------------------

@dataclass
class QuarticEigenReport:
    """Order-by-order outcome of the two n = 1 closed-form identities."""

    truncation: int
    second_derivative_ok: dict[int, bool]
    eigen_ok: dict[int, bool]

    @property
    def first_failure(self) -> int | None:
        bad = [k for k, ok in sorted(self.second_derivative_ok.items()) if not ok]
        bad += [k for k, ok in sorted(self.eigen_ok.items()) if not ok]
        return min(bad) if bad else None

    @property
    def all_ok(self) -> bool:
        return self.first_failure is None

    def to_json(self) -> dict:
        return {
            "K": self.truncation,
            "second_derivative": {str(k): v for k, v in sorted(self.second_derivative_ok.items())},
            "eigen": {str(k): v for k, v in sorted(self.eigen_ok.items())},
            "first_failure": self.first_failure,
        }


def quartic_eigenfunction_check(K: int, delta: int,
                                lam: Fraction | None = None,
                                series: AnsatzSeries | None = None) -> QuarticEigenReport:
    """Verify the n = 1 series is z^delta times an eigenfunction of z^4.

    Two exact identities are checked through the truncation order, each
    indexed by the coefficient it produces: the second-derivative
    equation P_k = -(2k+d-2)(2k+d-3) x2 P_{k-2}, and the eigenfunction
    equation for gamma(v) with v = z^4 at eigenvalue lam*x2 (default
    -1/(4(3+2*delta)), the value forced by the series itself).
    """
    if series is None:
        series = ansatz_series(1, None, default_c(delta), delta, K)
    if lam is None:
        lam = Q(-1, 4 * (3 + 2 * delta))
    x2 = GradedPoly.variable(2)
    second: dict[int, bool] = {}
    eigen: dict[int, bool] = {}
    for k in range(2, K + 1):
        lhs = series.coeff(k)
        rhs = (x2 * series.coeff(k - 2)).scale(-Q((2 * k + delta - 2) * (2 * k + delta - 3)))
        second[k] = lhs == rhs
    m = 0
    while 2 * m + 2 <= K:
        gm = series.coeff(2 * m).scale(Q(1, math.factorial(4 * m + delta)))
        gm1 = series.coeff(2 * m + 2).scale(Q(1, math.factorial(4 * m + 4 + delta)))
        lhs = gm1.scale(Q(m + 1) * (1 + Q(4 * m, 3 + 2 * delta)))
        rhs = (x2 * gm).scale(lam)
        eigen[2 * m + 2] = lhs == rhs
        m += 1
    return QuarticEigenReport(K, second, eigen)
