"""Assembling and verifying heat-equation solutions.

The factored ansatz exp(-h z^2/2 + r) * (series in z) turns the heat
equation into statements about the series coefficients and the flow of
(r, h, x).  This module checks those statements three ways:

  series_heat_residual   a decidable symbolic check: every z-order of
                         the residual, with time derivatives rewritten
                         through the flow, must vanish as a polynomial
                         identity in (h, x);
  grid_heat_residual     a numeric check along trajectories or closed
                         forms, central differences in t against the
                         exact-in-z series derivative;
  conserved_integral     the conservation law for the z-integral of a
                         solution, via adaptive quadrature with an
                         explicit Gaussian tail bound.

polynomial_solution_check verifies the Gaussian-times-Hermite solutions
exactly, in the ring of polynomials in z and sqrt(t - c).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from scipy.integrate import quad

from .algebra import GradedPoly, Q
from .series import AnsatzSeries, BareSeries, hermite
from .systems import SystemSpec, SystemState, integrate_rk4, lift_jet, pole_sum


class OutOfRange(ValueError):
    """Evaluation outside the trajectory or validity range."""


# -- symbolic verification -----------------------------------------------------

@dataclass
class SymbolicHeatReport:
    """Per-order outcome of the polynomial-identity residual check."""

    case: str
    orders: list[int]
    failures: dict[int, GradedPoly] = field(default_factory=dict)

    @property
    def first_failure(self) -> int | None:
        return min(self.failures) if self.failures else None

    @property
    def all_ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "mode": "symbolic",
            "orders_checked": self.orders,
            "first_failure": self.first_failure,
            "max_residual": "0" if self.all_ok else "nonzero",
            "error_budget": None,
        }


def predicted_failure_order(k: int, delta: int) -> int:
    """The z-order where a fault in the k-th series coefficient first shows."""
    return 2 * k + delta - 2


def series_heat_residual(spec: SystemSpec, series: AnsatzSeries,
                         K: int | None = None, case: str = "") -> SymbolicHeatReport:
    """Check the heat equation order by order as exact polynomial identities.

    The residual of exp(-h z^2/2 + r) * S(z; x(t)) is expanded in z with
    every time derivative replaced through the flow; the coefficient of
    z^m is a polynomial in (h, x_2..x_{n+1}) (h occupies slot 1 of the
    grading) and must be exactly zero for every m <= 2K + delta - 2 of
    the series parity (opposite-parity coefficients vanish structurally).
    """
    if (series.n, series.delta, series.c) != (spec.n, spec.delta, spec.c):
        raise ValueError("series parameters do not match the system")
    K = K if K is not None else series.truncation
    if K > series.truncation:
        raise OutOfRange(f"series truncated at {series.truncation}")
    n, delta, c = spec.n, spec.delta, spec.c
    h = GradedPoly.variable(1)

    def coeff(m: int) -> GradedPoly:
        if m < delta or (m - delta) % 2:
            return GradedPoly.zero()
        k = (m - delta) // 2
        if k == 1:
            return GradedPoly.zero()
        return series.coeff(k).scale(Q(1, math.factorial(m)))

    orders = list(range(delta, 2 * K + delta - 1, 2))
    failures: dict[int, GradedPoly] = {}
    for m in orders:
        cm = coeff(m)
        residual = (h * cm).scale(m - delta)
        if n >= 1:
            x2cm = GradedPoly.variable(2) * coeff(m - 2)
            residual = residual + x2cm.scale(c / Q(4 * (1 + 2 * delta)))
        for i in range(n):
            k = i + 2
            dk = cm.partial(k)
            if dk:
                residual = residual + spec.flows[i] * dk
                residual = residual - (h * GradedPoly.variable(k) * dk).scale(2 * k)
        residual = residual - coeff(m + 2).scale(Q((m + 2) * (m + 1), 2))
        if residual:
            failures[m] = residual
    return SymbolicHeatReport(case or f"n={n},delta={delta}", orders, failures)


# -- assembled solutions ---------------------------------------------------------

@dataclass
class AnsatzSolution:
    """A factored solution: system, series and a state provider t -> state."""

    spec: SystemSpec
    series: AnsatzSeries
    state_at: Callable[[float], SystemState]

    def __post_init__(self):
        s = self.series
        if (s.n, s.delta, s.c) != (self.spec.n, self.spec.delta, self.spec.c):
            raise ValueError("series parameters do not match the system")

    def _series_sums(self, z: float, x: Mapping[int, float]) -> tuple[float, float, float]:
        delta, K = self.series.delta, self.series.truncation
        s = float(z) ** delta
        sz = 1.0 if delta else 0.0  # d/dz z^delta for delta in {0, 1}
        szz = 0.0
        for k in range(2, K + 1):
            pk = self.series.coeff(k)
            if not pk:
                continue
            v = float(pk.eval(x))
            e = 2 * k + delta
            s += v * z ** e / math.factorial(e)
            sz += v * z ** (e - 1) / math.factorial(e - 1)
            szz += v * z ** (e - 2) / math.factorial(e - 2)
        return s, sz, szz

    def _xmap(self, state: SystemState) -> dict[int, float]:
        return {k: float(v) for k, v in enumerate(state.x, start=2)}

    def psi(self, z: float, t: float) -> float:
        state = self.state_at(t)
        s, _, _ = self._series_sums(z, self._xmap(state))
        return math.exp(-0.5 * float(state.h) * z * z + float(state.r)) * s

    def psi_parts(self, z: float, t: float) -> tuple[float, float]:
        """Value and the magnitude of the last retained series term."""
        state = self.state_at(t)
        x = self._xmap(state)
        s, _, _ = self._series_sums(z, x)
        K, delta = self.series.truncation, self.series.delta
        last = self.series.coeff(K)
        tail = abs(float(last.eval(x))) * abs(z) ** (2 * K + delta) / math.factorial(2 * K + delta) \
            if last else 0.0
        envelope = math.exp(-0.5 * float(state.h) * z * z + float(state.r))
        return envelope * s, envelope * tail

    def dzz(self, z: float, t: float) -> float:
        """Exact-in-z second derivative of the assembled solution."""
        state = self.state_at(t)
        h = float(state.h)
        s, sz, szz = self._series_sums(z, self._xmap(state))
        bracket = h * h * z * z * s - 2 * h * z * sz - h * s + szz
        return math.exp(-0.5 * h * z * z + float(state.r)) * bracket

    def validity_radius(self, t: float, ratio: float = 2 ** -40,
                        z_max: float = 4.0) -> float:
        """Largest |z| <= z_max where the last series term stays below
        `ratio` of the partial sum; the truncation comfort zone at time t."""

        def tail_ok(z: float) -> bool:
            value, tail = self.psi_parts(z, t)
            return tail <= ratio * abs(value)

        if tail_ok(z_max):
            return z_max
        lo, hi = 0.0, z_max
        for _ in range(60):
            mid = (lo + hi) / 2
            if tail_ok(mid):
                lo = mid
            else:
                hi = mid
        return lo


@dataclass
class WideSolution:
    """The Gaussian-free shape exp(r(t)) * (wide series in z)."""

    series: BareSeries
    state_at: Callable[[float], tuple[float, Mapping[int, float]]]

    def _series_sums(self, z: float, x: Mapping[int, float]) -> tuple[float, float]:
        delta, K = self.series.delta, self.series.truncation
        s = float(z) ** delta
        szz = 0.0
        for k in range(1, K + 1):
            pk = self.series.coeff(k)
            if not pk:
                continue
            v = float(pk.eval(x))
            e = 2 * k + delta
            s += v * z ** e / math.factorial(e)
            szz += v * z ** (e - 2) / math.factorial(e - 2)
        return s, szz

    def psi(self, z: float, t: float) -> float:
        r, x = self.state_at(t)
        return math.exp(r) * self._series_sums(z, x)[0]

    def psi_parts(self, z: float, t: float) -> tuple[float, float]:
        r, x = self.state_at(t)
        s, _ = self._series_sums(z, x)
        K, delta = self.series.truncation, self.series.delta
        tail = abs(float(self.series.coeff(K).eval(x))) \
            * abs(z) ** (2 * K + delta) / math.factorial(2 * K + delta)
        return math.exp(r) * s, math.exp(r) * tail

    def dzz(self, z: float, t: float) -> float:
        r, x = self.state_at(t)
        return math.exp(r) * self._series_sums(z, x)[1]


def trajectory_provider(spec: SystemSpec, s0: SystemState,
                        step_hint: float = 1e-3) -> Callable[[float], SystemState]:
    """State provider backed by fixed-step integration from s0 (t >= s0.t)."""
    cache: dict[float, SystemState] = {float(s0.t): s0}

    def at(t: float) -> SystemState:
        t = float(t)
        if t in cache:
            return cache[t]
        if t < float(s0.t):
            raise OutOfRange(f"t = {t} precedes the initial time {s0.t}")
        span = t - float(s0.t)
        nsteps = max(1, round(span / step_hint))
        state = integrate_rk4(spec, s0, t, span / nsteps)[-1]
        cache[t] = state
        return state

    return at


def pole_state_provider(n: int, b, poles, delta: int,
                        r0: float = 0.0) -> Callable[[float], SystemState]:
    """Closed-form states from a pole-sum h: the lift gives x, the log gives r."""
    ps = pole_sum(b, poles)

    def at(t: float) -> SystemState:
        jet = ps.jet(t, max(n, 1))
        for a in ps.poles:
            if t <= a:
                raise OutOfRange(f"t = {t} is not to the right of the poles")
        r = r0 - (delta + 0.5) / float(ps.b) * sum(math.log(float(t - a)) for a in ps.poles)
        return SystemState(t, r, jet[0], lift_jet(jet, n))

    return at


# -- numeric verification ---------------------------------------------------------

@dataclass
class NumericHeatReport:
    case: str
    grid: dict
    max_residual: float
    fd_component: float
    truncation_component: float

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "mode": "numeric",
            "grid": self.grid,
            "first_failure": None,
            "max_residual": self.max_residual,
            "error_budget": {
                "fd": self.fd_component,
                "truncation": self.truncation_component,
            },
        }


def grid_heat_residual(sol, z_values: Sequence[float], t_values: Sequence[float],
                       fd_step: float, case: str = "") -> NumericHeatReport:
    """Max relative heat residual over a (z, t) grid.

    The time derivative is a central difference with the given step; the
    space derivative is exact in z.  The report decomposes the error
    budget into a Richardson estimate of the finite-difference component
    and the series truncation bound at the worst grid point.
    """
    worst = 0.0
    worst_point = None
    for t in t_values:
        for z in z_values:
            dt = (sol.psi(z, t + fd_step) - sol.psi(z, t - fd_step)) / (2 * fd_step)
            dzz = sol.dzz(z, t)
            value = sol.psi(z, t)
            scale = max(abs(value), abs(dt), abs(dzz) / 2, 1e-300)
            rel = abs(dt - dzz / 2) / scale
            if rel >= worst:
                worst = rel
                worst_point = (z, t, scale)
    z, t, scale = worst_point
    half = fd_step / 2
    dt_full = (sol.psi(z, t + fd_step) - sol.psi(z, t - fd_step)) / (2 * fd_step)
    dt_half = (sol.psi(z, t + half) - sol.psi(z, t - half)) / (2 * half)
    fd_component = abs(dt_full - dt_half) * 4 / 3 / scale
    _, tail = sol.psi_parts(z, t)
    return NumericHeatReport(
        case,
        {"z": len(z_values), "t": len(t_values), "fd_step": fd_step},
        worst,
        fd_component,
        tail / scale,
    )


# -- conservation -------------------------------------------------------------------

def gaussian_halfwidth(s: float, tol: float = 1e-13) -> float:
    """Half-width Z with Gaussian tail integral below tol.

    The tail of exp(-z^2/(2s)) beyond Z is at most (2s/Z) exp(-Z^2/(2s)),
    so Z = max(sqrt(2 s log(1/tol)), 2s) suffices.
    """
    return max(math.sqrt(2 * s * math.log(1 / tol)), 2 * s, 1.0)


def conserved_integral(psi: Callable[[float, float], float], t: float,
                       half_width: float) -> float:
    """The z-integral of a solution at time t over [-Z, Z], adaptively."""
    value, _ = quad(lambda z: psi(z, t), -half_width, half_width,
                    epsabs=1e-13, epsrel=1e-13, limit=300)
    return value


def fundamental_psi(c: float, k: int = 0) -> Callable[[float, float], float]:
    """The k-th z-derivative of the classical Gaussian solution at center c."""
    he = [float(v) for v in hermite(k)]

    def psi(z: float, t: float) -> float:
        s = t - c
        if s <= 0:
            raise OutOfRange(f"t = {t} is not beyond the center {c}")
        u = z / math.sqrt(s)
        poly = 0.0
        for coeff in reversed(he):
            poly = poly * u + coeff
        return (-1) ** k * s ** (-(k + 1) / 2) * math.exp(-z * z / (2 * s)) * poly

    return psi


# -- exact polynomial solutions ------------------------------------------------------

# Elements of the ring P(z, w) * exp(-z^2/(2 w^2)) with w = sqrt(t - c):
# dict (z-power, w-power) -> Fraction, w-powers possibly negative.

def _gh_dz(p: dict) -> dict:
    out: dict[tuple[int, int], Fraction] = {}
    for (i, j), v in p.items():
        if i:
            out[(i - 1, j)] = out.get((i - 1, j), Q(0)) + i * v
        out[(i + 1, j - 2)] = out.get((i + 1, j - 2), Q(0)) - v
    return {k: v for k, v in out.items() if v}


def _gh_ds(p: dict) -> dict:
    # d/ds = (1/(2w)) d/dw on both the polynomial and the Gaussian factor
    out: dict[tuple[int, int], Fraction] = {}
    for (i, j), v in p.items():
        if j:
            out[(i, j - 2)] = out.get((i, j - 2), Q(0)) + Q(j, 2) * v
        out[(i + 2, j - 4)] = out.get((i + 2, j - 4), Q(0)) + Q(1, 2) * v
    return {k: v for k, v in out.items() if v}


def polynomial_solution_check(k: int, coeffs: Sequence[Fraction] | None = None) -> bool:
    """Exact check that w^(-k-1) He_k(z/w) exp(-z^2/(2 w^2)) solves the heat equation.

    This is the k-th z-derivative of the fundamental solution, written
    with w = sqrt(t - c).  Works in the ring of Laurent polynomials in w
    with polynomial z-part, where d/dt is (1/(2w)) d/dw; the residual
    must vanish identically.  Passing `coeffs` substitutes another
    polynomial for He_k (fault injection).
    """
    he = list(coeffs) if coeffs is not None else hermite(k)
    p = {(i, -k - 1 - i): Q(c) for i, c in enumerate(he) if c}
    lhs = _gh_ds(p)
    rhs = _gh_dz(_gh_dz(p))
    residual = dict(lhs)
    for key, v in rhs.items():
        residual[key] = residual.get(key, Q(0)) - Q(1, 2) * v
    return all(v == 0 for v in residual.values())
