"""Heat-equation verification: symbolic residuals, grids, conservation."""

import math
from fractions import Fraction as Q

import pytest

from heatode.algebra import GradedPoly, closing_monomials
from heatode.series import ansatz_series, bare_series, default_c
from heatode.systems import SystemSpec, SystemState, pole_sum
from heatode.heat import (
    AnsatzSolution,
    OutOfRange,
    WideSolution,
    conserved_integral,
    fundamental_psi,
    gaussian_halfwidth,
    grid_heat_residual,
    pole_state_provider,
    polynomial_solution_check,
    predicted_failure_order,
    series_heat_residual,
    trajectory_provider,
)

x1 = GradedPoly.variable(1)
x2 = GradedPoly.variable(2)
x3 = GradedPoly.variable(3)


def closing(n, coeffs):
    return GradedPoly({m: Q(c) for m, c in zip(closing_monomials(n), coeffs)})


def reduced_case(n, delta, coeffs=None, K=8):
    cl = closing(n, coeffs) if coeffs else None
    spec = SystemSpec.reduced(n, delta=delta, closing=cl)
    series = ansatz_series(n, cl, default_c(delta), delta, K)
    return spec, series


# -- symbolic residual -----------------------------------------------------------

def test_symbolic_residual_required_cases():
    cases = [(1, 0, None), (1, 1, None), (2, 1, [24]), (3, 0, [48]), (3, 1, [48])]
    for n, delta, coeffs in cases:
        spec, series = reduced_case(n, delta, coeffs)
        report = series_heat_residual(spec, series)
        assert report.all_ok, (n, delta, report.first_failure)
        assert report.orders[-1] == 2 * 8 + delta - 2


def test_symbolic_residual_general_c():
    # the identity holds at any c, not only the default normalisation
    cl = closing(2, [5])
    spec = SystemSpec.reduced(2, delta=0, closing=cl, c=Q(3))
    series = ansatz_series(2, cl, Q(3), 0, 7)
    assert series_heat_residual(spec, series).all_ok


def test_symbolic_residual_detects_series_fault():
    from heatode.algebra import monomial_basis
    for delta in (0, 1):
        for k in (3, 4, 5):
            spec, series = reduced_case(2, delta, [24])
            bump = GradedPoly({monomial_basis(k, 2, 3)[0]: Q(k)})
            bad = series.with_coeff(k, series.coeff(k) + bump)
            report = series_heat_residual(spec, bad)
            assert report.first_failure == predicted_failure_order(k, delta)


def test_symbolic_residual_detects_flow_fault():
    # series built for one closing, flow running another
    spec, _ = reduced_case(2, 1, [25])
    _, series = reduced_case(2, 1, [24])
    assert not series_heat_residual(spec, series).all_ok


def test_symbolic_residual_rejects_mismatched_parameters():
    spec, _ = reduced_case(2, 0, [24])
    _, series = reduced_case(2, 1, [24])
    with pytest.raises(ValueError):
        series_heat_residual(spec, series)


def test_symbolic_report_json():
    spec, series = reduced_case(1, 0)
    data = series_heat_residual(spec, series, case="demo").to_json()
    assert data["mode"] == "symbolic"
    assert data["first_failure"] is None
    assert data["max_residual"] == "0"


# -- assembled solutions and numeric residual ---------------------------------------

def test_level_zero_solution_matches_fundamental():
    spec = SystemSpec.reduced(0, delta=0)
    series = ansatz_series(0, None, default_c(0), 0, 6)
    sol = AnsatzSolution(spec, series, pole_state_provider(0, 1, [0], 0))
    ref = fundamental_psi(0.0)
    for z, t in ((0.0, 1.0), (0.4, 2.5), (-0.3, 1.7)):
        assert abs(sol.psi(z, t) - ref(z, t)) < 1e-14


def test_level_zero_grid_residual_is_fd_only():
    spec = SystemSpec.reduced(0, delta=0)
    series = ansatz_series(0, None, default_c(0), 0, 6)
    sol = AnsatzSolution(spec, series, pole_state_provider(0, 1, [0], 0))
    zg = [i / 10 - 0.5 for i in range(11)]
    tg = [1.0 + 0.05 * i for i in range(5)]
    report = grid_heat_residual(sol, zg, tg, 1e-3)
    assert report.truncation_component == 0.0
    assert report.max_residual <= 2 * report.fd_component


def test_trajectory_grid_residual_level_two():
    cl = closing(2, [24])
    spec = SystemSpec.reduced(2, delta=1, closing=cl)
    series = ansatz_series(2, cl, Q(-6), 1, 8)
    s0 = SystemState(0.0, 0.1, 0.25, (0.2, -0.15))
    sol = AnsatzSolution(spec, series, trajectory_provider(spec, s0, 2.5e-4))
    zg = [-0.5 + i / 10 for i in range(11)]
    tg = [0.05 + 0.04 * i for i in range(5)]
    report = grid_heat_residual(sol, zg, tg, 1e-3)
    assert report.max_residual <= 1e-6
    half = grid_heat_residual(sol, zg, tg, 5e-4)
    assert 2.5 < report.max_residual / half.max_residual < 6


def test_truncation_dominated_regime_improves_with_order():
    # at tiny fd steps and low truncation the series term dominates;
    # two more orders must push the residual down
    cl = closing(2, [24])
    spec = SystemSpec.reduced(2, delta=1, closing=cl)
    s0 = SystemState(0.0, 0.0, 0.3, (0.5, -0.4))

    def run(K):
        series = ansatz_series(2, cl, Q(-6), 1, K)
        sol = AnsatzSolution(spec, series, trajectory_provider(spec, s0, 1e-4))
        return grid_heat_residual(sol, [1.4, 1.6], [0.05, 0.1], 1e-5).max_residual

    assert run(5) > 3 * run(7)


def test_psi_parts_tail():
    cl = closing(2, [24])
    spec = SystemSpec.reduced(2, delta=1, closing=cl)
    series = ansatz_series(2, cl, Q(-6), 1, 8)
    sol = AnsatzSolution(spec, series, trajectory_provider(spec, SystemState(0.0, 0.0, 0.2, (0.1, 0.1)), 1e-3))
    value, tail = sol.psi_parts(0.5, 0.1)
    assert tail < 2 ** -40 * abs(value)


def test_validity_radius_covers_working_window():
    cl = closing(2, [24])
    spec = SystemSpec.reduced(2, delta=1, closing=cl)
    series = ansatz_series(2, cl, Q(-6), 1, 8)
    sol = AnsatzSolution(spec, series, trajectory_provider(spec, SystemState(0.0, 0.0, 0.2, (0.1, 0.1)), 1e-3))
    radius = sol.validity_radius(0.1)
    assert radius > 0.5  # the grid window sits inside the comfort zone
    # a much cruder truncation shrinks the radius
    short = AnsatzSolution(spec, ansatz_series(2, cl, Q(-6), 1, 3),
                           trajectory_provider(spec, SystemState(0.0, 0.0, 0.2, (0.1, 0.1)), 1e-3))
    assert short.validity_radius(0.1) < radius


def test_odd_solution_vanishes_at_origin():
    cl = closing(2, [24])
    spec = SystemSpec.reduced(2, delta=1, closing=cl)
    series = ansatz_series(2, cl, Q(-6), 1, 6)
    sol = AnsatzSolution(spec, series, trajectory_provider(spec, SystemState(0.0, 0.0, 0.1, (0.1, 0.0)), 1e-3))
    assert sol.psi(0.0, 0.05) == 0.0


def test_trajectory_provider_out_of_range():
    spec = SystemSpec.reduced(0, delta=0)
    provider = trajectory_provider(spec, SystemState(0.0, 0.0, 1.0, ()))
    with pytest.raises(OutOfRange):
        provider(-0.5)


def test_pole_state_provider_range_guard():
    provider = pole_state_provider(1, 2, [Q(0), Q(1)], 0)
    with pytest.raises(OutOfRange):
        provider(0.5)


# -- the wide (Gaussian-free) assembled solution -------------------------------------

def addendum_solution(K=12):
    flows = (x2, x3,
             (x1 * x3).scale(-12) + (x2 * x2).scale(-9)
             + (x2 * x1 * x1).scale(-54) + (x1 * x1 * x1 * x1).scale(-27))
    series = bare_series(flows, x1.scale(Q(-1, 2)), K)
    poles = [Q(-1), Q(-2), Q(-3)]
    ps = pole_sum(3, poles)

    def state(t):
        jet = ps.jet(t, 2)
        r = -sum(math.log(float(t - a)) for a in poles) / 12.0
        return r, {1: float(jet[0]), 2: float(jet[1]), 3: float(jet[2])}

    return WideSolution(series, state)


def test_addendum_pointwise_form():
    sol = addendum_solution()
    t = 1.5
    prefactor = ((t + 1) * (t + 2) * (t + 3)) ** (-1 / 12)
    assert abs(sol.psi(0.0, t) - prefactor) < 1e-12


def test_addendum_numeric_residual():
    sol = addendum_solution()
    zg = [-0.5 + i / 10 for i in range(11)]
    tg = [1.0 + 0.04 * i for i in range(6)]
    report = grid_heat_residual(sol, zg, tg, 1e-3, case="three-pole")
    assert report.max_residual <= 1e-6


def test_addendum_side_condition():
    # r'(t) equals half the seed coefficient along the pole data
    poles = [Q(-1), Q(-2), Q(-3)]
    ps = pole_sum(3, poles)
    for t in (Q(1), Q(3, 2)):
        jet = ps.jet(t, 0)
        r_rate = -Q(1, 12) * sum(1 / (t - a) for a in poles)
        assert r_rate == Q(-1, 4) * jet[0]


# -- conservation ----------------------------------------------------------------------

def test_gaussian_integral_constant():
    psi = fundamental_psi(0.0)
    Z = gaussian_halfwidth(4.0)
    values = [conserved_integral(psi, t, Z) for t in (1.0, 2.0, 4.0)]
    for v in values:
        assert abs(v - math.sqrt(2 * math.pi)) < 1e-10
    assert max(values) - min(values) < 1e-10


def test_odd_solution_integrates_to_zero():
    # the odd level-0 solution z * exp(-z^2/(2t))/t^(3/2)
    def psi(z, t):
        return z * math.exp(-z * z / (2 * t)) / t ** 1.5

    Z = gaussian_halfwidth(4.0)
    for t in (1.0, 3.0):
        assert abs(conserved_integral(psi, t, Z)) < 1e-10


def test_derivative_solutions_integrate_to_zero():
    Z = gaussian_halfwidth(4.0)
    for k in (1, 2, 3):
        psi = fundamental_psi(0.0, k)
        for t in (1.0, 2.0):
            assert abs(conserved_integral(psi, t, Z)) < 1e-10


def test_gaussian_halfwidth_bound():
    # the quoted tail bound really is below tolerance at the returned width
    for s in (0.5, 1.0, 4.0):
        tol = 1e-13
        Z = gaussian_halfwidth(s, tol)
        assert (2 * s / Z) * math.exp(-Z * Z / (2 * s)) <= tol


# -- exact polynomial solutions -----------------------------------------------------

def test_polynomial_solutions_exact():
    for k in range(11):
        assert polynomial_solution_check(k)


def test_polynomial_solution_fault_detection():
    for k in (2, 3, 5):
        monomial = [Q(0)] * k + [Q(1)]
        assert not polynomial_solution_check(k, monomial)


def test_fundamental_derivative_matches_finite_difference():
    psi0 = fundamental_psi(0.0)
    psi1 = fundamental_psi(0.0, 1)
    z, t, eps = 0.4, 1.7, 1e-6
    fd = (psi0(z + eps, t) - psi0(z - eps, t)) / (2 * eps)
    assert abs(psi1(z, t) - fd) < 1e-8
