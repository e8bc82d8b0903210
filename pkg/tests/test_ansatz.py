import math

import numpy as np
import pytest

from cases import random_operator_cases
from choquard_singular.ansatz import (PowerLogProfile, closed_form_coefficients, eval_profile,
                                      fundamental_solution, weighted_m_laplace_closed_form,
                                      weighted_m_laplace_fd, weighted_m_laplace_fd_all)
from choquard_singular.errors import DomainError, GridTooCoarse, SingularGradient
from choquard_singular.exponents import validate_params
from choquard_singular.grid import RadialGrid, log_radii


def P_of(N, m, alpha):
    return validate_params(N, m, m, m, alpha, 0.5)


P521 = P_of(5, 2, 1)


def test_eval_profile_examples():
    assert eval_profile(PowerLogProfile(1, 2), 0.5) == 4
    assert eval_profile(PowerLogProfile(1, 1, 1), 1.0) == pytest.approx(1 / math.log(5), rel=1e-15)
    assert eval_profile(PowerLogProfile(2, 20 / 9), 0.1) == pytest.approx(2 * 10 ** (20 / 9), rel=1e-14)


@pytest.mark.parametrize("r", [0.0, -0.1, 1.01])
def test_eval_profile_domain(r):
    with pytest.raises(DomainError):
        eval_profile(PowerLogProfile(1, 2), r)


def test_coefficients_match_formula():
    c = closed_form_coefficients(PowerLogProfile(1, 3, 0.5), P521)
    assert (c.A, c.B, c.C) == (3.0, -2.0, 0.75)
    assert c.power_exponent == -6 and c.log_exponent == -2.5


def test_closed_form_examples():
    r = np.geomspace(1e-4, 1, 50)
    assert np.all(weighted_m_laplace_closed_form(PowerLogProfile(1, 2), P521, r) == 0)
    assert weighted_m_laplace_closed_form(PowerLogProfile(1, 1), P521, 0.5) == pytest.approx(-16, rel=1e-14)
    val = weighted_m_laplace_closed_form(PowerLogProfile(1, 3, 0.5), P521, 1.0)
    L = math.log(5)
    assert val == pytest.approx(L ** -2.5 * (3 * L * L - 2 * L + 0.75), rel=1e-14)
    assert round(val, 2) == 1.61


# values of r^(1-N) d/dr [r^(N-1-alpha) |u'|^(m-2) u'] from symbolic differentiation
SYMBOLIC = [
    ((5, 2, 1), (1, 20 / 9, 0), 0.1, 82375.33517037327178270574),
    ((5, 2, 1), (1, 3, 0.5), 0.01, 1082106945074.636805999706),
    ((4, 1.5, 0.5), (2, 2.5, 1 / 3), 0.3, -73.57531244415787201753199),
    ((3, 3, 0.5), (0.5, 1, 1), 0.5, 1.569451872774341300311861),
    ((3, 2, 1.5), (1, 0.4, 0), 1e-3, 180427404105.8180226005595),
]


@pytest.mark.parametrize("params, prof, r, expected", SYMBOLIC)
def test_closed_form_against_symbolic(params, prof, r, expected):
    val = weighted_m_laplace_closed_form(PowerLogProfile(*prof), P_of(*params), r)
    assert val == pytest.approx(expected, rel=1e-12)


def test_homogeneity():
    P = P_of(4, 2.7, 0.6)
    u = PowerLogProfile(1.3, 1.9, 0.4)
    r = np.geomspace(1e-3, 1, 20)
    ratio = weighted_m_laplace_closed_form(u.scaled(2), P, r) / weighted_m_laplace_closed_form(u, P, r)
    assert np.allclose(ratio, 2 ** 1.7, rtol=1e-14, atol=0)


def test_positive_above_fundamental_exponent():
    rng = np.random.default_rng(5)
    for _ in range(200):
        N, m, a = int(rng.integers(3, 8)), rng.uniform(1.2, 4), rng.uniform(0.1, 1)
        phi = (N - m - a) / (m - 1)
        if phi <= 0:
            continue
        u = PowerLogProfile(1, phi * rng.uniform(1.01, 3))
        assert np.all(weighted_m_laplace_closed_form(u, P_of(N, m, a), np.geomspace(1e-4, 1, 30)) > 0)


def test_singular_gradient():
    # -gamma L + tau = 0 at r = 1 when tau = gamma log 5
    u = PowerLogProfile(1, 1, math.log(5))
    with pytest.raises(SingularGradient):
        weighted_m_laplace_closed_form(u, P_of(4, 1.5, 0.5), 1.0)


def test_fd_examples():
    # 10^4 log-spaced nodes, 750 per halving, so r = 0.5 is a node
    r = 2.0 ** (-np.arange(9_999, -1, -1) / 750)
    assert r[0] < 1e-4 and 0.5 in r
    g = RadialGrid(r, r ** -1.0)
    assert weighted_m_laplace_fd(g, P521, 0.5) == pytest.approx(-16, rel=1e-4)
    u = PowerLogProfile(1, 3, 0.5)
    g = RadialGrid.sample(u, 1e-4, 10_000)
    r = g.radii
    j = int(np.argmin(np.abs(r - 0.3)))
    assert weighted_m_laplace_fd(g, P521, r[j]) == pytest.approx(
        weighted_m_laplace_closed_form(u, P521, r[j]), rel=1e-4)


def test_fd_errors():
    g = RadialGrid.sample(lambda r: r ** -2, 1e-4, 5)
    with pytest.raises(GridTooCoarse):
        weighted_m_laplace_fd_all(g, P521)
    g = RadialGrid.sample(lambda r: r ** -2, 1e-4, 200)
    with pytest.raises(GridTooCoarse):
        weighted_m_laplace_fd(g, P521, 0.123456)
    with pytest.raises(GridTooCoarse):
        weighted_m_laplace_fd(g, P521, 1.0)


def test_fd_random_suite_and_order():
    for P, u in random_operator_cases(20, seed=11):
        errs = []
        for n in (1_000, 2_000):
            g = RadialGrid.sample(u, 1e-4, n)
            fd = weighted_m_laplace_fd_all(g, P)
            cf = weighted_m_laplace_closed_form(u, P, g.radii[1:-1])
            errs.append(np.max(np.abs(fd / cf - 1)))
        assert errs[0] < 1e-3
        # second order: halving the step divides the error by about four
        assert errs[0] / errs[1] == pytest.approx(4, rel=0.15)


def test_fundamental_solution_examples():
    assert fundamental_solution(P521, 0.1) == pytest.approx(100, rel=1e-14)
    assert fundamental_solution(P_of(3, 2, 1), 1.0) == pytest.approx(1.6094, abs=1e-4)
    # N = m + alpha selects the log branch
    assert fundamental_solution(P_of(4, 3, 1), 0.25) == pytest.approx(math.log(20), rel=1e-15)


@pytest.mark.parametrize("params", [(5, 2, 1), (4, 3, 1), (6, 2.5, 0.7), (3, 1.5, 0.5)])
def test_fundamental_solution_fd_vanishes_under_refinement(params):
    P = P_of(*params)
    # the discrete flux of the fundamental solution is constant, so the
    # residual sits at roundoff on any grid
    for n in (500, 2000):
        g = RadialGrid.sample(lambda r: fundamental_solution(P, r), 1e-4, n)
        fd = weighted_m_laplace_fd_all(g, P)
        assert np.max(np.abs(fd) / radial_scale(g, P)) < 1e-8


def radial_scale(g, P):
    """Size of one flux-difference term, used to normalize the residual."""
    N, m, _, _, alpha, _ = P.floats
    r = g.radii[1:-1]
    du = np.gradient(g.values, g.radii)[1:-1]
    return r ** (-1 - alpha) * np.abs(du) ** (m - 1)
