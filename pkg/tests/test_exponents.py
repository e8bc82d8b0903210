import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choquard_singular.errors import EmptyRangeError, ParameterError, PreconditionError
from choquard_singular.exponents import (COND_DIM, COND_MAX, COND_SUM, Existence, Geometry,
                                         ProfileKind, Regime, candidate_gamma_range,
                                         classify_existence, classify_profile,
                                         construct_candidate, derive_exponents, gamma_interval,
                                         to_rational, validate_params)

CASE1 = (5, 2, 1.4, 1.4, 1, 1)
CRITICAL = (5, 2, 1, 2, 1, 3)
CASE2 = (5, 2, 1.01, 2.3, 1, 2.5)
SUBDIM = (3, 2, 2, 2, 1.5, 1)


def test_to_rational_reads_decimal_repr():
    assert to_rational(1.4) == F(7, 5)
    assert to_rational("3/2") == F(3, 2)
    assert to_rational(2) == F(2)


def test_validate_ok():
    P = validate_params(*CASE1)
    assert P.N == 5 and P.p == F(7, 5)


@pytest.mark.parametrize("raw, msg", [
    ((5, 2, 1.4, 0.9, 1, 1), "q <= m-1"),
    ((5, 2, 1.4, 1.4, 1, 6), "beta >= N"),
])
def test_validate_rejects(raw, msg):
    with pytest.raises(ParameterError) as e:
        validate_params(*raw)
    assert msg in e.value.violations


def test_validate_reports_every_violation():
    with pytest.raises(ParameterError) as e:
        validate_params(2.5, 0.5, -1, -1, 0, 0)
    assert len(e.value.violations) >= 6


def test_derive_case1():
    d = derive_exponents(validate_params(*CASE1))
    assert d.sigma == F(20, 9)
    assert d.tau == F(5, 9)
    assert d.nu == F(5, 2)
    assert d.phi_exponent == 2
    assert d.theta_plus == F(19, 9)
    assert d.regime is Regime.ABOVE


def test_derive_boundary():
    d = derive_exponents(validate_params(*CRITICAL))
    assert d.sigma == 3 and d.sigma * 1 == 3
    assert d.theta_plus == 0 and d.tau == F(1, 2)
    assert d.regime is Regime.EQUAL


def test_derive_subcritical_dimension():
    d = derive_exponents(validate_params(*SUBDIM))
    assert d.nu is None
    assert d.sigma == F(3, 2)
    assert d.geometry is Geometry.SUBCRITICAL_DIM


def test_existence_examples():
    v = classify_existence(validate_params(*CASE1))
    assert v.exists is Existence.YES
    assert v.margins[COND_MAX] == (F(7, 5), F(5, 2))
    assert v.margins[COND_SUM] == (F(14, 5), 3)
    assert v.margins[COND_DIM] == (1, 3)
    v = classify_existence(validate_params(5, 2, 1.6, 1.6, 1, 1))
    assert v.exists is Existence.NO and v.failed_conditions == (COND_SUM,)
    v = classify_existence(validate_params(*SUBDIM))
    assert v.exists is Existence.YES and v.geometry is Geometry.SUBCRITICAL_DIM


def test_existence_exact_boundary_is_no():
    # p + q exactly at (N+beta)(m-1)/(N-m-alpha) = 3
    for p, q in [(F(3, 2), F(3, 2)), (F(7, 5), F(8, 5)), ("1.4", "1.6")]:
        v = classify_existence(validate_params(5, 2, p, q, 1, 1))
        assert v.exists is Existence.NO
        assert COND_SUM in v.failed_conditions
    # max(p, q) exactly at nu
    v = classify_existence(validate_params(5, 2, F(5, 2), F(11, 10), 1, 4))
    assert COND_MAX in v.failed_conditions


def test_existence_undetermined_for_small_p():
    v = classify_existence(validate_params(*CRITICAL))
    assert v.exists is Existence.UNDETERMINED


def test_profile_examples():
    c = classify_profile(validate_params(*CASE1))
    assert c.kind is ProfileKind.DICHOTOMY
    assert c.strong_profile == F(20, 9) and c.q_bound == F(13, 9)
    c = classify_profile(validate_params(*CASE2))
    assert c.kind is ProfileKind.DICHOTOMY and c.strong_profile == F(30, 13)
    assert classify_profile(validate_params(*CRITICAL)).kind is ProfileKind.BOUNDARY_CASE
    with pytest.raises(PreconditionError):
        classify_profile(validate_params(*SUBDIM))


def test_profile_out_of_range_when_sigma_p_reaches_n():
    P = validate_params(4, 2, F(29, 20), F(11, 5), F(19, 10), F(7, 2))
    assert classify_existence(P).exists is Existence.YES
    c = classify_profile(P)
    assert c.kind is ProfileKind.OUT_OF_RANGE and "sigma*p" in c.reason


def test_gamma_range_examples():
    assert candidate_gamma_range(validate_params(*CASE1)) == (2, F(20, 9))
    assert candidate_gamma_range(validate_params(*SUBDIM)) == (0, F(1, 2))
    assert candidate_gamma_range(validate_params(*CASE2)) == (2, F(30, 13))
    with pytest.raises(PreconditionError):
        candidate_gamma_range(validate_params(5, 2, 1.6, 1.6, 1, 1))


def test_construct_examples():
    u = construct_candidate(validate_params(*CASE1))
    assert (u.kappa, u.gamma, u.tau) == (1.0, pytest.approx(20 / 9, abs=0), 0.0)
    u = construct_candidate(validate_params(*CRITICAL))
    assert (u.gamma, u.tau) == (3.0, 0.5)
    u = construct_candidate(validate_params(*CASE2))
    assert u.gamma == float(F(30, 13)) and u.tau == 0
    with pytest.raises(PreconditionError):
        construct_candidate(validate_params(5, 2, 1.6, 1.6, 1, 1))


def _random_params(rng):
    N = rng.randint(2, 8)
    m = F(rng.randint(11, 40), 10)
    alpha = F(rng.randint(1, 30), 10)
    beta = F(rng.randint(1, 10 * N - 1), 10)
    p = m - 1 + F(rng.randint(1, 40), 20)
    q = m - 1 + F(rng.randint(1, 40), 20)
    return validate_params(N, m, p, q, alpha, beta)


def test_classifier_gamma_range_consistency_sweep():
    rng = random.Random(20240611)
    n = 0
    while n < 10_000:
        P = _random_params(rng)
        if P.gap <= 0:
            continue
        n += 1
        v = classify_existence(P)
        d = derive_exponents(P)
        lo, hi = gamma_interval(P)
        yes = v.exists is Existence.YES
        assert yes == (lo < hi), P
        if yes:
            assert d.sigma > d.phi_exponent
            assert candidate_gamma_range(P) == (lo, hi)
        if P.q >= d.nu:
            assert not yes
        assert d.theta_plus == max(d.sigma * P.p - P.beta, 0)


rationals = st.fractions(min_value=F(1, 20), max_value=F(6), max_denominator=40)


@settings(max_examples=300, deadline=None)
@given(N=st.integers(2, 9), dm=rationals, alpha=rationals, bfrac=st.fractions(F(1, 50), F(49, 50)),
       dp=rationals, dq=rationals)
def test_yes_iff_nonempty_range(N, dm, alpha, bfrac, dp, dq):
    m = 1 + dm / 2
    P = validate_params(N, m, m - 1 + dp, m - 1 + dq, alpha, bfrac * N)
    v = classify_existence(P)
    if P.gap > 0:
        lo, hi = gamma_interval(P)
        assert (v.exists is Existence.YES) == (lo < hi)
    else:
        assert v.exists is Existence.YES
        lo, hi = candidate_gamma_range(P)
        assert 0 == lo < hi


def test_empty_range_error_type():
    assert issubclass(EmptyRangeError, RuntimeError)
