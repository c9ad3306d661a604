import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from polyjacobi.bounds import (
    DomainError,
    beta_lift,
    bound_ratio,
    eta,
    first_moment_constant,
    instance_digest,
    jensen_gap,
    moment_from_layer_cake,
    nu,
    rhs_thm2,
    rhs_thm4,
    verify_bound,
    verify_bounds,
)
from polyjacobi.operators import PolyJacobiCoefficients
from polyjacobi.sequence import Sequence
from polyjacobi.spectrum import discrete_spectrum


def test_eta_sigma1_gamma1():
    assert eta(1, 1) == pytest.approx(2 * 3 ** -1.5, rel=1e-14)
    assert eta(1, 1) == pytest.approx(0.3849001795, abs=1e-10)


@pytest.mark.parametrize("sigma", range(1, 7))
def test_eta_gamma1_is_first_moment_constant(sigma):
    s2 = 2 * sigma
    assert eta(sigma, 1) == pytest.approx(s2 / (s2 + 1) ** ((s2 + 1) / s2), rel=1e-13)


@pytest.mark.parametrize("sigma, gamma", [(2, 2.0), (1, 1.5), (3, 3.0), (2, 1.25)])
def test_eta_matches_moment_lift_quadrature(sigma, gamma):
    p = (2 * sigma + 1) / (2 * sigma)
    integral, _ = quad(lambda t: t ** (gamma - 2) * (1 - t) ** p, 0, 1, epsrel=1e-13, limit=200)
    beta = math.gamma(gamma - 1) * math.gamma(2) / math.gamma(gamma + 1)
    assert eta(sigma, gamma) == pytest.approx(first_moment_constant(sigma) * integral / beta, rel=1e-9)
    assert beta_lift(sigma, gamma, 2.0) == pytest.approx(eta(sigma, gamma) * 2.0 ** (gamma + 1 / (2 * sigma)), rel=1e-9)


def test_nu_values():
    assert nu(1, 1) == pytest.approx(2 / 3, rel=1e-14)
    assert nu(2, 1) == pytest.approx(4 / 5, rel=1e-14)


@pytest.mark.parametrize("sigma", range(1, 7))
@pytest.mark.parametrize("gamma", [1, 1.5, 2, 3])
def test_nu_eta_ratio(sigma, gamma):
    expected = (2 * sigma + 1) ** (gamma - (2 * sigma - 1) / (2 * sigma))
    assert nu(sigma, gamma) / eta(sigma, gamma) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("gamma", [0.5, 0.99, -1])
def test_gamma_below_one_is_domain_error(gamma):
    with pytest.raises(DomainError):
        eta(1, gamma)
    with pytest.raises(DomainError):
        nu(1, gamma)


def test_rhs_thm2_examples():
    assert rhs_thm2(1, 1, Sequence()) == 0
    assert rhs_thm2(1, 1, Sequence.impulse(0, 3.0)) == pytest.approx(2.0, abs=1e-12)
    two = Sequence.from_entries({0: 1.0, 5: 1.0})
    assert rhs_thm2(2, 1, two) == pytest.approx(2 * eta(2, 1), rel=1e-15)
    with pytest.raises(DomainError):
        rhs_thm2(1, 1, Sequence(0, [1.0, -0.1]))


def test_rhs_thm4_examples():
    assert rhs_thm4(1, 1, PolyJacobiCoefficients(1)) == 0
    c = PolyJacobiCoefficients.from_entries(1, deviations=[(1, 0, 0.5)])
    assert rhs_thm4(1, 1, c) == pytest.approx(2 / 3 * 4 * 0.5 ** 1.5, rel=1e-14)
    assert rhs_thm4(1, 1, c) == pytest.approx(0.9428, abs=1e-4)
    assert rhs_thm4(1, 1, PolyJacobiCoefficients(1, Sequence.impulse(0, 1.0))) == pytest.approx(2 / 3)
    # sign of b and of deviations is irrelevant
    neg = PolyJacobiCoefficients.from_entries(1, [(0, -1.0)], [(1, 0, -0.5)])
    pos = PolyJacobiCoefficients.from_entries(1, [(0, 1.0)], [(1, 0, 0.5)])
    assert rhs_thm4(1, 2, neg) == rhs_thm4(1, 2, pos)


def test_verify_thm2_single_site():
    rep = verify_bound("thm2", 1, 1, PolyJacobiCoefficients(1, Sequence.impulse(0, 3.0)))
    assert rep.lhs == pytest.approx(math.sqrt(13) - 2, abs=1e-10)
    assert rep.rhs == pytest.approx(2.0, abs=1e-12)
    assert rep.ratio == pytest.approx(0.8028, abs=1e-4)
    assert rep.passed and rep.converged


def test_verify_zero_potential():
    for theorem in ("thm2", "cor3", "thm4"):
        rep = verify_bound(theorem, 2, 1.5, PolyJacobiCoefficients(2))
        assert rep.lhs == 0 and rep.rhs == 0 and rep.ratio == 0 and rep.passed


def test_verify_cor3_mirrors_thm2_for_sigma1():
    # for sigma = 1 the gauge (-1)^n maps one operator onto minus the other
    c = PolyJacobiCoefficients(1, Sequence.impulse(0, 3.0))
    rep = verify_bound("cor3", 1, 1, c)
    assert rep.lhs == pytest.approx(math.sqrt(13) - 2, abs=1e-10)
    assert rep.passed


def test_verify_thm4_example():
    c = PolyJacobiCoefficients.from_entries(2, [(0, 2.0), (3, -1.0)], [(1, 0, 0.5), (2, 1, -0.4)])
    for gamma in (1, 2):
        rep = verify_bound("thm4", 2, gamma, c)
        assert rep.converged and rep.passed and rep.lhs > 0


def test_verify_domain_errors():
    neg = PolyJacobiCoefficients(1, Sequence.impulse(0, -1.0))
    with pytest.raises(DomainError):
        verify_bound("thm2", 1, 1, neg)
    (row,) = verify_bounds("thm2", neg, [1])
    assert row.status == "domain_error" and math.isnan(row.ratio)
    dev = PolyJacobiCoefficients.from_entries(1, deviations=[(1, 0, 0.2)])
    assert verify_bounds("cor3", dev, [1])[0].status == "domain_error"
    with pytest.raises(DomainError):
        verify_bound("thm4", 1, 0.5, dev)


def test_unconverged_marked_indeterminate():
    c = PolyJacobiCoefficients(1, Sequence.impulse(0, 0.1))
    spec = discrete_spectrum(c, "h_sigma", max_doublings=1)
    (row,) = verify_bounds("thm2", c, [1], spectrum=spec)
    assert row.status == "indeterminate" and not row.converged


def test_bound_ratio():
    assert bound_ratio(1.0, 2.0) == 0.5
    assert bound_ratio(0.0, 0.0) == 0.0
    assert bound_ratio(1.0, 0.0) == math.inf


def test_each_gamma_passes_independently():
    c = PolyJacobiCoefficients(2, Sequence(0, [0.4, 0.9, 0.3]))
    for rep in verify_bounds("thm2", c, [1, 1.25, 1.5, 2, 3, 4]):
        assert rep.passed


def test_digest_stable_and_sensitive():
    a = PolyJacobiCoefficients(1, Sequence.impulse(0, 3.0))
    assert instance_digest(a) == instance_digest(PolyJacobiCoefficients(1, Sequence(-2, [0.0, 0.0, 3.0])))
    assert instance_digest(a) != instance_digest(PolyJacobiCoefficients(1, Sequence.impulse(0, 3.0000001)))
    assert instance_digest(a) != instance_digest(PolyJacobiCoefficients(2, Sequence.impulse(0, 3.0)))


@pytest.mark.parametrize("gamma", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("e", [0.01, 1.0, 7.5])
def test_layer_cake_identity(gamma, e):
    assert moment_from_layer_cake(e, gamma) == pytest.approx(e ** gamma, rel=1e-6)


@given(st.integers(1, 6), st.floats(1, 3),
       st.lists(st.floats(0, 100), min_size=13, max_size=13))
def test_jensen_split(sigma, q, pool):
    alphas = np.array(pool[: 2 * sigma + 1])
    scale = alphas.size ** (q - 1) * np.sum(alphas ** q)
    assert jensen_gap(alphas, q) >= -1e-12 * max(scale, 1e-300)
