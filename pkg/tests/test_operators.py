import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_laplacian_power, recursive_stencil
from polyjacobi.operators import (
    BINOMIAL_ROW_CAP,
    SIGMA_CAP,
    BandedSymmetricMatrix,
    PolyJacobiCoefficients,
    SigmaRangeError,
    WindowTooSmallError,
    apply_laplacian_power,
    assemble_w_sigma,
    binomial,
    central_coefficient,
    difference,
    difference_adjoint,
    essential_spectrum,
    laplacian_power_section,
    laplacian_stencil,
    omegas,
    sandwich_potentials,
    symbol,
    symbol_closed_form,
)
from polyjacobi.sequence import Sequence
from polyjacobi.spectrum import eigenvalues_symmetric

sequences = st.builds(
    Sequence,
    st.integers(-20, 20),
    st.lists(st.floats(-10, 10, allow_nan=False), min_size=0, max_size=25),
)
int_sequences = st.builds(
    Sequence,
    st.integers(-20, 20),
    st.lists(st.integers(-1000, 1000), min_size=0, max_size=25),
)


# -- binomial ----------------------------------------------------------------


def test_binomial_small_values():
    assert binomial(4, 2) == 6
    assert all(binomial(a, 0) == 1 for a in range(BINOMIAL_ROW_CAP + 1))
    assert binomial(28, 14) == 40116600
    assert binomial(3, 5) == 0 and binomial(3, -1) == 0


def test_binomial_matches_math_comb():
    for a in range(BINOMIAL_ROW_CAP + 1):
        for b in range(a + 1):
            assert binomial(a, b) == math.comb(a, b)


def test_binomial_beyond_cap_names_sigma_cap():
    with pytest.raises(OverflowError, match="sigma cap"):
        binomial(BINOMIAL_ROW_CAP + 1, 3)


def test_pascal_identity_example():
    # sigma = 3, b = 2: C(6,2) + C(6,3) = 15 + 20 = 35 = C(7,3)
    assert binomial(6, 2) + binomial(6, 3) == 35 == binomial(7, 3)


def test_combinatorial_identities_up_to_cap():
    for a in range(2 * SIGMA_CAP + 1):
        for b in range(-1, a + 1):
            assert binomial(a, b) + binomial(a, b + 1) == binomial(a + 1, b + 1)
        assert 2 * binomial(a, 0) + binomial(a, 1) == binomial(a + 2, 1)
        if a >= 1:
            assert 2 * binomial(a, a) + binomial(a, a - 1) == binomial(a + 2, a + 1)


# -- stencil ------------------------------------------------------------------


def test_stencil_sigma_one_is_second_difference():
    assert laplacian_stencil(1).coeffs == (-1, 2, -1)


@pytest.mark.parametrize("sigma, expected", [
    (2, [1, -4, 6, -4, 1]),
    (3, [-1, 6, -15, 20, -15, 6, -1]),
])
def test_stencil_matches_recursion_oracle(sigma, expected):
    assert recursive_stencil(sigma) == expected
    assert list(laplacian_stencil(sigma).coeffs) == expected


@pytest.mark.parametrize("sigma", range(1, SIGMA_CAP + 1))
def test_stencil_invariants(sigma):
    c = laplacian_stencil(sigma).coeffs
    assert len(c) == 2 * sigma + 1
    assert c == c[::-1]
    assert c[sigma] == binomial(2 * sigma, sigma) > 0
    assert all(c[k] * c[k + 1] < 0 for k in range(2 * sigma))
    assert sum(c) == 0
    assert sum(abs(x) for x in c) == 4 ** sigma
    assert all(isinstance(x, int) for x in c)


@pytest.mark.parametrize("sigma", [0, -1, SIGMA_CAP + 1, 1.5])
def test_stencil_rejects_bad_sigma(sigma):
    with pytest.raises(SigmaRangeError):
        laplacian_stencil(sigma)


def test_omegas():
    assert omegas(1) == (-1,)
    assert omegas(2) == (-4, 1)
    for sigma in range(1, SIGMA_CAP + 1):
        c = laplacian_stencil(sigma).coeffs
        assert omegas(sigma) == c[sigma + 1:]


# -- difference operators ------------------------------------------------------


def test_difference_of_impulse():
    d = difference(Sequence.impulse(0))
    assert d[-1] == 1 and d[0] == -1 and d.support == (-1, 0)


def test_adjoint_composed_with_difference_is_laplacian():
    dd = difference_adjoint(difference(Sequence.impulse(0)))
    assert dd == Sequence(-1, [-1, 2, -1])


@given(sequences, sequences)
def test_difference_adjointness(phi, psi):
    lhs = difference(phi).dot(psi)
    rhs = phi.dot(difference_adjoint(psi))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-9)


def test_impulse_responses():
    assert apply_laplacian_power(1, Sequence.impulse(0)) == Sequence(-1, [-1, 2, -1])
    assert apply_laplacian_power(2, Sequence.impulse(0)) == Sequence(-2, [1, -4, 6, -4, 1])


def test_constants_annihilated_in_interior():
    phi = Sequence(-50, [3.5] * 101)
    out = apply_laplacian_power(1, phi)
    assert out[0] == 0
    assert out[-51] == -3.5 and out[-50] == 3.5


@pytest.mark.parametrize("sigma", range(1, 9))
@given(phi=int_sequences)
@settings(max_examples=25)
def test_closed_form_equals_recursive_exactly(sigma, phi):
    a = apply_laplacian_power(sigma, phi, "closed_form")
    b = apply_laplacian_power(sigma, phi, "recursive")
    assert a == b
    assert a.values.dtype == np.int64 or a.is_zero


def test_unknown_mode():
    with pytest.raises(ValueError, match="mode"):
        apply_laplacian_power(1, Sequence.impulse(0), "fft")


@pytest.mark.parametrize("sigma", [1, 2, 3, 5])
@given(phi=sequences, psi=sequences)
@settings(max_examples=30)
def test_laplacian_power_self_adjoint(sigma, phi, psi):
    lhs = apply_laplacian_power(sigma, phi).dot(psi)
    rhs = phi.dot(apply_laplacian_power(sigma, psi))
    scale = 4 ** sigma * max(phi.norm() * psi.norm(), 1e-300)
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_support_grows_by_sigma():
    phi = Sequence(3, [1, 2, 3])
    out = apply_laplacian_power(3, phi)
    assert out.support == (0, 8)


# -- symbol -------------------------------------------------------------------


def test_symbol_examples():
    for sigma in range(1, 7):
        assert symbol(sigma, 0.0) == 0
    assert symbol(1, math.pi) == pytest.approx(4, abs=1e-14)
    assert symbol(2, math.pi / 2) == pytest.approx(4, abs=1e-13)


@pytest.mark.parametrize("sigma", range(1, 7))
def test_symbol_closed_form_on_grid(sigma):
    x = np.linspace(-np.pi, np.pi, 10001)
    s = symbol(sigma, x)
    assert np.max(np.abs(s - symbol_closed_form(sigma, x))) <= 1e-10 * 4 ** sigma
    assert s.min() >= -1e-12
    assert s.max() <= 4 ** sigma * (1 + 1e-12)


@given(st.floats(-50, 50), st.integers(1, 6))
def test_symbol_periodic(x, sigma):
    assert symbol(sigma, x + 2 * math.pi) == pytest.approx(symbol(sigma, x), abs=1e-9 * 4 ** sigma)


def test_essential_spectrum():
    assert essential_spectrum("w_sigma", 1) == (-2, 2)
    assert essential_spectrum("laplacian_power", 2) == (0, 16)
    assert essential_spectrum("w_sigma", 2) == (-6, 10)
    assert essential_spectrum("shifted_laplacian_power", 3) == (-64, 0)
    with pytest.raises(ValueError):
        essential_spectrum("other", 1)


# -- assembly -----------------------------------------------------------------


def test_free_tridiagonal_section():
    m = assemble_w_sigma(PolyJacobiCoefficients(1), (-2, 2))
    expected = -np.eye(5, k=1) - np.eye(5, k=-1)
    np.testing.assert_array_equal(m.to_dense(), expected)


def test_free_pentadiagonal_section():
    m = assemble_w_sigma(PolyJacobiCoefficients(2), (0, 6))
    assert m.bandwidth == 2
    np.testing.assert_array_equal(m.bands[0], 0)
    np.testing.assert_array_equal(m.bands[1], -4)
    np.testing.assert_array_equal(m.bands[2], 1)


def test_diagonal_perturbation():
    free = assemble_w_sigma(PolyJacobiCoefficients(1), (-2, 2)).to_dense()
    m = assemble_w_sigma(PolyJacobiCoefficients(1, Sequence.impulse(0, 5.0)), (-2, 2)).to_dense()
    diff = m - free
    assert diff[2, 2] == 5 and np.count_nonzero(diff) == 1


def test_deviation_entries():
    c = PolyJacobiCoefficients.from_entries(2, deviations=[(1, 0, 0.5), (2, 1, -0.25)])
    m = assemble_w_sigma(c, (-3, 5)).to_dense()
    # index n sits in row n + 3
    assert m[3, 4] == m[4, 3] == -4 + 0.5
    assert m[4, 6] == m[6, 4] == 1 - 0.25


@pytest.mark.parametrize("sigma", range(1, 7))
def test_free_section_plus_center_is_laplacian_section(sigma):
    window = (-10, 12)
    m = assemble_w_sigma(PolyJacobiCoefficients(sigma), window).add_diagonal(central_coefficient(sigma))
    np.testing.assert_array_equal(m.to_dense(), dense_laplacian_power(sigma, 23))
    np.testing.assert_array_equal(laplacian_power_section(sigma, window).to_dense(), m.to_dense())


def test_window_too_small():
    c = PolyJacobiCoefficients(1, Sequence(0, [1.0, 2.0, 3.0]))
    with pytest.raises(WindowTooSmallError, match=r"\[0, 2\]"):
        assemble_w_sigma(c, (1, 10))
    with pytest.raises(WindowTooSmallError):
        assemble_w_sigma(PolyJacobiCoefficients(3), (0, 5))


def test_banded_matrix_helpers():
    m = BandedSymmetricMatrix((np.array([1.0, 2.0, 3.0]), np.array([0.5, -0.5])))
    dense = m.to_dense()
    np.testing.assert_array_equal(dense, dense.T)
    assert m.norm_bound() >= np.abs(np.linalg.eigvalsh(dense)).max()
    ab = m.to_upper_band()
    assert ab[1].tolist() == [1, 2, 3] and ab[0, 1:].tolist() == [0.5, -0.5]
    with pytest.raises(ValueError):
        BandedSymmetricMatrix((np.zeros(3), np.zeros(3)))


# -- sandwich -----------------------------------------------------------------


def test_sandwich_unperturbed():
    b = Sequence(-1, [1.0, 2.0])
    lo, hi = sandwich_potentials(PolyJacobiCoefficients(2, b))
    assert lo == b and hi == b


def test_sandwich_single_deviation():
    c = PolyJacobiCoefficients.from_entries(1, deviations=[(1, 0, 0.5)])
    lo, hi = sandwich_potentials(c)
    assert hi == Sequence(0, [0.5, 0.5])
    assert lo == Sequence(0, [-0.5, -0.5])


def test_sandwich_ordering_example():
    c = PolyJacobiCoefficients.from_entries(1, deviations=[(1, 0, 0.5)])
    lo, hi = sandwich_potentials(c)
    window = (-5, 5)
    w = assemble_w_sigma(c, window)
    gap_plus = assemble_w_sigma(c.__class__(1, hi), window) - w
    gap_minus = w - assemble_w_sigma(c.__class__(1, lo), window)
    assert eigenvalues_symmetric(gap_plus)[0] >= -1e-10
    assert eigenvalues_symmetric(gap_minus)[0] >= -1e-10


def test_sandwich_general_band_shifts():
    # a^k_n contributes to b at n and n + k
    c = PolyJacobiCoefficients.from_entries(3, deviations=[(3, 2, -2.0)])
    _, hi = sandwich_potentials(c)
    assert hi == Sequence.from_entries({2: 2.0, 5: 2.0})
