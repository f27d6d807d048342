import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from miop.errors import PoleError
from miop.numeric import (
    floor_half,
    gamma,
    gauss_legendre,
    ipow,
    log_qpochhammer_inf,
    loggamma,
    pochhammer,
    qpochhammer,
    real_if_close,
    to_mp,
)

from conftest import tiny


def test_gamma_known_values():
    assert abs(gamma(mp.mpf(1) / 2) - mp.sqrt(mp.pi)) < tiny(250)
    assert gamma(5) == 24
    # |Gamma(iy)|^2 = pi / (y sinh(pi y))
    y = mp.mpf("0.7")
    assert abs(abs(gamma(1j * y)) ** 2 - mp.pi / (y * mp.sinh(mp.pi * y))) < tiny(250)


@pytest.mark.parametrize("z", [0, -1, -7, mp.mpc(-3, 0)])
def test_gamma_poles_raise(z):
    with pytest.raises(PoleError):
        gamma(z)
    with pytest.raises(PoleError):
        loggamma(z)


@given(st.floats(0.1, 5), st.floats(-5, 5))
def test_loggamma_is_a_logarithm_of_gamma(re, im):
    z = mp.mpc(re, im)
    assert abs(mp.exp(loggamma(z)) / gamma(z) - 1) < tiny(240)


@given(st.floats(-4, 4), st.integers(0, 12))
def test_pochhammer_matches_gamma_ratio_and_recursion(a, n):
    a = mp.mpf(a) + mp.mpf("0.013")
    p = pochhammer(a, n)
    assert abs(p - mp.rf(a, n)) <= tiny(240) * (1 + abs(p))
    assert abs(pochhammer(a, n + 1) - p * (a + n)) <= tiny(240) * (1 + abs(p * (a + n)))


def test_qpochhammer_finite_against_product():
    a, q = mp.mpf("0.3"), mp.mpf("0.4")
    direct = mp.fprod(1 - a * q ** k for k in range(6))
    assert abs(qpochhammer(a, q, 6) - direct) < tiny(250)
    assert qpochhammer(a, q, 0) == 1


@given(st.floats(-0.95, 0.95), st.floats(0.05, 0.9))
def test_qpochhammer_infinite_functional_equation(a, q):
    a, q = mp.mpf(a), mp.mpf(q)
    # (a;q)_inf = (1 - a) (aq;q)_inf
    lhs = qpochhammer(a, q)
    rhs = (1 - a) * qpochhammer(a * q, q)
    assert abs(lhs - rhs) <= tiny(240) * (1 + abs(lhs))
    assert abs(lhs - mp.qp(a, q)) <= tiny(240) * (1 + abs(lhs))


def test_log_qpochhammer_exponentiates_to_product():
    a, q = mp.mpc("0.2", "0.5"), mp.mpf("0.35")
    assert abs(mp.exp(log_qpochhammer_inf(a, q)) - qpochhammer(a, q)) < tiny(240)


@pytest.mark.parametrize("n", [4, 12, 24])
def test_gauss_legendre_exact_on_polynomials(n):
    xs, ws = gauss_legendre(n)
    for k in range(2 * n):
        exact = mp.mpf(0) if k % 2 else mp.mpf(2) / (k + 1)
        assert abs(mp.fsum(w * x ** k for x, w in zip(xs, ws)) - exact) < tiny(240)


def test_small_helpers():
    assert ipow(mp.mpf(3), 0) == 1 and ipow(mp.mpf(3), 3) == 27
    assert [floor_half(n) for n in (-3, -1, 0, 1, 5)] == [-2, -1, 0, 0, 2]
    assert to_mp("1.5") == mp.mpf("1.5")
    assert to_mp("2+3i") == mp.mpc(2, 3)
    assert real_if_close(mp.mpc(1, mp.mpf(10) ** -200)) == 1
    assert isinstance(real_if_close(mp.mpc(1, "1e-3")), mp.mpc)
