import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from miop.errors import BoundaryZeroError, DegreeMismatchError
from miop.poly import (
    RealEtaPoly,
    Rectangle,
    chebyshev_nodes,
    count_real_zeros,
    count_zeros_rectangle,
    interpolate,
    isolate_real_zeros,
    root_bound,
    winding_number,
)

from conftest import tiny

coeff = st.integers(-50, 50).map(lambda k: mp.mpf(k) / 7)


def from_roots(roots, lead=1):
    p = RealEtaPoly((lead,))
    for r in roots:
        p = p * RealEtaPoly((-mp.mpf(r), 1))
    return p


@given(st.lists(coeff, min_size=1, max_size=9).filter(lambda c: c[-1] != 0))
def test_interpolation_recovers_polynomial(cs):
    p = RealEtaPoly(tuple(cs))
    nodes = [(x, p(x)) for x in chebyshev_nodes(-2, 3, p.degree + 3)]
    q = interpolate(nodes, p.degree)
    assert q.degree == p.degree
    assert q.distance(p) < tiny(230)


def test_interpolation_detects_wrong_degree():
    p = RealEtaPoly((1, 2, 3, 4))
    nodes = [(x, p(x)) for x in chebyshev_nodes(-1, 1, 5)]
    with pytest.raises(DegreeMismatchError):
        interpolate(nodes, 2)


def test_interpolation_rejects_non_polynomial():
    nodes = [(x, mp.exp(x)) for x in chebyshev_nodes(-1, 1, 8)]
    with pytest.raises(DegreeMismatchError):
        interpolate(nodes, 5)


def test_arithmetic_and_derivative():
    p = RealEtaPoly((1, 2))
    q = RealEtaPoly((0, 0, 3))
    assert (p * q).coeffs == (0, 0, 3, 6)
    assert (p + q).coeffs == (1, 2, 3)
    assert (p * q).derivative().coeffs == (0, 6, 18)
    assert (q - q).trimmed().degree == 0


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=7, unique=True))
def test_real_zero_count_matches_constructed_roots(rs):
    roots = [mp.mpf(r) / 4 for r in rs]
    p = from_roots(roots, lead=mp.mpf(-3) / 2)
    assert count_real_zeros(p, -6, 6) == len(roots)
    inside = [r for r in roots if 0 < r < 2]
    assert count_real_zeros(p, 0, 2) == len(inside)
    found = [z.location for z in isolate_real_zeros(p, -6, 6)]
    assert all(min(abs(f - r) for r in roots) < mp.mpf(10) ** -15 for f in found)


def test_complex_pair_has_no_real_zero():
    p = RealEtaPoly((5, 2, 1))  # (eta+1)^2 + 4
    assert count_real_zeros(p, -10, 10) == 0


def test_root_bound_contains_roots():
    p = from_roots([3, -7, "0.5"], lead=2)
    assert root_bound(p) >= 7


def test_winding_counts_zeros_in_rectangle():
    roots = [mp.mpc(0.5, 0.2), mp.mpc(1.5, -0.3), mp.mpc(3, 0)]
    f = lambda z: mp.fprod(z - r for r in roots)
    df = lambda z: mp.fsum(mp.fprod(z - s for s in roots if s is not r) for r in roots)
    rect = Rectangle(mp.mpf(0), mp.mpf(2), mp.mpf(-1), mp.mpf(1))
    assert winding_number(f, rect, df).count == 2
    assert count_zeros_rectangle(f, rect) == 2
    assert count_zeros_rectangle(f, Rectangle(mp.mpf(4), mp.mpf(5), mp.mpf(-1), mp.mpf(1)), df) == 0


def test_winding_refuses_zero_on_boundary():
    f = lambda z: z - 1
    with pytest.raises(BoundaryZeroError):
        winding_number(f, Rectangle(mp.mpf(1), mp.mpf(2), mp.mpf(-1), mp.mpf(1)))
