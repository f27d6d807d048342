import mpmath as mp
import pytest

from miop.classical import classical_P, eta, make_params
from miop.virtual import DeletionSet
from miop import multi
from miop import verification as V

from conftest import tiny

W1 = make_params("W", (1, 1, 1, 1))
W2 = make_params("W", (2, 2, 2, 2))
AWS = make_params("AW", ("0.05",) * 4, "0.1")
EMPTY = DeletionSet()


def test_ground_state_integral_is_pi_over_three():
    with W1.context():
        r = V.integrate_weighted(W1, EMPTY, lambda x: 1)
        assert abs(r.values[0] / (mp.pi / 3) - 1) < mp.mpf(10) ** -20
        assert r.error < mp.mpf(10) ** -20


def test_panel_halving_changes_result_less_than_error_estimate():
    with W1.context():
        P2 = classical_P(W1, 2)
        f = lambda x: P2(eta(W1, x)) ** 2
        r = V.integrate_weighted(W1, EMPTY, f)
        g = lambda x: [V.weight_psi_sq(W1, EMPTY, x) * f(x)]
        finer, _ = V._composite(g, mp.mpf(0), r.x_max, 2 * r.panels, V.QuadratureSpec().order)
        assert abs(finer[0] - r.values[0]) <= r.error


def test_odd_integrand_vanishes_for_symmetric_askey_wilson_weight():
    p = make_params("AW", ("0.3", "-0.3", "0.2", "-0.2"), "0.4")
    with p.context():
        r = V.integrate_weighted(p, EMPTY, lambda x: mp.cos(x))
        assert abs(r.values[0]) < mp.mpf(10) ** -30


def test_orthogonality_single_deletion():
    D = DeletionSet.parse("1I")
    with W2.context():
        P0, P1 = multi.P_of(W2, D, 0), multi.P_of(W2, D, 1)
        r = V.integrate_weighted(W2, D, lambda x: P0(eta(W2, x)) * P1(eta(W2, x)))
        h0, h1 = multi.norm_hD(W2, D, 0), multi.norm_hD(W2, D, 1)
        assert abs(r.values[0]) < mp.mpf(10) ** -20 * mp.sqrt(h0 * h1)


@pytest.mark.parametrize("p,d,nmax", [(W1, "", 2), (W2, "1I", 3), (AWS, "1I", 3)])
def test_gram_matrix(p, d, nmax):
    D = DeletionSet.parse(d)
    with p.context():
        G, rep = V.gram_matrix(p, D, nmax)
        assert rep.passed, [c.as_dict() for c in rep.checks if not c.passed]
        assert len(G) == nmax + 1 and G[0][1] == G[1][0]


def test_oscillation_counts():
    D = DeletionSet.parse("1I")
    with W2.context():
        assert V.oscillation_check(W2, D, 0) == 0
        assert V.oscillation_check(W2, D, 3) == 3
        for n in range(5):
            assert V.oscillation_check(W1, EMPTY, n) == n
    with AWS.context():
        for n in range(4):
            assert V.oscillation_check(AWS, D, n) == n


def test_hermiticity_scan_examples():
    with W2.context():
        h = V.hermiticity_scan(W2, DeletionSet.parse("1I"))
        assert h.zero_count == 0 and h.pole_free and h.verdict == "hermitian-sufficient"
        assert h.boundary_residual < tiny(100)
        assert V.hermiticity_scan(W2, EMPTY).zero_count == 0
    bad = make_params("W", ("0.8", 2, 2, 2))
    with bad.context():
        h = V.hermiticity_scan(bad, DeletionSet.parse("1I"))
        assert h.verdict == "not established" and h.reasons
    with W2.context():
        h = V.hermiticity_scan(W2, DeletionSet.parse("1I,1II"))
        assert h.verdict == "not established"


def test_zero_count_sees_zeros_inside_the_strip():
    # a1 + a2 < 2 puts the type-I virtual polynomial's zero inside D_gamma
    p = make_params("W", ("0.3", "0.4", "2", "2"))
    D = DeletionSet.parse("1I")
    with p.context():
        Xi = multi.Xi_of(p, D)
        root = -Xi.coeffs[0] / Xi.coeffs[1]
        expected = 1 if root > 0 or mp.sqrt(-root) < 0.5 else 0
        assert V.xi_zero_count(p, D) == expected


def test_report_logic():
    rep = V.VerificationReport()
    rep.add("abs", 0, mp.mpf("1e-10"), mp.mpf("1e-9"))
    rep.add("rel", 100, mp.mpf(101), mp.mpf("0.02"), "rel")
    rep.add("eq", 3, 3, 0, "eq")
    assert rep.passed
    rep.failed("crash", "boom")
    assert not rep.passed
    d = rep.as_dict()
    assert d["pass"] is False and d["checks"][-1]["note"] == "boom"


@pytest.mark.parametrize("p", [W2, make_params("W", ("2.3", "2.1", "2.6", "1.9")), make_params("AW", ("0.05", "0.04", "0.03", "0.06"), "0.3")])
def test_foundation_identities(p):
    with p.context():
        rep = V.foundation_suite(p)
        assert rep.passed, [c.as_dict() for c in rep.checks if not c.passed]


def test_reduction_suite_generic_and_symmetric():
    p = make_params("W", ("2.3", "2.1", "2.6", "1.9"))
    with p.context():
        assert V.reduction_suite(p).passed
    with W2.context():
        # on a1 + a2 = a3 + a4 the equivalent denominators vanish identically
        assert not V.reduction_suite(W2).passed


def test_identities_suite_full():
    with W2.context():
        rep = V.identities_suite(W2, DeletionSet.parse("1I,2I"), 4)
        assert rep.passed, [c.as_dict() for c in rep.checks if not c.passed]
