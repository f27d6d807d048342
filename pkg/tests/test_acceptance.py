"""Acceptance criteria 1-8.

Each test prints one line ``CRITERION k: PASS|FAIL ...`` and the lines are
repeated in the pytest terminal summary.  Run directly with
``python3 tests/test_acceptance.py`` for the bare summary.

The test matrix contains W lambda=(2,2,2,2) with D={1I,1II}.  There
a1+a2 = a3+a4, so the type I and type II virtual states coincide and Xi_D is
identically zero; the criteria that include this entry fail for it and say so.
"""

import sys

import mpmath as mp
import pytest

from miop.classical import apply_Htilde, classical_P, energy, make_params
from miop.errors import DegenerateSystemError, MiopError
from miop.virtual import DeletionSet, validate
from miop import multi
from miop import verification as V

RESULTS = {}

W2 = make_params("W", (2, 2, 2, 2))
AWS = make_params("AW", ("0.05",) * 4, "0.1")
MATRIX = [(W2, d) for d in ("", "1I", "2I", "1I,2I", "1I,1II")] + [(AWS, d) for d in ("", "1I")]
# label-0 reductions and the type I/II equivalence need a1+a2 != a3+a4 (a1a2 != a3a4); see criterion 5
GENERIC = [make_params("W", ("2.3", "2.1", "2.6", "1.9")), make_params("AW", ("0.05", "0.04", "0.03", "0.06"), "0.3")]

T200 = mp.ldexp(mp.mpf(1), -200)
T190 = mp.ldexp(mp.mpf(1), -190)
E20 = mp.mpf(10) ** -20
E30 = mp.mpf(10) ** -30


def name(p, d):
    D = DeletionSet.parse(d)
    return f"{p.family}{tuple(float(a) for a in p.a)}{'' if p.q is None else f' q={float(p.q)}'} D={D}"


def run_case(label, fn, failures):
    """Evaluate fn() -> (ok, detail); engine errors count as failures."""
    try:
        ok, detail = fn()
    except DegenerateSystemError as exc:
        ok, detail = False, f"degenerate: {exc}"
    except (MiopError, ZeroDivisionError) as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    if not ok:
        failures.append(f"{label}: {detail}")
    return ok


def report(k, title, failures, worst=None):
    status = "PASS" if not failures else "FAIL"
    extra = f" (worst {mp.nstr(worst, 3)})" if worst is not None else ""
    line = f"CRITERION {k}: {status} {title}{extra}"
    if failures:
        line += " | " + "; ".join(failures)
    RESULTS[k] = line
    print(line)
    return not failures


class Worst:
    def __init__(self):
        self.v = mp.mpf(0)

    def __call__(self, r):
        self.v = max(self.v, r)
        return r


def test_criterion_1_classical_norm():
    p = make_params("W", (1, 1, 1, 1))
    failures, w = [], Worst()
    D = DeletionSet()
    with p.context():
        def ground():
            r = V.integrate_weighted(p, D, lambda x: 1)
            rel = w(abs(r.values[0] / (mp.pi / 3) - 1))
            return rel < E20, f"int phi0^2 = {mp.nstr(r.values[0], 25)}, rel err {mp.nstr(rel, 3)}"

        def gram():
            G, rep = V.gram_matrix(p, D, 3, tol=E20)
            for n in range(4):
                w(abs(G[n][n] / multi.norm_hD(p, D, n) - 1))
            return rep.passed, "; ".join(c.name for c in rep.checks if not c.passed)

        run_case("h0 = pi/3", ground, failures)
        run_case("Gram diagonal n=0..3", gram, failures)
    assert report(1, "classical norm h0 = pi/3 and Gram diagonal n<=3 at 1e-20", failures, w.v)


def test_criterion_2_eigen_equations():
    failures, w = [], Worst()
    for p, d in MATRIX:
        D = DeletionSet.parse(d)
        with p.context():
            for n in range(5):
                def one(n=n):
                    r = w(multi.eigen_coefficient_residual(p, D, n))
                    if not D.M:
                        P = classical_P(p, n)
                        R = apply_Htilde(p, P) - P * energy(p, n)
                        r = max(r, w(R.scale() / (P.scale() * max(abs(energy(p, n)), 1))))
                    return r < T200, f"residual {mp.nstr(r, 3)}"

                run_case(f"{name(p, d)} n={n}", one, failures)
    assert report(2, "H~_D P_D,n = E_n P_D,n for n<=4, residual < 2^-200 * scale", failures, w.v)


def test_criterion_3_degree_law():
    failures, w = [], Worst()
    for p, d in MATRIX:
        D = DeletionSet.parse(d)
        with p.context():
            def one():
                Xi = multi.build_Xi(p, D)
                bad = []
                if Xi.degree != D.ell():
                    bad.append(f"deg Xi {Xi.degree} != {D.ell()}")
                if w(abs(Xi.leading / multi.leading_Xi(p, D) - 1)) > E30:
                    bad.append("leading Xi")
                for n in range(5):
                    P = multi.P_of(p, D, n)
                    if P.degree != D.ell() + n:
                        bad.append(f"deg P_{n} {P.degree}")
                    if w(abs(P.leading / multi.leading_P(p, D, n) - 1)) > E30:
                        bad.append(f"leading P_{n}")
                return not bad, ", ".join(bad)

            run_case(name(p, d), one, failures)
    assert report(3, "deg Xi_D = ell, deg P_D,n = ell+n, leading coefficients to 1e-30", failures, w.v)


def test_criterion_4_orthogonality():
    failures, w = [], Worst()
    for p, d in MATRIX:
        D = DeletionSet.parse(d)
        with p.context():
            def one():
                G, rep = V.gram_matrix(p, D, 4, tol=E20)
                for c in rep.checks:
                    if c.mode == "rel":
                        w(abs(c.measured / c.target - 1))
                    else:
                        w(abs(c.measured))
                return rep.passed, "; ".join(c.name for c in rep.checks if not c.passed)

            run_case(name(p, d), one, failures)
    assert report(4, "Gram matrix n<=4 equals diag(h_D,n), off-diagonals < 1e-20 sqrt(h_n h_m)", failures, w.v)


def test_criterion_5_identity_web():
    failures, w = [], Worst()
    params_seen = []
    for p, d in MATRIX:
        if p not in params_seen:
            params_seen.append(p)
    for p in params_seen + GENERIC:
        with p.context():
            rep = V.foundation_suite(p)
            for c in rep.checks:
                if c.measured is not None:
                    w(c.measured)
                if not c.passed:
                    failures.append(f"{name(p, '')}: {c.name} {c.note}")
    for p in GENERIC:
        with p.context():
            rep = V.reduction_suite(p)
            for c in rep.checks:
                if c.measured is not None:
                    w(c.measured)
                if not c.passed:
                    failures.append(f"{name(p, '')}: {c.name} {c.note}")
    # per-system identities: P_D,0 relation, F_D/B_D relations, kernel relations and difference equations
    systems = [(p, d) for p, d in MATRIX if d] + [(GENERIC[0], "1I,1II"), (GENERIC[0], "2I,1II"), (GENERIC[1], "1I,1II")]
    for p, d in systems:
        D = DeletionSet.parse(d)
        with p.context():
            def one():
                bad = []
                _, r = multi.pd0_check(p, D)
                if w(r) > T200:
                    bad.append("P_D,0 = A Xi_D(lambda+delta)")
                for n in range(5):
                    rf, rb = multi.shift_relations_residual(p, D, n)
                    if max(w(rf), w(rb)) > T200:
                        bad.append(f"F_D/B_D n={n}")
                for s in range(D.M):
                    pre = D.prefix(s)
                    v, t = D.items[s]
                    for direction in ("up", "down", "diff"):
                        if w(multi.kernel_relations_check(p, pre, v, t, direction)) > T200:
                            bad.append(f"kernel {direction} {v}{t.value} after {pre}")
                return not bad, ", ".join(bad)

            run_case(name(p, d), one, failures)
    assert report(5, "identity web residuals < 2^-200 * scale", failures, w.v)


def test_criterion_6_oscillation():
    failures = []
    for p, d in MATRIX:
        D = DeletionSet.parse(d)
        with p.context():
            if not validate(p, D).ok:
                continue

            def one():
                counts = [V.oscillation_check(p, D, n) for n in range(5)]
                return counts == list(range(5)), f"zero counts {counts}"

            run_case(name(p, d), one, failures)
    assert report(6, "P_D,n has n zeros in the orthogonality range for n<=4", failures)


def test_criterion_7_hermiticity():
    failures, w = [], Worst()
    for p, d in MATRIX:
        D = DeletionSet.parse(d)
        with p.context():
            def one():
                c = V.xi_zero_count(p, D)
                return c == 0, f"{c} zero(s) of Xi_D in D_gamma"

            run_case(name(p, d), one, failures)
            if D.M >= 2:
                def order():
                    r = w(multi.order_independence_residual(p, D, samples=10))
                    return r < T200, f"order dependence {mp.nstr(r, 3)}"

                run_case(f"{name(p, d)} order", order, failures)
    assert report(7, "Xi_D zero-free on D_gamma; V_D independent of deletion order", failures, w.v)


def test_criterion_8_raw_casoratian():
    failures, w = [], Worst()
    for p, d in MATRIX:
        D = DeletionSet.parse(d)
        if D.M > 2:
            continue
        with p.context():
            def one():
                r = w(V.raw_oracle_residual(p, D, n_max=4, points=10, seed=11))
                return r < T190, f"relative gap {mp.nstr(r, 3)}"

            run_case(name(p, d), one, failures)
    assert report(8, "interpolated Xi_D, P_D,n agree with raw Casoratian to 2^-190 at 10 random x", failures, w.v)


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)


def test_supplement_generic_mixed_deletion():
    """Not an acceptance criterion: the mixed-type checks of criteria 2-4 and 6-8
    at generic W parameters, where {1I,1II} is non-degenerate."""
    p, D = GENERIC[0], DeletionSet.parse("1I,1II")
    failures, w = [], Worst()
    with p.context():
        def one():
            bad = []
            Xi = multi.build_Xi(p, D)
            if Xi.degree != D.ell() or abs(Xi.leading / multi.leading_Xi(p, D) - 1) > E30:
                bad.append("degree law")
            for n in range(5):
                if w(multi.eigen_coefficient_residual(p, D, n)) > T200:
                    bad.append(f"eigen n={n}")
            _, rep = V.gram_matrix(p, D, 4, tol=E20)
            if not rep.passed:
                bad.append("Gram")
            if [V.oscillation_check(p, D, n) for n in range(5)] != list(range(5)):
                bad.append("oscillation")
            if V.xi_zero_count(p, D) != 0 or w(multi.order_independence_residual(p, D)) > T200:
                bad.append("hermiticity/order")
            if w(V.raw_oracle_residual(p, D, n_max=4)) > T190:
                bad.append("raw Casoratian")
            return not bad, ", ".join(bad)

        run_case(name(p, "1I,1II"), one, failures)
    line = f"SUPPLEMENT (generic W, D={{1I,1II}}): {'PASS' if not failures else 'FAIL'} (worst {mp.nstr(w.v, 3)})"
    if failures:
        line += " | " + "; ".join(failures)
    RESULTS[9] = line
    print(line)
    assert not failures
