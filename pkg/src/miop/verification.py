"""Numerical verification: weighted quadrature, Gram matrices, zero counts of the
eigenpolynomials, and the rectangular-domain scan behind the hermiticity argument.

Also bundles the identity checks of :mod:`miop.multi` into named suites that
produce a :class:`VerificationReport`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import mpmath as mp

from .casoratian import casoratian, shift_grid
from .classical import (
    FamilyParams,
    at,
    check_admissible,
    classical_P,
    eta,
    phi0_sq,
    potential_V,
    sample_points,
    star,
    varphi,
)
from .errors import (
    DegenerateSystemError,
    InconclusiveError,
    MiopError,
    NonConvergedError,
    ZeroDenominatorError,
)
from .numeric import gauss_legendre, real_if_close
from .poly import RealEtaPoly, Rectangle, count_real_zeros, root_bound, winding_number
from .virtual import DeletionSet, alpha_consts, potential_Vprime, validate
from . import multi


# --- reports --------------------------------------------------------------------

@dataclass
class Check:
    name: str
    target: object
    measured: object
    tolerance: object
    mode: str = "abs"
    note: str = ""

    @property
    def passed(self) -> bool:
        if self.measured is None:
            return False
        if self.mode == "eq":
            return self.measured == self.target
        diff = abs(self.measured - self.target)
        if self.mode == "rel":
            scale = abs(self.target) or mp.mpf(1)
            return diff <= self.tolerance * scale
        return diff <= self.tolerance

    def as_dict(self) -> dict:
        def s(v):
            if v is None or isinstance(v, (int, str, bool)):
                return v
            return mp.nstr(v, 30)

        return {
            "name": self.name,
            "target": s(self.target),
            "measured": s(self.measured),
            "tolerance": s(self.tolerance),
            "mode": self.mode,
            "pass": self.passed,
            "note": self.note,
        }


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, *args, **kwargs) -> Check:
        c = Check(*args, **kwargs)
        self.checks.append(c)
        return c

    def failed(self, name: str, note: str) -> Check:
        return self.add(name, 0, None, 0, "abs", note)

    def extend(self, other: "VerificationReport"):
        self.checks.extend(other.checks)

    def as_dict(self) -> dict:
        return {"pass": self.passed, "metadata": self.metadata, "checks": [c.as_dict() for c in self.checks]}


# --- quadrature ---------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre settings.

    ``x_max`` fixes the W cutoff; when None it is chosen where the integrand
    has fallen below 2^-(bits+16) of its peak.  ``endpoint_offset`` is used
    only for the AW endpoint-limit check, since Gauss nodes never touch the ends.
    """

    panels: int = 16
    order: int = 24
    x_max: object = None
    endpoint_offset: object = mp.ldexp(1, -24)
    rel_tol: object = mp.mpf("1e-30")
    max_panels: int = 1024


@dataclass
class QuadResult:
    values: list
    error: object
    panels: int
    x_max: object
    tail: object = mp.mpf(0)


def weight_psi_sq(params: FamilyParams, D: DeletionSet, x):
    """psi_D(x)^2 for real x, without square roots."""
    sp = multi.shifted_params(params, D)
    h = 1j * params.gamma / 2
    Xi = multi.Xi_of(params, D)
    den = real_if_close(at(params, Xi, x - h) * at(params, Xi, x + h))
    if den == 0:
        raise ZeroDenominatorError(f"Xi_D(x -+ i gamma/2) vanishes at x={x}")
    return mp.re(phi0_sq(sp, x)) / mp.re(den)


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _composite(g, a, b, panels, order):
    xs, ws = gauss_legendre(order)
    h = (b - a) / panels
    total = absval = None
    for p in range(panels):
        lo = a + p * h
        for x, w in zip(xs, ws):
            vals = g(lo + h * (x + 1) / 2)
            if total is None:
                total = [mp.mpf(0)] * len(vals)
                absval = [mp.mpf(0)] * len(vals)
            for k, v in enumerate(vals):
                total[k] += w * v
                absval[k] += w * abs(v)
    return [t * h / 2 for t in total], [t * h / 2 for t in absval]


def _w_cutoff(params, g, bits):
    peak = mp.mpf(0)
    x = mp.mpf(1)
    limit = mp.ldexp(mp.mpf(1), -(bits + 16))
    while True:
        v = max(abs(u) for u in g(x))
        peak = max(peak, v)
        if x > 4 and v < limit * peak:
            return x
        if x > 2000:
            raise NonConvergedError("W integrand does not decay")
        x += 2


def integrate_weighted(params: FamilyParams, D: DeletionSet, f: Callable, spec: QuadratureSpec | None = None) -> QuadResult:
    """int_{x1}^{x2} psi_D(x)^2 f(x) dx; ``f`` may return a list of values."""
    spec = spec or QuadratureSpec()

    def g(x):
        w = weight_psi_sq(params, D, x)
        return [w * mp.re(v) for v in _as_list(f(x))]

    tail = mp.mpf(0)
    if params.is_aw:
        a, b = mp.mpf(0), mp.pi
        edge = spec.endpoint_offset
        for x in (a + edge, b - edge):
            if weight_psi_sq(params, D, x) > mp.sqrt(edge):
                raise NonConvergedError("AW weight does not vanish at the interval ends")
    else:
        a = mp.mpf(0)
        b = mp.mpf(spec.x_max) if spec.x_max is not None else _w_cutoff(params, g, params.bits)
        gb = g(b)
        gb1 = g(b - 1)
        # beyond b the integrand decays at least like exp(-rate (x - b))
        rate = max(mp.log(abs(u) / abs(v)) for u, v in zip(gb1, gb) if v != 0) if any(v != 0 for v in gb) else mp.inf
        if rate != mp.inf:
            tail = max(abs(v) for v in gb) / max(rate, mp.mpf(1))

    panels = spec.panels
    prev, _ = _composite(g, a, b, panels, spec.order)
    while panels < spec.max_panels:
        panels *= 2
        cur, mag = _composite(g, a, b, panels, spec.order)
        err = max(abs(u - v) for u, v in zip(cur, prev))
        # tolerance relative to the integral of |integrand|, so vanishing integrals converge too
        scale = max(mag) or mp.mpf(1)
        if err <= spec.rel_tol * scale:
            return QuadResult(cur, err + tail, panels, b, tail)
        prev = cur
    raise NonConvergedError("panel doubling did not stabilise the integral")


def gram_matrix(params: FamilyParams, D: DeletionSet, n_max: int, spec: QuadratureSpec | None = None, tol=mp.mpf("1e-20")):
    """(G, report) with G[n][m] = int psi_D^2 P_{D,n} P_{D,m}."""
    Ps = [multi.P_of(params, D, n) for n in range(n_max + 1)]

    def f(x):
        e = eta(params, x)
        vals = [p(e) for p in Ps]
        return [vals[i] * vals[j] for i in range(n_max + 1) for j in range(i, n_max + 1)]

    res = integrate_weighted(params, D, f, spec)
    N = n_max + 1
    G = [[mp.mpf(0)] * N for _ in range(N)]
    k = 0
    for i in range(N):
        for j in range(i, N):
            G[i][j] = G[j][i] = res.values[k]
            k += 1
    rep = VerificationReport(metadata={"quadrature_panels": res.panels, "x_max": mp.nstr(res.x_max, 10), "error": mp.nstr(res.error, 5)})
    hs = [multi.norm_hD(params, D, n) for n in range(N)]
    for i in range(N):
        rep.add(f"gram[{i},{i}] = h_D,{i}", hs[i], G[i][i], tol, "rel")
        for j in range(i + 1, N):
            rep.add(f"gram[{i},{j}] / sqrt(h_{i} h_{j})", 0, G[i][j] / mp.sqrt(abs(hs[i] * hs[j])), tol, "abs")
    return G, rep


def oscillation_check(params: FamilyParams, D: DeletionSet, n: int) -> int:
    """Zeros of P_{D,n} in the orthogonality range (eta in (0, inf) or (-1, 1))."""
    P = multi.P_of(params, D, n)
    if P.degree == 0:
        return 0
    if params.is_aw:
        lo, hi = mp.mpf(-1), mp.mpf(1)
    else:
        lo, hi = mp.mpf(0), root_bound(P) + 1
    tol = mp.ldexp(P.scale(), -(mp.mp.prec // 2))
    if abs(P(lo)) <= tol or abs(P(hi)) <= tol:
        raise InconclusiveError("P_{D,n} vanishes at the end of the range")
    return count_real_zeros(P, lo, hi)


def domain_rectangle(params: FamilyParams, Xi: RealEtaPoly) -> Rectangle:
    """D_gamma, cut off for W beyond the modulus of every zero of Xi(eta(x))."""
    half = abs(params.gamma) / 2
    if params.is_aw:
        return Rectangle(mp.mpf(0), mp.pi, -half, half)
    R = root_bound(Xi) if Xi.degree > 0 else mp.mpf(1)
    return Rectangle(mp.mpf(0), mp.sqrt(R) + 1, -half, half)


def xi_zero_count(params: FamilyParams, D: DeletionSet) -> int:
    """Argument-principle count of zeros of Xi_D(eta(x)) in D_gamma."""
    Xi = multi.Xi_of(params, D)
    if Xi.degree == 0:
        return 0
    dXi = Xi.derivative()
    if params.is_aw:
        deta = lambda z: -mp.sin(z)
    else:
        deta = lambda z: 2 * z
    f = lambda z: Xi(eta(params, z))
    df = lambda z: dXi(eta(params, z)) * deta(z)
    return winding_number(f, domain_rectangle(params, Xi), df).count


def xi_real_zero_count(params: FamilyParams, D: DeletionSet) -> int:
    """Zeros of Xi_D(eta) for x in [x1, x2], i.e. eta in [0, inf) (W) or [-1, 1] (AW)."""
    Xi = multi.Xi_of(params, D)
    if Xi.degree == 0:
        return 0
    lo, hi = (mp.mpf(-1), mp.mpf(1)) if params.is_aw else (mp.mpf(0), root_bound(Xi) + 1)
    pad = mp.ldexp(hi - lo, -40)
    return count_real_zeros(Xi, lo - pad, hi + pad)


def _G(params, D, n, m, x):
    sp = multi.shifted_params(params, D)
    h = 1j * params.gamma / 2
    Xi = multi.Xi_of(params, D)
    Pn, Pm = multi.P_of(params, D, n), multi.P_of(params, D, m)
    w = potential_V(sp, x + h) * phi0_sq(sp, x + h)
    return w / at(params, Xi, x) ** 2 * at(params, Pn, x + h) * at(params, Pm, x - h)


def boundary_symmetry(params: FamilyParams, D: DeletionSet, n: int = 1, m: int = 0, points: int = 5):
    """max |G(x_b + iy) - G*(x_b - iy)| / |G| over the finite edges of D_gamma."""
    half = abs(params.gamma) / 2
    edges = [mp.mpf(0), mp.pi] if params.is_aw else [mp.mpf(0)]
    G = lambda z: _G(params, D, n, m, z)
    Gs = star(G)
    worst = mp.mpf(0)
    for xb in edges:
        for k in range(1, points + 1):
            y = half * k / (points + 1)
            a, b = G(xb + 1j * y), Gs(xb - 1j * y)
            s = max(abs(a), abs(b))
            if s:
                worst = max(worst, abs(a - b) / s)
    return worst


@dataclass
class HermiticityResult:
    zero_count: object
    pole_free: bool
    boundary_residual: object
    verdict: str
    reasons: list = field(default_factory=list)


def hermiticity_scan(params: FamilyParams, D: DeletionSet) -> HermiticityResult:
    """Sufficient-condition scan: Xi_D zero-free on D_gamma and V phi0^2 pole-free there.

    When zeros are present the residue criterion is not evaluated; the verdict
    is then "not established".
    """
    reasons = []
    rep = validate(params, D)
    if not rep.ok:
        reasons.extend(rep.failures)
    sp = multi.shifted_params(params, D)
    pole_violations = check_admissible(sp)
    pole_free = not pole_violations
    reasons.extend(f"shifted parameters: {v}" for v in pole_violations)
    try:
        count = xi_zero_count(params, D)
    except DegenerateSystemError as exc:
        return HermiticityResult(None, pole_free, None, "not established", reasons + [str(exc)])
    if count:
        reasons.append(f"Xi_D has {count} zero(s) in D_gamma; residue cancellation not evaluated")
    try:
        bres = boundary_symmetry(params, D)
    except MiopError as exc:
        bres = None
        reasons.append(f"boundary check failed: {exc}")
    tol = mp.ldexp(mp.mpf(1), -(mp.mp.prec // 2))
    if bres is not None and bres > tol:
        reasons.append(f"boundary symmetry residual {mp.nstr(bres, 5)}")
    ok = not reasons
    return HermiticityResult(count, pole_free, bres, "hermitian-sufficient" if ok else "not established", reasons)


# --- identities at the level of the original system -----------------------

def _test_functions(params: FamilyParams, count: int):
    """Analytic test functions: eta-polynomials of increasing degree times a common factor."""
    fs = []
    for k in range(count):
        P = classical_P(params, k + 1)
        fs.append(lambda x, P=P: at(params, P, x) + mp.mpf(k) / 3)
    return fs


def casoratian_identity_residuals(params: FamilyParams, n: int = 2, samples: int = 6):
    """Residuals of the Casoratian product rule and of the nested-Casoratian identity."""
    g = params.gamma
    fs = _test_functions(params, n + 2)
    w = lambda x: mp.exp(x / 3) * (x + 2)
    xs = sample_points(params, samples)
    l1, r1, l2, r2 = [], [], [], []
    for x in xs:
        gf = [lambda y, f=f: w(y) * f(y) for f in fs[:n]]
        l1.append(casoratian(gf, x, g))
        r1.append(mp.fprod(w(p) for p in shift_grid(x, n, g)) * casoratian(fs[:n], x, g))
        base, gg, hh = fs[: n - 1], fs[n - 1], fs[n]
        Wg = lambda y: casoratian(base + [gg], y, g)
        Wh = lambda y: casoratian(base + [hh], y, g)
        l2.append(casoratian([Wg, Wh], x, g))
        r2.append(casoratian(base, x, g) * casoratian(base + [gg, hh], x, g))
    return multi._scale_residual(l1, r1), multi._scale_residual(l2, r2)


def ground_state_shift_residual(params: FamilyParams, samples: int = 8):
    """phi0(x; lambda+delta)^2 against varphi(x)^2 V(x + i gamma/2) phi0(x + i gamma/2)^2."""
    h = 1j * params.gamma / 2
    pd = params.plus_delta()
    xs = sample_points(params, samples)
    lhs = [phi0_sq(pd, x) for x in xs]
    rhs = [varphi(params, x) ** 2 * potential_V(params, x + h) * phi0_sq(params, x + h) for x in xs]
    return multi._scale_residual(lhs, rhs)


def potential_shift_residual(params: FamilyParams, samples: int = 8):
    """V(x; lambda+delta) against kappa^-1 varphi(x - i gamma)/varphi(x) V(x - i gamma/2)."""
    g = 1j * params.gamma
    pd = params.plus_delta()
    xs = sample_points(params, samples)
    lhs = [potential_V(pd, x) for x in xs]
    rhs = [varphi(params, x - g) / varphi(params, x) * potential_V(params, x - g / 2) / params.kappa for x in xs]
    return multi._scale_residual(lhs, rhs)


def twist_relation_residuals(params: FamilyParams, t, samples: int = 8):
    """Residuals of V V*(x - i gamma) = alpha^2 V' V'*(x - i gamma) and V + V* = alpha (V' + V'*) - alpha'."""
    alpha, alpha_p = alpha_consts(params, t)
    g = 1j * params.gamma
    Vs = star(lambda y: potential_V(params, y))
    Vp = lambda y: potential_Vprime(params, t, y)
    Vps = star(Vp)
    xs = sample_points(params, samples)
    l1 = [potential_V(params, x) * Vs(x - g) for x in xs]
    r1 = [alpha ** 2 * Vp(x) * Vps(x - g) for x in xs]
    l2 = [potential_V(params, x) + Vs(x) for x in xs]
    r2 = [alpha * (Vp(x) + Vps(x)) - alpha_p for x in xs]
    return multi._scale_residual(l1, r1), multi._scale_residual(l2, r2)


def foundation_suite(params: FamilyParams) -> VerificationReport:
    """Identities of the undeformed system that the deformation relies on."""
    tol = _tol200()
    rep = VerificationReport(metadata={"suite": "foundation"})

    def cas():
        r1, r2 = casoratian_identity_residuals(params)
        rep.add("Casoratian product rule", 0, r1, tol)
        rep.add("nested Casoratian identity", 0, r2, tol)

    def shifts():
        rep.add("phi0(lambda+delta)^2 relation", 0, ground_state_shift_residual(params), tol)
        rep.add("V(lambda+delta) relation", 0, potential_shift_residual(params), tol)

    def twists():
        for t in ("I", "II"):
            r1, r2 = twist_relation_residuals(params, t)
            rep.add(f"type {t} twist: product relation", 0, r1, tol)
            rep.add(f"type {t} twist: sum relation", 0, r2, tol)

    for name, fn in (("Casoratian identities", cas), ("shift relations", shifts), ("twist relations", twists)):
        _guard(rep, name, fn)
    return rep


LEVEL0_SETS = (
    ("0I", "I"),
    ("2I,0I", "I"),
    ("1I,0I,1II", "I"),
    ("0II", "II"),
    ("2II,0II", "II"),
    ("1I,1II,0II", "II"),
)


def reduction_suite(params: FamilyParams, n_values=(0, 2), km=((1, 1), (1, 2), (2, 1), (2, 2))) -> VerificationReport:
    """Label-0 reductions and the type I / type II equivalence.

    Both need parameters with a1 + a2 != a3 + a4 (a1a2 != a3a4 for AW); on the
    symmetric locus the equivalent denominators vanish identically.
    """
    tol = _tol200()
    rep = VerificationReport(metadata={"suite": "reductions"})

    def level0():
        for text, t in LEVEL0_SETS:
            D = DeletionSet.parse(text)
            for n in n_values:
                _, c, r = multi.reduce_level0(params, D, n, t)
                rep.add(f"label-0 reduction {D} n={n}", 0, r, tol)

    def equiv():
        for k, m in km:
            _, r, rv = multi.equivalence_check(params, k, m)
            rep.add(f"equivalence k={k} m={m}: Xi", 0, r, tol)
            rep.add(f"equivalence k={k} m={m}: V_D", 0, rv, tol)

    _guard(rep, "label-0 reductions", level0)
    _guard(rep, "equivalence", equiv)
    return rep


# --- suites --------------------------------------------------------------------

def _tol200():
    return mp.ldexp(mp.mpf(1), -200)


def _guard(rep: VerificationReport, name: str, fn):
    try:
        fn()
    except (MiopError, ZeroDivisionError) as exc:
        rep.failed(name, f"{type(exc).__name__}: {exc}")


def identities_suite(params: FamilyParams, D: DeletionSet, n_max: int = 4) -> VerificationReport:
    """Degree law, leading coefficients, eigen-equations, shift relations and kernel relations."""
    tol = _tol200()
    rep = VerificationReport(metadata={"suite": "identities"})

    def degree_and_lead():
        Xi = multi.Xi_of(params, D)
        ell = D.ell()
        rep.add("deg Xi_D = ell", ell, Xi.degree, 0, "eq")
        rep.add("leading Xi_D", multi.leading_Xi(params, D), Xi.leading, mp.mpf("1e-30"), "rel")
        for n in range(n_max + 1):
            P = multi.P_of(params, D, n)
            rep.add(f"deg P_D,{n} = ell+{n}", ell + n, P.degree, 0, "eq")
            rep.add(f"leading P_D,{n}", multi.leading_P(params, D, n), P.leading, mp.mpf("1e-30"), "rel")

    def eigen():
        for n in range(n_max + 1):
            rep.add(f"H~_D P_D,{n} = E_{n} P_D,{n}", 0, multi.eigen_residual(params, D, n), tol)

    def shifts():
        for n in range(n_max + 1):
            rf, rb = multi.shift_relations_residual(params, D, n)
            rep.add(f"F_D P_D,{n}", 0, rf, tol)
            if n:
                rep.add(f"B_D P_D,{n - 1}(lambda+delta)", 0, rb, tol)

    def pd0():
        A, r = multi.pd0_check(params, D)
        rep.add("P_D,0 = A Xi_D(lambda+delta)", 0, r, tol)

    def hats():
        if D.M:
            r1, r2 = multi.hat_identity_residual(params, D)
            rep.add("V_D V_D*(x-i gamma) = Vhat Vhat*", 0, r1, tol)
            rep.add("V_D + V_D* = Vhat + Vhat* - E~", 0, r2, tol)
            rep.add("order independence of V_D", 0, multi.order_independence_residual(params, D), tol)

    def kernels():
        if D.M:
            pre = D.prefix(D.M - 1)
            v, t = D.items[-1]
            for d in ("up", "down", "diff"):
                rep.add(f"kernel relation ({d}) for {v}{t.value} after {pre}", 0, multi.kernel_relations_check(params, pre, v, t, d), tol)

    def raw():
        if 1 <= D.M <= 2:
            rep.add("raw Casoratian vs interpolation", 0, raw_oracle_residual(params, D, n_max=min(n_max, 2)), mp.ldexp(1, -190))

    rep.extend(foundation_suite(params))
    for name, fn in (
        ("degree law", degree_and_lead),
        ("eigen-equation", eigen),
        ("shift relations", shifts),
        ("P_D,0 relation", pd0),
        ("potential identities", hats),
        ("kernel relations", kernels),
        ("raw oracle", raw),
    ):
        _guard(rep, name, fn)
    return rep


def raw_oracle_residual(params: FamilyParams, D: DeletionSet, n_max: int = 2, points: int = 10, seed: int = 7):
    """Largest relative gap between phi_{D,n}, V_D^2 built both ways at random x (up to sign for phi)."""
    import random

    rng = random.Random(seed)
    if params.is_aw:
        xs = [mp.mpf(rng.uniform(0.15, 3.0)) for _ in range(points)]
    else:
        xs = [mp.mpf(rng.uniform(0.3, 4.0)) for _ in range(points)]
    worst = mp.mpf(0)
    for x in xs:
        for n in range(n_max + 1):
            a = multi.assemble_phi_Dn(params, D, n, x)
            r = multi.raw_phi_Dn(params, D, n, x)
            worst = max(worst, multi._rel(abs(a), abs(r)))
        v = multi.potential_VD(params, D, x) ** 2
        worst = max(worst, multi._rel(v, multi.raw_potential_VD_sq(params, D, x)))
    return worst


def ortho_suite(params: FamilyParams, D: DeletionSet, n_max: int = 4, spec: QuadratureSpec | None = None) -> VerificationReport:
    rep = VerificationReport(metadata={"suite": "ortho"})

    def gram():
        _, g = gram_matrix(params, D, n_max, spec)
        rep.extend(g)
        rep.metadata.update(g.metadata)

    def osc():
        for n in range(n_max + 1):
            rep.add(f"zeros of P_D,{n} in range", n, oscillation_check(params, D, n), 0, "eq")

    _guard(rep, "gram matrix", gram)
    _guard(rep, "oscillation", osc)
    return rep


def hermiticity_suite(params: FamilyParams, D: DeletionSet) -> VerificationReport:
    rep = VerificationReport(metadata={"suite": "hermiticity"})
    try:
        h = hermiticity_scan(params, D)
    except MiopError as exc:
        rep.failed("hermiticity scan", f"{type(exc).__name__}: {exc}")
        return rep
    rep.metadata.update({"verdict": h.verdict, "reasons": h.reasons})
    rep.add("zeros of Xi_D in D_gamma", 0, h.zero_count, 0, "eq")
    rep.add("V phi0^2 pole free at shifted parameters", True, h.pole_free, 0, "eq")
    rep.add("verdict", "hermitian-sufficient", h.verdict, 0, "eq", "; ".join(h.reasons))
    return rep


SUITES = ("identities", "ortho", "hermiticity", "all")


def run_suite(params: FamilyParams, D: DeletionSet, suite: str = "all", n_max: int = 4) -> VerificationReport:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    rep = VerificationReport(
        metadata={
            "family": params.family,
            "params": [mp.nstr(a, 30) for a in params.a],
            "q": None if params.q is None else mp.nstr(params.q, 30),
            "deletions": D.label(),
            "precision_bits": params.bits,
            "suite": suite,
        }
    )
    with params.context():
        parts = []
        if suite in ("identities", "all"):
            parts.append(identities_suite(params, D, n_max))
        if suite in ("ortho", "all"):
            parts.append(ortho_suite(params, D, n_max))
        if suite in ("hermiticity", "all"):
            parts.append(hermiticity_suite(params, D))
        for p in parts:
            rep.extend(p)
            rep.metadata.setdefault("details", {}).update({p.metadata.get("suite"): {k: v for k, v in p.metadata.items() if k != "suite"}})
    return rep
