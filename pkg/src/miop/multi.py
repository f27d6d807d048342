"""Multi-indexed systems: denominator polynomials Xi_D, eigenpolynomials P_{D,n},
the deformed potential and shift operators, norms, and the proportionality
constants and kernel relations that tie different deletion sets together.

Polynomials are produced by evaluating the determinant identities at real
sample points and interpolating in eta.  Everything runs at the active mpmath
precision; :func:`build_system` enters the parameter context itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath as mp

from .casoratian import (
    build_matrix_P,
    build_matrix_Xi,
    casoratian,
    det_and_bound,
    det_value_P,
    det_value_Xi,
    xi_poly,
    P_poly,
)
from .classical import (
    FamilyParams,
    at,
    b_nm1,
    energy,
    f_n,
    fit_eta,
    leading_coeff_c,
    norm_h,
    phi0,
    phi0_analytic,
    potential_V,
    potential_V_star,
    sample_points,
    star,
    varphi,
)
from .errors import DegenerateSystemError, ValidationError, ZeroDenominatorError
from .numeric import floor_half, pochhammer, qpochhammer, real_if_close
from .poly import RealEtaPoly
from .virtual import (
    DeletionSet,
    TwistType,
    alpha_consts,
    as_twist,
    delta_tilde,
    fb_hat,
    potential_Vprime,
    shift_tilde,
    twist,
    v_factors,
    v_factors_star,
    validate,
    virtual_energy,
)


def _eps(guard: int):
    return mp.ldexp(mp.mpf(1), -(mp.mp.prec - guard))


def _rel(a, b):
    """|a - b| relative to the larger modulus (0 when both vanish)."""
    s = max(abs(a), abs(b))
    return abs(a - b) / s if s else mp.mpf(0)


def shifted_params(params: FamilyParams, D: DeletionSet) -> FamilyParams:
    """lambda^{[M_I, M_II]}."""
    return shift_tilde(params, D.MI, D.MII)


# --- closed-form constants ----------------------------------------------------

def _pair(params: FamilyParams, t):
    i, j = as_twist(t).own
    a = params.a
    return a[i] * a[j] if params.is_aw else a[i] + a[j]


def leading_Xi(params: FamilyParams, D: DeletionSet):
    """Coefficient of eta^ell in Xi_D."""
    dI, dII = D.typeI, D.typeII
    c = mp.fprod(leading_coeff_c(twist(params, "I"), d) for d in dI)
    c *= mp.fprod(leading_coeff_c(twist(params, "II"), d) for d in dII)
    s12, s34 = _pair(params, "I"), _pair(params, "II")
    if params.is_aw:
        q = params.q
        for ds in (dI, dII):
            for j, k in itertools.combinations(range(len(ds)), 2):
                c *= q ** (mp.mpf(ds[j] - ds[k]) / 2) * (1 - q ** (ds[k] - ds[j])) / 2
        for j, d1 in enumerate(dI, start=1):
            for k, d2 in enumerate(dII, start=1):
                c *= 2 / mp.sqrt(params.b4) * q ** (j + k - 2 - mp.mpf(d1 + d2) / 2)
                c *= s34 * q ** d1 - s12 * q ** d2
    else:
        for ds in (dI, dII):
            for j, k in itertools.combinations(range(len(ds)), 2):
                c *= ds[k] - ds[j]
        for d1 in dI:
            for d2 in dII:
                c *= -s34 - d1 + s12 + d2
    return real_if_close(c * D.order_sign())


def leading_P(params: FamilyParams, D: DeletionSet, n: int):
    """Coefficient of eta^(ell+n) in P_{D,n}."""
    c = leading_Xi(params, D) * leading_coeff_c(params, n)
    s12, s34 = _pair(params, "I"), _pair(params, "II")
    if params.is_aw:
        q = params.q
        c *= q ** (2 * D.MI * D.MII)
        for s, ds in ((s12, D.typeI), (s34, D.typeII)):
            for d in ds:
                c *= q ** (mp.mpf(d + 1 - n) / 2) / mp.sqrt(s) * (1 - s * q ** (n - d - 1))
    else:
        for s, ds in ((s12, D.typeI), (s34, D.typeII)):
            for d in ds:
                c *= -s - n + d + 1
    return real_if_close(c)


def const_PD0(params: FamilyParams, D: DeletionSet):
    """A with P_{D,0}(lambda) = A Xi_D(lambda + delta)."""
    s12, s34 = _pair(params, "I"), _pair(params, "II")
    if params.is_aw:
        q = params.q
        c = q ** (2 * D.MI * D.MII)
        for s, ds in ((s12, D.typeI), (s34, D.typeII)):
            for d in ds:
                u = s * q ** (-d - 1)
                c *= (1 - u) / mp.sqrt(u)
        return real_if_close(c)
    c = mp.mpf(1)
    for s, ds in ((s12, D.typeI), (s34, D.typeII)):
        for d in ds:
            c *= -s + d + 1
    return real_if_close(c)


def const_level0(params: FamilyParams, D: DeletionSet, n: int, t="I"):
    """A (type I) or B (type II) of the level-0 reduction; the last label of type t is 0."""
    t = as_twist(t)
    own = D.typeI if t is TwistType.I else D.typeII
    oth = D.typeII if t is TwistType.I else D.typeI
    Mo, Mt = len(oth), len(own)
    so, st = _pair(params, t.other), _pair(params, t)
    if params.is_aw:
        q = params.q
        if t is TwistType.I:
            sign = (-1) ** (D.MI - 1)
        else:
            sign = (-1) ** (D.MI + D.MII - 1)
        u = st * q ** (n - 1)
        c = sign * (1 - u) / mp.sqrt(u)
        for d in own[:-1]:
            c *= q ** (-mp.mpf(d) / 2) * (1 - q ** d) * (1 - so / st * q ** (d + 1))
        c *= (so / st) ** (mp.mpf(Mo) / 2)
        for j, d in enumerate(oth, start=1):
            c *= q ** (Mt + j - mp.mpf(d) / 2)
        return real_if_close(c * _level0_order_sign(D, t))
    sign = (-1) ** (D.MII + 1) if t is TwistType.I else -1
    c = sign * (st + n - 1)
    for d in own[:-1]:
        c *= d * (-st + so + d + 1)
    return real_if_close(c * _level0_order_sign(D, t))


def _level0_order_sign(D: DeletionSet, t) -> int:
    # the constant is stated with label 0 last among its type; columns are sorted
    return D.order_sign() * level0_reduced_set(D, t).order_sign()


def level0_reduced_set(D: DeletionSet, t="I") -> DeletionSet:
    """D' for the level-0 reduction: labels of type t drop by one, the others rise."""
    t = as_twist(t)
    if t is TwistType.I:
        return DeletionSet.of([d - 1 for d in D.typeI[:-1]], [d + 1 for d in D.typeII])
    return DeletionSet.of([d + 1 for d in D.typeI], [d - 1 for d in D.typeII[:-1]])


def const_equiv(params: FamilyParams, k: int, m: int):
    """A relating Xi_{D1}(lambda + m delta~II) and Xi_{D2}(lambda + k delta~I)."""
    s12, s34 = _pair(params, "I"), _pair(params, "II")
    if params.is_aw:
        q = params.q
        r = s34 / s12
        c = (-r) ** (k * m) * q ** (mp.mpf((k - m) * (3 * k * m - (k - m - 1) * (k - m + 1))) / 12)
        c *= mp.fprod((1 - q ** j) ** (k - j) for j in range(1, k + 1))
        c /= mp.fprod((1 - q ** j) ** (m - j) for j in range(1, m + 1))
        c *= mp.fprod(qpochhammer(r * q ** (2 * j), q, 2 * k - 4 * j + 1) for j in range(1, floor_half(k) + 1))
        c /= mp.fprod(qpochhammer(q ** (2 * j) / r, q, 2 * m - 4 * j + 1) for j in range(1, floor_half(m) + 1))
        return real_if_close(c)
    c = mp.mpf((-1) ** (k * m))
    c *= mp.fprod(mp.mpf(-j) ** (k - j) for j in range(1, k + 1))
    c /= mp.fprod(mp.mpf(-j) ** (m - j) for j in range(1, m + 1))
    d = s34 - s12
    c *= mp.fprod(pochhammer(d + 2 * j, 2 * k - 4 * j + 1) for j in range(1, floor_half(k) + 1))
    c /= mp.fprod(pochhammer(-d + 2 * j, 2 * m - 4 * j + 1) for j in range(1, floor_half(m) + 1))
    return real_if_close(c)


def norm_hD(params: FamilyParams, D: DeletionSet, n: int):
    """h_{D,n} of the orthogonality relation."""
    sp = shifted_params(params, D)
    MI, MII = D.MI, D.MII
    kexp = mp.mpf(MI * (MI + 1) + MII * (MII + 1)) / 2 - 5 * MI * MII
    h = norm_h(params, n) * params.kappa ** kexp
    if MI:
        h *= alpha_consts(sp, "I")[0] ** (-MI)
    if MII:
        h *= alpha_consts(sp, "II")[0] ** (-MII)
    En = energy(params, n)
    for d, t in D.items:
        h *= En - virtual_energy(params, t, d)
    return real_if_close(h)


def phi_prefactor(params: FamilyParams, D: DeletionSet):
    """The alpha/kappa constant multiplying psi_D P_{D,n} in phi_{D,n}."""
    sp = shifted_params(params, D)
    MI, MII = D.MI, D.MII
    c = params.kappa ** (-mp.mpf(MI * (MI + 1) + MII * (MII + 1)) / 4 + mp.mpf(5 * MI * MII) / 2)
    if MI:
        c *= alpha_consts(sp, "I")[0] ** (mp.mpf(MI) / 2)
    if MII:
        c *= alpha_consts(sp, "II")[0] ** (mp.mpf(MII) / 2)
    return real_if_close(c)


# --- building the polynomials -------------------------------------------------

def _degenerate(params: FamilyParams, rows_at, probes: int = 3) -> bool:
    """True when the determinant cancels to noise at every probe point."""
    limit = mp.ldexp(mp.mpf(1), -(mp.mp.prec // 2))
    for x in sample_points(params, probes):
        d, had = det_and_bound(rows_at(x))
        if had == 0:
            continue
        if abs(d) > limit * had:
            return False
    return True


@lru_cache(maxsize=256)
def _xi_build(params: FamilyParams, D: DeletionSet, prec: int) -> RealEtaPoly:
    if D.M == 0:
        return RealEtaPoly.constant(1)
    if D.M == 1:
        d, t = D.items[0]
        return xi_poly(params, t, d)
    if _degenerate(params, lambda x: build_matrix_Xi(params, D, x)):
        raise DegenerateSystemError(
            f"Xi_{D} vanishes identically at these parameters (coinciding columns)"
        )
    return fit_eta(params, lambda x: det_value_Xi(params, D, x), D.ell())


@lru_cache(maxsize=512)
def _P_build(params: FamilyParams, D: DeletionSet, n: int, prec: int) -> RealEtaPoly:
    if D.M == 0:
        return P_poly(params, n)
    if _degenerate(params, lambda x: build_matrix_P(params, D, n, x)):
        raise DegenerateSystemError(
            f"P_{D},{n} vanishes identically at these parameters (coinciding columns)"
        )
    return fit_eta(params, lambda x: det_value_P(params, D, n, x), D.ell() + n)


def _check(params, D, do_validate):
    if do_validate:
        rep = validate(params, D)
        if not rep.ok:
            raise ValidationError(rep)


def build_Xi(params: FamilyParams, D: DeletionSet, validate: bool = True) -> RealEtaPoly:
    """Xi_D(eta; lambda) from the determinant identity."""
    _check(params, D, validate)
    return _xi_build(params, D, mp.mp.prec)


@dataclass(frozen=True)
class MIPolynomial:
    n: int
    poly: RealEtaPoly
    norm: object

    @property
    def degree(self) -> int:
        return self.poly.degree


def build_P(params: FamilyParams, D: DeletionSet, n: int, validate: bool = True) -> MIPolynomial:
    """P_{D,n}(eta; lambda) from the determinant identity, with its norm."""
    if n < 0:
        raise ValueError("n must be non-negative")
    _check(params, D, validate)
    return MIPolynomial(n, _P_build(params, D, n, mp.mp.prec), norm_hD(params, D, n))


def P_of(params: FamilyParams, D: DeletionSet, n: int) -> RealEtaPoly:
    """P_{D,n} without validation (used at shifted parameters)."""
    return _P_build(params, D, n, mp.mp.prec)


def Xi_of(params: FamilyParams, D: DeletionSet) -> RealEtaPoly:
    """Xi_D without validation (used at shifted parameters)."""
    return _xi_build(params, D, mp.mp.prec)


@dataclass(frozen=True)
class MultiIndexedSystem:
    params: FamilyParams
    D: DeletionSet
    ell: int
    shifted_params: FamilyParams
    Xi: RealEtaPoly
    Xi_delta: RealEtaPoly
    flags: tuple = field(default_factory=tuple)

    def P(self, n: int) -> MIPolynomial:
        with self.params.context():
            return build_P(self.params, self.D, n, validate=False)

    def norm(self, n: int):
        with self.params.context():
            return norm_hD(self.params, self.D, n)

    def psi(self, x):
        with self.params.context():
            return psi_D(self.params, self.D, x)


def build_system(params: FamilyParams, D: DeletionSet, validate: bool = True) -> MultiIndexedSystem:
    """Validate, build Xi_D at lambda and lambda + delta, and record degree flags."""
    with params.context():
        _check(params, D, validate)
        Xi = Xi_of(params, D)
        Xd = Xi_of(params.plus_delta(), D)
        flags = []
        ell = D.ell()
        if Xi.degree != ell:
            flags.append(f"deg Xi_D = {Xi.degree} < ell = {ell}")
        return MultiIndexedSystem(params, D, ell, shifted_params(params, D), Xi, Xd, tuple(flags))


# --- functions of x -------------------------------------------------------------

def _xi_pair(params, D, x):
    h = 1j * params.gamma / 2
    Xi = Xi_of(params, D)
    return at(params, Xi, x - h), at(params, Xi, x + h)


def psi_D(params: FamilyParams, D: DeletionSet, x):
    """phi0(x; lambda^[M_I,M_II]) / sqrt(Xi_D(x - i gamma/2) Xi_D(x + i gamma/2))."""
    lo, hi = _xi_pair(params, D, x)
    prod = real_if_close(lo * hi)
    if prod == 0:
        raise ZeroDenominatorError(f"Xi_D(x -+ i gamma/2) vanishes at x={x}")
    return phi0(shifted_params(params, D), x) / mp.sqrt(mp.re(prod))


def assemble_phi_Dn(params: FamilyParams, D: DeletionSet, n: int, x):
    """phi_{D,n}(x) from psi_D and P_{D,n}."""
    P = P_of(params, D, n)
    return phi_prefactor(params, D) * psi_D(params, D, x) * mp.re(at(params, P, x))


def potential_VD(params: FamilyParams, D: DeletionSet, x):
    """The deformed potential written with the denominator polynomial."""
    g = 1j * params.gamma
    Xi = Xi_of(params, D)
    Xd = Xi_of(params.plus_delta(), D)
    v = potential_V(shifted_params(params, D), x)
    return v * at(params, Xi, x + g / 2) / at(params, Xi, x - g / 2) * at(params, Xd, x - g) / at(params, Xd, x)


def potential_VD_star(params: FamilyParams, D: DeletionSet, x):
    return star(lambda y: potential_VD(params, D, y))(x)


def hat_potential(params: FamilyParams, seq: DeletionSet):
    """V-hat_{d_1..d_{s+1}} as a function of x; ``seq`` lists d_1..d_{s+1} in order."""
    if seq.M == 0:
        raise ValueError("need at least one deletion")
    pre = seq.prefix(seq.M - 1)
    d, t = seq.items[-1]
    sp = shift_tilde(params, pre.MI, pre.MII)
    alpha = alpha_consts(sp, t)[0]
    Xp = Xi_of(params, pre)
    Xs = Xi_of(params, seq)
    g = 1j * params.gamma

    def vhat(x):
        r = at(params, Xp, x + g / 2) / at(params, Xp, x - g / 2)
        r *= at(params, Xs, x - g) / at(params, Xs, x)
        return alpha * potential_Vprime(sp, t, x) * r

    return vhat


# --- operators on eta polynomials -----------------------------------------------

def _fit_terms(params: FamilyParams, terms, degree: int) -> RealEtaPoly:
    """Interpolate x -> sum(terms(x)); an output that cancels to rounding is the zero polynomial."""
    xs = sample_points(params, max(degree, 0) + 3)
    sums, mags = [], []
    for x in xs:
        ts = terms(x)
        sums.append(mp.fsum(ts))
        mags.append(max(abs(t) for t in ts))
    if all(abs(v) <= _eps(48) * m for v, m in zip(sums, mags)):
        return RealEtaPoly((0,))
    return fit_eta(params, lambda x: mp.fsum(terms(x)), degree)


def _F_terms(params, D, p, x):
    h = 1j * params.gamma / 2
    Xi = Xi_of(params, D)
    Xd = Xi_of(params.plus_delta(), D)
    c = 1j / (varphi(params, x) * at(params, Xi, x))
    return (
        c * at(params, Xd, x + h) * at(params, p, x - h),
        -c * at(params, Xd, x - h) * at(params, p, x + h),
    )


def forward_shift_D(params: FamilyParams, D: DeletionSet, p: RealEtaPoly) -> RealEtaPoly:
    """F_D(lambda) applied to a polynomial at lambda; the result lives at lambda + delta."""
    degree = max(p.degree - 1, D.ell())
    return _fit_terms(params, lambda x: _F_terms(params, D, p, x), degree).trimmed()


def _B_terms(params, D, p, x):
    h = 1j * params.gamma / 2
    sp = shifted_params(params, D)
    Xi = Xi_of(params, D)
    Xd = Xi_of(params.plus_delta(), D)
    c = -1j / at(params, Xd, x)
    return (
        c * potential_V(sp, x) * at(params, Xi, x + h) * varphi(params, x - h) * at(params, p, x - h),
        -c * potential_V_star(sp, x) * at(params, Xi, x - h) * varphi(params, x + h) * at(params, p, x + h),
    )


def backward_shift_D(params: FamilyParams, D: DeletionSet, p: RealEtaPoly) -> RealEtaPoly:
    """B_D(lambda) applied to a polynomial at lambda + delta; the result lives at lambda."""
    return _fit_terms(params, lambda x: _B_terms(params, D, p, x), p.degree + 1)


def _htilde_D_terms(params, D, p, x):
    g = 1j * params.gamma
    sp = shifted_params(params, D)
    Xi = Xi_of(params, D)
    Xd = Xi_of(params.plus_delta(), D)
    up, dn = at(params, Xi, x + g / 2), at(params, Xi, x - g / 2)
    x0 = at(params, Xd, x)
    p0 = at(params, p, x)
    v, vs = potential_V(sp, x) * up / dn, potential_V_star(sp, x) * dn / up
    return (
        v * at(params, p, x - g),
        -v * at(params, Xd, x - g) / x0 * p0,
        vs * at(params, p, x + g),
        -vs * at(params, Xd, x + g) / x0 * p0,
    )


def htilde_D_values(params: FamilyParams, D: DeletionSet, p: RealEtaPoly, x):
    return mp.fsum(_htilde_D_terms(params, D, p, x))


def apply_Htilde_D(params: FamilyParams, D: DeletionSet, p: RealEtaPoly) -> RealEtaPoly:
    """The square-root-free deformed Hamiltonian applied to p, re-interpolated."""
    return _fit_terms(params, lambda x: _htilde_D_terms(params, D, p, x), p.degree)


# --- identity checks -----------------------------------------------------------

def _scale_residual(lhs: list, rhs: list):
    scale = max(max(abs(v) for v in lhs), max(abs(v) for v in rhs)) or mp.mpf(1)
    return max(abs(a - b) for a, b in zip(lhs, rhs)) / scale


def eigen_residual(params: FamilyParams, D: DeletionSet, n: int, samples: int = 10):
    """max |H~_D P - E_n P| over sample x, relative to the size of the individual terms."""
    P = P_of(params, D, n)
    E = energy(params, n)
    worst = mp.mpf(0)
    for x in sample_points(params, samples):
        terms = _htilde_D_terms(params, D, P, x)
        scale = max(max(abs(t) for t in terms), abs(E * at(params, P, x)))
        worst = max(worst, abs(mp.fsum(terms) - E * at(params, P, x)) / scale)
    return worst


def eigen_coefficient_residual(params: FamilyParams, D: DeletionSet, n: int):
    """Coefficient sup-norm of H~_D P - E_n P, relative to the coefficient scale of E_n P (or P when E_n = 0)."""
    P = P_of(params, D, n)
    E = energy(params, n)
    HP = apply_Htilde_D(params, D, P)
    R = HP - P * E
    return R.scale() / (P.scale() * max(abs(E), mp.mpf(1)))


def pd0_check(params: FamilyParams, D: DeletionSet):
    """(A, residual) for P_{D,0}(lambda) = A Xi_D(lambda + delta)."""
    A = const_PD0(params, D)
    lhs = P_of(params, D, 0)
    rhs = Xi_of(params.plus_delta(), D) * A
    return A, lhs.distance(rhs)


def reduce_level0(params: FamilyParams, D: DeletionSet, n: int, t="I"):
    """(P_{D',n}(lambda + delta~t), constant, residual) for a D whose last type-t label is 0."""
    t = as_twist(t)
    labels = D.typeI if t is TwistType.I else D.typeII
    if not labels or labels[-1] != 0:
        raise ValueError(f"the last type-{t.value} label must be 0")
    lhs = P_of(params, D, n)
    Dp = level0_reduced_set(D, t)
    sp = shift_tilde(params, 1, 0) if t is TwistType.I else shift_tilde(params, 0, 1)
    red = P_of(sp, Dp, n)
    c = const_level0(params, D, n, t)
    rhs = red * c
    res = lhs.distance(rhs)
    return MIPolynomial(n, red, norm_hD(sp, Dp, n)), c, res


def equivalence_sets(k: int, m: int) -> tuple[DeletionSet, DeletionSet]:
    return (
        DeletionSet.of(range(m, m + k), ()),
        DeletionSet.of((), range(k, k + m)),
    )


def equivalence_check(params: FamilyParams, k: int, m: int, samples: int = 10):
    """(A, coefficient residual, potential residual) for the k/m equivalence."""
    if k < 1 or m < 1:
        raise ValueError("k, m >= 1")
    D1, D2 = equivalence_sets(k, m)
    p1 = shift_tilde(params, 0, m)
    p2 = shift_tilde(params, k, 0)
    X1, X2 = Xi_of(p1, D1), Xi_of(p2, D2)
    A = const_equiv(params, k, m)
    res = X1.distance(X2 * A)
    xs = sample_points(params, samples)
    v1 = [potential_VD(p1, D1, x) for x in xs]
    v2 = [potential_VD(p2, D2, x) for x in xs]
    return A, res, _scale_residual(v1, v2)


def shift_relations_residual(params: FamilyParams, D: DeletionSet, n: int):
    """Residuals of F_D P_{D,n} = f_n P_{D,n-1}(lambda+delta) and its B_D partner."""
    P = P_of(params, D, n)
    if n == 0:
        FP = forward_shift_D(params, D, P)
        return FP.scale(), mp.mpf(0)
    Pd = P_of(params.plus_delta(), D, n - 1)
    FP = forward_shift_D(params, D, P)
    rf = FP.distance(Pd * f_n(params, n))
    BP = backward_shift_D(params, D, Pd)
    b = b_nm1(params, n)
    rb = BP.distance(P * b)
    return rf, rb


def kernel_relations_check(params: FamilyParams, D: DeletionSet, v: int, t, direction: str = "up", samples: int = 10):
    """Residual of the first-order relation between Xi_{D v}(lambda) and Xi_{D v}(lambda + delta).

    ``D`` is the already-deleted set d_1..d_s and ``v`` (of type ``t``) the added
    label.  ``direction`` is "up" (lambda -> lambda + delta), "down" (the
    reverse), or "diff" for the second-order difference equation of Xi_{D v}.
    """
    t = as_twist(t)
    Dv = DeletionSet(D.items + ((v, t),))
    s = D.M
    sI, sII = D.MI, D.MII
    s_other = sII if t is TwistType.I else sI
    sp = shift_tilde(params, sI, sII)
    pd = params.plus_delta()
    g = 1j * params.gamma
    h = g / 2
    kappa = params.kappa
    XD, XDd = Xi_of(params, D), Xi_of(pd, D)
    Xv, Xvd = Xi_of(params, Dv), Xi_of(pd, Dv)
    fhat, bhat = fb_hat(params, t, s, v)
    xs = sample_points(params, samples)
    lhs, rhs = [], []
    if direction == "up":
        q = sp.shifted(delta_tilde(t))
        k = 0 if t is TwistType.I else 1
        for x in xs:
            vv = v_factors(q, x)[k]
            vs = v_factors_star(q, x)[k]
            val = vs * at(params, XDd, x + h) * at(params, Xv, x - h) - vv * at(params, XDd, x - h) * at(params, Xv, x + h)
            lhs.append(1j * val / (varphi(params, x) * at(params, XD, x)))
            rhs.append(kappa ** (-s_other) * fhat * at(pd, Xvd, x))
    elif direction == "down":
        k = 1 if t is TwistType.I else 0
        for x in xs:
            vv = v_factors(sp, x)[k]
            vs = v_factors_star(sp, x)[k]
            val = vv * at(params, XD, x + h) * at(params, Xvd, x - h) - vs * at(params, XD, x - h) * at(params, Xvd, x + h)
            lhs.append(-1j * val / (varphi(params, x) * at(params, XDd, x)))
            rhs.append(kappa ** s_other * bhat * at(params, Xv, x))
    elif direction == "diff":
        alpha = alpha_consts(sp, t)[0]
        Ev = virtual_energy(params, t, v)
        for x in xs:
            up, dn = at(params, XD, x + h), at(params, XD, x - h)
            x0 = at(params, XDd, x)
            val = alpha * potential_Vprime(sp, t, x) * up / dn * at(params, Xv, x - g)
            val += alpha * star(lambda y: potential_Vprime(sp, t, y))(x) * dn / up * at(params, Xv, x + g)
            c = potential_V(sp, x) * up / dn * at(params, XDd, x - g) / x0
            c += potential_V_star(sp, x) * dn / up * at(params, XDd, x + g) / x0
            lhs.append(val - c * at(params, Xv, x))
            rhs.append(Ev * at(params, Xv, x))
    else:
        raise ValueError("direction must be 'up', 'down' or 'diff'")
    return _scale_residual(lhs, rhs)


def hat_identity_residual(params: FamilyParams, seq: DeletionSet, samples: int = 10):
    """Residuals of both equalities tying V_D to V-hat_D (D given in deletion order)."""
    D = seq
    vhat = hat_potential(params, seq)
    vhat_s = star(vhat)
    last_d, last_t = seq.items[-1]
    Et = virtual_energy(params, last_t, last_d)
    h = 1j * params.gamma / 2
    xs = sample_points(params, samples)
    l1, r1, l2, r2 = [], [], [], []
    for x in xs:
        vd = potential_VD(params, D, x)
        l1.append(vd * potential_VD_star(params, D, x - 2 * h))
        r1.append(vhat(x - h) * vhat_s(x - h))
        l2.append(vd + potential_VD_star(params, D, x))
        r2.append(vhat(x + h) + vhat_s(x - h) - Et)
    return _scale_residual(l1, r1), _scale_residual(l2, r2)


def order_independence_residual(params: FamilyParams, D: DeletionSet, samples: int = 10):
    """Largest spread of V_D + V_D^* rebuilt through every deletion order."""
    xs = sample_points(params, samples)
    base = [potential_VD(params, D, x) + potential_VD_star(params, D, x) for x in xs]
    worst = mp.mpf(0)
    for perm in itertools.permutations(D.items):
        seq = DeletionSet(perm)
        vhat = hat_potential(params, seq)
        vhat_s = star(vhat)
        d, t = perm[-1]
        Et = virtual_energy(params, t, d)
        h = 1j * params.gamma / 2
        other = [vhat(x + h) + vhat_s(x - h) - Et for x in xs]
        worst = max(worst, _scale_residual(base, other))
        vd_perm = [potential_VD(params, seq, x) for x in xs]
        vd = [potential_VD(params, D, x) for x in xs]
        worst = max(worst, _scale_residual(vd, vd_perm))
    return worst


# --- raw Casoratian oracle ----------------------------------------------------------

def virtual_wavefunction(params: FamilyParams, t, v: int):
    """phi~_v(x) = phi0(x; t(lambda)) xi_v(eta(x)), continued off the real axis."""
    tp = twist(params, t)
    xi = xi_poly(params, t, v)
    return lambda x: phi0_analytic(tp, x) * at(params, xi, x)


def eigen_wavefunction(params: FamilyParams, n: int):
    P = P_poly(params, n)
    return lambda x: phi0_analytic(params, x) * at(params, P, x)


def _raw_funcs(params, seq: DeletionSet):
    return [virtual_wavefunction(params, t, d) for d, t in seq.items]


def raw_phi_Dn(params: FamilyParams, seq: DeletionSet, n: int, x):
    """phi_{d_1..d_s n}(x) as A(x) W[phi~_{d_1}, ..., phi~_{d_s}, phi_n](x), deletion order as given."""
    g = params.gamma
    fs = _raw_funcs(params, seq)
    s = len(fs)
    num = mp.fprod(abs(potential_V(params, x + 1j * (mp.mpf(s) / 2 - j) * g)) for j in range(s))
    Ws = casoratian(fs, x + 1j * g / 2, g)
    A = mp.sqrt(num) / abs(Ws)
    return real_if_close(A * casoratian(fs + [eigen_wavefunction(params, n)], x, g))


def raw_potential_VD_sq(params: FamilyParams, seq: DeletionSet, x):
    """V_{d_1..d_s}(x)^2 from the raw Casoratian form (branch free)."""
    g = params.gamma
    fs = _raw_funcs(params, seq)
    s = len(fs)
    pre = potential_V(params, x - 1j * s * g / 2) * potential_V_star(params, x - 1j * (s + 2) * g / 2)
    r1 = casoratian(fs, x + 1j * g / 2, g) / casoratian(fs, x - 1j * g / 2, g)
    f0 = fs + [eigen_wavefunction(params, 0)]
    r2 = casoratian(f0, x - 1j * g, g) / casoratian(f0, x, g)
    return pre * (r1 * r2) ** 2


def raw_hat_potential_sq(params: FamilyParams, seq: DeletionSet, x):
    """V-hat_{d_1..d_s}(x)^2 from the raw Casoratian form."""
    g = params.gamma
    fs = _raw_funcs(params, seq)
    s = len(fs)
    pre = potential_V(params, x - 1j * (s - 1) * g / 2) * potential_V_star(params, x - 1j * (s + 1) * g / 2)
    r1 = casoratian(fs[:-1], x + 1j * g / 2, g) / casoratian(fs[:-1], x - 1j * g / 2, g)
    r2 = casoratian(fs, x - 1j * g, g) / casoratian(fs, x, g)
    return pre * (r1 * r2) ** 2


def exceptional_pair(params: FamilyParams, ell: int, n: int):
    """(xi_ell, P_{ell,n}) of the M = 1 type-I case, built at the shifted parameters."""
    D = DeletionSet.of((ell,), ())
    sp = params.shifted(tuple(mp.mpf(ell) / 2 - d for d in delta_tilde("I")))
    xi = Xi_of(sp, D)
    P = P_of(sp, D, n)
    if params.is_aw:
        u = _pair(params, "I") * params.q ** n
        c = mp.sqrt(u) / (1 - u)
    else:
        c = -1 / (_pair(params, "I") + n)
    return xi, P * real_if_close(c)
