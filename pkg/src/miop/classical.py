"""The undeformed Wilson (W) and Askey-Wilson (AW) systems.

Parameters are stored as the four ``a_j`` (for AW these are ``q**lambda_j``),
so shifts of lambda by ``c`` act multiplicatively as ``a -> a q**c`` for AW and
additively as ``a -> a + c`` for W.  All functions run at the active mpmath
precision; build parameters with :func:`make_params` so that decimal inputs are
converted at the working precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath as mp

from .errors import DomainError, NegativeRadicandError, PoleError
from .numeric import (
    DEFAULT_BITS,
    GUARD_BITS,
    Precision,
    gamma,
    log_qpochhammer_inf,
    loggamma,
    pochhammer,
    qpochhammer,
    real_if_close,
    to_mp,
)
from .poly import RealEtaPoly, chebyshev_nodes, interpolate

FAMILIES = ("W", "AW")
HALF = mp.mpf(1) / 2


@dataclass(frozen=True)
class FamilyParams:
    family: str
    a: tuple
    q: object = None
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be W or AW, got {self.family!r}")
        if len(self.a) != 4:
            raise ValueError("need exactly four parameters a1..a4")
        if self.family == "AW":
            if self.q is None or not 0 < self.q < 1:
                raise ValueError("AW needs 0 < q < 1")

    @property
    def precision(self) -> Precision:
        return Precision(self.bits)

    def context(self):
        return mp.workprec(self.bits + GUARD_BITS)

    @property
    def is_aw(self) -> bool:
        return self.family == "AW"

    @property
    def gamma(self):
        return mp.log(self.q) if self.is_aw else mp.mpf(1)

    @property
    def kappa(self):
        return 1 / self.q if self.is_aw else mp.mpf(1)

    @property
    def x1(self):
        return mp.mpf(0)

    @property
    def x2(self):
        return mp.pi if self.is_aw else mp.inf

    @property
    def b1(self):
        return real_if_close(sum(self.a))

    @property
    def b4(self):
        a1, a2, a3, a4 = self.a
        return real_if_close(a1 * a2 * a3 * a4)

    def shifted(self, shifts: Sequence) -> "FamilyParams":
        """Parameters at ``lambda + shifts`` (shifts given in lambda units)."""
        if self.is_aw:
            a = tuple(aj * self.q ** mp.mpf(s) if s else aj for aj, s in zip(self.a, shifts))
        else:
            a = tuple(aj + mp.mpf(s) if s else aj for aj, s in zip(self.a, shifts))
        return FamilyParams(self.family, a, self.q, self.bits)

    def plus_delta(self, times: int = 1) -> "FamilyParams":
        return self.shifted((HALF * times,) * 4)

    def lam(self):
        """The lambda vector (log_q a_j for AW)."""
        if self.is_aw:
            return tuple(mp.log(aj) / mp.log(self.q) for aj in self.a)
        return self.a

    def with_precision(self, bits: int) -> "FamilyParams":
        return FamilyParams(self.family, self.a, self.q, bits)


def make_params(family: str, a: Sequence, q=None, bits: int = DEFAULT_BITS) -> FamilyParams:
    """Build parameters, converting decimal strings at the working precision."""
    with mp.workprec(bits + GUARD_BITS):
        aa = tuple(real_if_close(to_mp(v)) for v in a)
        qq = to_mp(q) if q is not None else None
    return FamilyParams(family, aa, qq, bits)


def check_admissible(params: FamilyParams) -> list[str]:
    """Violations of the basic parameter constraints (empty when admissible)."""
    out = []
    a = params.a
    conj = sorted((mp.conj(v) for v in a), key=lambda z: (mp.re(z), mp.im(z)))
    orig = sorted((mp.mpmathify(v) for v in a), key=lambda z: (mp.re(z), mp.im(z)))
    tol = mp.ldexp(mp.mpf(1), -(mp.mp.prec - 24))
    if any(abs(u - v) > tol * (1 + abs(v)) for u, v in zip(conj, orig)):
        out.append("parameter set is not closed under complex conjugation")
    if params.is_aw:
        if any(abs(v) >= 1 for v in a):
            out.append("AW needs |a_i| < 1")
    elif any(mp.re(v) <= 0 for v in a):
        out.append("W needs Re a_i > 0")
    return out


# --- sinusoidal coordinate and potential -------------------------------------

def eta(params: FamilyParams, x):
    return mp.cos(x) if params.is_aw else x * x


def varphi(params: FamilyParams, x):
    return 2 * mp.sin(x) if params.is_aw else 2 * x


def potential_V(params: FamilyParams, x):
    if params.is_aw:
        e = mp.exp(1j * x)
        den = (1 - e * e) * (1 - params.q * e * e)
        num = mp.fprod(1 - aj * e for aj in params.a)
    else:
        den = 2j * x * (2j * x + 1)
        num = mp.fprod(aj + 1j * x for aj in params.a)
    if den == 0:
        raise PoleError(f"V has a pole at x={x}")
    return num / den


def star(f: Callable) -> Callable:
    """The *-operation: f*(x) = conj(f(conj x))."""
    return lambda x: mp.conj(f(mp.conj(x)))


def potential_V_star(params: FamilyParams, x):
    return mp.conj(potential_V(params, mp.conj(x)))


# --- spectrum ----------------------------------------------------------------

def energy(params: FamilyParams, n: int):
    if params.is_aw:
        q = params.q
        return (q ** (-n) - 1) * (1 - params.b4 * q ** (n - 1))
    return n * (n + params.b1 - 1)


def f_n(params: FamilyParams, n: int):
    if params.is_aw:
        q = params.q
        return q ** (mp.mpf(n) / 2) * (q ** (-n) - 1) * (1 - params.b4 * q ** (n - 1))
    return -n * (n + params.b1 - 1)


def b_nm1(params: FamilyParams, n: int):
    """b_{n-1}(lambda), the partner of f_n in E_n = f_n b_{n-1}."""
    if params.is_aw:
        return params.q ** (-mp.mpf(n) / 2)
    return mp.mpf(-1)


def leading_coeff_c(params: FamilyParams, n: int):
    if params.is_aw:
        return 2 ** n * qpochhammer(params.b4 * params.q ** (n - 1), params.q, n)
    return (-1) ** n * pochhammer(params.b1 + n - 1, n)


# --- eigenpolynomials ---------------------------------------------------------

def _series_coeffs(params: FamilyParams, n: int):
    """Coefficients c_k of P_n = sum_k c_k B_k with B_k the factorial basis in eta.

    The normalisation (a1+a2)_n... (or a1^-n (a1a2;q)_n...) is folded into each
    term as (c+k)_{n-k}, which keeps everything finite for twisted parameters.
    """
    a1, a2, a3, a4 = params.a
    out = []
    if params.is_aw:
        q = params.q
        b4 = a1 * a2 * a3 * a4
        for k in range(n + 1):
            c = (
                qpochhammer(q ** (-n), q, k)
                * qpochhammer(b4 * q ** (n - 1), q, k)
                * q ** k
                / qpochhammer(q, q, k)
            )
            for aj in (a2, a3, a4):
                c *= qpochhammer(a1 * aj * q ** k, q, n - k)
            out.append(c * a1 ** (-n))
    else:
        b1 = a1 + a2 + a3 + a4
        for k in range(n + 1):
            c = pochhammer(-n, k) * pochhammer(n + b1 - 1, k) / mp.factorial(k)
            for aj in (a2, a3, a4):
                c *= pochhammer(a1 + aj + k, n - k)
            out.append(c)
    return out


def _basis_factor(params: FamilyParams, j: int):
    """Linear factor (in eta) multiplying B_j into B_{j+1}, as (const, slope)."""
    a1 = params.a[0]
    if params.is_aw:
        qj = params.q ** j
        return (1 + a1 * a1 * qj * qj, -2 * a1 * qj)
    return ((a1 + j) ** 2, mp.mpf(1))


def _realify(coeffs, what: str):
    scale = max((abs(c) for c in coeffs), default=mp.mpf(0))
    tol = mp.ldexp(mp.mpf(1), -(mp.mp.prec - 32))
    for c in coeffs:
        if abs(mp.im(c)) > tol * (scale or 1):
            raise DomainError(f"{what} has non-real coefficients; parameters are not conjugation closed")
    return [mp.re(c) for c in coeffs]


def classical_P(params: FamilyParams, n: int) -> RealEtaPoly:
    """P_n(eta; lambda) as an exact expansion of the terminating series in eta."""
    if n < 0:
        raise ValueError("n must be >= 0")
    cs = _series_coeffs(params, n)
    total = [mp.mpf(0)] * (n + 1)
    basis = [mp.mpf(1)]
    for k in range(n + 1):
        for i, b in enumerate(basis):
            total[i] += cs[k] * b
        if k < n:
            c0, c1 = _basis_factor(params, k)
            nxt = [mp.mpf(0)] * (len(basis) + 1)
            for i, b in enumerate(basis):
                nxt[i] += b * c0
                nxt[i + 1] += b * c1
            basis = nxt
    return RealEtaPoly(tuple(_realify(total, f"P_{n}")))


def series_P(params: FamilyParams, n: int, x):
    """Pointwise value of P_n at complex x, summing the series term by term."""
    cs = _series_coeffs(params, n)
    a1 = params.a[0]
    total = mp.mpf(0)
    prod = mp.mpf(1)
    for k in range(n + 1):
        total += cs[k] * prod
        if params.is_aw:
            qk = params.q ** k
            prod *= (1 - a1 * qk * mp.exp(1j * x)) * (1 - a1 * qk * mp.exp(-1j * x))
        else:
            prod *= (a1 + k + 1j * x) * (a1 + k - 1j * x)
    return total


# --- ground state and norms ----------------------------------------------------

def log_phi0_sq(params: FamilyParams, x):
    """log phi0(x)^2 continued analytically off the real axis.

    Sums of principal logs; along vertical paths from a point of the open
    interval no argument crosses the branch cut, so this is the analytic
    continuation of the real logarithm.  Requires real ``Re x`` inside the
    interval.
    """
    if params.is_aw:
        q = params.q
        e = mp.exp(1j * x)
        s = log_qpochhammer_inf(e * e, q) + log_qpochhammer_inf(1 / (e * e), q)
        for aj in params.a:
            s -= log_qpochhammer_inf(aj * e, q) + log_qpochhammer_inf(aj / e, q)
        return s
    s = -loggamma(2j * x) - loggamma(-2j * x)
    for aj in params.a:
        s += loggamma(aj + 1j * x) + loggamma(aj - 1j * x)
    return s


def phi0_analytic(params: FamilyParams, x):
    """phi0 at complex x, the continuation of the positive real ground state."""
    return mp.exp(log_phi0_sq(params, x) / 2)


def phi0_sq(params: FamilyParams, x):
    """phi0(x)^2 as a plain product (meromorphic, branch free)."""
    if params.is_aw:
        q = params.q
        e = mp.exp(1j * x)
        num = qpochhammer(e * e, q) * qpochhammer(1 / (e * e), q)
        den = mp.fprod(qpochhammer(aj * e, q) * qpochhammer(aj / e, q) for aj in params.a)
        return num / den
    num = mp.fprod(gamma(aj + 1j * x) * gamma(aj - 1j * x) for aj in params.a)
    return num / (gamma(2j * x) * gamma(-2j * x))


def phi0(params: FamilyParams, x):
    """Ground state on the open interval (x1, x2); positive."""
    x = mp.mpf(x)
    if not params.x1 < x < params.x2:
        raise DomainError(f"x={x} outside ({params.x1}, {params.x2})")
    v = phi0_sq(params, x)
    if abs(mp.im(v)) > mp.ldexp(abs(v), -(mp.mp.prec - 24)) or mp.re(v) <= 0:
        raise NegativeRadicandError(f"phi0^2 = {mp.nstr(v, 8)} is not positive at x={x}")
    return mp.sqrt(mp.re(v))


def norm_h(params: FamilyParams, n: int):
    a = params.a
    pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    if params.is_aw:
        q, b4 = params.q, params.b4
        v = 2 * mp.pi * qpochhammer(b4 * q ** (n - 1), q, n) * qpochhammer(b4 * q ** (2 * n), q)
        v /= qpochhammer(q ** (n + 1), q)
        for i, j in pairs:
            v /= qpochhammer(a[i] * a[j] * q ** n, q)
    else:
        b1 = params.b1
        v = 2 * mp.pi * mp.factorial(n) * pochhammer(n + b1 - 1, n)
        for i, j in pairs:
            v *= gamma(n + a[i] + a[j])
        v /= gamma(2 * n + b1)
    return real_if_close(v)


# --- sampling and operators ----------------------------------------------------

def sample_points(params: FamilyParams, count: int) -> list:
    """Real x samples whose eta values are Chebyshev nodes of the family window."""
    if params.is_aw:
        etas = chebyshev_nodes(mp.cos(mp.pi - mp.mpf("0.2")), mp.cos(mp.mpf("0.2")), count)
        return [mp.acos(e) for e in etas]
    lo = mp.mpf("0.3") ** 2
    etas = chebyshev_nodes(lo, lo + 4 + count / 2, count)
    return [mp.sqrt(e) for e in etas]


def fit_eta(params: FamilyParams, f: Callable, degree: int, held_out: int = 2) -> RealEtaPoly:
    """Polynomial in eta of the given degree through values f(x) at sample points."""
    degree = max(degree, 0)
    xs = sample_points(params, degree + 1 + held_out)
    return interpolate([(eta(params, x), f(x)) for x in xs], degree, held_out=held_out)


def at(params: FamilyParams, p: RealEtaPoly, x):
    """Evaluate an eta-polynomial at complex x."""
    return p(eta(params, x))


def forward_shift_F(params: FamilyParams, p: RealEtaPoly) -> RealEtaPoly:
    h = 1j * params.gamma / 2

    def f(x):
        return 1j / varphi(params, x) * (at(params, p, x - h) - at(params, p, x + h))

    return fit_eta(params, f, p.degree - 1)


def backward_shift_B(params: FamilyParams, p: RealEtaPoly) -> RealEtaPoly:
    """B(lambda) applied to a polynomial given at lambda + delta."""
    h = 1j * params.gamma / 2

    def f(x):
        return -1j * (
            potential_V(params, x) * varphi(params, x - h) * at(params, p, x - h)
            - potential_V_star(params, x) * varphi(params, x + h) * at(params, p, x + h)
        )

    return fit_eta(params, f, p.degree + 1)


def htilde_values(params: FamilyParams, p: RealEtaPoly, x):
    g = 1j * params.gamma
    p0 = at(params, p, x)
    return potential_V(params, x) * (at(params, p, x - g) - p0) + potential_V_star(params, x) * (
        at(params, p, x + g) - p0
    )


def apply_Htilde(params: FamilyParams, p: RealEtaPoly) -> RealEtaPoly:
    return fit_eta(params, lambda x: htilde_values(params, p, x), p.degree)
