"""Casorati determinants and the determinant matrices defining Xi_D and P_{D,n}."""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Callable, Sequence

import mpmath as mp

from .classical import FamilyParams, classical_P, eta, varphi
from .errors import IllConditionedError
from .numeric import pochhammer, qpochhammer
from .virtual import DeletionSet, TwistType, alpha_consts, as_twist, shift_tilde, virtual_xi


def shift_grid(x, n: int, gamma) -> list:
    """x_j = x + i((n+1)/2 - j) gamma for j = 1..n."""
    return [x + 1j * (mp.mpf(n + 1) / 2 - j) * gamma for j in range(1, n + 1)]


def det(rows: Sequence[Sequence]) -> object:
    """Determinant by Gaussian elimination with partial pivoting."""
    return _lu_det(rows)[0]


def det_and_bound(rows: Sequence[Sequence]) -> tuple:
    """(determinant, Hadamard bound); their ratio measures cancellation."""
    return _lu_det(rows)


def _lu_det(rows):
    n = len(rows)
    if n == 0:
        return mp.mpf(1), mp.mpf(1)
    a = [[mp.mpmathify(v) for v in r] for r in rows]
    if any(len(r) != n for r in a):
        raise ValueError("matrix is not square")
    hadamard = mp.fprod(mp.sqrt(mp.fsum(abs(v) ** 2 for v in r)) for r in a)
    sign = 1
    d = mp.mpf(1)
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[piv][k] == 0:
            return mp.mpf(0), hadamard
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        d *= a[k][k]
        for i in range(k + 1, n):
            m = a[i][k] / a[k][k]
            if m:
                for j in range(k + 1, n):
                    a[i][j] -= m * a[k][j]
    return sign * d, hadamard


def det_cofactor(rows: Sequence[Sequence]) -> object:
    """Determinant by the Leibniz expansion; an independent oracle for small sizes."""
    n = len(rows)
    if n == 0:
        return mp.mpf(1)
    total = mp.mpf(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = mp.fprod(rows[i][perm[i]] for i in range(n))
        total += -term if inv % 2 else term
    return total


def ipow_i(k: int):
    """i**k kept exact."""
    return (mp.mpf(1), mp.mpc(0, 1), mp.mpf(-1), mp.mpc(0, -1))[k % 4]


def casoratian(fs: Sequence[Callable], x, gamma, escalate: bool = True):
    """i^{n(n-1)/2} det(f_k(x_j)) over the shift grid; 1 for an empty list.

    When the Hadamard bound shows more than half the working precision is lost
    in cancellation, the whole evaluation is repeated at doubled precision.
    """
    n = len(fs)
    if n == 0:
        return mp.mpf(1)
    pts = shift_grid(x, n, gamma)
    rows = [[f(p) for f in fs] for p in pts]
    d, had = _lu_det(rows)
    if escalate and had and (d == 0 or abs(d) < mp.ldexp(had, -(mp.mp.prec // 2))):
        prec = mp.mp.prec
        with mp.workprec(2 * prec):
            pts = shift_grid(x, n, gamma)
            d2, had2 = _lu_det([[f(p) for f in fs] for p in pts])
        if had2 and abs(d2) < mp.ldexp(had2, -(2 * prec - prec // 2)):
            raise IllConditionedError("Casoratian cancels beyond doubled precision")
        d = +d2
    return ipow_i(n * (n - 1) // 2) * d


# --- r-factors, varphi_M and prefactors ----------------------------------------------

def _qfac(params: FamilyParams, t):
    return (2, 3) if as_twist(t) is TwistType.II else (0, 1)


def r_factor(params: FamilyParams, t, j: int, M: int, x):
    """r^t_j(x_j^{(M)}; lambda, M) with x the centre of the grid."""
    if not 1 <= j <= M:
        raise ValueError("need 1 <= j <= M")
    t = as_twist(t)
    shifted = shift_tilde(params, M - 1, 0) if t is TwistType.I else shift_tilde(params, 0, M - 1)
    alpha, _ = alpha_consts(shifted, t)
    kexp = mp.mpf((M - 1) ** 2) / 2 - (j - 1) * (M - j)
    pref = alpha ** (-mp.mpf(M - 1) / 2) * params.kappa ** kexp
    c = mp.mpf(M - 1) / 2
    prod = mp.mpf(1)
    if params.is_aw:
        q = params.q
        e = mp.exp(1j * x)
        qc = q ** (-c)
        for k in _qfac(params, t):
            ak = params.a[k] * qc
            prod *= qpochhammer(ak * e, q, j - 1) * qpochhammer(ak / e, q, M - j)
        prod *= mp.exp(1j * x * (M + 1 - 2 * j))
    else:
        for k in _qfac(params, t):
            ak = params.a[k] - c
            prod *= pochhammer(ak + 1j * x, j - 1) * pochhammer(ak - 1j * x, M - j)
    return pref * prod


def varphi_M(params: FamilyParams, x, M: int):
    """phi(x)^[M/2] prod_{k=1}^{M-2} (phi(x - ik gamma/2) phi(x + ik gamma/2))^[(M-k)/2]."""
    if M <= 1:
        return mp.mpf(1)
    g = params.gamma
    out = varphi(params, x) ** (M // 2)
    for k in range(1, M - 1):
        e = (M - k) // 2
        if e:
            h = 1j * k * g / 2
            out *= (varphi(params, x - h) * varphi(params, x + h)) ** e
    return out


def varphi_M_eta(params: FamilyParams, x, M: int):
    """The same function as a product of eta differences over the shift grid."""
    if M <= 1:
        return mp.mpf(1)
    pts = shift_grid(x, M, params.gamma)
    g = params.gamma
    out = mp.mpf(1)
    for j in range(1, M + 1):
        for k in range(j + 1, M + 1):
            out *= (eta(params, pts[j - 1]) - eta(params, pts[k - 1])) / varphi(params, 1j * j * g / 2)
    if params.is_aw:
        out *= mp.mpf(-2) ** (M * (M - 1) // 2)
    return out


def _prefactor(params: FamilyParams, D: DeletionSet, x, shift, jmax_I: int, jmax_II: int):
    out = mp.mpf(1)
    for ks, jmax in (((2, 3), jmax_I), ((0, 1), jmax_II)):
        for k in ks:
            for j in range(1, jmax + 1):
                if params.is_aw:
                    q = params.q
                    ak = params.a[k]
                    e = mp.exp(1j * x)
                    b = ak * q ** (-shift)
                    out *= ak ** (-j) * q ** (mp.mpf(j * (j + 1)) / 4)
                    out *= qpochhammer(b * e, q, j) * qpochhammer(b / e, q, j)
                else:
                    b = params.a[k] - shift
                    out *= pochhammer(b + 1j * x, j) * pochhammer(b - 1j * x, j)
    return out


def prefactor_A(params: FamilyParams, D: DeletionSet, x):
    return _prefactor(params, D, x, mp.mpf(D.M - 1) / 2, D.MI - 1, D.MII - 1)


def prefactor_B(params: FamilyParams, D: DeletionSet, x):
    return _prefactor(params, D, x, mp.mpf(D.M) / 2, D.MI, D.MII)


# --- determinant matrices ---------------------------------------------------------

@lru_cache(maxsize=512)
def _xi_cached(params: FamilyParams, t: TwistType, v: int, prec: int):
    return virtual_xi(params, t, v, check_range=False)


@lru_cache(maxsize=512)
def _P_cached(params: FamilyParams, n: int, prec: int):
    return classical_P(params, n)


def xi_poly(params: FamilyParams, t, v: int):
    return _xi_cached(params, as_twist(t), v, mp.mp.prec)


def P_poly(params: FamilyParams, n: int):
    return _P_cached(params, n, mp.mp.prec)


def _columns(D: DeletionSet):
    """Column order: type I labels ascending, then type II ascending (fixes the sign of Xi_D)."""
    return [(d, TwistType.I) for d in sorted(D.typeI)] + [(d, TwistType.II) for d in sorted(D.typeII)]


def build_matrix_Xi(params: FamilyParams, D: DeletionSet, x) -> list:
    M = D.M
    pts = shift_grid(x, M, params.gamma)
    rows = []
    for j, pt in enumerate(pts, start=1):
        e = eta(params, pt)
        row = []
        for d, t in _columns(D):
            r = r_factor(params, t.other, j, M, x)
            row.append(r * xi_poly(params, t, d)(e))
        rows.append(row)
    return rows


def build_matrix_P(params: FamilyParams, D: DeletionSet, n: int, x) -> list:
    M = D.M + 1
    pts = shift_grid(x, M, params.gamma)
    Pn = P_poly(params, n)
    rows = []
    for j, pt in enumerate(pts, start=1):
        e = eta(params, pt)
        rI = r_factor(params, TwistType.I, j, M, x)
        rII = r_factor(params, TwistType.II, j, M, x)
        row = []
        for d, t in _columns(D):
            r = rII if t is TwistType.I else rI
            row.append(r * xi_poly(params, t, d)(e))
        row.append(rI * rII * Pn(e))
        rows.append(row)
    return rows


def det_value_Xi(params: FamilyParams, D: DeletionSet, x):
    """Xi_D at x straight from the determinant identity."""
    M = D.M
    if M == 0:
        return mp.mpf(1)
    d = ipow_i(M * (M - 1) // 2) * det(build_matrix_Xi(params, D, x))
    return d / (varphi_M(params, x, M) * prefactor_A(params, D, x))


def det_value_P(params: FamilyParams, D: DeletionSet, n: int, x):
    """P_{D,n} at x straight from the determinant identity."""
    M = D.M
    d = ipow_i(M * (M + 1) // 2) * det(build_matrix_P(params, D, n, x))
    return d / (varphi_M(params, x, M + 1) * prefactor_B(params, D, x))
