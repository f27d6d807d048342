"""Arbitrary-precision scalars and the special functions the formulas need.

All values are ``mpmath`` numbers.  Precision is carried by :class:`Precision`
and activated with :meth:`Precision.context`; the module-level functions run at
whatever ``mpmath`` precision is active when they are called.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp

from .errors import DivergenceError, PoleError

DEFAULT_BITS = 256
# extra bits carried internally on top of the requested precision
GUARD_BITS = 32


@dataclass(frozen=True)
class Precision:
    bits: int = DEFAULT_BITS
    guard: int = GUARD_BITS

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError(f"precision must be at least 64 bits, got {self.bits}")

    @property
    def work_bits(self) -> int:
        return self.bits + self.guard

    def context(self):
        return mp.workprec(self.work_bits)

    def tol(self, g: int) -> mp.mpf:
        """Tolerance ``2**-(bits - g)``."""
        return mp.ldexp(mp.mpf(1), -(self.bits - g))


def to_mp(value):
    """Convert a string/number into an mpf, or an mpc when it has an imaginary part."""
    if isinstance(value, (mp.mpf, mp.mpc)):
        return value
    if isinstance(value, str):
        s = value.strip().replace(" ", "")
        if s.endswith(("i", "j")):
            return mp.mpmathify(s[:-1] + "j")
        return mp.mpf(s)
    if isinstance(value, complex):
        return mp.mpc(value)
    return mp.mpf(value)


def real_if_close(z, rel=None):
    """Drop an imaginary part that is negligible relative to ``|z|``."""
    if not isinstance(z, mp.mpc):
        return z
    if rel is None:
        rel = mp.ldexp(mp.mpf(1), -(mp.mp.prec - 24))
    if abs(z.imag) <= rel * abs(z):
        return z.real
    return z


def conj(z):
    return mp.conj(z) if isinstance(z, mp.mpc) else z


def _is_nonpositive_integer(z) -> bool:
    z = mp.mpmathify(z)
    if isinstance(z, mp.mpc):
        if z.imag != 0:
            return False
        z = z.real
    return z <= 0 and z == mp.floor(z)


def gamma(z):
    """Euler's Gamma function at the active precision."""
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z}")
    return mp.gamma(z)


def loggamma(z):
    """Principal branch of log Gamma, analytic off the non-positive real axis."""
    if _is_nonpositive_integer(z):
        raise PoleError(f"log Gamma has a pole at {z}")
    return mp.loggamma(z)


def pochhammer(a, n: int):
    """Rising factorial ``(a)_n``."""
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    out = mp.mpf(1)
    for k in range(n):
        out *= a + k
    return out


def qpochhammer_terms(a, q) -> int:
    """Number of factors after which the infinite q-product tail is negligible.

    Uses ``|log prod_{k>K}(1 - a q^k)| <= 2|a| q^(K+1) / (1 - q)``, valid once
    ``|a| q^(K+1) <= 1/2``.
    """
    aa = abs(a)
    if aa == 0:
        return 0
    target = mp.ldexp(mp.mpf(1), -(mp.mp.prec + 8))
    lq = mp.log(q)
    # smallest K with 2|a| q^(K+1)/(1-q) < target
    k = (mp.log(target * (1 - q) / (2 * aa)) / lq) - 1
    k = max(int(mp.ceil(k)), 0)
    while aa * q ** (k + 1) > 0.5:
        k += 1
    return k + 1


def qpochhammer(a, q, n: int | None = None):
    """q-shifted factorial ``(a;q)_n``; ``n=None`` gives the infinite product."""
    if n is not None:
        if n < 0:
            raise ValueError("qpochhammer needs n >= 0")
        out = mp.mpf(1)
        qk = mp.mpf(1)
        for _ in range(n):
            out *= 1 - a * qk
            qk *= q
        return out
    if not 0 < q < 1:
        raise DivergenceError(f"infinite q-product needs 0 < q < 1, got q={q}")
    return qpochhammer(a, q, qpochhammer_terms(a, q))


def log_qpochhammer_inf(a, q):
    """Sum of principal logs of the factors of ``(a;q)_inf``.

    Along paths where no factor crosses the negative real axis this is the
    analytic continuation of ``log (a;q)_inf``.
    """
    if not 0 < q < 1:
        raise DivergenceError(f"infinite q-product needs 0 < q < 1, got q={q}")
    total = mp.mpf(0)
    qk = mp.mpf(1)
    for _ in range(qpochhammer_terms(a, q)):
        total += mp.log(1 - a * qk)
        qk *= q
    return total


def ipow(base, e: int):
    """Integer power that keeps exact unity for e == 0."""
    if e == 0:
        return mp.mpf(1)
    return base ** e


def floor_half(n: int) -> int:
    return math.floor(n / 2)


_GL_CACHE: dict[tuple[int, int], tuple[list, list]] = {}


def gauss_legendre(n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    key = (n, mp.mp.prec)
    if key in _GL_CACHE:
        return _GL_CACHE[key]
    nodes, weights = [], []
    eps = mp.ldexp(mp.mpf(1), -(mp.mp.prec - 4))
    for k in range(1, n + 1):
        x = mp.cos(mp.pi * (4 * k - 1) / (4 * n + 2))
        for _ in range(100):
            p0, p1 = mp.mpf(1), x
            for j in range(2, n + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = n * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) < eps:
                break
        p0, p1 = mp.mpf(1), x
        for j in range(2, n + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        dp = n * (x * p1 - p0) / (x * x - 1)
        nodes.append(x)
        weights.append(2 / ((1 - x * x) * dp * dp))
    _GL_CACHE[key] = (nodes, weights)
    return nodes, weights
