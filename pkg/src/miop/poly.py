"""Dense real polynomials in the sinusoidal coordinate eta.

Construction is by interpolation (Newton divided differences re-expanded to
monomials), zero counting is by monotone-piece bisection on intervals and by
the argument principle on rectangles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath as mp

from .errors import (
    BoundaryZeroError,
    DegreeMismatchError,
    IllConditionedError,
    InconclusiveError,
    InterpolationError,
)
from .numeric import gauss_legendre


def _eps(g: int = 0):
    return mp.ldexp(mp.mpf(1), -(mp.mp.prec - g))


@dataclass(frozen=True)
class RealEtaPoly:
    """Polynomial ``sum_k coeffs[k] * eta**k`` with real coefficients."""

    coeffs: tuple
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(mp.mpf(c) for c in self.coeffs) or (mp.mpf(0),))

    @classmethod
    def constant(cls, c) -> "RealEtaPoly":
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    def scale(self):
        return max(abs(c) for c in self.coeffs)

    def __call__(self, z):
        acc = mp.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> "RealEtaPoly":
        if self.degree == 0:
            return RealEtaPoly((0,))
        return RealEtaPoly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def __neg__(self):
        return RealEtaPoly(tuple(-c for c in self.coeffs), self.degenerate)

    def __add__(self, other):
        if not isinstance(other, RealEtaPoly):
            other = RealEtaPoly.constant(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (mp.mpf(0),) * (n - len(self.coeffs))
        b = other.coeffs + (mp.mpf(0),) * (n - len(other.coeffs))
        return RealEtaPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, RealEtaPoly) else -other)

    def __mul__(self, other):
        if isinstance(other, RealEtaPoly):
            out = [mp.mpf(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return RealEtaPoly(tuple(out))
        return RealEtaPoly(tuple(c * other for c in self.coeffs), self.degenerate)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return RealEtaPoly(tuple(c / s for c in self.coeffs), self.degenerate)

    def trimmed(self, rel=None) -> "RealEtaPoly":
        """Drop leading coefficients that are negligible relative to the largest one."""
        rel = _eps(mp.mp.prec // 2) if rel is None else rel
        cs = list(self.coeffs)
        big = max(abs(c) for c in cs)
        dropped = False
        while len(cs) > 1 and abs(cs[-1]) <= rel * big:
            cs.pop()
            dropped = True
        return RealEtaPoly(tuple(cs), self.degenerate or dropped)

    def distance(self, other: "RealEtaPoly"):
        """Coefficient-wise sup distance relative to the larger sup norm."""
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (mp.mpf(0),) * (n - len(self.coeffs))
        b = other.coeffs + (mp.mpf(0),) * (n - len(other.coeffs))
        scale = max(self.scale(), other.scale())
        if scale == 0:
            return mp.mpf(0)
        return max(abs(x - y) for x, y in zip(a, b)) / scale

    def to_strings(self, digits: int | None = None) -> list[str]:
        digits = digits or mp.mp.dps
        return [mp.nstr(c, digits, strip_zeros=False, min_fixed=-1, max_fixed=0) for c in self.coeffs]


def eval_poly(p: RealEtaPoly, z):
    return p(z)


def _newton_to_monomial(xs, dd):
    """Expand the Newton form sum dd[k] prod_{j<k}(x - xs[j]) into monomials."""
    n = len(dd)
    coeffs = [mp.mpf(0)] * n
    coeffs[0] = dd[n - 1]
    deg = 0
    for k in range(n - 2, -1, -1):
        # coeffs <- coeffs * (x - xs[k]) + dd[k]
        new = [mp.mpf(0)] * n
        for i in range(deg + 1):
            new[i + 1] += coeffs[i]
            new[i] -= coeffs[i] * xs[k]
        new[0] += dd[k]
        coeffs = new
        deg += 1
    return coeffs


def interpolate(nodes: Sequence, expected_degree: int, held_out: int = 2, residual_guard: int = 32) -> RealEtaPoly:
    """Interpolate ``(eta_k, value_k)`` pairs by a polynomial of ``expected_degree``.

    The first ``expected_degree + 1`` nodes determine the polynomial; the next
    ``held_out`` nodes are used to confirm that the data really is polynomial of
    that degree.  Values may be complex with a negligible imaginary part.
    """
    need = expected_degree + 1
    if len(nodes) < need:
        raise ValueError(f"need at least {need} nodes, got {len(nodes)}")
    etas = [mp.mpf(mp.re(e)) for e, _ in nodes]
    vals = [mp.mpmathify(v) for _, v in nodes]
    vscale = max(abs(v) for v in vals)
    imag = max(abs(mp.im(v)) for v in vals)
    if vscale and imag > _eps(residual_guard) * vscale:
        raise InterpolationError(f"sample values are not real (|imag|/scale = {mp.nstr(imag / vscale, 5)})")
    vals = [mp.re(v) for v in vals]

    xs, ys = etas[:need], vals[:need]
    dd = list(ys)
    for k in range(1, need):
        for i in range(need - 1, k - 1, -1):
            den = xs[i] - xs[i - k]
            if den == 0:
                raise IllConditionedError("repeated interpolation node")
            dd[i] = (dd[i] - dd[i - 1]) / den
    coeffs = _newton_to_monomial(xs, dd)

    etamax = max(abs(e) for e in etas) or mp.mpf(1)
    if vscale:
        growth = sum(abs(c) * etamax ** k for k, c in enumerate(coeffs)) / vscale
        if growth > 0 and mp.log(growth, 2) > mp.mp.prec / 2:
            raise IllConditionedError(f"interpolation amplifies values by 2^{int(mp.log(growth, 2))}")

    poly = RealEtaPoly(tuple(coeffs))
    scale = vscale or mp.mpf(1)
    for e, v in zip(etas[need: need + held_out], vals[need: need + held_out]):
        r = abs(poly(e) - v)
        # monomial evaluation at a held-out node loses up to the term growth
        term = max(abs(c) * abs(e) ** k for k, c in enumerate(coeffs))
        if r > _eps(residual_guard) * max(scale, term):
            raise DegreeMismatchError(
                f"held-out residual {mp.nstr(r / max(scale, term), 5)} exceeds tolerance for degree {expected_degree}"
            )
    return poly.trimmed()


def chebyshev_nodes(lo, hi, count: int) -> list:
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    return [
        (lo + hi) / 2 + (hi - lo) / 2 * mp.cos(mp.pi * (2 * k + 1) / (2 * count))
        for k in range(count)
    ]


def root_bound(p: RealEtaPoly):
    """Cauchy bound on the moduli of the roots."""
    lead = p.leading
    if lead == 0:
        raise ValueError("leading coefficient is zero")
    return 1 + max((abs(c / lead) for c in p.coeffs[:-1]), default=mp.mpf(0))


@dataclass
class RealZero:
    location: object
    multiple: bool = False


def _sign(v, tol):
    if abs(v) <= tol:
        return 0
    return 1 if v > 0 else -1


def _bisect(p, lo, hi, width):
    flo = p(lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = p(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def isolate_real_zeros(p: RealEtaPoly, a, b) -> list[RealZero]:
    """Zeros of ``p`` in the open interval (a, b), located to width 2^-64 (b-a).

    The interval is cut at the real critical points (found recursively on the
    derivative) so that each piece is monotone and holds at most one zero.
    """
    a, b = mp.mpf(a), mp.mpf(b)
    if not a < b:
        raise ValueError("need a < b")
    if all(c == 0 for c in p.coeffs):
        raise ValueError("zero polynomial")
    width = mp.ldexp(b - a, -64)
    return _zeros(p.trimmed(_eps(8)), a, b, width)


def _zeros(p, a, b, width):
    if p.degree == 0:
        return []
    crit = [z.location for z in _zeros(p.derivative().trimmed(_eps(8)), a, b, width)]
    cuts = [a] + crit + [b]
    scale = max(abs(c) * max(abs(a), abs(b), mp.mpf(1)) ** k for k, c in enumerate(p.coeffs))
    tol = _eps(mp.mp.prec // 4) * scale
    out = []
    for c in crit:
        if abs(p(c)) <= tol:
            out.append(RealZero(c, multiple=True))
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo <= width:
            continue
        slo, shi = _sign(p(lo), tol), _sign(p(hi), tol)
        if slo * shi < 0:
            out.append(RealZero(_bisect(p, lo, hi, width)))
        elif slo == 0 and shi == 0:
            raise InconclusiveError("polynomial is numerically zero on a whole monotone piece")
    out.sort(key=lambda z: z.location)
    # a zero at a cut point may be reported twice
    merged = []
    for z in out:
        if merged and abs(z.location - merged[-1].location) <= 4 * width:
            merged[-1].multiple = merged[-1].multiple or z.multiple
            continue
        merged.append(z)
    return [z for z in merged if a < z.location < b]


def count_real_zeros(p: RealEtaPoly, a, b) -> int:
    """Number of distinct zeros of ``p`` in (a, b)."""
    return len(isolate_real_zeros(p, a, b))


@dataclass(frozen=True)
class Rectangle:
    x_lo: object
    x_hi: object
    y_lo: object
    y_hi: object

    def contains(self, z) -> bool:
        z = mp.mpmathify(z)
        return self.x_lo <= mp.re(z) <= self.x_hi and self.y_lo <= mp.im(z) <= self.y_hi

    def corners(self):
        return [
            mp.mpc(self.x_lo, self.y_lo),
            mp.mpc(self.x_hi, self.y_lo),
            mp.mpc(self.x_hi, self.y_hi),
            mp.mpc(self.x_lo, self.y_hi),
        ]


@dataclass
class WindingResult:
    count: int
    raw: object
    panels: int
    min_boundary_modulus: object = field(default=None)


def _boundary_samples(rect: Rectangle, per_side: int):
    pts = []
    cs = rect.corners()
    for k in range(4):
        z0, z1 = cs[k], cs[(k + 1) % 4]
        for j in range(per_side):
            pts.append(z0 + (z1 - z0) * mp.mpf(j) / per_side)
    return pts


def winding_number(
    f: Callable,
    rect: Rectangle,
    df: Callable | None = None,
    panels: int = 32,
    max_panels: int = 4096,
    order: int = 16,
) -> WindingResult:
    """Winding number of ``f`` around the boundary of ``rect``.

    With a derivative, ``(1/2 pi i) \\oint f'/f`` is integrated by composite
    Gauss-Legendre; without one, principal-argument increments between
    consecutive boundary samples are summed.  Either way the panel count is
    doubled until the result stabilises near an integer.
    """
    samples = _boundary_samples(rect, 4 * panels)
    values = [abs(f(z)) for z in samples]
    vmax, vmin = max(values), min(values)
    if vmax == 0 or vmin <= _eps(mp.mp.prec // 2) * vmax:
        raise BoundaryZeroError(f"|f| on the boundary drops to {mp.nstr(vmin, 5)}")

    prev = None
    n = panels
    while n <= max_panels:
        raw = _contour_integral(f, df, rect, n, order) if df else _phase_sum(f, rect, n)
        if raw is not None:
            near = mp.nint(raw)
            if prev is not None and abs(raw - prev) < 1e-6 and abs(raw - near) < 0.25:
                return WindingResult(int(near), raw, n, vmin)
            prev = raw
        n *= 2
    raise InconclusiveError("winding number did not stabilise")


def _contour_integral(f, df, rect, panels, order):
    xs, ws = gauss_legendre(order)
    total = mp.mpc(0)
    cs = rect.corners()
    for k in range(4):
        z0, z1 = cs[k], cs[(k + 1) % 4]
        h = (z1 - z0) / panels
        for p in range(panels):
            za = z0 + h * p
            for x, w in zip(xs, ws):
                z = za + h * (x + 1) / 2
                total += w * h / 2 * df(z) / f(z)
    return mp.re(total / (2j * mp.pi))


def _phase_sum(f, rect, panels):
    pts = _boundary_samples(rect, panels * 8)
    vals = [f(z) for z in pts]
    total = mp.mpf(0)
    for k in range(len(vals)):
        step = mp.arg(vals[(k + 1) % len(vals)] / vals[k])
        if abs(step) > mp.pi / 4:
            return None
        total += step
    return total / (2 * mp.pi)


def count_zeros_rectangle(f: Callable, rect: Rectangle, df: Callable | None = None) -> int:
    """Number of zeros of the analytic function ``f`` inside ``rect``."""
    return winding_number(f, rect, df).count
