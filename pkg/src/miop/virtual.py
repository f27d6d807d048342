"""Twists, virtual-state polynomials and deletion sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import mpmath as mp

from .classical import (
    FamilyParams,
    check_admissible,
    classical_P,
    potential_V,
)
from .errors import RangeError, SignError
from .numeric import real_if_close
from .poly import RealEtaPoly, count_real_zeros

HALF = mp.mpf(1) / 2


class TwistType(Enum):
    I = "I"
    II = "II"

    @property
    def other(self) -> "TwistType":
        return TwistType.II if self is TwistType.I else TwistType.I

    @property
    def own(self) -> tuple[int, int]:
        """Indices of the twisted pair of parameters."""
        return (0, 1) if self is TwistType.I else (2, 3)

    @property
    def rest(self) -> tuple[int, int]:
        return self.other.own


def as_twist(t) -> TwistType:
    return t if isinstance(t, TwistType) else TwistType(str(t))


def delta_tilde(t) -> tuple:
    t = as_twist(t)
    return (-HALF, -HALF, HALF, HALF) if t is TwistType.I else (HALF, HALF, -HALF, -HALF)


def shift_tilde(params: FamilyParams, mI: int = 0, mII: int = 0) -> FamilyParams:
    """lambda + mI delta~I + mII delta~II."""
    dI, dII = delta_tilde("I"), delta_tilde("II")
    return params.shifted(tuple(mI * u + mII * v for u, v in zip(dI, dII)))


def twist(params: FamilyParams, t) -> FamilyParams:
    """lambda_i -> 1 - lambda_i on the twisted pair."""
    t = as_twist(t)
    a = list(params.a)
    for i in t.own:
        a[i] = params.q / a[i] if params.is_aw else 1 - a[i]
    return FamilyParams(params.family, tuple(a), params.q, params.bits)


def _pair_products(params: FamilyParams, t):
    t = as_twist(t)
    i, j = t.own
    k, m = t.rest
    a = params.a
    if params.is_aw:
        return real_if_close(a[i] * a[j]), real_if_close(a[k] * a[m])
    return real_if_close(a[i] + a[j]), real_if_close(a[k] + a[m])


def alpha_consts(params: FamilyParams, t, check: bool = False):
    """(alpha, alpha') of the linear relation H = alpha H' + alpha'."""
    own, rest = _pair_products(params, t)
    if params.is_aw:
        q = params.q
        alpha = own / q
        alpha_p = -(1 - own / q) * (1 - rest)
    else:
        alpha = mp.mpf(1)
        alpha_p = -(own - 1) * rest
    if check:
        if not (mp.im(alpha) == 0 and alpha > 0):
            raise SignError(f"alpha = {alpha} is not positive")
        if not (mp.im(alpha_p) == 0 and alpha_p < 0):
            raise SignError(f"alpha' = {alpha_p} is not negative")
    return alpha, alpha_p


def potential_Vprime(params: FamilyParams, t, x):
    return potential_V(twist(params, t), x)


def virtual_energy(params: FamilyParams, t, v: int):
    own, rest = _pair_products(params, t)
    if params.is_aw:
        q = params.q
        return -(1 - own * q ** (-v - 1)) * (1 - rest * q ** v)
    return -(own - v - 1) * (rest + v)


def index_bound(params: FamilyParams, t) -> int:
    """Largest allowed label: [lambda_i + lambda_j - 1]' for the twisted pair."""
    own, _ = _pair_products(params, t)
    if params.is_aw:
        if mp.im(own) != 0 or own <= 0:
            return 0
        s = mp.log(own) / mp.log(params.q) - 1
    else:
        s = mp.re(own) - 1
    # greatest integer strictly below s
    return int(mp.ceil(s)) - 1


def index_range(params: FamilyParams, t) -> range:
    return range(1, max(index_bound(params, t), 0) + 1)


def virtual_xi(params: FamilyParams, t, v: int, check_range: bool = True) -> RealEtaPoly:
    """xi_v(eta; lambda) = P_v(eta; twisted lambda)."""
    if check_range and v != 0 and v not in index_range(params, t):
        raise RangeError(f"v={v} outside the virtual index set of type {as_twist(t).value}")
    return classical_P(twist(params, t), v)


def v_factors(params: FamilyParams, x):
    a = params.a
    if params.is_aw:
        e = mp.exp(1j * x)
        return (1 - a[0] * e) * (1 - a[1] * e) / e, (1 - a[2] * e) * (1 - a[3] * e) / e
    return (a[0] + 1j * x) * (a[1] + 1j * x), (a[2] + 1j * x) * (a[3] + 1j * x)


def v_factors_star(params: FamilyParams, x):
    v1, v2 = v_factors(params, mp.conj(x))
    return mp.conj(v1), mp.conj(v2)


def fb_hat(params: FamilyParams, t, s: int, v: int):
    own, rest = _pair_products(params, t)
    if params.is_aw:
        q = params.q
        f = -q ** (mp.mpf(v - s) / 2) * (1 - own * q ** (-v - 1))
        b = -q ** (-mp.mpf(v - s) / 2) * (1 - rest * q ** v)
        return f, b
    return own - v - 1, rest + v


# --- deletion sets --------------------------------------------------------------

@dataclass(frozen=True)
class DeletionSet:
    """Ordered multi-index; ``items`` is a tuple of (label, TwistType)."""

    items: tuple = ()

    def __post_init__(self):
        items = tuple((int(d), as_twist(t)) for d, t in self.items)
        object.__setattr__(self, "items", items)
        for t in TwistType:
            labels = [d for d, tt in items if tt is t]
            if len(set(labels)) != len(labels):
                raise ValueError(f"repeated type-{t.value} label in deletion set")
            if any(d < 0 for d in labels):
                raise ValueError("labels must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "DeletionSet":
        text = (text or "").strip()
        if not text or text.lower() in ("none", "empty", "-"):
            return cls(())
        items = []
        for tok in text.split(","):
            tok = tok.strip()
            if tok.endswith("II"):
                items.append((int(tok[:-2]), TwistType.II))
            elif tok.endswith("I"):
                items.append((int(tok[:-1]), TwistType.I))
            else:
                raise ValueError(f"bad deletion label {tok!r}; use forms like 2I or 1II")
        return cls(tuple(items))

    @classmethod
    def of(cls, typeI=(), typeII=()) -> "DeletionSet":
        return cls(tuple((d, TwistType.I) for d in typeI) + tuple((d, TwistType.II) for d in typeII))

    @property
    def typeI(self) -> tuple:
        return tuple(d for d, t in self.items if t is TwistType.I)

    @property
    def typeII(self) -> tuple:
        return tuple(d for d, t in self.items if t is TwistType.II)

    @property
    def M(self) -> int:
        return len(self.items)

    @property
    def MI(self) -> int:
        return len(self.typeI)

    @property
    def MII(self) -> int:
        return len(self.typeII)

    def canonical(self) -> "DeletionSet":
        return DeletionSet.of(sorted(self.typeI), sorted(self.typeII))

    def order_sign(self) -> int:
        """Sign of the permutation sorting the labels within each type.

        Determinants use the sorted column order, so a closed form written for
        the given order picks up this sign.
        """
        inv = 0
        for labels in (self.typeI, self.typeII):
            inv += sum(1 for i in range(len(labels)) for j in range(i + 1, len(labels)) if labels[i] > labels[j])
        return -1 if inv % 2 else 1

    def prefix(self, s: int) -> "DeletionSet":
        return DeletionSet(self.items[:s])

    def prefix_counts(self, s: int) -> tuple[int, int]:
        pre = self.prefix(s)
        return pre.MI, pre.MII

    def ell(self) -> int:
        mi, mii = self.MI, self.MII
        return sum(self.typeI) + sum(self.typeII) - mi * (mi - 1) // 2 - mii * (mii - 1) // 2 + mi * mii

    def label(self) -> str:
        return ",".join(f"{d}{t.value}" for d, t in self.items) or "none"

    def __str__(self):
        return "{" + self.label() + "}"


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def deletion_range_violations(params: FamilyParams, D: DeletionSet) -> list[str]:
    out = []
    for t, labels in ((TwistType.I, D.typeI), (TwistType.II, D.typeII)):
        if not labels:
            continue
        bound = mp.mpf(max(labels) + 1) / 2
        for i in t.own:
            ai = params.a[i]
            if params.is_aw:
                if not abs(ai) < params.q ** bound:
                    out.append(f"deletion range: |a{i + 1}| must be < q^{mp.nstr(bound, 3)}")
            elif not mp.re(ai) > bound:
                out.append(f"deletion range: Re a{i + 1} must be > {mp.nstr(bound, 3)}")
    if params.is_aw:
        for t in TwistType:
            own, _ = _pair_products(params, t)
            if mp.im(own) != 0 or own <= 0:
                pair = "a1a2" if t is TwistType.I else "a3a4"
                out.append(f"deletion range: {pair} must be positive")
    return out


def xi_sign_definite(params: FamilyParams, xi: RealEtaPoly) -> bool:
    """True when xi has no zero for x in [x1, x2]."""
    if xi.degree == 0:
        return xi.coeffs[0] != 0
    if params.is_aw:
        lo, hi = mp.mpf(-1), mp.mpf(1)
    else:
        lo, hi = mp.mpf(0), mp.mpf(0)
        # every real zero of xi lies within the Cauchy bound
        from .poly import root_bound

        hi = root_bound(xi) + 1
    if xi(lo) == 0 or xi(hi) == 0:
        return False
    pad = mp.ldexp(hi - lo, -40)
    return count_real_zeros(xi, lo - pad, hi + pad) == 0


def validate(params: FamilyParams, D: DeletionSet, check_xi: bool = True) -> ValidationReport:
    rep = ValidationReport()
    rep.failures.extend(check_admissible(params))
    if any(d == 0 for d, _ in D.items):
        rep.failures.append("label 0 is not a valid deletion label")
    rep.failures.extend(deletion_range_violations(params, D))
    for d, t in D.items:
        if d < 1:
            continue
        if d not in index_range(params, t):
            rep.failures.append(f"label {d}{t.value} outside the virtual index set V^{t.value}")
        e = virtual_energy(params, t, d)
        if not (mp.im(e) == 0 and e < 0):
            rep.failures.append(f"virtual energy of {d}{t.value} is not negative ({mp.nstr(e, 8)})")
    for t in TwistType:
        labels = D.typeI if t is TwistType.I else D.typeII
        if not labels:
            continue
        try:
            alpha_consts(params, t, check=True)
        except SignError as exc:
            rep.failures.append(f"type {t.value}: {exc}")
    if check_xi and rep.ok:
        for d, t in D.items:
            for p in (params, params.plus_delta()):
                xi = virtual_xi(p, t, d, check_range=False)
                which = "lambda" if p is params else "lambda+delta"
                if xi.leading == 0:
                    rep.failures.append(f"xi_{d}{t.value}({which}) has degree below {d}")
                    continue
                if not xi_sign_definite(p, xi):
                    rep.failures.append(f"xi_{d}{t.value}({which}) vanishes on [x1, x2]")
    return rep
