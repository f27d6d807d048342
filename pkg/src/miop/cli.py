"""Command-line front end: ``miop build | verify | scan``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, replace

import mpmath as mp

from .classical import FamilyParams, make_params
from .errors import DegenerateSystemError, MiopError, ValidationError
from .numeric import DEFAULT_BITS
from .virtual import DeletionSet, validate
from . import multi, verification

SCHEMA = "miop/1"
EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class JobConfig:
    family: str
    params: tuple
    q: str | None = None
    deletions: str = ""
    nmax: int = 4
    precision: int = DEFAULT_BITS

    def family_params(self) -> FamilyParams:
        try:
            return make_params(self.family, self.params, self.q, self.precision)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    def deletion_set(self) -> DeletionSet:
        try:
            return DeletionSet.parse(self.deletions)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "params": list(self.params),
            "q": self.q,
            "deletions": self.deletions,
            "nmax": self.nmax,
            "precision": self.precision,
        }


def _split(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(str(v) for v in text)
    return tuple(v.strip() for v in str(text).split(",") if v.strip())


def load_config(args) -> JobConfig:
    """Merge a JSON config file (plain or a ``build`` output) with command-line flags."""
    base = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        base = dict(data.get("config", data))
    for key in ("family", "params", "q", "deletions", "nmax", "precision"):
        v = getattr(args, key, None)
        if v is not None:
            base[key] = v
    if "family" not in base or "params" not in base:
        raise ConfigError("--family and --params are required (or give --config)")
    family = str(base["family"]).upper()
    if family not in ("W", "AW"):
        raise ConfigError(f"family must be W or AW, got {base['family']!r}")
    params = _split(base["params"])
    if len(params) != 4:
        raise ConfigError("--params needs four comma-separated values")
    q = base.get("q")
    if family == "AW" and q is None:
        raise ConfigError("AW needs --q")
    try:
        nmax = int(base.get("nmax", 4))
        prec = int(base.get("precision", DEFAULT_BITS))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if nmax < 0 or prec < 53:
        raise ConfigError("nmax must be >= 0 and precision >= 53 bits")
    return JobConfig(family, params, None if q is None else str(q), str(base.get("deletions") or ""), nmax, prec)


def dec(v) -> str:
    """Decimal string carrying the full working precision."""
    return mp.nstr(v, mp.mp.dps, strip_zeros=False) if v is not None else None


# --- build ---------------------------------------------------------------------

def build_payload(cfg: JobConfig, check: bool = True) -> dict:
    params, D = cfg.family_params(), cfg.deletion_set()
    with params.context():
        if check:
            rep = validate(params, D)
            if not rep.ok:
                raise ValidationError(rep)
        system = multi.build_system(params, D, validate=False)
        out = {
            "schema": SCHEMA,
            "command": "build",
            "config": cfg.as_dict(),
            "ell": system.ell,
            "flags": list(system.flags),
            "Xi": {
                "degree": system.Xi.degree,
                "coefficients": [dec(c) for c in system.Xi.coeffs],
                "leading": dec(system.Xi.leading),
                "leading_closed_form": dec(multi.leading_Xi(params, D)),
            },
            "P": [],
        }
        for n in range(cfg.nmax + 1):
            mi = system.P(n)
            P = mi.poly
            out["P"].append(
                {
                    "n": n,
                    "degree": P.degree,
                    "coefficients": [dec(c) for c in P.coeffs],
                    "leading": dec(P.leading),
                    "leading_closed_form": dec(multi.leading_P(params, D, n)),
                    "norm": dec(mi.norm),
                }
            )
    return out


def _build_csv(payload: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["schema", "polynomial", "n", "degree", "power", "coefficient"])
    xi = payload["Xi"]
    for k, c in enumerate(xi["coefficients"]):
        w.writerow([SCHEMA, "Xi", "", xi["degree"], k, c])
    for p in payload["P"]:
        for k, c in enumerate(p["coefficients"]):
            w.writerow([SCHEMA, "P", p["n"], p["degree"], k, c])
    return buf.getvalue()


# --- scan ------------------------------------------------------------------------

def parse_grid(specs) -> list[tuple[int, list[str]]]:
    """``a2=1.5:3:7`` (start:stop:count) or ``a2=1.5,2,2.5`` -> [(index, values)]."""
    out = []
    for spec in specs or []:
        if "=" not in spec:
            raise ConfigError(f"bad grid spec {spec!r}; use a<k>=start:stop:count or a<k>=v1,v2,...")
        name, rng = spec.split("=", 1)
        name = name.strip().lower()
        if name not in ("a1", "a2", "a3", "a4"):
            raise ConfigError(f"grid variable must be a1..a4, got {name!r}")
        if ":" in rng:
            parts = rng.split(":")
            if len(parts) != 3:
                raise ConfigError(f"bad range {rng!r}")
            lo, hi, cnt = mp.mpf(parts[0]), mp.mpf(parts[1]), int(parts[2])
            if cnt < 1:
                raise ConfigError("grid count must be >= 1")
            vals = [parts[0]] if cnt == 1 else [mp.nstr(lo + (hi - lo) * k / (cnt - 1), 20) for k in range(cnt)]
        else:
            vals = list(_split(rng))
        out.append((int(name[1]) - 1, vals))
    return out


def scan_rows(cfg: JobConfig, grid) -> list[dict]:
    points = [list(cfg.params)]
    for idx, vals in grid:
        points = [p[:idx] + [v] + p[idx + 1:] for p in points for v in vals]
    rows = []
    for a in points:
        row = {"a1": a[0], "a2": a[1], "a3": a[2], "a4": a[3], "q": cfg.q or "", "deletions": cfg.deletions or "none"}
        sub = replace(cfg, params=tuple(a))
        try:
            params, D = sub.family_params(), sub.deletion_set()
        except ConfigError as exc:
            rows.append({**row, "status": "invalid", "zeros_D_gamma": "", "zeros_real": "", "note": str(exc)})
            continue
        with params.context():
            rep = validate(params, D)
            status = "ok" if rep.ok else "invalid"
            note = "; ".join(rep.failures)
            try:
                zc = verification.xi_zero_count(params, D)
                zr = verification.xi_real_zero_count(params, D)
            except DegenerateSystemError as exc:
                status, zc, zr, note = "degenerate", "", "", str(exc)
            except MiopError as exc:
                status, zc, zr = "partial" if status == "ok" else status, "", ""
                note = (note + "; " if note else "") + f"{type(exc).__name__}: {exc}"
        rows.append({**row, "status": status, "zeros_D_gamma": zc, "zeros_real": zr, "note": note})
    return rows


SCAN_FIELDS = ["a1", "a2", "a3", "a4", "q", "deletions", "status", "zeros_D_gamma", "zeros_real", "note"]


def _scan_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n")
    w = csv.DictWriter(buf, fieldnames=SCAN_FIELDS)
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# --- entry point ---------------------------------------------------------------------

def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON job file (a build output also works)")
    p.add_argument("--family", choices=["W", "AW", "w", "aw"])
    p.add_argument("--params", help="a1,a2,a3,a4 as decimal strings")
    p.add_argument("--q", help="AW base q in (0, 1)")
    p.add_argument("--deletions", help="comma-separated labels such as 1I,2I,1II")
    p.add_argument("--nmax", type=int)
    p.add_argument("--precision", type=int, help=f"working bits (default {DEFAULT_BITS})")
    p.add_argument("--out", help="output file (default stdout)")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="miop", description="Multi-indexed Wilson and Askey-Wilson polynomials.")
    sub = ap.add_subparsers(dest="command", required=True)
    b = sub.add_parser("build", help="build Xi_D and P_{D,n}")
    _common(b)
    b.add_argument("--format", choices=["json", "csv"], default="json")
    v = sub.add_parser("verify", help="run a verification suite")
    _common(v)
    v.add_argument("--suite", choices=list(verification.SUITES), default="all")
    v.add_argument("--format", choices=["json"], default="json")
    s = sub.add_parser("scan", help="count zeros of Xi_D over a parameter grid")
    _common(s)
    s.add_argument("--grid", action="append", help="a<k>=start:stop:count or a<k>=v1,v2,... (repeatable)")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    return ap


def _invalid(msg: str, out=None, report=None) -> int:
    payload = {"schema": SCHEMA, "error": "invalid input", "message": msg}
    if report is not None:
        payload["failures"] = report.failures
    sys.stderr.write(f"miop: invalid input: {msg}\n")
    if out:
        _emit(json.dumps(payload, indent=2), out)
    return EXIT_INVALID


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "build":
            payload = build_payload(cfg)
            _emit(json.dumps(payload, indent=2) if args.format == "json" else _build_csv(payload), args.out)
            return EXIT_OK
        if args.command == "verify":
            params, D = cfg.family_params(), cfg.deletion_set()
            with params.context():
                rep = validate(params, D)
            if not rep.ok and args.suite != "hermiticity":
                return _invalid("; ".join(rep.failures), args.out, rep)
            report = verification.run_suite(params, D, args.suite, cfg.nmax)
            payload = {"schema": SCHEMA, "command": "verify", "config": cfg.as_dict(), **report.as_dict()}
            _emit(json.dumps(payload, indent=2, default=str), args.out)
            return EXIT_OK if report.passed else EXIT_FAIL
        rows = scan_rows(cfg, parse_grid(args.grid))
        if args.format == "csv":
            _emit(_scan_csv(rows), args.out)
        else:
            _emit(json.dumps({"schema": SCHEMA, "command": "scan", "config": cfg.as_dict(), "rows": rows}, indent=2), args.out)
        return EXIT_OK
    except ValidationError as exc:
        return _invalid(str(exc), args.out, exc.report)
    except (ConfigError, ValueError) as exc:
        return _invalid(str(exc), args.out)
    except DegenerateSystemError as exc:
        return _invalid(f"degenerate system: {exc}", args.out)


if __name__ == "__main__":
    sys.exit(main())
