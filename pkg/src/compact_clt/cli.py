"""Command-line front end.

Subcommands: ``identities``, ``cumulants``, ``szego``, ``mgf``, ``sample``,
``clt``.  Output goes to ``--out`` (default stdout) as JSON or CSV.

Exit codes: 0 every tolerance met, 1 a tolerance failed, 2 usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .combinatorics import ResourceError
from .cumulants import (
    Caps,
    CumulantReport,
    as_ensemble,
    cumulant_direct_unitary,
    cumulant_trace,
    limit_cumulant,
    local_cumulant,
)
from .determinants import (
    NumericalError,
    cumulants_from_mgf,
    mgf_sweep,
    szego_limit,
    sweep_to_csv,
    toeplitz_mgf,
)
from .fourier import local_from_json, poly_from_json, variance_limit_local
from .identities import run_identity_suite
from .sampler import linear_statistic, local_statistic, sample_angles, sample_batch, samples_to_csv
from .stats import empirical_cumulants, ks_critical, within_se

EXIT_OK, EXIT_TOL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_TOLS = {
    "rel": 1e-6,  # relative agreement between cumulant paths
    "abs": 1e-8,  # absolute agreement when the value is ~0
    "se": 4.0,  # Monte Carlo moments within this many standard errors
    "ks_alpha": 0.01,
    "max_failure_rate": 1e-3,
}

DEFAULT_F = [[1, 1, 0], [-1, 1, 0]]
DEFAULT_G = {"family": "triangle", "params": {"width": 1.0}}

# hard defaults, applied after the config file so flags > config > defaults
DEFAULTS = {
    "ensemble": "u",
    "n": "8",
    "ell": "1:4",
    "t": "0.5",
    "f": None,
    "g": None,
    "L": None,
    "theta0": None,
    "samples": 1000,
    "seed": None,
    "max_ell": 6,
    "trials": 200,
    "method": "toeplitz",
    "mgf": False,
    "dps": None,
    "format": "json",
    "out": None,
}


class UsageError(ValueError):
    pass


def parse_range(text, what: str = "range") -> list:
    """``"2,4,8"``, ``"2:16"`` (inclusive), ``"2:16:2"`` or a single value; ints only."""
    if isinstance(text, (int,)):
        return [int(text)]
    if isinstance(text, list):
        return [int(v) for v in text]
    text = str(text).strip()
    if text == "":
        return []
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            bits = [int(b) for b in part.split(":")]
            if len(bits) not in (2, 3) or (len(bits) == 3 and bits[2] <= 0):
                raise UsageError(f"bad {what} {part!r}")
            step = bits[2] if len(bits) == 3 else 1
            out.extend(range(bits[0], bits[1] + 1, step))
        else:
            out.append(int(part))
    return out


def parse_floats(text) -> list:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(v) for v in text]
    return [float(p) for p in str(text).split(",") if p.strip()]


def parse_tols(items: Sequence[str]) -> dict:
    tols = dict(DEFAULT_TOLS)
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        name, val = item.split("=", 1)
        if name not in tols:
            raise UsageError(f"unknown tolerance {name!r}; known: {sorted(tols)}")
        v = float(val)
        if not v > 0:
            raise UsageError("tolerances must be positive")
        tols[name] = v
    return tols


def _json_arg(value):
    if value is None or isinstance(value, (list, dict)):
        return value
    try:
        return json.loads(value)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON argument: {exc}") from exc


def _num(x):
    if isinstance(x, Fraction):
        return float(x)
    return None if x is None else float(x)


def _agree(a: float, b: float, tols: dict) -> bool:
    return abs(a - b) <= max(tols["abs"], tols["rel"] * max(abs(a), abs(b)))


# ---------------------------------------------------------------------------
# subcommands


def cmd_identities(args, tols) -> tuple[dict, int]:
    rep = run_identity_suite(max_ell=int(args.max_ell), trials=int(args.trials), seed=int(args.seed or 0))
    return rep.to_dict(), EXIT_OK if rep.passed else EXIT_TOL


def cmd_cumulants(args, tols) -> tuple[dict, int]:
    f = poly_from_json(_json_arg(args.f) or DEFAULT_F)
    kinds = [k.strip() for k in str(args.ensemble).split(",") if k.strip()]
    rows, code = [], EXIT_OK
    caps = Caps()
    for kind in kinds:
        for n in parse_range(args.n, "n"):
            ens = as_ensemble(kind, n)
            mgf_vals = None
            for ell in parse_range(args.ell, "ell"):
                rep = CumulantReport(ens.kind, n, ell, f.to_json())
                try:
                    rep.value_trace = _num(cumulant_trace(ens, f, None, ell, caps=caps))
                    if ens.unitary:
                        rep.value_direct = _num(cumulant_direct_unitary(f, n, ell, caps=caps))
                        if args.mgf and ell <= 4:
                            if mgf_vals is None:
                                mgf_vals = cumulants_from_mgf(
                                    lambda t: toeplitz_mgf(f, t, n, dps=args.dps), 4)
                            rep.value_mgf = mgf_vals.values[ell - 1]
                    rep.value_limit = _num(limit_cumulant(ens, f, ell, n=n))
                    rep.refresh()
                except (ResourceError, ValueError) as exc:
                    rep.error = f"{type(exc).__name__}: {exc}"
                row = rep.to_dict()
                vals = [v for v in (rep.value_direct, rep.value_trace, rep.value_mgf) if v is not None]
                row["agree"] = all(_agree(a, b, tols) for a in vals for b in vals)
                if not row["agree"]:
                    code = EXIT_TOL
                rows.append(row)
    return {"f": f.to_json(), "tolerances": tols, "rows": rows}, code


def cmd_szego(args, tols) -> tuple[list, int]:
    f = poly_from_json(_json_arg(args.f) or DEFAULT_F)
    rows = []
    for n in parse_range(args.n, "n"):
        for t in parse_floats(args.t):
            v = toeplitz_mgf(f, t, n, dps=args.dps)
            if args.dps is not None:
                import mpmath as mp

                with mp.workdps(args.dps):
                    logv = mp.log(v)
                    resid = float(logv - mp.mpf(szego_limit(f, t, n)))
                    logv = float(logv)
            else:
                logv = math.log(v)
                resid = logv - szego_limit(f, t, n)
            rows.append({"ensemble": "u", "n": n, "t": t, "method": "toeplitz",
                         "value": float(v), "log_value": logv, "szego_residual": resid})
    return rows, EXIT_OK


def cmd_mgf(args, tols) -> tuple[list, int]:
    f = poly_from_json(_json_arg(args.f) or DEFAULT_F)
    kinds = [k.strip() for k in str(args.ensemble).split(",") if k.strip()]
    methods = [m.strip() for m in str(args.method).split(",") if m.strip()]
    rows = mgf_sweep(kinds, f, parse_range(args.n, "n"), parse_floats(args.t), methods, dps=args.dps)
    return rows, EXIT_OK


def cmd_sample(args, tols) -> tuple[list, int]:
    if args.seed is None:
        raise UsageError("--seed is required for sampling")
    ens = as_ensemble(str(args.ensemble), parse_range(args.n, "n")[0])
    samples = [sample_angles(ens, int(args.seed), s) for s in range(int(args.samples))]
    return samples, EXIT_OK


def _moment_checks(summary, mean, variance, tols) -> dict:
    k_se = tols["se"]
    crit = ks_critical(summary.n, tols["ks_alpha"])
    checks = {
        "mean_within_se": within_se(summary.k_stat(1), mean, summary.k_se(1), k_se),
        "variance_within_se": within_se(summary.k_stat(2), variance, summary.k_se(2), k_se),
        "ks_below_critical": bool(summary.ks_distance < crit),
    }
    return checks


def cmd_clt(args, tols) -> tuple[dict, int]:
    if args.seed is None:
        raise UsageError("--seed is required for clt")
    N = int(args.samples)
    if N < 1000:
        raise UsageError("clt needs --samples >= 1000")
    n = parse_range(args.n, "n")[0]
    ens = as_ensemble(str(args.ensemble), n)
    seed = int(args.seed)
    angles, failures = [], 0
    for s in range(N):
        try:
            angles.append(sample_angles(ens, seed, s).angles)
        except NumericalError:
            failures += 1
    if failures > tols["max_failure_rate"] * N:
        raise NumericalError(f"sampler failed on {failures} of {N} streams")
    import numpy as np

    X = np.array(angles)
    report = {"ensemble": ens.kind, "n": n, "samples": N, "seed": seed, "sampler_failures": failures,
              "tolerances": tols}
    code = EXIT_OK
    f_spec = _json_arg(args.f)
    if f_spec is not None or args.g is None:
        f = poly_from_json(f_spec or DEFAULT_F)
        vals = linear_statistic(X, f)
        mean_fin = float(cumulant_trace(ens, f, None, 1, exact=False, caps=Caps(max_n=max(128, n))))
        var_fin = float(cumulant_trace(ens, f, None, 2, exact=False, caps=Caps(max_n=max(128, n))))
        summ = empirical_cumulants(vals, mean=mean_fin, variance=var_fin)
        checks = _moment_checks(summ, mean_fin, var_fin, tols)
        report["global"] = {
            "f": f.to_json(), "summary": summ.to_dict(),
            "theory": {"mean_finite_n": mean_fin, "variance_finite_n": var_fin,
                       "mean_limit": _num(limit_cumulant(ens, f, 1, n=n)),
                       "variance_limit": _num(limit_cumulant(ens, f, 2))},
            "checks": checks,
        }
        if not all(checks.values()):
            code = EXIT_TOL
    if args.g is not None:
        g = local_from_json(_json_arg(args.g))
        L = float(args.L if args.L is not None else 8.0)
        theta0 = float(args.theta0 if args.theta0 is not None else (0.0 if ens.unitary else math.pi / 2))
        vals = local_statistic(X, g, L, theta0, ensemble=ens)
        scale = n / (2 * math.pi * L) if ens.unitary else n / (math.pi * L)
        mean_lim = scale * g.integral()
        var_lim = variance_limit_local(g)
        summ = empirical_cumulants(vals, mean=mean_lim, variance=var_lim)
        checks = _moment_checks(summ, mean_lim, var_lim, tols)
        report["local"] = {
            "g": g.to_json(), "L": L, "theta0": theta0, "summary": summ.to_dict(),
            "theory": {"mean_limit": mean_lim, "variance_limit": var_lim,
                       "mean_finite_n": local_cumulant(ens, g, L, n, theta0, 1),
                       "variance_finite_n": local_cumulant(ens, g, L, n, theta0, 2)},
            "checks": checks,
        }
        if not all(checks.values()):
            code = EXIT_TOL
    return report, code


COMMANDS = {
    "identities": cmd_identities,
    "cumulants": cmd_cumulants,
    "szego": cmd_szego,
    "mgf": cmd_mgf,
    "sample": cmd_sample,
    "clt": cmd_clt,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compact-clt",
        description="Cumulants, determinant oracles and Monte Carlo checks for eigenvalue "
                    "statistics of U(n), SO(2n), SO(2n+1) and Sp(n).")
    parser.add_argument("--config", help="JSON file whose fields provide defaults for the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--ensemble", help="u | so-even | so-odd | sp (comma list where supported)")
        p.add_argument("--n", help="rank(s): 8, 2,4,8 or 2:16[:step]")
        p.add_argument("--f", help='test polynomial as JSON [[k, re, im], ...]; re/im may be "p/q"')
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                       help=f"override a tolerance ({', '.join(sorted(DEFAULT_TOLS))})")
        p.add_argument("--dps", type=int, help="evaluate determinants in mpmath at this precision")

    p = sub.add_parser("identities", help="exact checks of the combinatorial identities")
    common(p)
    p.add_argument("--max-ell", dest="max_ell", type=int)
    p.add_argument("--trials", type=int)

    p = sub.add_parser("cumulants", help="cumulant table from every applicable path")
    common(p)
    p.add_argument("--ell", help="orders, e.g. 1:4")
    p.add_argument("--mgf", action="store_true", default=None,
                   help="add the log-MGF derivative path (unitary)")

    p = sub.add_parser("szego", help="Toeplitz log-determinant minus its large-n asymptote")
    common(p)
    p.add_argument("--t", help="comma list of t values")

    p = sub.add_parser("mgf", help="MGF sweep over (ensemble, n, t, method)")
    common(p)
    p.add_argument("--t", help="comma list of t values")
    p.add_argument("--method", help="toeplitz,fredholm,weyl-quadrature")

    p = sub.add_parser("sample", help="dump sampled angles as CSV")
    common(p)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("clt", help="Monte Carlo CLT report for global and local statistics")
    common(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--g", help='local test function JSON {"family": ..., "params": {...}}')
    p.add_argument("--L", type=float)
    p.add_argument("--theta0", type=float)
    return parser


def _apply_defaults(args, config: dict) -> None:
    for key, value in config.items():
        key = key.replace("-", "_").replace(".", "_")
        if key in ("command", "config"):
            continue
        if key == "tol":
            args.tol = [f"{k}={v}" for k, v in value.items()] + list(args.tol or [])
            continue
        if getattr(args, key, None) is None and key in DEFAULTS:
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, value)


def _emit(command: str, payload, fmt: str, out: Optional[str]) -> None:
    if command == "sample":
        text = samples_to_csv(payload) if fmt == "csv" else json.dumps(
            [{"sample_id": s.stream_id, "angles": [float(a) for a in s.angles]} for s in payload],
            sort_keys=True) + "\n"
    elif command in ("szego", "mgf") and fmt == "csv":
        text = sweep_to_csv(payload)
    elif command == "cumulants" and fmt == "csv":
        import csv
        import io

        buf = io.StringIO()
        cols = ["ensemble", "n", "ell", "value_direct", "value_trace", "value_mgf", "value_limit",
                "max_abs_discrepancy", "agree", "error"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in payload["rows"]:
            w.writerow(["" if r.get(c) is None else (repr(r[c]) if isinstance(r[c], float) else r[c])
                        for c in cols])
        text = buf.getvalue()
    else:
        text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = {}
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
            if not isinstance(config, dict):
                raise UsageError("config must be a JSON object")
        _apply_defaults(args, config)
        tols = parse_tols(args.tol)
        payload, code = COMMANDS[args.command](args, tols)
        _emit(args.command, payload, args.format, args.out)
        return code
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, ResourceError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
