"""Command-line frontend: solves, bound reports, sweeps, symmetry, J-runs.

Subcommands: ``solve``, ``sweep``, ``bounds``, ``symmetry``, ``jopt``,
``refine``.  Configuration precedence is command-line flags over an
optional ``key=value`` config file over built-in defaults.  Numbers are
serialised with 17 significant digits so every emitted float round-trips;
solve results are cached as JSON records keyed by a content hash of
``(a, b, m, n, tol, seed)`` in the directory named by the
``DIRACBOX_CACHE_DIR`` environment variable (default
``~/.cache/diracbox``), which makes repeated runs byte-identical including
their wall-time fields.

Exit codes: 0 success, 2 argument error, 3 solver failure, 4 symmetry
resolution failure, 5 internal consistency violation.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import bounds as bounds_mod
from . import jopt as jopt_mod
from . import symmetry as symmetry_mod
from .eigsolve import lambda1_2d, refine_study, shifted_form, smallest_eigenpair
from .errors import ClusterResolutionError, ConsistencyError, SolverError
from .formgrid import (
    FormMatrices,
    SpinorField,
    assemble,
    build_grid,
    quotient,
    trial_dirichlet,
)

__all__ = ["main"]

CSV_HEADER = ("a,b,m,n,mu,lambda1,thm_lower,sharp_lower,thm_upper,"
              "residual,iterations,wall_time_ms,seed")

_DEFAULTS = {
    "a": 1.0, "b": None, "m": 0.0, "n": 64, "tol": 1e-10, "seed": 0,
    "jobs": 1, "steps": 21, "k": 4, "restarts": 5, "format": "json",
    "a_min": 0.25, "a_max": 4.0, "out": None, "no_cache": False,
    "n_list": "16,32,64,128", "constraint": "area",
}


# ----------------------------------------------------------------------
# canonical serialisation: 17 significant digits, sorted keys
# ----------------------------------------------------------------------

def format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite number {x!r}")
    return format(x, ".17g")


def canonical_json(obj, indent: int = 0) -> str:
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return format_number(obj)
    if isinstance(obj, str):
        import json as _json
        return _json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [canonical_json(v, indent + 2) for v in obj]
        return "[\n" + ",\n".join(inner + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj):
            items.append(f'{inner}"{key}": {canonical_json(obj[key], indent + 2)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialise {type(obj)!r}")


def emit(record: dict, out_path: str | None) -> None:
    text = canonical_json(record) + "\n"
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ----------------------------------------------------------------------
# results cache
# ----------------------------------------------------------------------

def cache_root() -> str:
    return os.environ.get(
        "DIRACBOX_CACHE_DIR",
        os.path.join(os.path.expanduser("~"), ".cache", "diracbox"))


def _cache_key(params: dict) -> str:
    return hashlib.sha256(canonical_json(params).encode()).hexdigest()


def cache_get(params: dict):
    path = os.path.join(cache_root(), _cache_key(params) + ".json")
    if not os.path.exists(path):
        return None
    import json as _json
    with open(path, encoding="utf-8") as fh:
        return _json.load(fh)


def cache_put(params: dict, record: dict) -> None:
    root = cache_root()
    os.makedirs(root, exist_ok=True)
    path = os.path.join(root, _cache_key(params) + ".json")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(record) + "\n")
    os.replace(tmp, path)


# ----------------------------------------------------------------------
# the single-point solve record shared by `solve` and `sweep`
# ----------------------------------------------------------------------

_FM_CACHE: dict[int, FormMatrices] = {}


def _form_matrices(n: int) -> FormMatrices:
    if n not in _FM_CACHE:
        _FM_CACHE[n] = assemble(build_grid(n))
    return _FM_CACHE[n]


def _sandwich_check(record: dict) -> None:
    """Abort if the guaranteed bound relations fail for a record."""
    shifted = record["mu"] - record["m"] ** 2
    tiny = 1e-9 * max(1.0, abs(record["mu"]))
    ok = (record["thm_lower"] <= record["sharp_lower"] + tiny
          and record["sharp_lower"] <= shifted + tiny
          and record["mu"] <= record["trial_quotient"] + tiny)
    if not ok:
        raise ConsistencyError(
            f"bounds sandwich violated for record {record!r}")


def solve_record(a: float, b: float, m: float, n: int, tol: float,
                 seed: int, use_cache: bool = True) -> dict:
    params = {"a": a, "b": b, "m": m, "n": n, "tol": tol, "seed": seed}
    if use_cache:
        hit = cache_get(params)
        if hit is not None:
            return hit
    t0 = time.perf_counter()
    fm = _form_matrices(n)
    res = lambda1_2d(a, b, m, n, tol, seed=seed, fm=fm)
    wall_ms = (time.perf_counter() - t0) * 1e3
    trial_q = quotient(fm, a, b, m, trial_dirichlet(build_grid(n)))
    record = {
        **params,
        "mu": res.mu,
        "lambda1": res.lambda1,
        "residual": res.residual,
        "iterations": res.iterations,
        "eigenvalues": list(res.eigenvalues),
        "thm_lower": bounds_mod.thm_lower(a, b, m),
        "sharp_lower": bounds_mod.sharp_lower(a, b, m),
        "thm_upper": bounds_mod.thm_upper(a, b, m),
        "trial_quotient": trial_q,
        "bracket_lo": m**2 + max(bounds_mod.thm_lower(a, b, m),
                                 bounds_mod.sharp_lower(a, b, m)),
        "bracket_hi": min(res.mu, m**2 + bounds_mod.thm_upper(a, b, m)),
        "wall_time_ms": wall_ms,
    }
    _sandwich_check(record)
    if use_cache:
        cache_put(params, record)
    return record


def _csv_row(record: dict) -> str:
    fields = [
        format_number(record["a"]), format_number(record["b"]),
        format_number(record["m"]), str(int(record["n"])),
        format_number(record["mu"]), format_number(record["lambda1"]),
        format_number(record["thm_lower"]), format_number(record["sharp_lower"]),
        format_number(record["thm_upper"]), format_number(record["residual"]),
        str(int(record["iterations"])), format_number(record["wall_time_ms"]),
        str(int(record["seed"])),
    ]
    return ",".join(fields)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_solve(opts) -> int:
    b = opts["b"] if opts["b"] is not None else opts["a"]
    record = solve_record(opts["a"], b, opts["m"], opts["n"], opts["tol"],
                          opts["seed"], use_cache=not opts["no_cache"])
    print(
        f"lambda1(a={format_number(record['a'])}, b={format_number(record['b'])}, "
        f"m={format_number(record['m'])}; n={record['n']}) = "
        f"{format_number(record['lambda1'])}, lambda1^2 in "
        f"[{format_number(record['bracket_lo'])}, {format_number(record['bracket_hi'])}]",
        file=sys.stderr)
    if opts["format"] == "csv":
        text = CSV_HEADER + "\n" + _csv_row(record) + "\n"
        sys.stdout.write(text)
        if opts["out"]:
            with open(opts["out"], "w", encoding="utf-8") as fh:
                fh.write(text)
    else:
        emit(record, opts["out"])
    return 0


def _sweep_grid(constraint: str, a_min: float, a_max: float, steps: int):
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    if not 0.0 < a_min < a_max:
        raise ValueError(f"need 0 < a_min < a_max, got {a_min!r}, {a_max!r}")
    if constraint == "area":
        grid = np.geomspace(a_min, a_max, steps)
        return [(float(a), 1.0 / float(a)) for a in grid]
    if constraint == "perimeter":
        if a_max >= 2.0:
            raise ValueError(
                f"perimeter sweeps require a_max < 2, got {a_max!r}")
        grid = np.linspace(a_min, a_max, steps)
        return [(float(a), 2.0 - float(a)) for a in grid]
    raise ValueError(f"unknown constraint {constraint!r}")


def _point_task(args):
    a, b, m, n, tol, seed = args
    return solve_record(a, b, m, n, tol, seed, use_cache=False)


def cmd_sweep(opts) -> int:
    if not opts["out"]:
        raise ValueError("sweep requires --out for the CSV file")
    points = _sweep_grid(opts["constraint"], opts["a_min"], opts["a_max"],
                         opts["steps"])
    m, n, tol, seed = opts["m"], opts["n"], opts["tol"], opts["seed"]
    use_cache = not opts["no_cache"]

    pending = {}
    records = {}
    for a, b in points:
        params = {"a": a, "b": b, "m": m, "n": n, "tol": tol, "seed": seed}
        hit = cache_get(params) if use_cache else None
        if hit is not None:
            records[(a, b)] = hit
        else:
            pending[(a, b)] = params

    if pending and opts["jobs"] > 1:
        _form_matrices(n)   # assembled before fork so workers inherit it
        with ProcessPoolExecutor(max_workers=opts["jobs"]) as pool:
            futures = {key: pool.submit(_point_task,
                                        (key[0], key[1], m, n, tol, seed))
                       for key in pending}
            for key, fut in futures.items():
                records[key] = fut.result()
    else:
        for key, params in pending.items():
            records[key] = _point_task((key[0], key[1], m, n, tol, seed))
    for key, params in pending.items():
        if use_cache:
            cache_put(params, records[key])

    with open(opts["out"], "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.flush()
        for a, b in points:
            _sandwich_check(records[(a, b)])
            fh.write(_csv_row(records[(a, b)]) + "\n")
            fh.flush()

    best_a, best_b = min(points, key=lambda p: records[p]["mu"])
    best = records[(best_a, best_b)]
    print(f"argmin over {len(points)} {opts['constraint']} points: "
          f"a={format_number(best_a)}, b={format_number(best_b)}, "
          f"lambda1={format_number(best['lambda1'])}")
    return 0


def cmd_bounds(opts) -> int:
    b = opts["b"] if opts["b"] is not None else opts["a"]
    report = bounds_mod.bounds_report(opts["a"], b, opts["m"])
    emit(report.as_dict(), opts["out"])
    return 0


def cmd_symmetry(opts) -> int:
    a = opts["a"]
    b = opts["b"] if opts["b"] is not None else a
    m, n, k = opts["m"], opts["n"], opts["k"]
    fm = _form_matrices(n)
    pairs = smallest_eigenpair(shifted_form(fm, a, b, m), fm.M, k=k,
                               tol=opts["tol"], seed=opts["seed"])
    mus = [p[0] for p in pairs]
    cluster = [(mu, SpinorField(v, n)) for mu, v in pairs
               if (mu - mus[0]) <= 1e-8 * abs(mus[0])]
    square = (a == b)
    classes = symmetry_mod.classify_symmetry(fm, cluster, square=square)
    class_reports = []
    for cls in classes:
        d1, d2 = symmetry_mod.verify_norm_identities(cls.field, fm)
        class_reports.append({
            "alpha_re": cls.alpha.real, "alpha_im": cls.alpha.imag,
            "deviation": cls.deviation, "d1": d1, "d2": d2,
        })
    s1, s2 = symmetry_mod.separability_residual(classes[0].field)
    report = {
        "a": a, "b": b, "m": m, "n": n, "k": k,
        "eigenvalues": [mu + m**2 for mu in mus],
        "cluster_size": len(cluster),
        "kind": "quarter_turn" if square else "half_turn",
        "classes": class_reports,
        "separability": {"component1": s1, "component2": s2},
    }
    if square:
        report["commutation_check"] = symmetry_mod.commutation_check(
            fm, a, m, seed=opts["seed"])
    emit(report, opts["out"])
    return 0


def cmd_jopt(opts) -> int:
    fm = _form_matrices(opts["n"])
    evidence = jopt_mod.probe_conjecture_symmetry(
        fm, opts["m"], restarts=opts["restarts"], seed=opts["seed"],
        solver_tol=opts["tol"])
    report = {"m": opts["m"], "n": opts["n"], "restarts": opts["restarts"],
              "seed": opts["seed"], **evidence.as_dict()}
    emit(report, opts["out"])
    return 0


def cmd_refine(opts) -> int:
    b = opts["b"] if opts["b"] is not None else opts["a"]
    n_list = [int(x) for x in str(opts["n_list"]).split(",") if x.strip()]
    study = refine_study(opts["a"], b, opts["m"], n_list, opts["tol"],
                         seed=opts["seed"],
                         fm_by_n={n: _form_matrices(n) for n in n_list})
    report = {
        "a": study.a, "b": study.b, "m": study.m,
        "entries": [[n, mu] for n, mu in study.entries],
        "extrapolated_mu": study.extrapolated,
        "extrapolated_lambda1": study.lambda1,
        "observed_order": study.observed_order,
    }
    emit(report, opts["out"])
    return 0


# ----------------------------------------------------------------------
# argument handling: flags > config file > defaults
# ----------------------------------------------------------------------

_TYPES = {
    "a": float, "b": float, "m": float, "n": int, "tol": float, "seed": int,
    "jobs": int, "steps": int, "k": int, "restarts": int, "a_min": float,
    "a_max": float, "format": str, "out": str, "no_cache": bool,
    "n_list": str, "constraint": str,
}


def load_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _TYPES:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            typ = _TYPES[key]
            if typ is bool:
                out[key] = value.lower() in ("1", "true", "yes", "on")
            else:
                out[key] = typ(value)
    return out


def _add_common(sub):
    sub.add_argument("--a", type=float)
    sub.add_argument("--b", type=float)
    sub.add_argument("--m", type=float)
    sub.add_argument("--n", type=int)
    sub.add_argument("--tol", type=float)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--jobs", type=int)
    sub.add_argument("--out", type=str)
    sub.add_argument("--format", choices=["json", "csv"])
    sub.add_argument("--no-cache", action="store_const", const=True,
                     dest="no_cache")
    sub.add_argument("--config", type=str)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracbox",
        description="Dirac rectangle spectral laboratory")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("solve", help="one rectangle eigenvalue with bracket")
    _add_common(p)

    p = subs.add_parser("sweep", help="eigenvalue scan along a constraint family")
    _add_common(p)
    p.add_argument("--constraint", choices=["area", "perimeter"])
    p.add_argument("--a-min", type=float, dest="a_min")
    p.add_argument("--a-max", type=float, dest="a_max")
    p.add_argument("--steps", type=int)

    p = subs.add_parser("bounds", help="closed-form bounds and region conditions")
    _add_common(p)

    p = subs.add_parser("symmetry", help="classify the lowest eigenvalue cluster")
    _add_common(p)
    p.add_argument("--k", type=int)

    p = subs.add_parser("jopt", help="non-convex fixed-point experiment")
    _add_common(p)
    p.add_argument("--restarts", type=int)

    p = subs.add_parser("refine", help="nested-grid refinement study")
    _add_common(p)
    p.add_argument("--n-list", type=str, dest="n_list")
    return parser


def _merge_options(args: argparse.Namespace) -> dict:
    config = load_config(args.config) if getattr(args, "config", None) else {}
    opts = {}
    for key, default in _DEFAULTS.items():
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            opts[key] = cli_val
        elif key in config:
            opts[key] = config[key]
        else:
            opts[key] = default
    return opts


_COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
    "symmetry": cmd_symmetry,
    "jopt": cmd_jopt,
    "refine": cmd_refine,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = _merge_options(args)
        return _COMMANDS[args.command](opts)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except ClusterResolutionError as exc:
        print(f"symmetry resolution failure: {exc}", file=sys.stderr)
        return 4
    except ConsistencyError as exc:
        print(f"internal consistency violation: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
