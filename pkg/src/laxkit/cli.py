"""laxkit command line: painleve / flow / jacobi / check.

Reports are JSON with insertion-ordered keys and canonical polynomial
strings, so identical configurations produce byte-identical files.
Exit codes: 0 success, 1 usage or input error, 2 Painlevé obstruction.
Nothing is written on an error path.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .exactalg import Q
from . import builtins as bi
from . import jacobispec as js
from . import laxflow as lf
from . import painleve as pv
from .sysdsl import ParseError, parse_system_file

REPORT_VERSION = 1


class UsageError(ValueError):
    pass


def _write_json(path: str, payload: dict):
    text = json.dumps(payload, indent=2)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def _write_csv(path: str, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{x:.16g}" if isinstance(x, float) else str(x)
                              for x in row) + "\n")


def _parse_bindings(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"binding '{item}' must look like NAME=VALUE")
        k, v = item.split("=", 1)
        out[k.strip()] = Q(v.strip())
    return out


def _load_system(args):
    if getattr(args, "builtin", None):
        try:
            obj = bi.builtin_system(args.builtin)
        except KeyError as exc:
            raise UsageError(str(exc))
        return obj, args.builtin
    path = getattr(args, "file", None)
    if not path:
        raise UsageError("supply --builtin NAME or --file PATH")
    if not os.path.exists(path):
        raise UsageError(f"no such file: {path}")
    return parse_system_file(path), None


# ---------------------------------------------------------------------------
# painleve
# ---------------------------------------------------------------------------

def cmd_painleve(args) -> int:
    system, name = _load_system(args)
    bindings = _parse_bindings(args.bind)
    if bindings:
        sub = {k: v for k, v in bindings.items() if k in system.constants}
        if sub:
            from dataclasses import replace
            system = replace(
                system,
                equations=tuple(e.subs(sub) for e in system.equations),
                invariants={k: H.subs(sub) for k, H in system.invariants.items()},
                constants=tuple(c for c in system.constants if c not in sub),
                poisson=None if system.poisson is None else
                [[p.subs(sub) for p in row] for row in system.poisson])
    meta = {}
    if name:
        try:
            meta = dict(bi.painleve_meta(name))
        except KeyError:
            meta = {}
    if meta.get("principal"):
        meta.setdefault("balance_filter", meta["principal"])
    if meta.get("sheet"):
        meta.setdefault("label_fn", meta["sheet"])
    order = args.order or meta.get("order", 6)
    report = pv.analyze(system, order, builtin_meta=meta)
    payload = {"laxkit_report": REPORT_VERSION, "command": "painleve",
               "order": order}
    payload.update(report)
    obstructed = any("obstruction" in b for b in report["balances"])
    out = os.path.join(args.out, f"painleve_{system.name}.json")
    _write_json(out, payload)
    print(out)
    return 2 if obstructed else 0


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------

def cmd_flow(args) -> int:
    if args.dt <= 0:
        raise UsageError("--dt must be positive")
    if args.t_end <= 0:
        raise UsageError("--t-end must be positive")
    name = args.builtin
    summary = {"laxkit_report": REPORT_VERSION, "command": "flow",
               "builtin": name, "t_end": args.t_end, "dt": args.dt}
    rows = []
    header = []
    if name == "toda-periodic":
        n = args.N
        rng = np.random.default_rng(args.seed)
        a = list(rng.uniform(0.6, 1.4, n))
        b = list(rng.uniform(-0.5, 0.5, n))
        pencil, B = bi.toda_periodic_pencil(a, b)
        traj = lf.integrate_lax(pencil, B, args.t_end, args.dt,
                                sample_every=max(1, int(round(args.t_end / args.dt)) // 20))
        drift = lf.isospectral_drift(traj, [1.0, -1.0, 0.5, 2.0], n)
        summary["trace_drift"] = drift
        summary["curve_drift"] = lf.curve_drift(traj)
        summary["pass"] = bool(drift < args.tol)
        header = ["t"] + [f"a{j+1}" for j in range(n)] + [f"b{j+1}" for j in range(n)]
        for t, P in zip(traj.times, traj.pencils):
            A0 = P.coeffs[0]
            arow = [float(A0[j, (j + 1) % n]) if j < n - 1 else float(P.coeffs[1][n - 1, 0])
                    for j in range(n)]
            brow = [float(A0[j, j]) for j in range(n)]
            rows.append([t] + arow + brow)
    elif name in ("kvm", "kvm5"):
        system = bi.builtin_system("kvm")
        rng = np.random.default_rng(args.seed)
        z0 = rng.uniform(0.3, 1.2, system.dim)
        times, states = lf.integrate_system(system, z0, args.t_end, args.dt)
        drifts = lf.invariant_drift(system, times, states)
        summary["invariant_drift"] = drifts
        summary["pass"] = bool(max(drifts.values()) < args.tol)
        header = ["t"] + list(system.variables) + list(system.invariants)
        for t, z in zip(times, states):
            env = dict(zip(system.variables, z))
            rows.append([t] + list(map(float, z)) +
                        [H.eval_num(env) for H in system.invariants.values()])
    elif name == "euler-arnold":
        pencil, B = bi.builtin("euler-arnold", n=args.N, seed=args.seed)
        traj = lf.integrate_lax(pencil, B, args.t_end, args.dt,
                                sample_every=max(1, int(round(args.t_end / args.dt)) // 20))
        drift = lf.isospectral_drift(traj, [1.0, -1.0, 0.5], args.N)
        summary["trace_drift"] = drift
        summary["pass"] = bool(drift < args.tol)
        header = ["t", "tr_X2"]
        for t, P in zip(traj.times, traj.pencils):
            X = P.coeffs[0]
            rows.append([t, float(np.trace(X @ X))])
    elif name == "neumann":
        rng = np.random.default_rng(args.seed)
        n = args.N
        x = rng.normal(size=n)
        x = x / np.linalg.norm(x)
        y = rng.normal(size=n)
        y -= (y @ x) * x
        alphas = list(range(1, n + 1))
        pencil, B = bi.neumann_pencil(alphas, x, y)
        traj = lf.integrate_lax(pencil, B, args.t_end, args.dt,
                                sample_every=max(1, int(round(args.t_end / args.dt)) // 20))
        drift = lf.isospectral_drift(traj, [1.0, -1.0, 2.0], n)
        summary["trace_drift"] = drift
        summary["branch_points"] = list(map(float, bi.neumann_branch_points(alphas, x, y)))
        summary["branch_count_with_infinity"] = 2 * n
        summary["pass"] = bool(drift < args.tol)
        header = ["t", "norm"]
        for t, P in zip(traj.times, traj.pencils):
            rows.append([t, P.norm()])
    else:
        raise UsageError(f"unknown flow builtin '{name}'")

    csv_path = os.path.join(args.out, f"flow_{name}.csv")
    json_path = os.path.join(args.out, f"flow_{name}.json")
    _write_csv(csv_path, header, rows)
    _write_json(json_path, summary)
    if args.gnuplot:
        gp = os.path.join(args.out, f"flow_{name}.gp")
        with open(gp, "w") as fh:
            fh.write(f'set datafile separator ","\nset key autotitle columnhead\n'
                     f'plot for [i=2:{len(header)}] "{os.path.basename(csv_path)}" '
                     f'using 1:i with lines\n')
        print(gp)
    print(csv_path)
    print(json_path)
    return 0


# ---------------------------------------------------------------------------
# jacobi
# ---------------------------------------------------------------------------

def _parse_seq(text: str):
    try:
        return [Q(x) for x in text.replace("−", "-").split(",") if x != ""]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad numeric list '{text}': {exc}")


def cmd_jacobi(args) -> int:
    a = _parse_seq(args.a)
    b = _parse_seq(args.b)
    try:
        m = js.PeriodicJacobi(a, b)
    except ValueError as exc:
        raise UsageError(str(exc))
    a0 = Q(args.a0) if args.a0 is not None else a[-1]
    data = js.spectral_data(m)
    measure = js.measure_decompose(m, a0, data=data)
    payload = {
        "laxkit_report": REPORT_VERSION,
        "command": "jacobi",
        "period": m.period,
        "a": [str(x) for x in a],
        "b": [str(x) for x in b],
        "a0": str(a0),
        "alpha": data.alpha,
        "P_ascending": [str(c) for c in data.P],
        "branch_points": [[x, mult] for x, mult in data.branch_points],
        "stable_bands": [list(t) for t in data.stable_bands],
        "gaps": [list(t) for t in data.gaps],
        "auxiliary_spectrum": data.aux_spectrum,
        "interlacing_ok": data.interlacing_ok(),
        "genus": data.genus,
        "atoms": [[x, mass] for x, mass in measure.atoms],
        "total_mass": measure.total_mass(),
    }
    if args.check_stieltjes:
        grid = _stieltjes_grid(data)
        worst = 0.0
        for z in grid:
            frac = js.gamma_fraction(m.a, m.b, a0, z, args.depth)
            ct = measure.cauchy_transform(z)
            worst = max(worst, abs(ct - frac))
        payload["stieltjes_check"] = {"points": len(grid), "depth": args.depth,
                                      "max_error": worst,
                                      "pass": bool(worst < args.tol)}
    if args.format == "csv":
        bands_path = os.path.join(args.out, "jacobi_bands.csv")
        rows = [["stable", lo, hi] for lo, hi in data.stable_bands]
        rows += [["gap", lo, hi] for lo, hi in data.gaps]
        rows.sort(key=lambda r: r[1])
        _write_csv(bands_path, ["kind", "lo", "hi"], rows)
        print(bands_path)
    if args.toda_t_end:
        diag = js.toda_flow_jacobi(m, args.toda_t_end, args.dt)
        payload["toda"] = {
            "band_edge_drift": diag.band_edge_drift,
            "trace_sum_drift": diag.trace_sum_drift,
            "power_trace_drift": diag.power_trace_drift,
            "interlacing_ok": diag.interlacing_ok,
            "min_abs_a": diag.min_abs_a,
        }
        csv_path = os.path.join(args.out, "jacobi_toda.csv")
        n = m.period
        header = (["t"] + [f"a{j+1}" for j in range(n)] +
                  [f"b{j+1}" for j in range(n)] +
                  [f"xi{j+1}" for j in range(2 * n)] +
                  [f"sigma{j+1}" for j in range(n - 1)])
        rows = [[t] + list(map(float, aa)) + list(map(float, bb)) +
                list(map(float, ee)) + list(map(float, ss))
                for t, aa, bb, ee, ss in zip(diag.times, diag.a_states,
                                             diag.b_states, diag.band_edges,
                                             diag.aux_states)]
        _write_csv(csv_path, header, rows)
        print(csv_path)
    out = os.path.join(args.out, "jacobi_report.json")
    _write_json(out, payload)
    print(out)
    return 0


def _stieltjes_grid(data, count: int = 20, dist: float = 1.0):
    lo = data.branch_points[0][0]
    hi = data.branch_points[-1][0]
    pts = []
    k = 0
    while len(pts) < count:
        k += 1
        for z in (complex(lo - dist - 0.37 * k, 0),
                  complex(hi + dist + 0.41 * k, 0),
                  complex((lo + hi) / 2 + 0.23 * k, dist + 0.3 * k),
                  complex((lo + hi) / 2 - 0.31 * k, -(dist + 0.2 * k))):
            if len(pts) < count:
                pts.append(z)
    return pts


# ---------------------------------------------------------------------------
# check: aggregate acceptance battery
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    from . import acceptance
    only = args.only
    results = acceptance.run_all(only=only, float_tol=args.tol)
    width = max(len(nm) for nm, _, _ in results)
    failures = 0
    for nm, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {nm.ljust(width)}  {detail}")
        failures += (not ok)
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="laxkit",
        description="integrable-systems toolkit: Painlevé analysis, Lax "
                    "flows, periodic Jacobi spectra")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", default="json", choices=["json", "csv"])
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bind", action="append", metavar="NAME=VALUE",
                       help="bind a symbolic constant to a rational")

    p = sub.add_parser("painleve", help="Laurent/Puiseux analysis of a system")
    common(p)
    p.add_argument("--builtin", help=f"one of {sorted(bi._SYSTEM_FILES)}")
    p.add_argument("--file", help="path to an .ivf file")
    p.add_argument("--order", type=int, default=None,
                   help="whole powers of t beyond the leading exponent")
    p.set_defaults(fn=cmd_painleve)

    p = sub.add_parser("flow", help="integrate a Lax or vector-field builtin")
    common(p)
    p.add_argument("--builtin", required=True)
    p.add_argument("-N", type=int, default=3)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--gnuplot", action="store_true")
    p.set_defaults(fn=cmd_flow)

    p = sub.add_parser("jacobi", help="spectral report of a periodic Jacobi matrix")
    common(p)
    p.add_argument("-a", required=True, help="comma list of off-diagonals")
    p.add_argument("-b", required=True, help="comma list of diagonals")
    p.add_argument("--a0", default=None)
    p.add_argument("--check-stieltjes", action="store_true")
    p.add_argument("--depth", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--toda-t-end", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.set_defaults(fn=cmd_jacobi)

    p = sub.add_parser("check", help="run the golden acceptance battery")
    common(p)
    p.add_argument("--only", default=None,
                   choices=[None, "painleve", "flow", "jacobi", "dims"])
    p.add_argument("--tol", type=float, default=None,
                   help="override the float tolerance of the battery")
    p.set_defaults(fn=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        os.makedirs(args.out, exist_ok=True)
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
