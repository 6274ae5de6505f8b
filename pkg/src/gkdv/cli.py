"""Command line front end: ``gkdv <subcommand> ...``.

Exit codes: 0 success, 1 a repro scenario failed, 2 usage error,
3 mathematical error (structured JSON on stderr).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from gkdv import classify as cl
from gkdv import pde, reduce as rd, repro, soliton as so, travelwave as tw
from gkdv.errors import GkdvError, ParseError
from gkdv.expr import parse

DEFAULT_SEED = 42


@dataclass
class RunConfig:
    subcommand: str
    expression: str | None = None
    numeric: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    as_json: bool = False
    quiet: bool = False


class UsageError(Exception):
    pass


# ------------------------------------------------------------- formatting

def fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj) -> str:
    """JSON with every float printed to 17 significant digits; NaN/inf become null."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_csv(path: str, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _floats(text: str, n: int, name: str) -> list:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--{name} expects {n} comma-separated numbers") from None
    if len(vals) != n:
        raise UsageError(f"--{name} expects {n} comma-separated numbers, got {len(vals)}")
    return vals


def _emit(cfg: RunConfig, payload: dict, text_lines) -> None:
    if cfg.as_json:
        print(dumps(payload))
    elif not cfg.quiet:
        for line in text_lines:
            print(line)


# ------------------------------------------------------------- subcommands

def cmd_classify(cfg: RunConfig, args) -> int:
    dom = cl.DEFAULT_DOMAIN
    if args.domain:
        lo, hi = _floats(args.domain, 2, "domain")
        dom = cl.DomainInterval(lo, hi)
    res = cl.classify(args.f, dom, m=args.samples)
    scale = cl.defect_scale(args.f, dom)
    defects = [cl.verify_generator(args.f, g, dom) / scale for g in res.generators]
    payload = res.as_dict()
    payload["defects"] = defects
    lines = [f"case {res.case_tag}  nullity {res.nullity}"]
    lines += [f"  {k} = {fmt(v)}" for k, v in sorted(res.params.items())]
    lines += [f"  X{i + 1} = {g.describe()}   (defect {d:.2e})"
              for i, (g, d) in enumerate(zip(res.generators, defects))]
    lines += [f"  note: {n}" for n in res.notes]
    _emit(cfg, payload, lines)
    return 0


def cmd_travelwave(cfg: RunConfig, args) -> int:
    prof = tw.homoclinic_profile(args.f, args.w0, z_max=args.zmax, n=args.n)
    if args.csv:
        write_csv(args.csv, ["z", "w", "dw"],
                  zip(prof.z_samples, prof.w_samples, prof.dw_samples))
    payload = {"c": prof.c, "w0": prof.w0, "decay_rate": prof.decay_rate,
               "saddle_rate": prof.saddle_rate, "energy_defect": prof.energy_defect,
               "quad_mismatch": prof.quad_mismatch, "n": len(prof.z_samples)}
    _emit(cfg, payload, [f"{k} = {fmt(v)}" for k, v in payload.items()])
    return 0


def cmd_soliton(cfg: RunConfig, args) -> int:
    p = so.solve_params(args.alpha, args.A, f0=args.f0, u0=args.u0, b_phase=args.phase)
    payload = {"params": p.as_dict(), "speed": p.speed}
    if args.check:
        res = so.residual_closed_form(p)
        payload["residual"] = res
        payload["residual_scaled"] = res / so.residual_scale(p)
        payload["closed_form_defects"] = p.closed_form_defects()
    lines = [f"{k} = {fmt(v)}" for k, v in p.as_dict().items()] + [f"speed = {fmt(p.speed)}"]
    if args.check:
        lines.append(f"residual = {payload['residual']:.3e} "
                     f"(scaled {payload['residual_scaled']:.3e})")
    _emit(cfg, payload, lines)
    return 0


def cmd_reduce(cfg: RunConfig, args) -> int:
    ic = _floats(args.ic, 3, "ic")
    z0, z1 = _floats(args.span, 2, "span")
    if args.case == "power":
        ode, tag = rd.reduce_power(args.alpha, args.f0, args.lam), "POWER"
    elif args.case == "exp":
        ode, tag = rd.reduce_exp(args.alpha, args.lam, args.f0), "EXP"
    else:
        ode, tag = rd.reduce_log(args.alpha, args.f0, args.c1), "LOG"
    traj = rd.integrate(ode, z0, ic, z1)
    payload = {"case": tag, "params": ode.params, "z_end": traj.z_samples[-1],
               "state_end": traj.states[-1]}
    if tag == "POWER" and args.alpha == 2 and args.lam == 1:
        payload["first_integral"] = rd.painleve_first_integral(traj).as_dict()
    if tag == "LOG":
        payload["chain"] = rd.verify_y_and_p_chain(args.alpha, args.f0, args.c1, traj).as_dict()
    if args.lift:
        t0, t1, x0, x1 = _floats(args.lift, 4, "lift")
        params = {"f0": args.f0, "lam": args.lam, "c1": args.c1}
        lr = rd.lift(traj, tag, params, np.linspace(t0, t1, 5), (x0, x1))
        payload["lift"] = lr.as_dict()
    if args.csv:
        write_csv(args.csv, ["z", "w", "dw", "d2w"],
                  (np.r_[z, s] for z, s in zip(traj.z_samples, traj.states)))
    lines = [f"case {tag}: integrated z = {fmt(z0)} .. {fmt(z1)}",
             "state at end = " + ", ".join(fmt(v) for v in traj.states[-1])]
    if "first_integral" in payload:
        fi = payload["first_integral"]
        lines.append(f"3w'' + zw + w^3 = {fmt(fi['k_mean'])} (drift {fi['k_drift']:.2e})")
    if "chain" in payload:
        ch = payload["chain"]
        lines.append(f"y-equation residual {ch['y_residual']:.2e}, monotone {ch['monotone']}")
    if "lift" in payload:
        lines.append(f"lift residual max {payload['lift']['residual_max']:.2e}")
    _emit(cfg, payload, lines)
    return 0


def _parse_ic(spec: str, L: float, N: int) -> pde.Field:
    """Initial field from ``soliton:alpha=..,A=..[,f0=..,u0=..]`` (centred) or ``file:<csv>``."""
    kind, _, rest = spec.partition(":")
    if kind == "soliton":
        kv = {}
        for item in filter(None, rest.split(",")):
            k, sep, v = item.partition("=")
            if not sep:
                raise UsageError(f"bad soliton parameter {item!r}")
            kv[k.strip()] = float(v)
        if "alpha" not in kv or "A" not in kv:
            raise UsageError("soliton initial data needs alpha=..,A=..")
        A = kv["A"]
        p = so.solve_params(kv["alpha"], A, f0=kv.get("f0", 0.0), u0=kv.get("u0", 0.0),
                            b_phase=-A * L / 2)
        return pde.Field.sample(lambda x: so.eval_soliton(p, x, 0.0), L, N)
    if kind == "file":
        data = np.genfromtxt(rest, delimiter=",", names=True)
        names = data.dtype.names or ()
        col = "u" if "u" in names else names[-1]
        vals = np.atleast_1d(data[col]).astype(float)
        if len(vals) != N:
            raise UsageError(f"{rest}: {len(vals)} samples, --N is {N}")
        return pde.Field(L, N, vals)
    raise UsageError("--ic must be soliton:alpha=..,A=.. or file:<csv>")


def cmd_simulate(cfg: RunConfig, args) -> int:
    f = parse(args.f)
    fld = _parse_ic(args.ic, args.L, args.N)
    dt = args.dt if args.dt else pde.suggest_dt(fld, f)
    rep = pde.evolve(fld, f, args.T, dt, sample_every=args.sample_every,
                     keep_snapshots=bool(args.snapshots))
    payload = rep.as_dict()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(dumps(payload) + "\n")
    if args.snapshots:
        rows = ((s.t, x, u) for s in rep.snapshots for x, u in zip(s.x, s.values))
        write_csv(args.snapshots, ["t", "x", "u"], rows)
    d = rep.drifts()
    lines = [f"T = {fmt(args.T)}, dt = {fmt(dt)}, samples = {len(rep.times)}",
             f"speed_fit = {fmt(rep.speed_fit)}",
             f"mass drift = {d['mass']:.2e}, momentum drift (rel) = {d['momentum_rel']:.2e}",
             f"residual_max = {rep.residual_max:.2e}"]
    _emit(cfg, payload, lines)
    return 0


def cmd_repro(cfg: RunConfig, args) -> int:
    if args.name != "all" and args.name not in repro.SCENARIOS:
        raise UsageError(f"unknown scenario {args.name!r}; choose from "
                         + ", ".join(["all", *repro.SCENARIOS]))
    results = repro.run(args.name, cfg.seed)
    ok = all(r.passed for r in results)
    payload = {"seed": cfg.seed, "passed": ok, "scenarios": [r.as_dict() for r in results]}
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(payload) + "\n")
    if cfg.as_json:
        print(dumps(payload))
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {dumps(r.metrics)}")
            for msg in r.failures:
                print(f"      - {msg}")
    return 0 if ok else 1


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--quiet", action="store_true")

    ap = argparse.ArgumentParser(prog="gkdv", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("classify", parents=[common], help="symmetry classification of f(u)")
    p.add_argument("--f", required=True)
    p.add_argument("--domain", help="lo,hi")
    p.add_argument("--samples", type=int, default=12)

    p = sub.add_parser("travelwave", parents=[common], help="solitary-wave profile")
    p.add_argument("--f", required=True)
    p.add_argument("--w0", type=float, required=True)
    p.add_argument("--zmax", type=float)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--csv")

    p = sub.add_parser("soliton", parents=[common], help="closed-form sech^beta soliton")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--A", type=float, default=0.5)
    p.add_argument("--f0", type=float, default=0.0)
    p.add_argument("--u0", type=float, default=0.0)
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--check", action="store_true")

    p = sub.add_parser("reduce", parents=[common], help="similarity-reduced ODEs")
    p.add_argument("--case", choices=("power", "exp", "log"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--f0", type=float, default=0.0)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--ic", required=True, help="w,w',w''")
    p.add_argument("--span", required=True, help="z0,z1")
    p.add_argument("--lift", help="t0,t1,x0,x1")
    p.add_argument("--csv")

    p = sub.add_parser("simulate", parents=[common], help="pseudo-spectral time integration")
    p.add_argument("--f", required=True)
    p.add_argument("--ic", required=True)
    p.add_argument("--L", type=float, default=80.0)
    p.add_argument("--N", type=int, default=512)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--dt", type=float)
    p.add_argument("--sample-every", type=int, default=100)
    p.add_argument("--report")
    p.add_argument("--snapshots")

    p = sub.add_parser("repro", parents=[common], help="run acceptance scenarios")
    p.add_argument("name", help="scenario name or 'all'")
    p.add_argument("--out", help="also write the JSON report here")
    return ap


COMMANDS = {
    "classify": cmd_classify,
    "travelwave": cmd_travelwave,
    "soliton": cmd_soliton,
    "reduce": cmd_reduce,
    "simulate": cmd_simulate,
    "repro": cmd_repro,
}


def _value_options(ap: argparse.ArgumentParser) -> set:
    opts = set()
    for action in ap._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sp in action.choices.values():
                opts |= _value_options(sp)
        elif action.option_strings and action.nargs is None and action.const is None:
            opts.update(action.option_strings)
    return opts


def _attach_dash_values(argv: list, opts: set) -> list:
    """Turn ``--f -u`` into ``--f=-u`` so values may start with a minus sign."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in opts and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _attach_dash_values(argv, _value_options(ap))
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(args.cmd, getattr(args, "f", None), seed=args.seed, as_json=args.json,
                    quiet=args.quiet)
    try:
        return COMMANDS[args.cmd](cfg, args)
    except UsageError as exc:
        print(dumps({"error": "UsageError", "message": str(exc)}), file=sys.stderr)
        return 2
    except ParseError as exc:
        # a malformed --f is bad input, not a mathematical failure
        print(dumps(exc.to_dict()), file=sys.stderr)
        return 2
    except GkdvError as exc:
        print(dumps(exc.to_dict()), file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
