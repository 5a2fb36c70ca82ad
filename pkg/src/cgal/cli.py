"""Command-line front end.

Subcommands: generate, run, certify, proposition, suite.
Exit codes: 0 success, 1 usage/config error, 2 numerical abort,
3 certification failure.  CGAL_TRACE_DIR overrides the default output
directory.
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analysis, harness, problems

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_CERTIFY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _out_path(args, default_name):
    if args.out:
        return args.out
    return os.path.join(harness.trace_dir(), default_name)


def _config_from_args(args):
    cfg = harness.ExperimentConfig()
    if getattr(args, "config", None):
        harness.load_config(args.config, cfg)
    if getattr(args, "preset", None):
        harness.apply_preset(cfg, args.preset)
    for key in (
        "kind", "n", "m", "seed", "policy", "p", "alpha0", "tau",
        "lambda0", "gamma", "sigma0", "budget", "stride", "reference",
    ):
        v = getattr(args, key, None)
        if v is not None:
            setattr(cfg, key, v)
    if getattr(args, "z0", None):
        cfg.z0 = [float(t) for t in args.z0.split(",")]
    if getattr(args, "x0", None):
        cfg.x0 = (
            [float(t) for t in args.x0.split(",")] if "," in args.x0 else args.x0
        )
    return cfg.validate()


def _add_common(sp):
    sp.add_argument("--config", help="key=value config file")
    sp.add_argument("--out", help="output path")
    sp.add_argument("--preset", help="named preset (paper-ol, paper-ss)")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--stride", type=int)
    sp.add_argument("--jobs", type=int, default=1)


def _add_problem_flags(sp):
    sp.add_argument("--kind", choices=["qcqp", "ball_qp"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--policy", choices=["open_loop", "short", "short_warmstart"])
    sp.add_argument("--p", type=float)
    sp.add_argument("--alpha0", type=float)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--lambda0", type=float)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--sigma0", type=float)
    sp.add_argument("--z0", help="comma-separated initial multipliers")
    sp.add_argument("--x0", help="barycenter | lmo_zero | comma-separated point")
    sp.add_argument("--reference", type=float)


def cmd_generate(args):
    cfg = _config_from_args(args)
    p = harness.build_problem(cfg)
    path = _out_path(args, f"{cfg.kind}_n{cfg.n}_s{cfg.seed}.cfg")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(harness.instance_metadata_text(cfg, p))
    print(f"wrote {path}")
    return EXIT_OK


def _run_one(cfg, path):
    p, trace = harness.run_experiment(cfg)
    harness.write_trace(path, trace, cfg)
    return path


def cmd_run(args):
    cfg = _config_from_args(args)
    seeds = (
        [int(t) for t in args.seeds.split(",")] if getattr(args, "seeds", None) else [cfg.seed]
    )
    jobs = []
    for s in seeds:
        c = harness.parse_config_text(harness.config_text(cfg))
        c.seed = s
        name = f"{c.kind}_n{c.n}_s{s}_{c.policy}.csv"
        path = args.out if args.out and len(seeds) == 1 else _out_path(
            argparse.Namespace(out=None), name
        )
        jobs.append((c, path))
    if args.jobs > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            for path in pool.map(lambda j: _run_one(*j), jobs):
                print(f"wrote {path}")
    else:
        for j in jobs:
            print(f"wrote {_run_one(*j)}")
    return EXIT_OK


def _certify_trace(path, target, reference):
    echo, trace = harness.read_trace(path)
    last_k = trace[-1].k
    lo = max(10, last_k // 100)
    g0 = max((r.feas_inf for r in trace), default=1.0)
    f_ref = reference if reference is not None else trace[-1].objective
    mets = analysis.metrics(trace, f_ref, g0)
    series = [
        (r.k, max(max(v, 1e-16), f)) for r, (v, f) in zip(trace, mets) if r.k >= 1
    ]
    cert = analysis.fit_rate(series, (lo, last_k), quantity=os.path.basename(path))
    ok = cert.slope <= target
    print(
        f"{'pass' if ok else 'FAIL'}  {cert.quantity}  slope={cert.slope:.4f} "
        f"target<={target:.4f}  C={cert.constant:.4g}"
    )
    return ok


def cmd_certify(args):
    if args.suite:
        return cmd_suite(args)
    if not args.trace:
        print("certify: need --trace or --suite", file=sys.stderr)
        return EXIT_USAGE
    ok = all(_certify_trace(t, args.target, args.reference) for t in args.trace)
    return EXIT_OK if ok else EXIT_CERTIFY


def cmd_proposition(args):
    all_ok = True
    if args.single:
        spec = analysis.SequenceSpec(
            kind=args.kind,
            horizon=args.horizon,
            t1=args.t1,
            t2=args.t2,
            eta=args.eta,
            mu=args.mu,
            s=args.s,
        )
        cert = (
            analysis.simulate_prop21(spec)
            if args.kind == "prop21"
            else analysis.simulate_prop22(spec)
        )
        print(f"{cert.quantity}: C={cert.constant:.6g} residual={cert.residual:.3e}")
        return EXIT_OK if cert.certified else EXIT_CERTIFY
    if args.kind in ("prop21", "both"):
        for t1 in (0.3, 0.5, 0.7):
            for t2 in (t1 + 0.2, t1 + 0.5, 1.5):
                try:
                    spec = analysis.SequenceSpec(
                        kind="prop21", horizon=args.horizon, t1=t1, t2=t2
                    )
                    cert = analysis.simulate_prop21(spec)
                except ValueError as e:
                    print(f"skip prop21 t1={t1} t2={t2}: {e}")
                    continue
                ok = cert.certified
                all_ok = all_ok and ok
                print(
                    f"{'pass' if ok else 'FAIL'} prop21 t1={t1} t2={t2} "
                    f"C={cert.constant:.4g} residual={cert.residual:.3e}"
                )
    if args.kind in ("prop22", "both"):
        for eta in (0.5, 0.75, 0.9):
            for mu in (0.5, 1.0):
                for s in (1.0, 1.0 + 1.0 / mu):
                    try:
                        spec = analysis.SequenceSpec(
                            kind="prop22", horizon=args.horizon, eta=eta, mu=mu, s=s
                        )
                        cert = analysis.simulate_prop22(spec)
                    except ValueError as e:
                        print(f"skip prop22 eta={eta} mu={mu} s={s}: {e}")
                        continue
                    ok = cert.certified
                    all_ok = all_ok and ok
                    print(
                        f"{'pass' if ok else 'FAIL'} prop22 eta={eta} mu={mu} s={s} "
                        f"C={cert.constant:.4g} residual={cert.residual:.3e}"
                    )
    return EXIT_OK if all_ok else EXIT_CERTIFY


def _desk_suite(budget):
    """Desk-scale rate certification runs (reduced budgets by default so
    the command stays interactive; pass --budget 100000 for the full
    thresholds)."""
    checks = []

    base = harness.ExperimentConfig(
        kind="qcqp", n=20, m=2, seed=1, tau=0.5, budget=budget, stride=max(budget // 2000, 1)
    )
    # reference value: best of a longer short-stepsize run
    ref_cfg = harness.parse_config_text(harness.config_text(base))
    ref_cfg.policy = "short"
    ref_cfg.budget = 4 * budget
    ref_cfg.stride = max(ref_cfg.budget // 100, 1)
    _, ref_trace = harness.run_experiment(ref_cfg)
    f_ref = min(r.objective for r in ref_trace if r.feas_inf <= 1e-5)

    for policy, target in (("open_loop", -0.30), ("short", -0.40)):
        cfg = harness.parse_config_text(harness.config_text(base))
        cfg.policy = policy
        p, trace = harness.run_experiment(cfg)
        g0 = np.max(np.abs(p.constraints.values(np.zeros_like(p.feasible_set.barycenter))))
        mets = analysis.metrics(trace, f_ref, float(g0))
        series = [
            (r.k, max(max(v, 1e-16), f)) for r, (v, f) in zip(trace, mets) if r.k >= 1
        ]
        cert = analysis.fit_rate(series, (max(10, budget // 100), budget))
        checks.append((f"qcqp n=20 {policy} slope<={target}", cert.slope <= target, cert.slope))

    ball = problems.gen_ball_qp(2, 0)
    x_star, l_star = problems.oracle_optimum_2d(ball, 2001, 40)
    for policy, tau, pexp, target in (
        ("short", 2.0 / 3.0, None, -0.55),
        ("open_loop", 0.8, 0.95, -0.70),
    ):
        cfg = harness.ExperimentConfig(
            kind="ball_qp", n=2, seed=0, policy=policy, tau=tau,
            budget=budget, stride=max(budget // 2000, 1),
        )
        if pexp is not None:
            cfg.p = pexp
        p, trace = harness.run_experiment(cfg)
        g0 = np.max(np.abs(p.constraints.values(np.zeros(2))))
        mets = analysis.metrics(trace, l_star, float(g0))
        series = [
            (r.k, max(max(v, 1e-16), f)) for r, (v, f) in zip(trace, mets) if r.k >= 1
        ]
        cert = analysis.fit_rate(series, (max(10, budget // 100), budget))
        checks.append(
            (f"ball_qp {policy} tau={tau:.3g} slope<={target}", cert.slope <= target, cert.slope)
        )

    cfg = harness.ExperimentConfig(
        kind="ball_qp", n=2, seed=0, policy="short", tau=2.0 / 3.0,
        budget=budget, stride=max(budget // 2000, 1),
    )
    p, trace = harness.run_experiment(cfg)
    err = abs(trace[-1].objective - l_star)
    checks.append(("ball_qp terminal objective vs oracle", err <= 1e-3 * max(l_star, 1.0), err))
    checks.append(("ball_qp terminal feas_inf<=1e-6", trace[-1].feas_inf <= 1e-6, trace[-1].feas_inf))
    worst = analysis.gap_dominates_t(trace, l_star)
    checks.append(("gap dominates T_k", worst <= 0.0, worst))
    return checks


def cmd_suite(args):
    name = args.suite or (args.name if hasattr(args, "name") else None) or "desk"
    if name != "desk":
        print(f"unknown suite {name!r}", file=sys.stderr)
        return EXIT_USAGE
    budget = args.budget or 20000
    try:
        checks = _desk_suite(budget)
    except (FloatingPointError, RuntimeError) as e:
        print(f"numerical abort: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    ok = True
    for label, passed, value in checks:
        ok = ok and passed
        print(f"{'pass' if passed else 'FAIL'}  {label}  value={value:.4g}")
    return EXIT_OK if ok else EXIT_CERTIFY


def build_parser():
    ap = _Parser(prog="cgal", description="conditional-gradient AL solver harness")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("generate", help="generate an instance metadata file")
    _add_common(sp)
    _add_problem_flags(sp)
    sp.set_defaults(fn=cmd_generate)

    sp = sub.add_parser("run", help="run a solve and write a CSV trace")
    _add_common(sp)
    _add_problem_flags(sp)
    sp.add_argument("--seeds", help="comma-separated seed list (with --jobs)")
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("certify", help="fit rate slopes over traces")
    _add_common(sp)
    sp.add_argument("--trace", action="append", help="trace file (repeatable)")
    sp.add_argument("--target", type=float, default=-0.3, help="required slope")
    sp.add_argument("--reference", type=float)
    sp.add_argument("--suite", help="named suite, e.g. desk")
    sp.set_defaults(fn=cmd_certify)

    sp = sub.add_parser("proposition", help="simulate the recursion bounds")
    _add_common(sp)
    sp.add_argument("--kind", choices=["prop21", "prop22", "both"], default="both")
    sp.add_argument("--horizon", type=int, default=1_000_000)
    sp.add_argument("--single", action="store_true", help="single-point mode")
    sp.add_argument("--t1", type=float, default=0.5)
    sp.add_argument("--t2", type=float, default=1.0)
    sp.add_argument("--eta", type=float, default=0.75)
    sp.add_argument("--mu", type=float, default=1.0)
    sp.add_argument("--s", type=float, default=2.0)
    sp.set_defaults(fn=cmd_proposition)

    sp = sub.add_parser("suite", help="run a named check suite")
    _add_common(sp)
    sp.add_argument("--name", default="desk")
    sp.add_argument("--suite", help=argparse.SUPPRESS)
    sp.set_defaults(fn=cmd_suite)

    return ap


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_USAGE
    try:
        return args.fn(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FloatingPointError, ArithmeticError, RuntimeError) as e:
        print(f"numerical abort: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
