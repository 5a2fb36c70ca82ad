"""Experiment plumbing: key=value configs, CSV traces, presets.

The trace format `cgal-trace v1` is frozen: one comment header echoing
the full config, then the columns
    iter,objective,feas_inf,feas_2,gap,al_value,alpha,lambda,sigma,z_norm1,wall_micros
with floats printed at 17 significant digits so parsing round-trips
bit-exactly.  wall_micros is informational only and excluded from all
determinism comparisons.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

import numpy as np

from . import problems, solver

TRACE_MAGIC = "# cgal-trace v1"
TRACE_COLUMNS = [
    "iter",
    "objective",
    "feas_inf",
    "feas_2",
    "gap",
    "al_value",
    "alpha",
    "lambda",
    "sigma",
    "z_norm1",
    "wall_micros",
]


@dataclass
class ExperimentConfig:
    kind: str = "qcqp"  # qcqp | ball_qp
    n: int = 10
    m: int = 2
    seed: int = 1
    policy: str = "open_loop"  # open_loop | short | short_warmstart
    p: float = 0.95
    alpha0: float = 1.0
    tau: float = 0.4
    lambda0: float = 1.0
    gamma: float = 0.01
    sigma0: float = 1.0
    z0: list | None = None
    x0: str | list = "barycenter"  # barycenter | lmo_zero | explicit list
    budget: int = 1000
    stride: int = 1
    reference: float | None = None

    def validate(self):
        if self.kind not in ("qcqp", "ball_qp"):
            raise ValueError(f"config key 'kind': unknown value {self.kind!r}")
        if self.policy not in ("open_loop", "short", "short_warmstart"):
            raise ValueError(f"config key 'policy': unknown value {self.policy!r}")
        if self.budget < 0:
            raise ValueError("config key 'budget': must be >= 0")
        if self.stride < 1:
            raise ValueError("config key 'stride': must be >= 1")
        return self


PRESETS = {
    # open-loop reproduction run: lambda_k=(k+1)^0.4, sigma_k=(k+2)^-1.01,
    # alpha_k=(k+1)^-0.95, x0 = barycenter, z0 = (27, 27)
    "paper-ol": dict(
        kind="qcqp",
        policy="open_loop",
        tau=0.4,
        gamma=0.01,
        p=0.95,
        alpha0=1.0,
        lambda0=1.0,
        sigma0=1.0,
        z0=[27.0, 27.0],
        x0="barycenter",
    ),
    # scaled-short-stepsize reproduction run with the warm-start prefactor
    "paper-ss": dict(
        kind="qcqp",
        policy="short_warmstart",
        tau=0.4,
        gamma=0.01,
        lambda0=1.0,
        sigma0=1.0,
        z0=[27.0, 27.0],
        x0="barycenter",
    ),
}


def apply_preset(config, name):
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; have {sorted(PRESETS)}")
    for k, v in PRESETS[name].items():
        setattr(config, k, v)
    return config


# ---------------------------------------------------------------------------
# key=value config files
# ---------------------------------------------------------------------------

_FLOAT_KEYS = {"p", "alpha0", "tau", "lambda0", "gamma", "sigma0", "reference"}
_INT_KEYS = {"n", "m", "seed", "budget", "stride"}
_LIST_KEYS = {"z0"}


def _parse_value(key, raw):
    raw = raw.strip()
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _LIST_KEYS or (key == "x0" and "," in raw):
        return [float(t) for t in raw.split(",") if t.strip()]
    return raw


def parse_config_text(text, config=None):
    cfg = config if config is not None else ExperimentConfig()
    known = {f.name for f in fields(ExperimentConfig)}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip()
        if key not in known:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        try:
            setattr(cfg, key, _parse_value(key, raw))
        except ValueError as e:
            raise ValueError(f"config key {key!r}: {e}") from None
    return cfg


def load_config(path, config=None):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), config)


def config_echo(cfg):
    """One-line key=value echo; pasting it back reproduces the run."""
    parts = []
    for f in fields(ExperimentConfig):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        if isinstance(v, (list, tuple, np.ndarray)):
            v = ",".join("%.17g" % float(t) for t in v)
        elif isinstance(v, float):
            v = "%.17g" % v
        parts.append(f"{f.name}={v}")
    return " ".join(parts)


def config_text(cfg):
    """Multi-line key=value file body for `generate`/`run --config`."""
    return "\n".join(config_echo(cfg).split(" ")) + "\n"


# ---------------------------------------------------------------------------
# building runs from configs
# ---------------------------------------------------------------------------


def build_problem(cfg):
    if cfg.kind == "qcqp":
        p = problems.gen_qcqp(cfg.n, cfg.m, cfg.seed)
    else:
        p = problems.gen_ball_qp(cfg.n, cfg.seed)
    if cfg.reference is not None:
        p.reference_value = cfg.reference
    return p


def build_schedules(cfg):
    if cfg.policy == "open_loop":
        stepsize = solver.OpenLoop(alpha0=cfg.alpha0, p=cfg.p)
    elif cfg.policy == "short":
        stepsize = solver.Short()
    else:
        stepsize = solver.Short(prefactor=solver.warmstart_prefactor)
    return solver.ScheduleSet(
        penalty=solver.PenaltySchedule(lambda0=cfg.lambda0, tau=cfg.tau),
        dual=solver.DualStepSchedule(sigma0=cfg.sigma0, gamma=cfg.gamma),
        stepsize=stepsize,
    )


def build_solver_config(cfg, p):
    if isinstance(cfg.x0, str):
        if cfg.x0 == "barycenter":
            x0 = "barycenter"
        elif cfg.x0 == "lmo_zero":
            dim = p.feasible_set.barycenter.size
            x0 = p.feasible_set.lmo(np.zeros(dim))
        else:
            raise ValueError(f"config key 'x0': unknown value {cfg.x0!r}")
    else:
        x0 = np.asarray(cfg.x0, dtype=np.float64)
    z0 = None if cfg.z0 is None else np.asarray(cfg.z0, dtype=np.float64)
    return solver.SolverConfig(
        x0=x0,
        z0=z0,
        budget=cfg.budget,
        stride=cfg.stride,
        schedules=build_schedules(cfg),
    )


def run_experiment(cfg, callback=None):
    cfg.validate()
    p = build_problem(cfg)
    trace = solver.run(p, build_solver_config(cfg, p), callback=callback)
    return p, trace


# ---------------------------------------------------------------------------
# trace files
# ---------------------------------------------------------------------------


def format_trace(trace, cfg):
    lines = [f"{TRACE_MAGIC}, {config_echo(cfg)}", ",".join(TRACE_COLUMNS)]
    for r in trace:
        vals = [
            str(r.k),
            "%.17g" % r.objective,
            "%.17g" % r.feas_inf,
            "%.17g" % r.feas_2,
            "%.17g" % r.gap,
            "%.17g" % r.al_value,
            "%.17g" % r.alpha,
            "%.17g" % r.lam,
            "%.17g" % r.sigma,
            "%.17g" % r.z_norm1,
            str(r.wall_micros),
        ]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def write_trace(path, trace, cfg):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_trace(trace, cfg))


def parse_trace_text(text):
    lines = text.splitlines()
    if not lines or not lines[0].startswith(TRACE_MAGIC):
        raise ValueError("not a cgal-trace v1 file")
    echo = lines[0][len(TRACE_MAGIC) :].lstrip(", ")
    if len(lines) < 2 or lines[1] != ",".join(TRACE_COLUMNS):
        raise ValueError("trace column header mismatch")
    records = []
    for line in lines[2:]:
        if not line.strip():
            continue
        t = line.split(",")
        if len(t) != len(TRACE_COLUMNS):
            raise ValueError(f"malformed trace row: {line!r}")
        records.append(
            solver.TraceRecord(
                k=int(t[0]),
                objective=float(t[1]),
                feas_inf=float(t[2]),
                feas_2=float(t[3]),
                gap=float(t[4]),
                al_value=float(t[5]),
                alpha=float(t[6]),
                lam=float(t[7]),
                sigma=float(t[8]),
                z_norm1=float(t[9]),
                wall_micros=int(t[10]),
            )
        )
    return echo, records


def read_trace(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_trace_text(fh.read())


def trace_dir(default="."):
    return os.environ.get("CGAL_TRACE_DIR", default)


def strip_wall_micros(text):
    """Trace text with the informational timing column removed, for
    byte-comparisons between runs."""
    out = []
    for i, line in enumerate(text.splitlines()):
        if i >= 2 and line.strip():
            out.append(line.rsplit(",", 1)[0])
        else:
            out.append(line)
    return "\n".join(out)


def instance_metadata_text(cfg, p):
    """Regeneration tuple plus derived constants as key=value lines."""
    lines = [
        "# cgal-instance v1",
        f"kind={cfg.kind}",
        f"n={cfg.n}",
    ]
    if cfg.kind == "qcqp":
        lines.append(f"m={cfg.m}")
    lines.append(f"seed={cfg.seed}")
    lines.append("L_f=%.17g" % p.f.lipschitz_grad)
    lines.append("D=%.17g" % p.feasible_set.diameter)
    for i in range(p.constraints.m):
        lines.append(f"B_{i}=%.17g" % p.constraints.grad_bounds[i])
        lines.append(f"L_g{i}=%.17g" % p.constraints.lip_consts[i])
    spec = p.meta.get("spec")
    if spec is not None:
        for i, (di, v) in enumerate(zip(spec.d, spec.excluded_vertices)):
            perm = np.argmax(np.asarray(v).reshape(spec.n, spec.n), axis=1)
            lines.append(f"d_{i}=%.17g" % di)
            lines.append(f"vertex_{i}=" + ",".join(str(int(j)) for j in perm))
    return "\n".join(lines) + "\n"
