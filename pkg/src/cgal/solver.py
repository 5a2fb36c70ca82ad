"""Single-loop conditional-gradient augmented-Lagrangian iteration.

One step per iteration: a linear minimization over C at the AL gradient,
a convex-combination move with an open-loop or adaptive ("short")
stepsize, then a multiplier update with a diminishing dual stepsize
    z <- z + sigma * max{-z/lambda, g(x_next)}.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import al


@dataclass(frozen=True)
class PenaltySchedule:
    """lambda_k = lambda0 * (k+1)^tau, increasing and unbounded."""

    lambda0: float = 1.0
    tau: float = 0.5

    def __post_init__(self):
        if self.lambda0 <= 0 or not (0.0 < self.tau < 1.0):
            raise ValueError("need lambda0 > 0 and tau in (0, 1)")

    def __call__(self, k):
        return self.lambda0 * (k + 1.0) ** self.tau


@dataclass(frozen=True)
class DualStepSchedule:
    """sigma_k = min(sigma0 / (k+2)^(1+gamma), lambda_k); positive, summable."""

    sigma0: float = 1.0
    gamma: float = 0.01

    def __post_init__(self):
        if self.sigma0 <= 0 or self.gamma <= 0:
            raise ValueError("need sigma0 > 0 and gamma > 0")

    def __call__(self, k, lam):
        return min(self.sigma0 / (k + 2.0) ** (1.0 + self.gamma), lam)


@dataclass(frozen=True)
class OpenLoop:
    """alpha_k = min(1, alpha0 * (k+1)^(-p))."""

    alpha0: float = 1.0
    p: float = 0.95

    def __post_init__(self):
        if not (0.0 < self.alpha0 <= 1.0) or not (0.0 < self.p < 1.0):
            raise ValueError("need alpha0 in (0,1] and p in (0,1)")


@dataclass(frozen=True)
class Short:
    """Adaptive stepsize min{1, prefactor(k) * G / ((L_Psi+L_f) ||v-x||^2)}."""

    prefactor: callable = None


def warmstart_prefactor(k):
    """Scaled-short-stepsize warm start: 1020 up to k=900, then a linear
    drop to 1 at k=1000, constant afterwards."""
    if k <= 900:
        return 1020.0
    return max(1020.0 - (k - 900) * 10.2, 1.0)


@dataclass(frozen=True)
class ScheduleSet:
    penalty: PenaltySchedule = field(default_factory=PenaltySchedule)
    dual: DualStepSchedule = field(default_factory=DualStepSchedule)
    stepsize: object = field(default_factory=OpenLoop)


@dataclass
class SolverState:
    k: int
    x: np.ndarray
    z: np.ndarray
    lam: float = 0.0
    last_gap: float = 0.0
    last_v: np.ndarray | None = None
    last_alpha: float = 0.0
    g_x: np.ndarray | None = None  # cached g(x), set by step()


@dataclass
class TraceRecord:
    k: int
    objective: float
    feas_inf: float
    feas_2: float
    gap: float
    al_value: float
    alpha: float
    lam: float
    sigma: float
    z_norm1: float
    wall_micros: int


@dataclass
class SolverConfig:
    x0: np.ndarray | str = "barycenter"
    z0: np.ndarray | None = None
    budget: int = 1000
    stride: int = 1
    schedules: ScheduleSet = field(default_factory=ScheduleSet)
    early_stop_tol: float | None = None  # off by default; theory is budget-based


def gap(p, x, z, lam):
    """Gap G = <grad F_lambda(x, z), x - v> with v the LMO output.

    Nonnegative for an exact LMO; small negative rounding is clamped,
    anything beyond -1e-8 signals a broken oracle or gradient.
    """
    ev = al.al_eval(p, x, z, lam)
    return _gap_from_grad(p, x, ev.grad_F)


def _gap_from_grad(p, x, grad_F):
    v = p.feasible_set.lmo(grad_F)
    G = float(np.dot(grad_F, x - v))
    if G < 0.0:
        if G < -1e-8:
            raise FloatingPointError(f"negative gap {G}: broken LMO or gradient")
        G = 0.0
    return G, v


def short_alpha(G, dist2, lipF, prefactor=1.0):
    """Short stepsize from the gap and the squared move length."""
    if G < 0 or dist2 < 0 or lipF <= 0 or prefactor < 1.0:
        raise ValueError("invalid short-stepsize inputs")
    if G == 0.0:
        return 0.0
    if dist2 == 0.0:
        # cannot occur for an exact LMO; clamp defensively
        return 1.0
    return min(1.0, prefactor * G / (lipF * dist2))


def dual_update(z, g_next, sigma, lam):
    """z + sigma * max{-z/lambda, g_next}; stays componentwise >= 0."""
    if sigma > lam:
        raise ValueError("dual stepsize must satisfy sigma <= lambda")
    return z + sigma * np.maximum(-z / lam, g_next)


def step(p, state, schedules):
    """One Algorithm iteration: exactly one LMO call, one AL gradient."""
    k = state.k
    lam = schedules.penalty(k)
    sigma = schedules.dual(k, lam)
    ev = al.al_eval(p, state.x, state.z, lam, g_vals=state.g_x)
    G, v = _gap_from_grad(p, state.x, ev.grad_F)

    policy = schedules.stepsize
    if isinstance(policy, OpenLoop):
        alpha = min(1.0, policy.alpha0 * (k + 1.0) ** (-policy.p))
    else:
        d = v - state.x
        dist2 = float(np.dot(d, d))
        lipF = ev.lip_estimate + p.f.lipschitz_grad
        pre = 1.0 if policy.prefactor is None else float(policy.prefactor(k))
        alpha = short_alpha(G, dist2, lipF, pre)

    x_next = state.x + alpha * (v - state.x)
    g_next = p.constraints.values(x_next)
    if p.constraints.m > 0:
        z_next = dual_update(state.z, g_next, sigma, lam)
        if np.any(z_next < -1e-12):
            raise FloatingPointError("dual iterate went negative")
        z_next = np.maximum(z_next, 0.0)
    else:
        z_next = state.z
    return SolverState(
        k=k + 1,
        x=x_next,
        z=z_next,
        lam=lam,
        last_gap=G,
        last_v=v,
        last_alpha=alpha,
        g_x=g_next,
    )


def _record(p, state, schedules, t0):
    k = state.k
    lam = schedules.penalty(k)
    sigma = schedules.dual(k, lam)
    g_vals = state.g_x if state.g_x is not None else p.constraints.values(state.x)
    ev = al.al_eval(p, state.x, state.z, lam, g_vals=g_vals)
    G, v = _gap_from_grad(p, state.x, ev.grad_F)
    policy = schedules.stepsize
    if isinstance(policy, OpenLoop):
        alpha = min(1.0, policy.alpha0 * (k + 1.0) ** (-policy.p))
    else:
        d = v - state.x
        dist2 = float(np.dot(d, d))
        lipF = ev.lip_estimate + p.f.lipschitz_grad
        pre = 1.0 if policy.prefactor is None else float(policy.prefactor(k))
        alpha = short_alpha(G, dist2, lipF, pre)
    pos = np.maximum(g_vals, 0.0) if g_vals.size else np.zeros(0)
    return TraceRecord(
        k=k,
        objective=float(p.f.eval(state.x)),
        feas_inf=float(pos.max()) if pos.size else 0.0,
        feas_2=float(np.linalg.norm(pos)) if pos.size else 0.0,
        gap=G,
        al_value=ev.al_value,
        alpha=alpha,
        lam=lam,
        sigma=sigma,
        z_norm1=float(np.abs(state.z).sum()),
        wall_micros=(time.perf_counter_ns() - t0) // 1000,
    )


def initial_state(p, config):
    if isinstance(config.x0, str):
        if config.x0 == "barycenter" and p.feasible_set.barycenter is not None:
            x0 = np.array(p.feasible_set.barycenter, dtype=np.float64)
        else:
            x0 = p.feasible_set.lmo(np.zeros_like(_probe_dim(p)))
    else:
        x0 = np.asarray(config.x0, dtype=np.float64)
    m = p.constraints.m
    z0 = np.zeros(m) if config.z0 is None else np.asarray(config.z0, dtype=np.float64)
    if z0.size != m:
        raise ValueError("z0 has wrong length")
    if np.any(z0 < 0):
        raise ValueError("z0 must be nonnegative")
    return SolverState(k=0, x=x0, z=z0, g_x=p.constraints.values(x0))


def _probe_dim(p):
    if p.feasible_set.barycenter is not None:
        return np.zeros_like(np.asarray(p.feasible_set.barycenter))
    raise ValueError("cannot infer dimension; supply x0 explicitly")


def run(p, config, callback=None):
    """Run a fixed budget of steps, emitting a trace every `stride`
    iterations plus the first and last iterate.  Deterministic given the
    config.  `callback(prev_state, next_state, lam)` is invoked after
    every step (used by tests for per-iteration descent checks)."""
    if config.budget < 0:
        raise ValueError("budget must be >= 0")
    if config.stride < 1:
        raise ValueError("stride must be >= 1")
    state = initial_state(p, config)
    t0 = time.perf_counter_ns()
    trace = [_record(p, state, config.schedules, t0)]
    for _ in range(config.budget):
        prev = state
        state = step(p, state, config.schedules)
        if callback is not None:
            callback(prev, state, state.lam)
        if state.k % config.stride == 0 or state.k == config.budget:
            trace.append(_record(p, state, config.schedules, t0))
            if (
                config.early_stop_tol is not None
                and max(trace[-1].feas_inf, trace[-1].gap) <= config.early_stop_tol
            ):
                break
    # drop duplicate of the final record when stride also hit it
    dedup = []
    for r in trace:
        if dedup and dedup[-1].k == r.k:
            continue
        dedup.append(r)
    return dedup
