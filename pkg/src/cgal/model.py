"""Problem abstraction: smooth convex pieces, constraint block, feasible set.

All vectors are dense float64 arrays; matrix-shaped variables are
flattened row-major.  Smoothness constants are supplied by the
constructor (generators compute them analytically) and sanity-checked by
`validate_instance`, never estimated at solve time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import Xoshiro256StarStar


@dataclass
class SmoothConvexFn:
    """A convex function with an explicit gradient.

    `lipschitz_grad` is the gradient Lipschitz modulus over the feasible
    set (mandatory for the objective, optional for constraints).
    """

    eval: callable
    grad: callable
    lipschitz_grad: float | None = None


@dataclass
class ConstraintBlock:
    """The m inequality constraints g_i(x) <= 0 with their constants.

    grad_bounds[i] bounds ||grad g_i|| over the feasible set; lip_consts[i]
    is the gradient Lipschitz modulus of g_i.
    """

    g: list
    grad_bounds: list
    lip_consts: list

    def __post_init__(self):
        m = len(self.g)
        if len(self.grad_bounds) != m or len(self.lip_consts) != m:
            raise ValueError("constraint constants must match the number of constraints")
        if m > 0 and (min(self.grad_bounds) <= 0 or min(self.lip_consts) <= 0):
            raise ValueError("B_i and L_gi must be positive")

    @property
    def m(self):
        return len(self.g)

    def values(self, x):
        return np.array([gi.eval(x) for gi in self.g])


@dataclass
class FeasibleSetOracle:
    """LMO access to a compact convex set C.

    `contains` and `sample_interior` are testing aids only; the solver
    never calls them.  `uniform_convexity` is a declared (nu, q) pair,
    certified empirically rather than taken on faith.
    """

    lmo: callable
    diameter: float
    uniform_convexity: tuple | None = None
    contains: callable | None = None
    sample_interior: callable | None = None
    barycenter: np.ndarray | None = None


@dataclass
class ProblemInstance:
    """min f(x) s.t. g(x) <= 0, x in C (C accessed via LMO only)."""

    f: SmoothConvexFn
    constraints: ConstraintBlock
    feasible_set: FeasibleSetOracle
    reference_value: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.f.lipschitz_grad is None or self.f.lipschitz_grad <= 0:
            raise ValueError("objective must declare a positive gradient Lipschitz modulus")
        if self.reference_value is not None and not np.isfinite(self.reference_value):
            raise ValueError("reference_value must be finite")


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst_violation: float


@dataclass
class ValidationReport:
    checks: list

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)

    def __str__(self):
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(f"{status}  {c.name}  worst={c.worst_violation:.3e}")
        return "\n".join(lines)


def _fd_grad(fn, x, h):
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fn(x + e) - fn(x - e)) / (2.0 * h)
    return g


def validate_instance(p, n_samples, seed):
    """Sampled checks of the smoothness/convexity assumptions.

    Draws points from the set's interior sampler and verifies gradient
    consistency (central differences, rel err <= 1e-6), the convexity
    gradient inequality, the gradient bounds B_i, and the set diameter.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = Xoshiro256StarStar(seed)
    sample = p.feasible_set.sample_interior
    if sample is None:
        raise ValueError("instance's set oracle has no interior sampler")
    xs = [sample(rng.spawn(0)) for _ in range(n_samples)]

    checks = []

    fns = [("f", p.f)] + [(f"g{i}", gi) for i, gi in enumerate(p.constraints.g)]
    worst_fd = 0.0
    for _, fn in fns:
        for x in xs:
            h = 1e-6 * (1.0 + np.linalg.norm(x))
            fd = _fd_grad(fn.eval, x, h)
            an = fn.grad(x)
            err = np.linalg.norm(fd - an) / (1.0 + np.linalg.norm(an))
            worst_fd = max(worst_fd, err)
    checks.append(CheckResult("gradient finite-difference consistency", worst_fd <= 1e-6, worst_fd))

    worst_cvx = 0.0
    for _, fn in fns:
        for x, y in zip(xs, reversed(xs)):
            gap = fn.eval(x) + np.dot(fn.grad(x), y - x) - fn.eval(y)
            worst_cvx = max(worst_cvx, gap)
    checks.append(CheckResult("convexity gradient inequality", worst_cvx <= 1e-9, worst_cvx))

    worst_b = 0.0
    for i, gi in enumerate(p.constraints.g):
        B = p.constraints.grad_bounds[i]
        for x in xs:
            excess = np.linalg.norm(gi.grad(x)) - B * (1.0 + 1e-6)
            worst_b = max(worst_b, excess)
    checks.append(CheckResult("constraint gradient bounds B_i", worst_b <= 0.0, worst_b))

    D = p.feasible_set.diameter
    worst_d = 0.0
    for x, y in zip(xs, reversed(xs)):
        worst_d = max(worst_d, np.linalg.norm(x - y) - D)
    checks.append(CheckResult("set diameter bound", worst_d <= 1e-9, worst_d))

    if p.feasible_set.contains is not None:
        bad = 0.0
        probe = rng.spawn(1)
        for _ in range(min(n_samples, 16)):
            c = probe.normal_array(xs[0].size)
            v = p.feasible_set.lmo(c)
            if not p.feasible_set.contains(v):
                bad += 1.0
        checks.append(CheckResult("lmo output membership", bad == 0.0, bad))

    return ValidationReport(checks)
