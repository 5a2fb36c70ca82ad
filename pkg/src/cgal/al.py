"""Augmented-Lagrangian machinery.

The scalar penalty
    psi_t(u, v) = uv + (t/2) u^2      if t u + v >= 0
                = -v^2 / (2t)         otherwise
aggregates over the constraints into Psi_lambda(x, z), whose gradient is
sum_i [lambda g_i(x) + z_i]_+ grad g_i(x) and whose Lipschitz modulus is
L_Psi(x, z) = sum_i (lambda B_i^2 + L_gi [lambda g_i(x) + z_i]_+).
The AL value is L_lambda(x, z) = f(x) + Psi_lambda(x, z) for x in C.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class AlEvaluation:
    psi_value: float
    grad_F: np.ndarray
    lip_estimate: float
    al_value: float
    active_multipliers: np.ndarray


def _check_lambda(lam):
    if not np.isfinite(lam) or lam <= 0:
        raise ValueError("penalty parameter must be positive and finite")


def psi_scalar(t, u, v):
    """Scalar quadratic-penalty term; continuous in (u, v)."""
    if not np.isfinite(t) or t <= 0:
        raise ValueError("t must be positive and finite")
    if not (np.isfinite(u) and np.isfinite(v)):
        raise ValueError("non-finite input to psi_scalar")
    if t * u + v >= 0:
        return u * v + 0.5 * t * u * u
    return -v * v / (2.0 * t)


def psi_aggregate(p, x, z, lam):
    """Psi_lambda(x, z) = sum_i psi_lambda(g_i(x), z_i)."""
    _check_lambda(lam)
    z = np.asarray(z, dtype=np.float64)
    total = 0.0
    for i, gi in enumerate(p.constraints.g):
        total += psi_scalar(lam, gi.eval(x), z[i])
    return total


def grad_psi(p, x, z, lam):
    """grad_x Psi_lambda(x, z) = sum_i [lambda g_i(x) + z_i]_+ grad g_i(x)."""
    _check_lambda(lam)
    z = np.asarray(z, dtype=np.float64)
    out = np.zeros_like(np.asarray(x, dtype=np.float64))
    for i, gi in enumerate(p.constraints.g):
        w = lam * gi.eval(x) + z[i]
        if w > 0:
            out += w * gi.grad(x)
    return out


def lipschitz_psi(p, x, z, lam):
    """L_Psi(x, z); a valid Lipschitz modulus of grad_x Psi_lambda on C."""
    _check_lambda(lam)
    z = np.asarray(z, dtype=np.float64)
    total = 0.0
    for i, gi in enumerate(p.constraints.g):
        hinge = max(lam * gi.eval(x) + z[i], 0.0)
        total += lam * p.constraints.grad_bounds[i] ** 2 + p.constraints.lip_consts[i] * hinge
    return total


def al_eval(p, x, z, lam, g_vals=None):
    """All AL quantities with one pass over the constraints.

    `g_vals` lets callers reuse constraint values computed elsewhere
    (constraint evaluation dominates cost for quadratic g_i).
    """
    _check_lambda(lam)
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    m = p.constraints.m
    if g_vals is None:
        g_vals = p.constraints.values(x)
    psi = 0.0
    lip = 0.0
    mult = np.zeros(m)
    grad = p.f.grad(x)
    for i in range(m):
        gi_val = g_vals[i]
        if not np.isfinite(gi_val):
            raise FloatingPointError(f"non-finite value for constraint {i}")
        psi += psi_scalar(lam, gi_val, z[i])
        w = lam * gi_val + z[i]
        hinge = w if w > 0 else 0.0
        mult[i] = hinge
        lip += lam * p.constraints.grad_bounds[i] ** 2 + p.constraints.lip_consts[i] * hinge
        if hinge > 0:
            grad = grad + hinge * p.constraints.g[i].grad(x)
    f_val = p.f.eval(x)
    if not np.isfinite(f_val):
        raise FloatingPointError("non-finite objective value")
    return AlEvaluation(
        psi_value=psi,
        grad_F=grad,
        lip_estimate=lip,
        al_value=f_val + psi,
        active_multipliers=mult,
    )
