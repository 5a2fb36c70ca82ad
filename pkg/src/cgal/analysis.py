"""Diagnostics and certification: run metrics, Lyapunov sequence, the
KKT subsequence index set, rate-slope fitting, and numeric simulation of
the two difference-inequality propositions the convergence proofs rest
on."""

import math
from dataclasses import dataclass

import numpy as np

from . import al


@dataclass
class SequenceSpec:
    """Parameters of one recursion simulation.

    kind "prop21": phi_{k+1} = (1 - tau_k) phi_k + beta_k with
    tau_k = min(c_tau k^{-t1}, 0.99), beta_k = c_beta k^{-t2}; claimed
    rate phi_k = O(k^{-(t2-t1)}).

    kind "prop22": phi_{k+1} = phi_k max{eta, 1 - phi_k^mu} + gamma_k
    with gamma_k = c (k+1)^{-s}; claimed rate phi_k = O(gamma_k^{1/(1+mu)}),
    valid when s <= 1 + 1/mu.
    """

    kind: str
    horizon: int = 1_000_000
    # start above the recursion's asymptote so the scaled sequence
    # approaches its limit from above; the tail certificate then reflects
    # the O-bound instead of the transient climb toward it
    phi0: float = 5.0
    # prop21 parameters
    t1: float = 0.5
    t2: float = 1.0
    c_tau: float = 1.0
    c_beta: float = 1.0
    # prop22 parameters
    eta: float = 0.75
    mu: float = 1.0
    s: float = 2.0
    c_gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("prop21", "prop22"):
            raise ValueError("kind must be 'prop21' or 'prop22'")
        if self.horizon < 1000:
            raise ValueError("horizon too small for a tail certificate")
        if self.phi0 < 0:
            raise ValueError("phi0 must be >= 0")
        if self.kind == "prop21":
            if not (0.0 < self.t1 < 1.0):
                raise ValueError("need t1 in (0,1)")
            if self.t2 <= self.t1:
                raise ValueError("need t2 > t1")
            if self.c_tau <= 0 or self.c_beta < 0:
                raise ValueError("need c_tau > 0 and c_beta >= 0")
        else:
            if not (0.5 <= self.eta < 1.0):
                raise ValueError("need eta in [0.5, 1)")
            if not (0.0 < self.mu <= 1.0):
                raise ValueError("need mu in (0, 1]")
            if self.s > 1.0 + 1.0 / self.mu:
                raise ValueError("need s <= 1 + 1/mu")
            if self.s <= 0 or self.c_gamma <= 0:
                raise ValueError("need s > 0 and c_gamma > 0")


@dataclass
class RateCertificate:
    quantity: str
    slope: float
    constant: float
    residual: float
    window: tuple

    @property
    def certified(self):
        return self.residual <= 0.0


def metrics(trace, f_ref, g_at_zero_inf):
    """Relative objective and feasibility measures per trace record.

    val_k = |obj_k - f_ref| / max{f_ref, 1};
    feas_k = max{feas_inf_k / max{g_at_zero_inf, 1}, 1e-8}.
    """
    if not np.isfinite(f_ref):
        raise ValueError("f_ref must be finite")
    denom_v = max(f_ref, 1.0)
    denom_f = max(g_at_zero_inf, 1.0)
    out = []
    for r in trace:
        val = abs(r.objective - f_ref) / denom_v
        feas = max(r.feas_inf / denom_f, 1e-8)
        out.append((val, feas))
    return out


def t_sequence(trace, l_star):
    """T_k = [al_value_k - L*]_+ per trace record."""
    if not np.isfinite(l_star):
        raise ValueError("L* must be finite")
    return [max(r.al_value - l_star, 0.0) for r in trace]


def kkt_subsequence(weights, gap_values, exponent):
    """Indices where the weighted running average of G_i^iota decreases.

    Returns K = {k >= 1 : avg_k <= avg_{k-1} - 1e-15} where
    avg_k = sum_{i<=k} (xi_i / Gamma_k) G_i^iota, Gamma_k = sum xi_i.
    Along these indices G_k^iota <= avg_k.
    """
    weights = np.asarray(weights, dtype=np.float64)
    gaps = np.asarray(gap_values, dtype=np.float64)
    if weights.size == 0 or weights.size != gaps.size:
        raise ValueError("need equal-length nonempty weights and gaps")
    if np.any(weights <= 0) or np.any(gaps < 0):
        raise ValueError("weights must be positive, gaps nonnegative")
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    powered = gaps**exponent
    gamma = np.cumsum(weights)
    avg = np.cumsum(weights * powered) / gamma
    picked = []
    for k in range(1, weights.size):
        if avg[k] <= avg[k - 1] - 1e-15:
            picked.append(k)
    return picked


def fit_rate(series, window, quantity="value", target_rate=None):
    """Log-log least-squares slope over a k-window, plus a tail-bound
    residual against C k^{target_rate} with C fitted on the window's
    first half and the residual taken over the second half."""
    k_lo, k_hi = window
    if k_lo < 1 or k_hi <= k_lo:
        raise ValueError("window bounds must satisfy 1 <= k_lo < k_hi")
    pts = [(k, v) for k, v in series if k_lo <= k <= k_hi]
    if len(pts) < 10:
        raise ValueError("need at least 10 points in the window")
    if any(v <= 0 for _, v in pts):
        raise ValueError("values must be positive (floor them first)")
    lk = np.array([math.log(k) for k, _ in pts])
    lv = np.array([math.log(v) for _, v in pts])
    slope, intercept = np.polyfit(lk, lv, 1)
    rate = slope if target_rate is None else target_rate
    mid = math.sqrt(k_lo * k_hi)
    fit_c = max((v * k ** (-rate) for k, v in pts if k <= mid), default=0.0)
    residual = max((v - fit_c * k**rate for k, v in pts if k > mid), default=-np.inf)
    return RateCertificate(
        quantity=quantity,
        slope=float(slope),
        constant=float(fit_c),
        residual=float(residual),
        window=(k_lo, k_hi),
    )


def _tail_certificate(spec, phis, scale, quantity):
    """Fit C on k in [K/100, K/10]; residual is the excess sup of
    phi_k/scale_k over the tail k in [K/10, K].

    C is the larger of the early-window supremum and a Richardson
    extrapolation of the window endpoints (the scaled sequence converges
    to its limit with a ~1/k correction, from either side; the
    extrapolation upper-bounds the limit when the approach is from
    below, the supremum does when it is from above)."""
    K = spec.horizon
    lo, hi = max(K // 100, 1), max(K // 10, 2)
    fit_c = 0.0
    for k in range(lo, hi + 1):
        fit_c = max(fit_c, phis[k] / scale(k))
    mid = int(round(math.sqrt(lo * hi)))
    f_lo, f_mid, f_hi = (phis[k] / scale(k) for k in (lo, mid, hi))
    d1, d2 = f_mid - f_lo, f_hi - f_mid
    if d1 > 0 and 0 < d2 < d1:
        # increments shrink geometrically across log-spaced checkpoints;
        # sum the remaining geometric tail to upper-bound the limit
        rho = d2 / d1
        fit_c = max(fit_c, f_hi + d2 * rho / (1.0 - rho))
    residual = -np.inf
    for k in range(hi, K + 1):
        residual = max(residual, phis[k] / scale(k) - fit_c)
    return RateCertificate(
        quantity=quantity,
        slope=float("nan"),
        constant=fit_c,
        residual=residual,
        window=(hi, K),
    )


def simulate_prop21(spec):
    """Run phi_{k+1} = (1 - tau_k) phi_k + beta_k and certify the
    k^{-(t2-t1)} tail bound."""
    if spec.kind != "prop21":
        raise ValueError("spec.kind must be 'prop21'")
    K = spec.horizon
    phis = [0.0] * (K + 1)
    phis[0] = spec.phi0
    phi = spec.phi0
    t1, t2, c_tau, c_beta = spec.t1, spec.t2, spec.c_tau, spec.c_beta
    for k in range(1, K + 1):
        tau = min(c_tau * k**-t1, 0.99)
        phi = (1.0 - tau) * phi + c_beta * k**-t2
        phis[k] = phi
    rate = t2 - t1
    cert = _tail_certificate(spec, phis, lambda k: k**-rate, "prop21 phi_k k^{t2-t1}")
    cert.slope = -rate
    return cert


def simulate_prop22(spec):
    """Run phi_{k+1} = phi_k max{eta, 1 - phi_k^mu} + gamma_k and certify
    the gamma_k^{1/(1+mu)} tail bound."""
    if spec.kind != "prop22":
        raise ValueError("spec.kind must be 'prop22'")
    K = spec.horizon
    phis = [0.0] * (K + 1)
    phis[0] = spec.phi0
    phi = spec.phi0
    eta, mu, s, c = spec.eta, spec.mu, spec.s, spec.c_gamma
    for k in range(1, K + 1):
        gamma = c * float(k + 1) ** -s
        phi = phi * max(eta, 1.0 - phi**mu) + gamma
        phis[k] = phi
    expo = 1.0 / (1.0 + mu)

    def scale(k):
        return (c * float(k + 1) ** -s) ** expo

    cert = _tail_certificate(spec, phis, scale, "prop22 phi_k gamma_k^{-1/(1+mu)}")
    cert.slope = -s * expo
    return cert


def gap_dominates_t(trace, l_star, tol=1e-8):
    """Check G_k >= T_k - tol at every traced iterate; returns the worst
    violation (negative or zero means the bound holds)."""
    worst = -np.inf
    for r, t in zip(trace, t_sequence(trace, l_star)):
        worst = max(worst, t - r.gap - tol)
    return worst


def dual_norm_bound(trace, z0_norm1, m_hat, sigma_sum):
    """Worst excess of ||z^k||_1 over ||z^0||_1 + 1.5 M_g sum(sigma)."""
    bound = z0_norm1 + 1.5 * m_hat * sigma_sum
    return max(r.z_norm1 - bound for r in trace)


def estimate_constraint_bound(p, n_samples, seed):
    """Sampled bound M_g on max_i |g_i(x)| over the feasible set."""
    from .rng import Xoshiro256StarStar

    rng = Xoshiro256StarStar(seed)
    sample = p.feasible_set.sample_interior
    m_hat = 0.0
    stream = rng.spawn(11)
    for _ in range(n_samples):
        x = sample(stream)
        m_hat = max(m_hat, float(np.max(np.abs(p.constraints.values(x)))))
    # vertices stress the bound harder than interior points
    probe = rng.spawn(12)
    dim = p.feasible_set.barycenter.size
    for _ in range(n_samples // 10 + 1):
        v = p.feasible_set.lmo(probe.normal_array(dim))
        m_hat = max(m_hat, float(np.max(np.abs(p.constraints.values(v)))))
    return m_hat


def descent_checker(p, collect=None):
    """Callback for solver.run that verifies the per-iteration descent
    inequality of the short stepsize and the quadratic upper bound of
    the open-loop stepsize.  Appends worst violations to `collect`."""
    out = collect if collect is not None else []

    def cb(prev, nxt, lam):
        ev_prev = al.al_eval(p, prev.x, prev.z, lam, g_vals=prev.g_x)
        ev_next = al.al_eval(p, nxt.x, prev.z, lam, g_vals=nxt.g_x)
        alpha, G = nxt.last_alpha, nxt.last_gap
        d = nxt.last_v - prev.x
        dist2 = float(np.dot(d, d))
        lipF = ev_prev.lip_estimate + p.f.lipschitz_grad
        slack = 1e-9 * (1.0 + abs(ev_prev.al_value))
        short_bound = ev_prev.al_value - 0.5 * alpha * G + slack
        ol_bound = ev_prev.al_value - alpha * G + 0.5 * lipF * alpha * alpha * dist2 + slack
        out.append(
            (
                ev_next.al_value - short_bound,
                ev_next.al_value - ol_bound,
            )
        )

    cb.violations = out
    return cb
