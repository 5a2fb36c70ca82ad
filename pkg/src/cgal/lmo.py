"""Linear minimization oracles.

The solver touches its feasible set only through these routines.  The
Birkhoff oracle is a dense Jonker-Volgenant assignment solver (shortest
augmenting paths with dual potentials, O(n^3)); the ball/simplex/box
oracles are closed-form.  Brute-force reference oracles live next to the
fast ones so tests can certify optimality.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


@dataclass(frozen=True)
class AssignmentSolution:
    """Row-to-column assignment minimizing the summed cost."""

    permutation: np.ndarray
    cost: float


@njit(cache=True)
def _jv_assign(cost):
    # Shortest augmenting path with column potentials; ties go to the
    # lowest column index (strict < in the delta scan).
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    # match[j] = row assigned to column j; column n is the virtual start.
    match = np.full(n + 1, -1, dtype=np.int64)
    way = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        match[n] = i
        j0 = n
        minv = np.full(n, np.inf)
        used = np.zeros(n + 1, dtype=np.bool_)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = np.inf
            j1 = -1
            for j in range(n):
                if not used[j]:
                    cur = cost[i0, j] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                elif j < n:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == -1:
                break
        while j0 != n:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    perm = np.empty(n, dtype=np.int64)
    for j in range(n):
        perm[match[j]] = j
    return perm


def solve_assignment(cost):
    """Minimum-cost row-to-column assignment of a square cost matrix."""
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError("cost matrix must be square")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix must be finite")
    n = cost.shape[0]
    if n == 0:
        return AssignmentSolution(np.empty(0, dtype=np.int64), 0.0)
    perm = _jv_assign(np.ascontiguousarray(cost))
    total = float(cost[np.arange(n), perm].sum())
    return AssignmentSolution(perm, total)


def brute_force_assignment(cost):
    """Exhaustive reference; only viable for small n."""
    cost = np.asarray(cost, dtype=np.float64)
    n = cost.shape[0]
    best_perm = None
    best = np.inf
    rows = np.arange(n)
    for p in permutations(range(n)):
        c = cost[rows, list(p)].sum()
        if c < best:
            best = c
            best_perm = p
    return AssignmentSolution(np.array(best_perm, dtype=np.int64), float(best))


def birkhoff_lmo(C):
    """Permutation matrix minimizing <C, P>_F over doubly stochastic matrices.

    Accepts either an (n, n) cost matrix or its row-major flattening of
    length n^2; the output matches the input's shape.
    """
    C = np.asarray(C, dtype=np.float64)
    flat = C.ndim == 1
    if flat:
        n = int(round(np.sqrt(C.size)))
        if n * n != C.size:
            raise ValueError("flat input length must be a perfect square")
        C = C.reshape(n, n)
    sol = solve_assignment(C)
    n = C.shape[0]
    P = np.zeros((n, n))
    P[np.arange(n), sol.permutation] = 1.0
    return P.ravel() if flat else P


def l2ball_lmo(c, r=1.0):
    """Minimizer of <c, v> over the Euclidean ball of radius r."""
    if r <= 0:
        raise ValueError("radius must be positive")
    c = np.asarray(c, dtype=np.float64)
    norm = np.linalg.norm(c)
    if norm == 0.0:
        return np.zeros_like(c)
    return -(r / norm) * c


def lpball_lmo(c, r, p):
    """Minimizer of <c, v> over the l_p ball of radius r, p >= 2.

    Closed form via the conjugate exponent q' = p/(p-1):
    v_i = -r sign(c_i) |c_i|^{q'-1} / ||c||_{q'}^{q'-1}.
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    if r <= 0:
        raise ValueError("radius must be positive")
    c = np.asarray(c, dtype=np.float64)
    if not np.any(c):
        raise ValueError("c must be nonzero for the l_p oracle")
    q = p / (p - 1.0)
    a = np.abs(c) ** (q - 1.0)
    nq = np.linalg.norm(c, ord=q)
    return -r * np.sign(c) * a / (nq ** (q - 1.0))


def simplex_lmo(c):
    """Vertex e_{argmin c} of the probability simplex (lowest index on ties)."""
    c = np.asarray(c, dtype=np.float64)
    v = np.zeros_like(c)
    v[int(np.argmin(c))] = 1.0
    return v


def box_lmo(c, lo, hi):
    """Corner of [lo, hi] minimizing <c, v>; ties (c_i = 0) pick hi_i."""
    c = np.asarray(c, dtype=np.float64)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if np.any(lo > hi):
        raise ValueError("lo must be <= hi componentwise")
    return np.where(c > 0, lo, hi)


@dataclass
class WitnessReport:
    """Outcome of the uniform-convexity sampling check."""

    trials: int
    passes: int
    worst_margin: float

    @property
    def pass_rate(self):
        return self.passes / self.trials


def uniform_convexity_witness(oracle, trials, seed, tol=1e-9):
    """Sample-check the declared (nu, q) modulus of an oracle's set.

    For random directions u and set points v, the minimizer vhat = lmo(u)
    of a (nu, q)-uniformly convex set satisfies
    <-u, vhat - v> >= (nu/2) ||vhat - v||^q ||u||.
    """
    from .rng import Xoshiro256StarStar

    if oracle.uniform_convexity is None:
        raise ValueError("oracle declares no (nu, q) pair")
    nu, q = oracle.uniform_convexity
    rng = Xoshiro256StarStar(seed)
    dim = oracle.sample_interior(rng.spawn(0)).size
    u_rng = rng.spawn(1)
    v_rng = rng.spawn(2)
    passes = 0
    worst = np.inf
    for _ in range(trials):
        u = u_rng.normal_array(dim)
        v = oracle.sample_interior(v_rng)
        vhat = oracle.lmo(u)
        d = vhat - v
        margin = -np.dot(u, d) - 0.5 * nu * np.linalg.norm(d) ** q * np.linalg.norm(u)
        worst = min(worst, margin)
        if margin >= -tol:
            passes += 1
    return WitnessReport(trials=trials, passes=passes, worst_margin=float(worst))
