"""Instance generators and brute-force reference oracles.

`gen_qcqp` builds the quadratically constrained quadratic program over
the Birkhoff polytope at any scale; `gen_ball_qp` builds a desk-scale
instance over the unit Euclidean ball (a strongly convex set) used for
the improved-rate checks; `oracle_optimum_2d` computes reference optima
for 2-d instances by dense grid search plus local refinement.
"""

from dataclasses import dataclass, field

import numpy as np

from . import lmo as lmo_mod
from .model import ConstraintBlock, FeasibleSetOracle, ProblemInstance, SmoothConvexFn
from .rng import Xoshiro256StarStar


# ---------------------------------------------------------------------------
# QCQP over the Birkhoff polytope
# ---------------------------------------------------------------------------


@dataclass
class QcqpSpec:
    """Generated data of a Birkhoff-polytope QCQP (decision dim n^2).

    A and the Q_i are n x n SPD matrices acting on matrix variables as
    X -> A X, so f(X) = <X - B, A (X - B)>_F and
    g_i(X) = <X, Q_i X>_F + <X, R_i>_F + d_i.
    """

    n: int
    m: int
    seed: int
    A: np.ndarray
    b: np.ndarray  # flat, length n^2
    Q: list = field(default_factory=list)
    r: list = field(default_factory=list)  # flat, length n^2 each
    d: list = field(default_factory=list)
    excluded_vertices: list = field(default_factory=list)  # flat permutation matrices


def _random_orthogonal(n, rng):
    """Seeded random orthogonal matrix: QR of a standard-normal matrix
    with the R diagonal sign-fixed (makes the factorization unique)."""
    M = rng.normal_array(n * n).reshape(n, n)
    Q, R = np.linalg.qr(M)
    return Q * np.sign(np.diag(R))


def _spd_from_spectrum(eigs, rng):
    n = eigs.size
    U = _random_orthogonal(n, rng)
    return (U.T * eigs) @ U


def power_iteration_lmax(A, rel_tol=1e-10, max_iters=100_000):
    """Largest eigenvalue of a symmetric PSD matrix by power iteration."""
    n = A.shape[0]
    v = np.ones(n) / np.sqrt(n)
    lam = 0.0
    for _ in range(max_iters):
        w = A @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        new = float(v @ (A @ v))
        if abs(new - lam) <= rel_tol * max(abs(new), 1e-300):
            return new
        lam = new
    return lam


def _perm_matrix_flat(perm):
    n = perm.size
    P = np.zeros((n, n))
    P[np.arange(n), perm] = 1.0
    return P.ravel()


def _birkhoff_contains(x, n, tol=1e-7):
    X = np.asarray(x).reshape(n, n)
    if np.any(X < -tol):
        return False
    return (
        np.all(np.abs(X.sum(axis=0) - 1.0) <= n * tol)
        and np.all(np.abs(X.sum(axis=1) - 1.0) <= n * tol)
    )


def _birkhoff_sample_interior(n):
    def sample(rng):
        # convex mix of the barycenter and a few random vertices, biased
        # toward the barycenter so points stay in the relative interior
        x = np.full(n * n, 1.0 / n)
        w_bary = 0.5 + 0.4 * rng.uniform()
        left = 1.0 - w_bary
        x *= w_bary
        for _ in range(3):
            w = left * rng.uniform()
            x += w * _perm_matrix_flat(rng.permutation(n))
            left -= w
        x += left * _perm_matrix_flat(rng.permutation(n))
        return x

    return sample


def birkhoff_set(n):
    """Feasible-set oracle for the Birkhoff polytope in flat coordinates."""
    return FeasibleSetOracle(
        lmo=lmo_mod.birkhoff_lmo,
        diameter=float(np.sqrt(2.0 * n)),
        contains=lambda x: _birkhoff_contains(x, n),
        sample_interior=_birkhoff_sample_interior(n),
        barycenter=np.full(n * n, 1.0 / n),
    )


def gen_qcqp(n, m, seed):
    """Seeded QCQP over the Birkhoff polytope.

    f(X) = <X - B, A (X - B)>_F with A SPD (eigenvalues uniform on the
    set {1, ..., 10}); g_i(X) = <X, Q_i X>_F + <X, R_i>_F + d_i with Q_i
    SPD (eigenvalues on {0.1, ..., 1.0}) and R_i entries uniform [0,1].
    d_i is the midpoint -(a_i + b_i)/2 of the interval that makes the
    barycenter strictly feasible and a designated random vertex strictly
    infeasible; vertices failing b_i > a_i are resampled.
    B is the point c + 10 (P_1 - c) past the first excluded vertex.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (1 <= m <= n * (n - 1)):
        raise ValueError("need 1 <= m <= n(n-1)")
    root = Xoshiro256StarStar(seed)
    eig_rng = root.spawn(0)
    orth_rng = root.spawn(1)
    lin_rng = root.spawn(2)
    vert_rng = root.spawn(3)

    c = np.full(n * n, 1.0 / n)

    A = _spd_from_spectrum(
        np.array([1.0 + eig_rng.integer(10) for _ in range(n)]), orth_rng
    )

    Qs, rs, ds, verts = [], [], [], []
    seen = set()
    for i in range(m):
        Qi = _spd_from_spectrum(
            np.array([0.1 * (1 + eig_rng.integer(10)) for _ in range(n)]), orth_rng
        )
        ri = lin_rng.uniform_array(n * n)

        def g_tilde(x):
            X = x.reshape(n, n)
            return float(np.sum(X * (Qi @ X)) + np.dot(ri, x))

        a_i = g_tilde(c)
        ok = False
        for _ in range(1000):
            perm = vert_rng.permutation(n)
            key = tuple(perm.tolist())
            if key in seen:
                continue
            p_flat = _perm_matrix_flat(perm)
            b_i = g_tilde(p_flat)
            if b_i > a_i:
                seen.add(key)
                ok = True
                break
        if not ok:
            raise RuntimeError(
                f"could not find an excludable vertex for constraint {i} "
                f"(n={n}, m={m}, seed={seed})"
            )
        Qs.append(Qi)
        rs.append(ri)
        ds.append(-(a_i + b_i) / 2.0)
        verts.append(p_flat)

    b = c + 10.0 * (verts[0] - c)
    spec = QcqpSpec(n=n, m=m, seed=seed, A=A, b=b, Q=Qs, r=rs, d=ds, excluded_vertices=verts)
    return instance_from_spec(spec)


def instance_from_spec(spec):
    """Assemble a ProblemInstance from generated QCQP data."""
    n, A, b = spec.n, spec.A, spec.b

    def f_eval(x, A=A, b=b, n=n):
        E = (x - b).reshape(n, n)
        return float(np.sum(E * (A @ E)))

    def f_grad(x, A=A, b=b, n=n):
        E = (x - b).reshape(n, n)
        return (2.0 * (A @ E)).ravel()

    lam_max = power_iteration_lmax(A)
    f = SmoothConvexFn(eval=f_eval, grad=f_grad, lipschitz_grad=2.0 * lam_max)

    R_C = float(np.sqrt(n))  # max Frobenius norm over the Birkhoff polytope
    gs, Bs, Ls = [], [], []
    for Qi, ri, di in zip(spec.Q, spec.r, spec.d):
        def gi_eval(x, Qi=Qi, ri=ri, di=di, n=n):
            X = x.reshape(n, n)
            return float(np.sum(X * (Qi @ X)) + np.dot(ri, x) + di)

        def gi_grad(x, Qi=Qi, ri=ri, n=n):
            X = x.reshape(n, n)
            return (2.0 * (Qi @ X)).ravel() + ri

        q_norm = power_iteration_lmax(Qi)
        gs.append(SmoothConvexFn(eval=gi_eval, grad=gi_grad, lipschitz_grad=2.0 * q_norm))
        Bs.append(2.0 * q_norm * R_C + float(np.linalg.norm(ri)))
        Ls.append(2.0 * q_norm)

    p = ProblemInstance(
        f=f,
        constraints=ConstraintBlock(g=gs, grad_bounds=Bs, lip_consts=Ls),
        feasible_set=birkhoff_set(n),
        meta={"generator": "qcqp", "n": spec.n, "m": spec.m, "seed": spec.seed},
    )
    c = np.full(n * n, 1.0 / n)
    g_at_c = p.constraints.values(c)
    if np.any(g_at_c >= 0):
        raise RuntimeError("generated instance: barycenter not strictly feasible")
    for i, v in enumerate(spec.excluded_vertices):
        if p.constraints.g[i].eval(v) <= 0:
            raise RuntimeError(f"generated instance: vertex for constraint {i} not excluded")
    p.meta["spec"] = spec
    return p


# ---------------------------------------------------------------------------
# Ball-constrained QP (strongly convex set)
# ---------------------------------------------------------------------------


def _ball_sample_interior(n):
    def sample(rng):
        d = rng.normal_array(n)
        nd = np.linalg.norm(d)
        if nd == 0.0:
            return np.zeros(n)
        radius = 0.99 * rng.uniform() ** (1.0 / n)
        return (radius / nd) * d

    return sample


def l2ball_set(n, r=1.0):
    """Unit-ball (radius r) oracle with its uniform-convexity modulus
    nu = 1/(2r), q = 2."""
    return FeasibleSetOracle(
        lmo=lambda c: lmo_mod.l2ball_lmo(c, r),
        diameter=2.0 * r,
        uniform_convexity=(1.0 / (2.0 * r), 2.0),
        contains=lambda x: float(np.linalg.norm(x)) <= r + 1e-9,
        sample_interior=_ball_sample_interior(n),
        barycenter=np.zeros(n),
    )


def gen_ball_qp(n, seed):
    """Quadratic over the unit ball with one linear cut.

    f(x) = ||x - b||^2 with ||b|| = 2.5 outside the ball, and
    g_1(x) = <a, x> - 0.5 with a the first basis direction, which cuts
    off the ball point nearest to b.  The optimum therefore sits on the
    ball boundary where the objective gradient does not vanish, which is
    what the improved-rate behavior on strongly convex sets requires.
    For n > 2 the same 2-d geometry is embedded and rotated by a seeded
    orthogonal matrix.  Constants are analytic: L_f = 2, B_1 = ||a||,
    D = 2; g_1 is linear so its gradient modulus is a 1e-12 floor.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    base_a = np.zeros(n)
    base_a[0] = 1.0
    beta = 0.5
    base_b = np.zeros(n)
    base_b[0] = 2.0
    base_b[1] = 1.5
    if n == 2 and seed == 0:
        U = np.eye(n)
    else:
        U = _random_orthogonal(n, Xoshiro256StarStar(seed).spawn(7))
    a = U @ base_a
    b = U @ base_b

    def f_eval(x, b=b):
        d = x - b
        return float(np.dot(d, d))

    def f_grad(x, b=b):
        return 2.0 * (x - b)

    def g_eval(x, a=a, beta=beta):
        return float(np.dot(a, x) - beta)

    def g_grad(x, a=a):
        return a.copy()

    f = SmoothConvexFn(eval=f_eval, grad=f_grad, lipschitz_grad=2.0)
    constraints = ConstraintBlock(
        g=[SmoothConvexFn(eval=g_eval, grad=g_grad, lipschitz_grad=1e-12)],
        grad_bounds=[float(np.linalg.norm(a))],
        lip_consts=[1e-12],
    )
    return ProblemInstance(
        f=f,
        constraints=constraints,
        feasible_set=l2ball_set(n),
        meta={
            "generator": "ball_qp",
            "n": n,
            "seed": seed,
            "a": a,
            "b": b,
            "beta": beta,
            "rotation": U,
        },
    )


# ---------------------------------------------------------------------------
# 2-d reference oracle
# ---------------------------------------------------------------------------


def _feasible(p, x):
    if p.feasible_set.contains is not None and not p.feasible_set.contains(x):
        return False
    if p.constraints.m > 0 and np.any(p.constraints.values(x) > 0):
        return False
    return True


def oracle_optimum_2d(p, grid, refine_iters):
    """Reference optimum of a 2-d instance by exhaustive search.

    Dense `grid` x `grid` sweep over the bounding box of C (probed via
    the LMO along the +-axis directions), keeping feasible points only,
    followed by `refine_iters` rounds of local grid refinement that halve
    the search box around the incumbent each round.
    """
    if grid < 3:
        raise ValueError("grid must be >= 3")
    lo = np.empty(2)
    hi = np.empty(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = 1.0
        lo[i] = p.feasible_set.lmo(e)[i]
        hi[i] = p.feasible_set.lmo(-e)[i]

    xs = np.linspace(lo[0], hi[0], grid)
    ys = np.linspace(lo[1], hi[1], grid)
    best_x, best = None, np.inf
    for xv in xs:
        for yv in ys:
            pt = np.array([xv, yv])
            if _feasible(p, pt):
                val = p.f.eval(pt)
                if val < best:
                    best, best_x = val, pt
    if best_x is None:
        raise RuntimeError("no feasible grid point; grid too coarse or instance infeasible")

    half = np.array([(hi[0] - lo[0]) / (grid - 1), (hi[1] - lo[1]) / (grid - 1)])
    refine_grid = 21
    for _ in range(refine_iters):
        xs = np.linspace(best_x[0] - half[0], best_x[0] + half[0], refine_grid)
        ys = np.linspace(best_x[1] - half[1], best_x[1] + half[1], refine_grid)
        for xv in xs:
            for yv in ys:
                pt = np.array([xv, yv])
                if _feasible(p, pt):
                    val = p.f.eval(pt)
                    if val < best:
                        best, best_x = val, pt
        half *= 0.5
    return best_x, float(best)
