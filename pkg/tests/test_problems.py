import numpy as np
import pytest

from cgal import problems
from cgal.model import validate_instance
from cgal.rng import Xoshiro256StarStar


def test_power_iteration_matches_dense_eigensolver():
    rng = Xoshiro256StarStar(1)
    for n in (3, 8, 15):
        M = rng.normal_array(n * n).reshape(n, n)
        A = M @ M.T + np.eye(n)
        lam = problems.power_iteration_lmax(A)
        assert lam == pytest.approx(np.linalg.eigvalsh(A)[-1], rel=1e-9)


def test_random_orthogonal_is_orthogonal_and_deterministic():
    U1 = problems._random_orthogonal(6, Xoshiro256StarStar(9))
    U2 = problems._random_orthogonal(6, Xoshiro256StarStar(9))
    assert np.array_equal(U1, U2)
    assert np.allclose(U1 @ U1.T, np.eye(6), atol=1e-12)


def test_gen_qcqp_sign_conditions_and_constants():
    p = problems.gen_qcqp(5, 3, 123)
    spec = p.meta["spec"]
    c = np.full(25, 0.2)
    vals = p.constraints.values(c)
    assert np.all(vals < 0)  # barycenter strictly feasible
    for i, v in enumerate(spec.excluded_vertices):
        assert p.constraints.g[i].eval(v) > 0  # vertex excluded
    # spectra as prescribed
    eig_A = np.linalg.eigvalsh(spec.A)
    assert np.all((eig_A >= 1.0 - 1e-9) & (eig_A <= 10.0 + 1e-9))
    for Q in spec.Q:
        eig_Q = np.linalg.eigvalsh(Q)
        assert np.all((eig_Q >= 0.1 - 1e-9) & (eig_Q <= 1.0 + 1e-9))
    # constants against dense linear algebra
    assert p.f.lipschitz_grad == pytest.approx(2.0 * eig_A[-1], rel=1e-8)
    for i, Q in enumerate(spec.Q):
        q2 = np.linalg.eigvalsh(Q)[-1]
        assert p.constraints.lip_consts[i] == pytest.approx(2.0 * q2, rel=1e-8)
        expect_B = 2.0 * q2 * np.sqrt(5.0) + np.linalg.norm(spec.r[i])
        assert p.constraints.grad_bounds[i] == pytest.approx(expect_B, rel=1e-8)
    assert p.feasible_set.diameter == pytest.approx(np.sqrt(10.0))


def test_gen_qcqp_n2_brute_force_vertices():
    p = problems.gen_qcqp(2, 1, 7)
    c = np.full(4, 0.5)
    assert p.constraints.values(c)[0] < 0
    verts = [np.array([1.0, 0.0, 0.0, 1.0]), np.array([0.0, 1.0, 1.0, 0.0])]
    assert any(p.constraints.g[0].eval(v) > 0 for v in verts)


def test_gen_qcqp_deterministic():
    a = problems.gen_qcqp(4, 2, 55)
    b = problems.gen_qcqp(4, 2, 55)
    sa, sb = a.meta["spec"], b.meta["spec"]
    assert np.array_equal(sa.A, sb.A)
    assert np.array_equal(sa.b, sb.b)
    for qa, qb in zip(sa.Q, sb.Q):
        assert np.array_equal(qa, qb)
    assert sa.d == sb.d


def test_gen_qcqp_rejects_bad_arguments():
    with pytest.raises(ValueError):
        problems.gen_qcqp(1, 1, 0)
    with pytest.raises(ValueError):
        problems.gen_qcqp(3, 0, 0)
    with pytest.raises(ValueError):
        problems.gen_qcqp(3, 100, 0)


def test_gen_qcqp_passes_validation():
    p = problems.gen_qcqp(6, 2, 2)
    report = validate_instance(p, n_samples=8, seed=44)
    assert report.all_passed, str(report)


def test_gen_ball_qp_geometry():
    p = problems.gen_ball_qp(2, 0)
    a, b = p.meta["a"], p.meta["b"]
    assert np.linalg.norm(b) == pytest.approx(2.5)
    assert p.f.lipschitz_grad == 2.0
    assert p.feasible_set.diameter == 2.0
    nu, q = p.feasible_set.uniform_convexity
    assert (nu, q) == (0.5, 2.0)
    # the cut removes the ball point closest to b
    closest = b / np.linalg.norm(b)
    assert p.constraints.g[0].eval(closest) > 0
    assert p.constraints.g[0].eval(np.zeros(2)) < 0


def test_gen_ball_qp_rotated_instances_match_canonical_values():
    # rotation preserves the optimum value and all constants
    p0 = problems.gen_ball_qp(2, 0)
    p1 = problems.gen_ball_qp(5, 31)
    _, l0 = problems.oracle_optimum_2d(p0, 201, 30)
    assert p1.constraints.grad_bounds[0] == pytest.approx(p0.constraints.grad_bounds[0])
    # the rotated image of the canonical optimum stays feasible with the
    # same objective value, and no sampled feasible point beats it
    U = p1.meta["rotation"]
    x_opt = U @ np.array([0.5, np.sqrt(0.75), 0.0, 0.0, 0.0])
    assert p1.feasible_set.contains(x_opt)
    assert p1.constraints.values(x_opt)[0] <= 1e-12
    assert p1.f.eval(x_opt) == pytest.approx(l0, abs=1e-7)
    rng = Xoshiro256StarStar(77)
    for _ in range(2000):
        x = p1.feasible_set.sample_interior(rng)
        if p1.constraints.values(x)[0] <= 0:
            assert p1.f.eval(x) >= l0 - 1e-7


def test_gen_ball_qp_gradient_never_vanishes():
    p = problems.gen_ball_qp(3, 12)
    rng = Xoshiro256StarStar(13)
    b_norm = np.linalg.norm(p.meta["b"])
    lo = min(
        np.linalg.norm(p.f.grad(p.feasible_set.sample_interior(rng))) for _ in range(10000)
    )
    assert lo >= 2.0 * (b_norm - 1.0) - 1e-9


def test_oracle_unconstrained_min_at_origin():
    from cgal.model import ConstraintBlock, ProblemInstance, SmoothConvexFn

    p = ProblemInstance(
        f=SmoothConvexFn(eval=lambda x: float(np.dot(x, x)), grad=lambda x: 2.0 * x, lipschitz_grad=2.0),
        constraints=ConstraintBlock(g=[], grad_bounds=[], lip_consts=[]),
        feasible_set=problems.l2ball_set(2),
    )
    x, val = problems.oracle_optimum_2d(p, 201, 30)
    assert val <= 1e-8
    assert np.linalg.norm(x) <= 1e-4


def test_oracle_reproduces_unconstrained_ball_closed_form():
    # without the cut the optimum is b/||b|| with value (||b||-1)^2
    p = problems.gen_ball_qp(2, 0)
    p.constraints.g.clear()
    p.constraints.grad_bounds.clear()
    p.constraints.lip_consts.clear()
    _, val = problems.oracle_optimum_2d(p, 201, 40)
    b_norm = np.linalg.norm(p.meta["b"])
    assert val == pytest.approx((b_norm - 1.0) ** 2, abs=1e-8)


def test_oracle_errors_on_empty_feasible_grid():
    p = problems.gen_ball_qp(2, 0)
    p.constraints.g[0].eval = lambda x: 1.0  # nothing is feasible
    with pytest.raises(RuntimeError):
        problems.oracle_optimum_2d(p, 21, 2)
