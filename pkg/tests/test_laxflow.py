from fractions import Fraction as F

import numpy as np
import pytest

from laxkit import builtins as bi
from laxkit import laxflow as lf
from laxkit.exactalg import MultiPoly


def test_pencil_validation():
    with pytest.raises(ValueError):
        lf.MatrixPencil({0: np.ones((2, 3))})
    with pytest.raises(ValueError):
        lf.MatrixPencil({0: np.eye(2), 1: np.eye(3)})
    p = lf.MatrixPencil({-1: [[0, 1], [0, 0]], 0: np.eye(2)})
    with pytest.raises(ZeroDivisionError):
        p.evaluate(0.0)


def test_charpoly_constant_diag():
    p = lf.MatrixPencil({0: [[F(1), F(0)], [F(0), F(2)]]})
    curve = lf.pencil_charpoly(p)
    # det(A - zI) = (1-z)(2-z) = z^2 - 3z + 2
    assert curve.coeffs == {(0, 0): F(2), (1, 0): F(-3), (2, 0): F(1)}


def test_charpoly_toda_structure_matches_floquet():
    from laxkit.jacobispec import PeriodicJacobi, floquet_polynomial
    a = [F(1), F(1, 2), F(3, 2)]
    b = [F(0), F(1, 3), F(-1, 3)]
    pencil, _ = bi.toda_periodic_pencil(a, b)
    curve = lf.pencil_charpoly(pencil)
    N = 3
    alpha = F(1) * a[0] * a[1] * a[2]
    P = floquet_polynomial(PeriodicJacobi(a, b))
    sign = F((-1) ** (N + 1))
    # det(A(h)-zI) = sign*(alpha*(h + 1/h) - P(z))
    assert curve.coeffs[(0, 1)] == sign * alpha
    assert curve.coeffs[(0, -1)] == sign * alpha
    for k in range(N + 1):
        assert curve.coeffs.get((k, 0), F(0)) == -sign * P[k]


def test_charpoly_toda_h_inversion_symmetry():
    rng = np.random.default_rng(2)
    pencil, _ = bi.toda_periodic_pencil(list(rng.uniform(0.5, 1.5, 4)),
                                        list(rng.uniform(-0.5, 0.5, 4)))
    curve = lf.pencil_charpoly(pencil).drop_small()
    for (i, j), v in curve.coeffs.items():
        assert abs(float(v) - float(curve.coeffs.get((i, -j), 0))) < 1e-8


def test_charpoly_manakov_parity():
    pencil, _ = bi.manakov_pencil([1, 2, 3, 4], bi.random_skew(4, seed=1))
    curve = lf.pencil_charpoly(pencil).drop_small()
    n = pencil.dim
    # P(z,h) = (-1)^n P(-z,-h): only monomials with i+j even survive
    for (i, j), v in curve.coeffs.items():
        assert (i + j) % 2 == 0, ((i, j), v)


def test_commutator_window_violation_signals_malformed_b():
    A = lf.MatrixPencil({0: bi.random_skew(3, seed=0)})

    def bad_B(P):
        return lf.MatrixPencil({2: np.diag([1.0, 2.0, 3.0]),
                                0: bi.random_skew(3, seed=1)})
    with pytest.raises(ValueError, match="window"):
        bad_B(A).commutator(A, window=A.h_range)


def test_integrate_frozen_when_b_zero():
    pencil, _ = bi.toda_periodic_pencil([1.0, 1.2, 0.8], [0.1, -0.2, 0.3])

    def B0(P):
        return lf.MatrixPencil({0: np.zeros((3, 3))})
    traj = lf.integrate_lax(pencil, B0, 1.0, 1e-2)
    assert lf.isospectral_drift(traj, [1.0, 2.0], 3) == 0.0
    for k, M in traj.final().coeffs.items():
        assert np.array_equal(M, pencil.coeffs[k].astype(float))


def test_integrate_rejects_bad_step():
    pencil, B = bi.toda_periodic_pencil([1.0, 1.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        lf.integrate_lax(pencil, B, 1.0, 0.0)


def test_blowup_detection():
    from laxkit.laxflow import BlowUpError, integrate_system
    from laxkit.sysdsl import parse_system
    sys_ = parse_system("system s\nvars x\neq x = x^2\n")
    with pytest.raises(BlowUpError) as exc:
        integrate_system(sys_, [2.0], 5.0, 1e-3)
    assert exc.value.time < 1.0  # pole of 1/(1/2 - t) is at t = 0.5


def test_curve_constancy_along_flow():
    rng = np.random.default_rng(4)
    pencil, B = bi.toda_periodic_pencil(list(rng.uniform(0.6, 1.4, 3)),
                                        list(rng.uniform(-0.4, 0.4, 3)))
    traj = lf.integrate_lax(pencil, B, 1.0, 1e-3, sample_every=500)
    assert lf.curve_drift(traj) < 1e-8


def test_kvm_direct_integration_conserves_invariants():
    sys_ = bi.builtin_system("kvm")
    rng = np.random.default_rng(11)
    z0 = rng.uniform(0.3, 1.0, 5)
    times, states = lf.integrate_system(sys_, z0, 1.0, 1e-3)
    drifts = lf.invariant_drift(sys_, times, states)
    assert max(drifts.values()) < 1e-9


def test_poisson_bracket_modes():
    sys_ = bi.builtin_system("henon-heiles")
    br = lf.poisson_bracket(sys_, "H1", "H2")
    assert br.is_zero
    assert lf.poisson_bracket(sys_, "H1", "H1").is_zero
    vals = lf.poisson_bracket(sys_, "H1", "H2",
                              points=[[1, 2, 3, 4], [F(1, 2), 0, 1, F(5, 3)]])
    assert vals == [0, 0]
    with pytest.raises(KeyError):
        lf.poisson_bracket(sys_, "H1", "nope")


def test_jacobi_identity_pass_and_witness():
    sys_ = bi.builtin_system("kvm")
    ok, wit = lf.jacobi_identity_check(sys_)
    assert ok and not wit
    from dataclasses import replace
    bad = [row[:] for row in sys_.poisson]
    bad[0][1] = -bad[0][1]
    broken = replace(sys_, poisson=bad)
    ok2, wit2 = lf.jacobi_identity_check(broken)
    assert not ok2
    assert wit2 and wit2[0][1] is not None  # witness point reported


def test_jacobi_identity_constant_bracket_trivial():
    sys_ = bi.builtin_system("henon-heiles")
    ok, wit = lf.jacobi_identity_check(sys_)
    assert ok


def test_rigid_body_dims_table():
    assert lf.rigid_body_dims(4) == {"dim_orbit": 4, "genus_C": 3,
                                     "genus_C0": 1, "dim_prym": 2}
    assert lf.rigid_body_dims(3) == {"dim_orbit": 2, "genus_C": 1,
                                     "genus_C0": 0, "dim_prym": 1}
    assert lf.rigid_body_dims(5)["dim_prym"] == 4
    with pytest.raises(ValueError):
        lf.rigid_body_dims(2)


def test_euler_arnold_flow_is_metric_flow():
    # dX/dt from the pencil bracket equals [X, lam*X] directly
    al = [1.0, 2.0, 3.0, 4.0]
    be = [1.0, 4.0, 9.0, 16.0]
    X = bi.random_skew(4, seed=5)
    pencil, B = bi.euler_arnold_pencil(al, be, X)
    rhs = B(pencil).commutator(pencil)
    lam = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            if i != j:
                lam[i, j] = (be[i] - be[j]) / (al[i] - al[j])
    direct = X @ (lam * X) - (lam * X) @ X
    assert np.allclose(rhs.coeffs[0], direct, atol=1e-12)
    assert 1 not in rhs.coeffs or np.allclose(rhs.coeffs.get(1, 0), 0)


def test_neumann_structure_preserved():
    rng = np.random.default_rng(6)
    x = rng.normal(size=3)
    x /= np.linalg.norm(x)
    y = rng.normal(size=3)
    y -= (y @ x) * x
    pencil, B = bi.neumann_pencil([1.0, 2.0, 3.0], x, y)
    traj = lf.integrate_lax(pencil, B, 0.5, 1e-3, sample_every=100)
    # h^2 coefficient (the diagonal alpha) must stay exactly in place
    for P in traj.pencils:
        assert np.allclose(P.coeffs[2], np.diag([1.0, 2.0, 3.0]), atol=1e-9)
    assert lf.isospectral_drift(traj, [1.0, -2.0], 3) < 1e-8


def test_neumann_constraints():
    with pytest.raises(ValueError, match=r"\|x\| = 1"):
        bi.neumann_pencil([1.0, 2.0, 3.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0])


def test_neumann_branch_point_count():
    rng = np.random.default_rng(9)
    n = 4
    x = rng.normal(size=n)
    x /= np.linalg.norm(x)
    y = rng.normal(size=n)
    y -= (y @ x) * x
    pts = bi.neumann_branch_points(list(range(1, n + 1)), x, y)
    assert len(pts) == 2 * n - 1  # plus the point at infinity makes 2n


def test_jacobi_identity_invariant_triples_and_points():
    sys_ = bi.builtin_system("kvm")
    ok, wit = lf.jacobi_identity_check(sys_, triples=[("H1", "H2", "H3")])
    assert ok and not wit
    ok, wit = lf.jacobi_identity_check(
        sys_, points=[[F(1), F(2), F(1, 2), F(3), F(1)]])
    assert ok
