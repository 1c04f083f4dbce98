from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laxkit.exactalg import (MultiPoly, charpoly_exact, count_roots_between,
                             eigenvalues_exact, eigenvalues_float,
                             rational_roots, real_roots, solve_square_exact,
                             solve_with_pins, sturm_chain)
from laxkit.exactalg.linalg import (InconsistentSystemError,
                                    adjugate_kernel_column,
                                    kernel_free_columns)


def test_charpoly_matches_numpy():
    rng = np.random.default_rng(0)
    A = rng.integers(-4, 5, size=(5, 5))
    cp = charpoly_exact([[F(int(x)) for x in row] for row in A])
    mine = [float(c.const_value()) for c in cp]
    ref = np.poly(A.astype(float))[::-1]
    assert np.allclose(mine, ref, atol=1e-8)


def test_solve_square_exact_fraction():
    M = [[F(2), F(1)], [F(1), F(3)]]
    x = solve_square_exact(M, [F(5), F(10)])
    assert [v.const_value() for v in x] == [F(1), F(3)]


def test_solve_with_symbolic_entries():
    a = MultiPoly.var("a")
    M = [[MultiPoly.const(2), MultiPoly.zero()], [a, MultiPoly.const(3)]]
    x = solve_square_exact(M, [MultiPoly.const(4), a])
    assert x[0] == MultiPoly.const(2)
    # verify M x = rhs exactly
    assert (M[1][0] * x[0] + M[1][1] * x[1]) == a


def test_pinned_inconsistency_certificate():
    # rank-1 matrix with incompatible rhs
    M = [[F(4), F(-1)], [F(-12), F(3)]]
    free = kernel_free_columns(M)
    with pytest.raises(InconsistentSystemError):
        solve_with_pins(M, [F(1), F(0)], {free[0]: F(0)})


def test_adjugate_kernel():
    M = [[F(4), F(-1)], [F(-12), F(3)]]
    v = adjugate_kernel_column(M)
    assert v is not None
    assert all((M[i][0] * v[0] + M[i][1] * v[1]).is_zero for i in range(2))


def test_rational_roots_with_multiplicity():
    # (x-1)^2 (x+2) (3x-1), built from factors to avoid typos
    import numpy.polynomial.polynomial as P
    c = P.polymul(P.polymul([1, -2, 1], [2, 1]), [-1, 3])
    roots, cof = rational_roots([F(int(x)) for x in c])
    assert (F(1), 2) in roots and (F(-2), 1) in roots and (F(1, 3), 1) in roots
    assert len(cof) == 1


def test_real_roots_symmetric_quadratic():
    assert [(r, m) for r, m in real_roots([F(-1), F(0), F(1)], (-2, 2))] == \
        [(F(-1), 1), (F(1), 1)]


def test_real_roots_cubic():
    rts = real_roots([F(0), F(-1), F(0), F(1)], (-2, 2))
    assert [r for r, _ in rts] == [F(-1), F(0), F(1)]


def test_real_roots_double_root_case():
    # (z^2-2)^2 - 4 = z^2 (z^2 - 4): roots -2, 0 (double), 2
    coeffs = [F(0), F(0), F(-4), F(0), F(1)]
    rts = real_roots(coeffs, (-3, 3))
    assert rts == [(F(-2), 1), (F(0), 2), (F(2), 1)]


def test_real_roots_irrational_bracketed():
    # z^2 - 2: sqrt(2) to tight tolerance
    rts = real_roots([F(-2), F(0), F(1)])
    assert len(rts) == 2
    assert abs(float(rts[1][0]) - 2 ** 0.5) < 1e-10


def test_real_roots_float_path():
    rts = real_roots([-2.0, 0.0, 1.0])
    assert len(rts) == 2 and abs(rts[1][0] - 2 ** 0.5) < 1e-9


def test_sturm_count_cross_check():
    # roots of (x-1)(x-2)(x-3)
    p = [F(-6), F(11), F(-6), F(1)]
    chain = sturm_chain(p)
    assert count_roots_between(chain, F(0), F(4)) == 3
    assert count_roots_between(chain, F(0), F(5, 2)) == 2


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=4))
def test_planted_rational_roots_recovered(roots):
    poly = [F(1)]
    for r in roots:
        poly = [F(0)] + poly
        for i in range(len(poly) - 1):
            poly[i] = poly[i] - F(r) * poly[i + 1]
    found = real_roots(poly)
    total = sum(m for _, m in found)
    assert total == len(roots)
    for r in set(roots):
        assert any(rr == r for rr, _ in found)


def test_eigenvalues_float_identity_and_diag():
    eigs, flags = eigenvalues_float(np.eye(3))
    assert np.allclose(sorted(e.real for e in eigs), [1, 1, 1])
    assert all(flags)
    eigs, flags = eigenvalues_float(np.diag([-1.0, 2.0, 5.0]))
    assert np.allclose(sorted(e.real for e in eigs), [-1, 2, 5])
    assert all(flags)


def test_eigenvalues_float_rejects_bad_input():
    with pytest.raises(ValueError):
        eigenvalues_float(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eigenvalues_float(np.array([[np.nan, 0], [0, 1]]))


def test_eigenvalues_exact_rational_spectrum():
    M = [[F(5), F(0)], [F(1), F(1, 2)]]
    roots, cof = eigenvalues_exact(M)
    assert roots == [(F(1, 2), 1), (F(5), 1)]
    assert len(cof) == 1


def test_eigenvalue_residual_well_conditioned():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(10, 10))
    eigs, _ = eigenvalues_float(A)
    cp = np.poly(A)
    for lam in eigs:
        assert abs(np.polyval(cp, lam)) < 1e-8 * max(1.0, abs(np.polyval(cp, 0)))


def test_ring_matrix_wrapper():
    from laxkit.exactalg import RingMatrix
    A = RingMatrix([[1, 2], [3, 4], [5, 6]])
    B = RingMatrix([[1, 0], [0, 1]])
    assert (A @ B) == A
    with pytest.raises(ValueError):
        B @ A
    with pytest.raises(ValueError, match="rectangular"):
        RingMatrix([[1, 2], [3]])
    v = A @ [F(1), F(-1)]
    assert [x.const_value() for x in v] == [F(-1), F(-1), F(-1)]
    sq = RingMatrix([[2, 0], [0, 3]])
    assert sq.det().const_value() == 6
    with pytest.raises(ValueError):
        A.det()
