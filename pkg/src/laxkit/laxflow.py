"""Lax pencils: characteristic curves, isospectral integration and
conservation diagnostics, Poisson-bracket checks, and the dimension
arithmetic of the free rigid body.

Flow convention: integrate_lax solves dA/dt = [B(A), A] with the
commutator taken per h-degree, [A, B]_k = sum_{i+j=k} [A_i, B_j].  The
classical fixed-step fourth-order scheme is used throughout so that
conservation errors have a reproducible dt^4 baseline.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exactalg import MultiPoly, Q, charpoly_exact
from .sysdsl import VectorFieldSystem, gradient


class BlowUpError(RuntimeError):
    def __init__(self, t):
        super().__init__(f"flow blew up near t = {t}")
        self.time = t


# ---------------------------------------------------------------------------
# pencils
# ---------------------------------------------------------------------------

class MatrixPencil:
    """A(h) = sum_k A_k h^k with square coefficient matrices.

    Entries may be floats (flows) or Fractions (exact characteristic
    polynomials); symmetry is a bookkeeping tag, not enforced.
    """

    def __init__(self, coeffs: Dict[int, object], symmetry: str = "none",
                 dim: Optional[int] = None):
        self.coeffs: Dict[int, np.ndarray] = {}
        for k, M in coeffs.items():
            A = np.array(M, dtype=object) if _is_exact(M) else np.array(M, dtype=float)
            if A.ndim != 2 or A.shape[0] != A.shape[1]:
                raise ValueError("pencil coefficients must be square")
            if dim is None:
                dim = A.shape[0]
            elif A.shape[0] != dim:
                raise ValueError("pencil coefficients must share a dimension")
            if _nonzero(A):
                self.coeffs[int(k)] = A
        if dim is None:
            raise ValueError("empty pencil")
        self.dim = dim
        self.symmetry = symmetry

    @property
    def h_range(self) -> Tuple[int, int]:
        if not self.coeffs:
            return (0, 0)
        return (min(self.coeffs), max(self.coeffs))

    @property
    def is_exact(self) -> bool:
        return any(A.dtype == object for A in self.coeffs.values())

    def evaluate(self, h):
        lo, _ = self.h_range
        if lo < 0 and h == 0:
            raise ZeroDivisionError("pencil has h^-1 terms; cannot evaluate at 0")
        if self.is_exact and isinstance(h, (int, Fraction)):
            out = [[Fraction(0)] * self.dim for _ in range(self.dim)]
            for k, A in self.coeffs.items():
                hk = Q(h) ** k
                for i in range(self.dim):
                    for j in range(self.dim):
                        out[i][j] += Q(A[i, j]) * hk
            return out
        out = np.zeros((self.dim, self.dim), dtype=complex if isinstance(h, complex) else float)
        for k, A in self.coeffs.items():
            out = out + A.astype(out.dtype) * (h ** k)
        return out

    def to_float(self) -> "MatrixPencil":
        return MatrixPencil({k: A.astype(float) for k, A in self.coeffs.items()},
                            self.symmetry, dim=self.dim)

    def commutator(self, other: "MatrixPencil",
                   window: Optional[Tuple[int, int]] = None) -> "MatrixPencil":
        """[self, other] per h-degree; degrees outside `window` must vanish
        (up to roundoff for float pencils)."""
        out: Dict[int, np.ndarray] = {}
        for i, A in self.coeffs.items():
            for j, B in other.coeffs.items():
                C = A @ B - B @ A
                k = i + j
                if window is not None and not (window[0] <= k <= window[1]):
                    scale = float(np.max(np.abs(A.astype(float)))) * \
                        float(np.max(np.abs(B.astype(float))))
                    if float(np.max(np.abs(C.astype(float)))) > 1e-10 * (1 + scale):
                        raise ValueError(
                            f"commutator spills h^{k} outside the declared window")
                    continue
                if _nonzero(C):
                    out[k] = out.get(k, 0) + C
        return MatrixPencil(out, dim=self.dim)

    def axpy(self, c: float, other: "MatrixPencil") -> "MatrixPencil":
        out = {k: A.copy() for k, A in self.coeffs.items()}
        for k, B in other.coeffs.items():
            out[k] = out.get(k, 0) + c * B
        return MatrixPencil(out, self.symmetry, dim=self.dim)

    def norm(self) -> float:
        return max((float(np.max(np.abs(A.astype(float)))) for A in self.coeffs.values()),
                   default=0.0)


def _is_exact(M) -> bool:
    arr = np.array(M, dtype=object)
    return any(isinstance(x, Fraction) for x in arr.flat)


def _nonzero(A) -> bool:
    return any(bool(x) for x in np.array(A, dtype=object).flat)


# ---------------------------------------------------------------------------
# spectral curves
# ---------------------------------------------------------------------------

@dataclass
class SpectralCurve:
    """det(A(h) - zI) as a dict (z_degree, h_degree) -> coefficient."""
    coeffs: Dict[Tuple[int, int], object]
    dim: int

    def evaluate(self, z, h):
        return sum(c * (z ** i) * (h ** j) for (i, j), c in self.coeffs.items())

    def drop_small(self, tol: float = 1e-9) -> "SpectralCurve":
        return SpectralCurve({k: v for k, v in self.coeffs.items()
                              if abs(float(v)) > tol}, self.dim)

    def max_coeff_difference(self, other: "SpectralCurve") -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(float(self.coeffs.get(k, 0)) - float(other.coeffs.get(k, 0)))
                    for k in keys), default=0.0)


def _h_nodes(count: int) -> List[Fraction]:
    nodes: List[Fraction] = []
    k = 1
    while len(nodes) < count:
        for cand in (Fraction(k), Fraction(-k), Fraction(1, k + 1), Fraction(-1, k + 1)):
            if cand not in nodes:
                nodes.append(cand)
            if len(nodes) == count:
                break
        k += 1
    return nodes


def pencil_charpoly(p: MatrixPencil) -> SpectralCurve:
    """Recover P(z,h) = det(A(h) - zI) by sampling h and interpolating.

    Exact rational determinants are used when the pencil is exact; the
    h-degree window for the z^k coefficient is (n-k)*[min(l,0), max(m,0)].
    """
    n = p.dim
    lo, hi = p.h_range
    lo, hi = min(lo, 0), max(hi, 0)
    width = n * (hi - lo) + 1
    nodes = _h_nodes(width)
    exact = p.is_exact
    rows = []
    for h0 in nodes:
        A = p.evaluate(h0 if exact else float(h0))
        if exact:
            cp = charpoly_exact([[MultiPoly.const(x) for x in row] for row in A])
            # det(A - zI) = (-1)^n * charpoly(z)
            sign = Fraction(-1) ** n
            rows.append([sign * c.const_value() for c in cp])
        else:
            cp = np.poly(np.asarray(A))[::-1]  # ascending in z of det(zI - A)
            sign = (-1.0) ** n
            rows.append([sign * c for c in cp])

    coeffs: Dict[Tuple[int, int], object] = {}
    for k in range(n + 1):
        wlo, whi = (n - k) * lo, (n - k) * hi
        m = whi - wlo + 1
        if exact:
            V = [[nodes[r] ** (wlo + c) for c in range(m)] for r in range(m)]
            rhs = [rows[r][k] for r in range(m)]
            sol = _solve_fraction_system(V, rhs)
        else:
            V = np.array([[float(nodes[r]) ** (wlo + c) for c in range(m)]
                          for r in range(m)])
            rhs = np.array([rows[r][k] for r in range(m)], dtype=float)
            sol = np.linalg.solve(V, rhs)
        for c in range(m):
            v = sol[c]
            if (exact and v != 0) or (not exact and abs(v) > 1e-9):
                coeffs[(k, wlo + c)] = v
    return SpectralCurve(coeffs, n)


def _solve_fraction_system(A: List[List[Fraction]], b: List[Fraction]) -> List[Fraction]:
    n = len(A)
    M = [list(map(Fraction, A[i])) + [Fraction(b[i])] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# Lax integration
# ---------------------------------------------------------------------------

@dataclass
class LaxTrajectory:
    times: List[float]
    pencils: List[MatrixPencil]
    dt: float
    method_order: int = 4

    def final(self) -> MatrixPencil:
        return self.pencils[-1]


def integrate_lax(p0: MatrixPencil, B: Callable[[MatrixPencil], MatrixPencil],
                  t_end: float, dt: float, sample_every: int = 10,
                  blowup: float = 1e8) -> LaxTrajectory:
    """Fourth-order fixed-step integration of dA/dt = [B(A), A].

    Deterministic for a given (p0, dt); aborts with BlowUpError when the
    max-norm of the state exceeds `blowup`.
    """
    if dt <= 0:
        raise ValueError("step size must be positive")
    window = p0.h_range

    def rhs(P: MatrixPencil) -> MatrixPencil:
        return B(P).commutator(P, window=window)

    steps = int(round(t_end / dt))
    A = p0.to_float()
    times = [0.0]
    snaps = [A]
    for s in range(steps):
        k1 = rhs(A)
        k2 = rhs(A.axpy(dt / 2, k1))
        k3 = rhs(A.axpy(dt / 2, k2))
        k4 = rhs(A.axpy(dt, k3))
        incr = k1.axpy(2.0, k2).axpy(2.0, k3).axpy(1.0, k4)
        A = A.axpy(dt / 6, incr)
        if A.norm() > blowup or not np.isfinite(A.norm()):
            raise BlowUpError((s + 1) * dt)
        if (s + 1) % sample_every == 0 or s == steps - 1:
            times.append((s + 1) * dt)
            snaps.append(A)
    return LaxTrajectory(times=times, pencils=snaps, dt=dt)


def trace_powers(p: MatrixPencil, h: float, k_max: int) -> List[float]:
    A = p.evaluate(h)
    A = np.asarray(A, dtype=float)
    out = []
    Ak = np.eye(p.dim)
    for _ in range(k_max):
        Ak = Ak @ A
        out.append(float(np.trace(Ak)))
    return out


def isospectral_drift(traj: LaxTrajectory, h_samples: Sequence[float],
                      k_max: int) -> float:
    """max over t, h, k<=k_max of |tr A(t,h)^k - tr A(0,h)^k|."""
    if not traj.pencils:
        raise ValueError("empty trajectory")
    base = {h: trace_powers(traj.pencils[0], h, k_max) for h in h_samples}
    drift = 0.0
    for P in traj.pencils[1:]:
        for h in h_samples:
            now = trace_powers(P, h, k_max)
            for a, b in zip(now, base[h]):
                drift = max(drift, abs(a - b))
    return drift


def curve_drift(traj: LaxTrajectory) -> float:
    """Max coefficient drift of the interpolated spectral curve."""
    base = pencil_charpoly(traj.pencils[0])
    worst = 0.0
    for P in traj.pencils[1:]:
        worst = max(worst, base.max_coeff_difference(pencil_charpoly(P)))
    return worst


# ---------------------------------------------------------------------------
# direct integration of polynomial vector fields
# ---------------------------------------------------------------------------

def integrate_system(sys: VectorFieldSystem, z0: Sequence[float], t_end: float,
                     dt: float, constants: Optional[Dict[str, float]] = None,
                     sample_every: int = 50, blowup: float = 1e8):
    """RK4 on z' = f(z); returns (times, states ndarray)."""
    if dt <= 0:
        raise ValueError("step size must be positive")
    consts = dict(constants or {})
    fns = list(sys.equations)
    names = list(sys.variables)

    def rhs(z):
        env = dict(zip(names, z))
        env.update(consts)
        return np.array([f.eval_num(env) for f in fns])

    steps = int(round(t_end / dt))
    z = np.array(z0, dtype=float)
    times = [0.0]
    states = [z.copy()]
    for s in range(steps):
        k1 = rhs(z)
        k2 = rhs(z + dt / 2 * k1)
        k3 = rhs(z + dt / 2 * k2)
        k4 = rhs(z + dt * k3)
        z = z + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(z)) or np.max(np.abs(z)) > blowup:
            raise BlowUpError((s + 1) * dt)
        if (s + 1) % sample_every == 0 or s == steps - 1:
            times.append((s + 1) * dt)
            states.append(z.copy())
    return times, np.array(states)


def invariant_drift(sys: VectorFieldSystem, times, states,
                    constants: Optional[Dict[str, float]] = None) -> Dict[str, float]:
    consts = dict(constants or {})
    out = {}
    for nm, H in sys.invariants.items():
        vals = []
        for z in states:
            env = dict(zip(sys.variables, z))
            env.update(consts)
            vals.append(H.eval_num(env))
        out[nm] = float(np.max(np.abs(np.array(vals) - vals[0])))
    return out


# ---------------------------------------------------------------------------
# Poisson brackets
# ---------------------------------------------------------------------------

def poisson_bracket_poly(sys: VectorFieldSystem, F: MultiPoly,
                         G: MultiPoly) -> MultiPoly:
    if sys.poisson is None:
        raise ValueError("system has no Poisson matrix")
    gF = gradient(F, sys.variables)
    gG = gradient(G, sys.variables)
    out = MultiPoly.zero()
    for i in range(sys.dim):
        for j in range(sys.dim):
            if not sys.poisson[i][j].is_zero:
                out = out + gF[i] * sys.poisson[i][j] * gG[j]
    return out


def poisson_bracket(sys: VectorFieldSystem, F: str, G: str,
                    points: Optional[Sequence[Sequence]] = None):
    """{F,G} for named invariants: the expanded polynomial, or its exact
    values at the given rational points."""
    for nm in (F, G):
        if nm not in sys.invariants:
            raise KeyError(f"unknown invariant '{nm}'")
    br = poisson_bracket_poly(sys, sys.invariants[F], sys.invariants[G])
    if points is None:
        return br
    vals = []
    for pt in points:
        env = {v: Q(x) for v, x in zip(sys.variables, pt)}
        for c in sys.constants:
            env.setdefault(c, Q(1))
        vals.append(br.eval_exact(env))
    return vals


def jacobi_identity_check(sys: VectorFieldSystem,
                          triples: Optional[Sequence[Tuple[str, str, str]]] = None,
                          points: Optional[Sequence[Sequence]] = None,
                          seed: int = 0, n_points: int = 6):
    """Check sum_cyc {F,{G,H}} = 0.

    With no explicit triples the coordinate functions are used, which is
    the full Jacobi identity for the bracket (exact polynomial expansion
    for dim <= 6, exact evaluation at random rational points otherwise).
    Returns (ok, witnesses) where each witness names the offending triple
    and a point where the cycle fails to vanish.
    """
    if sys.poisson is None:
        raise ValueError("system has no Poisson matrix")
    if triples is None:
        idx = range(sys.dim)
        combos = [(i, j, k) for i in idx for j in idx for k in idx
                  if i < j < k]
        fns = [(f"z[{i}],z[{j}],z[{k}]",
                MultiPoly.var(sys.variables[i]),
                MultiPoly.var(sys.variables[j]),
                MultiPoly.var(sys.variables[k])) for i, j, k in combos]
    else:
        fns = [("{%s,%s,%s}" % t,
                sys.invariants[t[0]], sys.invariants[t[1]],
                sys.invariants[t[2]]) for t in triples]

    import random
    rng = random.Random(seed)

    def rand_point():
        return [Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in
                range(sys.dim)]

    pts = [list(map(Q, p)) for p in points] if points else None
    exact_mode = (pts is None) and sys.dim <= 6
    witnesses = []
    for label, F, G, H in fns:
        cyc = (poisson_bracket_poly(sys, F, poisson_bracket_poly(sys, G, H)) +
               poisson_bracket_poly(sys, G, poisson_bracket_poly(sys, H, F)) +
               poisson_bracket_poly(sys, H, poisson_bracket_poly(sys, F, G)))
        if cyc.is_zero:
            continue
        if exact_mode:
            # find a rational witness point
            for _ in range(64):
                pt = rand_point()
                env = dict(zip(sys.variables, pt))
                for c in sys.constants:
                    env.setdefault(c, Q(1))
                v = cyc.eval_exact(env)
                if v != 0:
                    witnesses.append((label, [str(x) for x in pt], str(v)))
                    break
            else:
                witnesses.append((label, None, "nonzero polynomial"))
        else:
            for pt in (pts or [rand_point() for _ in range(n_points)]):
                env = dict(zip(sys.variables, pt))
                for c in sys.constants:
                    env.setdefault(c, Q(1))
                v = cyc.eval_exact(env)
                if v != 0:
                    witnesses.append((label, [str(x) for x in pt], str(v)))
                    break
    return (not witnesses), witnesses


# ---------------------------------------------------------------------------
# rigid-body dimension arithmetic
# ---------------------------------------------------------------------------

def builtin(name: str, **params):
    """Named constructors for the shipped systems and pencils (see
    laxkit.builtins for the catalogue)."""
    from .builtins import builtin as _builtin
    return _builtin(name, **params)


def rigid_body_dims(n: int) -> Dict[str, int]:
    """Orbit dimension, spectral-curve genera and Prym dimension for the
    free n-dimensional rigid body; asserts dim_prym = dim_orbit / 2."""
    if n < 3:
        raise ValueError("need n >= 3")
    dim_orbit = n * (n - 1) // 2 - n // 2
    genus_c = (n - 1) * (n - 2) // 2
    if n % 2 == 0:
        genus_c0 = (n - 2) ** 2 // 4
        dim_prym = n * (n - 2) // 4
    else:
        genus_c0 = (n - 1) * (n - 3) // 4
        dim_prym = (n - 1) ** 2 // 4
    assert 2 * dim_prym == dim_orbit, "Prym dimension must be half the orbit"
    return {"dim_orbit": dim_orbit, "genus_C": genus_c,
            "genus_C0": genus_c0, "dim_prym": dim_prym}
