"""Spectral theory of periodic Jacobi matrices and the continued-fraction
/ orthogonal-polynomial correspondence.

Conventions.  A period-N matrix stores entries a_1..a_N (off-diagonals)
and b_1..b_N (diagonals), with a_0 identified with a_N by periodicity.
The Floquet pencil A(h) is the N x N symmetric tridiagonal matrix with
corner entries a_N h^{+-1}; its determinant is

    F(h, 1/h, z) = det(A(h) - zI) = (-1)^(N+1) (alpha (h + 1/h) - P(z)),

with alpha the product of the a_j and P monic of degree N, computed here
by the two-determinant formula (full tridiagonal determinant minus a_N^2
times the interior one, normalized by (-1)^N).  Branch points are the 2N
roots of P^2 - 4 alpha^2; the auxiliary spectrum consists of the N-1
zeros of the (N,N) cofactor, one per gap.

The spectral measure of the half-line operator attached to the fraction
a0^2/(z - b1 - a1^2/(z - b2 - ...)) scales as (a0/a_N)^2 times the one
with the natural normalization a0 = a_N; the measure returned here
carries that factor so its transform always matches the fraction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exactalg import Q, real_roots


class DegenerateSpectrumError(ValueError):
    pass


@dataclass
class PeriodicJacobi:
    a: List
    b: List

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError("a and b must have the same period")
        if len(self.a) < 2:
            raise ValueError("period must be at least 2")
        if any(float(x) == 0.0 for x in self.a):
            raise ValueError("all off-diagonal entries a_j must be nonzero "
                             "(alpha = prod a_j != 0)")

    @property
    def period(self) -> int:
        return len(self.a)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for x in list(self.a) + list(self.b))

    def alpha(self):
        out = Q(1) if self.is_exact else 1.0
        for x in self.a:
            out = out * (Q(x) if self.is_exact else float(x))
        return out

    def sequences(self, length: int) -> Tuple[List, List]:
        """Periodic extensions a_1..a_length, b_1..b_length."""
        n = self.period
        return ([self.a[i % n] for i in range(length)],
                [self.b[i % n] for i in range(length)])


# -- characteristic polynomials --------------------------------------------

def _tridiag_charpoly(diag: Sequence, off: Sequence, exact: bool) -> List:
    """Ascending coefficients of det(tridiag(diag, off) - z I)."""
    zero = Q(0) if exact else 0.0
    one = Q(1) if exact else 1.0
    Dprev: List = [one]            # empty determinant
    D: List = [Q(diag[0]) if exact else float(diag[0]), -one] if diag else [one]
    for k in range(1, len(diag)):
        bk = Q(diag[k]) if exact else float(diag[k])
        ak2 = (Q(off[k - 1]) if exact else float(off[k - 1])) ** 2
        # D_k = (b_k - z) D_{k-1} - a_{k-1}^2 D_{k-2}
        nxt = [zero] * (len(D) + 1)
        for i, c in enumerate(D):
            nxt[i] += bk * c
            nxt[i + 1] -= c
        for i, c in enumerate(Dprev):
            nxt[i] -= ak2 * c
        Dprev, D = D, nxt
    return D if diag else [one]


def floquet_polynomial(m: PeriodicJacobi) -> List:
    """Monic P(z) with det(A(h)-zI) = (-1)^(N+1)(alpha(h+1/h) - P(z));
    ascending coefficients."""
    N = m.period
    exact = m.is_exact
    full = _tridiag_charpoly(m.b, m.a[: N - 1], exact)
    interior = _tridiag_charpoly(m.b[1: N - 1], m.a[1: N - 2], exact)
    aN2 = (Q(m.a[-1]) if exact else float(m.a[-1])) ** 2
    n = max(len(full), len(interior))
    P = [(full[i] if i < len(full) else (Q(0) if exact else 0.0)) -
         aN2 * (interior[i] if i < len(interior) else (Q(0) if exact else 0.0))
         for i in range(n)]
    sign = (-1) ** N
    return [sign * c for c in P]


def cofactor_nn_polynomial(m: PeriodicJacobi) -> List:
    """The (N,N) cofactor of A(h)-zI: the degree-(N-1) characteristic
    determinant of the truncated tridiagonal block (h-independent)."""
    N = m.period
    return _tridiag_charpoly(m.b[: N - 1], m.a[: N - 2], m.is_exact)


def _poly_eval(coeffs: Sequence, x):
    if isinstance(x, (float, complex)):
        v = 0.0
        for c in reversed(list(coeffs)):
            v = v * x + float(c)
        return v
    v = Q(0)
    for c in reversed(list(coeffs)):
        v = v * Q(x) + Q(c)
    return v


# -- spectral data -----------------------------------------------------------

@dataclass
class SpectralData:
    matrix: PeriodicJacobi
    P: List                                  # ascending, monic degree N
    alpha: float
    branch_points: List[Tuple[float, int]]   # sorted, with multiplicity
    stable_bands: List[Tuple[float, float]]
    gaps: List[Tuple[float, float]]
    aux_spectrum: List[float]
    cofactor: List

    @property
    def genus(self) -> int:
        return self.matrix.period - 1

    def F(self, h, z):
        N = self.matrix.period
        return ((-1) ** (N + 1)) * (float(self.alpha) * (h + 1.0 / h) -
                                    _poly_eval(self.P, z))

    def h_of_z(self, z, sheet: int = -1):
        """Solutions of alpha h^2 - P(z) h + alpha = 0; sheet -1 picks the
        root inside the unit circle (the one meromorphic at z=infinity on
        the lower sheet)."""
        al = float(self.alpha)
        Pz = _poly_eval(self.P, z)
        disc = Pz * Pz - 4 * al * al
        sq = np.sqrt(complex(disc))
        r1 = (Pz + sq) / (2 * al)
        r2 = (Pz - sq) / (2 * al)
        roots = sorted([r1, r2], key=abs)
        return roots[0] if sheet < 0 else roots[1]

    def interlacing_ok(self, tol: float = 1e-9) -> bool:
        """Interlacing check: the j-th auxiliary eigenvalue lies in the
        j-th gap (closed gaps collapse to points)."""
        if len(self.aux_spectrum) != len(self.gaps):
            return False
        for s, (lo, hi) in zip(self.aux_spectrum, self.gaps):
            if not (lo - tol <= s <= hi + tol):
                return False
        return True


def spectral_data(m: PeriodicJacobi, tol: float = 1e-12) -> SpectralData:
    """Bands, gaps and auxiliary spectrum of a periodic Jacobi matrix.

    Branch points come from exact Sturm isolation when the data is
    rational; an interlacing violation raises (it would mean the root
    ordering itself is broken)."""
    N = m.period
    P = floquet_polynomial(m)
    alpha = m.alpha()
    exact = m.is_exact
    # P^2 - 4 alpha^2
    n = len(P)
    sq = [Q(0) if exact else 0.0] * (2 * n - 1)
    for i, ci in enumerate(P):
        for j, cj in enumerate(P):
            sq[i + j] += ci * cj
    sq[0] -= 4 * (alpha * alpha)
    roots = real_roots(sq, tol=tol)
    branch = [(float(r), mult) for r, mult in roots]
    flat: List[float] = []
    for r, mult in branch:
        flat.extend([r] * mult)
    if len(flat) != 2 * N:
        raise DegenerateSpectrumError(
            f"expected {2*N} real branch points, found {len(flat)}")
    bands = [(flat[2 * j], flat[2 * j + 1]) for j in range(N)]
    gaps = [(flat[2 * j + 1], flat[2 * j + 2]) for j in range(N - 1)]
    cof = cofactor_nn_polynomial(m)
    aux = [float(r) for r, _ in real_roots(cof, tol=tol)]
    if len(aux) != N - 1:
        raise DegenerateSpectrumError(
            f"expected {N-1} auxiliary eigenvalues, found {len(aux)}")
    data = SpectralData(matrix=m, P=P, alpha=float(alpha),
                        branch_points=branch, stable_bands=bands, gaps=gaps,
                        aux_spectrum=sorted(aux), cofactor=cof)
    if not data.interlacing_ok(tol=1e-7):
        raise DegenerateSpectrumError(
            "auxiliary spectrum fails to interlace the gaps; "
            "root ordering is inconsistent")
    return data


# -- continued fraction / Padé ----------------------------------------------

def gamma_fraction(a: Sequence, b: Sequence, a0, z, depth: int,
                   safety: float = 1e-280):
    """Bottom-up evaluation of the depth-truncated fraction
    a0^2/(z - b_1 - a_1^2/(z - b_2 - ... - a_{depth-1}^2/(z - b_depth))).

    For period-N input (len(a) == len(b) == N) the sequences are extended
    periodically.  Raises ZeroDivisionError naming the level if a partial
    denominator collapses below the safety threshold."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n = len(a)
    aa = [float(a[i % n]) for i in range(depth)]
    bb = [float(b[i % n]) for i in range(depth)]
    w = 0.0
    for lev in range(depth, 0, -1):
        den = z - bb[lev - 1] - w
        if abs(den) < safety:
            raise ZeroDivisionError(
                f"continued fraction denominator vanished at level {lev}")
        if lev == 1:
            return (float(a0) ** 2) / den
        w = (aa[lev - 2] ** 2) / den
    raise AssertionError("unreachable")


def pade(a: Sequence, b: Sequence, a0, k: int) -> Tuple[List[Fraction], List[Fraction]]:
    """Numerator/denominator (A_k, B_k) of the k-th convergent, ascending
    exact coefficients: deg A_k = k-1, deg B_k = k, B_k monic.

    Both satisfy y_j = (z - b_j) y_{j-1} - a_{j-1}^2 y_{j-2} with seeds
    B_0 = 1, B_{-1} = 0 and A_1 = a0^2, A_0 = 0."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = len(a)
    aa = [Q(a[i % n]) for i in range(k)]          # aa[0] = a_1
    bb = [Q(b[i % n]) for i in range(k)]          # bb[0] = b_1
    Bprev2, Bprev = [Fraction(0)], [Fraction(1)]  # B_{-1}, B_0
    Aprev2, Aprev = [Fraction(0)], [Fraction(0)]  # placeholder, A_0
    Acur, Bcur = Aprev, Bprev
    for j in range(1, k + 1):
        c = aa[j - 2] ** 2 if j >= 2 else Fraction(0)
        Bcur = _poly_linear_combo(bb[j - 1], Bprev, c, Bprev2)
        if j == 1:
            Acur = [Q(a0) ** 2]
        else:
            Acur = _poly_linear_combo(bb[j - 1], Aprev, c, Aprev2)
        Bprev2, Bprev = Bprev, Bcur
        Aprev2, Aprev = Aprev, Acur
    return Acur, Bcur


def _poly_linear_combo(bj: Fraction, y1: List[Fraction], c: Fraction,
                       y2: List[Fraction]) -> List[Fraction]:
    """(z - bj) * y1 - c * y2, ascending coefficients."""
    out = [Fraction(0)] * (len(y1) + 1)
    for i, v in enumerate(y1):
        out[i] -= bj * v
        out[i + 1] += v
    for i, v in enumerate(y2):
        out[i] -= c * v
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def moments(a: Sequence, b: Sequence, a0, count: int) -> List[Fraction]:
    """c_j = a0^2 <T^j e0, e0> for the half-line operator with the
    periodically extended entries; exact."""
    if count < 1:
        raise ValueError("count must be >= 1")
    n = len(a)
    size = count + 2
    aa = [Q(a[i % n]) for i in range(size)]
    bb = [Q(b[i % n]) for i in range(size)]
    v = [Fraction(0)] * size
    v[0] = Fraction(1)
    out = [Q(a0) ** 2]
    for _ in range(count - 1):
        w = [Fraction(0)] * size
        for i in range(size):
            if v[i] == 0:
                continue
            w[i] += bb[i] * v[i]
            if i + 1 < size:
                w[i + 1] += aa[i] * v[i]
            if i > 0:
                w[i - 1] += aa[i - 1] * v[i]
        v = w
        out.append((Q(a0) ** 2) * v[0])
    return out


def pade_series(a: Sequence, b: Sequence, a0, k: int, terms: int) -> List[Fraction]:
    """Expansion of A_k/B_k at z = infinity: coefficients d_j of
    sum d_j / z^(j+1), exact."""
    A, B = pade(a, b, a0, k)
    # A(z)/B(z) = (1/z) * Arev(u)/Brev(u) with u = 1/z
    Arev = [Fraction(0)] * (k) ;
    for i, c in enumerate(A):
        Arev[(k - 1) - i] = c
    Brev = [Fraction(0)] * (k + 1)
    for i, c in enumerate(B):
        Brev[k - i] = c
    out = []
    rem = Arev + [Fraction(0)] * terms
    for j in range(terms):
        d = rem[j] / Brev[0]
        out.append(d)
        for i in range(len(Brev)):
            if j + i < len(rem):
                rem[j + i] -= d * Brev[i]
    return out


# -- Stieltjes measure --------------------------------------------------------

@dataclass
class StieltjesMeasure:
    atoms: List[Tuple[float, float]]
    bands: List[Tuple[float, float]]
    density: Callable[[float], float]
    a0: float
    nodes: int = 160

    def integrate(self, f: Callable[[float], float]) -> float:
        """Atom sum plus per-band Gauss-Legendre with the sine substitution
        x = mid + rad sin(theta), which absorbs the square-root edges."""
        total = sum(mass * f(x) for x, mass in self.atoms)
        tq, wq = np.polynomial.legendre.leggauss(self.nodes)
        for lo, hi in self.bands:
            if hi - lo < 1e-13:
                continue
            mid, rad = (lo + hi) / 2, (hi - lo) / 2
            theta = (np.pi / 2) * tq
            xs = mid + rad * np.sin(theta)
            jac = (np.pi / 2) * rad * np.cos(theta)
            total += float(np.sum(wq * jac *
                                  np.array([self.density(x) * f(x) for x in xs])))
        return total

    def total_mass(self) -> float:
        return self.integrate(lambda x: 1.0)

    def cauchy_transform(self, z: complex) -> complex:
        total = sum(mass / (z - x) for x, mass in self.atoms)
        tq, wq = np.polynomial.legendre.leggauss(self.nodes)
        for lo, hi in self.bands:
            if hi - lo < 1e-13:
                continue
            mid, rad = (lo + hi) / 2, (hi - lo) / 2
            theta = (np.pi / 2) * tq
            xs = mid + rad * np.sin(theta)
            jac = (np.pi / 2) * rad * np.cos(theta)
            vals = np.array([self.density(x) for x in xs]) / (z - xs)
            total += complex(np.sum(wq * jac * vals))
        return total


def measure_decompose(m: PeriodicJacobi, a0,
                      data: Optional[SpectralData] = None,
                      zero_mass_tol: float = 1e-11,
                      nodes: int = 160) -> StieltjesMeasure:
    """Atoms-plus-density decomposition of the spectral measure.

    Atom at the j-th auxiliary eigenvalue sigma_j, evaluated on the
    |h| < 1 sheet:

        mass_j = s * (alpha h(sigma_j) + (-1)^N aN^2 Lambda(sigma_j))
                 / prod_{l != j} (sigma_j - sigma_l),

    with Lambda the interior (N-2)-determinant (empty = 1 for N = 2) and
    s = (a0/a_N)^2 the half-line rescaling.  Closed-gap atoms come out
    with zero mass and are dropped.  The continuous part is
    s/(2 pi) * sqrt(4 alpha^2 - P^2)/|cofactor| on each stable band, with
    the branch fixed by positivity (asserted)."""
    if data is None:
        data = spectral_data(m)
    N = m.period
    aux = data.aux_spectrum
    if len(set(np.round(aux, 9))) != len(aux):
        raise DegenerateSpectrumError("coincident auxiliary eigenvalues")
    aN = float(m.a[-1])
    scale = (float(a0) / aN) ** 2
    alpha = data.alpha
    interior = _tridiag_charpoly(m.b[1: N - 1], m.a[1: N - 2], False)
    atoms: List[Tuple[float, float]] = []
    for j, s in enumerate(aux):
        h = data.h_of_z(s, sheet=-1)
        lam = _poly_eval(interior, float(s))
        num = alpha * h + ((-1) ** N) * (aN ** 2) * lam
        den = 1.0
        for l, s2 in enumerate(aux):
            if l != j:
                den *= (s - s2)
        mass = scale * num / den
        if abs(mass.imag if isinstance(mass, complex) else 0.0) > 1e-8:
            raise DegenerateSpectrumError(
                f"atom mass at sigma={s} is not real: {mass}")
        mass = float(mass.real if isinstance(mass, complex) else mass)
        if mass < -1e-8:
            raise DegenerateSpectrumError(
                f"negative atom mass {mass} at sigma={s}")
        if mass > zero_mass_tol:
            atoms.append((float(s), mass))

    Pc = [float(c) for c in data.P]
    cof = [float(c) for c in data.cofactor]
    dcof = [i * c for i, c in enumerate(cof)][1:]

    ddPc = [i * (i - 1) * c for i, c in enumerate(Pc)][2:]

    def density(x: float) -> float:
        Px = _poly_eval(Pc, x)
        disc = 4 * alpha * alpha - Px * Px
        d = _poly_eval(cof, x)
        if abs(d) < 1e-12 * (1 + abs(x)) ** (len(cof) - 1):
            # closed-gap point: P = +-2 alpha with P' = 0, and the cofactor
            # zero cancels the double branch point.  Analytic limit:
            # sqrt(disc) ~ |x-s| sqrt(-P P''), |cof| ~ |cof'||x-s|.
            num = math.sqrt(max(-Px * _poly_eval(ddPc, x), 0.0))
            den = abs(_poly_eval(dcof, x))
            return scale * num / (2 * math.pi * den) if den else 0.0
        if disc <= 0:
            return 0.0
        rho = scale * math.sqrt(disc) / (2 * math.pi * abs(d))
        assert rho >= 0.0
        return rho

    # merge bands across closed gaps: the density continues analytically
    # through them (the cofactor zero cancels the double branch point), and
    # quadrature is spectrally accurate only on intervals with pure
    # square-root edge behavior
    span = max(abs(x) for x, _m2 in data.branch_points) + 1.0
    merged: List[Tuple[float, float]] = []
    for lo, hi in data.stable_bands:
        if merged and abs(lo - merged[-1][1]) < 1e-10 * span:
            merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))

    return StieltjesMeasure(atoms=atoms, bands=merged,
                            density=density, a0=float(a0), nodes=nodes)


def orthogonality_check(m: PeriodicJacobi, a0, k_max: int,
                        measure: Optional[StieltjesMeasure] = None) -> Dict[str, float]:
    """Gram matrix of the denominator polynomials against the measure.

    Returns the worst off-diagonal entry and the worst relative diagonal
    error against the exact norms a0^2 prod_{i<=k} a_i^2."""
    if measure is None:
        measure = measure_decompose(m, a0)
    n = m.period
    polys = [[Fraction(1)]] + [pade(m.a, m.b, a0, k)[1] for k in range(1, k_max + 1)]
    worst_off = 0.0
    worst_diag = 0.0
    for i in range(k_max + 1):
        for j in range(i, k_max + 1):
            pi = [float(c) for c in polys[i]]
            pj = [float(c) for c in polys[j]]
            val = measure.integrate(lambda x: _poly_eval(pi, x) * _poly_eval(pj, x))
            if i != j:
                worst_off = max(worst_off, abs(val))
            else:
                norm = float(Q(a0) ** 2)
                for t in range(1, i + 1):
                    norm *= float(Q(m.a[(t - 1) % n])) ** 2
                worst_diag = max(worst_diag, abs(val - norm) / max(1.0, norm))
    return {"worst_offdiag": worst_off, "worst_diag_rel": worst_diag}


# -- Toda flow on Jacobi data --------------------------------------------------

@dataclass
class TodaDiagnostics:
    times: List[float]
    a_states: np.ndarray
    b_states: np.ndarray
    band_edges: np.ndarray          # per sample time, the 2N sorted edges
    aux_states: np.ndarray          # per sample time, the N-1 sigma_j
    band_edge_drift: float
    trace_sum_drift: float
    power_trace_drift: float
    interlacing_ok: bool
    min_abs_a: float


def toda_flow_jacobi(m: PeriodicJacobi, t_end: float, dt: float,
                     samples: int = 10) -> TodaDiagnostics:
    """Integrate the periodic lattice in Flaschka form and watch the
    spectral data: band edges frozen, auxiliary spectrum interlacing at
    every sample, sum b_j exactly conserved, a_j never vanishing."""
    from .builtins import toda_scalar_rhs
    if dt <= 0:
        raise ValueError("step size must be positive")
    a = np.array([float(x) for x in m.a])
    b = np.array([float(x) for x in m.b])
    steps = int(round(t_end / dt))
    stride = max(1, steps // samples)
    times = [0.0]
    a_states = [a.copy()]
    b_states = [b.copy()]
    for s in range(steps):
        ka1, kb1 = toda_scalar_rhs(a, b)
        ka2, kb2 = toda_scalar_rhs(a + dt / 2 * ka1, b + dt / 2 * kb1)
        ka3, kb3 = toda_scalar_rhs(a + dt / 2 * ka2, b + dt / 2 * kb2)
        ka4, kb4 = toda_scalar_rhs(a + dt * ka3, b + dt * kb3)
        a = a + dt / 6 * (ka1 + 2 * ka2 + 2 * ka3 + ka4)
        b = b + dt / 6 * (kb1 + 2 * kb2 + 2 * kb3 + kb4)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise RuntimeError(f"lattice blew up near t={ (s+1)*dt }")
        if (s + 1) % stride == 0 or s == steps - 1:
            times.append((s + 1) * dt)
            a_states.append(a.copy())
            b_states.append(b.copy())

    edge_sets = []
    aux_sets = []
    inter_ok = True
    ptrace0 = None
    ptrace_drift = 0.0
    for aa, bb in zip(a_states, b_states):
        d = spectral_data(PeriodicJacobi(list(aa), list(bb)))
        edges = []
        for r, mult in d.branch_points:
            edges.extend([r] * mult)
        edge_sets.append(np.array(edges))
        aux_sets.append(np.array(d.aux_spectrum))
        inter_ok = inter_ok and d.interlacing_ok(tol=1e-6)
        A = _periodic_matrix(aa, bb, 1.0)
        tr = [float(np.trace(np.linalg.matrix_power(A, k)))
              for k in range(1, m.period + 1)]
        if ptrace0 is None:
            ptrace0 = tr
        else:
            ptrace_drift = max(ptrace_drift,
                               max(abs(x - y) for x, y in zip(tr, ptrace0)))
    base = edge_sets[0]
    edge_drift = max(float(np.max(np.abs(e - base))) for e in edge_sets[1:]) \
        if len(edge_sets) > 1 else 0.0
    tr_drift = max(abs(float(np.sum(bb) - np.sum(b_states[0])))
                   for bb in b_states)
    return TodaDiagnostics(times=times, a_states=np.array(a_states),
                           b_states=np.array(b_states),
                           band_edges=np.array(edge_sets),
                           aux_states=np.array(aux_sets),
                           band_edge_drift=edge_drift,
                           trace_sum_drift=tr_drift,
                           power_trace_drift=ptrace_drift,
                           interlacing_ok=inter_ok,
                           min_abs_a=float(np.min(np.abs(np.array(a_states)))))


def _periodic_matrix(a, b, h: float) -> np.ndarray:
    n = len(a)
    A = np.diag(np.asarray(b, dtype=float))
    for j in range(n - 1):
        A[j, j + 1] = A[j + 1, j] = float(a[j])
    A[0, n - 1] += float(a[-1]) / h
    A[n - 1, 0] += float(a[-1]) * h
    return A


def carleman_partial_sums(a: Sequence, terms: int) -> List[float]:
    """Partial sums of sum 1/|a_j| for a user-supplied half-line sequence;
    divergence is the self-adjointness criterion.  Periodic data diverges
    trivially (the terms do not decay)."""
    n = len(a)
    out = []
    s = 0.0
    for i in range(terms):
        s += 1.0 / abs(float(a[i % n]))
        out.append(s)
    return out
