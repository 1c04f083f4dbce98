"""Laurent/Puiseux analysis of polynomial vector fields.

Pipeline: detect weight vectors (scaling symmetries of a dominant part),
solve the indicial system for dominant balances, assemble the Kowalewski
matrix and its resonances, then propagate Laurent coefficients exactly,
adjoining a fresh free-parameter symbol at every solvable resonance.
Substituting the resulting families into first integrals and collecting
constant terms yields the constraint varieties cut out by the values of
the invariants.

Fractional leading exponents are handled by working in steps of t^(1/ell)
with ell the lcm of the exponent denominators; the step-j linear system
is (j/ell I - L) z_j = psi_j with L the Kowalewski matrix, so resonances
sit at steps where j/ell is an eigenvalue of L.  Terms of lower weight
(such as coupling constants' monomials) feed psi_j at the step their
weight deficit dictates; nothing is ever dropped.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exactalg import (InconsistentSystemError, MultiPoly, PuiseuxSeries,
                       Q, SingularMatrixError, charpoly_exact,
                       kernel_free_columns, left_kernel_vector,
                       poly_on_series, rational_roots,
                       solve_square_exact, solve_with_pins)
from .exactalg.linalg import adjugate_kernel_column
from .sysdsl import VectorFieldSystem

Key = Tuple[Tuple[str, int], ...]


class PainleveObstruction(RuntimeError):
    """A resonance failed its solvability condition."""

    def __init__(self, step: int, ell: int, certificate=None, pairing=None):
        super().__init__(
            f"resonance at level {Fraction(step, ell)} is not solvable")
        self.step = step
        self.ell = ell
        self.certificate = certificate
        self.pairing = pairing


class FamilyNotPolynomial(RuntimeError):
    """Series coefficients leave the polynomial ring in the balance's free
    symbols (they are rational functions on the parameter variety).
    Specializing the balance symbols to generic rationals restores
    polynomial coefficients in the remaining parameters."""

    def __init__(self, step: int, ell: int):
        super().__init__(
            f"coefficient at level {Fraction(step, ell)} is not polynomial "
            "in the balance's free symbols; propagate a specialization "
            "(see Balance.specialize)")
        self.step = step
        self.ell = ell


# ---------------------------------------------------------------------------
# weight vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightVector:
    weights: Tuple[Fraction, ...]
    dominant_support: Tuple[Tuple[Key, ...], ...]   # per equation
    lower_terms: Tuple[Tuple[Key, ...], ...]        # recorded, never dropped

    @property
    def ell(self) -> int:
        return lcm(*[w.denominator for w in self.weights])

    def __str__(self):
        return "(" + ", ".join(str(w) for w in self.weights) + ")"


def _mono_weight(key: Key, wmap: Mapping[str, Fraction]) -> Fraction:
    return sum((Fraction(e) * wmap[n] for n, e in key if n in wmap),
               Fraction(0))


def _solve_linear_fractions(rows: List[List[Fraction]], rhs: List[Fraction]):
    """Gaussian elimination over Q; returns (particular, nullspace basis)
    or None when inconsistent."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    A = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    piv_cols: List[int] = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        pv = A[r][c]
        A[r] = [x / pv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if A[i][n] != 0:
            return None
    part = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        part[c] = A[i][n]
    free = [c for c in range(n) if c not in piv_cols]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for i, c in enumerate(piv_cols):
            v[c] = -A[i][fcol]
        basis.append(v)
    return part, basis


def _canonical_support(sys: VectorFieldSystem, weights: Sequence[Fraction]):
    """Split every equation's monomials into dominant / lower for the given
    weights; None if some monomial overshoots (inconsistent ansatz)."""
    wmap = dict(zip(sys.variables, weights))
    support, lower = [], []
    for i, f in enumerate(sys.equations):
        target = weights[i] + 1
        dom, low = [], []
        for key in f.terms:
            w = _mono_weight(key, wmap)
            if w == target:
                dom.append(key)
            elif w < target:
                low.append(key)
            else:
                return None
        if not dom:
            return None
        support.append(tuple(sorted(dom)))
        lower.append(tuple(sorted(low)))
    return tuple(support), tuple(lower)


def detect_weights(sys: VectorFieldSystem, max_patterns: int = 200000
                   ) -> List[WeightVector]:
    """All fully resolved rational weight vectors with positive weights.

    Dominant-support patterns whose linear weight constraints are
    underdetermined are resolved jointly with the indicial system; weight
    families that stay unresolved after that (no branch pins them to
    rationals) are dropped.
    """
    nvar = len(sys.variables)
    vidx = {v: i for i, v in enumerate(sys.variables)}
    eq_keys = [sorted(f.terms.keys()) for f in sys.equations]
    if any(not ks for ks in eq_keys):
        return []
    total = 1
    for ks in eq_keys:
        total *= (2 ** len(ks)) - 1
        if total > max_patterns:
            raise ValueError("too many dominant-support patterns to enumerate")

    def subsets(ks):
        for r in range(1, len(ks) + 1):
            yield from itertools.combinations(ks, r)

    found: Dict[Tuple[Fraction, ...], WeightVector] = {}
    for pattern in itertools.product(*[list(subsets(ks)) for ks in eq_keys]):
        rows, rhs = [], []
        for i, subset in enumerate(pattern):
            for key in subset:
                row = [Fraction(0)] * nvar
                for n, e in key:
                    if n in vidx:
                        row[vidx[n]] += e
                row[i] -= 1
                rows.append(row)
                rhs.append(Fraction(1))
        sol = _solve_linear_fractions(rows, rhs)
        if sol is None:
            continue
        part, basis = sol
        if not basis:
            candidates = [tuple(part)]
        else:
            candidates = _resolve_weight_family(sys, pattern, part, basis)
        for w in candidates:
            if any(x <= 0 for x in w):
                continue
            cs = _canonical_support(sys, w)
            if cs is None:
                continue
            if w not in found:
                found[w] = WeightVector(weights=tuple(w),
                                        dominant_support=cs[0],
                                        lower_terms=cs[1])
    out = sorted(found.values(), key=lambda wv: (sorted(wv.weights), wv.weights))
    return out


def _resolve_weight_family(sys, pattern, part, basis) -> List[Tuple[Fraction, ...]]:
    """Pin an underdetermined weight family by solving the indicial system
    jointly in (balance, family parameters)."""
    svars = [f"_w{k}" for k in range(len(basis))]
    kexprs = []
    for i in range(len(sys.variables)):
        e = MultiPoly.const(part[i])
        for k, b in enumerate(basis):
            e = e + MultiPoly.var(svars[k]) * b[i]
        kexprs.append(e)
    eqs = []
    for i, subset in enumerate(pattern):
        fdom = MultiPoly({key: sys.equations[i].terms[key] for key in subset})
        eqs.append(kexprs[i] * MultiPoly.var(sys.variables[i]) + fdom)
    sols = solve_poly_system(eqs, list(sys.variables) + svars)
    out = []
    for sol, _ in sols:
        vals = []
        ok = True
        for i in range(len(sys.variables)):
            v = kexprs[i].subs({s: sol[s] for s in svars if s in sol})
            if not v.is_constant:
                ok = False
                break
            vals.append(v.const_value())
        if not ok:
            continue
        if all(MultiPoly.coerce(sol.get(v, MultiPoly.var(v))).is_zero
               for v in sys.variables):
            continue
        out.append(tuple(vals))
    return out


# ---------------------------------------------------------------------------
# small exact polynomial-system solver (substitution + case splitting)
# ---------------------------------------------------------------------------

def solve_poly_system(eqs: Sequence[MultiPoly], unknowns: Sequence[str],
                      max_branches: int = 4000, algebraic_out=None):
    """All solution branches of a small polynomial system over Q.

    Returns a list of (solution, choices): `solution` maps a subset of the
    unknowns to MultiPoly values (possibly involving the remaining, free,
    unknowns); `choices` records the (name, root) picks made at multi-root
    branch points, which callers use as sheet labels.  Branches that would
    need irrational algebraic numbers are dropped -- this toolkit's exact
    ring is Q plus free symbols -- but each dropped branch appends its
    (variable, defining polynomial coefficients) to `algebraic_out` when a
    list is supplied, so callers can report what was left behind.  Every
    returned branch is verified against the original equations.
    """
    unknowns = list(unknowns)
    results = []
    counter = [0]

    def recurse(cur_eqs, sol, choices):
        counter[0] += 1
        if counter[0] > max_branches:
            raise RuntimeError("polynomial system solver branch budget exceeded")
        cur_eqs = [e for e in cur_eqs if not e.is_zero]
        for e in cur_eqs:
            if e.is_constant:
                return  # inconsistent
        if not cur_eqs:
            results.append((dict(sol), list(choices)))
            return

        present = [u for u in unknowns if u not in sol]

        # 1. a variable appearing linearly with a nonzero constant
        # coefficient; later unknowns are eliminated first so that leading
        # unknowns (positions rather than momenta) stay free
        for idx, e in enumerate(cur_eqs):
            for x in reversed(present):
                cfs = e.coeffs_in(x)
                if set(cfs) <= {0, 1} and 1 in cfs and cfs[1].is_constant:
                    val = -cfs.get(0, MultiPoly.zero()) / cfs[1].const_value()
                    rest = [q.subs({x: val}) for k, q in enumerate(cur_eqs) if k != idx]
                    sol2 = {k: v.subs({x: val}) for k, v in sol.items()}
                    sol2[x] = val
                    recurse(rest, sol2, choices)
                    return

        # 2. univariate equation with rational coefficients
        for idx, e in enumerate(cur_eqs):
            evars = [u for u in present if e.degree_in(u) > 0]
            if len(evars) != 1:
                continue
            x = evars[0]
            cfs = e.coeffs_in(x)
            if not all(c.is_constant for c in cfs.values()):
                continue
            deg = max(cfs)
            coeffs = [cfs.get(k, MultiPoly.zero()).const_value()
                      for k in range(deg + 1)]
            roots, cof = rational_roots(coeffs)
            if len(cof) > 1 and algebraic_out is not None:
                algebraic_out.append((x, cof))
            many = len(roots) > 1
            for r, _m in roots:
                val = MultiPoly.const(r)
                rest = [q.subs({x: val}) for k, q in enumerate(cur_eqs) if k != idx]
                sol2 = {k: v.subs({x: val}) for k, v in sol.items()}
                sol2[x] = val
                recurse(rest, sol2, choices + ([(x, r)] if many else []))
            return

        # 3. an equation with a common variable factor: split x=0 / cofactor=0
        for idx, e in enumerate(cur_eqs):
            mg = dict(e.monomial_gcd())
            fx = next((u for u in present if mg.get(u, 0) > 0), None)
            if fx is None:
                continue
            zero = MultiPoly.zero()
            rest0 = [q.subs({fx: zero}) for k, q in enumerate(cur_eqs) if k != idx]
            sol0 = {k: v.subs({fx: zero}) for k, v in sol.items()}
            sol0[fx] = zero
            recurse(rest0, sol0, choices)
            cofactor = e.exact_div(MultiPoly.var(fx, mg[fx]))
            recurse([cofactor] + [q for k, q in enumerate(cur_eqs) if k != idx],
                    sol, choices)
            return

        # 4. last resort: eliminate a variable appearing linearly with a
        # polynomial coefficient C, on the branch C != 0
        for idx, e in enumerate(cur_eqs):
            for x in present:
                cfs = e.coeffs_in(x)
                if set(cfs) <= {0, 1} and 1 in cfs:
                    C = cfs[1]
                    D = cfs.get(0, MultiPoly.zero())
                    # branch C = 0 (then D must also vanish)
                    recurse([C, D] + [q for k, q in enumerate(cur_eqs) if k != idx],
                            sol, choices)
                    # branch C != 0: clear denominators in the others
                    others = []
                    for k, q in enumerate(cur_eqs):
                        if k == idx:
                            continue
                        qc = q.coeffs_in(x)
                        d = max(qc) if qc else 0
                        acc = MultiPoly.zero()
                        for kk, ck in qc.items():
                            acc = acc + ck * ((-D) ** kk) * (C ** (d - kk))
                        others.append(acc)
                    for sub_sol, sub_choices in solve_poly_system(
                            others, [u for u in present if u != x],
                            max_branches=max_branches,
                            algebraic_out=algebraic_out):
                        Cv = C.subs(sub_sol)
                        Dv = D.subs(sub_sol)
                        if Cv.is_zero:
                            continue
                        try:
                            xval = (-Dv).exact_div(Cv)
                        except (ValueError, ZeroDivisionError):
                            continue
                        sol2 = {k: v.subs(sub_sol) for k, v in sol.items()}
                        sol2.update(sub_sol)
                        sol2[x] = xval
                        results.append((sol2, choices + sub_choices))
                    return
        # nothing applicable: give up on this branch (not solvable by
        # substitution over Q)
        return

    recurse(list(eqs), {}, [])

    # verify and dedupe
    verified = []
    seen = set()
    for sol, choices in results:
        ok = all(e.subs(sol).is_zero for e in eqs)
        if not ok:
            continue
        sig = tuple(sorted((k, v) for k, v in sol.items()))
        if sig in seen:
            continue
        seen.add(sig)
        verified.append((sol, choices))

    def subsumes(big, small):
        # `small` is a specialization of `big`: assigning some of big's
        # free unknowns reproduces every one of big's values
        if not set(big) <= set(small) or set(big) == set(small):
            return False
        sigma = {v: small[v] for v in small if v not in big}
        return all(big[v].subs(sigma) == small[v] for v in big)

    pruned = []
    for i, (sol, choices) in enumerate(verified):
        if any(subsumes(other, sol) for j, (other, _c) in enumerate(verified)
               if j != i):
            continue
        pruned.append((sol, choices))
    return pruned


# ---------------------------------------------------------------------------
# balances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Balance:
    weight_vector: WeightVector
    leading: Tuple[MultiPoly, ...]          # z^(0), entries over free symbols
    free_symbols: Tuple[str, ...]
    label: str = ""
    choices: Tuple[Tuple[str, Fraction], ...] = ()

    @property
    def exponents(self) -> Tuple[Fraction, ...]:
        return self.weight_vector.weights

    def rename_free(self, mapping: Mapping[str, str]) -> "Balance":
        sub = {old: MultiPoly.var(new) for old, new in mapping.items()}
        return Balance(
            weight_vector=self.weight_vector,
            leading=tuple(z.subs(sub) for z in self.leading),
            free_symbols=tuple(mapping.get(s, s) for s in self.free_symbols),
            label=self.label, choices=self.choices)

    def specialize(self, values: Mapping[str, object]) -> "Balance":
        """Evaluate free symbols at rational points (generic members of the
        balance family); they stop being symbols of the propagated series."""
        sub = {k: MultiPoly.const(Q(v)) for k, v in values.items()}
        return Balance(
            weight_vector=self.weight_vector,
            leading=tuple(z.subs(sub) for z in self.leading),
            free_symbols=tuple(s for s in self.free_symbols if s not in values),
            label=self.label, choices=self.choices)


def dominant_part(sys: VectorFieldSystem, w: WeightVector) -> List[MultiPoly]:
    return [MultiPoly({k: sys.equations[i].terms[k] for k in w.dominant_support[i]})
            for i in range(sys.dim)]


def indicial_solve(sys: VectorFieldSystem, w: WeightVector,
                   algebraic_out=None) -> List[Balance]:
    """Nonzero solutions of k_i z_i + f_i(z) = 0 over the dominant part.

    Solutions may carry free symbols (named after their variable); sign
    branches are recorded in `choices` and the label.  Balances living in
    algebraic extensions of Q are not representable here; pass
    `algebraic_out` (a list) to collect their defining polynomials.
    """
    fdom = dominant_part(sys, w)
    eqs = [MultiPoly.const(w.weights[i]) * MultiPoly.var(sys.variables[i]) + fdom[i]
           for i in range(sys.dim)]
    sols = solve_poly_system(eqs, sys.variables, algebraic_out=algebraic_out)
    out = []
    for sol, choices in sols:
        leading = tuple(MultiPoly.coerce(sol.get(v, MultiPoly.var(v)))
                        for v in sys.variables)
        if all(z.is_zero for z in leading):
            continue
        free = tuple(v for v in sys.variables if v not in sol)
        label = ",".join(f"{n}={r}" for n, r in choices)
        out.append(Balance(weight_vector=w, leading=leading,
                           free_symbols=free, label=label,
                           choices=tuple(choices)))
    out.sort(key=lambda b: b.label)
    return out


# ---------------------------------------------------------------------------
# Kowalewski matrix and resonances
# ---------------------------------------------------------------------------

@dataclass
class KowalewskiData:
    matrix: List[List[MultiPoly]]
    charpoly: List[Fraction]                     # ascending, monic
    rational_eigs: List[Tuple[Fraction, int]]
    nonrational_factor: List[Fraction]           # ascending; [] if fully rational
    kernels: Dict[Fraction, List[List[MultiPoly]]] = field(default_factory=dict)

    def eigenvalues(self, tol: float = 1e-6):
        """All eigenvalues: exact rationals plus numeric roots of the
        leftover factor, each with an integrality flag."""
        out = [(r, True if r.denominator == 1 else False, m)
               for r, m in self.rational_eigs]
        if len(self.nonrational_factor) > 1:
            import numpy as np
            cs = [float(c) for c in self.nonrational_factor]
            for z in np.roots(cs[::-1]):
                is_int = abs(z.imag) < tol and abs(z.real - round(z.real)) < tol
                out.append((complex(z), bool(is_int), 1))
        return out

    def resonance_set(self, max_k: Optional[int] = None) -> List[int]:
        """Positive integer eigenvalues (classical resonances)."""
        ks = [int(r) for r, _ in self.rational_eigs
              if r.denominator == 1 and r >= 1]
        if max_k is not None:
            ks = [k for k in ks if k <= max_k]
        return sorted(ks)

    def rational_spectrum(self) -> List[Fraction]:
        return sorted(r for r, _ in self.rational_eigs)


def kowalewski(sys: VectorFieldSystem, bal: Balance) -> KowalewskiData:
    w = bal.weight_vector
    fdom = dominant_part(sys, w)
    env = dict(zip(sys.variables, bal.leading))
    n = sys.dim
    L = [[fdom[i].diff(sys.variables[j]).subs(env) +
          (MultiPoly.const(w.weights[i]) if i == j else MultiPoly.zero())
          for j in range(n)] for i in range(n)]
    cp = charpoly_exact(L)
    consts = []
    for c in cp:
        if not c.is_constant:
            raise ValueError(
                "Kowalewski characteristic polynomial depends on a free "
                "symbol; resonance analysis needs a generic-value split")
        consts.append(c.const_value())
    rats, cof = rational_roots(consts)
    data = KowalewskiData(matrix=L, charpoly=consts, rational_eigs=rats,
                          nonrational_factor=cof)
    for r, _m in rats:
        M = [[MultiPoly.const(r if i == j else 0) - L[i][j] for j in range(n)]
             for i in range(n)]
        free = kernel_free_columns(M)
        vecs = []
        for col in free:
            pins = {c: MultiPoly.const(1 if c == col else 0) for c in free}
            try:
                vecs.append(solve_with_pins(M, [MultiPoly.zero()] * n, pins))
            except (SingularMatrixError, InconsistentSystemError, ValueError):
                if len(free) == 1:
                    v = adjugate_kernel_column(M)
                    if v is not None:
                        vecs.append(v)
        data.kernels[r] = vecs
    return data


def invariant_weight(sys: VectorFieldSystem, name: str, w: WeightVector):
    """Weight of a declared invariant if weight-homogeneous, else None."""
    wmap = dict(zip(sys.variables, w.weights))
    H = sys.invariants[name]
    ws = {_mono_weight(k, wmap) for k in H.terms}
    return ws.pop() if len(ws) == 1 else None


# ---------------------------------------------------------------------------
# Laurent family propagation
# ---------------------------------------------------------------------------

@dataclass
class LaurentFamily:
    system: VectorFieldSystem
    balance: Balance
    ell: int
    series: Dict[str, PuiseuxSeries]
    free_parameters: Tuple[str, ...]            # explicit symbols, in order
    resonances: Tuple[Tuple[int, str], ...]     # (step j, parameter name)
    kowalewski: KowalewskiData

    def count_free_parameters(self):
        """(explicit symbol count, total including the movable origin t0)."""
        n = len(self.free_parameters)
        return n, n + 1

    def coefficient(self, var: str, exponent) -> MultiPoly:
        return self.series[var].coeff(exponent)


def count_free_parameters(fam: LaurentFamily) -> Tuple[int, int]:
    return fam.count_free_parameters()


def propagate(sys: VectorFieldSystem, bal: Balance, order: Optional[int] = None,
              resonance_names: Optional[Sequence[str]] = None,
              resonance_slots: Optional[Mapping[int, Tuple[str, object]]] = None,
              verify: bool = True) -> LaurentFamily:
    """Compute the Laurent family seeded by a balance, exactly.

    `order` counts whole powers of t beyond the leading exponents and
    defaults to (largest resonance) + 4; it must reach past the last
    resonance, otherwise free parameters would silently go missing.  A
    fresh parameter symbol is adjoined at every solvable resonance;
    unsolvable ones raise PainleveObstruction with a left-null-vector
    certificate.  `resonance_slots` maps a step j to (variable, scale):
    the new parameter appears as exactly scale*symbol in that variable's
    step-j coefficient (this pins the normalization used in golden tests).
    """
    w = bal.weight_vector
    ell = w.ell
    n = sys.dim
    kd = kowalewski(sys, bal)
    rational_eigs = {r for r, _ in kd.rational_eigs}
    m = [int(w.weights[i] * ell) for i in range(n)]
    wmap = dict(zip(sys.variables, w.weights))
    for i, f in enumerate(sys.equations):
        for key in f.terms:
            if _mono_weight(key, wmap) > w.weights[i] + 1:
                raise ValueError(
                    f"monomial in equation for {sys.variables[i]} exceeds the "
                    "dominant weight; weight vector inconsistent")

    max_res = max((r for r, _ in kd.rational_eigs
                   if r > 0 and (r * ell).denominator == 1), default=Fraction(0))
    if order is None:
        order = int(max_res) + 4
    J = order * ell
    if J < int(max_res * ell) + 1:
        raise ValueError(
            f"order {order} stops before the last resonance at level {max_res}; "
            f"need order >= {int(max_res) + 1}")
    coef: List[List[MultiPoly]] = [[bal.leading[i]] for i in range(n)]
    L = kd.matrix
    names_iter = iter(resonance_names or [])
    auto_idx = [0]
    params: List[str] = list(bal.free_symbols)
    resonances: List[Tuple[int, str]] = []

    taken = set(params) | set(sys.variables) | set(sys.constants)

    def fresh_name():
        while True:
            auto_idx[0] += 1
            nm = f"c{auto_idx[0]}"
            if nm not in taken:
                return nm

    for j in range(1, J + 1):
        env = {
            sys.variables[i]: PuiseuxSeries(ell, -m[i],
                                            coef[i] + [MultiPoly.zero()],
                                            -m[i] + j + 1)
            for i in range(n)
        }
        psi = []
        for i in range(n):
            phi = poly_on_series(sys.equations[i], env, ell, const_valid=j + 2)
            psi.append(phi.coeff(Fraction(j - m[i] - ell, ell)))
        c = Fraction(j, ell)
        M = [[MultiPoly.const(c if i == jj else 0) - L[i][jj] for jj in range(n)]
             for i in range(n)]
        if c not in rational_eigs:
            try:
                zj = solve_square_exact(M, psi)
            except ValueError as exc:
                raise FamilyNotPolynomial(j, ell) from exc
        else:
            slot_spec = (resonance_slots or {}).get(j)
            pin_cols = None
            scales = None
            if slot_spec is not None:
                var, scale = slot_spec
                col = sys.variables.index(var)
                try:
                    solve_with_pins(M, [MultiPoly.zero()] * n, {col: MultiPoly.zero()})
                    pin_cols = [col]
                    scales = {col: scale}
                except (SingularMatrixError, InconsistentSystemError):
                    pin_cols = None
            if pin_cols is None:
                pin_cols = kernel_free_columns(M) or [0]
                scales = {cc: 1 for cc in pin_cols}
            zeros = {cc: MultiPoly.zero() for cc in pin_cols}
            try:
                part = solve_with_pins(M, psi, zeros)
            except InconsistentSystemError:
                wvec = left_kernel_vector(M)
                pairing = None
                if wvec is not None:
                    pairing = sum((wvec[i] * psi[i] for i in range(n)),
                                  MultiPoly.zero())
                raise PainleveObstruction(j, ell, certificate=wvec,
                                          pairing=pairing)
            except (SingularMatrixError, ValueError) as exc:
                raise FamilyNotPolynomial(j, ell) from exc
            zj = list(part)
            for cc in pin_cols:
                pins = {c2: MultiPoly.coerce(scales[cc] if c2 == cc else 0)
                        for c2 in pin_cols}
                try:
                    kvec = solve_with_pins(M, [MultiPoly.zero()] * n, pins)
                except ValueError:
                    if len(pin_cols) != 1:
                        raise
                    v = adjugate_kernel_column(M)
                    if v is None or v[cc].is_zero:
                        raise
                    sc = MultiPoly.coerce(scales[cc])
                    kvec = [(x * sc).exact_div(v[cc]) for x in v]
                name = next(names_iter, None) or fresh_name()
                taken.add(name)
                s = MultiPoly.var(name)
                zj = [zj[i] + s * kvec[i] for i in range(n)]
                params.append(name)
                resonances.append((j, name))
        for i in range(n):
            coef[i].append(zj[i])

    series = {
        sys.variables[i]: PuiseuxSeries(ell, -m[i], coef[i], -m[i] + J + 1)
        for i in range(n)
    }
    fam = LaurentFamily(system=sys, balance=bal, ell=ell, series=series,
                        free_parameters=tuple(params),
                        resonances=tuple(resonances), kowalewski=kd)
    if verify:
        bad = family_residual(fam)
        if bad:
            raise AssertionError(f"nonzero residual coefficients: {bad[:3]}")
    return fam


def family_residual(fam: LaurentFamily):
    """Exact residual z_i' - f_i(z) of a family; returns the list of
    (variable, exponent) positions with nonzero coefficients (empty for a
    genuine solution)."""
    sys = fam.system
    bad = []
    for i, v in enumerate(sys.variables):
        lhs = fam.series[v].deriv()
        rhs = poly_on_series(sys.equations[i], fam.series, fam.ell,
                             const_valid=lhs.valid)
        diff = lhs - rhs
        for e, cc in diff.terms():
            if not cc.is_zero:
                bad.append((v, e))
    return bad


# ---------------------------------------------------------------------------
# constraint varieties (Painlevé divisors)
# ---------------------------------------------------------------------------

@dataclass
class ConstraintVariety:
    relations: List[MultiPoly]          # H_i(t^0 coefficient) - value symbol
    value_names: List[str]
    eliminated: List[str]
    curve: Optional[MultiPoly]          # canonical reduced relation


class PolarPartError(ValueError):
    """A declared invariant fails to be constant along the family."""


def invariant_series(fam: LaurentFamily, name: str) -> PuiseuxSeries:
    H = fam.system.invariants[name]
    lowest = min((s.valid for s in fam.series.values()))
    return poly_on_series(H, fam.series, fam.ell, const_valid=lowest)


def constraint_curve(sys: VectorFieldSystem, fam: LaurentFamily,
                     invariant_names: Sequence[str],
                     value_names: Optional[Sequence[str]] = None,
                     eliminate: Optional[Sequence[str]] = None
                     ) -> ConstraintVariety:
    """Substitute the family into invariants, demand polar parts vanish,
    collect the t^0 relations H_i = b_i, and eliminate the parameters that
    appear to degree exactly one (matching the linear eliminations of the
    source analyses).  The final relation is canonicalized by clearing
    denominators, stripping the common monomial, and fixing the lead sign.
    """
    if value_names is None:
        value_names = [f"b{i+1}" for i in range(len(invariant_names))]
    relations = []
    for nm, val in zip(invariant_names, value_names):
        S = invariant_series(fam, nm)
        if S.valid <= 0:
            raise ValueError(
                f"series order too low to stabilize the constant term of {nm}")
        for e, cc in S.terms():
            if e < 0 and not cc.is_zero:
                raise PolarPartError(
                    f"invariant {nm} has a nonzero coefficient at t^{e}: "
                    f"not conserved along the family")
        relations.append(S.coeff(0) - MultiPoly.var(val))

    if eliminate is None:
        cand = [p for p in fam.free_parameters
                if any(r.degree_in(p) > 0 for r in relations)
                and all(r.degree_in(p) <= 1 for r in relations)]
        eliminate = sorted(cand)
    work = list(relations)
    for p in list(eliminate):
        pivot_idx = None
        best = None
        for idx, r in enumerate(work):
            if r.degree_in(p) != 1:
                continue
            C = r.coeffs_in(p)[1]
            rank = (0 if C.is_constant else 1, C.total_degree(), len(C.terms))
            if best is None or rank < best:
                best = rank
                pivot_idx = idx
        if pivot_idx is None:
            continue
        r = work.pop(pivot_idx)
        C = r.coeffs_in(p)[1]
        D = r.coeffs_in(p).get(0, MultiPoly.zero())
        new_work = []
        for s in work:
            sc = s.coeffs_in(p)
            d = max(sc) if sc else 0
            acc = MultiPoly.zero()
            for k, ck in sc.items():
                acc = acc + ck * ((-D) ** k) * (C ** (d - k))
            new_work.append(acc)
        work = new_work
    curve = None
    if len(work) == 1:
        curve = work[0].primitive()
    elif work:
        curve = sorted(work, key=lambda q: (q.total_degree(), len(q.terms)))[0].primitive()
    return ConstraintVariety(relations=relations, value_names=list(value_names),
                             eliminated=list(eliminate), curve=curve)


# ---------------------------------------------------------------------------
# restoring morphisms
# ---------------------------------------------------------------------------

@dataclass
class MorphismReport:
    chain_rule_ok: bool
    failures: List[str]
    fractional_restored: Optional[bool] = None
    composed: Optional[Dict[str, PuiseuxSeries]] = None


def restoring_morphism_check(sys_src: VectorFieldSystem,
                             sys_dst: VectorFieldSystem,
                             morphism: Sequence[MultiPoly],
                             family: Optional[LaurentFamily] = None
                             ) -> MorphismReport:
    """Verify a polynomial map src -> dst intertwines the two flows, and
    (given a source family) that composing it kills fractional powers."""
    if len(morphism) != sys_dst.dim:
        raise ValueError("morphism component count must match target dimension")
    failures = []
    subs_map = dict(zip(sys_dst.variables, morphism))
    for k, phi in enumerate(morphism):
        dphi = MultiPoly.zero()
        for i, v in enumerate(sys_src.variables):
            dphi = dphi + phi.diff(v) * sys_src.equations[i]
        target = sys_dst.equations[k].subs(subs_map)
        if dphi != target:
            failures.append(sys_dst.variables[k])
    report = MorphismReport(chain_rule_ok=not failures, failures=failures)
    if family is not None:
        composed = {}
        ok = True
        lowest_valid = min(s.valid for s in family.series.values())
        for k, phi in enumerate(morphism):
            S = poly_on_series(phi, family.series, family.ell,
                               const_valid=lowest_valid)
            composed[sys_dst.variables[k]] = S
            for e, cc in S.terms():
                if e.denominator != 1 and not cc.is_zero:
                    ok = False
        report.fractional_restored = ok
        report.composed = composed
    return report


# ---------------------------------------------------------------------------
# report assembly (JSON-friendly)
# ---------------------------------------------------------------------------

def series_dict(s: PuiseuxSeries, order: Sequence[str]) -> Dict[str, str]:
    return {str(e): c.to_str(order) for e, c in s.terms()}


def analyze(sys: VectorFieldSystem, order: int,
            builtin_meta: Optional[dict] = None) -> dict:
    """Full Painlevé report for a system: weights, balances, resonances,
    series, parameter counts, constraint relations."""
    meta = builtin_meta or {}
    sym_order = list(sys.variables) + list(sys.constants)
    report: dict = {"system": sys.name, "variables": list(sys.variables),
                    "weights": [], "balances": []}
    wvs = detect_weights(sys)
    for wv in wvs:
        report["weights"].append({
            "weights": [str(x) for x in wv.weights],
            "branching_index": wv.ell,
            "dominant_counts": [len(s) for s in wv.dominant_support],
            "lower_counts": [len(s) for s in wv.lower_terms],
        })
    target_w = meta.get("weights")
    for wv in wvs:
        if target_w is not None and tuple(wv.weights) != tuple(target_w):
            continue
        for bal in indicial_solve(sys, wv):
            if meta.get("balance_filter") and not meta["balance_filter"](bal):
                continue
            if meta.get("rename"):
                bal = bal.rename_free(meta["rename"])
            entry = {
                "weights": [str(x) for x in wv.weights],
                "leading": {v: z.to_str(sym_order + list(bal.free_symbols))
                            for v, z in zip(sys.variables, bal.leading)},
                "label": meta.get("label_fn", lambda b: b.label)(bal),
            }
            specialized = {}
            try:
                try:
                    fam = propagate(sys, bal, order,
                                    resonance_names=meta.get("resonance_names"),
                                    resonance_slots=meta.get("resonance_slots"))
                except FamilyNotPolynomial:
                    specialized = dict(meta.get("specialize") or
                                       {s: 1 for s in bal.free_symbols})
                    fam = propagate(sys, bal.specialize(specialized), order,
                                    resonance_names=meta.get("resonance_names"),
                                    resonance_slots=meta.get("resonance_slots"))
                    entry["specialized"] = {k: str(v) for k, v in specialized.items()}
            except PainleveObstruction as exc:
                entry["obstruction"] = {
                    "level": str(Fraction(exc.step, exc.ell)),
                    "pairing": str(exc.pairing) if exc.pairing is not None else None,
                }
                report["balances"].append(entry)
                continue
            except (ValueError, RuntimeError) as exc:
                entry["error"] = str(exc)
                report["balances"].append(entry)
                continue
            kd = fam.kowalewski
            porder = list(sym_order) + list(fam.free_parameters)
            explicit, with_t0 = fam.count_free_parameters()
            explicit += len(specialized)
            with_t0 += len(specialized)
            entry.update({
                "branching_index": fam.ell,
                "kowalewski_spectrum": [str(r) for r, _m in kd.rational_eigs
                                        for _ in range(_m)],
                "resonance_steps": [[j, nm] for j, nm in fam.resonances],
                "free_parameters": list(fam.free_parameters),
                "parameter_count": {"explicit": explicit,
                                    "with_time_origin": with_t0},
                "series": {v: series_dict(s, porder)
                           for v, s in fam.series.items()},
            })
            inv_names = meta.get("curve_invariants")
            if inv_names:
                try:
                    cv = constraint_curve(sys, fam, inv_names,
                                          value_names=meta.get("value_names"))
                    entry["constraint"] = {
                        "relations": [r.to_str(porder + cv.value_names)
                                      for r in cv.relations],
                        "eliminated": cv.eliminated,
                        "curve": cv.curve.to_str(porder + cv.value_names)
                        if cv.curve is not None else None,
                    }
                except (PolarPartError, ValueError) as exc:
                    entry["constraint"] = {"error": str(exc)}
            report["balances"].append(entry)
    return report
