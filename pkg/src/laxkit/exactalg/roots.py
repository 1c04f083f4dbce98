"""Real roots of univariate polynomials.

Rational-coefficient input takes the exact route: square-free
decomposition for multiplicities, rational-root extraction for exact
values, then Sturm bisection brackets for the irrational remainder,
polished by bisection+Newton to the requested tolerance.  Float input
falls back to companion-matrix eigenvalues plus Newton polishing.

Polynomials are dense ascending coefficient lists.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .poly import Q
from .linalg import rational_roots


def _strip(p: List[Fraction]) -> List[Fraction]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_eval_frac(p: Sequence[Fraction], x: Fraction) -> Fraction:
    v = Fraction(0)
    for c in reversed(p):
        v = v * x + c
    return v


def poly_deriv_frac(p: Sequence[Fraction]) -> List[Fraction]:
    return [c * i for i, c in enumerate(p)][1:]


def _divmod_frac(a: Sequence[Fraction], b: Sequence[Fraction]):
    a = _strip(list(a))
    b = _strip(list(b))
    if not b:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = list(a)
    while len(r) >= len(b) and _strip(r):
        r = _strip(r)
        if len(r) < len(b):
            break
        k = len(r) - len(b)
        c = r[-1] / b[-1]
        q[k] = c
        for i, bc in enumerate(b):
            r[i + k] -= c * bc
        r = r[:-1]
    return _strip(q), _strip(r)


def _gcd_frac(a, b):
    a, b = _strip(a), _strip(b)
    while b:
        _, r = _divmod_frac(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def square_free_decomposition(p: Sequence[Fraction]) -> List[Tuple[List[Fraction], int]]:
    """Yun-style decomposition: [(factor, multiplicity), ...]."""
    p = _strip([Q(c) for c in p])
    if len(p) <= 1:
        return []
    out = []
    g = _gcd_frac(p, poly_deriv_frac(p))
    w, _ = _divmod_frac(p, g)
    m = 1
    while len(w) > 1:
        y = _gcd_frac(w, g)
        f, _ = _divmod_frac(w, y)
        if len(f) > 1:
            out.append((f, m))
        w = y
        g, _ = _divmod_frac(g, y)
        m += 1
    return out


def sturm_chain(p: Sequence[Fraction]) -> List[List[Fraction]]:
    p = _strip([Q(c) for c in p])
    chain = [p, poly_deriv_frac(p)]
    while _strip(chain[-1]):
        _, r = _divmod_frac(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return [c for c in chain if _strip(c)]


def _sign_changes(chain, x: Fraction) -> int:
    signs = []
    for p in chain:
        v = poly_eval_frac(p, x)
        if v:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_between(chain, lo: Fraction, hi: Fraction) -> int:
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


def cauchy_bound(p: Sequence[Fraction]) -> Fraction:
    p = _strip([Q(c) for c in p])
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(p: Sequence[Fraction], lo=None, hi=None) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint isolating intervals for the real roots of a square-free p."""
    p = _strip([Q(c) for c in p])
    chain = sturm_chain(p)
    if lo is None or hi is None:
        b = cauchy_bound(p)
        lo = -b if lo is None else Q(lo)
        hi = b if hi is None else Q(hi)
    # nudge endpoints off roots
    while poly_eval_frac(p, lo) == 0:
        lo -= Fraction(1, 1000)
    while poly_eval_frac(p, hi) == 0:
        hi += Fraction(1, 1000)
    out = []
    stack = [(Q(lo), Q(hi))]
    while stack:
        a, b = stack.pop()
        n = count_roots_between(chain, a, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        while poly_eval_frac(p, mid) == 0:
            mid += (b - a) / 1024
        stack.append((a, mid))
        stack.append((mid, b))
    out.sort()
    return out


def _refine(p: Sequence[Fraction], lo: Fraction, hi: Fraction, tol: float) -> float:
    """Bisection to ~sqrt(tol), then Newton polishing in floats."""
    flo = poly_eval_frac(p, lo)
    while float(hi - lo) > max(tol, 1e-14):
        mid = (lo + hi) / 2
        fm = poly_eval_frac(p, mid)
        if fm == 0:
            return float(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    x = float((lo + hi) / 2)
    pf = [float(c) for c in p]
    dpf = [i * c for i, c in enumerate(pf)][1:]
    for _ in range(8):
        fx = np.polyval(pf[::-1], x)
        dfx = np.polyval(dpf[::-1], x)
        if dfx == 0:
            break
        step = fx / dfx
        if not np.isfinite(step):
            break
        x -= step
        if abs(step) < 1e-16 * max(1.0, abs(x)):
            break
    if float(lo) - 1e-9 <= x <= float(hi) + 1e-9:
        return x
    return float((lo + hi) / 2)


def real_roots(coeffs, interval=None, tol: float = 1e-12) -> List[Tuple[object, int]]:
    """Sorted real roots with multiplicities.

    Rational coefficients are handled exactly: rational roots come back
    as Fraction, irrational ones as floats bracketed to tol.  Float
    coefficients use the companion-matrix route.
    """
    cs = list(coeffs)
    if not any(cs):
        raise ValueError("zero polynomial has no well-defined roots")
    exact = all(isinstance(c, (int, Fraction)) for c in cs)
    lo, hi = (None, None) if interval is None else (Q(interval[0]) if exact else interval[0],
                                                    Q(interval[1]) if exact else interval[1])
    if not exact:
        c = np.array([float(x) for x in cs], dtype=float)
        while c.size and abs(c[-1]) < 1e-300:
            c = c[:-1]
        if c.size <= 1:
            raise ValueError("zero polynomial has no well-defined roots")
        rts = np.roots(c[::-1])
        out = []
        for r in rts:
            if abs(r.imag) < 1e-7 * max(1.0, abs(r.real)) + 1e-9:
                x = float(r.real)
                dp = np.polyder(np.poly1d(c[::-1]))
                for _ in range(6):
                    f = np.polyval(c[::-1], x)
                    d = dp(x)
                    if d == 0:
                        break
                    x -= f / d
                out.append(x)
        out.sort()
        merged: List[Tuple[object, int]] = []
        for x in out:
            if merged and abs(x - merged[-1][0]) < 1e-7 * max(1.0, abs(x)):
                merged[-1] = (merged[-1][0], merged[-1][1] + 1)
            else:
                merged.append((x, 1))
        if interval is not None:
            merged = [(x, m) for x, m in merged if lo - 1e-12 <= x <= hi + 1e-12]
        return merged

    p = [Q(c) for c in cs]
    results: List[Tuple[object, int]] = []
    for factor, mult in square_free_decomposition(p):
        rat, cofactor = rational_roots(factor)
        for r, m in rat:
            # factor is square-free so m == 1
            results.append((r, mult))
        if len(cofactor) > 1:
            for a, b in isolate_real_roots(cofactor):
                results.append((_refine(cofactor, a, b, tol), mult))
    if interval is not None:
        results = [(x, m) for x, m in results
                   if float(lo) - 1e-12 <= float(x) <= float(hi) + 1e-12]
    results.sort(key=lambda rm: float(rm[0]))
    return results
