from fractions import Fraction as F

import pytest

from laxkit.builtins import builtin_system, painleve_meta
from laxkit.exactalg import MultiPoly
from laxkit.painleve import (Balance, FamilyNotPolynomial,
                             PainleveObstruction, PolarPartError, analyze,
                             constraint_curve, detect_weights,
                             dominant_part, family_residual, indicial_solve,
                             invariant_series, invariant_weight, kowalewski,
                             propagate, solve_poly_system)
from laxkit.sysdsl import parse_system


def weights_of(sys_):
    return {tuple(w.weights) for w in detect_weights(sys_)}


def test_weights_kvm_all_one():
    sys_ = builtin_system("kvm")
    wvs = detect_weights(sys_)
    assert len(wvs) == 1
    wv = wvs[0]
    assert tuple(wv.weights) == (F(1),) * 5
    # every monomial dominant, nothing lower order
    assert all(len(l) == 0 for l in wv.lower_terms)
    assert all(len(s) == 2 for s in wv.dominant_support)


def test_weights_rdg_two_vectors():
    sys_ = builtin_system("rdg")
    ws = weights_of(sys_)
    assert (F(1), F(1), F(2), F(2)) in ws         # everything dominant
    assert (F(1, 2), F(1), F(3, 2), F(2)) in ws   # resolved fractional vector


def test_weights_henon_heiles_fractional_with_lower_terms():
    sys_ = builtin_system("henon-heiles")
    wvs = {tuple(w.weights): w for w in detect_weights(sys_)}
    assert (F(1, 2), F(2), F(3, 2), F(3)) in wvs
    wv = wvs[(F(1, 2), F(2), F(3, 2), F(3))]
    # the coupling-constant terms are recorded as lower order, and the
    # quadratic y1^2 term of the x2 equation is lower order as well
    assert len(wv.lower_terms[2]) == 1   # A*y1
    assert len(wv.lower_terms[3]) == 2   # A*y2, y1^2
    assert len(wv.dominant_support[3]) == 1


def test_weights_harmonic_none():
    # linear system: weight constraints are inconsistent, no movable pole
    assert detect_weights(builtin_system("harmonic")) == []


def test_indicial_henon_heiles_leading_values():
    sys_ = builtin_system("henon-heiles")
    meta = painleve_meta("henon-heiles")
    wv = [w for w in detect_weights(sys_)
          if tuple(w.weights) == meta["weights"]][0]
    bals = indicial_solve(sys_, wv)
    principal = [b for b in bals if "y1" in b.free_symbols]
    assert len(principal) == 1
    b = principal[0]
    lead = dict(zip(sys_.variables, b.leading))
    assert lead["y2"] == MultiPoly.const(F(-3, 8))
    assert lead["x2"] == MultiPoly.const(F(3, 4))
    assert lead["x1"] == MultiPoly.var("y1") * F(-1, 2)


def test_indicial_rdg_sheets():
    sys_ = builtin_system("rdg")
    meta = painleve_meta("rdg")
    wv = [w for w in detect_weights(sys_)
          if tuple(w.weights) == meta["weights"]][0]
    bals = [b for b in indicial_solve(sys_, wv) if "q1" in b.free_symbols]
    labels = {b.label for b in bals}
    assert labels == {"q2=1/2", "q2=-1/2"}
    for b in bals:
        lead = dict(zip(sys_.variables, b.leading))
        assert lead["q2"].const_value() in (F(1, 2), F(-1, 2))


def test_balance_satisfies_indicial_system_exactly():
    sys_ = builtin_system("kvm")
    wv = detect_weights(sys_)[0]
    for b in indicial_solve(sys_, wv):
        fdom = dominant_part(sys_, wv)
        env = dict(zip(sys_.variables, b.leading))
        for i in range(sys_.dim):
            expr = MultiPoly.const(wv.weights[i]) * b.leading[i] + fdom[i].subs(env)
            assert expr.is_zero


def test_kowalewski_kvm_spectrum_and_kernels():
    sys_ = builtin_system("kvm")
    wv = detect_weights(sys_)[0]
    bal = [b for b in indicial_solve(sys_, wv)
           if sum(1 for z in b.leading if z.is_zero) == 1][0]
    kd = kowalewski(sys_, bal)
    assert kd.rational_spectrum() == [F(-2), F(-1), F(1), F(2), F(5)]
    assert kd.resonance_set() == [1, 2, 5]
    assert len(kd.nonrational_factor) == 1  # spectrum fully rational
    for r in (F(1), F(2), F(5)):
        vecs = kd.kernels[r]
        assert len(vecs) == 1
        # kernel vectors actually lie in ker(rI - L)
        M = [[MultiPoly.const(r if i == j else 0) - kd.matrix[i][j]
              for j in range(5)] for i in range(5)]
        v = vecs[0]
        for i in range(5):
            s = MultiPoly.zero()
            for j in range(5):
                s = s + M[i][j] * v[j]
            assert s.is_zero


def test_invariant_weight_matches_spectrum():
    sys_ = builtin_system("kvm")
    wv = detect_weights(sys_)[0]
    ws = {nm: invariant_weight(sys_, nm, wv) for nm in sys_.invariants}
    assert ws == {"H1": F(2), "H2": F(1), "H3": F(5)}
    bal = [b for b in indicial_solve(sys_, wv)
           if sum(1 for z in b.leading if z.is_zero) == 1][0]
    spec = set(kowalewski(sys_, bal).rational_spectrum())
    assert set(ws.values()) <= spec


def test_rdg_resonances_match_parameter_count():
    sys_ = builtin_system("rdg")
    meta = painleve_meta("rdg")
    wv = [w for w in detect_weights(sys_)
          if tuple(w.weights) == meta["weights"]][0]
    bal = [b for b in indicial_solve(sys_, wv) if meta["principal"](b)][0]
    kd = kowalewski(sys_, bal)
    nonneg = [r for r, _ in kd.rational_eigs if r >= 0 and r.denominator <= 2]
    assert sorted(nonneg) == [F(0), F(2), F(4)]


def test_propagate_residual_is_zero():
    sys_ = builtin_system("kvm")
    wv = detect_weights(sys_)[0]
    bal = [b for b in indicial_solve(sys_, wv)
           if sum(1 for z in b.leading if z.is_zero) == 1][0]
    fam = propagate(sys_, bal, 7)
    assert family_residual(fam) == []
    assert fam.count_free_parameters() == (3, 4)


def test_invariants_exactly_constant_along_families():
    # stronger than polar-part vanishing: a conserved quantity evaluated on
    # a genuine Laurent solution is constant, so EVERY nonzero-exponent
    # coefficient must vanish identically through the validity window
    for name in ("kvm", "henon-heiles", "rdg", "rdg5"):
        sys_ = builtin_system(name)
        meta = painleve_meta(name)
        wv = [w for w in detect_weights(sys_)
              if tuple(w.weights) == meta["weights"]][0]
        bal = [b for b in indicial_solve(sys_, wv) if meta["principal"](b)][0]
        bal = bal.rename_free(meta.get("rename", {}))
        fam = propagate(sys_, bal, meta["order"],
                        resonance_names=meta.get("resonance_names"),
                        resonance_slots=meta.get("resonance_slots"))
        for nm in sys_.invariants:
            S = invariant_series(fam, nm)
            assert S.valid > 0
            for e, c in S.terms():
                assert e == 0 or c.is_zero, (name, nm, e)


def test_non_invariant_detected_by_polar_part():
    sys_ = builtin_system("kvm")
    from dataclasses import replace
    broken = replace(sys_, invariants=dict(sys_.invariants,
                                           FAKE=MultiPoly.var("x1") ** 2))
    wv = detect_weights(broken)[0]
    bal = [b for b in indicial_solve(broken, wv)
           if sum(1 for z in b.leading if z.is_zero) == 1 and
           not b.leading[0].is_zero][0]
    fam = propagate(broken, bal, 6)
    with pytest.raises(PolarPartError):
        constraint_curve(broken, fam, ["FAKE"])


def test_obstruction_with_certificate():
    sys_ = parse_system("""
system damped
vars z1 z2
eq z1 = z2
eq z2 = 6*z1^2 + z2
""")
    bal = indicial_solve(sys_, detect_weights(sys_)[0])[0]
    with pytest.raises(PainleveObstruction) as exc:
        propagate(sys_, bal, 8)
    assert exc.value.step == 6
    assert exc.value.pairing is not None and not exc.value.pairing.is_zero
    assert exc.value.certificate is not None


def test_elliptic_counterpart_passes():
    sys_ = parse_system("""
system elliptic
vars z1 z2
eq z1 = z2
eq z2 = 6*z1^2 + z1
""")
    bal = indicial_solve(sys_, detect_weights(sys_)[0])[0]
    fam = propagate(sys_, bal, 8)
    assert fam.series["z1"].coeff(0) == MultiPoly.const(F(-1, 12))
    assert fam.series["z1"].coeff(2) == MultiPoly.const(F(1, 240))


def test_family_not_polynomial_raised_then_specialization_works():
    sys_ = builtin_system("hh5")
    meta = painleve_meta("hh5")
    wv = [w for w in detect_weights(sys_)
          if tuple(w.weights) == meta["weights"]][0]
    bal = [b for b in indicial_solve(sys_, wv) if meta["principal"](b)][0]
    bal = bal.rename_free(meta["rename"])
    with pytest.raises(FamilyNotPolynomial):
        propagate(sys_, bal, 8)
    fam = propagate(sys_, bal.specialize(meta["specialize"]), 8)
    explicit, with_t0 = fam.count_free_parameters()
    # 3 resonance parameters + the specialized balance symbol = m - 1
    assert explicit + len(meta["specialize"]) == 4
    assert [j for j, _ in fam.resonances] == [2, 4, 6]


def test_solver_branch_labels():
    x = MultiPoly.var("x")
    sols = solve_poly_system([x ** 2 - MultiPoly.const(F(1, 4))], ["x"])
    roots = {s["x"].const_value() for s, _ in sols}
    assert roots == {F(1, 2), F(-1, 2)}
    assert all(choices for _, choices in sols)


def test_analyze_report_shape():
    sys_ = builtin_system("rdg")
    meta = dict(painleve_meta("rdg"))
    meta["balance_filter"] = meta["principal"]
    rep = analyze(sys_, 6, builtin_meta=meta)
    assert rep["system"] == "rdg"
    assert len(rep["balances"]) == 2
    for entry in rep["balances"]:
        assert entry["parameter_count"]["explicit"] == 3
        assert entry["parameter_count"]["with_time_origin"] == 4
        assert "series" in entry and "q1" in entry["series"]
        assert "constraint" in entry and entry["constraint"]["curve"]


def test_propagate_default_order_and_low_order_rejected():
    sys_ = builtin_system("kvm")
    wv = detect_weights(sys_)[0]
    bal = [b for b in indicial_solve(sys_, wv)
           if sum(1 for z in b.leading if z.is_zero) == 1][0]
    fam = propagate(sys_, bal)           # default: max resonance + 4
    assert fam.series["x1"].valid == -1 + 9 + 1
    with pytest.raises(ValueError, match="resonance"):
        propagate(sys_, bal, 3)


def test_weight_homogeneous_invariants_with_nonzero_gradient_hit_spectrum():
    # the eigenvalue property, stated with its genuine hypothesis: the
    # invariant's gradient must not vanish at the balance
    for name in ("kvm", "rdg", "rdg5"):
        sys_ = builtin_system(name)
        meta = painleve_meta(name)
        wv = [w for w in detect_weights(sys_)
              if tuple(w.weights) == meta["weights"]][0]
        for bal in indicial_solve(sys_, wv):
            if not meta["principal"](bal):
                continue
            spec = set(kowalewski(sys_, bal).rational_spectrum())
            env = dict(zip(sys_.variables, bal.leading))
            for nm, H in sys_.invariants.items():
                k = invariant_weight(sys_, nm, wv)
                if k is None:
                    continue
                grad = [H.diff(v).subs(env) for v in sys_.variables]
                if all(g.is_zero for g in grad):
                    continue
                assert k in spec, (name, nm, k, spec)


def test_solver_polynomial_coefficient_elimination():
    # (x+1)(y-1) = 0 and (x+1)(y^2-4) = 0: the only branch that survives
    # is x = -1 with y free (y=1 forces y^2=4, impossible); reaching it
    # needs elimination with a polynomial pivot coefficient
    x, y = MultiPoly.var("x"), MultiPoly.var("y")
    e1 = x * y + y - x - 1
    e2 = x * y ** 2 + y ** 2 - 4 * x - 4
    sols = solve_poly_system([e1, e2], ["x", "y"])
    assert len(sols) == 1
    sol, _ = sols[0]
    assert sol["x"] == MultiPoly.const(-1)
    assert "y" not in sol


def test_solver_records_algebraic_branches():
    x, y = MultiPoly.var("x"), MultiPoly.var("y")
    dropped = []
    sols = solve_poly_system([x ** 2 * y + x + 1, x * y ** 2 - 2], ["x", "y"],
                             algebraic_out=dropped)
    assert sols == []
    assert dropped, "the irrational branch must be reported"
