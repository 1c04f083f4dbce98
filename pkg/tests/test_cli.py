import json
import os

import pytest

from laxkit.cli import main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_painleve_builtin_report(tmp_path):
    code = run(tmp_path, "painleve", "--builtin", "henon-heiles", "--order", "8")
    assert code == 0
    path = tmp_path / "painleve_henon-heiles.json"
    payload = json.loads(path.read_text())
    assert payload["laxkit_report"] == 1
    bal = payload["balances"][0]
    assert bal["series"]["y2"]["-2"] == "-3/8"
    assert bal["series"]["y2"]["4"] == "-gamma"
    assert bal["parameter_count"] == {"explicit": 3, "with_time_origin": 4}
    assert "constraint" in bal and bal["constraint"]["curve"]


def test_painleve_bind_constant(tmp_path):
    code = run(tmp_path, "painleve", "--builtin", "henon-heiles",
               "--order", "8", "--bind", "A=1")
    assert code == 0
    payload = json.loads((tmp_path / "painleve_henon-heiles.json").read_text())
    y2 = payload["balances"][0]["series"]["y2"]
    assert y2["0"] == "-1/2"        # -A/2 with A bound to 1
    assert y2["2"] == "-2/5"


def test_painleve_missing_file_exits_1_no_output(tmp_path):
    code = run(tmp_path, "painleve", "--file", str(tmp_path / "absent.ivf"))
    assert code == 1
    assert list(tmp_path.iterdir()) == []


def test_painleve_obstruction_exit_code(tmp_path):
    src = tmp_path / "damped.ivf"
    src.write_text("system damped\nvars z1 z2\neq z1 = z2\n"
                   "eq z2 = 6*z1^2 + z2\n")
    code = run(tmp_path, "painleve", "--file", str(src), "--order", "8")
    assert code == 2
    payload = json.loads((tmp_path / "painleve_damped.json").read_text())
    assert any("obstruction" in b for b in payload["balances"])


def test_painleve_deterministic_output(tmp_path):
    d1 = tmp_path / "r1"
    d2 = tmp_path / "r2"
    for d in (d1, d2):
        d.mkdir()
        assert main(["painleve", "--builtin", "rdg", "--order", "6",
                     "--out", str(d)]) == 0
    assert (d1 / "painleve_rdg.json").read_bytes() == \
        (d2 / "painleve_rdg.json").read_bytes()


def test_flow_toda(tmp_path):
    code = run(tmp_path, "flow", "--builtin", "toda-periodic", "-N", "3",
               "--t-end", "1.0")
    assert code == 0
    payload = json.loads((tmp_path / "flow_toda-periodic.json").read_text())
    assert payload["trace_drift"] < 1e-8
    assert payload["pass"] is True
    lines = (tmp_path / "flow_toda-periodic.csv").read_text().splitlines()
    assert lines[0].startswith("t,a1")
    assert len(lines) > 2


def test_flow_kvm_invariants(tmp_path):
    code = run(tmp_path, "flow", "--builtin", "kvm", "--tol", "1e-9")
    assert code == 0
    payload = json.loads((tmp_path / "flow_kvm.json").read_text())
    assert max(payload["invariant_drift"].values()) < 1e-9


def test_flow_rejects_bad_dt(tmp_path):
    code = run(tmp_path, "flow", "--builtin", "toda-periodic", "--dt", "0")
    assert code == 1


def test_flow_gnuplot_script(tmp_path):
    code = run(tmp_path, "flow", "--builtin", "toda-periodic", "-N", "3",
               "--t-end", "0.1", "--gnuplot")
    assert code == 0
    assert (tmp_path / "flow_toda-periodic.gp").exists()


def test_jacobi_report_and_stieltjes(tmp_path):
    code = run(tmp_path, "jacobi", "-a", "1,1", "-b", "0,0", "--a0", "1",
               "--check-stieltjes")
    assert code == 0
    payload = json.loads((tmp_path / "jacobi_report.json").read_text())
    assert payload["stieltjes_check"]["pass"] is True
    assert payload["stieltjes_check"]["max_error"] < 1e-6
    assert payload["stable_bands"] == [[-2.0, 0.0], [0.0, 2.0]]


def test_jacobi_interlacing_table(tmp_path):
    code = run(tmp_path, "jacobi", "-a", "1,2,3", "-b", "0.5,-0.5,0")
    assert code == 0
    payload = json.loads((tmp_path / "jacobi_report.json").read_text())
    assert payload["interlacing_ok"] is True
    assert len(payload["stable_bands"]) == 3
    assert len(payload["auxiliary_spectrum"]) == 2


def test_jacobi_rejects_zero_alpha(tmp_path):
    code = run(tmp_path, "jacobi", "-a", "1,0", "-b", "0,0")
    assert code == 1


def test_jacobi_toda_csv(tmp_path):
    code = run(tmp_path, "jacobi", "-a", "1,0.8,1.3", "-b", "0.2,-0.1,0.4",
               "--toda-t-end", "0.2")
    assert code == 0
    payload = json.loads((tmp_path / "jacobi_report.json").read_text())
    assert payload["toda"]["interlacing_ok"] is True
    assert (tmp_path / "jacobi_toda.csv").exists()


def test_check_subset(tmp_path):
    code = run(tmp_path, "check", "--only", "dims")
    assert code == 0


def test_check_tight_tolerance_fails(tmp_path):
    code = run(tmp_path, "check", "--only", "jacobi", "--tol", "1e-15")
    assert code == 1


def test_painleve_hh5_specializes(tmp_path):
    code = run(tmp_path, "painleve", "--builtin", "hh5")
    assert code == 0
    payload = json.loads((tmp_path / "painleve_hh5.json").read_text())
    bal = payload["balances"][0]
    assert bal.get("specialized") == {"alpha": "1"}
    assert bal["parameter_count"]["explicit"] == 4   # 3 resonances + alpha


def test_painleve_harmonic_no_weights(tmp_path):
    code = run(tmp_path, "painleve", "--builtin", "harmonic")
    assert code == 0
    payload = json.loads((tmp_path / "painleve_harmonic.json").read_text())
    assert payload["weights"] == []
    assert payload["balances"] == []


def test_painleve_kvm_five_principal_families(tmp_path):
    code = run(tmp_path, "painleve", "--builtin", "kvm")
    assert code == 0
    # the report is named after the system's own declared name
    payload = json.loads((tmp_path / "painleve_kvm5.json").read_text())
    assert len(payload["balances"]) == 5
    for bal in payload["balances"]:
        assert bal["parameter_count"]["with_time_origin"] == 4
        assert [j for j, _ in bal["resonance_steps"]] == [1, 2, 5]


def test_jacobi_toda_csv_has_band_edges(tmp_path):
    code = run(tmp_path, "jacobi", "-a", "1,2", "-b", "0,0",
               "--toda-t-end", "0.1")
    assert code == 0
    header = (tmp_path / "jacobi_toda.csv").read_text().splitlines()[0]
    assert "xi1" in header and "xi4" in header and "sigma1" in header


def test_jacobi_band_table_csv(tmp_path):
    code = run(tmp_path, "jacobi", "-a", "1,2,3", "-b", "0.5,-0.5,0",
               "--format", "csv")
    assert code == 0
    lines = (tmp_path / "jacobi_bands.csv").read_text().splitlines()
    assert lines[0] == "kind,lo,hi"
    kinds = [ln.split(",")[0] for ln in lines[1:]]
    assert kinds == ["stable", "gap", "stable", "gap", "stable"]


def test_flow_euler_arnold(tmp_path):
    code = run(tmp_path, "flow", "--builtin", "euler-arnold", "-N", "4",
               "--t-end", "0.5")
    assert code == 0
    payload = json.loads((tmp_path / "flow_euler-arnold.json").read_text())
    assert payload["trace_drift"] < 1e-8


def test_flow_neumann(tmp_path):
    code = run(tmp_path, "flow", "--builtin", "neumann", "-N", "3",
               "--t-end", "0.5")
    assert code == 0
    payload = json.loads((tmp_path / "flow_neumann.json").read_text())
    assert payload["trace_drift"] < 1e-8
    assert payload["branch_count_with_infinity"] == 6
    assert len(payload["branch_points"]) == 5


def test_unknown_flow_builtin(tmp_path):
    assert run(tmp_path, "flow", "--builtin", "wat") == 1
