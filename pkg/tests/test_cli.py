import io
import json
import subprocess
import sys

import numpy as np

from conftest import ket, pure_ensemble

from qsd import compute_lsm
from qsd.cli import dispatch
from qsd.serialize import (
    certificate_to_wire,
    dumps,
    ensemble_from_wire,
    ensemble_to_wire,
    povm_from_wire,
    povm_to_wire,
    sim_result_from_wire,
    solve_result_from_wire,
)


def write_json(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(dumps(payload))
    return str(path)


def ortho_pair_files(tmp_path):
    e = pure_ensemble((0.5, 0.5), (ket(1, 0), ket(0, 1)))
    povm = compute_lsm(e)
    return (
        write_json(tmp_path, "ensemble.json", ensemble_to_wire(e)),
        write_json(tmp_path, "povm.json", povm_to_wire(povm)),
        e,
        povm,
    )


def test_gen_lsm_checkvnm_pipeline(monkeypatch, tmp_path):
    gen = dispatch(
        ["gen", "--dim", "2", "--ranks", "1,1", "--priors", "uniform",
         "--seed", "1", "--independent"]
    )
    assert gen.exit_code == 0
    ensemble_from_wire(json.loads(gen.stdout))  # round-trips

    monkeypatch.setattr(sys, "stdin", io.StringIO(gen.stdout))
    lsm = dispatch(["lsm", "-"])
    assert lsm.exit_code == 0
    povm_from_wire(json.loads(lsm.stdout))

    e_path = write_json(tmp_path, "e.json", json.loads(gen.stdout))
    p_path = write_json(tmp_path, "p.json", json.loads(lsm.stdout))
    check = dispatch(["check-vnm", e_path, p_path])
    assert check.exit_code == 0
    assert json.loads(check.stdout)["is_von_neumann"] is True


def test_pd_orthogonal_pair(tmp_path):
    e_path, p_path, _, _ = ortho_pair_files(tmp_path)
    result = dispatch(["pd", e_path, p_path])
    assert result.exit_code == 0
    assert json.loads(result.stdout) == {"pd": 1.0}


def test_certify_zero_dual_exits_one(tmp_path):
    e_path, p_path, e, povm = ortho_pair_files(tmp_path)
    from qsd import certify

    bogus = certify(e, povm, np.zeros((2, 2)))
    c_path = write_json(tmp_path, "cert.json", certificate_to_wire(bogus))
    result = dispatch(["certify", e_path, p_path, c_path])
    assert result.exit_code == 1
    wire = json.loads(result.stdout)
    assert min(wire["feas_margins"]) < -0.4
    assert "infeasible" in result.stderr


def test_solve_then_certify_self_consistent(tmp_path):
    e = pure_ensemble((0.7, 0.3), (ket(1, 0), ket(1, 1)))
    e_path = write_json(tmp_path, "e.json", ensemble_to_wire(e))
    out_path = str(tmp_path / "povm.json")
    cert_path = str(tmp_path / "cert.json")
    solved = dispatch(
        ["solve", e_path, "--out", out_path, "--cert", cert_path]
    )
    assert solved.exit_code == 0
    povm, cert, diag = solve_result_from_wire(json.loads(solved.stdout))
    assert diag["converged"] is True

    recheck = dispatch(
        ["certify", e_path, out_path, cert_path, "--tol", "1e-8"]
    )
    assert recheck.exit_code == 0, recheck.stderr
    assert "feasible and slack" in recheck.stderr


def test_solve_not_converged_exits_one(tmp_path):
    e = pure_ensemble((0.7, 0.3), (ket(1, 0), ket(1, 1)))
    e_path = write_json(tmp_path, "e.json", ensemble_to_wire(e))
    result = dispatch(["solve", e_path, "--max-iter", "1"])
    assert result.exit_code == 1
    assert json.loads(result.stdout)["diagnostics"]["converged"] is False
    assert "not converged" in result.stderr


def test_validate_failure_exits_one(tmp_path):
    e = pure_ensemble((0.6, 0.6), (ket(1, 0), ket(0, 1)))
    e_path = write_json(tmp_path, "e.json", ensemble_to_wire(e))
    result = dispatch(["validate", e_path])
    assert result.exit_code == 1
    assert json.loads(result.stdout)["passed"] is False


def test_validate_pass(tmp_path):
    e_path, _, _, _ = ortho_pair_files(tmp_path)
    result = dispatch(["validate", e_path])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["passed"] is True


def test_simulate_cli(tmp_path):
    e_path, p_path, _, _ = ortho_pair_files(tmp_path)
    result = dispatch(
        ["simulate", e_path, p_path, "--trials", "200", "--seed", "9"]
    )
    assert result.exit_code == 0
    res = sim_result_from_wire(json.loads(result.stdout))
    assert res.trials == 200 and res.empirical_pd == 1.0


def test_span_deficient_is_domain_failure(tmp_path):
    e = pure_ensemble((0.5, 0.5), (ket(1, 0, 0), ket(1, 1, 0)))
    e_path = write_json(tmp_path, "e.json", ensemble_to_wire(e))
    result = dispatch(["lsm", e_path])
    assert result.exit_code == 1
    wire = json.loads(result.stdout)
    assert wire["passed"] is False and wire["span_rank"] == 2


def test_unknown_command_exits_two():
    result = dispatch(["frobnicate"])
    assert result.exit_code == 2
    assert result.stdout == ""


def test_malformed_json_exits_two(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    result = dispatch(["validate", str(path)])
    assert result.exit_code == 2
    assert result.stderr.startswith("error:")


def test_missing_file_exits_two():
    result = dispatch(["validate", "/nonexistent/e.json"])
    assert result.exit_code == 2


def test_gen_bad_ranks_exits_two():
    result = dispatch(
        ["gen", "--dim", "2", "--ranks", "1,1,1", "--seed", "0", "--independent"]
    )
    assert result.exit_code == 2


def test_gen_bad_rank_format_exits_two():
    result = dispatch(["gen", "--dim", "2", "--ranks", "a,b", "--seed", "0"])
    assert result.exit_code == 2


def test_gen_explicit_priors(tmp_path):
    result = dispatch(
        ["gen", "--dim", "2", "--ranks", "1,1", "--priors", "0.25,0.75",
         "--seed", "4", "--independent"]
    )
    assert result.exit_code == 0
    e = ensemble_from_wire(json.loads(result.stdout))
    assert e.states[0].prior == 0.25


def test_mismatched_inputs_exit_two(tmp_path):
    e3 = pure_ensemble((0.5, 0.5), (ket(1, 0, 0), ket(0, 1, 0)))
    e_path = write_json(tmp_path, "e3.json", ensemble_to_wire(e3))
    _, p_path, _, _ = ortho_pair_files(tmp_path)
    result = dispatch(["pd", e_path, p_path])
    assert result.exit_code == 2


def test_console_entry_point(tmp_path):
    e_path, p_path, _, _ = ortho_pair_files(tmp_path)
    proc = subprocess.run(
        [sys.executable, "-m", "qsd.cli", "pd", e_path, p_path],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"pd": 1.0}
