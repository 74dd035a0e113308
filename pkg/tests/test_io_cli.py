import json
import subprocess
import sys

import numpy as np
import pytest

from sicq import io
from sicq.cli import main
from sicq.sampling import get_rng, random_density_operator, random_povm, random_unitary
from sicq.sicframe import build_mub, known_sic


class TestJsonFormats:
    def test_operator_round_trip(self):
        rng = get_rng(0)
        rho = random_density_operator(3, rng)
        doc = io.operator_doc(rho)
        back = io.parse_operator(json.loads(io.dump_json(doc)))
        assert np.array_equal(back, rho)  # float repr is lossless

    def test_povm_round_trip(self):
        povm = random_povm(2, 3, get_rng(1))
        back = io.parse_povm(json.loads(io.dump_json(io.povm_doc(povm))))
        assert np.array_equal(back, povm)

    def test_prob_round_trip(self):
        p = np.array([0.1, 0.2, 0.3, 0.4])
        back = io.parse_prob(json.loads(io.dump_json(io.prob_doc(p))))
        assert np.array_equal(back, p)

    def test_frame_round_trip_with_vectors(self):
        frame = known_sic(3)
        back = io.parse_frame(json.loads(io.dump_json(io.frame_doc(frame))))
        assert back.dim == 3
        assert np.array_equal(back.vectors, frame.vectors)
        assert back.provenance == frame.provenance

    def test_frame_from_projectors_only(self):
        frame = known_sic(2)
        doc = io.frame_doc(frame)
        doc.pop("vectors")
        back = io.parse_frame(doc)
        assert back.vectors is None
        assert np.max(np.abs(back.projectors - frame.projectors)) < 1e-15
        # vector recovery must reproduce the projectors and the Gram overlaps
        v = back.frame_vectors()
        assert np.max(np.abs(np.einsum("ia,ib->iab", v, v.conj()) - frame.projectors)) < 1e-12

    def test_mub_round_trip(self):
        mub = build_mub(3)
        back = io.parse_mub(json.loads(io.dump_json(io.mub_doc(mub))))
        assert np.array_equal(back.projectors, mub.projectors)

    def test_malformed_json_reports_offset(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"dim": 2, "matrix": [[')
        with pytest.raises(io.DocumentError, match="byte offset"):
            io.load_json(bad)

    def test_missing_file(self, tmp_path):
        with pytest.raises(io.DocumentError, match="cannot read"):
            io.load_json(tmp_path / "nope.json")


@pytest.fixture()
def d2_setup(tmp_path):
    """Frame, state, POVM, unitary and prob files for d=2 CLI runs."""
    rng = get_rng(5)
    paths = {}
    frame = known_sic(2)
    paths["frame"] = tmp_path / "frame.json"
    io.save_json(io.frame_doc(frame), paths["frame"])
    paths["state"] = tmp_path / "state.json"
    io.save_json(io.operator_doc(random_density_operator(2, rng)), paths["state"])
    paths["povm"] = tmp_path / "povm.json"
    io.save_json(io.povm_doc(random_povm(2, 3, rng)), paths["povm"])
    paths["unitary"] = tmp_path / "unitary.json"
    io.save_json(io.operator_doc(random_unitary(2, rng)), paths["unitary"])
    paths["prob"] = tmp_path / "prob.json"
    io.save_json(io.prob_doc(np.array([0.5, 1 / 6, 1 / 6, 1 / 6])), paths["prob"])
    return paths


class TestCli:
    def test_build_then_verify(self, tmp_path, capsys):
        out = tmp_path / "f.json"
        assert main(["sic", "build", "--dim", "2", "--seeds", "0", "--out", str(out)]) == 0
        assert main(["sic", "verify", str(out)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["passed"] is True
        assert report["max_overlap_error"] <= 1e-8
        assert report["meta"]["tool"] == "sicq"

    def test_verify_rejects_corrupted_frame(self, tmp_path, capsys):
        frame = known_sic(2)
        doc = io.frame_doc(frame)
        doc.pop("vectors")
        doc["projectors"][0] = io.encode_complex_matrix(np.eye(2) / 2)
        path = tmp_path / "bad_frame.json"
        io.save_json(doc, path)
        assert main(["sic", "verify", str(path)]) == 1
        assert json.loads(capsys.readouterr().out)["passed"] is False

    def test_malformed_json_exits_2(self, tmp_path, capsys):
        path = tmp_path / "junk.json"
        path.write_text("{not json")
        assert main(["sic", "verify", str(path)]) == 2
        assert "byte offset" in capsys.readouterr().err

    def test_structurally_wrong_document_exits_2(self, tmp_path, capsys):
        path = tmp_path / "wrong.json"
        path.write_text('{"dim": 2}')  # valid JSON, but no frame payload
        assert main(["sic", "verify", str(path)]) == 2
        assert "not a valid SIC frame" in capsys.readouterr().err

    def test_solve_general(self, capsys):
        assert main(["solve-general", "--m", "4"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["n"] == 16
        assert doc["alpha"] == 5
        assert doc["beta"] == "1/4"
        assert doc["certainty_lambda0"] == "0"

    def test_solve_general_degenerate_usage_error(self, capsys):
        assert main(["solve-general", "--m", "1"]) == 2

    def test_mub_build_and_non_prime(self, tmp_path, capsys):
        out = tmp_path / "mub.json"
        assert main(["mub", "build", "--dim", "3", "--out", str(out)]) == 0
        mub = io.parse_mub(io.load_json(out))
        assert mub.n_outcomes == 12
        assert main(["mub", "build", "--dim", "4"]) == 2

    def test_real_feasibility(self, capsys):
        assert main(["real-feasibility", "--dim", "4"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert (doc["required_count"], doc["known_max"], doc["verdict"]) == (10, 6, "infeasible")

    def test_state_round_trip_via_files(self, d2_setup, tmp_path, capsys):
        prob_out = tmp_path / "p.json"
        assert main(["state", "to-prob", "--sic", str(d2_setup["frame"]),
                     "--state", str(d2_setup["state"]), "--out", str(prob_out)]) == 0
        rho_out = tmp_path / "rho.json"
        assert main(["state", "to-rho", "--sic", str(d2_setup["frame"]),
                     "--prob", str(prob_out), "--out", str(rho_out)]) == 0
        rho = io.parse_operator(io.load_json(rho_out))
        original = io.parse_operator(io.load_json(d2_setup["state"]))
        assert np.max(np.abs(rho - original)) < 1e-10

    def test_state_validate_accepts_and_rejects(self, d2_setup, tmp_path, capsys):
        assert main(["state", "validate", "--sic", str(d2_setup["frame"]),
                     "--prob", str(d2_setup["prob"])]) == 0
        capsys.readouterr()
        bad = tmp_path / "bad_prob.json"
        io.save_json(io.prob_doc(np.array([1.0, 0.0, 0.0, 0.0])), bad)
        assert main(["state", "validate", "--sic", str(d2_setup["frame"]),
                     "--prob", str(bad)]) == 1
        assert json.loads(capsys.readouterr().out)["valid"] is False

    def test_state_purity(self, d2_setup, capsys):
        assert main(["state", "purity", "--sic", str(d2_setup["frame"]),
                     "--prob", str(d2_setup["prob"])]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["pure"] is True

    def test_born_compare(self, d2_setup, capsys):
        assert main(["born", "--sic", str(d2_setup["frame"]), "--state", str(d2_setup["state"]),
                     "--povm", str(d2_setup["povm"]), "--compare"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["max_deviation"] <= 1e-10
        assert abs(sum(doc["q"]) - 1.0) < 1e-12

    def test_evolve_matches_library(self, d2_setup, capsys):
        assert main(["evolve", "--sic", str(d2_setup["frame"]), "--unitary",
                     str(d2_setup["unitary"]), "--prob", str(d2_setup["prob"])]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert abs(sum(doc["p"]) - 1.0) < 1e-12

    def test_evolve_flags_urungleichung_violation(self, d2_setup, tmp_path, capsys):
        bad = tmp_path / "point_mass.json"
        io.save_json(io.prob_doc(np.array([1.0, 0.0, 0.0, 0.0])), bad)
        assert main(["evolve", "--sic", str(d2_setup["frame"]), "--unitary",
                     str(d2_setup["unitary"]), "--prob", str(bad)]) == 1
        assert "urungleichung" in capsys.readouterr().err

    def test_selfcheck_csv_escapes_notes(self, capsys):
        assert main(["selfcheck", "--dims", "2", "--format", "csv"]) == 0
        out = capsys.readouterr().out
        header = next(ln for ln in out.splitlines() if not ln.startswith("#"))
        assert header == "suite,name,dim,residual,threshold,direction,status,note"
        import csv as _csv
        rows = list(_csv.reader(ln for ln in out.splitlines() if not ln.startswith("#")))
        assert all(len(r) == 8 for r in rows)

    def test_geometry_report_csv(self, capsys):
        assert main(["geometry", "report", "--dim", "3", "--format", "csv"]) == 0
        out = capsys.readouterr().out
        assert "# tool=sicq" in out
        assert "sphere_radius_sq,1/18" in out

    def test_born_csv_is_columnar(self, d2_setup, capsys):
        assert main(["born", "--sic", str(d2_setup["frame"]), "--state", str(d2_setup["state"]),
                     "--povm", str(d2_setup["povm"]), "--compare", "--format", "csv"]) == 0
        out = capsys.readouterr().out
        lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
        assert lines[0] == "index,q,oracle"
        assert len(lines) == 4  # header + 3 outcomes
        # scalar fields ride along as comments
        assert any(ln.startswith("# max_deviation=") for ln in out.splitlines())

    def test_geometry_sweep_deterministic(self, capsys):
        assert main(["geometry", "sweep", "--dim", "2", "--samples", "50", "--seed", "3"]) == 0
        first = capsys.readouterr().out
        assert main(["geometry", "sweep", "--dim", "2", "--samples", "50", "--seed", "3"]) == 0
        assert capsys.readouterr().out == first
        lines = [ln for ln in first.splitlines() if not ln.startswith("#")]
        assert lines[0] == "index,sphere_residual,zero_count,max_component"
        assert len(lines) == 51
        for row in lines[1:]:
            idx, res, zeros, comp = row.split(",")
            assert float(res) < 1e-9 and 0.0 < float(comp) <= 0.5 + 1e-12
            assert zeros.isdigit()

    def test_output_byte_identical_across_runs(self, capsys):
        assert main(["solve-general", "--m", "7"]) == 0
        a = capsys.readouterr().out
        assert main(["solve-general", "--m", "7"]) == 0
        assert capsys.readouterr().out == a

    def test_json_output_reingests(self, tmp_path, capsys):
        out = tmp_path / "frame2.json"
        assert main(["sic", "build", "--dim", "2", "--seeds", "1", "--out", str(out)]) == 0
        frame = io.parse_frame(io.load_json(out))
        resaved = tmp_path / "frame2b.json"
        io.save_json(io.frame_doc(frame, meta=None), resaved)
        again = io.parse_frame(io.load_json(resaved))
        assert np.array_equal(again.projectors, frame.projectors)

    def test_usage_error_bad_flag(self):
        with pytest.raises(SystemExit) as exc:
            main(["sic", "build", "--dim"])
        assert exc.value.code == 2

    def test_env_var_tolerance(self, monkeypatch, capsys):
        monkeypatch.setenv("SICQ_DEFAULT_TOL", "1e-7")
        assert main(["geometry", "report", "--dim", "2"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["meta"]["tolerances"]["default"] == 1e-7


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sicq.cli", "solve-general", "--m", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 4
