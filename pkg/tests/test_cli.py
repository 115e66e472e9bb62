import json
import math

import numpy as np
import pytest

from cqbounds import umbrella_c5
from cqbounds.cli import export_curve, load_channel, load_input, main, parse_curve_csv
from cqbounds.errors import ValidationError
from cqbounds.exponents import SpherePackingCurve

LN2 = math.log(2.0)
PENTAGON = {"kind": "graph", "n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]]}
BSC = {"kind": "classical", "W": [[0.9, 0.1], [0.1, 0.9]]}
NOISELESS = {"kind": "classical", "W": [[1.0, 0.0], [0.0, 1.0]]}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def umbrella_doc():
    um = umbrella_c5()
    return {
        "kind": "vector-rep",
        "graph": {"n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]]},
        "vectors": [[[v.real, v.imag] for v in vec] for vec in um.vectors],
        "handle": [[v.real, v.imag] for v in um.handle],
    }


def umbrella_projector_doc():
    um = umbrella_c5()
    projs = [np.outer(v, v.conj()) for v in um.vectors]
    return {
        "kind": "projector-rep",
        "graph": {"n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]]},
        "projectors": [
            [[[z.real, z.imag] for z in row] for row in P] for P in projs
        ],
    }


class TestLoaders:
    def test_load_classical(self, tmp_path):
        ch = load_channel(write(tmp_path, "bsc.json", BSC))
        assert ch.input_size == 2

    def test_load_cq(self, tmp_path):
        doc = {
            "kind": "cq",
            "states": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
            ],
        }
        ch = load_channel(write(tmp_path, "cq.json", doc))
        assert ch.dim == 2 and ch.input_size == 2

    def test_load_bad_channel_names_row(self, tmp_path):
        path = write(tmp_path, "bad.json", {"kind": "classical", "W": [[0.5, 0.4], [0.1, 0.9]]})
        with pytest.raises(ValidationError, match="row 0 sums to 0.9"):
            load_channel(path)

    def test_load_graph_and_reps(self, tmp_path):
        g = load_input(write(tmp_path, "g.json", PENTAGON))
        assert g.n == 5
        rep = load_input(write(tmp_path, "rep.json", umbrella_doc()))
        assert len(rep.vectors) == 5
        prep = load_input(write(tmp_path, "prep.json", umbrella_projector_doc()))
        assert len(prep.projectors) == 5

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(ValidationError):
            load_input(write(tmp_path, "x.json", {"kind": "mystery"}))


class TestCommands:
    def test_theta_pentagon(self, tmp_path, capsys):
        path = write(tmp_path, "g.json", PENTAGON)
        code, doc = run_cli(capsys, ["--input", path, "--command", "theta"])
        assert code == 0
        assert doc["results"]["theta_log"]["value"] == pytest.approx(0.804719, abs=1e-4)
        assert doc["results"]["gap"] < 1e-6

    def test_capacity_bsc(self, tmp_path, capsys):
        path = write(tmp_path, "bsc.json", BSC)
        code, doc = run_cli(capsys, ["--input", path, "--command", "capacity"])
        assert code == 0
        assert doc["results"]["capacity"]["value"] == pytest.approx(0.368064, abs=1e-6)
        assert doc["results"]["capacity_minmax"]["value"] == pytest.approx(0.368064, abs=1e-6)

    def test_e0_and_rrho(self, tmp_path, capsys):
        path = write(tmp_path, "bsc.json", BSC)
        code, doc = run_cli(capsys, ["--input", path, "--command", "e0", "--rho", "1.0"])
        assert code == 0
        assert doc["results"]["e0"]["value"] == pytest.approx(-math.log(0.8), abs=1e-8)
        code, doc = run_cli(capsys, ["--input", path, "--command", "rrho", "--rho", "1.0"])
        assert code == 0
        assert doc["results"]["r_rho"]["value"] == pytest.approx(-math.log(0.8), abs=1e-6)

    def test_radius(self, tmp_path, capsys):
        path = write(tmp_path, "bsc.json", BSC)
        code, doc = run_cli(capsys, ["--input", path, "--command", "radius", "--alpha", "0.5"])
        assert code == 0
        assert doc["results"]["radius"]["value"] == pytest.approx(-math.log(0.8), abs=1e-6)

    def test_rinf_classical_and_cfb(self, tmp_path, capsys):
        W = np.zeros((5, 5))
        for x in range(5):
            W[x, x] = 0.5
            W[x, (x + 1) % 5] = 0.5
        path = write(tmp_path, "pent.json", {"kind": "classical", "W": W.tolist()})
        code, doc = run_cli(capsys, ["--input", path, "--command", "rinf"])
        assert code == 0
        assert doc["results"]["r_inf_primal"]["value"] == pytest.approx(math.log(2.5), abs=1e-6)
        assert doc["results"]["r_inf_dual"]["value"] == pytest.approx(math.log(2.5), abs=1e-6)
        code, doc = run_cli(capsys, ["--input", path, "--command", "cfb"])
        assert doc["results"]["c_fb"]["value"] == pytest.approx(math.log(2.5), abs=1e-6)

    def test_rinf_quantum(self, tmp_path, capsys):
        doc_in = {
            "kind": "cq",
            "states": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
            ],
        }
        path = write(tmp_path, "cq.json", doc_in)
        code, doc = run_cli(capsys, ["--input", path, "--command", "rinf"])
        assert code == 0
        assert doc["results"]["r_inf"]["value"] == pytest.approx(LN2, abs=1e-6)

    def test_esp_curve_with_infinities(self, tmp_path, capsys):
        path = write(tmp_path, "noiseless.json", NOISELESS)
        code, doc = run_cli(
            capsys,
            ["--input", path, "--command", "esp-curve", "--rate-grid", "0.1:0.7:0.2"],
        )
        assert code == 0
        rows = doc["results"]["curve"]
        assert [r["R"] for r in rows] == pytest.approx([0.1, 0.3, 0.5, 0.7])
        for row in rows:
            if row["R"] < LN2 - 1e-3:
                assert row["is_infinite"] and row["Esp"] is None
            elif row["R"] >= LN2:
                assert row["Esp"] == pytest.approx(0.0, abs=1e-9)

    def test_value_and_value_sp(self, tmp_path, capsys):
        path = write(tmp_path, "rep.json", umbrella_doc())
        code, doc = run_cli(capsys, ["--input", path, "--command", "value"])
        assert code == 0
        assert doc["results"]["value"]["value"] == pytest.approx(0.804719, abs=1e-6)
        path = write(tmp_path, "prep.json", umbrella_projector_doc())
        code, doc = run_cli(capsys, ["--input", path, "--command", "value-sp"])
        assert code == 0
        assert doc["results"]["value_sp"]["value"] == pytest.approx(0.804719, abs=1e-4)

    def test_zero_error_bound(self, tmp_path, capsys):
        path = write(tmp_path, "g.json", PENTAGON)
        code, doc = run_cli(
            capsys,
            ["--input", path, "--command", "zero-error-bound", "--blocklength", "2"],
        )
        assert code == 0
        assert doc["results"]["independence_number"] == 5
        assert doc["results"]["rate"]["value"] == pytest.approx(0.5 * math.log(5), abs=1e-9)
        assert len(doc["results"]["witness"]) == 5

    def test_certify(self, tmp_path, capsys):
        path = write(tmp_path, "rep.json", umbrella_doc())
        code, doc = run_cli(
            capsys, ["--input", path, "--command", "certify", "--blocklength", "2"]
        )
        assert code == 0
        res = doc["results"]
        assert res["lower"]["value"] == pytest.approx(0.804719, abs=1e-5)
        assert res["theta_sp_log"]["value"] == pytest.approx(0.804719, abs=1e-4)
        assert res["theta_log"]["value"] == pytest.approx(0.804719, abs=1e-4)

    def test_units_bits(self, tmp_path, capsys):
        path = write(tmp_path, "bsc.json", BSC)
        _, nats = run_cli(capsys, ["--input", path, "--command", "capacity"])
        _, bits = run_cli(capsys, ["--input", path, "--command", "capacity", "--units", "bits"])
        assert bits["results"]["capacity"]["value"] == pytest.approx(
            nats["results"]["capacity"]["value"] / LN2, abs=1e-12
        )


class TestExitCodes:
    def test_validation_error_exits_2(self, tmp_path, capsys):
        path = write(tmp_path, "bad.json", {"kind": "classical", "W": [[0.5, 0.4], [0.1, 0.9]]})
        code = main(["--input", path, "--command", "capacity"])
        err = capsys.readouterr().err
        assert code == 2
        assert "row 0 sums to 0.9" in err

    def test_missing_param_exits_2(self, tmp_path, capsys):
        path = write(tmp_path, "bsc.json", BSC)
        assert main(["--input", path, "--command", "e0"]) == 2

    def test_bad_alpha_exits_2(self, tmp_path, capsys):
        path = write(tmp_path, "bsc.json", BSC)
        assert main(["--input", path, "--command", "radius", "--alpha", "1.5"]) == 2

    def test_size_cap_exits_4(self, tmp_path, capsys):
        path = write(tmp_path, "g.json", PENTAGON)
        code = main(["--input", path, "--command", "zero-error-bound", "--blocklength", "9"])
        assert code == 4

    def test_missing_file_exits_2(self, tmp_path, capsys):
        assert main(["--input", str(tmp_path / "nope.json"), "--command", "capacity"]) == 2


class TestCurveExport:
    def test_three_point_curve_is_four_lines(self, tmp_path):
        curve = SpherePackingCurve(
            points=((0.0, 1.0), (0.5, 0.25), (1.0, 0.0)), r_inf_estimate=0.0
        )
        path = tmp_path / "c.csv"
        export_curve(curve, str(path))
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 4
        assert lines[0] == "R_nats,Esp_nats"

    def test_infinite_row_format(self, tmp_path):
        curve = SpherePackingCurve(points=((0.1, math.inf),), r_inf_estimate=0.2)
        path = tmp_path / "c.csv"
        export_curve(curve, str(path))
        assert path.read_text().strip().split("\n")[1] == "0.100000000000,inf"

    def test_round_trip(self, tmp_path, capsys):
        src = write(tmp_path, "noiseless.json", NOISELESS)
        out = tmp_path / "curve.csv"
        code, doc = run_cli(
            capsys,
            [
                "--input", src, "--command", "esp-curve",
                "--rate-grid", "0.1:0.8:0.1", "--out", str(out),
            ],
        )
        assert code == 0
        parsed = parse_curve_csv(str(out))
        rows = doc["results"]["curve"]
        assert len(parsed) == len(rows)
        for (r_csv, v_csv), row in zip(parsed, rows):
            assert r_csv == pytest.approx(row["R"], abs=1e-11)
            if row["is_infinite"]:
                assert v_csv == math.inf
            else:
                assert v_csv == pytest.approx(row["Esp"], abs=1e-11)


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv_tail",
        [
            ["--command", "capacity", "--seed", "7"],
            ["--command", "radius", "--alpha", "0.5", "--seed", "7"],
            ["--command", "e0", "--rho", "2.0", "--seed", "7"],
        ],
    )
    def test_documents_are_bitwise_identical(self, tmp_path, capsys, argv_tail):
        path = write(tmp_path, "bsc.json", BSC)
        code1 = main(["--input", path] + argv_tail)
        out1 = capsys.readouterr().out
        code2 = main(["--input", path] + argv_tail)
        out2 = capsys.readouterr().out
        assert code1 == code2 == 0
        assert out1 == out2
