import csv
import json

import numpy as np
import pytest

from conftest import random_density, random_two_kraus_qubit
from dyncap.channel import kraus_channel_to_json
from dyncap.cli import build_parser, run
from dyncap.cqstate import ensemble_to_json, diagonal_pair_ensemble
from dyncap.errors import InvariantViolation
from dyncap.qmat import matrix_to_pairs
from dyncap.region import erasure_bounds


def run_cli(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_ensemble(tmp_path, ens, name="ens.json"):
    path = tmp_path / name
    path.write_text(json.dumps(ensemble_to_json(ens)))
    return str(path)


class TestRegionCommand:
    def test_csv_row_count_and_header(self, capsys):
        code, out, _ = run_cli(
            capsys, "region", "--channel", "dephasing:p=0.2", "--samples", "101"
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "param,cq_bound,qe_bound,cqe_bound,cef_c,cef_q,cef_e"
        assert len(lines) == 102

    def test_csv_round_trip(self, capsys):
        code, out, _ = run_cli(
            capsys, "region", "--channel", "erasure:eps=0.25", "--samples", "41"
        )
        assert code == 0
        rows = list(csv.DictReader(out.strip().split("\n")))
        for row in rows:
            p = float(row["param"])
            b = erasure_bounds(p, 0.25)
            assert float(row["cq_bound"]) == pytest.approx(b.cq_bound, abs=1e-7)
            assert float(row["qe_bound"]) == pytest.approx(b.qe_bound, abs=1e-7)
            assert float(row["cqe_bound"]) == pytest.approx(b.cqe_bound, abs=1e-7)

    def test_deterministic_output(self, capsys):
        args = ("region", "--channel", "dephasing:p=0.2", "--samples", "11")
        _, first, _ = run_cli(capsys, *args)
        _, second, _ = run_cli(capsys, *args)
        assert first == second

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "region",
            "--channel",
            "dephasing:p=0.2",
            "--samples",
            "5",
            "--format",
            "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["param_name"] == "nu"
        assert len(payload["samples"]) == 5

    def test_output_file_and_plot(self, capsys, tmp_path):
        out_path = tmp_path / "boundary.csv"
        code, _, _ = run_cli(
            capsys,
            "region",
            "--channel",
            "erasure:eps=0.25",
            "--samples",
            "21",
            "--output",
            str(out_path),
            "--plot",
        )
        assert code == 0
        assert out_path.exists()
        figure = tmp_path / "boundary.png"
        assert figure.exists() and figure.stat().st_size > 0

    def test_plot_path_explicit(self, capsys, tmp_path):
        figure = tmp_path / "custom.png"
        code, out, _ = run_cli(
            capsys,
            "region",
            "--channel",
            "dephasing:p=0.2",
            "--samples",
            "9",
            "--plot",
            str(figure),
        )
        assert code == 0
        assert figure.exists()

    def test_plot_to_stdout_needs_path(self, capsys):
        code, _, err = run_cli(
            capsys, "region", "--channel", "dephasing:p=0.2", "--plot"
        )
        assert code == 1
        assert "plot" in err

    def test_too_few_samples(self, capsys):
        code, _, _ = run_cli(
            capsys, "region", "--channel", "dephasing:p=0.2", "--samples", "1"
        )
        assert code == 1

    def test_kraus_channel_has_no_surface(self, capsys, tmp_path, rng):
        path = tmp_path / "ch.json"
        path.write_text(json.dumps(kraus_channel_to_json(random_two_kraus_qubit(rng))))
        code, _, err = run_cli(capsys, "region", "--channel", f"kraus:@{path}")
        assert code == 1
        assert "surface" in err


class TestDcapCommand:
    def test_erasure_value(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "dcap",
            "--channel",
            "erasure:eps=0.25",
            "--lambda",
            "0",
            "--mu",
            "0",
            "--budget",
            "4000",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["value"] == pytest.approx(1.5, abs=1e-4)
        assert payload["closed_form"] == pytest.approx(1.5)
        assert payload["seed"] == 1234
        assert payload["ensemble"]["entries"]

    def test_negative_weight_rejected(self, capsys):
        code, _, _ = run_cli(
            capsys, "dcap", "--channel", "erasure:eps=0.25", "--lambda", "-1"
        )
        assert code == 1

    def test_kraus_file_channel_no_closed_form(self, capsys, tmp_path, rng):
        path = tmp_path / "ch.json"
        path.write_text(json.dumps(kraus_channel_to_json(random_two_kraus_qubit(rng))))
        code, out, _ = run_cli(
            capsys, "dcap", "--channel", f"kraus:@{path}", "--budget", "2000"
        )
        assert code == 0
        payload = json.loads(out)
        assert "closed_form" not in payload
        assert payload["value"] > 0


class TestMemberCommand:
    def test_origin_inside(self, capsys):
        code, out, _ = run_cli(
            capsys, "member", "--channel", "erasure:eps=0.25", "--point", "0,0,0"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["inside"] is True

    def test_outside_point(self, capsys):
        code, out, _ = run_cli(
            capsys, "member", "--channel", "erasure:eps=0.25", "--point", "1.5,0,0"
        )
        assert code == 0
        assert json.loads(out)["inside"] is False

    def test_malformed_point(self, capsys):
        code, _, _ = run_cli(
            capsys, "member", "--channel", "erasure:eps=0.25", "--point", "1,2"
        )
        assert code == 1


class TestHyperplaneCommand:
    def test_bounded(self, capsys):
        code, out, _ = run_cli(
            capsys, "hyperplane", "--channel", "erasure:eps=0.25", "--weights", "1,2,0"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["bounded"] is True
        assert payload["value"] == pytest.approx(1.5, abs=1e-6)

    def test_unbounded(self, capsys):
        code, out, _ = run_cli(
            capsys, "hyperplane", "--channel", "dephasing:p=0.2", "--weights", "0,0,1"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["bounded"] is False
        assert payload["verdict"] == "unbounded"


class TestTripleCommand:
    def test_canonical_ensemble(self, capsys, tmp_path):
        path = write_ensemble(tmp_path, diagonal_pair_ensemble(0.5))
        code, out, _ = run_cli(
            capsys,
            "triple",
            "--channel",
            "dephasing:p=0.2",
            "--ensemble",
            path,
            "--verify",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["cq_bound"] == pytest.approx(1.5310044, abs=1e-6)
        assert payload["residuals"]["chain_rule"] <= 1e-8
        assert payload["cef"]["c"] + 2 * payload["cef"]["q"] == pytest.approx(
            payload["cq_bound"], abs=1e-9
        )

    def test_kraus_file_channel(self, capsys, tmp_path, rng):
        ch_path = tmp_path / "ch.json"
        ch_path.write_text(json.dumps(kraus_channel_to_json(random_two_kraus_qubit(rng))))
        ens_path = write_ensemble(tmp_path, diagonal_pair_ensemble(0.3))
        code, out, _ = run_cli(
            capsys, "triple", "--channel", f"kraus:@{ch_path}", "--ensemble", ens_path
        )
        assert code == 0
        assert json.loads(out)["cq_bound"] >= 0

    def test_missing_ensemble_file(self, capsys):
        code, _, _ = run_cli(
            capsys, "triple", "--channel", "dephasing:p=0.2", "--ensemble", "/no/file"
        )
        assert code == 1


class TestEntropyCommand:
    def test_bipartite_state(self, capsys, tmp_path, rng):
        rho = random_density(rng, 4)
        path = tmp_path / "state.json"
        path.write_text(json.dumps({"rho": matrix_to_pairs(rho.matrix), "dims": [2, 2]}))
        code, out, _ = run_cli(capsys, "entropy", "--state", str(path))
        assert code == 0
        payload = json.loads(out)
        assert 0 <= payload["entropy"] <= 2 + 1e-9
        assert "mutual_information" in payload

    def test_rejects_invalid_state(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"rho": matrix_to_pairs(np.eye(2))}))  # trace 2
        code, _, _ = run_cli(capsys, "entropy", "--state", str(path))
        assert code == 1


class TestOracleCommand:
    def test_small_grid(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "oracle",
            "--channel",
            "dephasing:p=0.2",
            "--polar",
            "5",
            "--azimuthal",
            "4",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["best_value"] <= payload["target"] + 5e-3

    def test_holevo_check(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "oracle",
            "--channel",
            "erasure:eps=0.25",
            "--check",
            "holevo-erasure",
            "--polar",
            "5",
            "--azimuthal",
            "4",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["target"] == pytest.approx(0.75)

    def test_check_channel_mismatch(self, capsys):
        code, _, _ = run_cli(
            capsys,
            "oracle",
            "--channel",
            "dephasing:p=0.2",
            "--check",
            "holevo-erasure",
        )
        assert code == 1


class TestAdditivityCommand:
    def test_optimize_method(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "additivity",
            "--channel",
            "dephasing:p=0.2",
            "--method",
            "optimize",
            "--budget",
            "2000",
        )
        assert code == 0
        payload = json.loads(out)
        assert abs(payload["gap"]) <= 1e-3

    def test_oracle_method(self, capsys):
        code, out, _ = run_cli(
            capsys, "additivity", "--channel", "erasure:eps=0.25", "--lambda", "1", "--mu", "1"
        )
        assert code == 0
        payload = json.loads(out)
        assert abs(payload["gap"]) <= 5e-3


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        code, _, err = run_cli(capsys, "frobnicate")
        assert code == 1
        assert err

    def test_malformed_channel(self, capsys):
        code, _, _ = run_cli(capsys, "region", "--channel", "dephasing=0.2")
        assert code == 1

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            "region",
            "--channel",
            "dephasing:p=0.2",
            "--samples",
            "3",
            "--output",
            str(tmp_path / "missing" / "out.csv"),
        )
        assert code == 3
        assert "i/o" in err

    def test_invariant_violation_maps_to_two(self, capsys, monkeypatch):
        def explode(args):
            raise InvariantViolation("synthetic")

        monkeypatch.setattr("dyncap.cli._cmd_member", explode)
        parser = build_parser()
        args = parser.parse_args(["member", "--channel", "erasure:eps=0.25", "--point", "0,0,0"])
        # go through run() with the patched handler
        monkeypatch.setattr(
            "dyncap.cli.build_parser",
            lambda: parser,
        )
        args.handler = explode
        monkeypatch.setattr(parser, "parse_args", lambda argv=None: args)
        code, _, err = run_cli(
            capsys, "member", "--channel", "erasure:eps=0.25", "--point", "0,0,0"
        )
        assert code == 2
        assert "invariant" in err

    def test_max_dim_env_respected(self, capsys, monkeypatch):
        monkeypatch.setenv("DYNCAP_MAX_DIM", "4")
        code, _, _ = run_cli(
            capsys, "additivity", "--channel", "erasure:eps=0.25", "--method", "optimize"
        )
        assert code == 1  # 9-dimensional two-copy output exceeds the cap
