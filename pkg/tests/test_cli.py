import json

import pytest

from app.cli.router import build_parser
from app.main import main


@pytest.fixture
def source(tmp_path, small_csv):
    path = tmp_path / "events.csv"
    path.write_bytes(small_csv)
    return str(path)


class TestCommands:

    def test_parser_lists_commands(self):
        parser = build_parser()
        args = parser.parse_args(["rank", "--algo", "ts-lr", "--damping", "0.5"])
        assert args.command == "rank"
        assert args.algo == "ts-lr"
        assert args.damping == 0.5
        assert args.interval_days is None

    def test_run(self, tmp_path, source):
        out = tmp_path / "run"
        assert main(["run", "--input", source, "--out", str(out)]) == 0
        assert (out / "manifest.json").exists()

    def test_ingest(self, tmp_path, source, capsys):
        out = tmp_path / "ingest"
        assert main(["ingest", "--input", source, "--out", str(out)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["events"] == 3
        assert summary["nodes"] == 2
        assert (out / "events.csv").read_bytes().startswith(b"actor,kind,target_node,target_post,timestamp\n")
        assert (out / "nodes.csv").read_text().splitlines() == ["id,label", "0,alice", "1,bob"]

    def test_snapshot_rank_eval_analyze(self, tmp_path, source, capsys):
        out = str(tmp_path / "steps")
        assert main(["snapshot", "--input", source, "--out", out, "--mode", "cumulative"]) == 0
        assert "cumulative_000" in capsys.readouterr().out
        assert main(["rank", "--input", source, "--out", out, "--algo", "te-lr"]) == 0
        assert (tmp_path / "steps" / "ranks" / "te-lr_000.csv").exists()
        assert main(["eval", "--input", source, "--out", out]) == 0
        assert (tmp_path / "steps" / "evaluation.csv").exists()
        assert main(["analyze", "overlap", "--input", source, "--out", out]) == 0
        assert (tmp_path / "steps" / "analysis" / "overlap.json").exists()

    def test_generate(self, tmp_path, capsys):
        path = tmp_path / "synthetic.csv"
        assert main(["generate", str(path), "--events", "200", "--users", "20", "--days", "30"]) == 0
        assert len(path.read_text().splitlines()) == 201
        assert "post=" in capsys.readouterr().out


class TestExitCodes:

    def test_bad_config(self, tmp_path, source):
        out = tmp_path / "existing"
        out.mkdir()
        assert main(["run", "--input", source, "--out", str(out), "--damping", "1.5"]) == 2
        errors = json.loads((out / "errors.json").read_text())["errors"]
        assert errors[0]["stage"] == "config"
        assert errors[0]["fields"] == ["damping"]

    def test_bad_config_does_not_create_output(self, tmp_path, source):
        out = tmp_path / "absent"
        assert main(["run", "--input", source, "--out", str(out), "--top-frac", "0"]) == 2
        assert not out.exists()

    def test_parse_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("actor,kind,target_node,target_post,timestamp\nbob,like,,p1,1\n")
        out = tmp_path / "run"
        assert main(["run", "--input", str(bad), "--out", str(out)]) == 2
        errors = json.loads((out / "errors.json").read_text())["errors"]
        assert errors[0]["code"] == "parse_error"
        assert errors[0]["line"] == 2

    def test_undecodable_input(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_bytes(b"\xff\xfe")
        out = tmp_path / "ingest"
        assert main(["ingest", "--input", str(bad), "--out", str(out)]) == 2
        errors = json.loads((out / "errors.json").read_text())["errors"]
        assert errors[0]["code"] == "parse_error"
        assert errors[0]["line"] == 1

    def test_missing_file(self, tmp_path):
        out = tmp_path / "run"
        assert main(["run", "--input", str(tmp_path / "nope.csv"), "--out", str(out)]) == 2
        errors = json.loads((out / "errors.json").read_text())["errors"]
        assert errors[0]["code"] == "io_error"

    def test_failed_stage_exits_one(self, tmp_path, source):
        out = tmp_path / "run"
        env = tmp_path / "late.env"
        env.write_text("START_TIME=1000\n")
        assert main(["run", "--config", str(env), "--input", source, "--out", str(out)]) == 1
        assert (out / "errors.json").exists()
