import json

from dronestick.cli import main

from conftest import scenario_path


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1])


class TestSimulate:
    def test_pull_east_writes_1000_frames(self, tmp_path, capsys):
        out = tmp_path / "pull.jsonl"
        code, body = run_cli(capsys, "simulate",
                             "--scenario", scenario_path("pull_east.json"),
                             "--out", str(out))
        assert code == 0 and body["ok"] is True
        assert body["frames"] == 1000
        lines = out.read_text().splitlines()
        assert len(lines) == 1001  # header + frames
        header = json.loads(lines[0])
        assert header["schema_version"] == 1
        assert header["scenario_hash"] == body["scenario_hash"]

    def test_log_dir_env_override(self, tmp_path, capsys, monkeypatch):
        log_dir = tmp_path / "logs"
        monkeypatch.setenv("DRONESTICK_LOG_DIR", str(log_dir))
        code, body = run_cli(capsys, "simulate",
                             "--scenario", scenario_path("default.json"),
                             "--out", str(tmp_path / "elsewhere" / "run.jsonl"))
        assert code == 0
        assert body["log"] == str(log_dir / "run.jsonl")
        assert (log_dir / "run.jsonl").exists()

    def test_missing_scenario_file(self, tmp_path, capsys):
        code, body = run_cli(capsys, "simulate",
                             "--scenario", str(tmp_path / "nope.json"),
                             "--out", str(tmp_path / "x.jsonl"))
        assert code == 1 and body["ok"] is False


class TestReplay:
    def test_round_trip_exit_zero(self, tmp_path, capsys):
        out = tmp_path / "log.jsonl"
        run_cli(capsys, "simulate", "--scenario", scenario_path("pull_east.json"),
                "--out", str(out))
        code, body = run_cli(capsys, "replay", "--log", str(out),
                             "--scenario", scenario_path("pull_east.json"))
        assert code == 0
        assert body["summary"] == "exact match"

    def test_corrupted_log_exit_one(self, tmp_path, capsys):
        out = tmp_path / "log.jsonl"
        run_cli(capsys, "simulate", "--scenario", scenario_path("pull_east.json"),
                "--out", str(out))
        lines = out.read_text().splitlines()
        target = lines[300]
        i = target.find('"pos":[') + 8
        lines[300] = target[:i] + ("4" if target[i] != "4" else "6") + target[i + 1:]
        out.write_text("\n".join(lines) + "\n")
        code, body = run_cli(capsys, "replay", "--log", str(out),
                             "--scenario", scenario_path("pull_east.json"))
        assert code == 1
        assert body["divergent_tick"] == 300

    def test_wrong_scenario_fails(self, tmp_path, capsys):
        out = tmp_path / "log.jsonl"
        run_cli(capsys, "simulate", "--scenario", scenario_path("pull_east.json"),
                "--out", str(out))
        code, body = run_cli(capsys, "replay", "--log", str(out),
                             "--scenario", scenario_path("default.json"))
        assert code == 1 and body["ok"] is False
        assert "hash" in body["error"]


class TestValidate:
    def test_good_scenario(self, capsys):
        code, body = run_cli(capsys, "validate",
                             "--scenario", scenario_path("estop_demo.json"))
        assert code == 0 and body["ok"] is True
        assert body["ticks"] == 600

    def test_dt_zero_names_field(self, tmp_path, capsys):
        from dronestick import defaults
        doc = defaults.default_scenario_doc(dt=0)
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        code, body = run_cli(capsys, "validate", "--scenario", str(bad))
        assert code == 1 and body["ok"] is False
        assert "dt" in body["error"]

    def test_unparseable_file(self, tmp_path, capsys):
        bad = tmp_path / "broken.json"
        bad.write_text("{this is not json")
        code, body = run_cli(capsys, "validate", "--scenario", str(bad))
        assert code == 1 and body["ok"] is False
