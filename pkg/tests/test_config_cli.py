"""Config parsing and the command line front end."""

import json
import subprocess
import sys

import numpy as np
import pytest

from contractpricing import ConfigError, load_config
from contractpricing.cli import run

MENU_CONFIG = {
    "mode": "menu",
    "budgets": [
        {"family": "scaled", "base": {"family": "log", "scale": 2.2}, "factor": 1.0},
        {"family": "scaled", "base": {"family": "log", "scale": 2.2}, "factor": 2.0},
        {"family": "scaled", "base": {"family": "log", "scale": 2.2}, "factor": 3.0},
    ],
    "cost": {"family": "linear", "slope": 1.0},
    "profit": {"family": "scaled",
               "base": {"family": "linear", "slope": 1.0}, "factor": 0.1},
}

PROFILE_CONFIG = {
    "mode": "profile",
    "qualities": [1.0, 2.0, 3.0],
    "tariff": {"family": "bilinear", "d_p": 4.0},
    "cost": {"family": "linear", "slope": 1.0},
    "box": {"theta_low": 1.0 / 3.0, "theta_up": 1.0, "s_low": 1.0, "s_up": 3.0},
    "margins": {"b": [0.1, 0.2, 0.3], "m": [0.01, 0.02, 0.03]},
}

TRADEOFF_CONFIG = {
    "mode": "tradeoff",
    "delta_s": 2.0,
    "delta_theta": 2.0 / 3.0,
    "types": 3,
    "d_p": 3.0,
}


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestLoadConfig:
    def test_menu_defaults_filled(self, tmp_path):
        config = load_config(write_config(tmp_path, MENU_CONFIG))
        assert config.mode == "menu"
        assert config.resolved["s_search_max"] == 1e6
        assert config.resolved["grid_n"] == 512
        assert config.menu.n_types == 3

    def test_profile_defaults_filled(self, tmp_path):
        config = load_config(write_config(tmp_path, PROFILE_CONFIG))
        assert config.resolved["price_lambda"] == 0.5
        assert config.resolved["probes"] == 9
        assert config.resolved["quad_n"] == 256
        assert config.profile.price_lambda == 0.5

    def test_non_increasing_margins_rejected(self, tmp_path):
        payload = json.loads(json.dumps(PROFILE_CONFIG))
        payload["margins"]["m"] = [0.02, 0.01, 0.03]
        with pytest.raises(ConfigError,
                           match="margins.m must be strictly increasing"):
            load_config(write_config(tmp_path, payload))

    def test_unknown_family_names_field(self, tmp_path):
        payload = json.loads(json.dumps(MENU_CONFIG))
        payload["budgets"][0] = {"family": "expp", "scale": 1.0}
        with pytest.raises(ConfigError, match=r"budgets\[0\].family"):
            load_config(write_config(tmp_path, payload))

    def test_unknown_keys_rejected(self, tmp_path):
        payload = dict(MENU_CONFIG, extra_knob=1)
        with pytest.raises(ConfigError, match="extra_knob"):
            load_config(write_config(tmp_path, payload))

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="malformed JSON"):
            load_config(str(path))

    def test_tabulated_function_from_csv(self, tmp_path):
        xs = np.linspace(0.0, 5.0, 200)
        csv = tmp_path / "budget.csv"
        csv.write_text("\n".join(f"{x},{2.2 * np.log1p(x)}" for x in xs))
        payload = json.loads(json.dumps(MENU_CONFIG))
        payload["budgets"][0] = {"family": "tabulated", "csv": "budget.csv"}
        config = load_config(write_config(tmp_path, payload))
        assert config.menu.budgets[0].value(1.0) == pytest.approx(
            2.2 * np.log(2.0), abs=1e-4)
        assert "data_sha256" in config.resolved["budgets"][0]

    def test_tabulated_requires_increasing_first_column(self, tmp_path):
        csv = tmp_path / "bad.csv"
        csv.write_text("0.0,0.0\n1.0,1.0\n1.0,2.0\n")
        payload = json.loads(json.dumps(MENU_CONFIG))
        payload["budgets"][0] = {"family": "tabulated", "csv": "bad.csv"}
        with pytest.raises(ConfigError, match="strictly increasing"):
            load_config(write_config(tmp_path, payload))

    def test_missing_csv(self, tmp_path):
        payload = json.loads(json.dumps(MENU_CONFIG))
        payload["budgets"][0] = {"family": "tabulated", "csv": "nope.csv"}
        with pytest.raises(ConfigError, match="not found"):
            load_config(write_config(tmp_path, payload))

    def test_hash_tracks_content_not_formatting(self, tmp_path):
        a = load_config(write_config(tmp_path, MENU_CONFIG, "a.json"))
        spaced = json.dumps(MENU_CONFIG, indent=4)
        path_b = tmp_path / "b.json"
        path_b.write_text(spaced)
        b = load_config(str(path_b))
        assert a.hash == b.hash
        payload = json.loads(json.dumps(MENU_CONFIG))
        payload["cost"]["slope"] = 2.0
        c = load_config(write_config(tmp_path, payload, "c.json"))
        assert c.hash != a.hash


class TestCliMenu:
    def test_reference_menu_csv(self, tmp_path):
        config = write_config(tmp_path, MENU_CONFIG)
        out = tmp_path / "out"
        assert run(["menu", config, "--out", str(out), "--quiet"]) == 0
        header, rows = read_csv(out / "menu.csv")
        assert header == ["type", "quality", "price", "budget_at_quality",
                          "net_saving"]
        got = [(float(r[1]), float(r[2])) for r in rows]
        for (s, p), (s_want, p_want) in zip(
                got, [(1.0, 1.1), (3.0, 3.3), (5.0, 5.5)]):
            assert s == pytest.approx(s_want, abs=1e-6)
            assert p == pytest.approx(p_want, abs=1e-6)

    def test_format_json_only(self, tmp_path):
        config = write_config(tmp_path, MENU_CONFIG)
        out = tmp_path / "out"
        run(["menu", config, "--out", str(out), "--format", "json", "--quiet"])
        assert (out / "menu.json").exists()
        assert not (out / "menu.csv").exists()

    def test_regularity_failure_exit_3(self, tmp_path):
        payload = json.loads(json.dumps(MENU_CONFIG))
        for budget in payload["budgets"]:
            budget["base"]["scale"] = 1.0
        config = write_config(tmp_path, payload)
        assert run(["menu", config, "--out", str(tmp_path / "o"),
                    "--quiet"]) == 3


class TestCliProfile:
    def test_worked_profile_csv(self, tmp_path):
        config = write_config(tmp_path, PROFILE_CONFIG)
        out = tmp_path / "out"
        assert run(["profile", config, "--out", str(out), "--quiet"]) == 0
        header, rows = read_csv(out / "profile.csv")
        assert header == ["k", "theta", "price", "window_lo", "window_hi",
                          "delta"]
        thetas = [float(r[1]) for r in rows]
        np.testing.assert_allclose(
            thetas, [0.343333333, 0.458333333, 0.733333333], atol=1e-6)

    def test_not_achievable_exit_3(self, tmp_path):
        payload = json.loads(json.dumps(PROFILE_CONFIG))
        payload["box"]["theta_up"] = 0.5
        config = write_config(tmp_path, payload)
        assert run(["profile", config, "--out", str(tmp_path / "o"),
                    "--quiet"]) == 3

    def test_byte_identical_reruns(self, tmp_path):
        config = write_config(tmp_path, PROFILE_CONFIG)
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert run(["profile", config, "--out", str(out1), "--quiet"]) == 0
        assert run(["profile", config, "--out", str(out2), "--quiet"]) == 0
        assert (out1 / "profile.json").read_bytes() == \
            (out2 / "profile.json").read_bytes()
        assert (out1 / "profile.csv").read_bytes() == \
            (out2 / "profile.csv").read_bytes()


class TestCliVerifySimulate:
    def test_roundtrip_verify(self, tmp_path):
        config = write_config(tmp_path, PROFILE_CONFIG)
        out = tmp_path / "out"
        assert run(["profile", config, "--out", str(out), "--quiet"]) == 0
        assert run(["verify", config, str(out / "profile.json"),
                    "--out", str(out), "--quiet"]) == 0
        report = json.loads((out / "verification.json").read_text())
        assert report["passed"] is True

    def test_menu_roundtrip_verify(self, tmp_path):
        config = write_config(tmp_path, MENU_CONFIG)
        out = tmp_path / "out"
        assert run(["menu", config, "--out", str(out), "--quiet"]) == 0
        assert run(["verify", config, str(out / "menu.json"),
                    "--out", str(out), "--quiet"]) == 0

    def test_hash_drift_detected(self, tmp_path):
        config = write_config(tmp_path, PROFILE_CONFIG)
        out = tmp_path / "out"
        run(["profile", config, "--out", str(out), "--quiet"])
        drifted = json.loads(json.dumps(PROFILE_CONFIG))
        drifted["margins"]["b"] = [0.11, 0.2, 0.3]
        config2 = write_config(tmp_path, drifted, "drifted.json")
        assert run(["verify", config2, str(out / "profile.json"),
                    "--out", str(out), "--quiet"]) == 2

    def test_tampered_solution_exit_3(self, tmp_path):
        config = write_config(tmp_path, PROFILE_CONFIG)
        out = tmp_path / "out"
        run(["profile", config, "--out", str(out), "--quiet"])
        solution = json.loads((out / "profile.json").read_text())
        solution["entries"][1]["p"] -= 0.5
        tampered = out / "tampered.json"
        tampered.write_text(json.dumps(solution))
        assert run(["verify", config, str(tampered),
                    "--out", str(out), "--quiet"]) == 3

    def test_simulate(self, tmp_path):
        config = write_config(tmp_path, PROFILE_CONFIG)
        out = tmp_path / "out"
        run(["profile", config, "--out", str(out), "--quiet"])
        assert run(["simulate", config, str(out / "profile.json"),
                    "--samples", "250", "--seed", "42",
                    "--out", str(out), "--quiet"]) == 0
        report = json.loads((out / "simulation.json").read_text())
        assert report["samples_per_band"] == 250
        assert report["rng_seed"] == 42
        assert all(band["fraction_intended"] == 1.0
                   for band in report["bands"])


class TestCliTradeoffCheck:
    def test_tradeoff_boundary(self, tmp_path):
        config = write_config(tmp_path, TRADEOFF_CONFIG)
        out = tmp_path / "out"
        assert run(["tradeoff", config, "--points", "7",
                    "--out", str(out), "--quiet"]) == 0
        header, rows = read_csv(out / "tradeoff.csv")
        assert header == ["m", "b", "normalized_m", "achievable"]
        assert len(rows) == 7
        for row in rows:
            m, b = float(row[0]), float(row[1])
            assert 36.0 * m * 2.0 + b == pytest.approx(2.0 / 3.0, abs=1e-7)
        summary = json.loads((out / "tradeoff.json").read_text())
        assert summary["b0"] == pytest.approx(2.0 / 3.0)

    def test_tradeoff_with_empirical_grid(self, tmp_path):
        payload = dict(TRADEOFF_CONFIG)
        payload["empirical"] = {
            "b_grid": [0.05, 0.2],
            "m_grid": [0.002, 0.01],
            "scenario": {
                "qualities": [1.0, 2.0, 3.0],
                "tariff": {"family": "bilinear", "d_p": 4.0},
                "cost": {"family": "linear", "slope": 1.0},
                "box": {"theta_low": 1.0 / 3.0, "theta_up": 1.0,
                        "s_low": 1.0, "s_up": 3.0},
                "grid_n": 64,
            },
        }
        config = write_config(tmp_path, payload)
        out = tmp_path / "out"
        assert run(["tradeoff", config, "--out", str(out), "--quiet"]) == 0
        summary = json.loads((out / "tradeoff.json").read_text())
        assert summary["empirical"]["achievable"][0][0] is True

    def test_check_names_failing_condition(self, tmp_path):
        payload = json.loads(json.dumps(MENU_CONFIG))
        for budget in payload["budgets"]:
            budget["base"]["scale"] = 1.0
        config = write_config(tmp_path, payload)
        out = tmp_path / "out"
        assert run(["check", config, "--out", str(out), "--quiet"]) == 3
        report = json.loads((out / "check.json").read_text())
        failing = [c["id"] for c in report["checks"] if not c["passed"]]
        assert any(cid.startswith("a3") for cid in failing)

    def test_check_profile_passes(self, tmp_path):
        config = write_config(tmp_path, PROFILE_CONFIG)
        assert run(["check", config, "--out", str(tmp_path / "o"),
                    "--quiet"]) == 0


class TestCliPlumbing:
    def test_error_object_on_stderr(self, tmp_path, capsys):
        payload = json.loads(json.dumps(MENU_CONFIG))
        payload["budgets"][0] = {"family": "expp"}
        config = write_config(tmp_path, payload)
        assert run(["menu", config, "--quiet"]) == 2
        err = capsys.readouterr().err
        parsed = json.loads(err)
        assert parsed["error"]["exit_code"] == 2
        assert "expp" in parsed["error"]["message"]

    def test_mode_mismatch(self, tmp_path):
        config = write_config(tmp_path, MENU_CONFIG)
        assert run(["profile", config, "--quiet"]) == 2

    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        config = write_config(tmp_path, MENU_CONFIG)
        target = tmp_path / "from_env"
        monkeypatch.setenv("CONTRACTPRICING_OUT", str(target))
        monkeypatch.chdir(tmp_path)
        assert run(["menu", config, "--quiet"]) == 0
        assert (target / "menu.json").exists()

    def test_missing_subcommand_is_parse_error(self):
        assert run([]) == 2

    def test_module_entry_point(self, tmp_path):
        config = write_config(tmp_path, TRADEOFF_CONFIG)
        result = subprocess.run(
            [sys.executable, "-m", "contractpricing", "tradeoff", config,
             "--out", str(tmp_path / "out"), "--quiet"],
            capture_output=True, text=True)
        assert result.returncode == 0
        assert (tmp_path / "out" / "tradeoff.csv").exists()
