import json
import math

import pytest

from thzsec.atmosphere import ConstantAbsorption, TableAbsorption
from thzsec.config import ConfigError, parse_config


def write(tmp_path, text, name="case.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestDefaults:
    def test_empty_file_gives_standard_scenario(self, tmp_path):
        cfg = parse_config(write(tmp_path, ""))
        scenario = cfg.scenario()
        assert scenario.d == 1000.0
        assert scenario.eve_xy == (750.0, 30.0)
        assert scenario.alpha_a == 0.02
        assert scenario.tx_power_w == 0.01
        assert scenario.freq_hz == 340e9
        assert scenario.bob.efficiency == 0.1
        assert scenario.bob.aperture_d == 0.05
        assert math.isclose(scenario.bob.fov_full_rad, math.radians(10.0), rel_tol=1e-12)
        # slot time defaults to one bit period at the 10 Gbps target rate
        assert scenario.bob.integration_time_s == 1e-10
        conditions = cfg.conditions()
        assert conditions.temperature_c == 30.0
        assert conditions.pressure_hpa == 1013.0
        assert conditions.relative_humidity_pct == 80.0
        assert conditions.cn2 == 5.8e-11
        spec = cfg.scan_spec()
        assert spec.target_rate_bps == 10e9
        assert spec.mode == "det"
        assert cfg.duty_cycle() == 0.5
        assert cfg.scattering().g == 0.9 and cfg.scattering().f == 0.5

    def test_none_path_gives_defaults(self):
        cfg = parse_config(None)
        assert cfg.scenario().d == 1000.0

    def test_integration_time_follows_target_rate(self, tmp_path):
        cfg = parse_config(write(tmp_path, "[scan]\ntarget_rate_bps = 20e9\n"))
        assert cfg.scenario().bob.integration_time_s == 1.0 / 20e9

    def test_explicit_integration_time_wins(self, tmp_path):
        cfg = parse_config(write(tmp_path, "[bob]\nintegration_time_s = 5e-11\n"))
        assert cfg.scenario().bob.integration_time_s == 5e-11
        assert cfg.scenario().eve.integration_time_s == 1e-10


class TestErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            parse_config(tmp_path / "nope.cfg")

    def test_unknown_key_with_line(self, tmp_path):
        path = write(tmp_path, "[link]\ndivergance_angle = 0.02\n")
        with pytest.raises(ConfigError, match=r"case\.cfg:2.*divergance_angle"):
            parse_config(path)

    def test_unknown_section(self, tmp_path):
        with pytest.raises(ConfigError, match=r"unknown section \[alice\]"):
            parse_config(write(tmp_path, "[alice]\nx = 1\n"))

    def test_constraint_violation_names_key_and_line(self, tmp_path):
        path = write(tmp_path, "[atmosphere]\ncn2 = -1\n")
        with pytest.raises(ConfigError, match=r"case\.cfg:2.*cn2"):
            parse_config(path)

    def test_malformed_line(self, tmp_path):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config(write(tmp_path, "[link]\njust some words\n"))

    def test_key_outside_section(self, tmp_path):
        with pytest.raises(ConfigError, match="outside of any"):
            parse_config(write(tmp_path, "freq_hz = 1e11\n"))

    def test_duplicate_key(self, tmp_path):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(write(tmp_path, "[link]\nfreq_hz = 1e11\nfreq_hz = 2e11\n"))

    def test_unparseable_value(self, tmp_path):
        with pytest.raises(ConfigError, match=r"link\.freq_hz"):
            parse_config(write(tmp_path, "[link]\nfreq_hz = banana\n"))

    def test_eve_on_axis_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="eve_y_m"):
            parse_config(write(tmp_path, "[link]\neve_y_m = 0\n"))

    def test_grid_cap(self, tmp_path):
        text = "[scan]\nstep_m = 0.01\nmax_cells = 1000\n"
        with pytest.raises(ConfigError, match="max_cells"):
            parse_config(write(tmp_path, text))

    def test_empty_range(self, tmp_path):
        with pytest.raises(ConfigError, match="empty range"):
            parse_config(write(tmp_path, "[scan]\nx_min_m = 10\nx_max_m = 5\n"))

    def test_bad_mode(self, tmp_path):
        with pytest.raises(ConfigError, match="mode"):
            parse_config(write(tmp_path, "[scan]\nmode = banana\n"))

    def test_prob_mode_requires_fading(self, tmp_path):
        text = "[scan]\nmode = prob\n[atmosphere]\ncn2 = 0\n"
        with pytest.raises(ConfigError, match="cn2"):
            parse_config(write(tmp_path, text))

    def test_constant_absorption_requires_value(self, tmp_path):
        with pytest.raises(ConfigError, match="absorption_db_per_km"):
            parse_config(write(tmp_path, "[atmosphere]\nabsorption = constant\n"))

    def test_sweep_needs_both_keys(self, tmp_path):
        with pytest.raises(ConfigError, match="sweep.values"):
            parse_config(write(tmp_path, "[sweep]\nparameter = cn2\n"))
        with pytest.raises(ConfigError, match="sweep.parameter"):
            parse_config(write(tmp_path, "[sweep]\nvalues = 1e-12, 1e-11\n"))

    def test_bad_sweep_parameter(self, tmp_path):
        text = "[sweep]\nparameter = banana\nvalues = 1, 2\n"
        with pytest.raises(ConfigError, match="parameter"):
            parse_config(write(tmp_path, text))


class TestFormats:
    def test_ini_comments_and_values(self, tmp_path):
        text = """
# full-line comment
[link]
freq_hz = 220e9
; alt comment
eve_x_m = 500

[secrecy]
paper_exact = true
"""
        cfg = parse_config(write(tmp_path, text))
        assert cfg.scenario().freq_hz == 220e9
        assert cfg.scenario().eve_xy[0] == 500.0
        assert cfg.paper_exact() is True

    def test_json_alternate(self, tmp_path):
        payload = {
            "link": {"freq_hz": 140e9},
            "scattering": {"g": 0.5, "f": 0.0},
            "sweep": {"parameter": "cn2", "values": [1e-12, 1e-11]},
        }
        path = tmp_path / "case.json"
        path.write_text(json.dumps(payload))
        cfg = parse_config(path)
        assert cfg.scenario().freq_hz == 140e9
        assert cfg.scattering().g == 0.5
        assert cfg.sweep_spec().values == (1e-12, 1e-11)

    def test_json_unknown_key(self, tmp_path):
        path = tmp_path / "case.json"
        path.write_text(json.dumps({"link": {"divergance_angle": 0.02}}))
        with pytest.raises(ConfigError, match="divergance_angle"):
            parse_config(path)

    def test_json_bad_syntax(self, tmp_path):
        path = tmp_path / "case.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            parse_config(path)


class TestBackends:
    def test_constant_backend(self, tmp_path):
        text = "[atmosphere]\nabsorption = constant\nabsorption_db_per_km = 12.5\n"
        cfg = parse_config(write(tmp_path, text))
        backend = cfg.backend()
        assert isinstance(backend, ConstantAbsorption)
        assert backend.db_per_km == 12.5

    def test_table_backend_from_path(self, tmp_path):
        table = tmp_path / "table.csv"
        table.write_text("freq_hz,alpha_db_per_km\n140e9,2.0\n400e9,30.0\n")
        text = f"[atmosphere]\nabsorption_table_path = {table}\n"
        cfg = parse_config(write(tmp_path, text))
        backend = cfg.backend()
        assert isinstance(backend, TableAbsorption)
        assert backend.freqs_hz == (140e9, 400e9)

    def test_default_backend_is_bundled_table(self, tmp_path):
        cfg = parse_config(write(tmp_path, ""))
        assert isinstance(cfg.backend(), TableAbsorption)


class TestSweepResolution:
    def test_with_sweep_value(self, tmp_path):
        text = "[sweep]\nparameter = cn2\nvalues = 1e-12, 1e-11, 1e-10\n"
        cfg = parse_config(write(tmp_path, text))
        sub = cfg.with_sweep_value("cn2", 1e-11)
        assert sub.conditions().cn2 == 1e-11
        # original untouched
        assert cfg.conditions().cn2 == 5.8e-11

    def test_metadata_echo_round_trips(self, tmp_path):
        cfg = parse_config(write(tmp_path, "[link]\nfreq_hz = 220e9\n"))
        echo = cfg.to_dict()
        assert echo["link"]["freq_hz"] == 220e9
        assert json.loads(json.dumps(echo)) == echo
