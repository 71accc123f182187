import json

import pytest

from relsusy.config import SCHEMA_VERSION, ConfigError, load_config, parse_config


def test_defaults():
    cfg = load_config(None)
    s = cfg.spec
    assert (s.case, s.n_fock, s.buffer, s.omega_c, s.k_z, s.m, s.c, s.hbar, s.g) == (
        "dirac", 32, 4, 1.0, 0.0, 1.0, 1.0, 1.0, 2.0)
    assert (cfg.kz_min, cfg.kz_max, cfg.points) == (-2.0, 2.0, 81)
    assert cfg.c_list == (1.0, 10.0, 100.0)
    assert cfg.resolved_shifts() == [1j, -1j, 1 + 1j, 2 + 1j, 0.3j]


def test_to_dict_round_trips():
    cfg = parse_config({"schema_version": 1, "case": "kg", "omega_c": 0.7,
                        "scan": {"points": 11}})
    again = parse_config(cfg.to_dict())
    assert again.spec == cfg.spec and again.points == 11
    assert again.resolved_shifts() == cfg.resolved_shifts()


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="colour"):
        parse_config({"schema_version": 1, "colour": "red"})
    with pytest.raises(ConfigError):
        parse_config({"schema_version": 1, "scan": {"step": 0.1}})


def test_schema_version_required_and_fixed():
    with pytest.raises(ConfigError):
        parse_config({"case": "kg"})
    with pytest.raises(ConfigError):
        parse_config({"schema_version": SCHEMA_VERSION + 1})


def test_bad_values():
    for bad in ({"case": "proca"}, {"n_fock": 1}, {"omega_c": -1.0},
                {"n_fock": 6, "buffer": 6}, {"scan": {"points": 2}},
                {"scan": {"kz_min": 1.0, "kz_max": -1.0}},
                {"limits": {"c_list": [10, 1]}},
                {"resolvent": {"shifts": [[1, 2, 3]]}}):
        with pytest.raises(ConfigError):
            parse_config({"schema_version": 1, **bad})


def test_real_shift_gets_unit_imaginary_part():
    cfg = parse_config({"schema_version": 1, "resolvent": {"shifts": [[0.5], [2.0, -3.0]]}})
    assert cfg.resolved_shifts() == [0.5 + 1j, 2 - 3j]


def test_tolerances_and_output(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"schema_version": 1, "tolerances": {"interior_tol": 1e-9},
                                "output": {"json_path": "r.json", "csv_path": "t.csv"}}))
    cfg = load_config(path)
    assert cfg.spec.tolerances.interior_tol == 1e-9
    assert (cfg.json_path, cfg.csv_path) == ("r.json", "t.csv")


def test_unreadable_and_malformed(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_shipped_configs_validate():
    from pathlib import Path
    root = Path(__file__).resolve().parents[1] / "configs"
    files = sorted(root.glob("*.json"))
    assert files
    for f in files:
        load_config(f)
