import csv
import io
import json
import os
from pathlib import Path

import numpy as np
import pytest

from relsusy.cli import (
    COMMANDS,
    CSV_COLUMNS,
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_NUMERICAL,
    EXIT_PASS,
    execute,
    load_payload,
    main,
    report_json,
    spectrum_csv,
)
from relsusy.config import parse_config

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("RELSUSY_REGEN_GOLDEN") == "1"


def _cfg(**kw):
    return parse_config({"schema_version": 1, **kw})


def _write(tmp_path, data, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps({"schema_version": 1, **data}))
    return str(p)


def _skeleton(obj):
    """Key structure and value types of a JSON document."""
    if isinstance(obj, dict):
        return {k: _skeleton(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return {"list_of": _skeleton(obj[0])} if obj else "empty_list"
    return type(obj).__name__


def _golden(name, actual):
    path = GOLDEN / name
    if REGEN:
        path.write_text(actual)
    assert actual == path.read_text(), f"golden mismatch for {name}"


@pytest.fixture(scope="module")
def dirac_all():
    return execute("all", _cfg())


def test_all_default_passes(dirac_all):
    code, payload, rows = dirac_all
    assert code == EXIT_PASS and payload["overall_pass"]
    assert set(payload["results"]) == set(COMMANDS) - {"all"}
    assert rows


def test_json_structure_golden(dirac_all):
    _, payload, _ = dirac_all
    doc = json.loads(report_json(payload, "all", timestamp="T"))
    assert set(doc) == {"metadata", "payload"}
    assert set(doc["metadata"]) == {"tool", "version", "command", "timestamp"}
    _golden("all_dirac_structure.json",
            json.dumps(_skeleton(doc["payload"]), indent=2, sort_keys=True) + "\n")


def test_check_names_golden(dirac_all):
    _, payload, _ = dirac_all
    names = {cmd: [e["name"] for e in r["report"]["entries"]]
             for cmd, r in payload["results"].items()}
    _golden("all_dirac_checks.json", json.dumps(names, indent=2, sort_keys=True) + "\n")


def test_entry_fields(dirac_all):
    _, payload, _ = dirac_all
    for r in payload["results"].values():
        for e in r["report"]["entries"]:
            assert set(e) == {"name", "residual", "tolerance", "pass", "context"}


def test_spectrum_csv_golden(dirac_all):
    text = spectrum_csv(dirac_all[2])
    path = GOLDEN / "spectrum_dirac.csv"
    if REGEN:
        path.write_text(text)
    got = list(csv.DictReader(io.StringIO(text)))
    want = list(csv.DictReader(io.StringIO(path.read_text())))
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(got) == len(want)
    for g, w in zip(got, want):
        for col in ("n", "s_z", "k_z", "epsilon_nonrel"):
            assert g[col] == w[col]
        for col in ("E_plus", "E_minus", "analytic_E"):
            assert float(g[col]) == pytest.approx(float(w[col]), abs=1e-12)
        assert float(g["abs_error"]) <= 1e-10


def test_spectrum_dirac_cli(tmp_path):
    out, table = tmp_path / "r.json", tmp_path / "t.csv"
    assert main(["spectrum", "--out", str(out), "--csv", str(table), "--quiet"]) == EXIT_PASS
    rows = list(csv.DictReader(table.open()))
    assert max(float(r["abs_error"]) for r in rows) <= 1e-10
    # 17 significant digits round-trip doubles exactly
    for r in rows:
        for col in ("E_plus", "E_minus", "analytic_E"):
            assert "%.17g" % float(r[col]) == r[col]
    assert any(r["analytic_E"] == "1.7320508075688772" for r in rows)
    assert load_payload(out)["exit_code"] == EXIT_PASS


def test_kg_csv_has_empty_spin_column():
    _, _, rows = execute("spectrum", _cfg(case="kg", n_fock=8))
    assert {r["s_z"] for r in rows} == {""}


def test_witten_scan_spin1(tmp_path):
    code, payload, _ = execute("witten-scan", _cfg(case="spin1"))
    assert code == EXIT_PASS
    data = payload["results"]["witten-scan"]["data"]
    assert len(data["crossings"]) == 2
    assert all(abs(abs(x) - 1.0) <= 0.05 for x in data["crossings"])


def test_supercritical_exit_3(tmp_path, capsys):
    path = _write(tmp_path, {"case": "spin1", "omega_c": 2.0})
    assert main(["spectrum", "--config", path]) == EXIT_NUMERICAL
    out, err = capsys.readouterr()
    res = json.loads(out)["payload"]["results"]["spectrum"]
    assert res["diagnostic"]["error"] == "NegativeSpectrum"
    assert "supercritical" in res["diagnostic"]["message"]
    assert res["diagnostic"]["check"]
    assert "exit 3" in err or "3" in err


def test_failed_check_exit_1(tmp_path):
    path = _write(tmp_path, {"case": "kg", "tolerances": {"interior_tol": 1e-30}})
    assert main(["fw-check", "--config", path, "--quiet", "--out",
                 str(tmp_path / "r.json")]) == EXIT_FAIL
    assert not load_payload(tmp_path / "r.json")["overall_pass"]


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["all", "--config", _write(tmp_path, {"bogus": 1})]) == EXIT_CONFIG
    assert main(["all", "--config", str(tmp_path / "none.json")]) == EXIT_CONFIG
    out, err = capsys.readouterr()
    assert out == "" and "configuration error" in err


def test_all_exit_is_worst(tmp_path):
    code, payload, _ = execute("all", _cfg(case="spin1", omega_c=2.0, n_fock=10))
    codes = [r["exit_code"] for r in payload["results"].values()]
    assert code == max(codes) == EXIT_NUMERICAL


def test_quiet_keeps_stdout(capsys):
    assert main(["nonrel-limit", "--quiet"]) == EXIT_PASS
    out, err = capsys.readouterr()
    assert err == "" and json.loads(out)["metadata"]["command"] == "nonrel-limit"


def test_output_paths_from_config(tmp_path):
    path = _write(tmp_path, {"case": "kg", "n_fock": 8, "output": {
        "json_path": str(tmp_path / "o" / "r.json"), "csv_path": str(tmp_path / "o" / "t.csv")}})
    assert main(["spectrum", "--config", path, "--quiet"]) == EXIT_PASS
    assert (tmp_path / "o" / "r.json").exists() and (tmp_path / "o" / "t.csv").exists()
    assert not [p for p in (tmp_path / "o").iterdir() if p.name.endswith(".tmp")]


def test_deterministic_files(tmp_path):
    cfg = _write(tmp_path, {"case": "kg"})
    for i in (1, 2):
        main(["all", "--config", cfg, "--quiet", "--out", str(tmp_path / f"r{i}.json"),
              "--csv", str(tmp_path / f"t{i}.csv")])
    assert load_payload(tmp_path / "r1.json") == load_payload(tmp_path / "r2.json")
    assert (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t2.csv").read_bytes()
    strip = [json.dumps(json.loads((tmp_path / f"r{i}.json").read_text())["payload"],
                        sort_keys=True) for i in (1, 2)]
    assert strip[0] == strip[1]


def test_resolvent_shift_on_spectrum_exit_3():
    code, payload, _ = execute("resolvent", _cfg(case="kg", resolvent={
        "shifts": [[float(np.sqrt(2)), 0.0]]}))
    assert code == EXIT_NUMERICAL
    assert payload["results"]["resolvent"]["diagnostic"]["error"] == "ShiftOnSpectrum"


def test_report_json_is_strict_json():
    text = report_json({"x": float("nan"), "z": 1 + 2j}, "all", timestamp="T")
    doc = json.loads(text, parse_constant=lambda c: pytest.fail(f"bare {c}"))
    assert doc["payload"] == {"x": "nan", "z": [1.0, 2.0]}
