import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relsusy.report import CheckEntry, CheckReport


def test_overall_pass_is_conjunction():
    rep = CheckReport()
    rep.add("a", 1e-14, 1e-12)
    assert rep.overall_pass
    rep.add("b", 1.0, 1e-12)
    assert not rep.overall_pass
    assert [e.name for e in rep.failures()] == ["b"]


def test_explicit_pass_overrides_threshold():
    rep = CheckReport()
    e = rep.add("lower_bound", 5.0, 1.0, passed=True)
    assert e.passed


def test_lookup_by_name():
    rep = CheckReport()
    rep.add("x", 0.0, 1.0)
    assert "x" in rep and rep["x"].residual == 0.0
    with pytest.raises(KeyError):
        rep["missing"]


def test_extend_prefixes_names():
    inner = CheckReport()
    inner.add("r", 0.0, 1.0)
    outer = CheckReport().extend(inner, prefix="fw.")
    assert "fw.r" in outer


def test_json_uses_pass_key_and_round_trips_inf():
    rep = CheckReport()
    rep.add("ratio", 0.01, float("inf"), note="x", count=3)
    d = json.loads(rep.to_json())
    assert d["entries"][0]["pass"] is True
    assert d["overall_pass"] is True
    back = CheckReport.from_json(rep.to_json())
    assert back.to_dict() == rep.to_dict()
    assert back["ratio"].tolerance == float("inf")


def test_from_dict_rejects_inconsistent_overall():
    rep = CheckReport()
    rep.add("bad", 1.0, 0.0)
    d = rep.to_dict()
    d["overall_pass"] = True
    with pytest.raises(ValueError):
        CheckReport.from_dict(d)


_scalars = st.one_of(st.floats(allow_nan=False), st.integers(-10**6, 10**6),
                     st.text(max_size=8), st.booleans())


@given(st.lists(st.tuples(st.text(min_size=1, max_size=10), st.floats(0, 1e3),
                          st.floats(0, 1e3), st.dictionaries(st.text(max_size=5), _scalars,
                                                             max_size=3)),
                max_size=6))
def test_serialisation_round_trip(entries):
    rep = CheckReport()
    for name, r, t, ctx in entries:
        rep.entries.append(CheckEntry(name, r, t, r <= t, ctx))
    back = CheckReport.from_json(rep.to_json())
    assert back.to_json() == rep.to_json()
    assert back.overall_pass == rep.overall_pass
