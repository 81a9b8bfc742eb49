import os
from pathlib import Path

import pytest

import c2o

FIXTURES = Path(os.environ.get("C2O_FIXTURES", Path(__file__).parent.parent / "fixtures"))

TABLE1 = """
component B {
  input Input : int;
  output Output : int;
  assume "B input range" : Input < 20;
  guarantee "B output range" : Output < Input + 15;
}
"""

COUNTER = """
component Counter {
  eq x : int = 0 -> pre(x) + 1;
  guarantee "counts up" : x >= 0;
}
"""


def test_compile_and_emit_matlab():
    obs = c2o.compile(TABLE1)
    assert obs.name == "B"
    assert [p[0] for p in obs.params] == ["Input", "Output"]
    matlab = obs.emit("matlab")
    assert "sldv.assume(Input < 20)" in matlab
    assert "sldv.prove(Output < (Input + 15))" in matlab


def test_counter_semantics_and_initial_step():
    obs = c2o.compile(COUNTER)
    assert obs.persistents == ["first_time", "pre_x"]
    verdicts = obs.run([{}] * 5)
    assert all(v["proves"]["counts up"] for v in verdicts)

    init_only = c2o.compile('component A { guarantee "g" : true -> false; }')
    verdicts = init_only.run([{}] * 3)
    assert [v["proves"]["g"] for v in verdicts] == [True, False, False]


def test_vacuity_marks_later_steps():
    obs = c2o.compile(TABLE1)
    steps = [
        {"Input": 1, "Output": 0},
        {"Input": 25, "Output": 0},
        {"Input": 2, "Output": 0},
    ]
    verdicts = obs.run(steps)
    assert [v["vacuous"] for v in verdicts] == [False, True, True]


def test_osl_round_trip():
    obs = c2o.compile(COUNTER)
    osl = obs.emit("osl")
    back = c2o.parse_osl(osl)
    assert back.emit("osl") == osl
    verdicts = back.run([{}] * 4)
    assert all(v["proves"]["counts up"] for v in verdicts)


def test_wellformedness_diagnostics():
    bad = 'component W { input x : int; guarantee "g" : (true -> pre(pre(x)) = x); }'
    good = 'component W { input x : int; guarantee "g" : (true -> pre(x -> pre(x)) = x); }'
    assert c2o.wellformedness_diagnostics(bad)
    assert c2o.wellformedness_diagnostics(good) == []


def test_parse_errors_raise():
    with pytest.raises(ValueError):
        c2o.compile("component X { input a int; }")


def test_diff_gate_is_clean():
    report = c2o.diff(TABLE1, trials=300, depth=8, seed=11)
    assert report["translation_bugs"] == 0
    assert report["counts"] == {}


def test_diff_classifies_overflow():
    src = 'component O { input X : int; guarantee "m" : X + 1 > X; }'
    report = c2o.diff(src, trials=300, depth=6, seed=5, int_width=8, int_range=127)
    assert report["translation_bugs"] == 0
    assert report["counts"].get("OverflowDivergence", 0) > 0


def test_verify_bounded_fixture_and_defect():
    contract = (FIXTURES / "bscu_com.agc").read_text()
    good = (FIXTURES / "bscu_com_model.agc").read_text()
    bad = (FIXTURES / "bscu_com_defect.agc").read_text()
    ok = c2o.verify(contract, good, mode="bounded", depth=6)
    assert ok["passed"] and ok["explored"] == 64
    ce = c2o.verify(contract, bad, mode="bounded", depth=6)
    assert not ce["passed"]
    assert ce["counterexample"]["step"] == 0
    assert ce["counterexample"]["label"] == "starts in MANUAL"
    assert "LOButton" in ce["counterexample"]["trace_csv"]


def test_interface_mismatch_raises():
    contract = (FIXTURES / "record_drift.agc").read_text()
    model = (FIXTURES / "record_drift_model.agc").read_text()
    with pytest.raises(RuntimeError, match="Active"):
        c2o.verify(contract, model)


def test_dump_ir_is_deterministic():
    a = c2o.dump_ir(COUNTER)
    b = c2o.dump_ir(COUNTER)
    assert a == b
    assert '"pre_table"' in a
