"""Sweep harness, compiled reference data, and report emission.

The reference-table spot values and the five percentage reductions were
recomputed by hand from the bundled measurement table before this file
was written; the tests pin those independent numbers.
"""

import math

import pytest
from hypothesis import given, strategies as st

from cnfetsim.bench import (
    DEFAULT_CLOADS,
    DEFAULT_FREQUENCIES,
    DEFAULT_TEMPERATURES,
    DEFAULT_VDDS,
    REFERENCE_DESIGNS,
    REFERENCE_ONLY,
    TABLE2_CLOAD,
    TABLE2_FREQUENCY,
    TABLE2_TEMPERATURE,
    TABLE2_VDD,
    CharacterizationRecord,
    SweepPlan,
    emit_report,
    improvement,
    inconsistent_reference_rows,
    load_reference_table,
    parse_plan,
    parse_report,
    partition_cells,
    plotdata_files,
    run_sweep,
)
from cnfetsim.device import ChiralityVector


# --- plan validation ---

def test_plan_defaults_are_the_reference_operating_point():
    plan = SweepPlan(cells=("CN9P4G",))
    assert plan.vdds == (TABLE2_VDD,)
    assert plan.cloads == (TABLE2_CLOAD,)
    assert plan.frequencies == (TABLE2_FREQUENCY,)
    assert plan.temperatures == (TABLE2_TEMPERATURE,)
    assert plan.policy == ChiralityVector(55, 0)


def test_default_sweep_grids():
    assert DEFAULT_VDDS == (0.5, 0.65, 0.8)
    assert DEFAULT_CLOADS == (1.4, 1.9, 2.4, 2.9, 3.4, 3.9, 4.4, 4.9)
    assert DEFAULT_FREQUENCIES == (100.0, 250.0, 500.0, 1000.0)
    assert DEFAULT_TEMPERATURES == (0.0, 25.0, 50.0, 70.0)
    assert (TABLE2_VDD, TABLE2_CLOAD, TABLE2_FREQUENCY, TABLE2_TEMPERATURE) \
        == (0.65, 2.1, 250.0, 25.0)


@pytest.mark.parametrize("kw", [
    dict(cells=()),
    dict(cells=("CN9P4G",), vdds=()),
    dict(cells=("CN9P4G",), vdds=(0.0,)),
    dict(cells=("CN9P4G",), vdds=(-0.5,)),
    dict(cells=("CN9P4G",), cloads=()),
    dict(cells=("CN9P4G",), cloads=(0.0,)),
    dict(cells=("CN9P4G",), frequencies=(-250.0,)),
    dict(cells=("CN9P4G",), temperatures=()),
    dict(cells=("CN9P4G",), temperatures=(-41.0,)),
    dict(cells=("CN9P4G",), temperatures=(126.0,)),
])
def test_plan_rejects_bad_fields(kw):
    with pytest.raises(ValueError):
        SweepPlan(**kw)


def test_plan_accepts_temperature_extremes():
    plan = SweepPlan(cells=("CN9P4G",), temperatures=(-40.0, 0.0, 125.0))
    assert plan.temperatures == (-40.0, 0.0, 125.0)


def test_partition_cells_reference_plan():
    sim, ref = partition_cells(REFERENCE_DESIGNS)
    assert len(sim) == 6
    assert set(ref) == {"CMOS-Bridge", "CNT-FA1", "CNT-FA2"}
    assert set(ref) == set(REFERENCE_ONLY)
    assert partition_cells(("XOR_MODULE",)) == (("XOR_MODULE",), ())
    with pytest.raises(ValueError):
        partition_cells(("NOPE",))


# --- compiled reference data ---

def test_reference_table_shape():
    table = load_reference_table()
    assert len(table) == 27
    assert {r.cell for r in table} == set(REFERENCE_DESIGNS)
    assert all(r.source == "paper-reference" for r in table)
    assert all(r.cload == TABLE2_CLOAD for r in table)
    assert all(r.frequency == TABLE2_FREQUENCY for r in table)
    assert all(r.temperature == TABLE2_TEMPERATURE for r in table)
    assert table[0].cell == "CMOS-Bridge" and table[0].vdd == 0.5
    assert table[-1].cell == "CN8P10G" and table[-1].vdd == 0.8


def _ref(cell, vdd):
    for r in load_reference_table():
        if r.cell == cell and r.vdd == vdd:
            return r
    raise AssertionError(f"missing {cell} at {vdd}")


def test_reference_table_spot_values():
    assert _ref("CN9P4G", 0.5).delay == pytest.approx(4.0743e-11, rel=1e-12)
    assert _ref("TG-CMOS", 0.8).power == pytest.approx(7.6154e-7, rel=1e-12)
    assert _ref("CN8P10G", 0.65).pdp == pytest.approx(0.80823e-17, rel=1e-12)
    assert _ref("CNT-FA2", 0.5).delay == pytest.approx(2.1070e-10, rel=1e-12)
    assert _ref("CMOS-Bridge", 0.8).pdp == pytest.approx(6.2844e-17, rel=1e-12)


def test_reference_consistency_flags_exactly_three_rows():
    bad = inconsistent_reference_rows()
    assert {(r.cell, r.vdd) for r in bad} == {
        ("CMOS-Bridge", 0.8), ("CCMOS", 0.8), ("TG-CMOS", 0.8)}
    # each flagged row is an order-of-magnitude slip, not a rounding issue
    for r in bad:
        assert r.delay * r.power / r.pdp == pytest.approx(10.0, rel=0.01)


# --- improvement arithmetic ---

def test_improvement_definition_and_errors():
    assert improvement(1.0, 4.0) == 0.75
    assert improvement(3.0, 3.0) == 0.0
    for a, b in [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0), (2.0, -1.0)]:
        with pytest.raises(ValueError):
            improvement(a, b)


@given(st.floats(min_value=1e-20, max_value=1e20),
       st.floats(min_value=1e-20, max_value=1e20))
def test_improvement_is_definitional(a, r):
    assert improvement(a, r) == 1.0 - a / r


def test_five_reference_percent_claims():
    # recomputed by hand: 0.80823 against each competitor at 0.65 V
    ref = _ref("CN8P10G", 0.65).pdp
    expected = {
        "CMOS-Bridge": 0.861,
        "CCMOS": 0.809,
        "TG-CMOS": 0.769,
        "CNT-FA1": 0.793,
        "CNT-FA2": 0.667,
    }
    for cell, target in expected.items():
        got = improvement(ref, _ref(cell, 0.65).pdp)
        assert abs(got - target) < 1e-3, (cell, got)


# --- record construction ---

def test_record_rejects_unknown_source():
    with pytest.raises(ValueError):
        CharacterizationRecord("X", 0.65, 2.1, 250.0, 25.0,
                               1e-11, 2e-7, 2e-18, "guessed", None)


# --- sweeping ---

@pytest.fixture(scope="module")
def xor_sweep():
    plan = SweepPlan(cells=("XOR_MODULE",), vdds=(0.8, 0.5),
                     frequencies=(1000.0,))
    return run_sweep(plan)


def test_sweep_cardinality_and_sort(xor_sweep):
    assert len(xor_sweep) == 2
    assert [r.vdd for r in xor_sweep] == [0.5, 0.8]


def test_sweep_simulated_record_fields(xor_sweep):
    for r in xor_sweep:
        assert r.cell == "XOR_MODULE"
        assert r.source == "simulated"
        assert r.reason is None
        assert r.delay > 0.0 and r.power > 0.0
        assert r.pdp == r.delay * r.power
        assert r.cload == TABLE2_CLOAD and r.frequency == 1000.0


def test_sweep_reference_only_cells_become_unavailable_rows():
    plan = SweepPlan(cells=("CMOS-Bridge", "CNT-FA1", "CNT-FA2"),
                     vdds=(0.5, 0.65, 0.8))
    rows = run_sweep(plan)
    assert len(rows) == 9
    for r in rows:
        assert r.source == "paper-reference"
        assert r.delay is None and r.power is None and r.pdp is None
        assert r.reason is not None and "unavailable" in r.reason


def test_sweep_unknown_cell_is_an_error():
    with pytest.raises(ValueError):
        run_sweep(SweepPlan(cells=("NOPE",)))


# --- reports ---

def test_csv_round_trip_is_a_fixed_point():
    table = load_reference_table()
    text = emit_report(table, "csv")
    parsed = parse_report(text)
    assert parsed == list(table)
    assert emit_report(parsed, "csv") == text


def test_csv_single_record_two_lines():
    rec = CharacterizationRecord("A", 0.65, 2.1, 250.0, 25.0,
                                 1e-11, 2e-7, 2e-18, "simulated", None)
    lines = emit_report([rec], "csv").strip().splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("cell,vdd,cload,frequency,temperature,delay")


def test_csv_round_trips_failure_rows():
    rec = CharacterizationRecord("B", 0.5, 2.1, 250.0, 25.0,
                                 None, None, None, "simulated",
                                 "did not converge")
    assert parse_report(emit_report([rec], "csv")) == [rec]


def test_table2_layout_blocks():
    text = emit_report(load_reference_table(), "table2")
    blocks = [b for b in text.split("\n\n") if b.strip()]
    assert len(blocks) == 3
    heads = [b.splitlines()[0] for b in blocks]
    assert "delay" in heads[0].lower()
    assert "power" in heads[1].lower()
    assert "pdp" in heads[2].lower()
    for b in blocks:
        rows = [ln for ln in b.splitlines() if not ln.startswith("#")]
        assert len(rows) == 9
        # one design name plus a value per supply level
        assert all(len(r.split()) == 4 for r in rows)
    assert "CMOS-Bridge" in text and "CN8P10G" in text


def test_table2_layout_rejects_mixed_operating_points():
    a = CharacterizationRecord("A", 0.65, 2.1, 250.0, 25.0,
                               1e-11, 2e-7, 2e-18, "simulated", None)
    b = CharacterizationRecord("A", 0.65, 4.9, 250.0, 25.0,
                               1e-11, 2e-7, 2e-18, "simulated", None)
    with pytest.raises(ValueError):
        emit_report([a, b], "table2")


def _cload_sweep_records():
    cells = [f"C{i}" for i in range(1, 8)]
    out = []
    for cell in cells:
        for k, cl in enumerate(DEFAULT_CLOADS):
            d = 1e-11 * (1 + k)
            p = 2e-7
            out.append(CharacterizationRecord(
                cell, 0.65, cl, 250.0, 25.0, d, p, d * p, "simulated", None))
    return out


def test_plotdata_matches_sweep_shape():
    files = plotdata_files(_cload_sweep_records())
    assert set(files) == {"delay", "power", "pdp"}
    for text in files.values():
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        header, data = lines[0], lines[1:]
        assert header.split()[0] == "cload"
        assert len(data) == 8
        assert all(len(ln.split()) == 8 for ln in data)
    col = files["delay"].splitlines()
    assert any("delay" in ln for ln in col if ln.startswith("#"))


def test_plotdata_requires_exactly_one_swept_axis():
    recs = _cload_sweep_records()
    flat = [r for r in recs if r.cload == 1.4]
    with pytest.raises(ValueError):
        plotdata_files(flat)
    mixed = recs + [CharacterizationRecord(
        "C1", 0.5, 1.4, 250.0, 25.0, 1e-11, 2e-7, 2e-18, "simulated", None)]
    with pytest.raises(ValueError):
        plotdata_files(mixed)


def test_emit_report_plotdata_concatenates_figures():
    text = emit_report(_cload_sweep_records(), "plotdata")
    assert "# figure: delay vs cload" in text
    assert "# figure: power vs cload" in text
    assert "# figure: pdp vs cload" in text


def test_emit_report_rejects_empty_or_unknown():
    rec = CharacterizationRecord("A", 0.65, 2.1, 250.0, 25.0,
                                 1e-11, 2e-7, 2e-18, "simulated", None)
    with pytest.raises(ValueError):
        emit_report([], "csv")
    with pytest.raises(ValueError):
        emit_report([rec], "latex")


# --- plan files ---

PLAN_TEXT = """
* comparison sweep
cells = CN9P4G, CCMOS
vdds = 0.5, 0.8
cloads = 2.1          # femtofarads
frequencies = 250
temperatures = 0, 70
policy = (19,0)
"""


def test_parse_plan_reads_key_value_text():
    plan = parse_plan(PLAN_TEXT)
    assert plan.cells == ("CN9P4G", "CCMOS")
    assert plan.vdds == (0.5, 0.8)
    assert plan.cloads == (2.1,)
    assert plan.frequencies == (250.0,)
    assert plan.temperatures == (0.0, 70.0)
    assert plan.policy == ChiralityVector(19, 0)


def test_parse_plan_errors():
    with pytest.raises(ValueError):
        parse_plan("vdds = 0.5\n")          # no cells
    with pytest.raises(ValueError):
        parse_plan("cells = CN9P4G\nwat = 1\n")
    with pytest.raises(ValueError):
        parse_plan("cells = CN9P4G\nvdds = banana\n")
