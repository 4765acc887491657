"""Characterization sweeps, compiled reference data, and report emission.

The reference table reproduces a published nine-design comparison at a
fixed operating point (2.1 fF, 250 MHz, 25 C, three supply levels).
Those numbers came from a different device model; they are data to
reduce and compare against, never values this simulator recomputes.
Three of the nine designs have no transistor-level netlist here, so
sweeps mark their rows unavailable instead of simulating them.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, fields
from itertools import product
from multiprocessing import Pool

from .cells import CELL_NAMES, DiameterPolicy, build_cell
from .device import ChiralityVector, CnfetModelParams
from .sim import Measurement, SimConfig, SimError, measure

__all__ = [
    "DEFAULT_VDDS",
    "DEFAULT_CLOADS",
    "DEFAULT_FREQUENCIES",
    "DEFAULT_TEMPERATURES",
    "TABLE2_VDD",
    "TABLE2_CLOAD",
    "TABLE2_FREQUENCY",
    "TABLE2_TEMPERATURE",
    "REFERENCE_DESIGNS",
    "REFERENCE_ONLY",
    "CharacterizationRecord",
    "SweepPlan",
    "run_sweep",
    "improvement",
    "load_reference_table",
    "inconsistent_reference_rows",
    "emit_report",
    "parse_report",
    "plotdata_files",
    "parse_plan",
    "partition_cells",
]

# fixed operating point of the reference comparison
TABLE2_VDD = 0.65
TABLE2_CLOAD = 2.1        # fF
TABLE2_FREQUENCY = 250.0  # MHz
TABLE2_TEMPERATURE = 25.0  # C

# default per-axis sweep grids (plan units: V, fF, MHz, C)
DEFAULT_VDDS = (0.5, 0.65, 0.8)
DEFAULT_CLOADS = (1.4, 1.9, 2.4, 2.9, 3.4, 3.9, 4.4, 4.9)
DEFAULT_FREQUENCIES = (100.0, 250.0, 500.0, 1000.0)
DEFAULT_TEMPERATURES = (0.0, 25.0, 50.0, 70.0)

# reference rows are (delay E-10 s, power E-7 W, pdp E-17 J) per supply
# level 0.5 / 0.65 / 0.8 V, design-major in the published order
_REFERENCE_DATA = {
    "CMOS-Bridge": ((4.9264, 1.6830, 8.2742),
                    (1.926, 3.0314, 5.8384),
                    (12.002, 5.2361, 6.2844)),
    "CCMOS": ((3.9300, 1.6369, 6.4329),
              (1.444, 2.926, 4.2253),
              (9.4001, 5.0607, 4.7571)),
    "TG-CMOS": ((2.3753, 2.1678, 5.1492),
                (0.88103, 3.9688, 3.4966),
                (5.4938, 7.6154, 4.1837)),
    "CNT-FA1": ((3.0340, 1.5523, 4.7097),
                (0.8747, 4.4724, 3.912),
                (4.8074, 3.1228, 15.013)),
    "CNT-FA2": ((2.1070, 1.3761, 2.8995),
                (0.79694, 3.0466, 2.4279),
                (5.8841, 1.6917, 9.9541)),
    "CN9P4G": ((0.40743, 1.9720, 0.80345),
               (0.29928, 3.0276, 0.9061),
               (0.27675, 4.3138, 1.1938)),
    "CN9P8GBUFF": ((0.43620, 2.1721, 0.94746),
                   (0.32865, 3.3545, 1.1024),
                   (0.27409, 4.9056, 1.3446)),
    "CN10PFS": ((0.45567, 1.8339, 0.83566),
                (0.34379, 2.8507, 0.98004),
                (0.28079, 4.1671, 1.1701)),
    "CN8P10G": ((0.27607, 1.8620, 0.51404),
                (0.27331, 2.9572, 0.80823),
                (0.86408, 4.3012, 3.7166)),
}

REFERENCE_DESIGNS = tuple(_REFERENCE_DATA)
REFERENCE_ONLY = ("CMOS-Bridge", "CNT-FA1", "CNT-FA2")

_SOURCES = ("simulated", "paper-reference")


def _canon(name: str) -> str:
    return name.upper().replace("-", "").replace("_", "")


_BUILDABLE = {_canon(n): n for n in CELL_NAMES}
_REFERENCE_CANON = {_canon(n): n for n in REFERENCE_ONLY}


def partition_cells(names) -> tuple[tuple, tuple]:
    """Split plan cell names into (simulatable, reference-only)."""
    sim, ref = [], []
    for name in names:
        key = _canon(name)
        if key in _BUILDABLE:
            sim.append(name)
        elif key in _REFERENCE_CANON:
            ref.append(name)
        else:
            known = sorted(set(CELL_NAMES) | set(REFERENCE_ONLY))
            raise ValueError(
                f"unknown cell {name!r} (known: {', '.join(known)})")
    return tuple(sim), tuple(ref)


@dataclass(frozen=True)
class CharacterizationRecord:
    cell: str
    vdd: float
    cload: float        # fF
    frequency: float    # MHz
    temperature: float  # C
    delay: float | None  # s
    power: float | None  # W
    pdp: float | None    # J
    source: str
    reason: str | None = None

    def __post_init__(self):
        if self.source not in _SOURCES:
            raise ValueError(
                f"source must be one of {_SOURCES}, got {self.source!r}")
        missing = [self.delay is None, self.power is None, self.pdp is None]
        if any(missing) and not all(missing):
            raise ValueError("delay, power, pdp must be all set or all absent")
        if all(missing) and not self.reason:
            raise ValueError("a record without measurements needs a reason")


@dataclass(frozen=True)
class SweepPlan:
    """Cartesian characterization grid in plan units (V, fF, MHz, C)."""

    cells: tuple
    vdds: tuple = (TABLE2_VDD,)
    cloads: tuple = (TABLE2_CLOAD,)
    frequencies: tuple = (TABLE2_FREQUENCY,)
    temperatures: tuple = (TABLE2_TEMPERATURE,)
    policy: ChiralityVector = ChiralityVector(55, 0)
    output: str | None = None

    def __post_init__(self):
        for name in ("cells", "vdds", "cloads", "frequencies", "temperatures"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.cells:
            raise ValueError("plan needs at least one cell")
        for name in ("vdds", "cloads", "frequencies"):
            vals = getattr(self, name)
            if not vals:
                raise ValueError(f"plan needs at least one value in {name}")
            if any(v <= 0 for v in vals):
                raise ValueError(f"{name} must be positive, got {vals}")
        if not self.temperatures:
            raise ValueError("plan needs at least one temperature")
        if any(not -40.0 <= t <= 125.0 for t in self.temperatures):
            raise ValueError(
                f"temperatures must lie in [-40, 125] C, got {self.temperatures}")


def _run_point(args) -> CharacterizationRecord:
    name, netlist, vdd, cload, freq, temp, params = args
    if netlist is None:
        return CharacterizationRecord(
            name, vdd, cload, freq, temp, None, None, None,
            "paper-reference",
            "unavailable: reference-only design with no transistor-level netlist")
    cfg = SimConfig(t_stop=1.0, vdd=vdd, temperature=temp)
    try:
        m: Measurement = measure(netlist, cfg, params=params,
                                 cload=cload * 1e-15, frequency=freq * 1e6)
    except (SimError, ValueError) as err:
        return CharacterizationRecord(name, vdd, cload, freq, temp,
                                      None, None, None, "simulated", str(err))
    reason = None
    if m.failures:
        reason = f"{len(m.failures)} transitions did not resolve to a logic level"
    return CharacterizationRecord(name, vdd, cload, freq, temp,
                                  m.delay, m.power, m.pdp, "simulated", reason)


def run_sweep(plan: SweepPlan, *, params: CnfetModelParams | None = None,
              processes: int | None = None) -> list:
    """Execute the full Cartesian grid; failures become explicit rows.

    Points are independent, so ``processes`` > 1 fans them out over a
    worker pool; the declared sort order makes the result identical
    either way.
    """
    partition_cells(plan.cells)  # validate names up front
    policy = DiameterPolicy(default=plan.policy)
    built = {}
    for name in plan.cells:
        key = _canon(name)
        if key in _BUILDABLE:
            built[name] = build_cell(_BUILDABLE[key], policy=policy,
                                     params=params)
        else:
            built[name] = None
    points = [(name, built[name], vdd, cload, freq, temp, params)
              for name, vdd, cload, freq, temp in product(
                  plan.cells, plan.vdds, plan.cloads,
                  plan.frequencies, plan.temperatures)]
    if processes and processes > 1:
        with Pool(processes) as pool:
            records = pool.map(_run_point, points)
    else:
        records = [_run_point(p) for p in points]
    records.sort(key=lambda r: (r.cell, r.vdd, r.cload,
                                r.frequency, r.temperature))
    return records


def improvement(pdp_a: float, pdp_ref: float) -> float:
    """Fractional figure-of-merit gain of ``a`` over ``ref``: 1 - a/ref."""
    if pdp_a <= 0.0 or pdp_ref <= 0.0:
        raise ValueError(
            f"improvement needs positive inputs, got {pdp_a} and {pdp_ref}")
    return 1.0 - pdp_a / pdp_ref


def load_reference_table() -> list:
    """Bundled nine-design comparison, unit-normalized to SI."""
    out = []
    for cell, rows in _REFERENCE_DATA.items():
        for vdd, (delay, power, pdp) in zip((0.5, 0.65, 0.8), rows):
            out.append(CharacterizationRecord(
                cell, vdd, TABLE2_CLOAD, TABLE2_FREQUENCY, TABLE2_TEMPERATURE,
                delay * 1e-10, power * 1e-7, pdp * 1e-17, "paper-reference"))
    return out


def inconsistent_reference_rows(tol: float = 0.02) -> list:
    """Reference rows whose pdp disagrees with delay x power beyond tol.

    Flagged, never corrected: the table is reference data as published.
    """
    return [r for r in load_reference_table()
            if abs(r.pdp - r.delay * r.power) / r.pdp > tol]


_CSV_FIELDS = tuple(f.name for f in fields(CharacterizationRecord))
_FLOAT_FIELDS = ("vdd", "cload", "frequency", "temperature",
                 "delay", "power", "pdp")


def _emit_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_FIELDS)
    for r in records:
        w.writerow(["" if getattr(r, f) is None else getattr(r, f)
                    for f in _CSV_FIELDS])
    return buf.getvalue()


def parse_report(text: str) -> list:
    """Inverse of the csv report format; emit(parse(emit(x))) == emit(x)."""
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows or tuple(rows[0]) != _CSV_FIELDS:
        raise ValueError(f"expected header {','.join(_CSV_FIELDS)}")
    out = []
    for row in rows[1:]:
        if len(row) != len(_CSV_FIELDS):
            raise ValueError(f"row has {len(row)} fields: {row!r}")
        kw = dict(zip(_CSV_FIELDS, row))
        for f in _FLOAT_FIELDS:
            kw[f] = float(kw[f]) if kw[f] != "" else None
        kw["reason"] = kw["reason"] or None
        out.append(CharacterizationRecord(**kw))
    return out


def _fixed_point_of(records):
    points = {(r.cload, r.frequency, r.temperature) for r in records}
    if len(points) != 1:
        raise ValueError(
            "layout needs records at one fixed cload/frequency/temperature; "
            f"got {len(points)} distinct operating points")
    return next(iter(points))


def _emit_table2(records) -> str:
    cload, freq, temp = _fixed_point_of(records)
    cells = list(dict.fromkeys(r.cell for r in records))
    vdds = sorted({r.vdd for r in records})
    value = {(r.cell, r.vdd): r for r in records}
    blocks = []
    for label, attr, unit in (("Delay", "delay", "s"), ("Power", "power", "W"),
                              ("PDP", "pdp", "J")):
        lines = [f"# {label} ({unit}) at cload={cload:g} fF, "
                 f"frequency={freq:g} MHz, temperature={temp:g} C",
                 "# design " + " ".join(f"vdd={v:g}" for v in vdds)]
        for cell in cells:
            vals = []
            for v in vdds:
                r = value.get((cell, v))
                x = getattr(r, attr) if r is not None else None
                vals.append("n/a" if x is None else repr(x))
            lines.append(cell + " " + " ".join(vals))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


_AXES = ("vdd", "cload", "frequency", "temperature")


def _swept_axis(records):
    distinct = {a: sorted({getattr(r, a) for r in records}) for a in _AXES}
    swept = [a for a in _AXES if len(distinct[a]) > 1]
    if len(swept) != 1:
        raise ValueError(
            "plot data needs exactly one swept parameter, found "
            f"{swept or 'none'}")
    return swept[0], distinct[swept[0]]


def plotdata_files(records) -> dict:
    """One whitespace table per quantity: x column plus a series per cell."""
    if not records:
        raise ValueError("no records to report")
    axis, xs = _swept_axis(records)
    cells = sorted({r.cell for r in records})
    value = {(r.cell, getattr(r, axis)): r for r in records}
    out = {}
    for attr in ("delay", "power", "pdp"):
        lines = [f"# figure: {attr} vs {axis}", f"{axis} " + " ".join(cells)]
        for x in xs:
            row = [f"{x:g}"]
            for cell in cells:
                r = value.get((cell, x))
                v = getattr(r, attr) if r is not None else None
                row.append("nan" if v is None else repr(v))
            lines.append(" ".join(row))
        out[attr] = "\n".join(lines) + "\n"
    return out


def emit_report(records, format: str) -> str:
    """Render records as csv, table2 (layout blocks), or plotdata text."""
    records = list(records)
    if not records:
        raise ValueError("no records to report")
    if format == "csv":
        return _emit_csv(records)
    if format == "table2":
        return _emit_table2(records)
    if format == "plotdata":
        files = plotdata_files(records)
        return "\n".join(files[a] for a in ("delay", "power", "pdp"))
    raise ValueError(
        f"unknown report format {format!r} (expected csv, table2, plotdata)")


_POLICY_RE = re.compile(r"^\(\s*(\d+)\s*,\s*(\d+)\s*\)$")
_PLAN_LIST_KEYS = ("vdds", "cloads", "frequencies", "temperatures")


def parse_plan(text: str) -> SweepPlan:
    """Read a sweep plan from key = value text (same shape as param files)."""
    kw = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("*"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip()
        rhs = rhs.strip()
        if key == "cells":
            kw["cells"] = tuple(s.strip() for s in rhs.split(",") if s.strip())
        elif key in _PLAN_LIST_KEYS:
            try:
                kw[key] = tuple(float(s) for s in rhs.split(",") if s.strip())
            except ValueError:
                raise ValueError(
                    f"line {lineno}: {key} needs numbers, got {rhs!r}") from None
        elif key == "policy":
            m = _POLICY_RE.match(rhs)
            if not m:
                raise ValueError(
                    f"line {lineno}: policy needs the form (n1,n2), got {rhs!r}")
            kw["policy"] = ChiralityVector(int(m.group(1)), int(m.group(2)))
        elif key == "output":
            kw["output"] = rhs
        else:
            raise ValueError(f"line {lineno}: unknown plan key {key!r}")
    if "cells" not in kw:
        raise ValueError("plan text must set 'cells'")
    return SweepPlan(**kw)
