#!/usr/bin/env python3
"""Run the bundled comparison plans and the per-axis figure sweeps.

Produces, under --out (default results/):
  comparison.csv      all nine designs at the fixed operating point,
                      three supply levels; unbuildable designs appear as
                      unavailable rows
  comparison.txt      the same records in the three-block table layout
  improvements.txt    PDP reductions of each buildable design against
                      every reference design at 0.65 V
  <axis>_sweep.csv    one per swept axis (vdd, cload, frequency,
                      temperature), built-in cells only
  <axis>_{delay,power,pdp}.dat
                      whitespace plot tables for external tools

The full run simulates a few hundred operating points sequentially;
expect tens of minutes.  Restrict with --cells and --axes while
exploring.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from cnfetsim.bench import (
    DEFAULT_CLOADS,
    DEFAULT_FREQUENCIES,
    DEFAULT_TEMPERATURES,
    DEFAULT_VDDS,
    REFERENCE_DESIGNS,
    REFERENCE_ONLY,
    SweepPlan,
    emit_report,
    improvement,
    load_reference_table,
    plotdata_files,
    run_sweep,
)
from cnfetsim.cells import CELL_NAMES

AXIS_GRIDS = {
    "vdd": ("vdds", DEFAULT_VDDS),
    "cload": ("cloads", DEFAULT_CLOADS),
    "frequency": ("frequencies", DEFAULT_FREQUENCIES),
    "temperature": ("temperatures", DEFAULT_TEMPERATURES),
}


def comparison(out: pathlib.Path, cells) -> None:
    declared = [c for c in REFERENCE_DESIGNS
                if c in REFERENCE_ONLY or _canon(c) in {_canon(x) for x in cells}]
    plan = SweepPlan(cells=tuple(declared), vdds=DEFAULT_VDDS)
    records = run_sweep(plan)
    (out / "comparison.csv").write_text(emit_report(records, "csv"))
    (out / "comparison.txt").write_text(emit_report(records, "table2"))
    print(f"wrote {out}/comparison.csv ({len(records)} rows)")


def _canon(name: str) -> str:
    return name.upper().replace("-", "").replace("_", "")


def improvements(out: pathlib.Path) -> None:
    table = {(r.cell, r.vdd): r.pdp for r in load_reference_table()}
    lines = []
    proposed = [c for c in REFERENCE_DESIGNS if c not in REFERENCE_ONLY]
    for cell in proposed:
        for ref in REFERENCE_DESIGNS:
            if ref == cell:
                continue
            frac = improvement(table[(cell, 0.65)], table[(ref, 0.65)])
            lines.append(f"{cell} vs {ref} at 0.65 V: {frac * 100:+.2f}%")
    (out / "improvements.txt").write_text("\n".join(lines) + "\n")
    print(f"wrote {out}/improvements.txt")


def axis_sweep(out: pathlib.Path, axis: str, cells) -> None:
    field, grid = AXIS_GRIDS[axis]
    plan = SweepPlan(cells=tuple(cells), **{field: grid})
    records = run_sweep(plan)
    (out / f"{axis}_sweep.csv").write_text(emit_report(records, "csv"))
    for qty, text in plotdata_files(records).items():
        (out / f"{axis}_{qty}.dat").write_text(text)
    bad = [r for r in records if r.reason]
    print(f"wrote {out}/{axis}_sweep.csv ({len(records)} rows, "
          f"{len(bad)} with diagnostics)")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--cells", default=",".join(CELL_NAMES),
                    help="comma-separated built-in cells for the axis sweeps")
    ap.add_argument("--axes", default=",".join(AXIS_GRIDS),
                    help=f"comma-separated subset of {'/'.join(AXIS_GRIDS)}")
    ap.add_argument("--skip-comparison", action="store_true")
    args = ap.parse_args(argv)

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cells = [s.strip() for s in args.cells.split(",") if s.strip()]
    axes = [s.strip() for s in args.axes.split(",") if s.strip()]
    bad_axes = [a for a in axes if a not in AXIS_GRIDS]
    if bad_axes:
        ap.error(f"unknown axes: {bad_axes}")

    improvements(out)
    if not args.skip_comparison:
        comparison(out, cells)
    for axis in axes:
        axis_sweep(out, axis, cells)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
