"""Command-line entry point.

Verbs map one-to-one onto the library layers: cells (library), verify
and swing (switch-level), sim (transient measurement), sweep, reference,
and improve (characterization harness).  Exit codes: 0 success, 1 when
the run itself surfaced diagnostics, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import pathlib
import re
import sys

from .bench import (
    REFERENCE_DESIGNS,
    CharacterizationRecord,
    emit_report,
    improvement,
    inconsistent_reference_rows,
    load_reference_table,
    parse_plan,
    plotdata_files,
    run_sweep,
)
from .cells import CELL_NAMES, CELL_SPECS, DiameterPolicy, build_cell
from .device import ChiralityVector
from .netlist import NetlistParseError, emit_netlist, parse_netlist
from .sim import SimConfig, SimError, _pattern_fixture, measure, transient
from .switchlevel import swing_report, verify_truth_table

_POLICY_RE = re.compile(r"^\(\s*(\d+)\s*,\s*(\d+)\s*\)$")


def _policy_arg(text: str) -> ChiralityVector:
    m = _POLICY_RE.match(text.strip())
    if not m:
        raise argparse.ArgumentTypeError(
            f"policy needs the form (n1,n2), got {text!r}")
    try:
        return ChiralityVector(int(m.group(1)), int(m.group(2)))
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


_CANON_CELLS = {name.upper().replace("-", "").replace("_", ""): name
                for name in CELL_NAMES}
_CANON_REFERENCE = {name.upper().replace("-", "").replace("_", ""): name
                    for name in REFERENCE_DESIGNS}


def _usage(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _diagnostic(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 1


def _resolve_cell(name: str):
    return _CANON_CELLS.get(name.upper().replace("-", "").replace("_", ""))


def _bits(pattern) -> str:
    return "".join(str(b) for b in pattern)


def _cmd_cells(args) -> int:
    if args.action == "list":
        for name in CELL_NAMES:
            spec = CELL_SPECS[name]
            print(f"{name:12s} inputs={','.join(spec.inputs)} "
                  f"outputs={','.join(spec.outputs)} "
                  f"devices={spec.declared_count}")
        return 0
    key = _resolve_cell(args.cell)
    if key is None:
        return _usage(f"unknown cell {args.cell!r} "
                      f"(have: {', '.join(CELL_NAMES)})")
    policy = DiameterPolicy(default=args.policy) if args.policy else None
    print(emit_netlist(build_cell(key, policy=policy)), end="")
    return 0


def _cmd_verify(args) -> int:
    key = _resolve_cell(args.cell)
    if key is None:
        return _usage(f"unknown cell {args.cell!r}")
    policy = DiameterPolicy(default=args.policy) if args.policy else None
    summary = verify_truth_table(build_cell(key, policy=policy))
    for row in summary.rows:
        verdict = "ok" if row.ok else "MISMATCH"
        exp = " ".join(f"{k}={v}" for k, v in row.expected.items())
        obs = " ".join(f"{k}={v}" for k, v in row.observed.items())
        print(f"{_bits(row.pattern)} expected: {exp}  observed: {obs}  {verdict}")
    good = sum(1 for r in summary.rows if r.ok)
    print(f"{good}/{len(summary.rows)} patterns correct")
    return 0 if summary.ok else 1


def _cmd_swing(args) -> int:
    key = _resolve_cell(args.cell)
    if key is None:
        return _usage(f"unknown cell {args.cell!r}")
    n = build_cell(key)
    policy = DiameterPolicy(default=args.policy) if args.policy else None
    an = swing_report(n, policy=policy, vdd=args.vdd, epsilon=args.epsilon)
    print(f"{an.cell} at vdd={an.vdd:g} V, epsilon={an.epsilon:g}")
    for out in an.static.outputs:
        line = f"{out.output}: {out.classification}"
        if out.classification != "FullSwing":
            if out.worst_pattern is not None:
                line += (f"  worst drop {out.worst_drop:.4f} V"
                         f" at {_bits(out.worst_pattern)}")
            if out.fight_patterns:
                pats = ", ".join(_bits(p) for p in out.fight_patterns)
                line += f"  leak fights at {pats}"
        print(line)
    return 0


def _cmd_improve(args) -> int:
    table = {(r.cell, r.vdd): r for r in load_reference_table()}
    names = []
    for given in (args.cell_a, args.cell_ref):
        key = given.upper().replace("-", "").replace("_", "")
        if key not in _CANON_REFERENCE:
            return _usage(f"unknown reference design {given!r} "
                          f"(have: {', '.join(REFERENCE_DESIGNS)})")
        names.append(_CANON_REFERENCE[key])
    vdds = sorted({v for _, v in table})
    matches = [v for v in vdds if abs(v - args.vdd) < 1e-9]
    if not matches:
        return _usage(f"vdd {args.vdd:g} is not a reference supply level "
                      f"(have: {', '.join(f'{v:g}' for v in vdds)})")
    vdd = matches[0]
    a, ref = names
    frac = improvement(table[(a, vdd)].pdp, table[(ref, vdd)].pdp)
    print(f"PDP improvement of {a} over {ref} at {vdd:g} V: {frac * 100:.2f}%")
    return 0


def _cmd_reference(args) -> int:
    print(emit_report(load_reference_table(), args.format), end="")
    for r in inconsistent_reference_rows():
        print(f"flagged inconsistent row: {r.cell} vdd={r.vdd:g} "
              f"(delay x power is off by {r.delay * r.power / r.pdp:.1f}x)",
              file=sys.stderr)
    return 0


def _load_sim_target(target: str):
    key = _resolve_cell(target)
    if key is not None:
        return build_cell(key), None
    path = pathlib.Path(target)
    if not path.is_file():
        return None, _usage(f"{target!r} is neither a cell name nor a file")
    try:
        return parse_netlist(path.read_text()), None
    except NetlistParseError as err:
        return None, _diagnostic(str(err))


def _cmd_sim(args) -> int:
    n, rc = _load_sim_target(args.target)
    if n is None:
        return rc
    cfg = SimConfig(t_stop=1.0, vdd=args.vdd, temperature=args.temp)
    cload = args.cload * 1e-15
    frequency = args.freq * 1e6
    if args.record:
        nets = [s.strip() for s in args.record.split(",") if s.strip()]
        try:
            fix, refine, t_stop, _ = _pattern_fixture(n, args.vdd, cload,
                                                      frequency)
            wave = transient(fix, None,
                             SimConfig(t_stop=t_stop, vdd=args.vdd,
                                       temperature=args.temp),
                             record=nets, supply_id="VVDD", refine=refine)
        except ValueError as err:
            return _usage(str(err))
        except SimError as err:
            return _diagnostic(str(err))
        print("time," + ",".join(nets))
        for k, t in enumerate(wave.times):
            print(f"{t!r},"
                  + ",".join(repr(wave.nets[net][k]) for net in nets))
        return 0
    try:
        m = measure(n, cfg, cload=cload, frequency=frequency)
    except (SimError, ValueError) as err:
        return _diagnostic(str(err))
    reason = None
    if m.failures:
        reason = f"{len(m.failures)} transitions did not resolve to a logic level"
    rec = CharacterizationRecord(n.name, args.vdd, args.cload, args.freq,
                                 args.temp, m.delay, m.power, m.pdp,
                                 "simulated", reason)
    print(emit_report([rec], "csv"), end="")
    if reason:
        print(reason, file=sys.stderr)
        return 1
    return 0


_SWEEP_FILES = {
    "csv": ("records.csv",),
    "table2": ("table2.txt",),
    "plotdata": ("delay.dat", "power.dat", "pdp.dat"),
}


def _cmd_sweep(args) -> int:
    path = pathlib.Path(args.plan)
    if not path.is_file():
        return _usage(f"plan file {args.plan!r} not found")
    try:
        plan = parse_plan(path.read_text())
        records = run_sweep(plan, processes=args.processes)
        text = emit_report(records, args.format)
    except (ValueError, SimError) as err:
        return _diagnostic(str(err))
    out_dir = args.out or plan.output
    if out_dir:
        dest = pathlib.Path(out_dir)
        dest.mkdir(parents=True, exist_ok=True)
        if args.format == "plotdata":
            files = plotdata_files(records)
            for name in _SWEEP_FILES["plotdata"]:
                (dest / name).write_text(files[name.split(".")[0]])
                print(dest / name)
        else:
            name = _SWEEP_FILES[args.format][0]
            (dest / name).write_text(text)
            print(dest / name)
    else:
        print(text, end="")
    bad = [r for r in records if r.source == "simulated" and r.reason]
    for r in bad:
        print(f"diagnostic: {r.cell} vdd={r.vdd:g} cload={r.cload:g} "
              f"freq={r.frequency:g} temp={r.temperature:g}: {r.reason}",
              file=sys.stderr)
    return 1 if bad else 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cnfetsim",
        description="Switch-level and transient characterization of the "
                    "built-in adder cells.")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("cells", help="list library cells or emit a netlist")
    cs = c.add_subparsers(dest="action", required=True)
    cs.add_parser("list", help="one line per cell").set_defaults(func=_cmd_cells)
    ce = cs.add_parser("emit", help="print a cell netlist")
    ce.add_argument("cell")
    ce.add_argument("--policy", type=_policy_arg, default=None,
                    help="chirality for all CNFET devices, e.g. \"(19,0)\"")
    ce.set_defaults(func=_cmd_cells)

    v = sub.add_parser("verify", help="exhaustive truth-table check")
    v.add_argument("cell")
    v.add_argument("--policy", type=_policy_arg, default=None)
    v.set_defaults(func=_cmd_verify)

    s = sub.add_parser("swing", help="static full-swing classification")
    s.add_argument("cell")
    s.add_argument("--vdd", type=float, default=0.65)
    s.add_argument("--epsilon", type=float, default=0.2)
    s.add_argument("--policy", type=_policy_arg, default=None)
    s.set_defaults(func=_cmd_swing)

    m = sub.add_parser("sim", help="transient measurement of one cell")
    m.add_argument("target", help="cell name or netlist file path")
    m.add_argument("--vdd", type=float, default=0.65)
    m.add_argument("--cload", type=float, default=2.1, help="fF")
    m.add_argument("--freq", type=float, default=250.0, help="MHz")
    m.add_argument("--temp", type=float, default=25.0, help="C")
    m.add_argument("--record", default=None,
                   help="comma-separated nets: dump the waveform CSV instead")
    m.set_defaults(func=_cmd_sim)

    w = sub.add_parser("sweep", help="run a characterization plan file")
    w.add_argument("plan")
    w.add_argument("--out", default=None, help="directory for report files")
    w.add_argument("--format", choices=("csv", "table2", "plotdata"),
                   default="csv")
    w.add_argument("--processes", type=int, default=None)
    w.set_defaults(func=_cmd_sweep)

    r = sub.add_parser("reference", help="print the bundled comparison table")
    r.add_argument("--format", choices=("csv", "table2", "plotdata"),
                   default="table2")
    r.set_defaults(func=_cmd_reference)

    i = sub.add_parser("improve", help="PDP reduction between two designs")
    i.add_argument("cell_a")
    i.add_argument("cell_ref")
    i.add_argument("--vdd", type=float, required=True)
    i.set_defaults(func=_cmd_improve)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else int(e.code)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
