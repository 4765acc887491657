"""Static switch-level evaluation over a strength/threshold-drop lattice.

Values are {Strong0, Weak0(drop), Strong1, Weak1(drop), Z, X}.  ON pass
devices degrade the level they pass badly (N degrades 1s, P degrades 0s)
by at least the device threshold; series chains accumulate the worst drop.
Conflicting drivers produce X.  OFF and unknown-gate devices conduct
nothing here; what their subthreshold leakage does to weak nodes is
flagged separately as a fight threat and quantified by the transient
simulator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cells import CELL_SPECS, DiameterPolicy, apply_policy, full_adder_truth, xor2
from .device import CnfetModelParams
from .netlist import Netlist, transistor_polarity, transistor_vth

__all__ = [
    "SwitchValue",
    "join",
    "transmit",
    "value_to_voltage",
    "ConvergenceError",
    "PatternReport",
    "evaluate_static",
    "TruthRow",
    "TruthSummary",
    "verify_truth_table",
    "OutputSwing",
    "SwingReport",
    "SwingAnalysis",
    "swing_report",
]

_LEVELS = ("S0", "W0", "S1", "W1", "Z", "X")
_WEAK = ("W0", "W1")


@dataclass(frozen=True)
class SwitchValue:
    level: str
    drop: float = 0.0

    def __post_init__(self):
        if self.level not in _LEVELS:
            raise ValueError(f"unknown level {self.level!r}")
        if self.level in _WEAK:
            if not self.drop >= 0.0:
                raise ValueError(f"weak level needs drop >= 0, got {self.drop}")
        elif self.drop != 0.0:
            raise ValueError(f"{self.level} carries no drop")

    @classmethod
    def strong0(cls):
        return cls("S0")

    @classmethod
    def strong1(cls):
        return cls("S1")

    @classmethod
    def weak0(cls, drop: float):
        return cls("W0", drop)

    @classmethod
    def weak1(cls, drop: float):
        return cls("W1", drop)

    @classmethod
    def z(cls):
        return cls("Z")

    @classmethod
    def x(cls):
        return cls("X")

    @property
    def logic(self) -> int | None:
        if self.level in ("S0", "W0"):
            return 0
        if self.level in ("S1", "W1"):
            return 1
        return None


_Z = SwitchValue.z()
_X = SwitchValue.x()
_S0 = SwitchValue.strong0()
_S1 = SwitchValue.strong1()


def join(a: SwitchValue, b: SwitchValue) -> SwitchValue:
    """Resolve two drivers of one net.

    Z is the identity and X absorbs.  Drivers of opposite logic values
    always conflict to X, whatever their strengths; ratioed fights are the
    transient simulator's business.  Same-value drivers keep the strongest
    level (smallest drop).
    """
    if a.level == "Z":
        return b
    if b.level == "Z":
        return a
    if a.level == "X" or b.level == "X":
        return _X
    if a.logic != b.logic:
        return _X
    strong = _S0 if a.logic == 0 else _S1
    if a.level == strong.level or b.level == strong.level:
        return strong
    return SwitchValue(a.level, min(a.drop, b.drop))


def transmit(polarity: str, vth: float, gate: SwitchValue,
             value: SwitchValue) -> SwitchValue:
    """Value emitted through one channel given its gate level."""
    if value.level == "Z":
        return _Z
    g = gate.logic
    if g is None:
        # a floating gate conducts nothing; a conflicted gate could do
        # anything, so it poisons whatever it might pass
        return _X if gate.level == "X" else _Z
    if g != (1 if polarity == "N" else 0):
        return _Z
    if value.level == "X":
        return _X
    if polarity == "N":
        if value.logic == 1:
            return SwitchValue.weak1(max(value.drop, vth))
        return value
    if value.logic == 0:
        return SwitchValue.weak0(max(value.drop, vth))
    return value


def value_to_voltage(v: SwitchValue, vdd: float) -> float | None:
    """Rail-referred voltage estimate; None for Z and X."""
    if v.level == "S1":
        return vdd
    if v.level == "S0":
        return 0.0
    if v.level == "W1":
        return vdd - v.drop
    if v.level == "W0":
        return v.drop
    return None


class ConvergenceError(RuntimeError):
    def __init__(self, nets):
        super().__init__(f"static evaluation did not settle; oscillating nets: {sorted(nets)}")
        self.nets = tuple(sorted(nets))


@dataclass(frozen=True)
class PatternReport:
    pattern: tuple[int, ...]
    vdd: float
    nodes: dict
    correctness: dict
    degraded: tuple[tuple[str, float, str], ...]
    fights: tuple[tuple[str, str], ...]


def _pattern_bits(n: Netlist, pattern) -> dict[str, int]:
    if isinstance(pattern, dict):
        if set(pattern) != set(n.inputs):
            raise ValueError(f"pattern keys {sorted(pattern)} != inputs {sorted(n.inputs)}")
        items = pattern.items()
    else:
        pattern = tuple(pattern)
        if len(pattern) != len(n.inputs):
            raise ValueError(f"pattern needs {len(n.inputs)} bits, got {len(pattern)}")
        items = zip(n.inputs, pattern)
    bits = {}
    for net, b in items:
        if b not in (0, 1):
            raise ValueError(f"input {net!r} must be 0 or 1, got {b!r}")
        bits[net] = int(b)
    return bits


def _oracle_for(n: Netlist):
    """Boolean reference for the netlist's port shape, or None."""
    if n.inputs == ("a", "b", "c") and set(n.outputs) == {"sum", "cout"}:
        def adder(bits):
            s, c = full_adder_truth(bits["a"], bits["b"], bits["c"])
            return {"sum": s, "cout": c}
        return adder
    if len(n.inputs) == 2 and len(n.outputs) == 1:
        a_net, b_net = n.inputs
        out = n.outputs[0]
        return lambda bits: {out: xor2(bits[a_net], bits[b_net])}
    return None


def evaluate_static(n: Netlist, pattern, vdd: float = 0.65) -> PatternReport:
    """Least fixed point of switch propagation from rails and inputs.

    Monotone joins make the result independent of device order; the sweep
    bound exists to catch structures outside the lattice's reach.
    """
    bits = _pattern_bits(n, pattern)
    clamped = {"vdd": _S1, "gnd": _S0}
    for net, b in bits.items():
        clamped[net] = _S1 if b else _S0

    nets = n.nets()
    values = {net: clamped.get(net, _Z) for net in nets}
    devs = n.transistors()
    incident: dict[str, list] = {net: [] for net in nets}
    for d in devs:
        incident[d.drain].append((d, d.source))
        incident[d.source].append((d, d.drain))

    free = [net for net in nets if net not in clamped]
    bound = 4 * max(1, len(n.devices))
    for _ in range(bound):
        changed = []
        new = dict(values)
        for net in free:
            acc = _Z
            for d, other in incident[net]:
                contrib = transmit(transistor_polarity(d), transistor_vth(d),
                                   values[d.gate], values[other])
                acc = join(acc, contrib)
            if acc != values[net]:
                changed.append(net)
            new[net] = acc
        values = new
        if not changed:
            break
    else:
        raise ConvergenceError(changed)

    oracle = _oracle_for(n)
    correctness = {}
    if oracle is not None:
        expected = oracle(bits)
        for out in n.outputs:
            correctness[out] = values[out].logic == expected[out]

    degraded = []
    for out in n.outputs:
        v = values[out]
        if v.level not in _WEAK:
            continue
        blocking = ""
        for d, other in incident[out]:
            contrib = transmit(transistor_polarity(d), transistor_vth(d),
                               values[d.gate], values[other])
            if contrib == v:
                blocking = d.id
                break
        degraded.append((out, v.drop, blocking))

    fights = _fight_scan(n, incident, values, vdd)
    key = tuple(bits[net] for net in n.inputs)
    return PatternReport(key, vdd, values, correctness, tuple(degraded), fights)


def _fight_scan(n, incident, values, vdd) -> tuple[tuple[str, str], ...]:
    """Subthreshold leak threats against weak outputs.

    A nonconducting device whose far terminal holds the opposite logic
    value threatens the output if its gate is undefined, or if its
    estimated gate-source overdrive reaches zero (the device sits at the
    conduction edge and leaks).
    """
    fights = []
    for out in n.outputs:
        v = values[out]
        if v.level not in _WEAK:
            continue
        for d, other in incident[out]:
            pol = transistor_polarity(d)
            gate_v = values[d.gate]
            if gate_v.logic == (1 if pol == "N" else 0):
                continue  # conducting; already part of the join
            ov = values[other]
            if ov.logic is None or ov.logic == v.logic:
                continue
            if gate_v.logic is None:
                fights.append((out, d.id))
                continue
            vg = value_to_voltage(gate_v, vdd)
            vo = value_to_voltage(v, vdd)
            vother = value_to_voltage(ov, vdd)
            vth = transistor_vth(d)
            if pol == "N":
                overdrive = vg - min(vo, vother) - vth
            else:
                overdrive = max(vo, vother) - vg - vth
            if overdrive >= -1e-12:
                fights.append((out, d.id))
    return tuple(fights)


@dataclass(frozen=True)
class TruthRow:
    pattern: tuple[int, ...]
    expected: dict
    observed: dict
    ok: bool


@dataclass(frozen=True)
class TruthSummary:
    ok: bool
    rows: tuple[TruthRow, ...]


def verify_truth_table(n: Netlist) -> TruthSummary:
    """Exhaustive static check of the netlist against its boolean oracle."""
    oracle = _oracle_for(n)
    if oracle is None:
        raise ValueError(
            f"no boolean oracle for ports {n.inputs} -> {n.outputs}")
    rows = []
    for pattern in itertools.product((0, 1), repeat=len(n.inputs)):
        rep = evaluate_static(n, pattern)
        bits = dict(zip(n.inputs, pattern))
        expected = oracle(bits)
        observed = {out: rep.nodes[out].logic for out in n.outputs}
        ok = all(observed[out] == expected[out] for out in n.outputs)
        rows.append(TruthRow(pattern, expected, observed, ok))
    return TruthSummary(all(r.ok for r in rows), tuple(rows))


@dataclass(frozen=True)
class OutputSwing:
    output: str
    classification: str  # "FullSwing" | "Degraded"
    worst_pattern: tuple[int, ...] | None
    worst_drop: float
    fight_patterns: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SwingReport:
    mode: str  # "static" | "settled"
    outputs: tuple[OutputSwing, ...]


@dataclass(frozen=True)
class SwingAnalysis:
    cell: str
    vdd: float
    epsilon: float
    static: SwingReport
    settled: SwingReport | None


def swing_report(n: Netlist, policy: DiameterPolicy | None = None,
                 vdd: float = 0.65, epsilon: float = 0.2,
                 settled_residuals: dict | None = None,
                 params: CnfetModelParams | None = None) -> SwingAnalysis:
    """Classify each output as FullSwing or Degraded over all patterns.

    Static mode uses the lattice drops plus fight threats; an output is
    FullSwing iff every pattern leaves it within epsilon*vdd of a rail and
    nothing leaks against it.  Settled mode repeats the classification
    with measured transient residuals per (output, pattern) in place of
    the static drops.
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must be in (0, 0.5), got {epsilon}")
    if policy is not None:
        n = apply_policy(n, policy, params)

    reports = {}
    for pattern in itertools.product((0, 1), repeat=len(n.inputs)):
        reports[pattern] = evaluate_static(n, pattern, vdd)

    def classify(mode: str, drop_of) -> SwingReport:
        outs = []
        for out in n.outputs:
            worst_pattern, worst_drop = None, 0.0
            fight_patterns = []
            for pattern, rep in reports.items():
                drop = drop_of(out, pattern, rep)
                if worst_pattern is None or drop > worst_drop:
                    worst_pattern, worst_drop = pattern, drop
                if mode == "static" and any(net == out for net, _ in rep.fights):
                    fight_patterns.append(pattern)
            degraded = worst_drop > epsilon * vdd or bool(fight_patterns)
            outs.append(OutputSwing(
                out, "Degraded" if degraded else "FullSwing",
                worst_pattern, worst_drop, tuple(fight_patterns)))
        return SwingReport(mode, tuple(outs))

    def static_drop(out, pattern, rep):
        v = rep.nodes[out]
        if v.level in _WEAK:
            return v.drop
        if v.level in ("Z", "X"):
            return vdd  # undriven or fighting: as far from a rail as it gets
        return 0.0

    static = classify("static", static_drop)

    settled = None
    if settled_residuals is not None:
        def settled_drop(out, pattern, rep):
            if (out, pattern) in settled_residuals:
                return settled_residuals[(out, pattern)]
            return static_drop(out, pattern, rep)
        settled = classify("settled", settled_drop)

    return SwingAnalysis(n.name, vdd, epsilon, static, settled)
