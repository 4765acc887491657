"""Circuit data model plus a line-oriented netlist parser/emitter/validator.

The format is a small SPICE-like subset: one card per logical line,
``*`` full-line and ``;`` trailing comments, ``+`` continuations, and an
explicit device-kind keyword on transistor cards instead of first-letter
magic.  Net names are case-insensitive (canonical lower case, ``0`` aliases
to ``gnd``); device ids keep their case.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum

from .device import (
    ChiralityVector,
    CnfetModelParams,
    DeviceRating,
    channel_current,
    default_params,
    drain_current,
    thermal_voltage,
)
from .units import QuantityError, format_quantity, parse_quantity

__all__ = [
    "DeviceKind",
    "DeviceInstance",
    "Netlist",
    "NetlistParseError",
    "Diagnostic",
    "ValidationReport",
    "parse_netlist",
    "emit_netlist",
    "validate_netlist",
    "transistor_polarity",
    "transistor_vth",
    "transistor_coefficients",
    "transistor_iv",
    "MOS_VTH",
]


class DeviceKind(Enum):
    NCNFET = "NCNFET"
    PCNFET = "PCNFET"
    NMOS = "NMOS"
    PMOS = "PMOS"
    CAP = "CAP"
    VSRC = "VSRC"


_TRANSISTOR_KINDS = frozenset(
    {DeviceKind.NCNFET, DeviceKind.PCNFET, DeviceKind.NMOS, DeviceKind.PMOS})
_TRANSISTOR_NAMES = frozenset(k.value for k in _TRANSISTOR_KINDS)

# bulk reference devices share the CNFET current shape with a fixed threshold
MOS_VTH = 0.2


@dataclass(frozen=True)
class DeviceInstance:
    """One circuit element; payload fields are kind-specific."""

    id: str
    kind: DeviceKind
    terminals: tuple[str, ...]
    rating: DeviceRating | None = None        # NCNFET / PCNFET
    width: float | None = None                # NMOS / PMOS (m)
    length: float | None = None               # NMOS / PMOS (m)
    capacitance: float | None = None          # CAP (F)
    dc: float | None = None                   # VSRC
    pwl: tuple[tuple[float, float], ...] | None = None  # VSRC

    def __post_init__(self):
        want = 3 if self.kind in _TRANSISTOR_KINDS else 2
        if len(self.terminals) != want:
            raise ValueError(
                f"{self.kind.value} device {self.id!r} needs {want} terminals, "
                f"got {len(self.terminals)}")

    # terminal views; transistor order is drain, gate, source
    @property
    def drain(self) -> str:
        return self.terminals[0]

    @property
    def gate(self) -> str:
        return self.terminals[1]

    @property
    def source(self) -> str:
        return self.terminals[2]

    @property
    def plus(self) -> str:
        return self.terminals[0]

    @property
    def minus(self) -> str:
        return self.terminals[1]

    @property
    def is_transistor(self) -> bool:
        return self.kind in _TRANSISTOR_KINDS


@dataclass(frozen=True)
class Netlist:
    name: str
    devices: tuple[DeviceInstance, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    declared_count: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "devices", tuple(self.devices))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        seen = set()
        for d in self.devices:
            key = d.id.lower()
            if key in seen:
                raise ValueError(f"duplicate device id {d.id!r}")
            seen.add(key)

    @property
    def transistor_count(self) -> int:
        return sum(1 for d in self.devices if d.is_transistor)

    def nets(self) -> tuple[str, ...]:
        """All nets in first-appearance order (ports first)."""
        out: list[str] = []
        seen = set()
        for net in (*self.inputs, *self.outputs):
            if net not in seen:
                seen.add(net)
                out.append(net)
        for d in self.devices:
            for net in d.terminals:
                if net not in seen:
                    seen.add(net)
                    out.append(net)
        return tuple(out)

    def transistors(self) -> tuple[DeviceInstance, ...]:
        return tuple(d for d in self.devices if d.is_transistor)


class NetlistParseError(ValueError):
    """Syntax or semantic parse failure with a source position."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.column = column


_NET_RE = re.compile(r"^[a-z0-9_]+$")
_INT_RE = re.compile(r"^[0-9]+$")


def _canon_net(token: str, line: int) -> str:
    net = token.lower()
    if net == "0":
        return "gnd"
    if not _NET_RE.match(net):
        raise NetlistParseError(f"bad net name {token!r}", line)
    return net


def _number(token: str, line: int) -> float:
    try:
        value, _ = parse_quantity(token)
    except QuantityError as err:
        raise NetlistParseError(str(err), line) from None
    return value


def _tokenize(line: str) -> list[str]:
    for ch in "(),":
        line = line.replace(ch, f" {ch} ")
    return line.split()


def _logical_lines(text: str):
    """Join ``+`` continuations; yield (first_line_number, content).

    Trailing ``;`` comments are stripped per physical line so a comment on
    the first line does not swallow its continuations.
    """
    pending: tuple[int, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip().startswith("*"):
            raw = raw.split(";", 1)[0]
        stripped = raw.strip()
        if stripped.startswith("+"):
            if pending is None:
                raise NetlistParseError("continuation with nothing to continue", lineno)
            pending = (pending[0], pending[1] + " " + stripped[1:])
            continue
        if pending is not None:
            yield pending
        pending = (lineno, raw)
    if pending is not None:
        yield pending


def _parse_keyed(tokens: list[str], i: int, line: int) -> tuple[str, object, int]:
    """Parse one ``key=value`` or ``key=`` ``( a , b )`` group at index i."""
    tok = tokens[i]
    if "=" not in tok:
        raise NetlistParseError(f"expected key=value parameter, got {tok!r}", line)
    key, _, rhs = tok.partition("=")
    key = key.lower()
    if rhs:
        return key, rhs, i + 1
    # parenthesized tuple form: key=( a , b )
    rest = tokens[i + 1:]
    if len(rest) >= 5 and rest[0] == "(" and rest[2] == "," and rest[4] == ")":
        return key, (rest[1], rest[3]), i + 6
    raise NetlistParseError(f"malformed value for parameter {key!r}", line)


def _parse_transistor(tokens, kind_name, line, params) -> DeviceInstance:
    kind = DeviceKind(kind_name)
    nets = tuple(_canon_net(t, line) for t in tokens[1:4])
    chirality = ChiralityVector(19, 0)
    tubes = 1
    width = 32e-9
    length = 32e-9
    i = 5
    seen = set()
    while i < len(tokens):
        key, value, i = _parse_keyed(tokens, i, line)
        if key in seen:
            raise NetlistParseError(f"repeated parameter {key!r}", line)
        seen.add(key)
        if kind in (DeviceKind.NCNFET, DeviceKind.PCNFET) and key == "chirality":
            if not (isinstance(value, tuple) and all(_INT_RE.match(v) for v in value)):
                raise NetlistParseError("chirality needs the form (n1,n2)", line)
            try:
                chirality = ChiralityVector(int(value[0]), int(value[1]))
            except ValueError as err:
                raise NetlistParseError(str(err), line) from None
        elif kind in (DeviceKind.NCNFET, DeviceKind.PCNFET) and key == "tubes":
            if not (isinstance(value, str) and _INT_RE.match(value)):
                raise NetlistParseError("tubes needs a positive integer", line)
            tubes = int(value)
        elif kind in (DeviceKind.NMOS, DeviceKind.PMOS) and key == "w":
            width = _number(value, line) if isinstance(value, str) else None
        elif kind in (DeviceKind.NMOS, DeviceKind.PMOS) and key == "l":
            length = _number(value, line) if isinstance(value, str) else None
        else:
            raise NetlistParseError(f"unknown parameter {key!r} for {kind_name}", line)
        if width is None or length is None:
            raise NetlistParseError(f"malformed value for parameter {key!r}", line)
    if kind in (DeviceKind.NCNFET, DeviceKind.PCNFET):
        polarity = "N" if kind is DeviceKind.NCNFET else "P"
        try:
            rating = DeviceRating.build(polarity, chirality, tubes=tubes, params=params)
        except ValueError as err:
            raise NetlistParseError(str(err), line) from None
        return DeviceInstance(tokens[0], kind, nets, rating=rating)
    if width <= 0 or length <= 0:
        raise NetlistParseError("MOS w and l must be positive", line)
    return DeviceInstance(tokens[0], kind, nets, width=width, length=length)


def _parse_vsrc(tokens, line) -> DeviceInstance:
    if len(tokens) < 6:
        raise NetlistParseError("VSRC needs: VSRC id plus minus dc|pwl ...", line)
    vid = tokens[1]
    nets = (_canon_net(tokens[2], line), _canon_net(tokens[3], line))
    mode = tokens[4].lower()
    if mode == "dc":
        if len(tokens) != 6:
            raise NetlistParseError("dc source takes exactly one value", line)
        return DeviceInstance(vid, DeviceKind.VSRC, nets, dc=_number(tokens[5], line))
    if mode == "pwl":
        body = tokens[5:]
        if len(body) < 2 or body[0] != "(" or body[-1] != ")":
            raise NetlistParseError("pwl needs a parenthesized t/v list", line)
        flat = [t for t in body[1:-1] if t != ","]
        if not flat or len(flat) % 2 != 0:
            raise NetlistParseError("pwl needs t0 v0 t1 v1 ... pairs", line)
        pairs = []
        for j in range(0, len(flat), 2):
            t = _number(flat[j], line)
            v = _number(flat[j + 1], line)
            if pairs and t < pairs[-1][0]:
                raise NetlistParseError("pwl times must not decrease", line)
            pairs.append((t, v))
        return DeviceInstance(vid, DeviceKind.VSRC, nets, pwl=tuple(pairs))
    raise NetlistParseError(f"unknown source mode {tokens[4]!r} (expected dc or pwl)", line)


def parse_netlist(text: str, params: CnfetModelParams | None = None) -> Netlist:
    """Parse netlist text; raises NetlistParseError with a line position.

    CNFET device ratings are derived while parsing using ``params``
    (packaged defaults when omitted).
    """
    params = params or default_params()
    name: str | None = None
    declared: int | None = None
    inputs: list[str] = []
    outputs: list[str] = []
    devices: list[DeviceInstance] = []
    ids_seen: set[str] = set()
    ended = False
    last_line = 1

    for line, content in _logical_lines(text):
        last_line = line
        stripped = content.strip()
        if not stripped:
            continue
        if stripped.startswith("*"):
            words = stripped[1:].split()
            if name is None and len(words) >= 2 and words[0].lower() == "cell":
                name = words[1]
            continue
        tokens = _tokenize(content)
        if not tokens:
            continue
        head = tokens[0].lower()
        if head.startswith("."):
            if head == ".end":
                ended = True
                break
            if head == ".inputs":
                inputs.extend(_canon_net(t, line) for t in tokens[1:])
            elif head == ".outputs":
                outputs.extend(_canon_net(t, line) for t in tokens[1:])
            elif head == ".transistors":
                if len(tokens) != 2 or not _INT_RE.match(tokens[1]):
                    raise NetlistParseError(".transistors needs one non-negative integer", line)
                declared = int(tokens[1])
            else:
                raise NetlistParseError(
                    f"unknown directive {tokens[0]!r} "
                    "(expected .inputs, .outputs, .transistors, .end)", line)
            continue
        if head == "vsrc":
            dev = _parse_vsrc(tokens, line)
        elif len(tokens) >= 5 and tokens[4].upper() in _TRANSISTOR_NAMES:
            dev = _parse_transistor(tokens, tokens[4].upper(), line, params)
        elif len(tokens) == 5 and tokens[3].upper() == "CAP":
            nets = (_canon_net(tokens[1], line), _canon_net(tokens[2], line))
            dev = DeviceInstance(tokens[0], DeviceKind.CAP, nets,
                                 capacitance=_number(tokens[4], line))
        elif len(tokens) == 4:
            # bare capacitor card: the farad-suffixed value marks the kind
            nets = (_canon_net(tokens[1], line), _canon_net(tokens[2], line))
            try:
                value, unit = parse_quantity(tokens[3])
            except QuantityError as err:
                raise NetlistParseError(str(err), line) from None
            if unit != "F":
                if tokens[3].upper() in _TRANSISTOR_NAMES:
                    raise NetlistParseError(
                        "transistor card needs drain gate source before the kind", line)
                raise NetlistParseError(
                    f"expected a capacitance with an F unit, got {tokens[3]!r}", line)
            dev = DeviceInstance(tokens[0], DeviceKind.CAP, nets, capacitance=value)
        else:
            if len(tokens) >= 5:
                raise NetlistParseError(
                    f"unknown device kind {tokens[4]!r} "
                    "(expected NCNFET, PCNFET, NMOS, PMOS, CAP)", line)
            raise NetlistParseError(
                "unrecognized card (expected a device, source, or directive)", line)
        key = dev.id.lower()
        if key in ids_seen:
            raise NetlistParseError(f"duplicate device id {dev.id!r}", line)
        ids_seen.add(key)
        devices.append(dev)

    if not ended:
        raise NetlistParseError("missing .end", max(last_line, 1))
    return Netlist(
        name=name if name is not None else "untitled",
        devices=tuple(devices),
        inputs=tuple(dict.fromkeys(inputs)),
        outputs=tuple(dict.fromkeys(outputs)),
        declared_count=declared,
    )


def _emit_device(d: DeviceInstance) -> str:
    if d.kind in (DeviceKind.NCNFET, DeviceKind.PCNFET):
        r = d.rating
        return (f"{d.id} {d.drain} {d.gate} {d.source} {d.kind.value} "
                f"chirality=({r.chirality.n1},{r.chirality.n2}) tubes={r.tubes}")
    if d.kind in (DeviceKind.NMOS, DeviceKind.PMOS):
        return (f"{d.id} {d.drain} {d.gate} {d.source} {d.kind.value} "
                f"w={format_quantity(d.width, 'm')} l={format_quantity(d.length, 'm')}")
    if d.kind is DeviceKind.CAP:
        return f"{d.id} {d.plus} {d.minus} CAP {format_quantity(d.capacitance, 'F')}"
    if d.dc is not None:
        return f"VSRC {d.id} {d.plus} {d.minus} dc {format_quantity(d.dc, 'V')}"
    body = " ".join(f"{repr(t)} {repr(v)}" for t, v in d.pwl)
    return f"VSRC {d.id} {d.plus} {d.minus} pwl ( {body} )"


def emit_netlist(n: Netlist) -> str:
    """Deterministic canonical text form; parse(emit(n)) == n structurally."""
    lines = [f"* cell {n.name}"]
    if n.declared_count is not None:
        lines.append(f".transistors {n.declared_count}")
    if n.inputs:
        lines.append(".inputs " + " ".join(n.inputs))
    if n.outputs:
        lines.append(".outputs " + " ".join(n.outputs))
    lines.extend(_emit_device(d) for d in n.devices)
    lines.append(".end")
    return "\n".join(lines) + "\n"


# --- validation ---

@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    subject: str = ""


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...]

    @property
    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "error")

    @property
    def warnings(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_netlist(n: Netlist) -> ValidationReport:
    """Structural lint: report-style, never raises.

    Errors mark circuits the analyzers cannot trust (floating gates,
    unusable parameters); warnings mark suspicious but simulatable shapes
    (dangling nets, declared-count drift).
    """
    diags: list[Diagnostic] = []
    ports = set(n.inputs) | set(n.outputs)
    rails = {"vdd", "gnd"}

    touches: dict[str, int] = {}
    driven: set[str] = set()   # touched by any non-gate terminal
    gate_nets: list[tuple[str, str]] = []  # (net, device id)
    for d in n.devices:
        if d.is_transistor:
            for role, net in zip(("drain", "gate", "source"), d.terminals):
                touches[net] = touches.get(net, 0) + 1
                if role == "gate":
                    gate_nets.append((net, d.id))
                else:
                    driven.add(net)
        else:
            for net in d.terminals:
                touches[net] = touches.get(net, 0) + 1
                driven.add(net)

    for net, count in touches.items():
        if count == 1 and net not in ports and net not in rails:
            diags.append(Diagnostic(
                "warning", "dangling-net",
                f"net '{net}' is touched by exactly one terminal and is not a port",
                net))

    if any(d.is_transistor for d in n.devices) and not (rails & set(touches)):
        diags.append(Diagnostic(
            "warning", "missing-rail",
            "transistors present but neither vdd nor gnd appears anywhere"))

    actual = n.transistor_count
    if n.declared_count is not None and n.declared_count != actual:
        diags.append(Diagnostic(
            "warning", "count-mismatch",
            f"declared transistor count {n.declared_count} but netlist has {actual}"))

    reported_gates = set()
    for net, dev_id in gate_nets:
        if net in ports or net in rails or net in driven or net in reported_gates:
            continue
        reported_gates.add(net)
        diags.append(Diagnostic(
            "error", "floating-gate",
            f"gate net '{net}' of {dev_id} is driven by nothing and is not a port",
            net))

    for d in n.devices:
        if d.kind is DeviceKind.CAP and not d.capacitance > 0:
            diags.append(Diagnostic(
                "error", "invalid-parameter",
                f"capacitor {d.id} must have capacitance > 0, got {d.capacitance}",
                d.id))

    for net in n.outputs:
        if net not in touches:
            diags.append(Diagnostic(
                "error", "unconnected-output",
                f"output port '{net}' touches no device terminal", net))

    # zero-resistance classes: nets tied together by 0 V dc sources
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for d in n.devices:
        if d.kind is DeviceKind.VSRC and d.dc == 0.0:
            parent[find(d.plus)] = find(d.minus)
    if "vdd" in parent and "gnd" in parent and find("vdd") == find("gnd"):
        shorted = {net for net in touches if find(net) == find("vdd")}
        for net, dev_id in gate_nets:
            if net in shorted:
                diags.append(Diagnostic(
                    "error", "gate-rail-short",
                    f"gate net '{net}' of {dev_id} sits on a zero-resistance "
                    "path joining vdd and gnd", net))
                break

    return ValidationReport(tuple(diags))


# --- shared transistor model dispatch ---

def transistor_polarity(d: DeviceInstance) -> str:
    if d.kind in (DeviceKind.NCNFET, DeviceKind.NMOS):
        return "N"
    if d.kind in (DeviceKind.PCNFET, DeviceKind.PMOS):
        return "P"
    raise ValueError(f"{d.id} is not a transistor")


def transistor_vth(d: DeviceInstance) -> float:
    """Threshold magnitude used by both static and transient analysis."""
    if d.kind in (DeviceKind.NCNFET, DeviceKind.PCNFET):
        return d.rating.vth
    if d.kind in (DeviceKind.NMOS, DeviceKind.PMOS):
        return MOS_VTH
    raise ValueError(f"{d.id} is not a transistor")


def transistor_coefficients(d: DeviceInstance, params: CnfetModelParams,
                            temp_c: float = 25.0) -> tuple[int, float, float, float]:
    """(sign, vth, k_eff, i_off_eff) for any transistor kind.

    sign is +1 for N, -1 for P; applying the channel equation in the
    sign-flipped frame reproduces transistor_iv (enforced by test).
    """
    sign = 1 if transistor_polarity(d) == "N" else -1
    tfac = ((273.15 + temp_c) / 298.15) ** (-params.temp_exp)
    if d.kind in (DeviceKind.NCNFET, DeviceKind.PCNFET):
        return (sign, d.rating.vth, params.k_drive * d.rating.tubes * tfac,
                params.I_off * d.rating.tubes)
    mobility = 1.0 if d.kind is DeviceKind.NMOS else 0.5
    return (sign, MOS_VTH,
            params.k_drive * mobility * (d.width / d.length) * tfac,
            params.I_off)


def transistor_iv(d: DeviceInstance, params: CnfetModelParams,
                  vgs: float, vds: float, temp_c: float = 25.0) -> float:
    """Drain current of any transistor kind at the given bias."""
    if d.kind in (DeviceKind.NCNFET, DeviceKind.PCNFET):
        return drain_current(d.rating, params, vgs=vgs, vds=vds, temp_c=temp_c)
    if not (math.isfinite(vgs) and math.isfinite(vds)):
        raise ValueError(f"non-finite bias vgs={vgs} vds={vds}")
    # bulk MOS: same channel shape; P mobility half, so 2:1 widths equalize
    mobility = 1.0 if d.kind is DeviceKind.NMOS else 0.5
    t_k = 273.15 + temp_c
    k = params.k_drive * mobility * (d.width / d.length) * (t_k / 298.15) ** (-params.temp_exp)
    vt = thermal_voltage(temp_c)
    if d.kind is DeviceKind.NMOS:
        return channel_current(vgs, vds, vth=MOS_VTH, k=k, lam=params.lambda_clm,
                               i_off=params.I_off, n_sub=params.n_sub, vt=vt)
    return -channel_current(-vgs, -vds, vth=MOS_VTH, k=k, lam=params.lambda_clm,
                            i_off=params.I_off, n_sub=params.n_sub, vt=vt)
