"""Full-adder cell builders and their boolean oracles.

Five pass-transistor CNFET cells (an XOR module, two nine-device adders,
a ten-device full-swing adder, an eight-plus-ten split adder) plus two
classical references built from bulk MOS devices.  Builders are pure; the
returned netlists carry the published transistor count as metadata even
where the faithful reconstruction differs (validation downgrades that to
a warning).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .device import ChiralityVector, CnfetModelParams, DeviceRating, default_params
from .netlist import DeviceInstance, DeviceKind, Netlist

__all__ = [
    "DiameterPolicy",
    "CellSpec",
    "CELL_NAMES",
    "CELL_SPECS",
    "full_adder_truth",
    "majority3",
    "xor2",
    "build_xor_module",
    "build_cn9p4g",
    "build_cn9p8gbuff",
    "build_cn10pfs",
    "build_cn8p10g",
    "build_ccmos",
    "build_tgcmos",
    "build_cell",
    "apply_policy",
]


def _bit(x) -> int:
    if x not in (0, 1):
        raise ValueError(f"expected a bit, got {x!r}")
    return int(x)


def full_adder_truth(a, b, c) -> tuple[int, int]:
    """(sum, carry-out) of one-bit addition."""
    a, b, c = _bit(a), _bit(b), _bit(c)
    s = a ^ b ^ c
    cout = (a & b) | (c & (a ^ b))
    return s, cout


def majority3(a, b, c) -> int:
    """1 iff at least two inputs are 1; equals the adder's carry."""
    a, b, c = _bit(a), _bit(b), _bit(c)
    return (a & b) | (a & c) | (b & c)


def xor2(a, b) -> int:
    return _bit(a) ^ _bit(b)


@dataclass(frozen=True)
class DiameterPolicy:
    """Chirality assignment for the CNFET devices of a cell.

    ``overrides`` maps device ids to chirality; everything else gets
    ``default``.  ``tubes`` applies uniformly.
    """

    default: ChiralityVector = ChiralityVector(55, 0)
    tubes: int = 1
    overrides: tuple[tuple[str, ChiralityVector], ...] = ()

    def chirality_for(self, device_id: str) -> ChiralityVector:
        for dev, c in self.overrides:
            if dev == device_id:
                return c
        return self.default


@dataclass(frozen=True)
class CellSpec:
    name: str
    declared_count: int
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    uses_cnfet: bool


CELL_SPECS: dict[str, CellSpec] = {
    spec.name: spec
    for spec in (
        CellSpec("XOR_MODULE", 4, ("a", "b"), ("out",), True),
        CellSpec("CN9P4G", 13, ("a", "b", "c"), ("sum", "cout"), True),
        CellSpec("CN9P8GBUFF", 17, ("a", "b", "c"), ("sum", "cout"), True),
        CellSpec("CN10PFS", 10, ("a", "b", "c"), ("sum", "cout"), True),
        CellSpec("CN8P10G", 18, ("a", "b", "c"), ("sum", "cout"), True),
        CellSpec("CCMOS", 28, ("a", "b", "c"), ("sum", "cout"), False),
        CellSpec("TGCMOS", 20, ("a", "b", "c"), ("sum", "cout"), False),
    )
}

CELL_NAMES: tuple[str, ...] = tuple(CELL_SPECS)


class _CnfetMaker:
    def __init__(self, policy: DiameterPolicy, params: CnfetModelParams):
        self.policy = policy
        self.params = params
        self.devices: list[DeviceInstance] = []

    def t(self, dev_id: str, polarity: str, drain: str, gate: str, source: str):
        kind = DeviceKind.NCNFET if polarity == "N" else DeviceKind.PCNFET
        rating = DeviceRating.build(
            polarity, self.policy.chirality_for(dev_id),
            tubes=self.policy.tubes, params=self.params)
        self.devices.append(DeviceInstance(
            dev_id, kind, (drain, gate, source), rating=rating))


def _xor_stage(mk: _CnfetMaker, prefix: str, a: str, b: str, out: str, mid: str):
    """Four-device XOR: two cross-coupled pass devices plus a pull-down pair.

    Pass side covers the 00/01/10 patterns (each input's device hands the
    other input through when its own gate is low); the series pull-down
    grounds the output for 11.  No inverted inputs anywhere.
    """
    mk.t(prefix + "P1", "P", out, a, b)
    mk.t(prefix + "P2", "P", out, b, a)
    mk.t(prefix + "N1", "N", out, a, mid)
    mk.t(prefix + "N2", "N", mid, b, "gnd")


def _sum_stages(mk: _CnfetMaker):
    """Cascade of two XOR stages: a^b on net xab, then (a^b)^c on sum."""
    _xor_stage(mk, "X1", "a", "b", "xab", "m1")
    _xor_stage(mk, "X2", "c", "xab", "sum", "m2")


def build_xor_module(a_net: str = "a", b_net: str = "b", out_net: str = "out",
                     policy: DiameterPolicy | None = None,
                     params: CnfetModelParams | None = None) -> Netlist:
    policy = policy or DiameterPolicy()
    mk = _CnfetMaker(policy, params or default_params())
    mid = out_net + "_m"
    mk.t("XP1", "P", out_net, a_net, b_net)
    mk.t("XP2", "P", out_net, b_net, a_net)
    mk.t("XN1", "N", out_net, a_net, mid)
    mk.t("XN2", "N", mid, b_net, "gnd")
    return Netlist("XOR_MODULE", tuple(mk.devices), (a_net, b_net), (out_net,),
                   declared_count=4)


def _cn9p4g_devices(policy: DiameterPolicy, params: CnfetModelParams,
                    cout: str) -> tuple[DeviceInstance, ...]:
    mk = _CnfetMaker(policy, params)
    _sum_stages(mk)
    # carry stage: transmission gate hands C through when a^b is high.
    # The P half is controlled from the second XOR stage's internal node,
    # which carries the complement of xab whenever it matters (it floats
    # only when the gate is off anyway).
    mk.t("TGN", "N", cout, "xab", "c")
    mk.t("TGP", "P", cout, "m2", "c")
    # a^b low means A = B: a series N pair sources a 1 from vdd when both
    # are high, a series P pair sinks a 0 to gnd when both are low
    mk.t("CN1", "N", cout, "a", "nmid")
    mk.t("CN2", "N", "nmid", "b", "vdd")
    mk.t("CP1", "P", cout, "a", "pmid")
    mk.t("CP2", "P", "pmid", "b", "gnd")
    return tuple(mk.devices)


def build_cn9p4g(policy: DiameterPolicy | None = None,
                 params: CnfetModelParams | None = None) -> Netlist:
    policy = policy or DiameterPolicy()
    devices = _cn9p4g_devices(policy, params or default_params(), "cout")
    return Netlist("CN9P4G", devices, ("a", "b", "c"), ("sum", "cout"),
                   declared_count=13)


def build_cn9p8gbuff(policy: DiameterPolicy | None = None,
                     params: CnfetModelParams | None = None) -> Netlist:
    policy = policy or DiameterPolicy()
    params = params or default_params()
    mk = _CnfetMaker(policy, params)
    mk.devices.extend(_cn9p4g_devices(policy, params, "coutw"))
    # two-inverter buffer restores the weak carry levels to the rails
    mk.t("B1P", "P", "coutb", "coutw", "vdd")
    mk.t("B1N", "N", "coutb", "coutw", "gnd")
    mk.t("B2P", "P", "cout", "coutb", "vdd")
    mk.t("B2N", "N", "cout", "coutb", "gnd")
    return Netlist("CN9P8GBUFF", tuple(mk.devices), ("a", "b", "c"),
                   ("sum", "cout"), declared_count=17)


def build_cn10pfs(policy: DiameterPolicy | None = None,
                  params: CnfetModelParams | None = None) -> Netlist:
    policy = policy or DiameterPolicy()
    mk = _CnfetMaker(policy, params or default_params())
    _sum_stages(mk)
    # carry = xab ? C : A, two pass devices sharing the xab control
    mk.t("FN", "N", "cout", "xab", "c")
    mk.t("FP", "P", "cout", "xab", "a")
    return Netlist("CN10PFS", tuple(mk.devices), ("a", "b", "c"),
                   ("sum", "cout"), declared_count=10)


def build_cn8p10g(policy: DiameterPolicy | None = None,
                  params: CnfetModelParams | None = None) -> Netlist:
    policy = policy or DiameterPolicy()
    mk = _CnfetMaker(policy, params or default_params())
    _sum_stages(mk)
    # independent majority module with swapped rails: the N bridge sources
    # vdd when at least two inputs are high, the P bridge sinks gnd when at
    # least two are low.  Bridge device C joins the two ladder midpoints.
    mk.t("GN1", "N", "cout", "a", "nm1")
    mk.t("GN2", "N", "nm1", "b", "vdd")
    mk.t("GN3", "N", "cout", "b", "nm2")
    mk.t("GN4", "N", "nm2", "a", "vdd")
    mk.t("GN5", "N", "nm1", "c", "nm2")
    mk.t("GP1", "P", "cout", "a", "pm1")
    mk.t("GP2", "P", "pm1", "b", "gnd")
    mk.t("GP3", "P", "cout", "b", "pm2")
    mk.t("GP4", "P", "pm2", "a", "gnd")
    mk.t("GP5", "P", "pm1", "c", "pm2")
    return Netlist("CN8P10G", tuple(mk.devices), ("a", "b", "c"),
                   ("sum", "cout"), declared_count=18)


# --- bulk MOS references ---

_MOS_L = 32e-9
_MOS_WN = 32e-9
_MOS_WP = 64e-9  # 2:1 over N, the usual drive-balancing ratio


def _mos(dev_id: str, kind: DeviceKind, drain: str, gate: str, source: str):
    width = _MOS_WP if kind is DeviceKind.PMOS else _MOS_WN
    return DeviceInstance(dev_id, kind, (drain, gate, source),
                          width=width, length=_MOS_L)


def build_ccmos() -> Netlist:
    """Static complementary mirror adder, 28 devices.

    Carry-bar stage, sum-bar stage reusing carry-bar, two inverters.
    """
    N, P = DeviceKind.NMOS, DeviceKind.PMOS
    d = []
    # carry-bar: pull-up (a||b) in series with c, in parallel with a.b
    d += [_mos("CP1", P, "cx", "a", "vdd"), _mos("CP2", P, "cx", "b", "vdd"),
          _mos("CP3", P, "coutb", "c", "cx"),
          _mos("CP4", P, "cy", "a", "vdd"), _mos("CP5", P, "coutb", "b", "cy")]
    # mirrored pull-down
    d += [_mos("CN1", N, "cz", "a", "gnd"), _mos("CN2", N, "cz", "b", "gnd"),
          _mos("CN3", N, "coutb", "c", "cz"),
          _mos("CN4", N, "cw", "a", "gnd"), _mos("CN5", N, "coutb", "b", "cw")]
    # sum-bar: a.b.c chain in parallel with coutb.(a+b+c)
    d += [_mos("SP1", P, "s1", "a", "vdd"), _mos("SP2", P, "s2", "b", "s1"),
          _mos("SP3", P, "sumb", "c", "s2"),
          _mos("SP4", P, "s3", "coutb", "vdd"),
          _mos("SP5", P, "sumb", "a", "s3"), _mos("SP6", P, "sumb", "b", "s3"),
          _mos("SP7", P, "sumb", "c", "s3")]
    d += [_mos("SN1", N, "t1", "a", "gnd"), _mos("SN2", N, "t2", "b", "t1"),
          _mos("SN3", N, "sumb", "c", "t2"),
          _mos("SN4", N, "t3", "coutb", "gnd"),
          _mos("SN5", N, "sumb", "a", "t3"), _mos("SN6", N, "sumb", "b", "t3"),
          _mos("SN7", N, "sumb", "c", "t3")]
    # output inverters
    d += [_mos("IV1P", P, "cout", "coutb", "vdd"), _mos("IV1N", N, "cout", "coutb", "gnd"),
          _mos("IV2P", P, "sum", "sumb", "vdd"), _mos("IV2N", N, "sum", "sumb", "gnd")]
    return Netlist("CCMOS", tuple(d), ("a", "b", "c"), ("sum", "cout"),
                   declared_count=28)


def build_tgcmos() -> Netlist:
    """Transmission-gate adder, 20 devices: 3 input inverters, an XOR built
    from two gates, its inverter, and two 2:1 selectors for sum and carry."""
    N, P = DeviceKind.NMOS, DeviceKind.PMOS
    d = []
    for name, src, out in (("A", "a", "ab"), ("B", "b", "bb"), ("C", "c", "cb")):
        d += [_mos(f"I{name}P", P, out, src, "vdd"), _mos(f"I{name}N", N, out, src, "gnd")]
    # xab = a^b: b-bar through when a high, b through when a low
    d += [_mos("T3N", N, "xab", "a", "bb"), _mos("T3P", P, "xab", "ab", "bb"),
          _mos("T4N", N, "xab", "ab", "b"), _mos("T4P", P, "xab", "a", "b")]
    d += [_mos("IXP", P, "xnab", "xab", "vdd"), _mos("IXN", N, "xnab", "xab", "gnd")]
    # sum = c ? xnab : xab
    d += [_mos("T5N", N, "sum", "cb", "xab"), _mos("T5P", P, "sum", "c", "xab"),
          _mos("T6N", N, "sum", "c", "xnab"), _mos("T6P", P, "sum", "cb", "xnab")]
    # cout = xab ? c : a
    d += [_mos("T7N", N, "cout", "xab", "c"), _mos("T7P", P, "cout", "xnab", "c"),
          _mos("T8N", N, "cout", "xnab", "a"), _mos("T8P", P, "cout", "xab", "a")]
    return Netlist("TGCMOS", tuple(d), ("a", "b", "c"), ("sum", "cout"),
                   declared_count=20)


_BUILDERS = {
    "XOR_MODULE": lambda policy, params: build_xor_module(policy=policy, params=params),
    "CN9P4G": build_cn9p4g,
    "CN9P8GBUFF": build_cn9p8gbuff,
    "CN10PFS": build_cn10pfs,
    "CN8P10G": build_cn8p10g,
    "CCMOS": lambda policy, params: build_ccmos(),
    "TGCMOS": lambda policy, params: build_tgcmos(),
}


def build_cell(name: str, policy: DiameterPolicy | None = None,
               params: CnfetModelParams | None = None) -> Netlist:
    """Build any library cell by name; policy applies to CNFET cells only."""
    key = name.upper()
    if key not in _BUILDERS:
        raise ValueError(f"unknown cell {name!r} (have: {', '.join(CELL_NAMES)})")
    return _BUILDERS[key](policy, params)


def apply_policy(n: Netlist, policy: DiameterPolicy,
                 params: CnfetModelParams | None = None) -> Netlist:
    """Re-rate a netlist's CNFET devices under a different chirality policy.

    Topology is untouched; MOS devices pass through unchanged.
    """
    params = params if params is not None else default_params()
    devices = []
    for d in n.devices:
        if d.kind is DeviceKind.NCNFET or d.kind is DeviceKind.PCNFET:
            polarity = "N" if d.kind is DeviceKind.NCNFET else "P"
            rating = DeviceRating.build(
                polarity, policy.chirality_for(d.id),
                tubes=policy.tubes, params=params)
            devices.append(replace(d, rating=rating))
        else:
            devices.append(d)
    return Netlist(n.name, tuple(devices), n.inputs, n.outputs,
                   declared_count=n.declared_count)
