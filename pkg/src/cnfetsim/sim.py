"""Time-domain circuit solver and cell characterization.

Nodal formulation with source branch currents as extra unknowns, damped
Newton per step, backward-Euler or trapezoidal companion models for
capacitors.  Dense linear algebra throughout: the cells here are a few
dozen nodes at most.  A small conductance from every node to ground and
an automatic node capacitance keep otherwise-floating internal nets both
solvable and physically plausible (they drift, they do not teleport).
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .device import CnfetModelParams, default_params, thermal_voltage
from .netlist import (
    DeviceInstance,
    DeviceKind,
    Netlist,
    transistor_coefficients,
)

__all__ = [
    "SimConfig",
    "Waveform",
    "DcSolution",
    "TransitionDelay",
    "Measurement",
    "SimError",
    "SingularSystemError",
    "DcConvergenceError",
    "StepCollapseError",
    "dc_operating_point",
    "transient",
    "measure",
    "transition_sequence",
    "cell_fixture",
]

_GMIN = 1e-12          # S, node-to-ground anchor
_C_NODE = 5e-17        # F, automatic capacitance on every node
_V_LIMIT = 2.0         # V, per-iteration Newton update clamp
_DERIV_H = 1e-6        # V, central-difference step for conductances
_RAMP = 1e-12          # s, stimulus edge time
_FINE_WINDOW = 5e-10   # s, densely stepped span after each input edge
_DT_FINE = 2e-12       # s, step cap inside that span


class SimError(RuntimeError):
    pass


class SingularSystemError(SimError):
    def __init__(self, nets):
        self.nets = tuple(sorted(nets))
        super().__init__(
            "singular system: nets carry no current path: "
            + ", ".join(self.nets))


class DcConvergenceError(SimError):
    def __init__(self, node: str, residual: float):
        self.node = node
        self.residual = residual
        super().__init__(
            f"DC Newton did not converge; worst node {node!r} "
            f"residual {residual:.3e} A")


class StepCollapseError(SimError):
    def __init__(self, time: float):
        self.time = time
        super().__init__(f"time step collapsed below dt_min at t={time:.6e} s")


_INTEGRATIONS = ("backward-euler", "trapezoidal")


@dataclass(frozen=True)
class SimConfig:
    t_stop: float
    dt_init: float = 1e-12
    dt_min: float = 1e-16
    dt_max: float = 100e-12
    newton_tol: float = 1e-9
    newton_max_iters: int = 60
    temperature: float = 25.0
    vdd: float = 0.65
    integration: str = "trapezoidal"

    def __post_init__(self):
        if not self.t_stop > 0.0:
            raise ValueError(f"t_stop must be positive, got {self.t_stop}")
        if not 0.0 < self.dt_min <= self.dt_init <= self.dt_max < self.t_stop:
            raise ValueError(
                "need 0 < dt_min <= dt_init <= dt_max < t_stop, got "
                f"{self.dt_min} / {self.dt_init} / {self.dt_max} / {self.t_stop}")
        if not self.newton_tol > 0.0:
            raise ValueError(f"newton_tol must be positive, got {self.newton_tol}")
        if self.newton_max_iters < 1:
            raise ValueError("newton_max_iters must be at least 1")
        if self.integration not in _INTEGRATIONS:
            raise ValueError(
                f"integration must be one of {_INTEGRATIONS}, got {self.integration!r}")


@dataclass(frozen=True)
class Waveform:
    times: tuple
    nets: dict
    supply_current: tuple

    def __post_init__(self):
        n = len(self.times)
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if len(self.supply_current) != n:
            raise ValueError("supply_current length mismatch")
        for net, vals in self.nets.items():
            if len(vals) != n:
                raise ValueError(f"net {net!r} length mismatch")

    def value_at(self, net: str, t: float) -> float:
        return float(np.interp(t, self.times, self.nets[net]))


@dataclass(frozen=True)
class DcSolution:
    voltages: dict
    residual: float
    iterations: int
    source_currents: dict


def _bank_channel(vgs, vds, vth, k, i_off, lam, n_sub, vt):
    """Array form of the scalar channel equation, branch for branch.

    Negative vds lanes run in the swapped frame exactly like the scalar
    recursion, so results agree bitwise with channel_current.
    """
    vgs = np.asarray(vgs, dtype=float)
    vds = np.asarray(vds, dtype=float)
    swap = vds < 0.0
    vgs_e = np.where(swap, vgs - vds, vgs)
    vds_e = np.where(swap, -vds, vds)
    vov = vgs_e - vth
    sat = -np.expm1(-vds_e / vt)
    # exponent clamped above at 0: those lanes use the square-law branch
    sub_arg = np.minimum(np.maximum(vov, -60.0 * n_sub * vt), 0.0)
    i_sub = i_off * np.exp(sub_arg / (n_sub * vt)) * sat
    vde = np.minimum(vds_e, vov)
    i_sq = k * (vov * vde - 0.5 * vde * vde) * (1.0 + lam * vds_e)
    out = np.where(vov > 0.0, i_sq + i_off * sat, i_sub)
    return np.where(swap, -out, out)


class _Circuit:
    """Netlist compiled to index arrays for vectorized assembly."""

    def __init__(self, n: Netlist, params: CnfetModelParams,
                 temperature: float, stimulus=None):
        self.netlist = n
        names = [net for net in n.nets() if net != "gnd"]
        self.node_names = names
        self.nn = nn = len(names)
        index = {net: i for i, net in enumerate(names)}
        gnd = nn  # extra slot pinned to 0 V

        def ix(net):
            return index.get(net, gnd)

        transistors = n.transistors()
        caps = [d for d in n.devices if d.kind is DeviceKind.CAP]
        sources = [d for d in n.devices if d.kind is DeviceKind.VSRC]

        touched = set()
        for d in transistors:
            touched.add(d.drain)
            touched.add(d.source)
        for d in caps + sources:
            touched.update(d.terminals)
        floating = [net for net in names if net not in touched]
        if floating:
            raise SingularSystemError(floating)

        self.ns = ns = len(sources)
        self.nu = nu = nn + ns
        self.lam = params.lambda_clm
        self.n_sub = params.n_sub
        self.vt = thermal_voltage(temperature)

        sign, vth, keff, ioff = [], [], [], []
        for d in transistors:
            s, v, k, i0 = transistor_coefficients(d, params, temperature)
            sign.append(float(s))
            vth.append(v)
            keff.append(k)
            ioff.append(i0)
        self.t_sign = np.array(sign)
        self.t_vth = np.array(vth)
        self.t_keff = np.array(keff)
        self.t_ioff = np.array(ioff)
        self.ti_d = np.array([ix(d.drain) for d in transistors], dtype=np.intp)
        self.ti_g = np.array([ix(d.gate) for d in transistors], dtype=np.intp)
        self.ti_s = np.array([ix(d.source) for d in transistors], dtype=np.intp)
        self._md = self.ti_d < nn
        self._ms = self.ti_s < nn

        cp, cm, cv = [], [], []
        for d in caps:
            cp.append(ix(d.plus))
            cm.append(ix(d.minus))
            cv.append(d.capacitance)
        for i in range(nn):  # automatic node capacitance to ground
            cp.append(i)
            cm.append(gnd)
            cv.append(_C_NODE)
        self.ci_p = np.array(cp, dtype=np.intp)
        self.ci_m = np.array(cm, dtype=np.intp)
        self.c_val = np.array(cv)
        self._cp_mask = self.ci_p < nn
        self._cm_mask = self.ci_m < nn

        stim = dict(stimulus or {})
        self.sources = sources
        self.source_ids = [d.id for d in sources]
        self.si_p = np.array([ix(d.plus) for d in sources], dtype=np.intp)
        self.si_m = np.array([ix(d.minus) for d in sources], dtype=np.intp)
        self._sp_mask = self.si_p < nn
        self._sm_mask = self.si_m < nn
        self._src_dc = []
        self._src_knots = []
        for d in sources:
            spec = stim.pop(d.id, None)
            if spec is None:
                dc, pwl = d.dc, d.pwl
            elif isinstance(spec, (int, float)):
                dc, pwl = float(spec), None
            else:
                dc, pwl = None, tuple((float(t), float(v)) for t, v in spec)
            if pwl is not None:
                tp = np.array([t for t, _ in pwl])
                vp = np.array([v for _, v in pwl])
                self._src_dc.append(None)
                self._src_knots.append((tp, vp))
            else:
                self._src_dc.append(0.0 if dc is None else float(dc))
                self._src_knots.append(None)
        if stim:
            raise ValueError(f"stimulus names unknown sources: {sorted(stim)}")

        # Jacobian scaffold: gmin diagonal plus the constant source rows
        template = np.zeros((nu, nu))
        for i in range(nn):
            template[i, i] = _GMIN
        for j in range(ns):
            row = nn + j
            p, m = self.si_p[j], self.si_m[j]
            if p < nn:
                template[row, p] = 1.0
                template[p, row] += 1.0
            if m < nn:
                template[row, m] = -1.0
                template[m, row] -= 1.0
        self._template = template
        self._J = np.empty_like(template)
        self._F = np.empty(nu)
        self._vx = np.empty(nn + 1)

        def entry(rows, cols):
            keep = (rows < nn) & (cols < nn)
            return (rows[keep] * nu + cols[keep]).astype(np.intp), keep

        d_, g_, s_ = self.ti_d, self.ti_g, self.ti_s
        self._t_entries = [
            (*entry(d_, g_), "gm", 1.0),
            (*entry(d_, d_), "gds", 1.0),
            (*entry(d_, s_), "gsum", -1.0),
            (*entry(s_, g_), "gm", -1.0),
            (*entry(s_, d_), "gds", -1.0),
            (*entry(s_, s_), "gsum", 1.0),
        ]
        self._c_entries = [
            (*entry(self.ci_p, self.ci_p), 1.0),
            (*entry(self.ci_p, self.ci_m), -1.0),
            (*entry(self.ci_m, self.ci_p), -1.0),
            (*entry(self.ci_m, self.ci_m), 1.0),
        ]

    def source_values(self, t: float) -> np.ndarray:
        out = np.empty(self.ns)
        for j in range(self.ns):
            knots = self._src_knots[j]
            if knots is None:
                out[j] = self._src_dc[j]
            else:
                out[j] = np.interp(t, knots[0], knots[1])
        return out

    def breakpoints(self, t_stop: float, refine, merge_tol: float = 0.0) -> list:
        pts = {t_stop}
        for knots in self._src_knots:
            if knots is not None:
                for tk in knots[0]:
                    if 0.0 < tk < t_stop:
                        pts.add(float(tk))
        for a, b, _ in refine:
            for tk in (a, b):
                if 0.0 < tk < t_stop:
                    pts.add(float(tk))
        # Marks computed through different float paths (i*h vs sum of h)
        # land ulps apart; gaps below merge_tol are one instant, and the
        # stepper could not separate them anyway.  Keep the latest so the
        # final entry stays t_stop.
        out: list = []
        for tk in sorted(pts):
            if out and tk - out[-1] <= merge_tol:
                out[-1] = tk
            else:
                out.append(tk)
        return out

    def _device_currents(self, vx):
        vg = vx[self.ti_g]
        vs = vx[self.ti_s]
        vd = vx[self.ti_d]
        s = self.t_sign
        return s * _bank_channel(s * (vg - vs), s * (vd - vs), self.t_vth,
                                 self.t_keff, self.t_ioff,
                                 self.lam, self.n_sub, self.vt)

    def residual(self, x, sv, gc_fac, cap_rhs) -> np.ndarray:
        nn = self.nn
        vx = self._vx
        vx[:nn] = x[:nn]
        vx[nn] = 0.0
        F = self._F
        F.fill(0.0)
        F[:nn] = _GMIN * x[:nn]
        i_t = self._device_currents(vx)
        np.add.at(F, self.ti_d[self._md], i_t[self._md])
        np.subtract.at(F, self.ti_s[self._ms], i_t[self._ms])
        if gc_fac != 0.0:
            i_c = gc_fac * self.c_val * (vx[self.ci_p] - vx[self.ci_m]) - cap_rhs
            np.add.at(F, self.ci_p[self._cp_mask], i_c[self._cp_mask])
            np.subtract.at(F, self.ci_m[self._cm_mask], i_c[self._cm_mask])
        if self.ns:
            i_s = x[nn:]
            np.add.at(F, self.si_p[self._sp_mask], i_s[self._sp_mask])
            np.subtract.at(F, self.si_m[self._sm_mask], i_s[self._sm_mask])
            F[nn:] = (vx[self.si_p] - vx[self.si_m]) - sv
        return F

    def jacobian(self, x, gc_fac) -> np.ndarray:
        nn = self.nn
        vx = self._vx
        vx[:nn] = x[:nn]
        vx[nn] = 0.0
        J = self._J
        J[:] = self._template
        flat = J.ravel()

        vg = vx[self.ti_g]
        vs = vx[self.ti_s]
        vd = vx[self.ti_d]
        s = self.t_sign
        vgs = vg - vs
        vds = vd - vs

        def cur(a, b):
            return s * _bank_channel(s * a, s * b, self.t_vth, self.t_keff,
                                     self.t_ioff, self.lam, self.n_sub, self.vt)

        h = _DERIV_H
        gm = (cur(vgs + h, vds) - cur(vgs - h, vds)) / (2.0 * h)
        gds = (cur(vgs, vds + h) - cur(vgs, vds - h)) / (2.0 * h)
        coefs = {"gm": gm, "gds": gds, "gsum": gm + gds}
        for idx, keep, name, sgn in self._t_entries:
            np.add.at(flat, idx, sgn * coefs[name][keep])
        if gc_fac != 0.0:
            gc = gc_fac * self.c_val
            for idx, keep, sgn in self._c_entries:
                np.add.at(flat, idx, sgn * gc[keep])
        return J

    def cap_vpm(self, x) -> np.ndarray:
        vx = self._vx
        vx[:self.nn] = x[:self.nn]
        vx[self.nn] = 0.0
        return vx[self.ci_p] - vx[self.ci_m]


def _newton(ckt: _Circuit, x0, sv, cfg: SimConfig, gc_fac, cap_rhs):
    x = x0.copy()
    nn = ckt.nn
    rk = math.inf
    for it in range(cfg.newton_max_iters + 1):
        F = ckt.residual(x, sv, gc_fac, cap_rhs)
        if not np.isfinite(F).all():
            return x, False, it, math.inf
        rk = float(np.abs(F[:nn]).max()) if nn else 0.0
        rs = float(np.abs(F[nn:]).max()) if ckt.ns else 0.0
        if rk <= cfg.newton_tol and rs <= cfg.newton_tol:
            return x, True, it, rk
        if it == cfg.newton_max_iters:
            break
        J = ckt.jacobian(x, gc_fac)
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return x, False, it, rk
        if not np.isfinite(dx).all():
            return x, False, it, rk
        np.clip(dx[:nn], -_V_LIMIT, _V_LIMIT, out=dx[:nn])
        x += dx
    return x, False, cfg.newton_max_iters, rk


_NO_CAP_RHS = np.zeros(0)


def _solve_dc(ckt: _Circuit, cfg: SimConfig):
    sv = ckt.source_values(0.0)
    x = np.zeros(ckt.nu)
    x, ok, iters, res = _newton(ckt, x, sv, cfg, 0.0, _NO_CAP_RHS)
    if ok:
        return x, res, iters
    # source stepping: ramp every source up from zero, reusing the last
    # solution as the starting point
    for stages in (10, 40):
        x = np.zeros(ckt.nu)
        total = 0
        ok = True
        for alpha in np.linspace(1.0 / stages, 1.0, stages):
            x, ok, iters, res = _newton(ckt, x, alpha * sv, cfg, 0.0, _NO_CAP_RHS)
            total += iters
            if not ok:
                break
        if ok:
            return x, res, total
    F = ckt.residual(x, sv, 0.0, _NO_CAP_RHS)
    worst = int(np.abs(F[:ckt.nn]).argmax()) if ckt.nn else 0
    raise DcConvergenceError(ckt.node_names[worst], float(np.abs(F[:ckt.nn]).max()))


def dc_operating_point(n: Netlist, cfg: SimConfig, *,
                       params: CnfetModelParams | None = None,
                       stimulus=None) -> DcSolution:
    """Newton solution of the static nodal equations at t = 0."""
    params = params if params is not None else default_params()
    ckt = _Circuit(n, params, cfg.temperature, stimulus)
    x, res, iters = _solve_dc(ckt, cfg)
    voltages = {net: float(x[i]) for i, net in enumerate(ckt.node_names)}
    voltages["gnd"] = 0.0
    currents = {sid: float(x[ckt.nn + j]) for j, sid in enumerate(ckt.source_ids)}
    return DcSolution(voltages, res, iters, currents)


def _cap_limit(refine, t: float) -> float:
    if not refine:
        return math.inf
    starts = [w[0] for w in refine]
    i = bisect.bisect_right(starts, t) - 1
    if i >= 0 and t < refine[i][1]:
        return refine[i][2]
    return math.inf


def transient(n: Netlist, stimulus, cfg: SimConfig, *,
              params: CnfetModelParams | None = None,
              record=None, supply_id: str | None = None,
              refine=()) -> Waveform:
    """March the circuit from its DC point to t_stop.

    ``stimulus`` may override source values by id (a number, or a
    sequence of (t, v) knots).  ``refine`` lists (t0, t1, dt_cap) spans
    that force small steps, e.g. around input edges.
    """
    params = params if params is not None else default_params()
    ckt = _Circuit(n, params, cfg.temperature, stimulus)
    refine = sorted(tuple(w) for w in refine)
    trap = cfg.integration == "trapezoidal"

    if record is None:
        record = [net for net in (*n.inputs, *n.outputs)
                  if net in ckt.node_names]
    else:
        missing = [net for net in record if net not in ckt.node_names]
        if missing:
            raise ValueError(f"cannot record unknown nets: {missing}")
    rec_idx = np.array([ckt.node_names.index(net) for net in record],
                       dtype=np.intp)

    sup_pos = None
    if supply_id is not None:
        if supply_id not in ckt.source_ids:
            raise ValueError(f"unknown supply source {supply_id!r}")
        sup_pos = ckt.source_ids.index(supply_id)
    else:
        for j, d in enumerate(ckt.sources):
            if d.plus == "vdd":
                sup_pos = j
                break
        else:
            if ckt.sources:
                sup_pos = 0

    x, _, _ = _solve_dc(ckt, cfg)
    vpm_old = ckt.cap_vpm(x)
    i_old = np.zeros_like(vpm_old)

    bps = ckt.breakpoints(cfg.t_stop, refine, merge_tol=cfg.dt_min)
    times = [0.0]
    samples = [x[rec_idx].copy()]
    sup = [float(x[ckt.nn + sup_pos]) if sup_pos is not None else 0.0]

    t = 0.0
    dt = cfg.dt_init
    bp_i = 0
    while t < cfg.t_stop * (1.0 - 1e-15):
        while bp_i < len(bps) and bps[bp_i] <= t:
            bp_i += 1
        nb = bps[bp_i]
        step = min(dt, cfg.dt_max, _cap_limit(refine, t), nb - t)
        while True:
            # Snap onto the breakpoint when the leftover would be below
            # dt_min: a next step that small could never be taken.
            if (nb - t) - step <= max(cfg.dt_min, (nb - t) * 1e-12):
                tt = nb
            else:
                tt = t + step
            dtau = tt - t
            sv = ckt.source_values(tt)
            gc_fac = (2.0 if trap else 1.0) / dtau
            cap_rhs = gc_fac * ckt.c_val * vpm_old
            if trap:
                cap_rhs = cap_rhs + i_old
            xn, ok, _, _ = _newton(ckt, x, sv, cfg, gc_fac, cap_rhs)
            if ok:
                break
            step *= 0.5
            if step < cfg.dt_min:
                raise StepCollapseError(tt)
        vpm_new = ckt.cap_vpm(xn)
        i_old = gc_fac * ckt.c_val * vpm_new - cap_rhs
        vpm_old = vpm_new
        x = xn
        t = tt
        times.append(t)
        samples.append(x[rec_idx].copy())
        sup.append(float(x[ckt.nn + sup_pos]) if sup_pos is not None else 0.0)
        dt = min(max(step, dtau) * 1.5, cfg.dt_max)

    mat = np.array(samples)
    nets = {net: tuple(mat[:, k]) for k, net in enumerate(record)}
    return Waveform(tuple(times), nets, tuple(sup))


# --- cell characterization ---

def transition_sequence(n_bits: int) -> tuple:
    """Closed walk hitting every ordered pattern pair exactly once.

    The directed complete graph over the 2**n patterns is balanced, so an
    Eulerian circuit exists; successors are consumed in sorted order,
    making the walk deterministic.
    """
    if n_bits < 1:
        raise ValueError("need at least one input bit")
    verts = sorted(itertools.product((0, 1), repeat=n_bits))
    succ = {v: [u for u in verts if u != v] for v in verts}
    stack = [verts[0]]
    circuit = []
    while stack:
        v = stack[-1]
        if succ[v]:
            stack.append(succ[v].pop(0))
        else:
            circuit.append(stack.pop())
    circuit.reverse()
    return tuple(circuit)


def _pattern_bits_of(n: Netlist, pattern) -> dict:
    if pattern is None:
        return {net: 0 for net in n.inputs}
    if isinstance(pattern, dict):
        if set(pattern) != set(n.inputs):
            raise ValueError("pattern keys must match inputs")
        return {net: int(pattern[net]) for net in n.inputs}
    pattern = tuple(pattern)
    if len(pattern) != len(n.inputs):
        raise ValueError(f"pattern needs {len(n.inputs)} bits")
    return dict(zip(n.inputs, (int(b) for b in pattern)))


def cell_fixture(n: Netlist, vdd: float, cload: float,
                 pattern=None) -> Netlist:
    """Cell plus rail source, DC input sources, and output load caps."""
    bits = _pattern_bits_of(n, pattern)
    devs = list(n.devices)
    devs.append(DeviceInstance("VVDD", DeviceKind.VSRC, ("vdd", "gnd"),
                               dc=float(vdd)))
    for net in n.inputs:
        devs.append(DeviceInstance("V" + net.upper(), DeviceKind.VSRC,
                                   (net, "gnd"), dc=bits[net] * float(vdd)))
    for net in n.outputs:
        devs.append(DeviceInstance("CL" + net.upper(), DeviceKind.CAP,
                                   (net, "gnd"), capacitance=float(cload)))
    return Netlist(n.name, tuple(devs), n.inputs, n.outputs,
                   declared_count=n.declared_count)


@dataclass(frozen=True)
class TransitionDelay:
    index: int
    from_pattern: tuple
    to_pattern: tuple
    output: str
    delay: float | None
    crossing_time: float | None


@dataclass(frozen=True)
class Measurement:
    delay: float
    power: float
    pdp: float
    transitions: tuple
    settling: dict
    failures: tuple


def _band(v: float, vdd: float):
    if v < 0.4 * vdd:
        return 0
    if v > 0.6 * vdd:
        return 1
    return None


def _pattern_fixture(n: Netlist, vdd: float, cload: float, frequency: float,
                     patterns=None):
    """Cell wrapped in rail, ramped pattern drivers, and load caps.

    Returns (fixture, refine windows, t_stop, pattern sequence); the
    drivers place a knot at every hold boundary so those instants appear
    exactly in the march.
    """
    if not n.inputs:
        raise ValueError("measurement needs a cell with declared inputs")
    seq = tuple(tuple(p) for p in (patterns or transition_sequence(len(n.inputs))))
    if any(len(p) != len(n.inputs) for p in seq):
        raise ValueError("pattern width must match the cell inputs")
    hold = 1.0 / (2.0 * frequency)

    devs = list(n.devices)
    devs.append(DeviceInstance("VVDD", DeviceKind.VSRC, ("vdd", "gnd"), dc=vdd))
    for col, net in enumerate(n.inputs):
        knots = [(0.0, seq[0][col] * vdd)]
        for i in range(1, len(seq)):
            prev, cur = seq[i - 1][col], seq[i][col]
            knots.append((i * hold, prev * vdd))
            knots.append((i * hold + _RAMP, cur * vdd))
        devs.append(DeviceInstance("V" + net.upper(), DeviceKind.VSRC,
                                   (net, "gnd"), pwl=tuple(knots)))
    for net in n.outputs:
        devs.append(DeviceInstance("CL" + net.upper(), DeviceKind.CAP,
                                   (net, "gnd"), capacitance=float(cload)))
    fix = Netlist(n.name, tuple(devs), n.inputs, n.outputs,
                  declared_count=n.declared_count)
    window = min(_FINE_WINDOW, hold)
    refine = [(i * hold, i * hold + window, _DT_FINE)
              for i in range(1, len(seq))]
    return fix, refine, len(seq) * hold, seq


def measure(n: Netlist, cfg: SimConfig, *,
            params: CnfetModelParams | None = None,
            cload: float = 2.1e-15, frequency: float = 250e6,
            patterns=None) -> Measurement:
    """Drive the cell through a pattern walk; report delay, power, PDP.

    Each pattern holds for half the period at ``frequency``.  Delay is
    the worst 50%-to-50% crossing over all output transitions; power
    averages the rail-source current magnitude over the post-start
    holds; settling residuals hold the worst distance from a rail per
    (output, pattern), which feeds the settled swing classification.
    """
    fix, refine, t_stop, seq = _pattern_fixture(n, cfg.vdd, cload,
                                                frequency, patterns)
    hold = 1.0 / (2.0 * frequency)
    vdd = cfg.vdd
    cfg_run = replace(cfg, t_stop=t_stop)
    wave = transient(fix, None, cfg_run, params=params,
                     record=list(n.outputs), supply_id="VVDD", refine=refine)

    t_arr = np.asarray(wave.times)
    v_of = {net: np.asarray(wave.nets[net]) for net in n.outputs}
    half = 0.5 * vdd

    def end_index(i):
        # sample at the exact end of hold i (a forced breakpoint)
        return int(np.searchsorted(t_arr, (i + 1) * hold, side="right")) - 1

    rows = []
    failures = []
    settling: dict = {}
    for i, pat in enumerate(seq):
        k = end_index(i)
        for net in n.outputs:
            v_end = float(v_of[net][k])
            res = min(abs(v_end), abs(vdd - v_end))
            key = (net, pat)
            if res > settling.get(key, -1.0):
                settling[key] = res

    for i in range(len(seq) - 1):
        t_edge = (i + 1) * hold
        k0 = end_index(i)
        k1 = end_index(i + 1)
        for net in n.outputs:
            v = v_of[net]
            b0 = _band(float(v[k0]), vdd)
            b1 = _band(float(v[k1]), vdd)
            if b1 is None:
                failures.append(TransitionDelay(i, seq[i], seq[i + 1], net,
                                                None, None))
                continue
            if b0 is None or b0 == b1:
                continue
            s = v[k0:k1 + 1] - half
            tw = t_arr[k0:k1 + 1]
            flips = np.nonzero((s[:-1] < 0.0) != (s[1:] < 0.0))[0]
            if flips.size == 0:
                failures.append(TransitionDelay(i, seq[i], seq[i + 1], net,
                                                None, None))
                continue
            j = int(flips[-1])  # final commitment to the new level
            frac = -s[j] / (s[j + 1] - s[j])
            tc = float(tw[j] + frac * (tw[j + 1] - tw[j]))
            rows.append(TransitionDelay(i, seq[i], seq[i + 1], net,
                                        tc - (t_edge + 0.5 * _RAMP), tc))

    j0 = int(np.searchsorted(t_arr, hold, side="left"))
    i_sup = np.abs(np.asarray(wave.supply_current))
    span = t_arr[-1] - t_arr[j0]
    power = vdd * float(np.trapezoid(i_sup[j0:], t_arr[j0:])) / span
    delay = max((r.delay for r in rows), default=0.0)
    return Measurement(delay, power, delay * power, tuple(rows),
                       settling, tuple(failures))
