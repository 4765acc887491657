"""Carbon-nanotube FET device physics.

Closed-form tube geometry (chirality -> diameter -> threshold), gate width
selection, and a compact piecewise I-V model used by both CNFET and bulk
MOS device kinds in the simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from importlib import resources

from .units import QuantityError, format_quantity, parse_quantity

__all__ = [
    "ChiralityVector",
    "CnfetModelParams",
    "DeviceRating",
    "cnt_diameter",
    "threshold_voltage",
    "is_semiconducting",
    "gate_width",
    "drain_current",
    "channel_current",
    "thermal_voltage",
    "load_params",
    "format_params",
    "default_params",
]

K_BOLTZMANN = 1.380649e-23  # J/K
Q_ELECTRON = 1.602176634e-19  # C

# lattice constant prefactor of the diameter expression, nm
_DIAMETER_PREFACTOR_NM = 0.249
# band-structure constant folded into the threshold expression, V*nm
_VTH_PREFACTOR = 0.43


@dataclass(frozen=True)
class ChiralityVector:
    """Tube roll-up vector (n1, n2), normalized so n1 >= n2 >= 0."""

    n1: int
    n2: int

    def __post_init__(self):
        n1, n2 = int(self.n1), int(self.n2)
        if n2 > n1:
            n1, n2 = n2, n1
        if n1 <= 0 or n2 < 0:
            raise ValueError(f"invalid chirality ({self.n1},{self.n2})")
        object.__setattr__(self, "n1", n1)
        object.__setattr__(self, "n2", n2)

    def __str__(self) -> str:
        return f"({self.n1},{self.n2})"


def cnt_diameter(c: ChiralityVector) -> float:
    """Tube diameter in nm."""
    n1, n2 = c.n1, c.n2
    return _DIAMETER_PREFACTOR_NM * math.sqrt(n1 * n1 + n2 * n2 + n1 * n2) / math.pi


def threshold_voltage(diameter_nm: float) -> float:
    """Threshold magnitude in V for a tube of the given diameter (nm)."""
    if diameter_nm <= 0:
        raise ValueError(f"diameter must be positive, got {diameter_nm}")
    return _VTH_PREFACTOR / diameter_nm


def is_semiconducting(c: ChiralityVector) -> bool:
    """True unless the tube is metallic ((n1 - n2) divisible by 3)."""
    return (c.n1 - c.n2) % 3 != 0


def gate_width(n_tubes: int, pitch: float, w_min: float) -> float:
    """Gate width for n parallel tubes at the given pitch, floor w_min.

    Implements the selection as a single expression so the whole policy
    lives in one place.
    """
    if n_tubes < 1:
        raise ValueError(f"tube count must be >= 1, got {n_tubes}")
    return min(w_min, n_tubes * pitch)


@dataclass
class CnfetModelParams:
    """Process/model parameter set.

    Geometry and material fields are stored in SI base units; Efi stays in
    eV.  k_drive and I_off are per tube and fixed by scripts/calibrate_device.py.
    """

    Lch: float = 32e-9      # physical channel length (m)
    Lgeff: float = 100e-9   # mean free path in the intrinsic channel (m)
    Lss: float = 32e-9      # doped source-side extension length (m)
    Ldd: float = 32e-9      # doped drain-side extension length (m)
    Kgate: float = 16.0     # gate dielectric constant
    Tox: float = 4e-9       # gate oxide thickness (m)
    Csub: float = 40e-12    # substrate coupling capacitance (F/m)
    Efi: float = 6.0        # doped-region Fermi level (eV)
    pitch: float = 20e-9    # inter-tube pitch (m)
    Wmin: float = 32e-9     # minimum lithographic gate width (m)
    tube_count: int = 1     # default tubes per device
    k_drive: float = 2.0e-4    # square-law transconductance per tube (A/V^2)
    lambda_clm: float = 0.05   # channel-length modulation (1/V)
    I_off: float = 1.0e-7      # subthreshold current scale per tube at vgs = vth (A)
    n_sub: float = 1.5         # subthreshold ideality factor
    temp_exp: float = 1.5      # drive degradation exponent vs temperature


@dataclass(frozen=True)
class DeviceRating:
    """Electrical summary of one transistor: polarity plus derived figures."""

    polarity: str            # 'N' or 'P'
    chirality: ChiralityVector
    diameter: float          # nm
    vth: float               # threshold magnitude, V
    gate_width: float        # m
    tubes: int

    @staticmethod
    def build(polarity: str, chirality: ChiralityVector, tubes: int,
              params: CnfetModelParams) -> "DeviceRating":
        if polarity not in ("N", "P"):
            raise ValueError(f"polarity must be 'N' or 'P', got {polarity!r}")
        if not is_semiconducting(chirality):
            raise ValueError(
                f"chirality {chirality} is metallic and cannot form a channel")
        if tubes < 1:
            raise ValueError(f"tube count must be >= 1, got {tubes}")
        d = cnt_diameter(chirality)
        return DeviceRating(
            polarity=polarity,
            chirality=chirality,
            diameter=d,
            vth=threshold_voltage(d),
            gate_width=gate_width(tubes, params.pitch, params.Wmin),
            tubes=tubes,
        )


def thermal_voltage(temp_c: float) -> float:
    """kT/q in volts."""
    return K_BOLTZMANN * (273.15 + temp_c) / Q_ELECTRON


def channel_current(vgs: float, vds: float, *, vth: float, k: float,
                    lam: float, i_off: float, n_sub: float, vt: float) -> float:
    """Piecewise N-frame channel current; P devices mirror through signs.

    Above threshold: square law (linear / saturation with channel-length
    modulation) plus the subthreshold boundary term, which keeps |I|
    continuous at vov = 0.  Below: exponential with slope n_sub*vt and a
    (1 - exp(-vds/vt)) drain saturation factor.
    """
    if vds < 0.0:
        # source/drain swap: conduction is symmetric in the channel
        return -channel_current(vgs - vds, -vds, vth=vth, k=k, lam=lam,
                                i_off=i_off, n_sub=n_sub, vt=vt)
    vov = vgs - vth
    sat_frac = -math.expm1(-vds / vt)  # 1 - exp(-vds/vt)
    if vov <= 0.0:
        return i_off * math.exp(max(vov, -60.0 * n_sub * vt) / (n_sub * vt)) * sat_frac
    vde = min(vds, vov)
    i_sq = k * (vov * vde - 0.5 * vde * vde) * (1.0 + lam * vds)
    return i_sq + i_off * sat_frac


def drain_current(rating: DeviceRating, params: CnfetModelParams,
                  vgs: float, vds: float, temp_c: float = 25.0) -> float:
    """Drain current of a multi-tube device at the given bias and temperature.

    N polarity conducts for positive vgs; P mirrors the N characteristic
    through I_P(vgs, vds) = -I_N(-vgs, -vds).  Only the drive factor carries
    the temperature exponent; the thermal voltage tracks temperature on its
    own.
    """
    if not (math.isfinite(vgs) and math.isfinite(vds)):
        raise ValueError(f"non-finite bias vgs={vgs} vds={vds}")
    t_k = 273.15 + temp_c
    # drive degrades with temperature; k_drive is quoted at 25 C
    k_eff = params.k_drive * rating.tubes * (t_k / 298.15) ** (-params.temp_exp)
    i_off = params.I_off * rating.tubes
    vt = thermal_voltage(temp_c)
    if rating.polarity == "N":
        return channel_current(vgs, vds, vth=rating.vth, k=k_eff, lam=params.lambda_clm,
                               i_off=i_off, n_sub=params.n_sub, vt=vt)
    return -channel_current(-vgs, -vds, vth=rating.vth, k=k_eff, lam=params.lambda_clm,
                            i_off=i_off, n_sub=params.n_sub, vt=vt)


# --- parameter file I/O ---

_PARAM_FIELDS = {f.name: f for f in fields(CnfetModelParams)}

# canonical unit used when writing each field
_PARAM_UNITS = {
    "Lch": "m", "Lgeff": "m", "Lss": "m", "Ldd": "m", "Tox": "m",
    "pitch": "m", "Wmin": "m", "Csub": "F/m", "Efi": "eV",
}


def load_params(text: str, base: CnfetModelParams | None = None) -> CnfetModelParams:
    """Parse ``key = value`` parameter text over a base parameter set.

    Keys are case-sensitive and must name CnfetModelParams fields; values
    accept the usual unit suffixes.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("*"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip()
        rhs = rhs.strip()
        if key not in _PARAM_FIELDS:
            valid = ", ".join(sorted(_PARAM_FIELDS))
            raise ValueError(f"line {lineno}: unknown key {key!r} (valid: {valid})")
        try:
            value, _unit = parse_quantity(rhs)
        except QuantityError as err:
            raise ValueError(f"line {lineno}: {err}") from None
        if key == "tube_count":
            value = int(round(value))
        values[key] = value
    return replace(base or CnfetModelParams(), **values)


def format_params(p: CnfetModelParams) -> str:
    lines = []
    for f in fields(CnfetModelParams):
        value = getattr(p, f.name)
        if f.name == "tube_count":
            lines.append(f"{f.name} = {value}")
        else:
            lines.append(f"{f.name} = {format_quantity(value, _PARAM_UNITS.get(f.name, ''))}")
    return "\n".join(lines) + "\n"


def default_params() -> CnfetModelParams:
    """Parameter set shipped with the package (calibrated defaults file)."""
    text = resources.files("cnfetsim.data").joinpath("cnfet_defaults.params").read_text()
    return load_params(text)
