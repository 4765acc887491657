"""cnfetsim: switch-level and transient simulation of CNFET full-adder cells."""

from .device import (
    ChiralityVector,
    CnfetModelParams,
    DeviceRating,
    cnt_diameter,
    default_params,
    drain_current,
    gate_width,
    is_semiconducting,
    threshold_voltage,
)
from .netlist import (
    DeviceInstance,
    DeviceKind,
    Netlist,
    NetlistParseError,
    emit_netlist,
    parse_netlist,
    transistor_iv,
    validate_netlist,
)
from .cells import (
    DiameterPolicy,
    apply_policy,
    build_cell,
    build_xor_module,
    CELL_NAMES,
    full_adder_truth,
)
from .switchlevel import (
    PatternReport,
    SwitchValue,
    evaluate_static,
    swing_report,
    verify_truth_table,
)
from .sim import (
    DcConvergenceError,
    Measurement,
    SimConfig,
    SingularSystemError,
    StepCollapseError,
    Waveform,
    cell_fixture,
    dc_operating_point,
    measure,
    transient,
    transition_sequence,
)
from .bench import (
    CharacterizationRecord,
    SweepPlan,
    emit_report,
    improvement,
    inconsistent_reference_rows,
    load_reference_table,
    parse_plan,
    parse_report,
    partition_cells,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "CharacterizationRecord",
    "ChiralityVector",
    "CnfetModelParams",
    "DcConvergenceError",
    "DeviceInstance",
    "DeviceKind",
    "DeviceRating",
    "DiameterPolicy",
    "Measurement",
    "Netlist",
    "NetlistParseError",
    "PatternReport",
    "SimConfig",
    "SingularSystemError",
    "StepCollapseError",
    "SwitchValue",
    "SweepPlan",
    "Waveform",
    "apply_policy",
    "build_cell",
    "build_xor_module",
    "cell_fixture",
    "CELL_NAMES",
    "cnt_diameter",
    "dc_operating_point",
    "default_params",
    "drain_current",
    "emit_netlist",
    "emit_report",
    "evaluate_static",
    "full_adder_truth",
    "gate_width",
    "improvement",
    "inconsistent_reference_rows",
    "is_semiconducting",
    "load_reference_table",
    "measure",
    "parse_netlist",
    "parse_plan",
    "parse_report",
    "partition_cells",
    "run_sweep",
    "swing_report",
    "threshold_voltage",
    "transient",
    "transistor_iv",
    "transition_sequence",
    "validate_netlist",
    "verify_truth_table",
    "__version__",
]
