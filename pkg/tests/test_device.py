"""Device physics: frozen expected values, algebraic properties, I-V model."""

import math

import pytest
from hypothesis import given, strategies as st

from cnfetsim.device import (
    ChiralityVector,
    CnfetModelParams,
    DeviceRating,
    cnt_diameter,
    threshold_voltage,
    is_semiconducting,
    gate_width,
    drain_current,
    thermal_voltage,
    load_params,
    format_params,
    default_params,
)


# Frozen oracle values, computed by hand from the closed-form expressions
# before the implementation was written.
DIAMETER_CASES = [
    ((19, 0), 1.5059),
    ((55, 0), 4.3592),
    ((4, 4), 0.5491),
]

VTH_CASES = [
    (1.0, 0.43),
    (1.5059, 0.2855),
    (4.3592, 0.0986),
]


@pytest.mark.parametrize("nm,expected", DIAMETER_CASES)
def test_cnt_diameter_frozen(nm, expected):
    assert cnt_diameter(ChiralityVector(*nm)) == pytest.approx(expected, abs=1e-3)


def test_cnt_diameter_formula_shape():
    # independent recomputation against the closed form
    c = ChiralityVector(17, 3)
    by_hand = 0.249 * math.sqrt(17**2 + 3**2 + 17 * 3) / math.pi
    assert cnt_diameter(c) == pytest.approx(by_hand, rel=1e-12)


@pytest.mark.parametrize("d,expected", VTH_CASES)
def test_threshold_voltage_frozen(d, expected):
    assert threshold_voltage(d) == pytest.approx(expected, abs=1e-3)


def test_threshold_voltage_exact_at_unit_diameter():
    assert threshold_voltage(1.0) == 0.43


@pytest.mark.parametrize(
    "nm,expected",
    [((19, 0), True), ((55, 0), True), ((9, 0), False), ((4, 4), False), ((5, 2), False)],
)
def test_is_semiconducting(nm, expected):
    assert is_semiconducting(ChiralityVector(*nm)) is expected


@given(st.integers(1, 60), st.integers(0, 60))
def test_chirality_is_normalized_and_diameter_symmetric(n1, n2):
    a = ChiralityVector(n1, n2)
    b = ChiralityVector(n2, n1) if n2 > 0 else a
    assert a.n1 >= a.n2
    assert cnt_diameter(a) == cnt_diameter(b)


def test_chirality_rejects_null_vector():
    with pytest.raises(ValueError):
        ChiralityVector(0, 0)
    with pytest.raises(ValueError):
        ChiralityVector(-3, 1)


@given(st.integers(2, 80))
def test_vth_decreases_with_zigzag_index(n):
    # wider tube -> lower threshold
    lo = threshold_voltage(cnt_diameter(ChiralityVector(n, 0)))
    hi = threshold_voltage(cnt_diameter(ChiralityVector(n + 1, 0)))
    assert hi < lo


def test_gate_width_frozen():
    assert gate_width(1, 20e-9, 32e-9) == pytest.approx(20e-9)
    assert gate_width(3, 20e-9, 32e-9) == pytest.approx(32e-9)


def test_gate_width_rejects_nonpositive_count():
    with pytest.raises(ValueError):
        gate_width(0, 20e-9, 32e-9)


# --- model parameter defaults (material/geometry table) ---

def test_default_params_table_values():
    p = CnfetModelParams()
    assert p.Lch == 32e-9
    assert p.Lgeff == 100e-9
    assert p.Lss == 32e-9
    assert p.Ldd == 32e-9
    assert p.Kgate == 16.0
    assert p.Tox == 4e-9
    assert p.Csub == 40e-12
    assert p.Efi == 6.0


def test_params_file_round_trip():
    p = CnfetModelParams()
    q = load_params(format_params(p))
    assert q == p


def test_load_params_units_and_overrides():
    p = load_params("Lch = 16nm\nCsub = 20pF/m\ntube_count = 3\n# comment\n")
    assert p.Lch == pytest.approx(16e-9)
    assert p.Csub == pytest.approx(20e-12)
    assert p.tube_count == 3


def test_load_params_rejects_unknown_key():
    with pytest.raises(ValueError) as err:
        load_params("bogus = 1\n")
    assert "bogus" in str(err.value)


def test_packaged_defaults_match_dataclass():
    assert default_params() == CnfetModelParams()


# --- device rating ---

def test_rating_derives_fields():
    p = CnfetModelParams()
    r = DeviceRating.build("N", ChiralityVector(19, 0), tubes=1, params=p)
    assert r.diameter == pytest.approx(1.5059, abs=1e-3)
    assert r.vth == pytest.approx(0.2855, abs=1e-3)
    assert r.gate_width == pytest.approx(20e-9)
    r3 = DeviceRating.build("P", ChiralityVector(19, 0), tubes=3, params=p)
    assert r3.gate_width == pytest.approx(32e-9)
    # derived fields recompute exactly
    assert r.diameter == pytest.approx(cnt_diameter(r.chirality), rel=1e-12)
    assert r.vth == pytest.approx(threshold_voltage(r.diameter), rel=1e-12)


def test_rating_rejects_conducting_tube():
    with pytest.raises(ValueError):
        DeviceRating.build("N", ChiralityVector(9, 0), tubes=1, params=CnfetModelParams())


# --- drain current model ---

def _params(**kw):
    base = dict(k_drive=2.0e-4, lambda_clm=0.0, I_off=0.0)
    base.update(kw)
    return CnfetModelParams(**base)


def _rating(pol="N", nm=(19, 0), tubes=1, params=None):
    return DeviceRating.build(pol, ChiralityVector(*nm), tubes=tubes, params=params or _params())


def test_saturation_branch_hand_value():
    p = _params()
    r = _rating(params=p)
    vov = 0.65 - r.vth
    i = drain_current(r, p, vgs=0.65, vds=0.65)
    assert i == pytest.approx(0.5 * p.k_drive * vov * vov, rel=1e-9)


def test_linear_branch_hand_value():
    p = _params()
    r = _rating(params=p)
    vov = 0.65 - r.vth
    vds = 0.1
    i = drain_current(r, p, vgs=0.65, vds=vds)
    assert i == pytest.approx(p.k_drive * (vov * vds - 0.5 * vds * vds), rel=1e-9)


def test_subthreshold_decade_per_nvt_ln10():
    p = _params(I_off=1e-7)
    r = _rating(params=p)
    vt = thermal_voltage(25.0)
    vgs = r.vth - p.n_sub * vt * math.log(10.0)
    i = drain_current(r, p, vgs=vgs, vds=0.65)
    assert i == pytest.approx(1e-8, rel=1e-4)


def test_at_threshold_limit_is_ioff_times_vds_shape():
    p = _params(I_off=1e-7)
    r = _rating(params=p)
    vt = thermal_voltage(25.0)
    for vds in (0.02, 0.1, 0.65):
        below = drain_current(r, p, vgs=r.vth - 1e-12, vds=vds)
        expect = 1e-7 * (1.0 - math.exp(-vds / vt))
        assert below == pytest.approx(expect, rel=1e-6)


def test_zero_bias_zero_current():
    p = _params(I_off=1e-7)
    r = _rating(params=p)
    assert drain_current(r, p, vgs=0.65, vds=0.0) == 0.0
    assert drain_current(r, p, vgs=0.0, vds=0.0) == 0.0


def test_continuity_across_region_boundaries():
    p = _params(I_off=1e-7, lambda_clm=0.05)
    r = _rating(params=p)
    # scan vgs through the threshold and vds through vov at fine pitch;
    # adjacent samples must not jump by more than 1% of local magnitude
    for vds in (0.05, 0.3, 0.65):
        prev = None
        for k in range(-400, 401):
            vgs = r.vth + k * 1e-4
            i = drain_current(r, p, vgs=vgs, vds=vds)
            if prev is not None:
                scale = max(abs(i), abs(prev))
                assert abs(i - prev) <= 0.01 * scale + 1e-18
            prev = i


@given(
    st.floats(-1.3, 1.3, allow_nan=False),
    st.floats(-1.3, 1.3, allow_nan=False),
)
def test_pn_sign_symmetry(vgs, vds):
    pn = _params(I_off=1e-7, lambda_clm=0.05)
    rn = _rating("N", params=pn)
    rp = _rating("P", params=pn)
    ip = drain_current(rp, pn, vgs=vgs, vds=vds)
    im = drain_current(rn, pn, vgs=-vgs, vds=-vds)
    assert ip == pytest.approx(-im, rel=1e-12, abs=1e-30)


@given(st.floats(0.01, 1.3, allow_nan=False), st.integers(0, 120))
def test_monotone_in_vgs(vds, k):
    p = _params(I_off=1e-7)
    r = _rating(params=p)
    vgs = -0.3 + k * 0.01
    lo = drain_current(r, p, vgs=vgs, vds=vds)
    hi = drain_current(r, p, vgs=vgs + 0.01, vds=vds)
    assert hi >= lo


def test_tube_count_scales_current():
    p = _params(I_off=1e-7, tube_count=1)
    r1 = _rating(params=p)
    r4 = DeviceRating.build("N", ChiralityVector(19, 0), tubes=4, params=p)
    i1 = drain_current(r1, p, vgs=0.65, vds=0.65)
    i4 = drain_current(r4, p, vgs=0.65, vds=0.65)
    assert i4 == pytest.approx(4 * i1, rel=1e-12)


def test_temperature_scales_drive():
    p = _params()
    r = _rating(params=p)
    i25 = drain_current(r, p, vgs=0.65, vds=0.65, temp_c=300.0 - 273.15)
    i70 = drain_current(r, p, vgs=0.65, vds=0.65, temp_c=70.0)
    t_k = 273.15 + 70.0
    assert i70 == pytest.approx(i25 * (t_k / 300.0) ** (-p.temp_exp), rel=1e-9)


def test_rejects_non_finite():
    p = _params()
    r = _rating(params=p)
    with pytest.raises(ValueError):
        drain_current(r, p, vgs=float("nan"), vds=0.1)
    with pytest.raises(ValueError):
        drain_current(r, p, vgs=0.1, vds=float("inf"))
