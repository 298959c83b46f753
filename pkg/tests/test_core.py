import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from mrs_snrt import (
    FieldScaling,
    InvalidParameterError,
    NoiseModelParams,
    RelaxationParams,
    SequenceTiming,
    ernst_angle,
    f_factor,
    f_factor_ernst,
    noise_std_relative,
    one_tr_signal_curve,
    snr_t_fixed_ta,
)
from mrs_snrt.core import snr_t_for

mp.dps = 40


def mp_fe(x):
    """High-precision oracle for the Ernst-angle F-factor."""
    e = mp.exp(-mpf(x))
    return float(mp.sqrt((1 - e) / (1 + e)))


# values frozen from the mpmath oracle above
FE_0_2 = 0.3157023829890358
FE_1 = 0.6797919955839505
FE_5 = 0.9932846007823892
ERNST_1 = 1.1940688187363216


def test_frozen_values_match_oracle():
    assert FE_0_2 == pytest.approx(mp_fe("0.2"), abs=1e-15)
    assert FE_1 == pytest.approx(mp_fe(1), abs=1e-15)
    assert FE_5 == pytest.approx(mp_fe(5), abs=1e-15)
    assert ERNST_1 == pytest.approx(float(mp.acos(mp.exp(-1))), abs=1e-15)


class TestErnstAngle:
    def test_long_tr_is_ninety_degrees(self):
        assert ernst_angle(1000.0, 1.0) == pytest.approx(np.pi / 2, abs=1e-12)

    def test_zero_tr(self):
        assert ernst_angle(0.0, 1.0) == 0.0

    def test_tr_equal_t1(self):
        assert ernst_angle(1.0, 1.0) == pytest.approx(ERNST_1, abs=1e-12)
        assert math.degrees(ernst_angle(1.0, 1.0)) == pytest.approx(68.42, abs=0.005)

    @pytest.mark.parametrize("t1", [0.0, -1.0, np.nan])
    def test_bad_t1(self, t1):
        with pytest.raises(InvalidParameterError):
            ernst_angle(1.0, t1)

    def test_negative_tr(self):
        with pytest.raises(InvalidParameterError):
            ernst_angle(-1.0, 1.0)

    def test_monotone(self):
        x = np.linspace(0, 20, 500)
        assert np.all(np.diff(ernst_angle(x, 1.0)) > 0)


class TestFFactor:
    def test_five_t1(self):
        assert f_factor(5.0, 1.0, ernst_angle(5.0, 1.0)) == pytest.approx(FE_5, abs=1e-12)

    def test_full_relaxation(self):
        assert f_factor(1000.0, 1.0, np.pi / 2) == pytest.approx(1.0, abs=1e-12)

    def test_short_tr(self):
        assert f_factor(0.2, 1.0, ernst_angle(0.2, 1.0)) == pytest.approx(FE_0_2, abs=1e-12)

    def test_saturated_corner(self):
        assert f_factor(0.0, 1.0, 0.0) == 0.0

    @pytest.mark.parametrize("theta", [-0.1, 3.2])
    def test_theta_domain(self, theta):
        with pytest.raises(InvalidParameterError):
            f_factor(1.0, 1.0, theta)

    def test_bounded(self):
        rng = np.random.default_rng(0)
        tr = rng.uniform(0, 10, 1000)
        theta = rng.uniform(0, np.pi, 1000)
        F = f_factor(tr, 1.0, theta)
        assert np.all((F >= 0) & (F <= 1))


class TestFFactorErnst:
    def test_zero(self):
        assert f_factor_ernst(0.0, 1.0) == 0.0

    def test_five_t1(self):
        assert f_factor_ernst(5.0, 1.0) == pytest.approx(FE_5, abs=1e-12)

    def test_one_t1(self):
        assert f_factor_ernst(1.0, 1.0) == pytest.approx(FE_1, abs=1e-12)

    def test_scale_invariant(self):
        assert f_factor_ernst(2.0, 2.0) == f_factor_ernst(1.0, 1.0)


def test_closed_form_equivalence_random():
    rng = np.random.default_rng(20240601)
    tr = rng.uniform(1e-3, 10.0, 1000)
    t1 = rng.uniform(0.1, 5.0, 1000)
    general = f_factor(tr, t1, ernst_angle(tr, t1))
    closed = f_factor_ernst(tr, t1)
    assert np.max(np.abs(general - closed)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(tr=st.floats(0.01, 10.0), t1=st.floats(0.1, 5.0))
def test_ernst_angle_is_argmax(tr, t1):
    step = (np.pi / 2) / 2000
    theta = step * np.arange(1, 2001)
    best = theta[np.argmax(f_factor(tr, t1, theta))]
    assert abs(best - ernst_angle(tr, t1)) <= step


@settings(max_examples=50, deadline=None)
@given(t1=st.floats(0.1, 5.0))
def test_saturation_monotonicity(t1):
    tr = np.geomspace(1e-3, 20, 400) * t1
    assert np.all(np.diff(f_factor_ernst(tr, t1)) > 0)
    assert np.all(np.diff(snr_t_fixed_ta(1.0, tr, t1)) < 0)


class TestNoise:
    def test_sample_only(self):
        p = NoiseModelParams(sample_temp=1.0, coil_temp=1.0, coil_noise_coeff=0.0)
        assert noise_std_relative(1.0, p) == 1.0
        assert noise_std_relative(4.0, p) == 4.0

    def test_with_coil(self):
        p = NoiseModelParams(sample_temp=300.0, coil_temp=300.0, coil_noise_coeff=1.0)
        assert noise_std_relative(1.0, p) == pytest.approx(math.sqrt(600.0), abs=1e-12)

    def test_exactly_linear(self):
        p = NoiseModelParams(sample_temp=310.0, coil_noise_coeff=0.0)
        b0 = np.array([0.5, 1.5, 3.0, 7.0])
        out = noise_std_relative(b0, p)
        assert np.array_equal(out / b0, np.full(4, out[0] / b0[0]))

    def test_coil_dominates_at_low_field(self):
        p = NoiseModelParams(sample_temp=1.0, coil_temp=1.0, coil_noise_coeff=1.0)
        low, high = noise_std_relative(0.01, p), noise_std_relative(100.0, p)
        assert low > 0.01
        assert high / 100.0 == pytest.approx(1.0, abs=1e-3)

    def test_invalid(self):
        with pytest.raises(InvalidParameterError):
            NoiseModelParams(coil_noise_coeff=-1)
        with pytest.raises(InvalidParameterError):
            noise_std_relative(0.0)


class TestSnrtFixedTa:
    def test_long_tr_regime(self):
        assert snr_t_fixed_ta(1.0, 10.0, 1.0) == pytest.approx(1 / math.sqrt(10), rel=0.007)

    def test_linear_in_b0(self):
        assert snr_t_fixed_ta(2.0, 0.7, 1.0) == 2 * snr_t_fixed_ta(1.0, 0.7, 1.0)

    def test_plateau(self):
        for tr in (1e-3, 1e-4, 1e-6):
            assert snr_t_fixed_ta(1.0, tr, 1.0) == pytest.approx(1 / math.sqrt(2), rel=0.01)

    def test_plateau_scales_with_t1(self):
        assert snr_t_fixed_ta(1.0, 1e-3 * 4.0, 4.0) == pytest.approx(
            1 / math.sqrt(8), rel=0.01)

    def test_from_records(self):
        field = FieldScaling(1.5, 2.0)
        timing = SequenceTiming(tr_ref=0.5, ta=300.0)
        relax = RelaxationParams(1.0)
        assert snr_t_for(field, timing, relax) == pytest.approx(
            3.0 * f_factor_ernst(0.5, 1.0) / math.sqrt(0.5))
        flipped = SequenceTiming(tr_ref=0.5, ta=300.0, flip_angle=np.pi / 2)
        assert snr_t_for(field, flipped, relax) < snr_t_for(field, timing, relax)


class TestRecords:
    def test_timing_invariants(self):
        with pytest.raises(InvalidParameterError):
            SequenceTiming(tr_ref=2.0, ta=1.0)
        with pytest.raises(InvalidParameterError):
            SequenceTiming(tr_ref=1.0, ta=10.0, flip_angle=2.0)
        assert SequenceTiming(0.4, 300.0).n_excitations == pytest.approx(750.0)

    def test_relaxation_invariants(self):
        with pytest.raises(InvalidParameterError):
            RelaxationParams(0.0)
        with pytest.raises(InvalidParameterError):
            RelaxationParams(1.0, alpha=-0.1)
        with pytest.raises(InvalidParameterError):
            RelaxationParams(1.0, alpha=2.5)

    def test_field(self):
        assert FieldScaling(1.5, 2.0).b0 == 3.0
        with pytest.raises(InvalidParameterError):
            FieldScaling(1.5, 0.0)


class TestSignalCurve:
    def test_full_relaxation(self):
        c = one_tr_signal_curve(1000.0, 1.0, 50)
        assert c.transverse_at_pulse == pytest.approx(1.0, abs=1e-9)
        assert c.longitudinal[-1] == pytest.approx(1.0, abs=1e-9)

    def test_tr_equal_t1(self):
        c = one_tr_signal_curve(1.0, 1.0)
        assert c.transverse_at_pulse == pytest.approx(FE_1, abs=1e-12)
        assert len(c.time) == 500

    @settings(max_examples=100, deadline=None)
    @given(tr=st.floats(1e-3, 50.0), t1=st.floats(0.05, 5.0))
    def test_steady_state_closure(self, tr, t1):
        c = one_tr_signal_curve(tr, t1, 16)
        assert abs(c.longitudinal[-1] - c.mz_steady) < 1e-9
        assert c.time[0] == 0.0 and c.time[-1] == tr
        assert c.transverse_at_pulse == pytest.approx(f_factor_ernst(tr, t1), abs=1e-12)

    def test_rows(self):
        rows = list(one_tr_signal_curve(1.0, 1.0, 3).rows())
        assert len(rows) == 3 and rows[0][0] == 0.0

    def test_bad_samples(self):
        with pytest.raises(InvalidParameterError):
            one_tr_signal_curve(1.0, 1.0, 1)
