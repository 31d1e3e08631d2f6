from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from prachsim.channel import (
    ChannelProfile,
    apply_channel,
    delay_profile,
    delay_signal,
    derive_seed,
    etu_profile,
    fading_gains,
    fractional_delay_filter,
    mix_and_add_noise,
)
from prachsim.errors import ConfigurationError
from prachsim.waveform import FrameGeometry, synthesize_preamble
from prachsim.zc import PreambleIdentity

GEOM = FrameGeometry()
TX = synthesize_preamble(PreambleIdentity(), GEOM)
IDEAL = ChannelProfile(model="ideal")


def test_etu_profile():
    delays, powers = etu_profile()
    assert len(delays) == len(powers) == 9
    assert max(delays) == 5000
    assert max(delays) * 1e-9 * 1.92e6 == pytest.approx(9.6)
    assert delay_profile("etu") == (delays, powers)


def test_linear_powers_normalised():
    assert ChannelProfile().linear_powers.sum() == pytest.approx(1.0)
    raw = replace(ChannelProfile(), normalize_path_gains=False).linear_powers
    assert raw[3] == pytest.approx(1.0)


def test_unknown_profile():
    with pytest.raises(ConfigurationError):
        delay_profile("EVA")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_rx_ants=0),
        dict(doppler_hz=-1.0),
        dict(n_terms=0),
        dict(model="rician"),
        dict(mimo_correlation="high"),
        dict(tap_delays_ns=(0, 10), tap_powers_db=(0,)),
        dict(tap_delays_ns=(10, 0), tap_powers_db=(0, 0)),
    ],
)
def test_profile_validation(kwargs):
    with pytest.raises(ConfigurationError):
        ChannelProfile(**kwargs)


def test_zero_doppler_freezes_gain():
    g = fading_gains(replace(ChannelProfile(), doppler_hz=0.0), 1920, antenna=1, tap=4)
    np.testing.assert_allclose(g, g[0], atol=1e-12)
    assert abs(g[0]) > 0


def test_gains_deterministic_and_distinct():
    p = ChannelProfile()
    a = fading_gains(p, 100, 0.0, 0, 2)
    np.testing.assert_array_equal(a, fading_gains(p, 100, 0.0, 0, 2))
    assert not np.allclose(a, fading_gains(p, 100, 0.0, 1, 2))
    assert not np.allclose(a, fading_gains(replace(p, seed=2), 100, 0.0, 0, 2))


def test_gains_continue_across_t0():
    p = ChannelProfile()
    whole = fading_gains(p, 200, 0.0, 0, 0)
    tail = fading_gains(p, 100, 100 / 1.92e6, 0, 0)
    np.testing.assert_allclose(tail, whole[100:], atol=1e-12)


def test_tap_power_over_seeds():
    p = ChannelProfile()
    for tap in (0, 5, 8):
        g = np.array([fading_gains(replace(p, seed=s), 1, 0.0, 0, tap)[0] for s in range(4000)])
        assert np.mean(np.abs(g) ** 2) == pytest.approx(p.linear_powers[tap], rel=0.06)


def test_envelope_rayleigh_ks():
    p = ChannelProfile()
    g = np.array([fading_gains(replace(p, seed=s), 1, 0.0, 1, 3)[0] for s in range(3000)])
    env = np.abs(g) / np.sqrt(p.linear_powers[3] / 2)
    assert stats.kstest(env, "rayleigh").pvalue > 0.01


def test_ideal_channel_is_identity():
    y = apply_channel(TX, IDEAL)
    assert y.shape == (2, 1920)
    for row in y:
        np.testing.assert_array_equal(row, TX.samples)


@pytest.mark.parametrize("d", [1, 3, 57, 185])
def test_ideal_channel_integer_delay(d):
    y = apply_channel(TX, IDEAL, d)
    np.testing.assert_array_equal(y[0, d:], TX.samples[:-d])
    assert not y[0, :d].any()


def test_timing_offset_bounds():
    with pytest.raises(ConfigurationError):
        apply_channel(TX, IDEAL, 186)
    with pytest.raises(ConfigurationError):
        apply_channel(TX, IDEAL, -1)


def test_fractional_filter():
    np.testing.assert_allclose(fractional_delay_filter(0.0), np.eye(17)[8], atol=1e-15)
    for frac in (0.1, 0.5, 0.9):
        assert fractional_delay_filter(frac).sum() == pytest.approx(1.0)


def test_fractional_delay_of_slow_tone():
    n = np.arange(400)
    f = 0.03
    x = np.exp(2j * np.pi * f * n)
    y = delay_signal(x, 2.4)
    ref = np.exp(2j * np.pi * f * (n - 2.4))
    np.testing.assert_allclose(y[20:380], ref[20:380], atol=2e-3)


def test_fading_output_power():
    # the six taps within 500 ns act almost like one Rayleigh tap, so per-trial
    # power spreads widely; 4000 trials keep the 3% band above three sigma
    tx = synthesize_preamble(PreambleIdentity(), GEOM).samples[GEOM.seq_slice]
    p_in = np.mean(np.abs(tx) ** 2)
    acc = []
    for s in range(4000):
        y = apply_channel(TX, ChannelProfile(), 0.0, trial_seed=s)
        acc.append(np.mean(np.abs(y[:, GEOM.seq_slice]) ** 2, axis=1))
    p_out = np.mean(acc, axis=0)
    np.testing.assert_allclose(p_out, p_in, rtol=0.03)


def test_fading_realisations_differ_by_trial():
    a = apply_channel(TX, ChannelProfile(), 0.0, trial_seed=1)
    b = apply_channel(TX, ChannelProfile(), 0.0, trial_seed=2)
    np.testing.assert_array_equal(a, apply_channel(TX, ChannelProfile(), 0.0, trial_seed=1))
    assert not np.allclose(a, b)


def test_pure_noise_variance():
    acc = np.concatenate([mix_and_add_noise([], GEOM, trial_seed=s).antennas.ravel() for s in range(30)])
    assert acc.size >= 1e5
    assert np.var(acc) == pytest.approx(1.0, rel=0.02)
    assert np.var(acc.real) == pytest.approx(0.5, rel=0.03)
    assert abs(np.mean(acc.real * acc.imag)) < 0.01


def test_noise_is_white():
    w = mix_and_add_noise([], GEOM, trial_seed=3, n_rx_ants=1).antennas[0]
    r1 = abs(np.vdot(w[:-1], w[1:])) / np.vdot(w, w).real
    assert r1 < 4 / np.sqrt(w.size)


def _signal_part(contribs, seed=5):
    return mix_and_add_noise(contribs, GEOM, trial_seed=seed).antennas - mix_and_add_noise([], GEOM, trial_seed=seed).antennas


def test_snr_zero_db():
    sig = _signal_part([(apply_channel(TX, IDEAL), 0.0)])
    assert np.mean(np.abs(sig[:, GEOM.seq_slice]) ** 2) == pytest.approx(1.0, rel=0.02)


def test_two_contributions_add_in_power():
    other = synthesize_preamble(PreambleIdentity(preamble_index=0), GEOM)
    sig = _signal_part([(apply_channel(TX, IDEAL), -10.0), (apply_channel(other, IDEAL), -20.0)])
    assert np.mean(np.abs(sig[:, GEOM.seq_slice]) ** 2) == pytest.approx(0.11, rel=0.05)


def test_silent_contribution_changes_nothing():
    y = apply_channel(TX, IDEAL)
    a = mix_and_add_noise([(y, -5.0)], GEOM, trial_seed=9)
    b = mix_and_add_noise([(y, -5.0), (y, -np.inf)], GEOM, trial_seed=9)
    np.testing.assert_array_equal(a.antennas, b.antennas)


def test_mismatched_contributions():
    with pytest.raises(ConfigurationError):
        mix_and_add_noise([(np.zeros((2, 1920)), 0.0), (np.zeros((1, 1920)), 0.0)], GEOM)


@settings(max_examples=50, deadline=None)
@given(keys=st.lists(st.integers(-(2**40), 2**40), min_size=1, max_size=4))
def test_derive_seed_deterministic(keys):
    s = derive_seed(*keys)
    assert s == derive_seed(*keys)
    assert 0 <= s < 2**63
    assert s != derive_seed(*keys, 0)
