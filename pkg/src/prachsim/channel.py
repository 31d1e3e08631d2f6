"""Tapped-delay-line Rayleigh fading, receive-power scaling and AWGN.

Fading follows a sum-of-sinusoids construction in the GMEDS style: each tap
and receive antenna carries an in-phase and a quadrature component, each a
sum of ``n_terms`` equal-power cosines at Doppler frequencies
``f_max * cos(alpha_n)`` with uniformly random initial phases.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from ._assets import load_table
from .errors import ConfigurationError

INTERP_LEN = 17
_INTERP_HALF = INTERP_LEN // 2
_KAISER_BETA = 5.0

# Spawn keys that separate random streams drawn from one trial seed.
NOISE_STREAM = 0x6E6F


def etu_profile():
    """Extended Typical Urban delay profile as ``(delays_ns, powers_db)``."""
    rows = load_table("etu_profile.csv")
    delays = tuple(float(r["delay_ns"]) for r in rows)
    powers = tuple(float(r["power_db"]) for r in rows)
    return delays, powers


_DELAY_PROFILES = {"ETU": etu_profile}


def delay_profile(name):
    try:
        return _DELAY_PROFILES[name.upper()]()
    except KeyError:
        raise ConfigurationError(f"unknown delay profile {name!r}") from None


def _default_delays():
    return etu_profile()[0]


def _default_powers():
    return etu_profile()[1]


@dataclass(frozen=True)
class ChannelProfile:
    n_rx_ants: int = 2
    tap_delays_ns: tuple = field(default_factory=_default_delays)
    tap_powers_db: tuple = field(default_factory=_default_powers)
    doppler_hz: float = 70.0
    n_terms: int = 16
    mimo_correlation: str = "low"
    model: str = "gmeds_rayleigh"
    normalize_path_gains: bool = True
    seed: int = 1

    def __post_init__(self):
        delays = np.asarray(self.tap_delays_ns, dtype=float)
        if len(self.tap_delays_ns) != len(self.tap_powers_db) or delays.size == 0:
            raise ConfigurationError("tap delays and powers must be non-empty and of equal length")
        if np.any(delays < 0) or np.any(np.diff(delays) <= 0):
            raise ConfigurationError("tap delays must be non-negative and strictly increasing")
        if self.n_rx_ants < 1:
            raise ConfigurationError("n_rx_ants must be at least 1")
        if self.n_terms < 1:
            raise ConfigurationError("n_terms must be at least 1")
        if self.doppler_hz < 0:
            raise ConfigurationError("Doppler frequency must be non-negative")
        if self.model not in ("gmeds_rayleigh", "ideal"):
            raise ConfigurationError(f"unknown fading model {self.model!r}")
        if self.mimo_correlation != "low":
            raise ConfigurationError(f"MIMO correlation {self.mimo_correlation!r} is not modelled")

    @property
    def linear_powers(self):
        p = 10.0 ** (np.asarray(self.tap_powers_db, dtype=float) / 10.0)
        if self.normalize_path_gains:
            p = p / p.sum()
        return p


@dataclass(frozen=True, eq=False)
class RxSubframe:
    antennas: np.ndarray  # (n_rx_ants, subframe_samples)
    noise_variance: float = 1.0

    @property
    def n_rx_ants(self):
        return self.antennas.shape[0]


def derive_seed(*keys):
    """Fold integer keys into one 63-bit seed (order-sensitive, collision-resistant)."""
    # the length prefix keeps (a, 0) and (a, 0, 0) apart; SeedSequence drops trailing zeros
    entropy = [len(keys)] + [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]
    state = np.random.SeedSequence(entropy).generate_state(2, np.uint32)
    return int(state[0]) << 31 | int(state[1]) >> 1


def _doppler_angles(n_terms):
    n = np.arange(1, n_terms + 1)
    base = np.pi / (2 * n_terms) * (n - 0.5)
    rot = np.pi / (8 * n_terms)
    return np.stack([base + rot, base - rot])  # (2, n_terms): in-phase, quadrature


def _phases(seed, antenna, tap, n_terms):
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, antenna, tap])
    return rng.uniform(0.0, 2.0 * np.pi, size=(2, n_terms))


@lru_cache(maxsize=16)
def _oscillators(doppler_hz, n_terms, n_samples, t0, sample_rate):
    """``exp(j*2*pi*f_{i,n}*t)`` for both components, shape (2, n_terms, n_samples)."""
    t = t0 + np.arange(n_samples) / sample_rate
    freqs = doppler_hz * np.cos(_doppler_angles(n_terms))
    osc = np.exp(2j * np.pi * freqs[..., None] * t)
    osc.flags.writeable = False
    return osc


def _gmeds(doppler_hz, n_terms, phases, n_samples, t0, sample_rate):
    """Unit-power sum-of-sinusoids process; ``phases`` has shape (..., 2, n_terms)."""
    osc = _oscillators(float(doppler_hz), int(n_terms), int(n_samples), float(t0), float(sample_rate))
    # sum_n cos(w_n t + theta_n) = Re(sum_n e^{j theta_n} e^{j w_n t})
    comps = (np.exp(1j * phases)[..., None, :] @ osc).real[..., 0, :] / np.sqrt(n_terms)
    return comps[..., 0, :] + 1j * comps[..., 1, :]


def fading_gains(profile, n_samples, t0=0.0, antenna=0, tap=0, sample_rate=1.92e6):
    """Complex gain trajectory of one tap on one receive antenna.

    The long-run mean power equals the tap's linear profile power. For the
    ``ideal`` model tap 0 has constant unit gain and every other tap is zero.
    """
    if profile.model == "ideal":
        return np.full(n_samples, 1.0 + 0j if tap == 0 else 0j)
    phases = _phases(profile.seed, antenna, tap, profile.n_terms)
    power = profile.linear_powers[tap]
    return np.sqrt(power) * _gmeds(profile.doppler_hz, profile.n_terms, phases, n_samples, t0, sample_rate)


def _all_gains(profile, n_samples, t0, sample_rate):
    n_taps = len(profile.tap_delays_ns)
    phases = np.stack(
        [
            np.stack([_phases(profile.seed, a, k, profile.n_terms) for k in range(n_taps)])
            for a in range(profile.n_rx_ants)
        ]
    )  # (ants, taps, 2, n_terms)
    amp = np.sqrt(profile.linear_powers)[None, :, None]
    return amp * _gmeds(profile.doppler_hz, profile.n_terms, phases, n_samples, t0, sample_rate)


@lru_cache(maxsize=1)
def _interp_window():
    return np.kaiser(INTERP_LEN, _KAISER_BETA)


def fractional_delay_filter(frac):
    """Kaiser-windowed sinc of length 17 delaying by ``frac`` in [0, 1) samples.

    Coefficient ``h[j]`` applies to input sample ``n - j + 8``. DC gain is 1.
    """
    j = np.arange(INTERP_LEN) - _INTERP_HALF
    h = np.sinc(j - frac) * _interp_window()
    return h / h.sum()


def delay_signal(x, delay):
    """Delay ``x`` by a real number of samples, keeping its length.

    Integer delays are exact shifts; fractional parts use the windowed-sinc
    interpolator.
    """
    n = x.shape[-1]
    whole = int(np.floor(delay))
    frac = delay - whole
    out = np.zeros_like(x)
    if frac == 0.0:
        if whole < n:
            out[..., whole:] = x[..., : n - whole]
        return out
    full = np.convolve(x, fractional_delay_filter(frac))  # index i <-> sample i - 8
    start = whole - _INTERP_HALF
    src_lo = max(0, -start)
    dst_lo = max(0, start)
    count = min(n - dst_lo, full.size - src_lo)
    if count > 0:
        out[dst_lo : dst_lo + count] = full[src_lo : src_lo + count]
    return out


def apply_channel(tx, profile, timing_offset_samples=0.0, trial_seed=0, t0=0.0):
    """Propagate a preamble through the multipath channel (no noise).

    Parameters
    ----------
    tx : PreambleWaveform
    profile : ChannelProfile
    timing_offset_samples : float
        Round-trip delay added to every tap; must fit inside the guard period.
    trial_seed : int
        Combined with ``profile.seed`` to draw this realisation's phases.

    Returns
    -------
    ndarray, shape (n_rx_ants, subframe_samples)
    """
    geometry = tx.geometry
    if not 0 <= timing_offset_samples < geometry.gp_samples:
        raise ConfigurationError(
            f"timing offset {timing_offset_samples} samples outside [0, {geometry.gp_samples})"
        )
    x = tx.samples
    fs = geometry.sample_rate
    if profile.model == "ideal":
        y = delay_signal(x, timing_offset_samples)
        return np.tile(y, (profile.n_rx_ants, 1))

    delays = np.asarray(profile.tap_delays_ns) * 1e-9 * fs + timing_offset_samples
    delayed = np.stack([delay_signal(x, d) for d in delays])  # (taps, n)
    realisation = replace(profile, seed=derive_seed(profile.seed, trial_seed))
    gains = _all_gains(realisation, x.size, t0, fs)  # (ants, taps, n)
    return np.einsum("atn,tn->an", gains, delayed)


def mix_and_add_noise(contributions, geometry, trial_seed=0, n_rx_ants=2, noise_variance=1.0):
    """Scale, superimpose and add complex white Gaussian noise.

    Each contribution is ``(per_antenna_samples, snr_db)`` produced from a
    unit-power preamble through a power-normalised channel; it is scaled by
    ``sqrt(10**(snr_db/10) * noise_variance)`` so its expected SEQ power per
    antenna matches the SNR. Scaling uses the nominal power rather than the
    realised one so fading fluctuations are preserved.
    """
    shapes = {np.shape(c) for c, _ in contributions}
    if len(shapes) > 1:
        raise ConfigurationError(f"contributions disagree in shape: {sorted(shapes)}")
    if contributions:
        n_rx_ants = shapes.pop()[0]
    shape = (n_rx_ants, geometry.subframe_samples)

    signal = np.zeros(shape, dtype=complex)
    for samples, snr_db in contributions:
        signal = signal + np.sqrt(10.0 ** (snr_db / 10.0) * noise_variance) * samples

    rng = np.random.default_rng([trial_seed & 0xFFFFFFFFFFFFFFFF, NOISE_STREAM])
    noise = rng.standard_normal(shape + (2,)) @ np.array([1.0, 1j]) * np.sqrt(noise_variance / 2.0)
    return RxSubframe(antennas=signal + noise, noise_variance=noise_variance)
