"""Frequency-domain PRACH receiver and matched-filter signature detector.

Processing chain per receive antenna: CP/GP removal, frequency shift of the
PRACH band to DC, decimation (identity at 1.92 MS/s), unitary FFT, extraction
of the 839 PRACH bins, multiplication by the conjugate root spectrum, and a
zero-padded ``n_ca``-point transform to the delay domain. Squared magnitudes
are summed over antennas (and repetitions) into the power delay profile.

Delay-domain orientation: a preamble with cyclic shift ``C_v`` and no delay
peaks at ``C_v * n_ca / 839``. A propagation delay moves the peak to *lower*
indices, so each signature's search window starts at its zone boundary and
extends backwards.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil

import numpy as np
from scipy import special

from .errors import ConfigurationError
from .waveform import FrameGeometry
from .zc import N_ZC, generate_root_sequence

NOISE_FLOOR_CENSOR = 0.05


@dataclass(frozen=True)
class DetectorConfig:
    n_ca: int = 1024
    n_nca: int = 1
    p_fa_target: float = 0.001
    search_window_samples: int = None
    ta_tolerance_s: float = 1.04e-6
    noise_floor: str = "estimate"
    peak_guard_samples: int = 3
    taper_beta: float = 2.0
    sidelobe_rejection_db: float = 20.0

    def __post_init__(self):
        if self.n_ca < N_ZC:
            raise ConfigurationError(f"n_ca={self.n_ca} must be at least {N_ZC}")
        if self.n_nca < 1:
            raise ConfigurationError("n_nca must be at least 1")
        if not 0.0 < self.p_fa_target < 1.0:
            raise ConfigurationError(f"p_fa_target={self.p_fa_target} outside (0, 1)")
        if self.search_window_samples is not None and self.search_window_samples < 1:
            raise ConfigurationError("search window must be at least one sample")
        if self.noise_floor not in ("estimate", "genie"):
            raise ConfigurationError(f"noise floor mode {self.noise_floor!r} not in ('estimate', 'genie')")
        if self.ta_tolerance_s <= 0:
            raise ConfigurationError("ta_tolerance_s must be positive")
        if self.peak_guard_samples < 0:
            raise ConfigurationError("peak_guard_samples must be non-negative")
        if self.taper_beta < 0:
            raise ConfigurationError("taper_beta must be non-negative")
        if self.sidelobe_rejection_db is not None and self.sidelobe_rejection_db <= 0:
            raise ConfigurationError("sidelobe_rejection_db must be positive (or None to disable)")

    def window_length(self, n_cs):
        """Search window in PDP samples, capped at the zone width."""
        zone = (n_cs if n_cs else N_ZC) * self.n_ca // N_ZC
        if self.search_window_samples is None:
            return zone
        if self.search_window_samples > zone:
            raise ConfigurationError(
                f"search window {self.search_window_samples} exceeds the zone width of {zone} samples"
            )
        return self.search_window_samples


@dataclass(frozen=True, eq=False)
class PowerDelayProfile:
    values: np.ndarray
    noise_floor: float
    n_acc: int


@dataclass(frozen=True)
class Detection:
    preamble_index: int
    peak_value: float
    peak_offset_samples: int
    ta_seconds: float


@dataclass(frozen=True)
class DetectionReport:
    detections: tuple = ()
    threshold_relative: float = float("nan")
    threshold_absolute: float = float("nan")

    def indices(self):
        return [d.preamble_index for d in self.detections]

    def find(self, preamble_index):
        for d in self.detections:
            if d.preamble_index == preamble_index:
                return d
        return None


def remove_cp_gp(rx, geometry):
    """Keep samples ``[cp, cp + seq)`` of every antenna."""
    antennas = np.atleast_2d(rx.antennas if hasattr(rx, "antennas") else rx)
    if antennas.shape[-1] != geometry.subframe_samples:
        raise ValueError(f"expected {geometry.subframe_samples} samples, got {antennas.shape[-1]}")
    return antennas[..., geometry.seq_slice]


@lru_cache(maxsize=8)
def _band_shift(first_bin, seq_samples):
    n = np.arange(seq_samples)
    return np.exp(-2j * np.pi * ((first_bin * n) % seq_samples) / seq_samples)


def decimate(seq_time, geometry):
    """Rate reduction to ``839 * prach_scs``-compatible sampling; identity at 1.92 MS/s."""
    return seq_time


def demap_subcarriers(seq_time, geometry):
    """Return the 839 PRACH bins of each antenna's SEQ portion.

    Exact inverse of ``map_to_subcarriers`` followed by ``ofdm_modulate``.
    """
    seq_time = np.atleast_2d(seq_time)
    if seq_time.shape[-1] != geometry.seq_samples:
        raise ValueError(f"expected {geometry.seq_samples} samples, got {seq_time.shape[-1]}")
    shifted = seq_time * _band_shift(geometry.first_bin, geometry.seq_samples)
    spectrum = np.fft.fft(decimate(shifted, geometry), axis=-1, norm="ortho")
    return spectrum[..., :N_ZC]


@lru_cache(maxsize=64)
def root_spectrum(u):
    """Unit-modulus DFT of root ``u`` (cached, read-only)."""
    spec = np.fft.fft(generate_root_sequence(u).samples) / np.sqrt(N_ZC)
    spec.flags.writeable = False
    return spec


@lru_cache(maxsize=8)
def spectral_taper(beta, n=N_ZC):
    """Kaiser taper over the PRACH bins, scaled to unit mean power (all ones for beta=0)."""
    w = np.kaiser(n, beta) if beta else np.ones(n)
    w = w / np.sqrt(np.mean(w**2))
    w.flags.writeable = False
    return w


def correlate_root(demapped, root, cfg):
    """Delay-domain correlation of the demapped bins with a root sequence.

    With ``cfg.taper_beta = 0`` output sample ``m`` is proportional to
    ``sum_n y(n) conj(x_u(n + m))`` evaluated on an ``n_ca``-point grid. The
    default Kaiser taper trades about 0.2 dB of matched-filter gain for
    interpolation sidelobes low enough not to trigger neighbouring windows.
    Scaling makes white noise of variance sigma^2 per input sample come out
    with variance ``n_ca * sigma^2``.

    Parameters
    ----------
    demapped : ndarray, shape (..., 839)
    root : ZcRootSequence or int
    cfg : DetectorConfig
    """
    u = root if isinstance(root, (int, np.integer)) else root.u
    product = np.asarray(demapped) * (np.conj(root_spectrum(int(u))) * spectral_taper(float(cfg.taper_beta)))
    return np.fft.fft(product, n=cfg.n_ca, axis=-1) * np.sqrt(cfg.n_ca / N_ZC)


def accumulate_pdp(delay_domain, cfg, noise_variance=None):
    """Non-coherent accumulation over antennas and repetitions.

    ``delay_domain`` has shape ``(n_ant, n_ca)`` or ``(n_ant, n_rep, n_ca)``.
    The noise floor is estimated from the profile itself unless the detector
    runs in genie mode, where ``N * n_ca * noise_variance`` is used.
    """
    z = np.asarray(delay_domain)
    if z.ndim == 1:
        z = z[None, :]
    if z.ndim == 2:
        z = z[:, None, :]
    n_acc = z.shape[0] * z.shape[1]
    values = np.sum(np.abs(z) ** 2, axis=(0, 1))
    if cfg.noise_floor == "genie":
        if noise_variance is None:
            raise ConfigurationError("genie noise floor needs the noise variance")
        floor = n_acc * cfg.n_ca * noise_variance
    else:
        floor = estimate_noise_floor(values, n_acc)
    return PowerDelayProfile(values=values, noise_floor=floor, n_acc=n_acc)


@lru_cache(maxsize=64)
def censoring_correction(n_acc, n_values, censor=NOISE_FLOOR_CENSOR):
    """Factor turning the censored mean of Gamma(n_acc) samples into the true mean.

    With ``r = ceil(censor * n)`` largest values dropped and ``p = 1 - r/n``,
    the kept mean is ``n_acc * P(n_acc + 1, x_p) / p`` for the Gamma quantile
    ``x_p``, so the correction is ``p / P(n_acc + 1, x_p)``.
    """
    r = ceil(censor * n_values)
    p = 1.0 - r / n_values
    x_p = special.gammaincinv(n_acc, p)
    return p / special.gammainc(n_acc + 1, x_p)


def estimate_noise_floor(values, n_acc=1, censor=NOISE_FLOOR_CENSOR):
    """Mean of the PDP after dropping its top ``ceil(censor * n)`` samples, bias-corrected.

    Noise-only PDP samples are Gamma(n_acc)-distributed up to scale; the
    correction from ``censoring_correction`` makes the estimate unbiased for
    that family. Constant inputs therefore come back multiplied by the same
    factor.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    r = ceil(censor * n)
    kept = np.partition(values, n - r - 1)[: n - r]
    return float(kept.mean() * censoring_correction(int(n_acc), n, censor))


def threshold_from_pfa(p_fa_target, n_acc, window_len):
    """Detection threshold relative to the noise floor.

    A window of ``L`` independent samples false-alarms with probability
    ``1 - F(T)^L``; each sample is chi-square with ``2 * n_acc`` degrees of
    freedom, i.e. Gamma(n_acc) in units of the per-branch variance.
    """
    if not 0.0 < p_fa_target < 1.0:
        raise ConfigurationError(f"p_fa_target={p_fa_target} outside (0, 1)")
    if n_acc < 1 or window_len < 1:
        raise ConfigurationError("n_acc and window length must be at least 1")
    q = -np.expm1(np.log1p(-p_fa_target) / window_len)
    return float(special.gammainccinv(n_acc, q) / n_acc)


def ta_from_peak(peak_offset_samples, window_start, cfg, geometry):
    """Timing advance in seconds for a peak found ``k`` bins behind its window start."""
    lag = (window_start - peak_offset_samples) % cfg.n_ca
    return lag * geometry.seq_duration / cfg.n_ca


def _neighbourhood_max(values, guard):
    """Circular running maximum over ``[i - guard, i + guard]``."""
    out = values.copy()
    for s in range(1, guard + 1):
        out = np.maximum(out, np.maximum(np.roll(values, s), np.roll(values, -s)))
    return out


def window_start(c_v, cfg):
    return int(round(c_v * cfg.n_ca / N_ZC)) % cfg.n_ca


def detect_signatures(pdp, root_context, cfg, geometry=None, threshold_relative=None):
    """Peak search in every signature window hosted by one root.

    A window's maximum is reported when it exceeds ``T_r * noise_floor`` and
    no sample within ``cfg.peak_guard_samples`` of it is larger; the second
    condition rejects interpolation sidelobes of a strong peak in the
    neighbouring zone. Far sidelobes of the tapered correlator sit about
    25 dB below their peak, so window maxima more than
    ``cfg.sidelobe_rejection_db`` below the strongest PDP sample are
    dropped as well; this only binds when some signature is received far
    above the noise floor.

    Parameters
    ----------
    pdp : PowerDelayProfile
    root_context : tuple
        ``(u, n_cs, hosted)`` with ``hosted`` a list of ``(preamble_index, v)``,
        as returned by :func:`prachsim.zc.root_preambles`.
    cfg : DetectorConfig
    geometry : FrameGeometry, optional
        Needed for timing-advance conversion; defaults to format 0 at 6 RB.
    threshold_relative : float, optional
        Overrides the threshold derived from ``cfg.p_fa_target``.
    """
    geometry = geometry or FrameGeometry()
    _, n_cs, hosted = root_context
    L = cfg.window_length(n_cs)
    if threshold_relative is None:
        threshold_relative = threshold_from_pfa(cfg.p_fa_target, pdp.n_acc, L)
    t_det = threshold_relative * pdp.noise_floor
    if cfg.sidelobe_rejection_db is not None:
        floor_from_peak = float(np.max(pdp.values)) * 10.0 ** (-cfg.sidelobe_rejection_db / 10.0)
    else:
        floor_from_peak = 0.0

    back = np.arange(L)
    g = cfg.peak_guard_samples
    local_max = _neighbourhood_max(pdp.values, g) if g else pdp.values
    detections = []
    for preamble_index, v in hosted:
        start = window_start(v * n_cs, cfg)
        idx = (start - back) % cfg.n_ca
        win = pdp.values[idx]
        k = int(np.argmax(win))
        # a window maximum sitting on the flank of a larger peak just outside is an interpolation sidelobe
        if win[k] > t_det and win[k] >= local_max[idx[k]] and win[k] >= floor_from_peak:
            detections.append(
                Detection(
                    preamble_index=preamble_index,
                    peak_value=float(win[k]),
                    peak_offset_samples=int(idx[k]),
                    ta_seconds=ta_from_peak(int(idx[k]), start, cfg, geometry),
                )
            )
    return DetectionReport(tuple(detections), threshold_relative, t_det)


@dataclass(frozen=True, eq=False)
class PrachReceiver:
    """Full receive chain for the cell whose preambles live on ``root_context``'s root."""

    root_context: tuple
    cfg: DetectorConfig = field(default_factory=DetectorConfig)
    geometry: FrameGeometry = field(default_factory=FrameGeometry)

    def pdp(self, rx):
        bins = demap_subcarriers(remove_cp_gp(rx, self.geometry), self.geometry)
        z = correlate_root(bins, int(self.root_context[0]), self.cfg)
        if self.cfg.n_nca != 1:
            # format 0 carries one sequence; repetitions would stack on axis 1
            raise ConfigurationError("format 0 has no sequence repetition (n_nca must be 1)")
        return accumulate_pdp(z, self.cfg, getattr(rx, "noise_variance", None))

    def detect(self, rx, threshold_relative=None):
        return detect_signatures(self.pdp(rx), self.root_context, self.cfg, self.geometry, threshold_relative)
