"""Format-0 preamble synthesis: subcarrier mapping and CP + SEQ + GP framing."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, UnsupportedFeatureError
from .zc import N_ZC, PreambleIdentity, cyclic_shift, generate_root_sequence, resolve_preamble

# Base time unit 1/30.72 MHz; format-0 CP and SEQ lengths in that unit.
BASE_RATE = 30.72e6
FORMAT0_CP_TS = 3168
FORMAT0_SEQ_TS = 24576
PRACH_SCS = 1250.0
PUSCH_SCS = 15000.0
SC_PER_RB = 12
PRACH_RB = 6
# PRACH subcarriers per 15 kHz subcarrier, and the guard before the first used subcarrier
PRACH_SC_RATIO = int(PUSCH_SCS // PRACH_SCS)
HALF_GUARD = 7

_SAMPLE_RATES = {6: 1.92e6}


@dataclass(frozen=True)
class FrameGeometry:
    n_ulrb: int = 6
    sample_rate: float = 1.92e6
    subframe_samples: int = 1920
    cp_samples: int = 198
    seq_samples: int = 1536
    gp_samples: int = 186
    prach_scs: float = PRACH_SCS
    freq_offset_rb: int = 0

    @property
    def first_bin(self):
        """Signed index (in PRACH subcarriers, relative to DC) of the first used bin.

        Includes the half-subcarrier shift of the uplink grid, so for a 6-RB
        carrier the 839 bins sit symmetrically at -419..419.
        """
        k0 = self.freq_offset_rb * SC_PER_RB - self.n_ulrb * SC_PER_RB // 2
        return PRACH_SC_RATIO * k0 + PRACH_SC_RATIO // 2 + HALF_GUARD

    @property
    def seq_duration(self):
        return self.seq_samples / self.sample_rate

    @property
    def seq_slice(self):
        return slice(self.cp_samples, self.cp_samples + self.seq_samples)


@dataclass(frozen=True, eq=False)
class PreambleWaveform:
    samples: np.ndarray
    identity: PreambleIdentity
    geometry: FrameGeometry


def derive_geometry(n_ulrb=6, prach_format=0, freq_offset_rb=0):
    """Sample-level layout of a format-0 PRACH subframe.

    Only the 6-RB carrier (1.92 MS/s) is supported; at that rate the SEQ
    transform bins are exactly the 1.25 kHz PRACH subcarriers.
    """
    if prach_format != 0:
        raise UnsupportedFeatureError(f"PRACH format {prach_format} is not modelled (format 0 only)")
    if n_ulrb not in _SAMPLE_RATES:
        raise UnsupportedFeatureError(f"NULRB={n_ulrb} is not modelled (6 only)")
    if not 0 <= freq_offset_rb <= n_ulrb - PRACH_RB:
        raise ConfigurationError(f"frequency offset {freq_offset_rb} RB outside [0, {n_ulrb - PRACH_RB}]")
    fs = _SAMPLE_RATES[n_ulrb]
    scale = fs / BASE_RATE
    cp = int(round(FORMAT0_CP_TS * scale))
    seq = int(round(FORMAT0_SEQ_TS * scale))
    subframe = int(round(1e-3 * fs))
    geometry = FrameGeometry(
        n_ulrb=n_ulrb,
        sample_rate=fs,
        subframe_samples=subframe,
        cp_samples=cp,
        seq_samples=seq,
        gp_samples=subframe - cp - seq,
        prach_scs=PRACH_SCS,
        freq_offset_rb=freq_offset_rb,
    )
    assert geometry.seq_samples * geometry.prach_scs == geometry.sample_rate
    return geometry


def prach_bins(geometry):
    """FFT-grid indices of the 839 PRACH subcarriers, in subcarrier order."""
    return (geometry.first_bin + np.arange(N_ZC)) % geometry.seq_samples


def map_to_subcarriers(shifted_seq, geometry):
    shifted_seq = np.asarray(shifted_seq)
    if shifted_seq.shape != (N_ZC,):
        raise ValueError(f"expected {N_ZC} values, got shape {shifted_seq.shape}")
    grid = np.zeros(geometry.seq_samples, dtype=complex)
    grid[prach_bins(geometry)] = shifted_seq
    return grid


def ofdm_modulate(grid):
    """Unitary inverse transform of a frequency grid to one SEQ-length symbol."""
    return np.fft.ifft(grid, norm="ortho")


def synthesize_preamble(identity, geometry, amplitude=1.0):
    """Build the time-domain preamble for ``identity``.

    The shifted ZC sequence is DFT-precoded, mapped onto the PRACH
    subcarriers and transformed back to time. The SEQ part is scaled to a
    mean sample power of ``amplitude**2``; the CP repeats its tail and the
    GP is left empty.
    """
    u, plan = resolve_preamble(identity)
    shifted = cyclic_shift(generate_root_sequence(u), plan.c_v)
    grid = map_to_subcarriers(np.fft.fft(shifted), geometry)
    seq = ofdm_modulate(grid)
    # Parseval: mean |seq|^2 = sum |grid|^2 / seq_samples
    seq *= amplitude * np.sqrt(geometry.seq_samples / np.sum(np.abs(grid) ** 2))

    samples = np.zeros(geometry.subframe_samples, dtype=complex)
    samples[geometry.seq_slice] = seq
    samples[: geometry.cp_samples] = seq[geometry.seq_samples - geometry.cp_samples :]
    return PreambleWaveform(samples=samples, identity=identity, geometry=geometry)
