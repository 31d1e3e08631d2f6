"""Fast consistency checks run by ``prachsim selftest``."""

import numpy as np

from ..channel import ChannelProfile, RxSubframe, apply_channel
from ..receiver import DetectorConfig, PrachReceiver
from ..waveform import FrameGeometry, synthesize_preamble
from ..zc import N_ZC, PreambleIdentity, generate_root_sequence, logical_to_physical_root, root_preambles
from .sweep import run_pfa_calibration


def run_selftest():
    """Yield ``(name, passed, detail)`` tuples."""
    x = generate_root_sequence(logical_to_physical_root(22)).samples
    ac = np.abs(np.fft.ifft(np.abs(np.fft.fft(x)) ** 2))
    yield "zc_modulus", bool(np.allclose(np.abs(x), 1, atol=1e-12)), "unit modulus"
    yield "zc_autocorrelation", bool(ac[1:].max() < 1e-9 * ac[0]), f"max off-peak {ac[1:].max():.2e}"

    geometry = FrameGeometry()
    target = PreambleIdentity()
    cfg = DetectorConfig(noise_floor="genie")
    rx_chain = PrachReceiver(root_preambles(target), cfg, geometry)
    tx = synthesize_preamble(target, geometry)
    ideal = ChannelProfile(model="ideal")
    for delay in (0, 3):
        rx = RxSubframe(apply_channel(tx, ideal, delay), 1.0)
        report = rx_chain.detect(rx)
        hit = report.find(target.preamble_index)
        ok = report.indices() == [target.preamble_index] and abs(hit.ta_seconds - delay / geometry.sample_rate) < 0.79e-6
        yield f"loopback_delay_{delay}", bool(ok), f"detected {report.indices()}"

    r = run_pfa_calibration(DetectorConfig(), 400, master_seed=7)
    yield "false_alarm_rate", bool(r.per_window_rate < 5 * r.p_fa_target), f"{r.per_window_rate:.2e} over {r.n_windows} windows"
    yield "n_zc", N_ZC == 839, str(N_ZC)
