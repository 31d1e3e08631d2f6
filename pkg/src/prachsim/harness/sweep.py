"""Monte-Carlo CDR sweeps and false-alarm calibration.

Seeds are derived from ``(master_seed, point_key, trial)`` where the point
key is the target SNR itself, so adding grid points or interferer levels
never perturbs existing trials and every interferer level sees the same
fading and noise draws at a given target SNR. Work is split into fixed
chunks whose results are reassembled in order, so the output does not
depend on the number of workers.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.stats import norm

from ..channel import NOISE_STREAM, RxSubframe, derive_seed
from ..interference import synthesize_subframe
from ..receiver import PrachReceiver, threshold_from_pfa
from ..waveform import FrameGeometry
from ..zc import PreambleIdentity, root_preambles

CHUNK = 64


def wilson_interval(k, n, confidence=0.95):
    """Wilson score interval for ``k`` successes in ``n`` trials."""
    if n <= 0:
        return (0.0, 1.0)
    z = norm.ppf(0.5 + confidence / 2)
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # the interval always contains p; clamp rounding at k = 0 and k = n
    return (min(p, max(0.0, float(centre - half))), max(p, min(1.0, float(centre + half))))


@dataclass(frozen=True)
class CdrPoint:
    scenario_kind: str
    snr_db: float
    interferer_snr_db: float
    interferer_param: str
    n_trials: int
    n_correct: int
    n_false: int
    seed: int

    @property
    def cdr(self):
        return self.n_correct / self.n_trials

    @property
    def wilson_ci_95(self):
        return wilson_interval(self.n_correct, self.n_trials)


def point_key(snr_db):
    """Integer seed key for a target SNR (milli-dB, offset to stay non-negative)."""
    return int(round(float(snr_db) * 1000)) + 1_000_000


@lru_cache(maxsize=16)
def _receiver(target, cfg, geometry):
    return PrachReceiver(root_preambles(target), cfg, geometry)


SCORING_RULES = ("contains", "exclusive")


def score_trial(report, truth, cfg, scoring="contains"):
    """``(correct, n_false)`` for one detection report.

    A trial is correct when the report holds the target's preamble with a
    timing-advance error within ``cfg.ta_tolerance_s``. Under the
    ``exclusive`` rule the report must also hold nothing else, so a detected
    interferer spoils the trial. Every other reported detection counts as a
    false detection.
    """
    p_true, ta_true = truth
    hit = report.find(p_true)
    found = hit is not None and abs(hit.ta_seconds - ta_true) <= cfg.ta_tolerance_s
    n_false = len(report.detections) - int(found)
    if scoring == "exclusive":
        return found and n_false == 0, n_false
    return found, n_false


def _run_chunk(task):
    scenario, snr_db, interferer_snr_db, master_seed, trials, scoring = task
    if interferer_snr_db is not None:
        scenario = scenario.with_interferer_snr(interferer_snr_db)
    rx_chain = _receiver(scenario.target.identity, scenario.detector, scenario.geometry)
    seed = derive_seed(master_seed, point_key(snr_db))
    n_correct = n_false = 0
    for trial in trials:
        rx, truth = synthesize_subframe(scenario, snr_db, trial, seed)
        ok, nf = score_trial(rx_chain.detect(rx), truth, scenario.detector, scoring)
        n_correct += ok
        n_false += nf
    return n_correct, n_false


def _map(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def run_cdr_sweep(spec, workers=None):
    """Correct-detection rate at every (interferer level, target SNR) pair.

    Returns a list of :class:`CdrPoint` ordered by interferer level, then
    target SNR. A scenario without interferers produces one curve.
    """
    workers = spec.workers if workers is None else workers
    scenario = spec.scenario
    levels = spec.interferer_snr_db if scenario.interferers else (None,)
    tasks, keys = [], []
    for level in levels:
        for snr in spec.snr_db_grid:
            for lo in range(0, spec.n_subframes, CHUNK):
                trials = range(lo, min(lo + CHUNK, spec.n_subframes))
                tasks.append((scenario, snr, level, spec.master_seed, trials, spec.scoring))
                keys.append((level, snr))
    totals = {}
    for key, (c, f) in zip(keys, _map(_run_chunk, tasks, workers)):
        tc, tf = totals.get(key, (0, 0))
        totals[key] = (tc + c, tf + f)
    points = []
    for level in levels:
        for snr in spec.snr_db_grid:
            c, f = totals[(level, snr)]
            points.append(
                CdrPoint(
                    scenario_kind=scenario.kind,
                    snr_db=snr,
                    interferer_snr_db=float("nan") if level is None else level,
                    interferer_param=spec.interferer_param,
                    n_trials=spec.n_subframes,
                    n_correct=c,
                    n_false=f,
                    seed=spec.master_seed,
                )
            )
    return points


@dataclass(frozen=True)
class PfaResult:
    n_subframes: int
    n_windows: int
    n_window_alarms: int
    n_subframe_alarms: int
    threshold_relative: float
    p_fa_target: float

    @property
    def per_window_rate(self):
        return self.n_window_alarms / self.n_windows

    @property
    def per_subframe_rate(self):
        return self.n_subframe_alarms / self.n_subframes

    @property
    def per_window_ci_95(self):
        return wilson_interval(self.n_window_alarms, self.n_windows)


def noise_only_subframe(geometry, n_rx_ants, seed, noise_variance=1.0):
    rng = np.random.default_rng([seed, NOISE_STREAM])
    shape = (n_rx_ants, geometry.subframe_samples)
    w = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return RxSubframe(w * np.sqrt(noise_variance / 2), noise_variance)


def _pfa_chunk(task):
    target, cfg, geometry, n_rx_ants, t_r, master_seed, trials = task
    rx_chain = _receiver(target, cfg, geometry)
    windows = alarms = frames = 0
    for trial in trials:
        report = rx_chain.detect(noise_only_subframe(geometry, n_rx_ants, derive_seed(master_seed, trial)), t_r)
        windows += len(rx_chain.root_context[2])
        alarms += len(report.detections)
        frames += bool(report.detections)
    return windows, alarms, frames


def run_pfa_calibration(
    cfg,
    n_subframes,
    master_seed=1,
    threshold_relative=None,
    target=None,
    geometry=None,
    n_rx_ants=2,
    workers=1,
):
    """Noise-only false-alarm rate through the full receive chain.

    Every signature window hosted by the target's root is one Bernoulli
    trial per subframe.
    """
    target = target or PreambleIdentity()
    geometry = geometry or FrameGeometry()
    u_ctx = root_preambles(target)
    if threshold_relative is None:
        threshold_relative = threshold_from_pfa(cfg.p_fa_target, n_rx_ants * cfg.n_nca, cfg.window_length(u_ctx[1]))
    tasks = [
        (target, cfg, geometry, n_rx_ants, threshold_relative, master_seed, range(lo, min(lo + CHUNK * 4, n_subframes)))
        for lo in range(0, n_subframes, CHUNK * 4)
    ]
    w = a = f = 0
    for dw, da, df in _map(_pfa_chunk, tasks, workers):
        w, a, f = w + dw, a + da, f + df
    return PfaResult(n_subframes, w, a, f, float(threshold_relative), cfg.p_fa_target)
