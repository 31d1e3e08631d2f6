"""Trend checks over the interference scenarios.

Each check runs paired-seed CDR curves (every curve shares the fading and
noise draws of the target at a given SNR) and compares them against the
qualitative behaviour expected of an interference-limited detector:

* O1/O2: intra-cell CDR does not improve when the interferer gets louder.
* O3/O7: at low interference the interferer's preamble index (intra-cell)
  or root (inter-cell) does not matter.
* O5/O6: inter-cell CDR does not improve when the interferer gets louder.
* O4/O8: at elevated interference the choice may matter. These are
  reported for information only.
"""

from dataclasses import dataclass, replace

from ..interference import make_inter_cell, make_intra_cell
from .sweep import run_cdr_sweep, wilson_interval

QUICK_SUBFRAMES = 200
DEFAULT_SUBFRAMES = 500
SATURATED = 0.999

INTRA_LEVELS = (-27.0, -17.0)
INTRA_PREAMBLES = (0, 3, 37, 42, 63)
INTRA_ELEVATED = -23.0
INTER_LEVELS = (-24.0, -9.0)
INTER_ROOTS = (0, 1, 2, 3, 4)
INTER_PREAMBLE = 3


@dataclass(frozen=True)
class ObservationResult:
    name: str
    status: str  # "pass", "fail" or "info"
    detail: str
    curves: dict

    @property
    def passed(self):
        return self.status != "fail"


def check_trend(low, high):
    """Compare a low-interference curve against a high-interference one.

    ``low`` and ``high`` are lists of :class:`CdrPoint` on the same grid.
    Only points where the low-interference CDR is below saturation count.
    A point violates the trend when the high-interference CDR exceeds the
    low-interference CDR with disjoint 95% intervals; the trend must also
    be resolved (disjoint intervals in the expected direction) at one
    point or more. Returns ``(ok, n_reversed, n_resolved, n_checked)``.
    """
    reversed_, resolved, checked = 0, 0, 0
    for a, b in zip(low, high):
        if a.cdr >= SATURATED:
            continue
        checked += 1
        lo_a, hi_a = a.wilson_ci_95
        lo_b, hi_b = b.wilson_ci_95
        if lo_b > hi_a:
            reversed_ += 1
        if hi_b < lo_a:
            resolved += 1
    return reversed_ == 0 and resolved >= 1, reversed_, resolved, checked


def strict_reversals(low, high):
    """Grid points where the louder interferer gave a strictly higher CDR."""
    return sum(b.n_correct > a.n_correct for a, b in zip(low, high) if a.cdr < SATURATED)


def check_spread(curves):
    """Max-min CDR spread against the pooled 95% interval width, per SNR.

    The pooled width is the Wilson width at the pooled rate with one
    curve's trial count. Returns ``(ok, worst_margin)`` with the margin
    ``spread - width`` (negative is good).
    """
    worst = float("-inf")
    for column in zip(*curves):
        n = column[0].n_trials
        rates = [p.cdr for p in column]
        pooled = sum(p.n_correct for p in column) / (n * len(column))
        lo, hi = wilson_interval(round(pooled * n), n)
        worst = max(worst, (max(rates) - min(rates)) - (hi - lo))
    return worst <= 0, worst


class _Runner:
    def __init__(self, base, n_subframes, workers):
        self.base = base
        self.n = n_subframes
        self.workers = workers
        self.cache = {}
        s = base.scenario
        self.parts = {"channel": s.target.channel, "geometry": s.geometry, "detector": s.detector}

    def curve(self, kind, param, level):
        key = (kind, param, level)
        if key not in self.cache:
            target = self.base.scenario.target.identity
            if kind == "intra_cell":
                sc = make_intra_cell(target, [param], level, self.parts)
                label = f"preamble={param}"
            else:
                sc = make_inter_cell(target, [param], INTER_PREAMBLE, level, self.parts)
                label = f"root={param}"
            spec = replace(
                self.base,
                scenario=sc,
                interferer_snr_db=(level,),
                n_subframes=self.n,
                interferer_param=label,
            )
            self.cache[key] = run_cdr_sweep(spec, self.workers)
        return self.cache[key]


def _fmt(points):
    return " ".join(f"{p.cdr:.3f}" for p in points)


def run_observation_suite(base_config, quick=False, n_subframes=None, workers=None, only=None):
    """Run the O1..O8 checks and return a list of :class:`ObservationResult`.

    ``base_config`` is a :class:`SweepSpec`; its target, channel, detector,
    SNR grid and seed are reused. ``only`` restricts the run to the named
    checks, e.g. ``{"O1", "O2"}``.
    """
    n = n_subframes or (QUICK_SUBFRAMES if quick else DEFAULT_SUBFRAMES)
    run = _Runner(base_config, n, base_config.workers if workers is None else workers)
    target = base_config.scenario.target.identity
    results = []

    def want(name):
        return only is None or name in only

    for name, preamble in (("O1", 0), ("O2", 37)):
        if not want(name):
            continue
        low, high = (run.curve("intra_cell", preamble, lv) for lv in INTRA_LEVELS)
        ok, rev, res, chk = check_trend(low, high)
        results.append(
            ObservationResult(
                name,
                "pass" if ok else "fail",
                f"intra-cell preamble {preamble}: {INTRA_LEVELS[1]:g} dB vs {INTRA_LEVELS[0]:g} dB over {chk} points, "
                f"{rev} significant reversals, {strict_reversals(low, high)} strict reversals, "
                f"{res} resolved (need >= 1); CDR {_fmt(low)} | {_fmt(high)}",
                {INTRA_LEVELS[0]: low, INTRA_LEVELS[1]: high},
            )
        )

    spread_checks = (
        ("O3", "intra_cell", [p for p in INTRA_PREAMBLES if p != target.preamble_index], INTRA_LEVELS[0], "pass"),
        ("O4", "intra_cell", [p for p in INTRA_PREAMBLES if p != target.preamble_index], INTRA_ELEVATED, "info"),
        ("O7", "inter_cell", [r for r in INTER_ROOTS if r != target.logical_root_index], INTER_LEVELS[0], "pass"),
        ("O8", "inter_cell", [r for r in INTER_ROOTS if r != target.logical_root_index], INTER_LEVELS[1], "info"),
    )
    for name, kind, params, level, mode in spread_checks[:2]:
        if want(name):
            results.append(_spread(run, name, kind, params, level, mode))

    for name, root in (("O5", 0), ("O6", 4)):
        if not want(name):
            continue
        low, high = (run.curve("inter_cell", root, lv) for lv in INTER_LEVELS)
        ok, rev, res, chk = check_trend(low, high)
        results.append(
            ObservationResult(
                name,
                "pass" if ok else "fail",
                f"inter-cell root {root}: {INTER_LEVELS[1]:g} dB vs {INTER_LEVELS[0]:g} dB over {chk} points, "
                f"{rev} significant reversals, {strict_reversals(low, high)} strict reversals, "
                f"{res} resolved (need >= 1); CDR {_fmt(low)} | {_fmt(high)}",
                {INTER_LEVELS[0]: low, INTER_LEVELS[1]: high},
            )
        )

    for name, kind, params, level, mode in spread_checks[2:]:
        if want(name):
            results.append(_spread(run, name, kind, params, level, mode))
    return results


def _spread(run, name, kind, params, level, mode):
    curves = {p: run.curve(kind, p, level) for p in params}
    ok, margin = check_spread(list(curves.values()))
    what = "preamble" if kind == "intra_cell" else "root"
    if mode == "info":
        status = "info"
        verdict = "sensitive" if not ok else "insensitive"
        detail = f"{kind} at {level:g} dB across {what}s {params}: {verdict} (spread minus CI width {margin:+.3f})"
    else:
        status = "pass" if ok else "fail"
        detail = f"{kind} at {level:g} dB across {what}s {params}: worst spread minus CI width {margin:+.3f}"
    return ObservationResult(name, status, detail, curves)
