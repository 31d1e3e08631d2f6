"""YAML configuration documents for sweeps.

Every key lives under one of the namespaces ``ue``, ``prach``, ``channel``,
``detector`` and ``sweep``. Nested mappings and dotted keys
(``prach.preamble_index: 40``) may be mixed. An empty document yields the
reference setup: 6 RB FDD carrier, format 0, logical root 22, preamble 32,
two receive antennas on ETU with 70 Hz Doppler, and a single intra-cell
interferer on preamble 0.
"""

from dataclasses import dataclass, replace

import yaml

from ..channel import ChannelProfile, delay_profile
from ..errors import ConfigurationError, UnsupportedFeatureError
from ..interference import Scenario, UeDescriptor, make_inter_cell, make_intra_cell
from ..receiver import DetectorConfig
from ..waveform import derive_geometry
from ..zc import MAX_LOGICAL_ROOT, N_PREAMBLES, PreambleIdentity, ncs_from_config, resolve_preamble

_ON = {"on": True, "off": False}


@dataclass(frozen=True)
class SweepSpec:
    snr_db_grid: tuple
    interferer_snr_db: tuple
    n_subframes: int
    master_seed: int
    scenario: Scenario
    workers: int = 1
    interferer_param: str = ""
    scoring: str = "contains"

    def __post_init__(self):
        grid = tuple(float(s) for s in self.snr_db_grid)
        object.__setattr__(self, "snr_db_grid", grid)
        levels = self.interferer_snr_db
        if isinstance(levels, (int, float)):
            levels = (levels,)
        object.__setattr__(self, "interferer_snr_db", tuple(float(s) for s in levels))
        if not grid:
            raise ConfigurationError("target SNR grid is empty", "sweep.snr_db")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("target SNR grid must be strictly increasing", "sweep.snr_db")
        if self.n_subframes < 1:
            raise ConfigurationError("need at least one subframe per point", "sweep.n_subframes")
        if self.workers < 1:
            raise ConfigurationError("need at least one worker", "sweep.workers")
        if self.scoring not in ("contains", "exclusive"):
            raise ConfigurationError(f"unknown scoring rule {self.scoring!r}", "sweep.scoring")


# key -> (type, default). Types: int, float, str, bool, "onoff", "float?", "int?", "intlist", "floatlist"
SCHEMA = {
    "ue": {
        "n_ulrb": (int, 6),
        "duplex_mode": (str, "FDD"),
        "cyclic_prefix_ul": (str, "Normal"),
        "n_tx_ants": (int, 1),
        "timing_offset_samples": (float, 0.0),
        "interferer_timing_offset_samples": (float, 0.0),
    },
    "prach": {
        "format": (int, 0),
        "seq_idx": (int, 22),
        "cyclic_shift_idx": (int, 1),
        "high_speed": ("onoff", False),
        "freq_offset": (int, 0),
        "preamble_index": (int, 32),
        "interferer": {
            "seq_idx": ("intlist", None),
            "preamble_index": ("intlist", [0]),
        },
    },
    "channel": {
        "n_rx_ants": (int, 2),
        "delay_profile": (str, "ETU"),
        "doppler_freq": (float, 70.0),
        "mimo_correlation": (str, "Low"),
        "seed": (int, 1),
        "n_terms": (int, 16),
        "model_type": (str, "GMEDS"),
        "init_phase": (str, "Random"),
        "normalize_path_gains": ("onoff", True),
        "normalize_tx_ants": ("onoff", True),
    },
    "detector": {
        "n_ca": (int, 1024),
        "n_nca": (int, 1),
        "p_fa": (float, 0.001),
        "search_window": ("int?", None),
        "ta_tolerance_us": (float, 1.04),
        "noise_floor": (str, "estimate"),
        "peak_guard": (int, 3),
        "taper_beta": (float, 2.0),
        "sidelobe_rejection_db": ("float?", 20.0),
    },
    "sweep": {
        "scenario": (str, "intra_cell"),
        "snr_db": ("floatlist", [-28.0, -26.0, -24.0, -22.0, -20.0, -18.0, -16.0, -14.0, -12.0]),
        "interferer_snr_db": ("floatlist", [-27.0]),
        "n_subframes": (int, 1000),
        "seed": (int, 1),
        "workers": (int, 1),
        "scoring": (str, "contains"),
    },
}


def _expand_dotted(doc, path=""):
    out = {}
    for key, value in doc.items():
        if not isinstance(key, str):
            raise ConfigurationError("keys must be strings", f"{path}{key}")
        head, *rest = key.split(".")
        if rest:
            value = {".".join(rest): value}
        if isinstance(value, dict):
            value = _expand_dotted(value, f"{path}{head}.")
            existing = out.setdefault(head, {})
            if not isinstance(existing, dict):
                raise ConfigurationError("given both as a value and as a section", f"{path}{head}")
            _merge(existing, value, f"{path}{head}.")
        else:
            if head in out:
                raise ConfigurationError("given more than once", f"{path}{head}")
            out[head] = value
    return out


def _merge(dst, src, path):
    for k, v in src.items():
        if k in dst and isinstance(dst[k], dict) and isinstance(v, dict):
            _merge(dst[k], v, f"{path}{k}.")
        elif k in dst:
            raise ConfigurationError("given more than once", f"{path}{k}")
        else:
            dst[k] = v


def _coerce(kind, value, key):
    def bad(expected):
        return ConfigurationError(f"expected {expected}, got {value!r}", key)

    if kind is bool or kind == "onoff":
        if isinstance(value, bool):
            return value
        if isinstance(value, int) and value in (0, 1):
            return bool(value)
        if isinstance(value, str) and value.strip().lower() in _ON:
            return _ON[value.strip().lower()]
        raise bad("On/Off")
    if kind is int or kind == "int?":
        if value is None and kind == "int?":
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            raise bad("an integer")
        return value
    if kind is float or kind == "float?":
        if value is None and kind == "float?":
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise bad("a number")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise bad("a string")
        return value
    if kind in ("intlist", "floatlist"):
        if value is None and kind == "intlist":
            return None
        items = value if isinstance(value, list) else [value]
        elem = int if kind == "intlist" else float
        return [_coerce(elem, v, f"{key}[{i}]") for i, v in enumerate(items)]
    raise AssertionError(kind)


def _resolve(schema, doc, path=""):
    unknown = set(doc) - set(schema)
    if unknown:
        raise ConfigurationError("unknown key", f"{path}{sorted(unknown)[0]}")
    out = {}
    for key, spec in schema.items():
        full = f"{path}{key}"
        if isinstance(spec, dict):
            sub = doc.get(key, {})
            if not isinstance(sub, dict):
                raise ConfigurationError("expected a mapping", full)
            out[key] = _resolve(spec, sub, f"{full}.")
        else:
            kind, default = spec
            out[key] = _coerce(kind, doc[key], full) if key in doc else default
    return out


def _require(value, allowed, key):
    if str(value).lower() not in {a.lower() for a in allowed}:
        raise UnsupportedFeatureError(f"{value!r} is not modelled (supported: {', '.join(allowed)})", key)


def _build(cfg):
    ue, prach, ch, det, sw = cfg["ue"], cfg["prach"], cfg["channel"], cfg["detector"], cfg["sweep"]
    _require(ue["duplex_mode"], ["FDD"], "ue.duplex_mode")
    _require(ue["cyclic_prefix_ul"], ["Normal"], "ue.cyclic_prefix_ul")
    if ue["n_tx_ants"] != 1:
        raise UnsupportedFeatureError("only one transmit antenna is modelled", "ue.n_tx_ants")
    _require(ch["mimo_correlation"], ["Low"], "channel.mimo_correlation")
    _require(ch["init_phase"], ["Random"], "channel.init_phase")
    _require(ch["model_type"], ["GMEDS", "Ideal"], "channel.model_type")
    if not ch["normalize_tx_ants"]:
        raise UnsupportedFeatureError("un-normalised transmit antennas are not modelled", "channel.normalize_tx_ants")

    def guarded(key, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigurationError as exc:
            if exc.key is not None:
                raise
            raise type(exc)(str(exc), key) from None

    geometry = guarded("prach.format", derive_geometry, ue["n_ulrb"], prach["format"], prach["freq_offset"])
    for key, hi in (("seq_idx", MAX_LOGICAL_ROOT), ("preamble_index", N_PREAMBLES - 1), ("cyclic_shift_idx", 15)):
        if not 0 <= prach[key] <= hi:
            raise ConfigurationError(f"{prach[key]} outside [0, {hi}]", f"prach.{key}")
    if prach["high_speed"]:
        raise UnsupportedFeatureError("restricted (high-speed) cyclic shift sets are not modelled", "prach.high_speed")
    target = guarded(
        "prach",
        PreambleIdentity,
        logical_root_index=prach["seq_idx"],
        preamble_index=prach["preamble_index"],
        cyclic_shift_idx=prach["cyclic_shift_idx"],
        high_speed=prach["high_speed"],
    )
    # resolve early so a root overflow is reported against its key
    guarded("prach.cyclic_shift_idx", resolve_preamble, target)

    delays, powers = guarded("channel.delay_profile", delay_profile, ch["delay_profile"])
    channel = guarded(
        "channel",
        ChannelProfile,
        n_rx_ants=ch["n_rx_ants"],
        tap_delays_ns=delays,
        tap_powers_db=powers,
        doppler_hz=ch["doppler_freq"],
        n_terms=ch["n_terms"],
        mimo_correlation=ch["mimo_correlation"].lower(),
        model="ideal" if ch["model_type"].lower() == "ideal" else "gmeds_rayleigh",
        normalize_path_gains=ch["normalize_path_gains"],
        seed=ch["seed"],
    )
    detector = guarded(
        "detector",
        DetectorConfig,
        n_ca=det["n_ca"],
        n_nca=det["n_nca"],
        p_fa_target=det["p_fa"],
        search_window_samples=det["search_window"],
        ta_tolerance_s=det["ta_tolerance_us"] * 1e-6,
        noise_floor=det["noise_floor"],
        peak_guard_samples=det["peak_guard"],
        taper_beta=det["taper_beta"],
        sidelobe_rejection_db=det["sidelobe_rejection_db"],
    )
    guarded("detector.search_window", detector.window_length, ncs_from_config(prach["cyclic_shift_idx"]))

    base = {"channel": channel, "geometry": geometry, "detector": detector}
    levels = sw["interferer_snr_db"]
    first = levels[0] if levels else float("-inf")
    kind = sw["scenario"]
    roots = prach["interferer"]["seq_idx"]
    preambles = prach["interferer"]["preamble_index"]
    offset = ue["interferer_timing_offset_samples"]

    if kind == "intra_cell":
        if roots not in (None, [prach["seq_idx"]]):
            raise ConfigurationError("intra-cell interferers use the target's root", "prach.interferer.seq_idx")
        scenario = guarded("prach.interferer.preamble_index", make_intra_cell, target, preambles, first, base)
        param = ";".join(f"preamble={p}" for p in preambles)
    elif kind == "inter_cell":
        if roots is None:
            raise ConfigurationError("inter-cell scenarios need interferer roots", "prach.interferer.seq_idx")
        if len(preambles) != 1:
            raise ConfigurationError("inter-cell scenarios take one interferer preamble", "prach.interferer.preamble_index")
        scenario = guarded("prach.interferer.seq_idx", make_inter_cell, target, roots, preambles[0], first, base)
        param = ";".join(f"root={r}" for r in roots)
    elif kind == "mixed":
        roots = roots if roots is not None else [prach["seq_idx"]] * len(preambles)
        if len(roots) != len(preambles):
            raise ConfigurationError("mixed scenarios pair roots and preambles one to one", "prach.interferer")
        ues = [
            UeDescriptor(
                "interferer",
                guarded("prach.interferer", PreambleIdentity, r, p, prach["cyclic_shift_idx"]),
                first,
                channel=channel,
            )
            for r, p in zip(roots, preambles)
        ]
        scenario = guarded("prach.interferer", Scenario, UeDescriptor("target", target, channel=channel), ues,
                           geometry, detector, "mixed")
        param = ";".join(f"root={r}/preamble={p}" for r, p in zip(roots, preambles))
    elif kind == "none":
        scenario = Scenario(UeDescriptor("target", target, channel=channel), (), geometry, detector, "none")
        levels = []
        param = ""
    else:
        raise ConfigurationError(f"unknown scenario {kind!r}", "sweep.scenario")

    scenario = replace(
        scenario,
        target=replace(scenario.target, timing_offset_samples=ue["timing_offset_samples"]),
        interferers=tuple(replace(u, timing_offset_samples=offset) for u in scenario.interferers),
    )
    for key, value in (("ue.timing_offset_samples", ue["timing_offset_samples"]), ("ue.interferer_timing_offset_samples", offset)):
        if not 0 <= value < geometry.gp_samples:
            raise ConfigurationError(f"must lie in [0, {geometry.gp_samples})", key)

    return SweepSpec(
        snr_db_grid=sw["snr_db"],
        interferer_snr_db=levels,
        n_subframes=sw["n_subframes"],
        master_seed=sw["seed"],
        scenario=scenario,
        workers=sw["workers"],
        interferer_param=param,
        scoring=sw["scoring"],
    )


def parse_config(text):
    """Parse a YAML document into a :class:`SweepSpec`."""
    try:
        doc = yaml.safe_load(text) if text and text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed document: {exc}") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigurationError("top level must be a mapping")
    return _build(_resolve(SCHEMA, _expand_dotted(doc)))


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}", str(path)) from None


def default_document():
    """The defaults as a nested mapping, e.g. for writing a template file."""

    def walk(schema):
        return {k: walk(v) if isinstance(v, dict) else v[1] for k, v in schema.items()}

    return walk(SCHEMA)
