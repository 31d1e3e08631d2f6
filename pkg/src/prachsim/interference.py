"""Target-plus-interferer scenarios and per-trial subframe synthesis."""

from dataclasses import dataclass, field, replace

from .channel import ChannelProfile, apply_channel, derive_seed, mix_and_add_noise
from .errors import ConfigurationError
from .receiver import DetectorConfig
from .waveform import FrameGeometry, synthesize_preamble
from .zc import PreambleIdentity

KINDS = ("intra_cell", "inter_cell", "mixed", "none")
TARGET_UE_ID = 0


@dataclass(frozen=True)
class UeDescriptor:
    role: str
    identity: PreambleIdentity
    snr_db: float = 0.0
    timing_offset_samples: float = 0.0
    channel: ChannelProfile = field(default_factory=ChannelProfile)

    def __post_init__(self):
        if self.role not in ("target", "interferer"):
            raise ConfigurationError(f"UE role {self.role!r} not in ('target', 'interferer')")


@dataclass(frozen=True)
class Scenario:
    target: UeDescriptor
    interferers: tuple = ()
    geometry: FrameGeometry = field(default_factory=FrameGeometry)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    kind: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "interferers", tuple(self.interferers))
        if self.kind not in KINDS:
            raise ConfigurationError(f"scenario kind {self.kind!r} not in {KINDS}")
        if self.target.role != "target":
            raise ConfigurationError("scenario target must have role 'target'")
        t = self.target.identity
        for ue in self.interferers:
            if ue.role != "interferer":
                raise ConfigurationError("every interferer must have role 'interferer'")
            same_cell = ue.identity.logical_root_index == t.logical_root_index
            if same_cell and ue.identity.preamble_index == t.preamble_index:
                raise ConfigurationError(
                    f"interferer reuses the target's root {t.logical_root_index} and preamble "
                    f"{t.preamble_index}; contention is not modelled"
                )
            if self.kind == "intra_cell" and not same_cell:
                raise ConfigurationError("intra-cell interferers must share the target's logical root")
            if self.kind == "inter_cell" and same_cell:
                raise ConfigurationError("inter-cell interferers must use a different logical root")
        if self.kind == "none" and self.interferers:
            raise ConfigurationError("scenario kind 'none' cannot carry interferers")

    def with_interferer_snr(self, snr_db):
        """Copy with every interferer set to ``snr_db``."""
        return replace(self, interferers=tuple(replace(ue, snr_db=snr_db) for ue in self.interferers))


def _target(identity, base):
    return UeDescriptor(role="target", identity=identity, channel=base.get("channel", ChannelProfile()))


def _scenario(target_identity, interferers, kind, base):
    return Scenario(
        target=_target(target_identity, base),
        interferers=interferers,
        geometry=base.get("geometry", FrameGeometry()),
        detector=base.get("detector", DetectorConfig()),
        kind=kind,
    )


def make_intra_cell(target_identity, interferer_preamble_indices, snr_db_interferer, base_config=None):
    """Interferers in the target's cell: same logical root, other preamble indices.

    ``base_config`` is an optional mapping with ``channel``, ``geometry`` and
    ``detector`` entries shared by all UEs.
    """
    base = dict(base_config or {})
    interferers = []
    for p in interferer_preamble_indices:
        if p == target_identity.preamble_index:
            raise ConfigurationError(f"interferer preamble {p} equals the target's")
        identity = replace(target_identity, preamble_index=p)
        interferers.append(
            UeDescriptor("interferer", identity, snr_db_interferer, channel=base.get("channel", ChannelProfile()))
        )
    return _scenario(target_identity, interferers, "intra_cell", base)


def make_inter_cell(
    target_identity, interferer_logical_roots, interferer_preamble_index, snr_db_interferer, base_config=None
):
    """Interferers from neighbouring cells: different logical root, any preamble index."""
    base = dict(base_config or {})
    interferers = []
    for root in interferer_logical_roots:
        if root == target_identity.logical_root_index:
            raise ConfigurationError(f"interferer root {root} equals the target's")
        identity = replace(target_identity, logical_root_index=root, preamble_index=interferer_preamble_index)
        interferers.append(
            UeDescriptor("interferer", identity, snr_db_interferer, channel=base.get("channel", ChannelProfile()))
        )
    return _scenario(target_identity, interferers, "inter_cell", base)


def synthesize_subframe(scenario, target_snr_db, trial_index, master_seed):
    """Received subframe for one trial plus the target's ground truth.

    UE ``k`` (target is 0, interferers 1..) fades with seed
    ``(master_seed, k, trial_index)``; noise uses ``(master_seed, trial_index)``.
    Returns ``(rx, (preamble_index, ta_true_seconds))``.
    """
    geometry = scenario.geometry
    ues = [replace(scenario.target, snr_db=target_snr_db), *scenario.interferers]
    contributions = []
    for ue_id, ue in enumerate(ues):
        tx = synthesize_preamble(ue.identity, geometry)
        y = apply_channel(
            tx, ue.channel, ue.timing_offset_samples, trial_seed=derive_seed(master_seed, ue_id, trial_index)
        )
        contributions.append((y, ue.snr_db))
    rx = mix_and_add_noise(
        contributions,
        geometry,
        trial_seed=derive_seed(master_seed, trial_index),
        n_rx_ants=scenario.target.channel.n_rx_ants,
    )
    truth = (scenario.target.identity.preamble_index, scenario.target.timing_offset_samples / geometry.sample_rate)
    return rx, truth
