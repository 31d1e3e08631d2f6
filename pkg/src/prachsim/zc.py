"""Zadoff-Chu root sequences, cyclic shifts and preamble-index resolution."""

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from ._assets import load_table
from .errors import ConfigurationError, UnsupportedFeatureError

N_ZC = 839
N_PREAMBLES = 64
MAX_LOGICAL_ROOT = 837


def _is_prime(n):
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n**0.5) + 1))


@dataclass(frozen=True, eq=False)
class ZcRootSequence:
    """Root sequence ``x_u(n) = exp(-j*pi*u*n*(n+1)/n_zc)``."""

    u: int
    n_zc: int
    samples: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ShiftPlan:
    v: int
    c_v: int
    n_cs: int
    root_hop: int = 0


@dataclass(frozen=True)
class PreambleIdentity:
    logical_root_index: int = 22
    preamble_index: int = 32
    cyclic_shift_idx: int = 1
    high_speed: bool = False

    def __post_init__(self):
        if not 0 <= self.preamble_index < N_PREAMBLES:
            raise ConfigurationError(f"preamble index {self.preamble_index} outside [0, 63]")
        if not 0 <= self.logical_root_index <= MAX_LOGICAL_ROOT:
            raise ConfigurationError(
                f"logical root index {self.logical_root_index} outside [0, {MAX_LOGICAL_ROOT}]"
            )
        if not 0 <= self.cyclic_shift_idx <= 15:
            raise ConfigurationError(f"cyclic shift index {self.cyclic_shift_idx} outside [0, 15]")
        if self.high_speed:
            raise UnsupportedFeatureError("restricted (high-speed) cyclic shift sets are not modelled")


@lru_cache(maxsize=None)
def _root_samples(u, n_zc):
    n = np.arange(n_zc, dtype=np.int64)
    # reduce the phase integer modulo 2*n_zc before scaling to keep full precision
    phase = (u * n * (n + 1)) % (2 * n_zc)
    samples = np.exp(-1j * np.pi * phase / n_zc)
    samples[0] = 1.0 + 0.0j
    samples.flags.writeable = False
    return samples


def generate_root_sequence(u, n_zc=N_ZC):
    """Generate the ``u``-th root Zadoff-Chu sequence of prime length ``n_zc``."""
    if not _is_prime(n_zc):
        raise ConfigurationError(f"sequence length {n_zc} is not prime")
    if not 0 < u < n_zc:
        raise ConfigurationError(f"root {u} outside (0, {n_zc})")
    return ZcRootSequence(u=int(u), n_zc=int(n_zc), samples=_root_samples(int(u), int(n_zc)))


def cyclic_shift(seq, c_v):
    """Return ``seq.samples[(n + c_v) mod n_zc]``."""
    if not 0 <= c_v < seq.n_zc:
        raise ConfigurationError(f"cyclic shift {c_v} outside [0, {seq.n_zc})")
    return np.roll(seq.samples, -int(c_v))


@lru_cache(maxsize=None)
def _ncs_table():
    return {int(r["cyclic_shift_idx"]): int(r["n_cs"]) for r in load_table("ncs_unrestricted.csv")}


@lru_cache(maxsize=None)
def _root_table():
    rows = load_table("root_mapping_format0.csv")
    table = np.array([int(r["physical_u"]) for r in rows], dtype=np.int64)
    if not np.array_equal([int(r["logical_index"]) for r in rows], np.arange(len(rows))):
        raise RuntimeError("root mapping table is not indexed 0..N-1")
    return table


def ncs_from_config(cyclic_shift_idx, high_speed=False):
    """Zero-correlation-zone spacing N_CS for the unrestricted set."""
    if high_speed:
        raise UnsupportedFeatureError("restricted (high-speed) cyclic shift sets are not modelled")
    table = _ncs_table()
    if cyclic_shift_idx not in table:
        raise ConfigurationError(f"cyclic shift index {cyclic_shift_idx} outside [0, {len(table) - 1}]")
    return table[cyclic_shift_idx]


def logical_to_physical_root(logical_index):
    table = _root_table()
    if not 0 <= logical_index < len(table):
        raise ConfigurationError(f"logical root index {logical_index} outside [0, {len(table) - 1}]")
    return int(table[logical_index])


def shifts_per_root(n_cs, n_zc=N_ZC):
    return 1 if n_cs == 0 else n_zc // n_cs


def resolve_preamble(identity):
    """Map a preamble identity to its physical root and cyclic shift.

    Preamble indices fill all shifts of one root before moving on to the next
    logical root; running past the last logical root is an error.

    Returns
    -------
    u : int
        Physical root index.
    plan : ShiftPlan
    """
    n_cs = ncs_from_config(identity.cyclic_shift_idx, identity.high_speed)
    per_root = shifts_per_root(n_cs)
    v = identity.preamble_index % per_root
    root_hop = identity.preamble_index // per_root
    logical = identity.logical_root_index + root_hop
    if logical > MAX_LOGICAL_ROOT:
        raise ConfigurationError(
            f"preamble {identity.preamble_index} needs logical root {logical} beyond {MAX_LOGICAL_ROOT}"
        )
    u = logical_to_physical_root(logical)
    assert gcd(u, N_ZC) == 1
    return u, ShiftPlan(v=v, c_v=v * n_cs, n_cs=n_cs, root_hop=root_hop)


def root_preambles(identity):
    """Preamble indices hosted by the same physical root as ``identity``.

    Returns ``(u, n_cs, [(preamble_index, v), ...])``.
    """
    u, plan = resolve_preamble(identity)
    per_root = shifts_per_root(plan.n_cs)
    base = plan.root_hop * per_root
    hosted = [(base + v, v) for v in range(per_root) if base + v < N_PREAMBLES]
    return u, plan.n_cs, hosted
