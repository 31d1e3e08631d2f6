"""Loading of the bundled CSV tables, verified against ``MANIFEST.sha256``."""

import csv
import hashlib
import io
from functools import lru_cache
from importlib import resources

_PACKAGE = "prachsim.data"


class AssetChecksumError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def _manifest():
    text = resources.files(_PACKAGE).joinpath("MANIFEST.sha256").read_text()
    digests = {}
    for line in text.splitlines():
        if line.strip():
            digest, name = line.split()
            digests[name] = digest
    return digests


def read_bytes(name):
    return resources.files(_PACKAGE).joinpath(name).read_bytes()


@lru_cache(maxsize=None)
def load_table(name):
    """Return the rows of a bundled CSV asset as a tuple of dicts.

    Raises ``AssetChecksumError`` if the file does not match the manifest.
    """
    raw = read_bytes(name)
    expected = _manifest().get(name)
    if expected is None:
        raise AssetChecksumError(f"{name} is not listed in the asset manifest")
    actual = hashlib.sha256(raw).hexdigest()
    if actual != expected:
        raise AssetChecksumError(f"{name}: sha256 {actual} does not match manifest {expected}")
    return tuple(csv.DictReader(io.StringIO(raw.decode("ascii"))))
