"""Binary caches of U3(q) element tables.

Layout (all little-endian): b"UCOV1", q as uint32, order as uint64, then
``order`` records of nine uint16 entry indices.  A file whose magic, length,
header or contents fail validation is rebuilt, never trusted.
"""

from __future__ import annotations

import logging
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from . import kernels
from .errors import InvariantViolation
from .fields import as_prime_power
from .group import GroupTable, group_order

MAGIC = b"UCOV1"
HEADER = struct.Struct("<5sIQ")
log = logging.getLogger(__name__)


class CorruptCache(ValueError):
    pass


def cache_dir(explicit: str | os.PathLike | None = None) -> Path:
    d = explicit or os.environ.get("UCOV_CACHE_DIR") or Path.home() / ".cache" / "ucov"
    return Path(d)


def cache_path(q, directory=None) -> Path:
    return cache_dir(directory) / f"u3_{as_prime_power(q).q}.ucov1"


def write_table(t: GroupTable, path: str | os.PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = np.ascontiguousarray(t.mats, dtype="<u2").tobytes()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "wb") as f:
        f.write(HEADER.pack(MAGIC, t.q, t.order))
        f.write(body)
    os.replace(tmp, path)
    return path


def read_table(path: str | os.PathLike, q=None) -> GroupTable:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise CorruptCache("file shorter than the header")
    magic, fq, order = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CorruptCache(f"bad magic {magic!r}")
    if q is not None and fq != as_prime_power(q).q:
        raise CorruptCache(f"cache is for q={fq}, wanted q={q}")
    try:
        expected = group_order(fq)
    except Exception as e:
        raise CorruptCache(f"header q={fq} is not a prime power") from e
    if order != expected:
        raise CorruptCache(f"header order {order} != {expected}")
    if len(raw) != HEADER.size + 18 * order:
        raise CorruptCache(f"length {len(raw)} does not match order {order}")
    mats = np.frombuffer(raw, dtype="<u2", offset=HEADER.size).reshape(order, 9)
    Q = (fq * fq)
    if mats.max(initial=0) >= Q:
        raise CorruptCache("entry index outside GF(q^2)")
    try:
        t = GroupTable(fq, mats.astype(np.uint8), check=True)
    except InvariantViolation as e:
        raise CorruptCache(str(e)) from e
    # every stored matrix must already be its own canonical representative
    _, k = kernels.canon(t.mats, t.scalars, t.mult, t.Q)
    if not np.array_equal(k, t.keys):
        raise CorruptCache("stored matrices are not canonical representatives")
    return t


def load_or_build(q, directory=None, rebuild: bool = False) -> tuple[GroupTable, str]:
    """Table for U3(q) and how it was obtained: "loaded", "built" or "rebuilt"."""
    path = cache_path(q, directory)
    status = "built"
    if path.exists() and not rebuild:
        try:
            return read_table(path, q), "loaded"
        except CorruptCache as e:
            log.warning("discarding corrupt cache %s: %s", path, e)
            status = "rebuilt"
    t = GroupTable.build(q)
    try:
        write_table(t, path)
    except OSError as e:
        log.warning("could not write cache %s: %s", path, e)
    return t, status
