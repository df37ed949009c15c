"""
Object-index cache.

Pseudo-objects are written as JSON. Python writes floats with their
shortest round-trip repr, so a reloaded index scores bit-identically to a
freshly built one. The cache is keyed by a SHA-256 fingerprint of the
inputs; a mismatch means the cache is stale.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, Optional

from indexing.associations import AssociationMode
from indexing.text_corpus import CollectionStats
from rankers.early_fusion import ObjectIndex, PseudoObject
from utils.errors import IndexCacheError

logger = logging.getLogger(__name__)

CACHE_FORMAT_VERSION = 1


def fingerprint_inputs(
    paths: Iterable[str | Path],
    mode: AssociationMode,
    stopwords: Optional[frozenset[str]] = None,
) -> str:
    """Hex SHA-256 over input file bytes, stopwords and association mode."""
    digest = hashlib.sha256()
    for path in paths:
        digest.update(Path(path).read_bytes())
        digest.update(b"\0")
    digest.update("\n".join(sorted(stopwords or ())).encode("utf-8"))
    digest.update(b"\0")
    digest.update(mode.value.encode("utf-8"))
    return digest.hexdigest()


def save_object_index(path: str | Path, obj_index: ObjectIndex, fingerprint: str) -> None:
    payload = {
        "version": CACHE_FORMAT_VERSION,
        "fingerprint": fingerprint,
        "mode": obj_index.mode.value,
        "excluded": list(obj_index.excluded),
        "objects": [
            {"id": o.id, "length": o.length, "freqs": dict(o.pseudo_freqs)}
            for o in obj_index.objects.values()
        ],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False)
    logger.info(f"Saved object index ({obj_index.num_objects} objects) to {path}")


def _pseudo_object(record: Any) -> PseudoObject:
    if not isinstance(record, dict):
        raise TypeError("object record is not a JSON object")
    oid, freqs, length = record["id"], record["freqs"], record["length"]
    if not isinstance(oid, str) or not isinstance(freqs, dict):
        raise TypeError(f"bad id or freqs for object {oid!r}")
    for value in (length, *freqs.values()):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError(f"non-numeric frequency or length for object {oid}")
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"invalid frequency or length for object {oid}")
    return PseudoObject(id=oid, pseudo_freqs=dict(freqs), length=length)


def load_object_index(
    path: str | Path, background: CollectionStats, fingerprint: str
) -> ObjectIndex:
    """Reload a cached object index.

    Raises:
        IndexCacheError: if the file is unreadable, malformed or stale
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except (OSError, ValueError) as e:
        raise IndexCacheError(f"cannot read object-index cache {path}: {e}") from e

    if not isinstance(payload, dict):
        raise IndexCacheError(f"malformed object-index cache {path}: not a JSON object")
    if payload.get("version") != CACHE_FORMAT_VERSION:
        raise IndexCacheError(f"unsupported cache version in {path}")
    if payload.get("fingerprint") != fingerprint:
        raise IndexCacheError(f"object-index cache {path} does not match the inputs")
    try:
        objects = [_pseudo_object(o) for o in payload["objects"]]
        mode = AssociationMode(payload["mode"])
        excluded = [str(oid) for oid in payload.get("excluded", [])]
    except (KeyError, TypeError, ValueError) as e:
        raise IndexCacheError(f"malformed object-index cache {path}: {e}") from e
    if not objects:
        raise IndexCacheError(f"object-index cache {path} holds no objects")
    obj_index = ObjectIndex.from_objects(objects, background, mode, excluded)
    logger.info(f"Loaded object index ({obj_index.num_objects} objects) from {path}")
    return obj_index
