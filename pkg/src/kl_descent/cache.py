"""
Content-addressed on-disk cache for KL tables and structure-constant sweeps.

Each entry is a gzip'd JSON envelope::

    {"schema": 1, "key": ..., "kind": "kl" | "h", "sha256": ..., "payload": ...}

where the key hashes (Coxeter matrix, weights, rank of Gamma) and ``sha256``
hashes the canonical JSON of the payload.  Entries are written once, under a
lock file; anything unreadable or failing its checksum is moved to
``quarantine/``.
"""

from __future__ import annotations

import gzip
import hashlib
import io
import json
import logging
import os
import shutil
import zlib
from pathlib import Path

from filelock import FileLock

from .coxeter import CoxeterSpec

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ENV_VAR = "KL_DESCENT_CACHE"


class CacheError(Exception):
    pass


def spec_key(spec: CoxeterSpec) -> str:
    blob = json.dumps({
        "matrix": [list(r) for r in spec.matrix],
        "weights": [spec.gamma.to_json(w) for w in spec.weights],
        "r": spec.gamma.rank,
    }, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def _canonical(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "kl-descent"


class Cache:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)

    def path(self, key: str, kind: str) -> Path:
        return self.root / f"{key}.{kind}.json.gz"

    def load(self, key: str, kind: str):
        """The payload, or None on a miss.  Corrupt entries are quarantined."""
        path = self.path(key, kind)
        if not path.exists():
            return None
        try:
            return self._read(path, key, kind)
        except CacheError as exc:
            log.warning("quarantining %s: %s", path.name, exc)
            self.quarantine(path)
            return None

    def _read(self, path: Path, key: str | None = None, kind: str | None = None):
        try:
            with gzip.open(path, "rb") as fh:
                env = json.loads(fh.read())
        except (OSError, EOFError, ValueError, zlib.error) as exc:
            raise CacheError(f"unreadable: {exc}") from exc
        if not isinstance(env, dict) or env.get("schema") != SCHEMA_VERSION:
            raise CacheError("schema version mismatch")
        if key is not None and (env.get("key") != key or env.get("kind") != kind):
            raise CacheError("key mismatch")
        if hashlib.sha256(_canonical(env.get("payload"))).hexdigest() != env.get("sha256"):
            raise CacheError("checksum mismatch")
        return env["payload"]

    def store(self, key: str, kind: str, payload) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.path(key, kind)
        with FileLock(str(path) + ".lock"):
            if path.exists():
                return
            env = {"schema": SCHEMA_VERSION, "key": key, "kind": kind,
                   "sha256": hashlib.sha256(_canonical(payload)).hexdigest(),
                   "payload": payload}
            buf = io.BytesIO()
            with gzip.GzipFile(fileobj=buf, mode="wb", mtime=0) as gz:
                gz.write(_canonical(env))
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(buf.getvalue())
            os.replace(tmp, path)

    def quarantine(self, path: Path) -> Path:
        qdir = self.root / "quarantine"
        qdir.mkdir(parents=True, exist_ok=True)
        dest = qdir / path.name
        shutil.move(str(path), dest)
        return dest

    def entries(self) -> list[Path]:
        if not self.root.exists():
            return []
        return sorted(self.root.glob("*.json.gz"))

    def validate(self, revalidate=None) -> list[dict]:
        """Check every entry; ``revalidate(kind, payload)`` may add invariant checks."""
        out = []
        for path in self.entries():
            key, kind = path.name.split(".")[:2]
            try:
                payload = self._read(path, key, kind)
                if revalidate is not None:
                    revalidate(kind, payload)
                out.append({"entry": path.name, "status": "ok"})
            except (CacheError, AssertionError, KeyError, ValueError, TypeError) as exc:
                self.quarantine(path)
                out.append({"entry": path.name, "status": "quarantined", "reason": str(exc)})
        return out

    def gc(self) -> list[str]:
        """Remove all entries, lock files and quarantined files."""
        removed = []
        if not self.root.exists():
            return removed
        for path in sorted(self.root.iterdir()):
            if path.is_dir():
                removed.extend(p.name for p in sorted(path.iterdir()))
                shutil.rmtree(path)
            else:
                removed.append(path.name)
                path.unlink()
        return removed
