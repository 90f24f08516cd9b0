"""On-disk cache for per-prime tables and value distributions.

Two bit-exact formats:

  sum table   magic "EXPS", version u16=1, p u64 LE, degree u16,
              polynomial hash 32 bytes, then p little-endian f64 pairs
              (re, im).
  value dist  magic "EXPD", p u64 LE, then p u32 counts.

Every entry has a sha256 sidecar (<name>.sha256); a checksum mismatch on
read evicts the entry and reports it, never silently uses it.  Writes are
atomic (temp file + rename) and serialized per key with a lock file.
"""

from __future__ import annotations

import hashlib
import logging
import os
import struct
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

from .charsums import SumTable, ValueDist

log = logging.getLogger("expsumlab.cache")

MAGIC_TABLE = b"EXPS"
MAGIC_DIST = b"EXPD"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class CacheEntry:
    poly_id: str
    prime: int
    kind: str  # "table" | "dist"
    path: Path
    checksum: str


class CacheLockTimeout(RuntimeError):
    pass


class TableCache:
    """Directory-backed cache keyed by (polynomial hash, prime, kind)."""

    def __init__(self, directory: os.PathLike | str):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)

    # ---- paths and keys -------------------------------------------------

    def _path(self, poly_id: str, p: int, kind: str) -> Path:
        ext = {"table": "exps", "dist": "expd"}[kind]
        return self.dir / f"{poly_id[:16]}_p{p}.{ext}"

    # ---- encoding -------------------------------------------------------

    @staticmethod
    def encode_table(table: SumTable, degree: int) -> bytes:
        head = MAGIC_TABLE + struct.pack(
            "<HQH", FORMAT_VERSION, table.p, degree
        ) + bytes.fromhex(table.poly_id)[:32]
        body = (
            np.ascontiguousarray(table.values, dtype=np.complex128)
            .view(np.float64)
            .astype("<f8")
            .tobytes()
        )
        return head + body

    @staticmethod
    def decode_table(blob: bytes) -> tuple[SumTable, int]:
        if blob[:4] != MAGIC_TABLE:
            raise ValueError("bad magic for table entry")
        version, p, degree = struct.unpack("<HQH", blob[4:16])
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported table version {version}")
        poly_hash = blob[16:48].hex()
        body = np.frombuffer(blob[48:], dtype="<f8")
        if len(body) != 2 * p:
            raise ValueError("truncated table body")
        values = body.astype(np.float64).view(np.complex128).copy()
        table = SumTable(
            p=int(p),
            poly_id=poly_hash,
            kind="plain",
            values=values,
            error_bound=8.0
            * np.finfo(np.float64).eps
            * np.log2(max(p, 2))
            * np.sqrt(p),
        )
        return table, int(degree)

    @staticmethod
    def encode_dist(dist: ValueDist) -> bytes:
        counts = np.asarray(dist.counts, dtype="<u4")
        return MAGIC_DIST + struct.pack("<Q", dist.p) + counts.tobytes()

    @staticmethod
    def decode_dist(blob: bytes) -> ValueDist:
        if blob[:4] != MAGIC_DIST:
            raise ValueError("bad magic for dist entry")
        (p,) = struct.unpack("<Q", blob[4:12])
        counts = np.frombuffer(blob[12:], dtype="<u4")
        if len(counts) != p:
            raise ValueError("truncated dist body")
        return ValueDist(int(p), counts.astype(np.int64))

    # ---- atomic IO ------------------------------------------------------

    def _write(self, path: Path, blob: bytes) -> str:
        digest = hashlib.sha256(blob).hexdigest()
        with self._lock(path):
            tmp = path.with_suffix(path.suffix + ".tmp")
            tmp.write_bytes(blob)
            os.replace(tmp, path)
            side = path.with_suffix(path.suffix + ".sha256")
            side_tmp = side.with_suffix(".sha256.tmp")
            side_tmp.write_text(digest + "\n")
            os.replace(side_tmp, side)
        return digest

    def _read(self, path: Path) -> Optional[bytes]:
        """Checked read; evicts and returns None on any corruption."""
        if not path.exists():
            return None
        blob = path.read_bytes()
        side = path.with_suffix(path.suffix + ".sha256")
        if not side.exists():
            log.warning("cache entry %s has no checksum; evicting", path.name)
            self._evict_path(path)
            return None
        expect = side.read_text().strip()
        if hashlib.sha256(blob).hexdigest() != expect:
            log.warning("cache entry %s failed its checksum; evicting", path.name)
            self._evict_path(path)
            return None
        return blob

    def _evict_path(self, path: Path) -> None:
        path.unlink(missing_ok=True)
        path.with_suffix(path.suffix + ".sha256").unlink(missing_ok=True)

    class _lock:
        def __init__(self, path: Path, timeout: float = 30.0):
            self.lock_path = path.with_suffix(path.suffix + ".lock")
            self.timeout = timeout

        def __enter__(self):
            deadline = time.monotonic() + self.timeout
            while True:
                try:
                    fd = os.open(
                        self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY
                    )
                    os.close(fd)
                    return self
                except FileExistsError:
                    if time.monotonic() > deadline:
                        raise CacheLockTimeout(str(self.lock_path))
                    time.sleep(0.02)

        def __exit__(self, *exc):
            try:
                os.unlink(self.lock_path)
            except FileNotFoundError:
                pass

    # ---- public API -------------------------------------------------------

    def has(self, poly_id: str, p: int, kind: str) -> bool:
        return self._path(poly_id, p, kind).exists()

    def store_table(self, table: SumTable, degree: int) -> CacheEntry:
        path = self._path(table.poly_id, table.p, "table")
        digest = self._write(path, self.encode_table(table, degree))
        return CacheEntry(table.poly_id, table.p, "table", path, digest)

    def load_table(self, poly_id: str, p: int) -> Optional[SumTable]:
        blob = self._read(self._path(poly_id, p, "table"))
        if blob is None:
            return None
        try:
            table, _ = self.decode_table(blob)
        except ValueError:
            log.warning("cache entry for p=%d undecodable; evicting", p)
            self._evict_path(self._path(poly_id, p, "table"))
            return None
        if table.poly_id != poly_id or table.p != p:
            return None
        return SumTable(
            p=table.p,
            poly_id=poly_id,
            kind="plain",
            values=table.values,
            error_bound=table.error_bound,
        )

    def store_dist(self, poly_id: str, dist: ValueDist) -> CacheEntry:
        path = self._path(poly_id, dist.p, "dist")
        digest = self._write(path, self.encode_dist(dist))
        return CacheEntry(poly_id, dist.p, "dist", path, digest)

    def load_dist(self, poly_id: str, p: int) -> Optional[ValueDist]:
        blob = self._read(self._path(poly_id, p, "dist"))
        if blob is None:
            return None
        try:
            dist = self.decode_dist(blob)
        except ValueError:
            self._evict_path(self._path(poly_id, p, "dist"))
            return None
        return dist if dist.p == p else None

    def entries(self) -> Iterator[CacheEntry]:
        for path in sorted(self.dir.glob("*.exps")) + sorted(
            self.dir.glob("*.expd")
        ):
            kind = "table" if path.suffix == ".exps" else "dist"
            side = path.with_suffix(path.suffix + ".sha256")
            checksum = side.read_text().strip() if side.exists() else ""
            stem = path.stem  # <hash16>_p<prime>
            hash16, _, ptxt = stem.partition("_p")
            try:
                prime = int(ptxt)
            except ValueError:
                continue
            yield CacheEntry(hash16, prime, kind, path, checksum)

    def evict(
        self, poly_id: Optional[str] = None, prime: Optional[int] = None
    ) -> int:
        removed = 0
        for entry in list(self.entries()):
            if poly_id is not None and not poly_id.startswith(entry.poly_id):
                continue
            if prime is not None and entry.prime != prime:
                continue
            self._evict_path(entry.path)
            removed += 1
        return removed

    def verify(self) -> list[tuple[CacheEntry, bool]]:
        """Recompute checksums; corrupt entries are evicted and flagged."""
        out = []
        for entry in list(self.entries()):
            blob = entry.path.read_bytes() if entry.path.exists() else None
            ok = (
                blob is not None
                and entry.checksum != ""
                and hashlib.sha256(blob).hexdigest() == entry.checksum
            )
            if not ok:
                self._evict_path(entry.path)
            out.append((entry, ok))
        return out
