"""Pluggable blob stores for snapshots and submissions.

Keys are slash-separated paths. The filesystem store is the shipped durable
backend; anything S3-compatible can be plugged in by implementing the same
three methods.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Protocol


class BlobStoreError(Exception):
    pass


class BlobStore(Protocol):
    def put(self, key: str, data: bytes) -> None: ...

    def get(self, key: str) -> bytes: ...

    def list_keys(self, prefix: str) -> list[str]: ...


class MemoryBlobStore:
    def __init__(self):
        self.blobs: dict[str, bytes] = {}
        self.fail_puts = False  # toggled by tests to simulate outages

    def put(self, key: str, data: bytes) -> None:
        if self.fail_puts:
            raise BlobStoreError("store unavailable")
        self.blobs[key] = bytes(data)

    def get(self, key: str) -> bytes:
        try:
            return self.blobs[key]
        except KeyError:
            raise BlobStoreError(f"no blob at {key}") from None

    def list_keys(self, prefix: str) -> list[str]:
        return sorted(k for k in self.blobs if k.startswith(prefix))


class FilesystemBlobStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        path = (self.root / key).resolve()
        if not str(path).startswith(str(self.root.resolve())):
            raise BlobStoreError(f"key escapes store root: {key}")
        return path

    def put(self, key: str, data: bytes) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        # write-then-rename so a crash never leaves a torn blob
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
            os.replace(tmp, path)
        except OSError as exc:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise BlobStoreError(f"write failed for {key}: {exc}") from exc

    def get(self, key: str) -> bytes:
        try:
            return self._path(key).read_bytes()
        except OSError as exc:
            raise BlobStoreError(f"read failed for {key}: {exc}") from exc

    def list_keys(self, prefix: str) -> list[str]:
        out = []
        for path in self.root.rglob("*"):
            if path.is_file() and not path.name.startswith(".tmp-"):
                key = str(path.relative_to(self.root)).replace(os.sep, "/")
                if key.startswith(prefix):
                    out.append(key)
        return sorted(out)


def store_from_env() -> BlobStore:
    kind = os.environ.get("PARLEY_STORE_KIND", "fs")
    if kind == "memory":
        return MemoryBlobStore()
    if kind == "fs":
        return FilesystemBlobStore(os.environ.get("PARLEY_STORE_PATH", "./data"))
    raise BlobStoreError(f"unknown store kind '{kind}' (use 'fs' or 'memory')")
