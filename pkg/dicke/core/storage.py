"""Content-addressable storage of spectrum caches."""

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

FINGERPRINT_PREFIX = "# fingerprint "


def fingerprint_text(fingerprint: dict) -> str:
    """Canonical JSON form of a fingerprint, independent of key order."""
    return json.dumps(fingerprint, sort_keys=True, separators=(",", ":"))


def fingerprint_hash(fingerprint: dict) -> str:
    return hashlib.sha256(fingerprint_text(fingerprint).encode()).hexdigest()


class SpectrumStore:
    """Manager for content-addressable storage of per-sector spectra.

    Files live at `<root>/ab/cd/<sha256>.csv`, keyed by the sha256 of the
    fingerprint. The first line of each file repeats the fingerprint so a
    hash collision or a hand-edited file is detected on load.
    """

    def __init__(self, root: Path):
        """Initialize the store."""
        self.root = Path(root)

    def initialize(self):
        """Create the root directory."""
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, fingerprint: dict) -> Path:
        """Get the path of the cache file for a fingerprint."""
        hash_value = fingerprint_hash(fingerprint)
        return self.root / hash_value[:2] / hash_value[2:4] / f"{hash_value}.csv"

    def store(self, fingerprint: dict, body: str) -> str:
        """Write a cache body under its fingerprint.

        Returns the sha256 key. The write goes through a temporary file in the
        target directory followed by an atomic rename.
        """
        path = self.path_for(fingerprint)
        path.parent.mkdir(parents=True, exist_ok=True)
        content = FINGERPRINT_PREFIX + fingerprint_text(fingerprint) + "\n" + body
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as handle:
                handle.write(content)
            os.replace(tmp_name, path)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise
        logger.debug("stored spectrum %s", path.name)
        return f"sha256:{path.stem}"

    def retrieve(self, fingerprint: dict) -> Optional[str]:
        """Cache body for a fingerprint, or None when missing or stale."""
        path = self.path_for(fingerprint)
        if not path.exists():
            logger.debug("cache miss %s", path.name)
            return None
        header, _, body = path.read_text().partition("\n")
        if header != FINGERPRINT_PREFIX + fingerprint_text(fingerprint):
            logger.info("fingerprint mismatch in %s, recomputing", path)
            return None
        logger.debug("cache hit %s", path.name)
        return body

    def delete(self, fingerprint: dict) -> bool:
        """Delete a cache file."""
        path = self.path_for(fingerprint)
        if path.exists():
            path.unlink()
            return True
        return False
