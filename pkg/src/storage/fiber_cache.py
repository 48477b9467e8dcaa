"""On-disk cache of GNS fiber factors."""
import json
import logging
import threading
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ..dyadic import DyadicTime

logger = logging.getLogger(__name__)


def encode_matrix(a: np.ndarray) -> List[List[List[float]]]:
    """Nested [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a)]


def decode_matrix(data, cols: Optional[int] = None) -> np.ndarray:
    rows = [[complex(re, im) for re, im in row] for row in data]
    if not rows:
        return np.zeros((0, cols or 0), dtype=np.complex128)
    return np.array(rows, dtype=np.complex128)


class FiberCache:
    """JSON-backed store of fiber factors keyed by (digest, time)."""

    def __init__(self, persist_directory: str = "./data/fiber_cache"):
        """Initialize the cache.

        Args:
            persist_directory: Directory to persist fiber factors
        """
        self.persist_directory = Path(persist_directory)
        self.persist_directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def _path(self, digest: str, t: DyadicTime) -> Path:
        return self.persist_directory / f"{digest}_{t.m}_{t.k}.json"

    def load(self, digest: str, t: DyadicTime) -> Optional[Dict]:
        """Load a cached factor.

        Args:
            digest: Content digest of the generator and tolerance
            t: Fiber time

        Returns:
            Dict with 'dim' and 'q', or None when absent or unreadable
        """
        file_path = self._path(digest, t)
        if not file_path.exists():
            self.misses += 1
            return None
        try:
            with open(file_path, 'r') as f:
                payload = json.load(f)
            q = decode_matrix(payload["q"], payload.get("cols"))
            self.hits += 1
            logger.debug(f"Loaded fiber {digest} at t={t} from {file_path}")
            return {"dim": int(payload["dim"]), "q": q}
        except Exception as e:
            logger.error(f"Failed to load cached fiber {file_path}: {e}")
            self.misses += 1
            return None

    def save(self, digest: str, t: DyadicTime, dim: int, q: np.ndarray):
        """Save a factor to disk.

        Args:
            digest: Content digest of the generator and tolerance
            t: Fiber time
            dim: Fiber dimension
            q: Coordinate factor
        """
        file_path = self._path(digest, t)
        payload = {"t": t.to_pair(), "dim": dim, "cols": int(q.shape[1]), "q": encode_matrix(q)}
        with self._lock:
            try:
                with open(file_path, 'w') as f:
                    json.dump(payload, f)
                logger.debug(f"Saved fiber {digest} at t={t} to {file_path}")
            except Exception as e:
                logger.error(f"Failed to save fiber {digest} at t={t}: {e}")

    def list_entries(self) -> List[str]:
        return sorted(f.stem for f in self.persist_directory.glob("*.json"))

    def clear(self):
        """Delete every cached fiber."""
        for file_path in self.persist_directory.glob("*.json"):
            file_path.unlink()
        logger.info(f"Cleared fiber cache at {self.persist_directory}")
