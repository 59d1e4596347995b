"""Plain-text coefficient cache.

One file per (kind, k, prec). The first line is ``v1 <kind> <k> <prec>``,
followed by one decimal integer per line. Disabled until a directory is set.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Iterable, List, Optional

VERSION = "v1"
log = logging.getLogger(__name__)

_cache_dir: Optional[Path] = None


def set_cache_dir(path: str | os.PathLike | None) -> None:
    global _cache_dir
    _cache_dir = Path(path).expanduser() if path else None


def get_cache_dir() -> Optional[Path]:
    return _cache_dir


def _path(kind: str, k: int, prec: int) -> Path:
    return _cache_dir / f"{kind}_k{k}_prec{prec}.txt"


def load(kind: str, k: int, prec: int) -> Optional[List[int]]:
    if _cache_dir is None:
        return None
    path = _path(kind, k, prec)
    if not path.exists():
        return None
    with open(path) as fh:
        header = fh.readline().split()
        if header != [VERSION, kind, str(k), str(prec)]:
            log.warning("ignoring cache file with stale header: %s", path)
            return None
        return [int(line) for line in fh if line.strip()]


def store(kind: str, k: int, prec: int, values: Iterable[int]) -> None:
    if _cache_dir is None:
        return
    _cache_dir.mkdir(parents=True, exist_ok=True)
    path = _path(kind, k, prec)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        fh.write(f"{VERSION} {kind} {k} {prec}\n")
        for v in values:
            fh.write(f"{v}\n")
    os.replace(tmp, path)
