"""Optional key=value settings file, located through $HECKESIGN_CONFIG.

Recognised keys: prec, cache_dir, threads. Lines starting with # are comments.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

ENV_VAR = "HECKESIGN_CONFIG"


@dataclass(frozen=True)
class Settings:
    prec: int = 200
    cache_dir: Optional[str] = None
    threads: int = 1


def parse(text: str) -> Settings:
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",), delimiters=("=",))
    cp.read_string("[settings]\n" + text)
    s = cp["settings"]
    unknown = set(s) - {"prec", "cache_dir", "threads"}
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return Settings(
        prec=s.getint("prec", Settings.prec),
        cache_dir=s.get("cache_dir") or None,
        threads=s.getint("threads", Settings.threads),
    )


def load(path: Optional[str] = None) -> Settings:
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return Settings()
    return parse(Path(path).read_text())
