"""Frozen explosion times T(d), read from ``data/blasius_constants.txt``.

The file is produced by ``scripts/freeze_constants.py``; each data line is
``d T error_bound`` and comment lines record how the values were generated.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

CONSTANTS_FILE = "blasius_constants.txt"


@dataclass(frozen=True)
class FrozenConstant:
    d: int
    T: float
    error_bound: float


def parse_constants(text: str) -> tuple[dict[int, FrozenConstant], dict[str, str]]:
    values, meta = {}, {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if ":" in body:
                key, _, val = body.partition(":")
                meta[key.strip()] = val.strip()
            continue
        d, T, err = line.split()
        values[int(d)] = FrozenConstant(int(d), float(T), float(err))
    return values, meta


def format_constants(values: dict[int, FrozenConstant], meta: dict[str, str]) -> str:
    lines = [f"# {k}: {v}" for k, v in meta.items()]
    lines.append("# d T error_bound")
    lines += [f"{c.d} {c.T!r} {c.error_bound:.3e}" for c in sorted(values.values(), key=lambda c: c.d)]
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def load_constants(path: Optional[str] = None) -> dict[int, FrozenConstant]:
    if path is None:
        text = resources.files("torusburn").joinpath("data", CONSTANTS_FILE).read_text()
    else:
        text = Path(path).read_text()
    return parse_constants(text)[0]


def reference_T(d: int) -> float:
    """Frozen T(d); falls back to a fresh solve when d is not in the file."""
    table = load_constants()
    if d in table:
        return table[d].T
    from .blasius import explosion_time
    return explosion_time(d)[0]
