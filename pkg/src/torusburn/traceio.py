"""Trace persistence: a JSON document plus an optional ``.npy`` burn-time field."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import numpy as np

from .burn import BurnTrace
from .torus import TorusSpec

SCHEMA = "torusburn.trace/1"


def write_trace(trace: BurnTrace, json_path, burn_time: bool = True) -> Path:
    json_path = Path(json_path)
    doc = {
        "schema": SCHEMA,
        "d": trace.spec.d,
        "n": trace.spec.n,
        "tau": trace.tau,
        "steps": trace.steps,
        "unburned_per_step": [int(x) for x in trace.unburned_per_step],
        "ignitions": [int(x) for x in trace.ignitions],
        "meta": trace.meta,
        "burn_time_file": None,
    }
    if burn_time:
        bt_path = json_path.with_suffix(".burn_time.npy")
        np.save(bt_path, np.ascontiguousarray(trace.burn_time, dtype="<i4"), allow_pickle=False)
        doc["burn_time_file"] = bt_path.name
    json_path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return json_path


def read_trace(json_path) -> BurnTrace:
    json_path = Path(json_path)
    doc = json.loads(json_path.read_text())
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"{json_path}: not a trace file (schema {doc.get('schema')!r})")
    spec = TorusSpec(doc["d"], doc["n"])
    bt: Optional[np.ndarray] = None
    if doc.get("burn_time_file"):
        bt = np.load(json_path.parent / doc["burn_time_file"], allow_pickle=False).astype(np.int32)
    return BurnTrace(
        spec=spec,
        tau=doc["tau"],
        unburned_per_step=np.asarray(doc["unburned_per_step"], dtype=np.int64),
        burn_time=bt,
        ignitions=np.asarray(doc["ignitions"], dtype=np.int64),
        meta=doc.get("meta", {}),
    )
