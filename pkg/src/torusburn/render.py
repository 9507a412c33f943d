"""Burn-time heatmaps as binary PPM images.

Vertex (i, j) of a 2-d torus becomes pixel row i, column j. Burn times are
mapped linearly onto hues from red (0 degrees) to purple (HUE_END degrees);
vertices not burned by the displayed step are black. Convert to PNG with any
image tool, e.g. ``python -c "from PIL import Image; Image.open('a.ppm').save('a.png')"``.
"""
from __future__ import annotations

import colorsys
import re
from pathlib import Path
from typing import Optional

import numpy as np

from .burn import UNBURNED

HUE_END = 280.0


def hue_of(burn_time, scale_max: int) -> np.ndarray:
    """Hue angle in degrees for each burn time in [0, scale_max]."""
    return HUE_END * np.asarray(burn_time, dtype=float) / max(int(scale_max), 1)


def colorize(burn_time: np.ndarray, n: int, at_step: Optional[int] = None,
             scale_max: Optional[int] = None) -> np.ndarray:
    """(n, n, 3) uint8 image; ``at_step`` hides vertices burned later than that step."""
    bt = np.asarray(burn_time).reshape(n, n)
    hidden = bt == UNBURNED
    if at_step is not None:
        hidden |= bt > at_step
    if scale_max is None:
        scale_max = int(bt.max()) if bt.max() > 0 else 1
    lut = np.array(
        [[round(255 * c) for c in colorsys.hsv_to_rgb(h / 360.0, 1.0, 1.0)]
         for h in hue_of(np.arange(scale_max + 1), scale_max)],
        dtype=np.uint8,
    )
    img = lut[np.clip(bt, 0, scale_max)]
    img[hidden] = 0
    return img


def write_ppm(path, image: np.ndarray) -> None:
    h, w, _ = image.shape
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(image, dtype=np.uint8).tobytes())


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    m = re.match(rb"P6\s+(\d+)\s+(\d+)\s+255\s", data)
    if m is None:
        raise ValueError(f"{path}: not an 8-bit P6 image")
    w, h = int(m.group(1)), int(m.group(2))
    return np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=m.end()).reshape(h, w, 3)
