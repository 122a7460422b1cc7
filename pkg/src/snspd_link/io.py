"""CSV ingestion and deterministic report/file emission.

Column names are fixed and case-sensitive:

- count trace:      bias_a, photon_hz, dark_hz
- IV trace:         bias_a, voltage_v
- jitter histogram: time_s, counts        (uniformly spaced bin centers)
- linearity sweep:  attenuation_db, rate_hz
- rotation sweep:   angle_deg, u_a
- absorption profile (written): z_m, k_per_m, alpha_per_m, survival
- normalized rotation (written): angle_deg, efficiency
- mode field (written): x_m, y_m, re_e, im_e

All files are written atomically (temp file in the target directory,
then rename) and floats are emitted with repr so identical inputs give
byte-identical outputs.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import CountTrace, IVTrace, JitterHistogram
from .errors import DataContractError
from .modes import ModeSolution
from .propagation import AbsorptionProfile


def _read_rows(path: str | Path, columns: Sequence[str]) -> list[list[float]]:
    path = Path(path)
    if not path.exists():
        raise DataContractError(f"input file {path} does not exist")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataContractError(f"{path}: empty file") from None
        if [h.strip() for h in header] != list(columns):
            raise DataContractError(
                f"{path}: expected header {','.join(columns)!r}, "
                f"got {','.join(header)!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(columns):
                raise DataContractError(f"{path}:{lineno}: wrong column count")
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise DataContractError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise DataContractError(f"{path}: no data rows")
    return rows


def read_count_trace(path: str | Path, integration_time: float) -> CountTrace:
    rows = _read_rows(path, ("bias_a", "photon_hz", "dark_hz"))
    return CountTrace(integration_time, tuple((b, p, d) for b, p, d in rows))


def read_iv_trace(path: str | Path) -> IVTrace:
    rows = _read_rows(path, ("bias_a", "voltage_v"))
    return IVTrace(tuple((b, v) for b, v in rows))


def read_jitter_histogram(path: str | Path) -> JitterHistogram:
    rows = _read_rows(path, ("time_s", "counts"))
    times = np.array([r[0] for r in rows])
    counts = [r[1] for r in rows]
    if len(times) < 2:
        raise DataContractError(f"{path}: need at least two bins")
    steps = np.diff(times)
    width = float(steps[0])
    if width <= 0 or np.any(np.abs(steps - width) > 1e-9 * width + 1e-18):
        raise DataContractError(f"{path}: bin centers must be uniformly spaced")
    for c in counts:
        if c != round(c):
            raise DataContractError(f"{path}: counts must be integers")
    return JitterHistogram(bin_width=width,
                           counts=tuple(int(round(c)) for c in counts),
                           t0=float(times[0]) - width / 2)


def read_linearity_points(path: str | Path) -> list[tuple[float, float]]:
    rows = _read_rows(path, ("attenuation_db", "rate_hz"))
    return [(db, rate) for db, rate in rows]


def read_rotation_sweep(path: str | Path) -> list[tuple[float, float]]:
    rows = _read_rows(path, ("angle_deg", "u_a"))
    return [(a, u) for a, u in rows]


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_profile_csv(profile: AbsorptionProfile, path: str | Path) -> None:
    rows = zip(profile.z, profile.k, profile.alpha, profile.survival)
    atomic_write_text(path, _csv_text(
        ("z_m", "k_per_m", "alpha_per_m", "survival"), list(rows)))


def write_rotation_csv(rows: Sequence[tuple[float, float]],
                       path: str | Path) -> None:
    atomic_write_text(path, _csv_text(("angle_deg", "efficiency"), rows))


def write_field_csv(mode: ModeSolution, path: str | Path) -> None:
    """Mode field as (x, y, Re E, Im E) rows, x varying fastest."""
    rows = []
    for iy, y in enumerate(mode.y):
        for ix, x in enumerate(mode.x):
            e = mode.field[iy, ix]
            rows.append((x, y, e.real, e.imag))
    atomic_write_text(path, _csv_text(("x_m", "y_m", "re_e", "im_e"), rows))


def write_json(obj, path: str | Path) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
