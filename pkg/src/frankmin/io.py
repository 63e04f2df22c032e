"""Plain-text file formats: profile CSV + JSON sidecar, ``OFGRID 1`` grids.

All floats are written with 17 significant digits, so write/read round
trips are exact. The grid reader renormalizes only vectors that are off
unit length by more than a few ulps.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import FILE_UNIT_TOL, DomainSpec
from .field3d import BoundaryCondition, DirectorGrid
from .profile1d import EulerProfile

GRID_MAGIC = "OFGRID 1"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_json(path, data: dict) -> Path:
    path = Path(path)
    # sorted keys and a trailing newline keep repeated runs byte-identical
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


# -- profiles -------------------------------------------------------------------

def write_profile_csv(profile: EulerProfile, path, metadata: dict | None = None):
    """Write ``z,theta,phi`` rows and a ``.json`` sidecar next to ``path``.

    Returns ``(csv_path, json_path)``.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["z", "theta", "phi"])
        for z, th, ph in zip(profile.z_nodes, profile.theta, profile.phi):
            w.writerow([fmt(z), fmt(th), fmt(ph)])
    meta = profile.metadata()
    if metadata:
        meta.update(metadata)
    side = write_json(path.with_suffix(".json"), meta)
    return path, side


def read_profile_csv(path):
    """Return ``(z, theta, phi)`` arrays from a profile CSV."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["z", "theta", "phi"]:
        raise ValueError(f"{path}: expected header z,theta,phi")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    return data[:, 0], data[:, 1], data[:, 2]


# -- grids ----------------------------------------------------------------------

def write_grid(grid: DirectorGrid, path) -> Path:
    """``OFGRID 1`` text file, rows ``i j k nx ny nz`` with ``i`` fastest."""
    path = Path(path)
    nx, ny, nz = grid.dims
    d = grid.domain
    lines = [GRID_MAGIC, f"{nx} {ny} {nz} {fmt(d.l1)} {fmt(d.l2)} {grid.bc.value}"]
    vals = grid.values
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                a, b, c = vals[i, j, k]
                lines.append(f"{i} {j} {k} {fmt(a)} {fmt(b)} {fmt(c)}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_grid(path) -> DirectorGrid:
    """Parse an ``OFGRID 1`` file, renormalize and check the plate layers."""
    text = Path(path).read_text().splitlines()
    if len(text) < 2 or text[0].strip() != GRID_MAGIC:
        raise ValueError(f"{path}: not an {GRID_MAGIC} file")
    head = text[1].split()
    if len(head) != 6:
        raise ValueError(f"{path}: bad header line {text[1]!r}")
    nx, ny, nz = (int(v) for v in head[:3])
    domain = DomainSpec(float(head[3]), float(head[4]))
    bc = BoundaryCondition.parse(head[5])
    body = [ln.split() for ln in text[2:] if ln.strip()]
    if len(body) != nx * ny * nz:
        raise ValueError(f"{path}: expected {nx * ny * nz} rows, found {len(body)}")
    values = np.empty((nx, ny, nz, 3))
    seen = np.zeros((nx, ny, nz), dtype=bool)
    for row in body:
        if len(row) != 6:
            raise ValueError(f"{path}: malformed row {' '.join(row)!r}")
        i, j, k = int(row[0]), int(row[1]), int(row[2])
        if not (0 <= i < nx and 0 <= j < ny and 0 <= k < nz):
            raise ValueError(f"{path}: node index ({i}, {j}, {k}) out of range")
        values[i, j, k] = [float(v) for v in row[3:]]
        seen[i, j, k] = True
    if not seen.all():
        raise ValueError(f"{path}: missing grid nodes")
    norms = np.linalg.norm(values, axis=-1)
    if np.max(np.abs(norms - 1.0)) > FILE_UNIT_TOL:
        raise ValueError(f"{path}: director values are not unit vectors")
    # vectors already unit to rounding are kept bit-for-bit so write/read/write is stable
    off = np.abs(norms - 1.0) > 4.0 * np.finfo(float).eps
    values[off] /= norms[off][:, None]
    for layer, want, name in ((0, bc.bottom, "bottom"), (-1, bc.top, "top")):
        if np.max(np.abs(values[:, :, layer] - want)) > FILE_UNIT_TOL:
            raise ValueError(f"{path}: {name} plate does not match {bc.value} anchoring")
        values[:, :, layer] = want
    return DirectorGrid(values, domain, bc)


def write_scan_csv(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "gamma_frustrated", "gamma_homeotropic"])
        for r in rows:
            w.writerow([fmt(v) for v in r])
    return path
