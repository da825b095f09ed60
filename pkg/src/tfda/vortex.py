"""Terminal vortices: the domains of surviving σ leaves of a filtered COT."""

import csv
from dataclasses import dataclass, replace

import numpy as np

from . import cotlang as L

CSV_HEADER = ("id", "orientation", "area", "enstrophy", "energy", "leaf_value", "saddle_value")


@dataclass(frozen=True, eq=False)
class TerminalVortex:
    orientation: str  # "plus" around a maximum, "minus" around a minimum
    pixels: np.ndarray  # sorted flat indices
    area: float
    leaf_value: float
    saddle_value: float
    enstrophy: float = float("nan")
    energy: float = float("nan")

    @property
    def sign(self):
        return 1 if self.orientation == "plus" else -1

    def pixel_set(self, nx):
        return {(int(p % nx), int(p // nx)) for p in self.pixels}


def _parents(root):
    out = {}
    for node in root.walk():
        for c in node.children:
            out[id(c)] = node
    return out


def extract_terminal_vortices(cot, shape, eps0=0.0):
    """One vortex per σ leaf whose terminal edge is heavier than ``eps0``.

    ``cot`` is normally the output of :func:`tfda.cot.filter_cot` at the same
    ``eps0``; the pixel set of each vortex is everything its terminal edge has
    accumulated, i.e. the disk bounded by the separatrix of its saddle.
    """
    ny, nx = shape
    parent = _parents(cot.root)
    vortices = []
    for node in cot.root.walk():
        if node.symbol not in (L.SIGMA_P, L.SIGMA_M) or node.weight is None or node.weight <= eps0:
            continue
        pixels = np.unique(node.pixels) if node.pixels is not None else np.empty(0, dtype=np.int64)
        vortices.append(
            TerminalVortex(
                orientation="plus" if node.symbol == L.SIGMA_P else "minus",
                pixels=pixels,
                area=pixels.size / (nx * ny),
                leaf_value=node.value,
                saddle_value=parent[id(node)].value,
            )
        )
    vortices.sort(key=lambda v: (int(v.pixels[0]) if v.pixels.size else -1, v.leaf_value))
    return vortices


def vortex_quantities(vortex, omega, vel, half=False):
    """Fill in enstrophy ``sum(omega^2)/N`` and energy ``sum(|u|^2)/N`` over the vortex pixels."""
    if omega.shape != vel.u.shape:
        raise ValueError(f"vorticity grid {omega.shape} does not match velocity grid {vel.u.shape}")
    n = omega.values.size
    if vortex.pixels.size and vortex.pixels.max() >= n:
        raise ValueError("vortex pixels lie outside the analysis grid")
    factor = 0.5 if half else 1.0
    w = omega.values.ravel()[vortex.pixels]
    u2 = vel.speed_squared().ravel()[vortex.pixels]
    return replace(
        vortex,
        enstrophy=factor * float(np.sum(w * w)) / n,
        energy=factor * float(np.sum(u2)) / n,
    )


def write_vortex_csv(vortices, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for i, v in enumerate(vortices):
            writer.writerow(
                [i, v.orientation, repr(v.area), repr(v.enstrophy), repr(v.energy), repr(v.leaf_value), repr(v.saddle_value)]
            )


def read_vortex_csv(path):
    """Rows of a vortex CSV as dicts with numeric fields converted."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            for key in CSV_HEADER[2:]:
                row[key] = float(row[key])
            row["id"] = int(row["id"])
            rows.append(row)
    return rows
