"""Critical points of a periodic grid field and structural-stability checks.

The grid is triangulated with a fixed diagonal and vertex values are made
distinct by breaking ties on the flat pixel index. A vertex is classified by
the number of sign changes of ``H(neighbour) - H(vertex)`` around its 6-vertex
link: none gives an extremum, four a simple saddle, six or more a multi-saddle.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from ._jit import NUMBA_ENABLED
from .errors import DegenerateFieldError

MINIMUM = "minimum"
MAXIMUM = "maximum"
SADDLE = "saddle"

_KIND_NAMES = {_kernels.MINIMUM: MINIMUM, _kernels.MAXIMUM: MAXIMUM, _kernels.SADDLE: SADDLE}

# relative tolerance on saddle-value separation, as a fraction of the field's extent
DEFAULT_VALUE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CriticalPoint:
    kind: str
    pixel: tuple
    value: float
    lower_link_components: int
    rank: int = -1

    @property
    def index(self):
        return self.pixel

    def flat_index(self, nx):
        return self.pixel[1] * nx + self.pixel[0]


@dataclass
class StabilityReport:
    n_min: int = 0
    n_max: int = 0
    n_saddle: int = 0
    multi_saddles: list = field(default_factory=list)
    verdict: str = "degenerate"
    reasons: list = field(default_factory=list)

    @property
    def stable(self):
        return self.verdict == "stable"

    def to_dict(self):
        d = asdict(self)
        d["multi_saddles"] = [list(p) for p in self.multi_saddles]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def classify_vertices(field):
    """Return ``(rank, kind, lower_components)`` flat arrays for every vertex."""
    rank = _kernels.vertex_rank(field.values)
    if NUMBA_ENABLED:
        kind, lower = _kernels.classify(rank, field.nx, field.ny)
    else:
        kind, lower = _kernels.classify_numpy(rank, field.nx, field.ny)
    return rank, kind, lower


def _has_critical_plateau(values, critical):
    """True if a critical vertex has a 4-neighbour with the exact same raw value."""
    for axis in (0, 1):
        same = np.roll(values, -1, axis=axis) == values
        crit_next = np.roll(critical, -1, axis=axis)
        if np.any(same & (critical | crit_next)):
            return True
    return False


def detect_critical_points(field):
    """All non-regular vertices of the triangulated field, in flat-index order.

    Multi-saddles are returned with kind ``"saddle"`` and
    ``lower_link_components >= 3`` so that :func:`validate_stability` can
    reject them. Raises :class:`DegenerateFieldError` for a constant field and
    for fields whose critical set is not isolated (a critical vertex sharing its
    exact value with a grid neighbour, as along the crest of ``cos(x)``).
    """
    values = field.values
    if values.max() == values.min():
        raise DegenerateFieldError("constant field has no isolated critical points")
    rank, kind, lower = classify_vertices(field)
    critical = (kind != _kernels.REGULAR).reshape(values.shape)
    if _has_critical_plateau(values, critical):
        raise DegenerateFieldError("critical points are not isolated (equal-valued critical plateau)")
    points = []
    flat = values.ravel()
    for v in np.flatnonzero(kind != _kernels.REGULAR):
        k = int(kind[v])
        name = _KIND_NAMES.get(k, SADDLE)
        points.append(
            CriticalPoint(
                kind=name,
                pixel=(int(v % field.nx), int(v // field.nx)),
                value=float(flat[v]),
                lower_link_components=int(lower[v]),
                rank=int(rank[v]),
            )
        )
    return points


def validate_stability(points, value_tolerance=None):
    """Check the counting and non-degeneracy conditions on a critical set.

    ``value_tolerance`` is an absolute separation below which two saddles are
    considered to share a level (a proxy for a saddle connection between
    distinct saddles). By default it is ``1e-12`` times the spread of the
    critical values.
    """
    report = StabilityReport()
    report.n_min = sum(p.kind == MINIMUM for p in points)
    report.n_max = sum(p.kind == MAXIMUM for p in points)
    saddles = [p for p in points if p.kind == SADDLE and p.lower_link_components == 2]
    report.n_saddle = len(saddles)
    report.multi_saddles = [p.pixel for p in points if p.kind == SADDLE and p.lower_link_components >= 3]
    reasons = []
    if not points:
        reasons.append("no critical points")
    if report.multi_saddles:
        reasons.append(f"{len(report.multi_saddles)} multi-saddle(s)")
    if report.n_min + report.n_max != report.n_saddle:
        reasons.append(f"centers ({report.n_min + report.n_max}) != saddles ({report.n_saddle})")
    if saddles:
        if value_tolerance is None:
            vals = [p.value for p in points]
            value_tolerance = DEFAULT_VALUE_TOLERANCE * (max(vals) - min(vals))
        sv = np.sort([p.value for p in saddles])
        if sv.size > 1 and np.min(np.diff(sv)) <= value_tolerance:
            reasons.append("two saddles share a critical value")
    report.reasons = reasons
    report.verdict = "degenerate" if reasons else "stable"
    return report


def check_stability(field):
    """Run detection and validation; a detection failure yields a degenerate report."""
    try:
        points = detect_critical_points(field)
    except DegenerateFieldError as exc:
        report = StabilityReport(reasons=[str(exc)])
        return [], report
    return points, validate_stability(points)
