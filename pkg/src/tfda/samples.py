"""Closed-form test fields with known streamline topology.

``cos_field`` has the simplest topology a stable torus flow can have: one
maximum, one minimum and two saddles whose separatrices wind once around the
torus. ``enstrophy_analog`` decorates it with extra vortices so that its COT
has nested branches on all three essential saddles.
"""

import numpy as np

from .fieldio import TWO_PI, from_function


def periodic_bump(x, y, x0, y0, width):
    """Smooth periodic analog of a Gaussian centered at ``(x0, y0)``."""
    return np.exp((np.cos(x - x0) - 1.0) / width**2 + (np.cos(y - y0) - 1.0) / width**2)


def _wrap(d):
    return (d + np.pi) % TWO_PI - np.pi


def cos_field(n=256, eps=0.3, transpose=False):
    """``cos(y) + eps cos(x)`` (or ``cos(x) + eps cos(y)`` when ``transpose``)."""
    if transpose:
        return from_function(lambda x, y: np.cos(x) + eps * np.cos(y), n)
    return from_function(lambda x, y: np.cos(y) + eps * np.cos(x), n)


def two_bump_field(n=256, separation=1.0, background=0.1):
    """Two equal positive bumps on a weak ``cos(y)`` background.

    The bumps merge through a saddle whose two separatrix loops are both
    contractible (a figure eight).
    """
    xc, yc = np.pi, np.pi / 2
    d = separation / 2

    def h(x, y):
        base = background * (np.cos(y) + 0.3 * np.cos(x))
        return base + periodic_bump(x, y, xc - d, yc, 0.4) + periodic_bump(x, y, xc + d, yc, 0.4)

    return from_function(h, n)


# ring of six minima around the minimum of the cos field: the six passes between
# neighbouring minima get increasing heights in this order of the pass index, so
# that the merge tree of the minima has the shape {{.,.},{{{.,.},.},.}} and the
# highest pass closes the ring around a central hill
_RING_PASS_OFFSETS = (0.0, 0.4, 0.1, 0.2, 0.3, 0.5)


def enstrophy_analog(n=256):
    """A field whose COT is

    ``β·₊ · α₋·₊(b₋₊(b₋₋{b₋₋{σ₋, σ₋}, b₋₋{b₋₋{b₋₋{σ₋, σ₋}, σ₋}, σ₋}}, σ₊))
    · a₊·₊(σ₊) · α₊·₋(b₊₊{b₊₊{σ₊, σ₊}, σ₊}) · β·₋``.

    Built on ``cos(y) + 0.3 cos(x)``: a ring of six minima with a central hill
    replaces the minimum, a bump on the lower essential band adds an extra
    saddle to the essential chain, and three bumps replace the maximum.
    """

    def h(x, y):
        out = np.cos(y) + 0.3 * np.cos(x)
        # extra vortex on the essential band between the two essential saddles
        out = out + 0.8 * periodic_bump(x, y, np.pi / 2, 2.0, 0.3)
        # ring of minima, in coordinates where the background basin is round
        dx, dy = _wrap(x - np.pi), _wrap(y - np.pi)
        r = np.sqrt(0.3 * dx**2 + dy**2)
        theta = np.arctan2(dy, np.sqrt(0.3) * dx)
        profile = np.cos(6 * theta)
        for j, offset in enumerate(_RING_PASS_OFFSETS):
            profile = profile - offset * np.exp(-(_wrap(theta - (j + 0.5) * np.pi / 3)) ** 2 / 0.04)
        out = out - 0.3 * np.exp(-((r - 0.75) ** 2) / 0.04) * (1 + 0.9 * profile)
        out = out + 0.4 * np.exp(-(r**2) / 0.09)
        # three maxima in a row instead of one; unequal side bumps keep the two
        # saddles between them off the same level
        out = out - 0.5 * periodic_bump(x, y, 0.0, 0.0, 0.45)
        for tx, ty, amp in ((-0.9, 0.0, 0.45), (0.0, 0.15, 0.4), (0.9, 0.0, 0.48)):
            out = out + amp * periodic_bump(x, y, tx, ty, 0.3)
        return out

    return from_function(h, n)


ENSTROPHY_COT = (
    "β·₊ · α₋·₊(b₋₊(b₋₋{b₋₋{σ₋, σ₋}, b₋₋{b₋₋{b₋₋{σ₋,σ₋}, σ₋}, σ₋}}, σ₊)) · a₊·₊(σ₊) · "
    "α₊·₋(b₊₊{b₊₊{σ₊, σ₊}, σ₊}) · β·₋"
)
FREE_DECAY_COT = "β·₊ · α₋·₊(σ₋) · α₊·₋(σ₊) · β·₋"
