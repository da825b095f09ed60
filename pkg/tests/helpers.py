from collections import deque

import numpy as np

from tfda import fieldio, morse


def stable_synth(count, n=128, kmax_cycle=(3, 4, 5), start=0, exponent=-3.0):
    """Yield ``(seed, normalized field, points)`` for stable synthetic fields.

    ``kmin = 1`` with ``kmax`` cycling through 3, 4, 5 gives 14, 24 and 40
    Fourier modes.
    """
    seed = start
    found = 0
    while found < count:
        kmax = kmax_cycle[seed % len(kmax_cycle)]
        f = fieldio.normalize(fieldio.synth_field(n, n, exponent, 1, kmax, seed))
        points, report = morse.check_stability(f)
        if report.stable:
            found += 1
            yield seed, f, points
        seed += 1


def mode_count(kmin, kmax):
    k = np.arange(-kmax, kmax + 1)
    kx, ky = np.meshgrid(k, k)
    mod = np.hypot(kx, ky)
    half = (ky > 0) | ((ky == 0) & (kx > 0))
    return int(np.count_nonzero(half & (mod >= kmin) & (mod <= kmax)))


def periodic_components(pixels, nx, ny):
    """Number of 4-connected components of a flat pixel set on the torus."""
    todo = set(int(p) for p in pixels)
    count = 0
    while todo:
        count += 1
        queue = deque([todo.pop()])
        while queue:
            v = queue.popleft()
            i, j = v % nx, v // nx
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                w = ((j + dj) % ny) * nx + (i + di) % nx
                if w in todo:
                    todo.remove(w)
                    queue.append(w)
    return count
