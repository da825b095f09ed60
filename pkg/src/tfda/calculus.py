"""Velocity, vorticity and energy spectra of a periodic stream function."""

from dataclasses import dataclass

import numpy as np

from .fieldio import ScalarField


@dataclass(frozen=True, eq=False)
class VectorField:
    """Velocity ``(u, v) = (d psi/dy, -d psi/dx)`` on the grid of its stream function."""

    u: np.ndarray
    v: np.ndarray
    lx: float
    ly: float

    @property
    def nx(self):
        return self.u.shape[1]

    @property
    def ny(self):
        return self.u.shape[0]

    def speed_squared(self):
        return self.u**2 + self.v**2


@dataclass(frozen=True)
class Spectrum:
    """Shell-summed energy ``E(k)``; bin ``n`` covers ``k[n] <= |k| < k[n] + dk``."""

    k: np.ndarray
    energy: np.ndarray
    dk: float

    def total(self):
        return float(np.sum(self.energy) * self.dk)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("k,E\n")
            for k, e in zip(self.k, self.energy):
                fh.write(f"{k:.17g},{e:.17g}\n")


def wavenumbers(nx, ny, lx, ly):
    """Angular wavenumber grids ``(kx, ky)`` with the unmatched Nyquist mode zeroed."""
    kx = 2.0 * np.pi / lx * np.fft.fftfreq(nx, 1.0 / nx)
    ky = 2.0 * np.pi / ly * np.fft.fftfreq(ny, 1.0 / ny)
    if nx % 2 == 0:
        kx[nx // 2] = 0.0
    if ny % 2 == 0:
        ky[ny // 2] = 0.0
    return np.meshgrid(kx, ky)


def _nyquist_mask(nx, ny):
    mask = np.ones((ny, nx), dtype=bool)
    if nx % 2 == 0:
        mask[:, nx // 2] = False
    if ny % 2 == 0:
        mask[ny // 2, :] = False
    return mask


def _spectral_gradient(psi):
    kx, ky = wavenumbers(psi.nx, psi.ny, psi.lx, psi.ly)
    psi_hat = np.fft.fft2(psi.values) * _nyquist_mask(psi.nx, psi.ny)
    dx = np.fft.ifft2(1j * kx * psi_hat).real
    dy = np.fft.ifft2(1j * ky * psi_hat).real
    return dx, dy


def _fd_gradient(psi):
    hx = psi.lx / psi.nx
    hy = psi.ly / psi.ny
    f = psi.values
    dx = (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2.0 * hx)
    dy = (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2.0 * hy)
    return dx, dy


def velocity_from_stream(psi, method="spectral"):
    if method == "spectral":
        dx, dy = _spectral_gradient(psi)
    elif method == "fd":
        dx, dy = _fd_gradient(psi)
    else:
        raise ValueError(f"unknown derivative method {method!r}")
    return VectorField(dy, -dx, psi.lx, psi.ly)


def vorticity_from_stream(psi, method="spectral"):
    """Return ``omega = -laplacian(psi)``."""
    if method == "spectral":
        kx, ky = wavenumbers(psi.nx, psi.ny, psi.lx, psi.ly)
        psi_hat = np.fft.fft2(psi.values) * _nyquist_mask(psi.nx, psi.ny)
        omega = np.fft.ifft2((kx**2 + ky**2) * psi_hat).real
    elif method == "fd":
        hx = psi.lx / psi.nx
        hy = psi.ly / psi.ny
        f = psi.values
        lap = (np.roll(f, -1, axis=1) - 2 * f + np.roll(f, 1, axis=1)) / hx**2
        lap += (np.roll(f, -1, axis=0) - 2 * f + np.roll(f, 1, axis=0)) / hy**2
        omega = -lap
    else:
        raise ValueError(f"unknown derivative method {method!r}")
    return psi.with_values(omega)


def energy_spectrum(psi, dk=1.0):
    """Shell-binned kinetic energy spectrum of the flow generated by ``psi``.

    ``E(k) = sum_{k <= |k| < k + dk} |u_hat|^2 / 2 / dk`` with Fourier
    coefficients normalized so that the sum over all modes of ``|u_hat|^2 / 2``
    is the domain mean of ``|u|^2 / 2``.
    """
    if not dk > 0:
        raise ValueError("dk must be positive")
    n = psi.nx * psi.ny
    kx, ky = wavenumbers(psi.nx, psi.ny, psi.lx, psi.ly)
    psi_hat = np.fft.fft2(psi.values) * _nyquist_mask(psi.nx, psi.ny) / n
    kk = np.hypot(kx, ky)
    half_u2 = 0.5 * kk**2 * np.abs(psi_hat) ** 2
    bins = np.floor(kk / dk).astype(np.int64)
    nbins = int(bins.max()) + 1
    energy = np.bincount(bins.ravel(), weights=half_u2.ravel(), minlength=nbins) / dk
    return Spectrum(np.arange(nbins) * dk, energy, float(dk))


def pointwise_enstrophy(psi, half=False, method="spectral"):
    """``omega^2`` per pixel (``omega^2 / 2`` with ``half=True``)."""
    omega = vorticity_from_stream(psi, method).values
    return psi.with_values(omega**2 * (0.5 if half else 1.0))


def pointwise_energy(psi, half=False, method="spectral"):
    """``|u|^2`` per pixel (``|u|^2 / 2`` with ``half=True``)."""
    vel = velocity_from_stream(psi, method)
    return psi.with_values(vel.speed_squared() * (0.5 if half else 1.0))


def spectral_slope(spectrum, kfrom, kto):
    """Least-squares slope of ``log E`` against ``log k`` over ``kfrom <= k <= kto``."""
    sel = (spectrum.k >= kfrom) & (spectrum.k <= kto) & (spectrum.energy > 0)
    if np.count_nonzero(sel) < 2:
        raise ValueError("fewer than two nonzero bins in the fitting range")
    slope, _ = np.polyfit(np.log(spectrum.k[sel]), np.log(spectrum.energy[sel]), 1)
    return float(slope)
