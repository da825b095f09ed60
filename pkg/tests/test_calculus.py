import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfda import calculus
from tfda.fieldio import ScalarField, from_function, synth_field


def test_velocity_cos_y():
    vel = calculus.velocity_from_stream(from_function(lambda x, y: np.cos(y), 128))
    _, y = from_function(lambda x, y: x, 128).coordinates()
    assert np.max(np.abs(vel.u + np.sin(y))) < 1e-10
    assert np.max(np.abs(vel.v)) < 1e-10


def test_velocity_cos_5x():
    psi = from_function(lambda x, y: np.cos(5 * x), 128)
    x, _ = psi.coordinates()
    vel = calculus.velocity_from_stream(psi)
    assert np.max(np.abs(vel.u)) < 1e-10
    assert np.max(np.abs(vel.v - 5 * np.sin(5 * x))) < 1e-10


@pytest.mark.parametrize("method", ["spectral", "fd"])
def test_constant_stream(method):
    psi = ScalarField(np.full((16, 16), 3.0))
    vel = calculus.velocity_from_stream(psi, method)
    assert np.all(vel.u == 0) and np.all(vel.v == 0)
    assert np.max(np.abs(calculus.vorticity_from_stream(psi, method).values)) < 1e-12


def test_vorticity_cos_3x():
    psi = from_function(lambda x, y: np.cos(3 * x), 128)
    x, _ = psi.coordinates()
    omega = calculus.vorticity_from_stream(psi).values
    assert np.max(np.abs(omega - 9 * np.cos(3 * x))) < 1e-10


def test_vorticity_is_minus_laplacian():
    psi = from_function(lambda x, y: np.cos(x) + np.cos(y), 64)
    assert np.max(np.abs(calculus.vorticity_from_stream(psi).values - psi.values)) < 1e-10


def test_fd_is_second_order():
    errs = []
    for n in (32, 64):
        psi = from_function(lambda x, y: np.sin(2 * x) * np.cos(y), n)
        exact = 5 * psi.values
        errs.append(np.max(np.abs(calculus.vorticity_from_stream(psi, "fd").values - exact)))
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_spectrum_single_mode_parseval():
    psi = from_function(lambda x, y: np.cos(5 * x), 128)
    spec = calculus.energy_spectrum(psi)
    # outside k=5 only FFT round-off remains
    assert np.argmax(spec.energy) == 5
    assert np.sum(np.delete(spec.energy, 5)) < 1e-10 * spec.energy[5]
    vel = calculus.velocity_from_stream(psi)
    assert abs(spec.total() - 0.5 * np.mean(vel.speed_squared())) < 1e-10


def test_spectrum_zero_field():
    spec = calculus.energy_spectrum(ScalarField(np.zeros((32, 32))))
    assert np.all(spec.energy == 0)


def test_spectrum_bins_uniform():
    spec = calculus.energy_spectrum(synth_field(64, 64, -3, 1, 20, 0), dk=2.0)
    assert np.allclose(np.diff(spec.k), 2.0) and spec.k[0] == 0
    assert np.all(spec.energy >= 0)


def test_spectrum_csv(tmp_path):
    spec = calculus.energy_spectrum(from_function(lambda x, y: np.cos(2 * y), 16))
    spec.to_csv(tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "k,E" and len(lines) == len(spec.k) + 1


def test_pointwise_enstrophy():
    psi = from_function(lambda x, y: np.cos(3 * x), 128)
    x, _ = psi.coordinates()
    assert np.max(np.abs(calculus.pointwise_enstrophy(psi).values - 81 * np.cos(3 * x) ** 2)) < 1e-9
    half = calculus.pointwise_enstrophy(psi, half=True).values
    assert np.allclose(half, 40.5 * np.cos(3 * x) ** 2, atol=1e-9)


def test_unknown_method():
    with pytest.raises(ValueError):
        calculus.vorticity_from_stream(ScalarField(np.zeros((8, 8))), "magic")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.integers(0, 31), st.integers(0, 31))
def test_derivatives_commute_with_shift(seed, sx, sy):
    psi = synth_field(32, 32, -3, 1, 8, seed)
    moved = psi.with_values(np.roll(psi.values, (sy, sx), axis=(0, 1)))
    a = calculus.velocity_from_stream(psi)
    b = calculus.velocity_from_stream(moved)
    assert np.max(np.abs(np.roll(a.u, (sy, sx), axis=(0, 1)) - b.u)) < 1e-12
    assert np.max(np.abs(np.roll(a.v, (sy, sx), axis=(0, 1)) - b.v)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(-7, 7), st.integers(-7, 7), st.floats(0, 2 * np.pi))
def test_single_mode_scaled_by_k_squared(kx, ky, phase):
    psi = from_function(lambda x, y: np.cos(kx * x + ky * y + phase), 32)
    omega = calculus.vorticity_from_stream(psi).values
    assert np.max(np.abs(omega - (kx**2 + ky**2) * psi.values)) < 1e-10
