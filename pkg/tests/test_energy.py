import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import GAUSS, grid, smooth_random, solver_for
from nldw import kernels
from nldw.energy import (
    EnergyBreakdown,
    attraction,
    dilation_energy_limit,
    double_well,
    first_variation,
    gradient_energy,
    laplacian,
    sigma_scaling,
    total_energy,
)
from nldw.fields import ScalarField3D, gaussian, mass, smooth_bump, uniform_ball


def interior_random(g, rng):
    """Smooth random field whose support stays clear of the boundary faces."""
    return smooth_random(g, rng, k=3, signed=True)


# ------------------------------------------------------------- gradient


def test_gradient_of_constant_is_zero(g32):
    assert gradient_energy(ScalarField3D.constant(g32, 3.7)) == 0.0


def test_gradient_of_gaussian(g96):
    assert abs(gradient_energy(gaussian(g96)) / GAUSS["gradient"] - 1) <= 1e-4


def test_gradient_error_drops_fourfold_when_h_halves():
    errs = [abs(gradient_energy(gaussian(grid(n, 12.0))) / GAUSS["gradient"] - 1) for n in (24, 48, 96)]
    assert errs[1] <= errs[0] / 4
    assert errs[2] <= errs[1] / 4


# ----------------------------------------------------------- double well


@pytest.mark.parametrize("c", [0.0, 1.0])
def test_double_well_vanishes_at_wells(g16, c):
    assert double_well(ScalarField3D.constant(g16, c)) == 0.0


def test_double_well_half(g16):
    V = g16.L**3
    assert double_well(ScalarField3D.constant(g16, 0.5)) == pytest.approx(V / 32, rel=1e-14)


def test_double_well_gaussian(g48):
    assert abs(double_well(gaussian(g48)) / GAUSS["double_well"] - 1) <= 1e-5


# ------------------------------------------------------------ attraction


def test_attraction_z_zero(g32):
    assert attraction(gaussian(g32), 0.0) == 0.0


def test_attraction_gaussian(g96):
    assert abs(attraction(gaussian(g96), 1.0) / GAUSS["attraction"] - 1) <= 1e-4


def test_attraction_uniform_ball(g96):
    R = 3.0
    u = uniform_ball(g96, R, value=1.0)
    assert attraction(u, 1.0) == pytest.approx(-1.5 * mass(u) / R, rel=2e-3)


def test_attraction_rejects_negative_charge(g16):
    with pytest.raises(ValueError):
        attraction(ScalarField3D.zeros(g16), -1.0)


# ---------------------------------------------------------- total energy


def test_total_of_zero(g16):
    e = total_energy(ScalarField3D.zeros(g16), 3.0, solver_for(16, 8.0))
    assert e == EnergyBreakdown.zero()
    assert e.total == 0.0


def test_total_gaussian(g96, s96):
    e = total_energy(gaussian(g96), 1.0, s96)
    exact = GAUSS["gradient"] + GAUSS["double_well"] + GAUSS["attraction"] + GAUSS["coulomb"]
    assert abs(e.total / exact - 1) <= 5e-4
    # the four-decimal sum quoted alongside the closed forms
    assert abs(e.total / 9.299961 - 1) <= 5e-4


def test_small_gaussian_multiple_is_negative(g48, s48):
    assert total_energy(gaussian(g48) * 0.05, 1.0, s48).total < 0


def test_breakdown_json_keys(g32, s32):
    d = json.loads(total_energy(gaussian(g32), 1.0, s32).to_json())
    assert set(d) == {"gradient", "double_well", "attraction", "coulomb", "total"}
    assert d["total"] == pytest.approx(d["gradient"] + d["double_well"] + d["attraction"] + d["coulomb"], rel=1e-12)


def test_total_is_deterministic(g32, s32):
    u = smooth_random(g32, np.random.default_rng(9))
    assert total_energy(u, 1.0, s32) == total_energy(u, 1.0, s32)


@given(st.integers(0, 2**31), st.floats(0.0, 5.0))
def test_breakdown_signs(seed, Z):
    g = grid(16, 8.0)
    u = smooth_random(g, np.random.default_rng(seed))
    e = total_energy(u, Z, solver_for(16, 8.0))
    assert e.gradient >= 0 and e.double_well >= 0
    assert e.coulomb >= -1e-10
    assert e.attraction <= 0
    parts = e.gradient + e.double_well + e.attraction + e.coulomb
    assert abs(e.total - parts) <= 1e-12 * e.scale


@given(st.integers(0, 2**31))
def test_zero_charge_energy_nonnegative(seed):
    g = grid(16, 8.0)
    u = smooth_random(g, np.random.default_rng(seed), signed=True)
    assert total_energy(u, 0.0, solver_for(16, 8.0)).total >= -1e-10


@given(st.integers(0, 2**31), st.floats(0.1, 3.0))
def test_small_multiples_become_negative(seed, Z):
    g = grid(16, 8.0)
    s = solver_for(16, 8.0)
    u = smooth_random(g, np.random.default_rng(seed))
    assert attraction(u, Z) < 0
    assert any(total_energy(u * 2.0**-k, Z, s).total < 0 for k in range(21))


# ------------------------------------------------------ first variation


def test_first_variation_of_zero(g16):
    fv = first_variation(ScalarField3D.zeros(g16), 0.0, solver_for(16, 8.0))
    assert np.all(fv.values == 0.0)


def test_first_variation_far_field_is_coulomb_tail(g48, s48):
    u = gaussian(g48)
    fv = first_variation(u, 0.0, s48).values
    r = g48.radius()
    far = r >= 5.0
    assert np.max(np.abs(fv[far] * r[far] / mass(u) - 1)) < 1e-3


@given(st.integers(0, 2**31))
def test_directional_derivative(seed):
    g = grid(16, 8.0)
    s = solver_for(16, 8.0)
    rng = np.random.default_rng(seed)
    u = smooth_random(g, rng)
    phi = smooth_random(g, rng, signed=True)
    eps = 1e-4
    fd = (total_energy(u + phi * eps, 1.0, s).total - total_energy(u - phi * eps, 1.0, s).total) / (2 * eps)
    an = g.cell_volume * float(np.sum(first_variation(u, 1.0, s).values * phi.values))
    assert abs(fd - an) <= 1e-6 * max(abs(an), 1.0)


@given(st.integers(0, 2**31))
def test_gradient_laplacian_adjoint(seed):
    g = grid(16, 8.0)
    rng = np.random.default_rng(seed)
    a, b = interior_random(g, rng), interior_random(g, rng)
    lhs = float(np.sum(a.values * -laplacian(b).values))
    # polarization of the face sum of squares gives sum grad a . grad b
    plus = kernels.face_sumsq((a + b).values, g.h)
    minus = kernels.face_sumsq((a - b).values, g.h)
    rhs = 0.25 * (plus - minus)
    scale = kernels.face_sumsq(a.values, g.h) + kernels.face_sumsq(b.values, g.h)
    assert abs(lhs - rhs) <= 1e-10 * scale


# ------------------------------------------------------- sigma scaling


def test_sigma_scaling_examples(g48, s48):
    u = gaussian(g48)
    assert sigma_scaling(u, 1.0, 0.0, s48) == 0.0
    assert sigma_scaling(u, 1.0, 1.0, s48) == pytest.approx(total_energy(u, 1.0, s48).total, rel=1e-12)
    v = sigma_scaling(u, 1.0, 0.05, s48)
    assert v < 0
    assert v == pytest.approx(total_energy(u * 0.05, 1.0, s48).total, rel=1e-12)


@given(st.integers(0, 2**31), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_sigma_scaling_identity(seed, sigma, Z):
    g = grid(16, 8.0)
    s = solver_for(16, 8.0)
    u = smooth_random(g, np.random.default_rng(seed), signed=True)
    direct = total_energy(u * sigma, Z, s)
    assert abs(sigma_scaling(u, Z, sigma, s) - direct.total) <= 1e-12 * max(direct.scale, 1e-300)


def test_sigma_scaling_rejects_negative_sigma(g16):
    with pytest.raises(ValueError):
        sigma_scaling(ScalarField3D.zeros(g16), 1.0, -0.1, solver_for(16, 8.0))


# ------------------------------------------------------------ dilation


def test_dilation_curve_of_bump(g48, s48):
    u = smooth_bump(g48, 1.2)
    curve = dilation_energy_limit(u, [1.0, 0.5, 0.25], s48)
    assert curve[0][1] == pytest.approx(total_energy(u, 0.0, s48).total, rel=1e-14)
    vals = [e for _, e in curve]
    assert all(v > 0 for v in vals)
    assert vals[0] > vals[1] > vals[2]


def test_dilation_curve_of_zero(g32, s32):
    curve = dilation_energy_limit(ScalarField3D.zeros(g32), [1.0, 0.5], s32)
    assert [e for _, e in curve] == [0.0, 0.0]


def test_dilation_curve_approaches_zero(g48, s48):
    u = smooth_bump(g48, 1.0)
    sig = [1.0, 0.8, 0.6, 0.45, 0.35, 0.25]
    vals = [e for _, e in dilation_energy_limit(u, sig, s48)]
    for a, b in zip(vals, vals[1:]):
        assert b <= 1.05 * a
    assert vals[-1] < 0.35 * vals[0]


def test_dilation_curve_requires_decreasing(g32, s32):
    with pytest.raises(ValueError):
        dilation_energy_limit(gaussian(g32), [0.5, 1.0], s32)


def test_dilation_curve_overflow(g32, s32):
    with pytest.raises(ValueError):
        dilation_energy_limit(gaussian(g32, width=2.0), [1.0, 0.2], s32)
