import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radome_irs import (
    Direction,
    IrsAngles,
    antenna_gain,
    aoa_transform,
    element_reflection_gain,
    irs_array_response,
    los_gain,
    steering_vector,
)
from radome_irs.propagation import (
    ELEMENT_WISE,
    FAR_FIELD_ISOTROPIC,
    antenna_gain_from_unit,
    half_gain_factor,
)

WAVELENGTH = 0.05

directions = st.builds(
    Direction,
    theta=st.floats(0.0, math.pi, allow_nan=False),
    phi=st.floats(0.0, 2 * math.pi, exclude_max=True, allow_nan=False),
)


def test_steering_vector_examples():
    assert np.allclose(steering_vector(0.0, 4), np.ones(4))
    assert np.allclose(steering_vector(1.0, 2), [1.0, -1.0])
    assert np.allclose(steering_vector(0.5, 3), [1.0, 1j, -1.0])


@given(phi=st.floats(-4.0, 4.0, allow_nan=False), m=st.integers(1, 64))
@settings(deadline=None)
def test_steering_vector_unit_modulus(phi, m):
    assert np.allclose(np.abs(steering_vector(phi, m)), 1.0, atol=1e-12)


def test_direction_unit_vector_roundtrip(rng):
    for _ in range(100):
        d = Direction(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        u = d.unit_vector
        assert math.isclose(np.linalg.norm(u), 1.0, abs_tol=1e-12)
        back = Direction.from_unit_vector(u)
        assert np.allclose(back.unit_vector, u, atol=1e-12)


def test_aoa_transform_axis_directions():
    plus_x = Direction(math.pi / 2, math.pi / 2)
    assert math.isclose(aoa_transform(plus_x, 2).theta, 0.0, abs_tol=1e-12)
    assert math.isclose(aoa_transform(plus_x, 1).theta, math.pi, abs_tol=1e-12)
    plus_z = Direction(math.pi / 2, 0.0)
    assert math.isclose(aoa_transform(plus_z, 4).theta, 0.0, abs_tol=1e-12)
    assert math.isclose(aoa_transform(plus_z, 3).theta, math.pi, abs_tol=1e-12)


@given(d=directions, surface=st.integers(1, 4))
@settings(deadline=None, max_examples=500)
def test_aoa_transform_preserves_direction_cosine(d, surface):
    from radome_irs.geometry import SURFACE_NORMALS

    angles = aoa_transform(d, surface)
    cos_hat = math.cos(angles.theta)
    assert math.isclose(cos_hat, float(d.unit_vector @ SURFACE_NORMALS[surface - 1]), abs_tol=1e-12)
    # the two in-plane components and the normal cosine form a unit vector
    sin_hat = math.sin(angles.theta)
    total = cos_hat**2 + sin_hat**2 * (math.cos(angles.phi) ** 2 + math.sin(angles.phi) ** 2)
    assert math.isclose(total, 1.0, abs_tol=1e-12)


def test_irs_array_response_examples():
    lam = WAVELENGTH
    assert irs_array_response(IrsAngles(0.3, 0.7), 1, 1, lam / 2, lam) == pytest.approx(1.0)
    assert irs_array_response(
        IrsAngles(0.3, 0.7), 1, 1, lam / 2, lam, initial_phase=math.pi / 2
    ) == pytest.approx(1j)
    value = irs_array_response(IrsAngles(math.pi / 2, math.pi / 2), 1, 2, lam / 2, lam)
    assert value == pytest.approx(-1.0)


def test_irs_array_response_unit_modulus(rng):
    lam = WAVELENGTH
    for _ in range(200):
        angles = IrsAngles(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        value = irs_array_response(angles, rng.integers(1, 9), rng.integers(1, 9), lam / 2, lam)
        assert math.isclose(abs(value), 1.0, abs_tol=1e-12)


def test_reflection_gain_examples():
    lam = WAVELENGTH
    area = (lam / 2) ** 2
    assert element_reflection_gain(math.pi / 3, math.pi / 2, area, lam) == 0.0
    assert element_reflection_gain(0.0, 0.0, area, lam) == pytest.approx(2 * math.pi**2)
    assert element_reflection_gain(
        math.pi / 4, math.pi / 4, area, lam, mode=FAR_FIELD_ISOTROPIC
    ) == 2.0


def test_reflection_gain_half_space_zero_is_exact(rng):
    lam = WAVELENGTH
    area = (lam / 2) ** 2
    for mode in (ELEMENT_WISE, FAR_FIELD_ISOTROPIC):
        for _ in range(50):
            behind = rng.uniform(math.pi / 2, math.pi)
            front = rng.uniform(0, math.pi / 2)
            assert element_reflection_gain(behind, front, area, lam, mode=mode) == 0.0
            assert element_reflection_gain(front, behind, area, lam, mode=mode) == 0.0


def test_half_gain_factor_factorizes_the_gain(rng):
    lam = WAVELENGTH
    area = (lam / 2) ** 2
    for _ in range(100):
        ta, td = rng.uniform(0, math.pi / 2, 2)
        gain = element_reflection_gain(ta, td, area, lam)
        product = math.sqrt(2) * half_gain_factor(math.cos(ta), area, lam) * half_gain_factor(
            math.cos(td), area, lam
        )
        assert math.isclose(product**2, gain, rel_tol=1e-12)


def test_antenna_gain_examples():
    assert antenna_gain(Direction(0.3, 1.0), "isotropic") == 1.0
    boresight = Direction.from_unit_vector([0.0, 1.0, 0.0])
    assert antenna_gain(boresight, "tr38901") == pytest.approx(10**0.8)
    back = Direction.from_unit_vector([0.0, -1.0, 0.0])
    assert antenna_gain(back, "tr38901") == pytest.approx(10 ** ((8.0 - 30.0) / 10.0))


def test_antenna_gain_vectorized_matches_scalar(rng):
    u = rng.normal(size=(64, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    batch = antenna_gain_from_unit(u, "tr38901")
    singles = [antenna_gain(Direction.from_unit_vector(v), "tr38901") for v in u]
    assert np.allclose(batch, singles, rtol=1e-12)


def test_los_gain_examples():
    lam = WAVELENGTH
    g = los_gain([0.0, 0.0, 0.0], [lam, 0.0, 0.0], lam)
    assert abs(g) == pytest.approx(1.0 / (4 * math.pi))
    assert g.imag == pytest.approx(0.0, abs=1e-12)
    g2 = los_gain([0.0, 0.0, 0.0], [2 * lam, 0.0, 0.0], lam)
    assert abs(g2) == pytest.approx(abs(g) / 2)
    g4 = los_gain([0.0, 0.0, 0.0], [lam / 4, 0.0, 0.0], lam)
    assert np.angle(g4) == pytest.approx(-math.pi / 2)


@given(st.lists(st.floats(-5.0, 5.0, allow_nan=False), min_size=6, max_size=6))
@settings(deadline=None)
def test_los_gain_reciprocity(coords):
    p, q = np.array(coords[:3]), np.array(coords[3:])
    if np.linalg.norm(p - q) == 0.0:  # includes subnormal gaps that underflow
        return
    assert los_gain(p, q, WAVELENGTH) == pytest.approx(los_gain(q, p, WAVELENGTH))


def test_los_gain_rejects_coincident_points():
    with pytest.raises(ValueError):
        los_gain([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], WAVELENGTH)
