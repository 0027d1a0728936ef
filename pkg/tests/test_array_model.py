import cmath
import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from sbs_hybrid import (ElementPattern, InvalidArgumentError, UlaConfig, element_gain,
                        emitted_field, radiated_power, steering_matrix, steering_vector)

ISOTROPIC = ElementPattern(max_gain_db=0.0, vertical_3db_deg=math.inf,
                           horizontal_3db_deg=math.inf)


def _gain_direct(az_deg, el_deg=0.0):
    a_h = -min(12 * ((az_deg - 90) / 65) ** 2, 30)
    a_v = -min(12 * (el_deg / 65) ** 2, 30)
    return 10 ** ((8 - min(-(a_h + a_v), 30)) / 20)


def test_boresight_gain():
    assert element_gain(ElementPattern(), np.pi / 2) == pytest.approx(10 ** 0.4)


def test_gain_floor_far_off_boresight():
    assert element_gain(ElementPattern(), 3 * np.pi / 2) == pytest.approx(10 ** (-22 / 20))


@pytest.mark.parametrize("az", [0, 20, 45, 90, 133, 170, 250])
@pytest.mark.parametrize("el", [-80, -20, 0, 35])
def test_gain_matches_direct_formula(az, el):
    g = element_gain(ElementPattern(), math.radians(az), math.radians(el))
    assert g == pytest.approx(_gain_direct(az, el), rel=1e-12)


def test_gain_symmetric_about_boresight():
    d = np.radians(np.linspace(0, 90, 37))
    p = ElementPattern()
    assert np.allclose(element_gain(p, np.pi / 2 + d), element_gain(p, np.pi / 2 - d))


def test_literal_sine_ramp_at_zero_azimuth():
    cfg = UlaConfig(8, broadside_azimuth_deg=0.0)
    a = steering_vector(cfg, 0.0)
    assert np.allclose(a, element_gain(cfg.pattern, 0.0))


def test_literal_sine_ramp_half_pi_step():
    cfg = UlaConfig(2, broadside_azimuth_deg=0.0)
    a = steering_vector(cfg, math.radians(30))
    assert cmath.phase(a[1] / a[0]) == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("broadside", [0.0, 90.0])
def test_steering_vector_direct_evaluation(broadside):
    cfg = UlaConfig(16, broadside_azimuth_deg=broadside)
    phi = math.radians(93)
    g = _gain_direct(93)
    u = math.sin(phi - math.radians(broadside))
    expected = [g * cmath.exp(1j * math.pi * n * u) for n in range(16)]
    assert np.allclose(steering_vector(cfg, phi), expected, atol=1e-12)


def test_default_broadside_uses_cosine():
    cfg = UlaConfig(4)
    phi = np.radians([40, 90, 120])
    assert np.allclose(cfg.spatial_frequency(phi), -np.cos(phi))


def test_steering_matrix_columns():
    cfg = UlaConfig(6)
    az = np.radians([40, 77, 130])
    a = steering_matrix(cfg, az)
    for k, phi in enumerate(az):
        assert np.allclose(a[:, k], steering_vector(cfg, phi))


def test_emitted_field_shapes():
    cfg = UlaConfig(4)
    y = np.ones((4, 3))
    assert emitted_field(cfg, y[:, 0], 1.0).shape == ()
    assert emitted_field(cfg, y, np.array([0.5, 1.0])).shape == (2, 3)


def test_invalid_array_size():
    with pytest.raises(InvalidArgumentError):
        UlaConfig(0)


def test_isotropic_single_element_radiates_four_pi():
    cfg = UlaConfig(1, pattern=ISOTROPIC)
    assert radiated_power(cfg, np.ones((1, 1))) == pytest.approx(4 * np.pi, rel=1e-4)


def test_radiated_power_against_adaptive_quadrature():
    cfg = UlaConfig(2)
    y = np.array([1.0, 0.5j])

    def integrand(el, az):
        return abs(emitted_field(cfg, y, az, el)) ** 2 * math.cos(el)

    ref, _ = dblquad(integrand, 0, 2 * math.pi, -math.pi / 2, math.pi / 2, epsabs=1e-6)
    assert radiated_power(cfg, y, grid_deg=0.5) == pytest.approx(ref, rel=2e-3)


def test_power_quadratic_in_amplitude():
    cfg = UlaConfig(8)
    y = np.random.default_rng(0).standard_normal((8, 2)) + 0j
    assert radiated_power(cfg, 2 * y) == pytest.approx(4 * radiated_power(cfg, y), rel=1e-12)


def test_power_stable_under_grid_halving():
    cfg = UlaConfig(16)
    y = np.exp(1j * np.pi * np.arange(16) * 0.3)[:, None]
    coarse = radiated_power(cfg, y, 1.0)
    fine = radiated_power(cfg, y, 0.5)
    assert abs(coarse - fine) / fine < 1e-3


def test_radiated_power_shape_check():
    with pytest.raises(InvalidArgumentError):
        radiated_power(UlaConfig(4), np.ones(3))
