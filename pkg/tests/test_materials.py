import numpy as np
import pytest

from snspd_link import Material, builtin_materials, constant_material
from snspd_link.errors import OutOfRangeError


def test_linear_midpoint():
    m = Material("si", ((1.5e-6, 3.48, 0.0), (1.6e-6, 3.46, 0.0)))
    n, k = m.nk_at(1.55e-6)
    assert n == pytest.approx(3.47, abs=1e-12)
    assert k == 0.0


def test_knot_lookup_single_row():
    m = Material("sin", ((1.57e-6, 1.996, 0.0),))
    assert m.nk_at(1.57e-6) == (1.996, 0.0)
    with pytest.raises(OutOfRangeError):
        m.nk_at(1.5699e-6)


def test_out_of_range_is_error_not_extrapolation():
    m = Material("si", ((1.5e-6, 3.48, 0.0), (1.6e-6, 3.46, 0.0)))
    with pytest.raises(OutOfRangeError):
        m.nk_at(1.3e-6)
    with pytest.raises(OutOfRangeError):
        m.nk_at(1.6000001e-6)


def test_exact_at_knots():
    rows = ((1.2e-6, 2.01, 0.1), (1.4e-6, 2.00, 0.2), (1.7e-6, 1.99, 0.0))
    m = Material("x", rows)
    for wl, n, k in rows:
        assert m.nk_at(wl) == (n, k)


def test_interpolation_is_linear_between_knots():
    m = Material("x", ((1.2e-6, 2.0, 0.5), (1.6e-6, 3.0, 0.1)))
    rng = np.random.default_rng(42)
    for t in rng.uniform(0, 1, 25):
        wl = 1.2e-6 + t * 0.4e-6
        n, k = m.nk_at(wl)
        assert n == pytest.approx(2.0 + t * 1.0, rel=1e-12)
        assert k == pytest.approx(0.5 + t * (-0.4), rel=1e-9, abs=1e-12)


def test_table_validation():
    with pytest.raises(ValueError):
        Material("bad", ())
    with pytest.raises(ValueError):
        Material("bad", ((1.6e-6, 2.0, 0.0), (1.5e-6, 2.0, 0.0)))
    with pytest.raises(ValueError):
        Material("bad", ((1.5e-6, 2.0, 0.0), (1.5e-6, 2.1, 0.0)))
    with pytest.raises(ValueError):
        Material("gain", ((1.5e-6, 2.0, -1e-4),))
    with pytest.raises(ValueError):
        Material("bad", ((1.5e-6, -1.0, 0.0),))


def test_complex_index_and_permittivity_convention():
    m = Material("metal", ((1.5e-6, 0.8, 1.6),))
    idx = m.index_at(1.5e-6)
    assert idx == complex(0.8, -1.6)
    eps = m.permittivity_at(1.5e-6)
    assert eps == pytest.approx(complex(0.8, -1.6) ** 2)
    assert eps.imag < 0  # absorbing under the forward exp(-i beta z) convention


def test_builtins_cover_telecom_band():
    mats = builtin_materials()
    assert set(mats) >= {"silicon", "silicon_nitride", "silica", "nbtin",
                         "vacuum"}
    for m in mats.values():
        n, k = m.nk_at(1.57e-6)
        assert n > 0 and k >= 0
    n_si, _ = mats["silicon"].nk_at(1.57e-6)
    assert n_si == pytest.approx(3.4749, abs=1e-3)
    # placeholder nanowire table is metal-like: k > n, Re(eps) < 0
    n_w, k_w = mats["nbtin"].nk_at(1.57e-6)
    assert k_w > n_w
    assert mats["nbtin"].permittivity_at(1.57e-6).real < 0
    assert mats["nbtin"].is_absorbing
    assert not mats["silica"].is_absorbing


def test_constant_material_span():
    m = constant_material("c", 1.5, wavelength_span=(1e-6, 2e-6))
    assert m.nk_at(1.3e-6) == (1.5, 0.0)
    with pytest.raises(OutOfRangeError):
        m.nk_at(0.9e-6)
