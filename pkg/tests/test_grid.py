import numpy as np
import pytest

from choquard_singular.grid import RadialGrid, log_radii


def test_log_radii_endpoints():
    r = log_radii(1e-4, 5)
    assert r[0] == 1e-4 and r[-1] == 1.0
    assert np.allclose(np.diff(np.log(r)), np.log(10))


@pytest.mark.parametrize("radii, values", [
    ([0.5, 0.2], [1, 2]),
    ([0.0, 0.5], [1, 2]),
    ([0.5, 1.5], [1, 2]),
    ([0.2, 0.5], [1, np.nan]),
])
def test_invalid_grids(radii, values):
    with pytest.raises(ValueError):
        RadialGrid(np.array(radii), np.array(values))


def test_csv_and_json_round_trip():
    g = RadialGrid.sample(lambda r: r ** -2.5, 1e-3, 7)
    back = RadialGrid.from_csv(g.to_csv())
    assert np.array_equal(back.radii, g.radii) and np.array_equal(back.values, g.values)
    assert g.to_csv().splitlines()[0] == "r,value"
    back = RadialGrid.from_dict(g.to_dict())
    assert np.array_equal(back.values, g.values)


def test_loglog_interpolation_is_exact_for_powers():
    g = RadialGrid.sample(lambda r: 3 * r ** -1.7, 1e-3, 9)
    f = g.loglog_interpolator()
    x = np.array([1e-5, 2e-3, 0.37])
    assert np.allclose(f(x), 3 * x ** -1.7, rtol=1e-12)
