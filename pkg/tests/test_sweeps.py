import math

import numpy as np
import pytest

from ifps.interference import constant_eta_vb
from ifps.sweeps import (
    LAYER_NAMES,
    StateTemplate,
    SweepGrid,
    load_layer_csv,
    save_layer_csv,
    save_sweep_json,
    sweep_bandwidth_mlambda,
    sweep_dxi_mlambda,
    sweep_eta_pair,
    sweep_schmidt,
    sweep_to_json_dict,
)

NM = 1e-9
LAM = 780 * NM

NARROWBAND = StateTemplate(
    photon_fwhm_ratio=3.205e-4, pump_fwhm_ratio=1.282e-4, points_per_axis=48
)


@pytest.fixture(scope="module")
def small_dxi_grid():
    x = np.linspace(-math.pi / 4, math.pi / 4, 11)
    y = np.linspace(0.0, math.pi, 11)
    return sweep_dxi_mlambda(NARROWBAND, LAM, theta=0.0, delta_xi_values=x, m_lambda_values=y)


def test_layers_shapes_and_sum_identity(small_dxi_grid):
    grid = small_dxi_grid
    for name in LAYER_NAMES:
        assert grid.layers[name].shape == (11, 11)
    np.testing.assert_allclose(
        grid.layers["P_S"], grid.layers["P_S0"] + grid.layers["P_SI"], atol=1e-9
    )
    np.testing.assert_allclose(grid.layers["P_S"] + grid.layers["P_B"], 1.0, atol=1e-9)


def test_zero_offset_column_separates_perfectly(small_dxi_grid):
    column = small_dxi_grid.layers["P_S"][:, 5]  # delta_xi = 0
    np.testing.assert_allclose(column, 1.0, atol=2e-3)


def test_half_cycle_row_at_theta_pi():
    x = np.linspace(-math.pi / 4, math.pi / 4, 9)
    grid = sweep_dxi_mlambda(
        NARROWBAND, LAM, theta=math.pi, delta_xi_values=x, m_lambda_values=[math.pi / 2]
    )
    np.testing.assert_allclose(grid.layers["P_S"][0], 1.0, atol=2e-3)


def test_zero_dispersion_row_matches_constant_eta_law(small_dxi_grid):
    grid = small_dxi_grid
    vb = grid.layers["V_B"][0]  # m_lambda = 0 row
    expected = [constant_eta_vb(math.cos(math.pi / 4 + d) ** 2) for d in grid.x_values]
    np.testing.assert_allclose(vb, expected, atol=1e-3)


def test_demultiplexer_singularity_marked_undefined(small_dxi_grid):
    vb = small_dxi_grid.layers["V_B"]
    assert np.isnan(vb[5, 5])  # (delta_xi, m_lambda) = (0, pi/2)
    assert not np.isnan(vb[5, 4]) and not np.isnan(vb[4, 5])


def test_unphysical_nondegeneracy_rejected():
    with pytest.raises(ValueError, match="non-degeneracy"):
        sweep_dxi_mlambda(
            NARROWBAND,
            LAM,
            theta=0.0,
            delta_xi_values=[0.0],
            m_lambda_values=[2.5 * 16.335],
        )


def test_bandwidth_sweep_vanishing_limit_matches_dxi_column():
    y = np.linspace(0.0, math.pi, 7)
    narrow = sweep_bandwidth_mlambda(
        LAM, 0.0, [1e-4], y, sn_mode="flat-pump", points_per_axis=48
    )
    reference = sweep_dxi_mlambda(
        StateTemplate(photon_fwhm_ratio=1e-4 / 16.335, points_per_axis=48),
        LAM,
        0.0,
        [0.0],
        y,
    )
    np.testing.assert_allclose(
        narrow.layers["P_S"][:, 0], reference.layers["P_S"][:, 0], atol=1e-6
    )


def test_bandwidth_sweep_full_cycle_washout():
    grid = sweep_bandwidth_mlambda(
        LAM, 0.0, [math.pi], [0.0], sn_mode="flat-pump", points_per_axis=128, sigma_span=5.0
    )
    assert grid.layers["P_S"][0, 0] == pytest.approx(0.5, abs=0.02)
    assert grid.layers["P_SI"][0, 0] == pytest.approx(0.0, abs=0.02)


def test_bandwidth_sweep_90_percent_threshold():
    grid = sweep_bandwidth_mlambda(
        LAM,
        0.0,
        [math.pi / 8],
        np.linspace(0.0, math.pi, 5),
        sn_mode="flat-pump",
        points_per_axis=64,
    )
    assert np.all(grid.layers["P_S"] >= 0.90)


def test_bandwidth_sweep_requires_pump_ratio_in_pump_mode():
    with pytest.raises(ValueError, match="pump_fwhm_ratio"):
        sweep_bandwidth_mlambda(LAM, 0.0, [0.1], [0.0], sn_mode="pump-fwhm")


def test_product_invariance_between_factorizations():
    m_lambda, product = math.pi / 3, math.pi / 8
    values = []
    for big_m in (16.335, 16.335 / 2):
        grid = sweep_bandwidth_mlambda(
            LAM,
            0.0,
            [product],
            [m_lambda],
            sn_mode="flat-pump",
            big_m_reference=big_m,
            points_per_axis=96,
        )
        values.append(grid.layers["P_S"][0, 0])
    assert abs(values[0] - values[1]) < 1e-3


def test_schmidt_sweep_monotone_and_consistent():
    series = sweep_schmidt(LAM, math.pi / 4, [1.0, 1.4, 2.0, 2.8], points_per_axis=96)
    assert np.all(np.diff(series.p_s) >= -1e-3)
    assert series.p_s[-1] > 1.0 - 0.02  # entanglement restores separation
    np.testing.assert_allclose(series.sn_achieved, series.sn_target, atol=1e-3)
    # Flat-pump entry matches the bandwidth sweep at the same product.
    grid = sweep_bandwidth_mlambda(
        LAM, 0.0, [math.pi / 4], [0.0], sn_mode="flat-pump", points_per_axis=96
    )
    assert series.p_s[0] == pytest.approx(grid.layers["P_S"][0, 0], abs=1e-6)


def test_schmidt_sweep_rejects_unreachable_target():
    with pytest.raises(ValueError, match="achievable maximum"):
        sweep_schmidt(LAM, math.pi / 4, [400.0], points_per_axis=32)


@pytest.fixture(scope="module")
def eta_grid():
    e = np.linspace(0.0, 1.0, 11)
    return sweep_eta_pair(e, e, theta=0.0, points_per_axis=32)


def test_eta_pair_balanced_point(eta_grid):
    assert eta_grid.layers["P_S"][5, 5] == pytest.approx(1.0, abs=1e-6)


def test_eta_pair_antisymmetry_ridge(eta_grid):
    n = eta_grid.x_values.size
    ridge = [eta_grid.layers["P_S"][n - 1 - i, i] for i in range(n)]
    np.testing.assert_allclose(ridge, 1.0, atol=1e-6)


def test_eta_pair_matches_derived_closed_form(eta_grid):
    # Narrowband limit: P_S = sin^2(xi1 + xi2) with xi = acos(sqrt(eta)).
    ps = eta_grid.layers["P_S"]
    x = eta_grid.x_values
    for i, e1 in enumerate(x):
        for j, e2 in enumerate(x):
            expected = math.sin(math.acos(math.sqrt(e1)) + math.acos(math.sqrt(e2))) ** 2
            assert ps[j, i] == pytest.approx(expected, abs=1e-6)


def test_eta_pair_opposing_quadrants_reach_high_fidelity(eta_grid):
    # With the ratios straddling 50:50, high separation stays achievable:
    # every unbalanced eta1 row has an opposing eta2 with P_S > 0.9.
    ps = eta_grid.layers["P_S"]
    x = eta_grid.x_values
    for i, e1 in enumerate(x):
        if e1 >= 0.5:
            continue
        opposing = [ps[j, i] for j, e2 in enumerate(x) if e2 > 0.5]
        assert max(opposing) > 0.9


def test_eta_pair_visibility_mirror_symmetry(eta_grid):
    vs = eta_grid.layers["V_S"]
    vb_mirrored = eta_grid.layers["V_B"][:, ::-1]
    both = ~np.isnan(vs) & ~np.isnan(vb_mirrored)
    np.testing.assert_allclose(vs[both], vb_mirrored[both], atol=1e-9)
    np.testing.assert_array_equal(np.isnan(vs), np.isnan(vb_mirrored))


def test_csv_round_trip(tmp_path, small_dxi_grid):
    path = tmp_path / "grid_P_S.csv"
    save_layer_csv(small_dxi_grid, "P_S", path)
    loaded = load_layer_csv(path)
    assert loaded.x_name == small_dxi_grid.x_name
    assert loaded.y_name == small_dxi_grid.y_name
    np.testing.assert_allclose(loaded.x_values, small_dxi_grid.x_values, rtol=1e-8)
    np.testing.assert_allclose(
        loaded.layers["P_S"], small_dxi_grid.layers["P_S"], rtol=1e-8, atol=1e-12
    )


def test_csv_serializes_undefined_as_na(tmp_path, small_dxi_grid):
    path = tmp_path / "grid_V_B.csv"
    save_layer_csv(small_dxi_grid, "V_B", path)
    text = path.read_text()
    assert "NA" in text
    loaded = load_layer_csv(path)
    assert np.isnan(loaded.layers["V_B"][5, 5])


def test_json_bundle_round_trip(tmp_path, small_dxi_grid):
    payload = sweep_to_json_dict(small_dxi_grid)
    assert payload["layers"]["V_B"][5][5] is None
    path = tmp_path / "grid.json"
    save_sweep_json(small_dxi_grid, path)
    import json

    parsed = json.loads(path.read_text())
    assert parsed["x_name"] == "delta_xi"
    assert len(parsed["layers"]["P_S"]) == 11


def test_workers_do_not_change_results():
    x = np.linspace(-0.5, 0.5, 5)
    y = np.linspace(0.0, math.pi, 5)
    serial = sweep_dxi_mlambda(NARROWBAND, LAM, 0.0, x, y, workers=1)
    threaded = sweep_dxi_mlambda(NARROWBAND, LAM, 0.0, x, y, workers=4)
    for name in LAYER_NAMES:
        np.testing.assert_array_equal(serial.layers[name], threaded.layers[name])


def test_sweep_grid_validates_shapes():
    with pytest.raises(ValueError, match="shape"):
        SweepGrid("x", [0.0, 1.0], "y", [0.0], {"P_S": np.zeros((3, 3))})
