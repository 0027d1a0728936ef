import numpy as np
import pytest

from sbs_hybrid import (ConfigurationError, ScenarioParams, SweepResult, reference_scenario,
                        run_sidr_sweep, run_sumrate_sweep, sample_scenario)
from sbs_hybrid.sim import (REFERENCE_AZIMUTHS_DEG, REFERENCE_SYMBOLS, check_feasible,
                            sample_azimuths)


def _check_constraints(params, az):
    cfg = params.array()
    deg = np.degrees(az)
    assert np.all((deg >= 30) & (deg <= 150))
    u = cfg.spatial_frequency(az)
    for j in range(az.size):
        for k in range(j):
            assert abs(deg[j] - deg[k]) >= params.min_separation_deg - 1e-9
            assert abs(u[j] - u[k]) >= params.guard - 1e-12


def test_single_user_anywhere_in_sector():
    params = ScenarioParams(n_users=1)
    for rz in range(50):
        az = sample_azimuths(params, 0, rz)
        _check_constraints(params, az)


def test_constraints_hold_over_many_draws():
    params = ScenarioParams()
    rng = np.random.default_rng(0)
    ks = rng.integers(1, 11, 10**4)
    for i, k in enumerate(ks):
        p = ScenarioParams(n_users=int(k))
        _check_constraints(p, sample_azimuths(p, 1, i))
    _check_constraints(params, sample_azimuths(params, 1, 0))


def test_default_scenario_shapes():
    scn = sample_scenario(ScenarioParams(), 3)
    assert scn.azimuths.shape == (10,)
    assert scn.symbols.shape == (10, 640)
    assert np.all(scn.channel_gains >= 0)
    assert np.allclose(np.abs(scn.symbols), 1.0)


def test_gaussian_symbols_unit_variance():
    scn = sample_scenario(ScenarioParams(constellation="gaussian-unit", n_symbols=20000), 0)
    assert np.mean(np.abs(scn.symbols) ** 2) == pytest.approx(1.0, rel=0.02)


def test_sampling_is_deterministic():
    a = sample_scenario(ScenarioParams(), 5, 2)
    b = sample_scenario(ScenarioParams(), 5, 2)
    assert np.array_equal(a.azimuths, b.azimuths)
    assert np.array_equal(a.symbols, b.symbols)
    assert np.array_equal(a.channel_gains, b.channel_gains)


def test_user_streams_shared_across_user_counts():
    small = sample_scenario(ScenarioParams(n_users=2), 4, 1)
    big = sample_scenario(ScenarioParams(n_users=5), 4, 1)
    assert np.array_equal(small.channel_gains, big.channel_gains[:2])
    assert np.array_equal(small.symbols[:, :128], big.symbols[:2, :128])


def test_infeasible_configuration():
    with pytest.raises(ConfigurationError):
        check_feasible(ScenarioParams(n_users=18, min_separation_deg=7.2))
    with pytest.raises(ConfigurationError):
        sample_azimuths(ScenarioParams(n_users=10, spatial_guard=0.3), 0)


def test_invalid_params():
    with pytest.raises(ConfigurationError):
        ScenarioParams(constellation="16qam")
    with pytest.raises(ConfigurationError):
        ScenarioParams(noise_variance=0)


def test_reference_scenario_constants():
    scn = reference_scenario()
    assert np.allclose(np.degrees(scn.azimuths), REFERENCE_AZIMUTHS_DEG)
    assert np.array_equal(scn.symbols[:, 0], np.array(REFERENCE_SYMBOLS, dtype=complex))
    assert (scn.n_antennas, scn.l_chains, scn.q_phases) == (16, 3, 8)
    longer = reference_scenario(n_symbols=12)
    assert longer.symbols.shape == (10, 12)
    assert np.array_equal(longer.symbols[:, 0], scn.symbols[:, 0])


def test_sweep_result_length_check():
    with pytest.raises(ValueError):
        SweepResult("RFC", np.arange(3), {"a": np.zeros(2)}, {"a": np.zeros(3)}, 1)


def test_sidr_sweep_small():
    params = ScenarioParams(n_antennas=8, n_users=3, n_symbols=24)
    res = run_sidr_sweep(params, [1, 2, 3, 4], [2, 8], realizations=4, seed=1)
    assert res.columns == ["RFC", "digital", "hybrid", "SbS_2", "SbS_8"]
    assert np.all(res.series["digital"] == res.series["digital"][0])
    assert np.all(np.isnan(res.series["hybrid"][:2]))
    assert np.all(np.isfinite(res.series["hybrid"][2:]))
    again = run_sidr_sweep(params, [1, 2, 3, 4], [2, 8], realizations=4, seed=1)
    for name in res.series:
        assert np.array_equal(res.series[name], again.series[name], equal_nan=True)


def test_sidr_sweep_prefix_matches_direct_solve():
    from sbs_hybrid import build_digital, build_sbs, decompose, sidr, steering_matrix
    from sbs_hybrid.phase_opt import PhaseSet
    params = ScenarioParams(n_antennas=8, n_users=3, n_symbols=24)
    res = run_sidr_sweep(params, [2], [4], realizations=1, seed=2)
    scn = sample_scenario(params, 2, 0)
    cfg = scn.array()
    _, y = build_digital(cfg, scn.azimuths, scn.symbols)
    _, y_hyb = build_sbs(y, PhaseSet(4), 2)
    a = steering_matrix(cfg, scn.azimuths)
    assert res.series["SbS_4"][0] == pytest.approx(sidr(decompose(a.conj().T @ y_hyb, scn.symbols)))


def test_sumrate_single_user_schemes_agree():
    params = ScenarioParams()
    res = run_sumrate_sweep(params, [1], realizations=20, seed=0)
    d, h, s = (res.series[n][0] for n in ("digital", "hybrid", "SbS"))
    assert abs(h - d) / d < 0.05
    assert abs(s - d) / d < 0.05


def test_realization_doubling_is_consistent():
    params = ScenarioParams(n_antennas=8, l_chains=2, n_users=3, n_symbols=48)
    small = run_sumrate_sweep(params, [1, 2, 3], realizations=30, seed=3)
    large = run_sumrate_sweep(params, [1, 2, 3], realizations=60, seed=3)
    for name in small.series:
        diff = np.abs(small.series[name] - large.series[name])
        assert np.all(diff <= 3 * small.stderr[name] + 1e-12)


def test_invalid_realizations():
    with pytest.raises(ConfigurationError):
        run_sumrate_sweep(ScenarioParams(), [1], realizations=0)
    with pytest.raises(ConfigurationError):
        run_sidr_sweep(ScenarioParams(), [17], [8], realizations=1)
