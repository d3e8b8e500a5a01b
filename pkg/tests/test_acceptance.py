"""End-to-end acceptance: one test per headline property, each holding a
stated tolerance and a wall-clock budget.  The heavy Taylor-Green run is
shared by the energy and weight-sweep tests through a module fixture."""

import math
import statistics
import time

import mpmath
import numpy as np
import pytest
from scipy.integrate import simpson

from lpns.bands import band_multiplier, lowpass_multiplier, project_band
from lpns.checks import (
    check_bernstein,
    check_gradient_equivalence,
    check_paraproduct_exactness,
    check_pressure_cz,
    check_sobolev_band,
    pressure_from_tensor,
    sobolev_ratios,
)
from lpns.generators import (
    FieldGenerator,
    RANDOM_BAND_LIMITED,
    SMOOTH_DECAYING,
    WAVE_PACKET,
)
from lpns.norms import dsigma_magnitude, lq_norm
from lpns.series import (
    BarrierConfig,
    SeriesMonitor,
    SeriesParams,
    aggregate_series,
    barrier_ode,
    bhat,
    bk,
    epsilon_threshold,
    j0_cutoff,
    reweighted,
    series_value,
    term_table,
)
from lpns.solver import (
    EnergyMonitor,
    InitialSpec,
    SolverConfig,
    VelocityState,
    beltrami_state,
    l2_norm_sq,
    pressure_solve,
    random_divfree_state,
    run,
    taylor_green_state,
)
from lpns.spectral import (
    Grid,
    PhysicalField,
    SpectralField,
    forward_transform,
    inverse_transform,
    parseval_mismatch,
    radius,
    spectral_from_mode,
)


class Budget:
    """Wall-clock guard: enter, do the work, then assert inside()."""

    def __init__(self, seconds: float):
        self.limit = seconds
        self.start = time.perf_counter()

    def assert_inside(self):
        elapsed = time.perf_counter() - self.start
        assert elapsed < self.limit, f"took {elapsed:.1f}s, budget {self.limit}s"


def _rel_l2(a: VelocityState, b: VelocityState) -> float:
    diff = tuple(x - y for x, y in zip(a.components, b.components))
    num = l2_norm_sq(VelocityState(a.grid, a.nu, a.time, diff))
    den = l2_norm_sq(b)
    return math.sqrt(num / den)


def test_transform_roundtrip_parseval_and_dft_oracle():
    budget = Budget(5.0)
    grid = Grid(32)
    rng = np.random.default_rng(11)
    f = PhysicalField(grid, rng.standard_normal(grid.shape))
    F = forward_transform(f)
    back = inverse_transform(F)
    assert np.max(np.abs(back.values - f.values)) < 1e-12
    assert parseval_mismatch(f, F) < 1e-12

    # brute-force DFT on a grid small enough to afford the dense matrix
    g8 = Grid(8)
    f8 = PhysicalField(g8, rng.standard_normal(g8.shape))
    w = np.exp(-2j * np.pi * np.outer(np.arange(8), np.arange(8)) / 8)
    oracle = np.einsum("ax,by,cz,xyz->abc", w, w, w, f8.values) / 8**3
    assert np.max(np.abs(forward_transform(f8).coeffs - oracle)) < 1e-12
    budget.assert_inside()


def test_partition_of_unity_inner_shells():
    budget = Budget(5.0)
    n = 64
    total = lowpass_multiplier(n, 0).copy()
    for j in range(1, 8):
        total = total + band_multiplier(n, j)
    r = radius(n)
    inner = (r >= 1.0) & (r <= 16.0)
    assert np.max(np.abs(total[inner] - 1.0)) < 1e-12
    budget.assert_inside()


def test_paraproduct_reconstruction_and_vanishing():
    budget = Budget(30.0)
    rep = check_paraproduct_exactness(
        FieldGenerator(RANDOM_BAND_LIMITED, 101, 64),
        FieldGenerator(RANDOM_BAND_LIMITED, 102, 64),
        j=3, n=64, samples=20)
    assert rep.measured_max_ratio < 1e-10
    assert rep.metadata["vanishing_max"] <= 1e-12

    # default support caps leave the far off-diagonal claim vacuous at
    # j=3, so exercise it on live bands at j=1 with a raised cap
    live = check_paraproduct_exactness(
        FieldGenerator(RANDOM_BAND_LIMITED, 103, 64, radius_cap=24.0),
        FieldGenerator(RANDOM_BAND_LIMITED, 104, 64),
        j=1, n=64, samples=2)
    assert live.metadata["claim2_m"] >= 4
    assert live.measured_max_ratio < 1e-10
    assert live.metadata["vanishing_max"] <= 1e-12
    budget.assert_inside()


def test_bernstein_slope_and_constant_stability():
    budget = Budget(60.0)
    fits = []
    for seed in (201, 202):
        rep = check_bernstein(FieldGenerator(WAVE_PACKET, seed, 64),
                              2.0, math.inf, (2, 3, 4, 5), 20)
        assert rep.passed
        assert 1.2 <= rep.fitted_exponent <= 1.65
        fits.append(rep.metadata["fitted_c"])
    cov = statistics.pstdev(fits) / statistics.mean(fits)
    assert cov < 0.5
    budget.assert_inside()


def test_gradient_band_ratio_window():
    budget = Budget(30.0)
    rep = check_gradient_equivalence(
        FieldGenerator(RANDOM_BAND_LIMITED, 301, 64), 2.0, (2, 3, 4, 5), 25)
    assert rep.samples == 100
    assert rep.metadata["c1"] >= math.pi - 1e-12
    assert rep.metadata["c2"] <= 4.0 * math.pi + 1e-12
    budget.assert_inside()


def test_sobolev_closed_forms_stability_and_band_scaling():
    budget = Budget(60.0)
    # analytic sine: both sides of the k=2 inequality in closed form
    grid = Grid(32)
    m = 4
    F = spectral_from_mode(grid, (m, 0, 0), 1.0)
    f = inverse_transform(F)
    w = 2.0 * math.pi * m
    lhs = math.exp(2.0 * lq_norm(f, 6.0).log_value)
    assert lhs == pytest.approx((5.0 / 16.0) ** (1.0 / 3.0), rel=1e-8)
    grad_sq = math.exp(2.0 * lq_norm(dsigma_magnitude(F, 1).magnitude,
                                     2.0).log_value)
    assert 4.0 * grad_sq == pytest.approx(4.0 * w**2 / 2.0, rel=1e-8)

    # fitted constants must not move when the sample count doubles
    gen = FieldGenerator(SMOOTH_DECAYING, 302, 32)
    small = check_sobolev_band(gen, 4.0, 1, 3, 8)
    large = check_sobolev_band(gen, 4.0, 1, 3, 16)
    for name in ("c_plain", "c_interp", "c_banded"):
        a, b = small.metadata[name], large.metadata[name]
        assert abs(a - b) <= 0.5 * (a + b) / 2.0

    # banded form without its scale compensation must fall like 2^(-2j);
    # needs an ensemble whose content radius actually doubles per band,
    # which the annulus-filling generator provides
    per_j = []
    js = (2, 3, 4)
    for j in js:
        gj = FieldGenerator(RANDOM_BAND_LIMITED, 303, 64).for_band(j)
        worst = max(sobolev_ratios(S, 2.0, 1, j)[2] * 2.0 ** (-2 * j)
                    for S in gj.samples(6))
        per_j.append(math.log2(worst))
    slope = np.polyfit(js, per_j, 1)[0]
    assert -2.3 <= slope <= -1.7
    budget.assert_inside()


def test_pressure_ratio_bound_and_beltrami_pressure():
    budget = Budget(30.0)
    for seed in range(50):
        u = random_divfree_state(Grid(32), nu=1.0, seed=seed)
        rep = check_pressure_cz(u, 2.0, 1, 3)
        assert rep.passed
        assert rep.measured_max_ratio <= 3.0

    u = beltrami_state(Grid(32), nu=1.0, lam=2)
    p_hat, _ = pressure_from_tensor(u)
    vals = [inverse_transform(SpectralField(u.grid, c)).values
            for c in u.components]
    speed2 = sum(v * v for v in vals)
    expected = -(speed2 - speed2.mean()) / 2.0
    assert np.max(np.abs(inverse_transform(p_hat).values - expected)) < 1e-10
    budget.assert_inside()


def _beltrami_error(dt: float) -> float:
    nu, lam = 0.01, 2
    cfg = SolverConfig(n=32, nu=nu, dt=dt, t_end=0.1,
                       initial=InitialSpec(kind="beltrami", lam=lam))
    state = run(cfg).state
    ref = beltrami_state(state.grid, nu, lam)
    decay = math.exp(-nu * (2.0 * math.pi * lam) ** 2 * state.time)
    exact = VelocityState(state.grid, nu, state.time,
                          tuple(decay * c for c in ref.components))
    return _rel_l2(state, exact)


def test_beltrami_solution_accuracy():
    budget = Budget(60.0)
    assert _beltrami_error(1e-3) < 1e-8
    budget.assert_inside()


def test_beltrami_timestep_order():
    """Halving the step must improve the final error by 16 within 20
    percent.  No such regime exists on this benchmark: the integrating
    factor advances the linear part exactly and the projection
    annihilates the pure-gradient quadratic term, so the error sits at
    the rounding floor for every step size (see the companion test for
    the measured order where the quadratic term is active)."""
    budget = Budget(60.0)
    coarse = _beltrami_error(1e-3)
    fine = _beltrami_error(5e-4)
    ratio = coarse / fine
    assert 12.8 <= ratio <= 19.2, (
        f"error ratio {ratio:.3g} (coarse {coarse:.3g}, fine {fine:.3g}); "
        "both errors are at the rounding floor, so step halving cannot "
        "show fourth-order gain on an exactly-integrated solution")
    budget.assert_inside()


def test_timestep_order_on_nonlinear_benchmark():
    # Richardson self-convergence where the quadratic term does work
    budget = Budget(60.0)
    def final(dt):
        cfg = SolverConfig(n=32, nu=0.02, dt=dt, t_end=0.08,
                           initial=InitialSpec(kind="taylor-green",
                                               amplitude=2.0))
        return run(cfg).state
    a, b, c = final(4e-3), final(2e-3), final(1e-3)
    def dist(x, y):
        diff = tuple(p - q for p, q in zip(x.components, y.components))
        return math.sqrt(l2_norm_sq(VelocityState(x.grid, x.nu, x.time, diff)))
    order = math.log2(dist(a, b) / dist(b, c))
    assert 3.5 <= order <= 4.5
    budget.assert_inside()


@pytest.fixture(scope="module")
def tg_run():
    """Taylor-Green at n=64, nu=0.05, to t=1: energy every step, series
    every 0.05, tables kept for the weight sweep."""
    start = time.perf_counter()
    cfg = SolverConfig(n=64, nu=0.05, dt=1e-3, t_end=1.0,
                       initial=InitialSpec(kind="taylor-green"))
    params = SeriesParams(sigma=2, b=8.0)
    energy = EnergyMonitor(cadence=0.0, l4_every=50)
    series = SeriesMonitor(params, t_final=cfg.t_end, cadence=0.05,
                           keep_tables=True)
    result = run(cfg, monitors=(energy, series))
    assert not result.blown_up
    return {
        "result": result,
        "series_monitor": series,
        "elapsed": time.perf_counter() - start,
    }


def test_energy_monotone_and_dissipation_budget(tg_run):
    assert tg_run["elapsed"] < 300.0
    rows = tg_run["result"].monitor_rows["energy"]
    l2 = np.array([row["l2_sq"] for row in rows])
    grad = np.array([row["grad_sq"] for row in rows])
    assert len(l2) == 1001
    drops = np.diff(l2)
    assert np.all(drops <= 1e-10 * l2[:-1])

    # budget identity: the half-energy drop equals the viscous integral;
    # fourth-order quadrature so the comparison is not limited by the
    # time sampling (trapezoid residual reported in the message)
    nu, dt = 0.05, 1e-3
    drop = 0.5 * (l2[0] - l2[-1])
    dissipated = nu * simpson(grad, dx=dt)
    trapz = nu * np.trapezoid(grad, dx=dt)
    rel = abs(drop - dissipated) / dissipated
    assert rel < 1e-8, (f"budget residual {rel:.3g} "
                        f"(trapezoid residual {abs(drop - trapz) / trapz:.3g})")


def test_barrier_sweep_and_threshold_bisection():
    budget = Budget(10.0)
    count = 0
    for m_power in (2.0, 5.0, 10.0):
        for script_b in np.linspace(0.5, 3.0, 34):
            eps = 0.8 * epsilon_threshold(script_b, m_power)
            cfg = BarrierConfig(epsilon=eps, script_b=float(script_b),
                                m_power=m_power, t_final=1.0)
            res = barrier_ode(cfg, dt=2e-3)
            assert res.hypothesis_ok
            assert res.conclusion_ok, (
                f"ceiling crossed at B={script_b:.3g} M={m_power}")
            count += 1
    assert count >= 100

    # recover the admissible-start threshold by bisecting the verdict
    target = (3.0 * math.e) ** (-5.0 / 4.0)
    lo, hi = 0.03, 0.15
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        res = barrier_ode(BarrierConfig(epsilon=mid, script_b=1.0,
                                        m_power=5.0, t_final=1.0), dt=5e-3)
        if res.hypothesis_ok:
            lo = mid
        else:
            hi = mid
    found = 0.5 * (lo + hi)
    assert f"{found:.3g}" == f"{target:.3g}"
    budget.assert_inside()


def test_series_exponents_value_oracle_and_tail():
    budget = Budget(30.0)
    assert bk(100, 1.0) == 210.0
    assert bhat(100, 2.0) == 194.0
    assert j0_cutoff(5.0, 2) == 20

    state = taylor_green_state(Grid(16), nu=1.0)
    params = SeriesParams(sigma=2, j0=1, k0=10, b=4.0,
                          k_grid=tuple(range(10, 21, 2)))
    got = series_value(state, params, "Bk", "all", warn=False)
    table = term_table(state, params)
    mpmath.mp.dps = 60
    total = mpmath.mpf(0)
    for (j, k), ln_norm in table.log_norms.items():
        if ln_norm == -math.inf:
            continue
        total += mpmath.exp(k * mpmath.mpf(ln_norm)
                            - bk(k, params.b) * mpmath.log(2))
    assert got.value == pytest.approx(float(total), rel=1e-10)

    smooth = series_value(state, SeriesParams(sigma=2, b=10.0), "Bk", "all",
                          warn=False)
    assert smooth.last_k_fraction < 1e-12
    assert not smooth.truncated
    budget.assert_inside()


def test_weight_sweep_reporting(tg_run):
    assert tg_run["elapsed"] < 300.0
    rows = tg_run["result"].monitor_rows["series"]
    tables = tg_run["series_monitor"].tables
    assert len(tables) == len(rows) >= 20
    for row in rows:
        assert math.isfinite(row["gronwall_ratio"])
        assert math.isfinite(row["series_Bk_total"])

    sweep = (2.0, 4.0, 8.0)
    for table in tables:
        tails = []
        for b in sweep:
            shifted = reweighted(table, b)
            main = aggregate_series(shifted, "Bk", "all")
            assert math.isfinite(main.log_value) or main.log_value == -math.inf
            tails.append(main.last_k_fraction)
        # heavier weights suppress large k harder, never the reverse
        assert tails[0] >= tails[1] >= tails[2]
        low8 = aggregate_series(reweighted(table, 8.0), "BhatK", "low")
        assert low8.value <= 1.0
