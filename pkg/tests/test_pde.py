import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lventire.errors import (
    InitialDataOutOfBox,
    NoConvergenceTrend,
    PropertyFailed,
    SandwichViolated,
    StepRejectedFloor,
    UnboundedGrowth,
)
from lventire.model import ModelParams, coexistence, reaction
from lventire.pde import (
    FieldState,
    SchemeConfig,
    check_entire_properties,
    comparison_harness,
    derivative_bound_probe,
    entire_approximation,
    gaps_converging,
    initial_from_pair,
    make_grid,
    manufactured_convergence,
    measure_front_speed,
    simulate,
    step,
)

SMALL = SchemeConfig(x_half_length=60.0, nx=601, dt=0.02, t_start=-5.0, t_end=5.0, snapshot_every=0.5)


def constant_state(config, u, v):
    x = make_grid(config)
    return FieldState(x, np.full(x.size, u), np.full(x.size, v), config.t_start)


@pytest.fixture(scope="module")
def small_entire(pair_110, sym_model):
    return entire_approximation(pair_110, sym_model, SMALL, n_list=(3, 6, 12), window=(-2.0, 4.0))


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [{"dt": 0.0}, {"nx": 2}, {"t_start": 1.0, "t_end": 0.0}, {"boundary": "Periodic"}, {"theta": 0.3}],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SchemeConfig(**kwargs)

    def test_grid_exactly_symmetric(self):
        x = make_grid(SchemeConfig())
        assert np.array_equal(x, -x[::-1]) and x[1500] == 0.0
        assert x[-1] == pytest.approx(150.0) and SchemeConfig().dx == pytest.approx(0.1)


class TestStep:
    def test_zero_is_exact_fixed_point(self, sym_model):
        s = constant_state(SMALL, 0.0, 0.0)
        out = step(s, sym_model, SMALL)
        assert np.all(out.u == 0) and np.all(out.v == 0)

    @pytest.mark.parametrize("model", [ModelParams(0.5, 0.5, 1, 1), ModelParams(0.3, 0.6, 1.5, 0.8)])
    def test_coexistence_is_fixed_point(self, model):
        us, vs = coexistence(model)
        out = step(constant_state(SMALL, us, vs), model, SMALL)
        assert np.max(np.abs(out.u - us)) < 1e-12 and np.max(np.abs(out.v - vs)) < 1e-12

    def test_spatially_constant_data_follow_explicit_euler(self, asym_model):
        out = step(constant_state(SMALL, 0.2, 0.4), asym_model, SMALL)
        f, g = reaction(asym_model, 0.2, 0.4)
        assert np.allclose(out.u, 0.2 + SMALL.dt * f, rtol=0, atol=1e-14)
        assert np.allclose(out.v, 0.4 + SMALL.dt * g, rtol=0, atol=1e-14)

    def test_neumann_conserves_mass_of_pure_diffusion(self):
        # The forcing cancels the reaction at the current state, leaving pure diffusion.
        cfg = dataclasses.replace(SMALL, nx=101, x_half_length=5.0)
        x = make_grid(cfg)
        model = ModelParams(0.5, 0.5, 1, 1)
        s = FieldState(x, 0.3 + 0.1 * np.cos(np.pi * x / 5), np.full(x.size, 0.2), 0.0)

        def cancel(xx, t):
            f, g = reaction(model, s.u, s.v)
            return -f, -g

        out = step(s, model, cfg, forcing=cancel)
        weights = np.full(x.size, 1.0)
        weights[[0, -1]] = 0.5
        assert np.sum(weights * out.u) == pytest.approx(np.sum(weights * s.u), rel=1e-13)

    def test_rejection_halves_the_step(self, sym_model):
        cfg = dataclasses.replace(SMALL, dt=3.0)
        # u + 3 u (1 - u) = 1.25 leaves the box in a single step.
        out = step(constant_state(cfg, 0.5, 0.0), sym_model, cfg)
        assert out.substeps > 1 and out.in_box()
        assert out.time == pytest.approx(cfg.t_start + 3.0)

    def test_rejection_floor(self, sym_model):
        cfg = dataclasses.replace(SMALL, dt=10.0, dt_floor=2.0)
        with pytest.raises(StepRejectedFloor) as info:
            step(constant_state(cfg, 0.5, 0.0), sym_model, cfg)
        assert info.value.state is not None

    def test_dirichlet_requires_boundary(self, sym_model):
        cfg = dataclasses.replace(SMALL, boundary="DirichletFromPair")
        with pytest.raises(ValueError):
            step(constant_state(cfg, 0.1, 0.1), sym_model, cfg)

    def test_dirichlet_values_imposed(self, sym_model):
        cfg = dataclasses.replace(SMALL, boundary="DirichletFromPair")
        out = step(constant_state(cfg, 0.1, 0.1), sym_model, cfg, boundary=lambda t: ((0.0, 1.0), (0.25, 0.5)))
        assert (out.u[0], out.u[-1], out.v[0], out.v[-1]) == (0.0, 1.0, 0.25, 0.5)


class TestSimulate:
    def test_out_of_box_initial_data(self, sym_model):
        with pytest.raises(InitialDataOutOfBox):
            simulate(constant_state(SMALL, 1.2, 0.0), sym_model, SMALL)

    def test_snapshot_cadence_and_lattice_times(self, sym_model):
        res = simulate(constant_state(SMALL, 0.1, 0.2), sym_model, SMALL)
        assert len(res) == 21 and res[0].time == -5.0 and res.final.time == 5.0
        assert res.steps == 500 and res.rejections == 0

    def test_reflection_equivariance_is_bitwise(self, sym_model):
        rng = np.random.default_rng(11)
        x = make_grid(SMALL)
        s = FieldState(x, rng.uniform(0, 1, x.size), rng.uniform(0, 1, x.size), SMALL.t_start)
        cfg = dataclasses.replace(SMALL, t_end=-3.0)
        a = simulate(s, sym_model, cfg).final
        b = simulate(s.reflect(), sym_model, cfg).final
        assert np.array_equal(a.u[::-1], b.u) and np.array_equal(a.v[::-1], b.v)

    def test_symmetric_data_stay_symmetric(self, pair_110, sym_model):
        res = simulate(initial_from_pair(pair_110, SMALL, SMALL.t_start, "competitive"), sym_model, SMALL)
        for s in res:
            assert np.array_equal(s.u, s.u[::-1]) and np.array_equal(s.v, s.v[::-1])

    @settings(max_examples=100)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(["smooth", "rough", "corners"]))
    def test_invariant_region(self, seed, kind):
        rng = np.random.default_rng(seed)
        cfg = SchemeConfig(x_half_length=20.0, nx=201, dt=0.05, t_start=0.0, t_end=2.0, snapshot_every=0.5)
        x = make_grid(cfg)
        if kind == "rough":
            u, v = rng.uniform(0, 1, x.size), rng.uniform(0, 1, x.size)
        elif kind == "corners":
            u, v = rng.choice([0.0, 1.0], x.size), rng.choice([0.0, 1.0], x.size)
        else:
            k = rng.uniform(0.1, 2)
            u, v = 0.5 + 0.5 * np.sin(k * x), 0.5 + 0.5 * np.cos(k * x)
        m = ModelParams(*rng.uniform(0.05, 0.95, 2), *rng.uniform(0.2, 4, 2))
        res = simulate(FieldState(x, u, v, 0.0), m, cfg)
        assert res.rejections == 0
        assert all(s.in_box(0.0) for s in res)

    def test_csv_export(self, sym_model, tmp_path):
        cfg = dataclasses.replace(SMALL, nx=21, t_end=-4.0)
        res = simulate(constant_state(cfg, 0.1, 0.2), sym_model, cfg)
        paths = res.write_csv(tmp_path)
        assert len(paths) == len(res)
        assert (tmp_path / "manifest.json").exists()
        assert open(paths[0]).read().splitlines()[1] == "x,u,v"


class TestFrontSpeed:
    def test_travelling_front_speed(self, front_22):
        cfg = SchemeConfig(x_half_length=60.0, nx=1201, dt=0.005, t_start=0.0, t_end=10.0, snapshot_every=0.5)
        x = make_grid(cfg)
        s = FieldState(x, front_22.evaluate(x - 20.0), front_22.evaluate(x - 20.0, "psi"), 0.0)
        res = simulate(s, front_22.model, cfg)
        us, _ = coexistence(front_22.model)
        speed = measure_front_speed(res.snapshots[4:], us / 2)
        # The profile depends on x + c t, so the level set moves left at speed c.
        assert abs(-speed - 2.2) / 2.2 < 0.01


class TestManufactured:
    def test_second_order_in_space(self, asym_model):
        # u* is about 0.85 here, so a smaller amplitude keeps the data in the box.
        errors, order = manufactured_convergence(asym_model, amplitude=0.1)
        assert np.all(np.diff(errors) < 0)
        assert abs(order - 2.0) < 0.2

    def test_first_order_in_time(self, sym_model):
        errs = []
        for dt in (0.04, 0.02, 0.01):
            errors, _ = manufactured_convergence(sym_model, nx_list=(161, 321), dt=dt, richardson=False)
            errs.append(errors[-1])
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders >= 0.9)


class TestComparison:
    def test_sandwich_on_small_domain(self, pair_110, sym_model):
        cert = comparison_harness(pair_110, sym_model, SMALL)
        assert cert.passed and cert.worst_margin >= 0
        assert cert.eps == pytest.approx(5 * (SMALL.dx**2 + SMALL.dt))
        assert cert.checks == len(cert.simulation)

    def test_dirichlet_boundary_sandwich(self, pair_110, sym_model):
        cfg = dataclasses.replace(SMALL, boundary="DirichletFromPair")
        assert comparison_harness(pair_110, sym_model, cfg).passed

    @pytest.mark.parametrize("start", ["competitive", "super"])
    def test_other_starts_stay_inside(self, pair_110, sym_model, start):
        assert comparison_harness(pair_110, sym_model, SMALL, start=start).passed

    def test_violation_reported_with_location(self, pair_110, sym_model):
        with pytest.raises(SandwichViolated) as info:
            comparison_harness(pair_110, sym_model, SMALL, eps=-0.01)
        assert info.value.margin < 0 and math.isfinite(info.value.x)

    def test_bad_start(self, pair_110):
        with pytest.raises(ValueError):
            initial_from_pair(pair_110, SMALL, -5.0, "middle")


class TestEntire:
    def test_gaps_shrink(self, small_entire):
        g = small_entire.cauchy_gaps
        assert len(g) == 2 and g[1] * 2 <= g[0]

    def test_symmetric_and_sandwiched(self, small_entire):
        assert max(small_entire.symmetry_errors.values()) <= 1e-10
        assert min(small_entire.sandwich.values()) >= 0

    def test_properties_one_three_four(self, small_entire, sym_model):
        rep = check_entire_properties(small_entire, sym_model, raise_on_failure=False)
        assert rep.passed[1] and rep.passed[3] and rep.passed[4]

    def test_sub_start_has_no_decay_rate(self, small_entire, sym_model):
        rep = check_entire_properties(small_entire, sym_model, raise_on_failure=False)
        assert math.isnan(rep.decay_rate) and not rep.passed[2] and rep.notes
        with pytest.raises(PropertyFailed) as info:
            check_entire_properties(small_entire, sym_model)
        assert info.value.index == 2

    def test_no_trend_raises(self, pair_110, sym_model):
        with pytest.raises(NoConvergenceTrend):
            entire_approximation(pair_110, sym_model, SMALL, n_list=(3, 6, 12), window=(-2.0, 4.0), min_ratio=1e6)

    def test_window_must_follow_starts(self, pair_110, sym_model):
        with pytest.raises(ValueError):
            entire_approximation(pair_110, sym_model, SMALL, n_list=(3, 6), window=(-4.0, 4.0))

    def test_gap_rule(self):
        assert gaps_converging([1.0, 0.4, 0.1])
        assert not gaps_converging([1.0, 0.6])
        assert gaps_converging([1e-12, 1e-12])

    def test_threads_give_identical_results(self, pair_110, sym_model, small_entire):
        par = entire_approximation(pair_110, sym_model, SMALL, n_list=(3, 6, 12), window=(-2.0, 4.0), workers=3)
        assert par.cauchy_gaps == small_entire.cauchy_gaps


class TestDerivativeProbe:
    def test_equilibrium_norms_vanish(self, sym_model):
        us, vs = coexistence(sym_model)
        res = simulate(constant_state(SMALL, us, vs), sym_model, SMALL)
        rep = derivative_bound_probe(res)
        assert max(rep.maxima.values()) < 1e-10 and rep.passed

    def test_front_slope_matches_profile(self, front_22):
        cfg = SchemeConfig(x_half_length=60.0, nx=1201, dt=0.01, t_start=0.0, t_end=5.0, snapshot_every=0.5)
        x = make_grid(cfg)
        s = FieldState(x, front_22.evaluate(x - 10.0), front_22.evaluate(x - 10.0, "psi"), 0.0)
        rep = derivative_bound_probe(simulate(s, front_22.model, cfg))
        peak = max(front_22.dphi.max(), front_22.dpsi.max())
        assert rep.maxima["dx"] == pytest.approx(peak, rel=0.02)

    def test_growth_detected(self):
        x = np.linspace(-1, 1, 11)
        snaps = [FieldState(x, 0.1 * 2.0**k * np.abs(x), 0 * x, float(k)) for k in range(8)]
        with pytest.raises(UnboundedGrowth):
            derivative_bound_probe(snaps)

    def test_needs_enough_snapshots(self):
        x = np.linspace(-1, 1, 11)
        with pytest.raises(ValueError):
            derivative_bound_probe([FieldState(x, x, x, 0.0)])
