import dataclasses
import json

import numpy as np
import pytest

from lventire.errors import DomainExceeded, InequalityViolated, SelectorAllZero, SubminimalSpeed
from lventire.front import solve_scalar_front
from lventire.model import coexistence
from lventire.supersub import (
    FRONT_SELECTORS,
    Lattice,
    build_front_family,
    build_scalar_family,
    parse_selector,
    verify_inequalities,
)


@pytest.fixture(scope="module")
def scalar_pair(sym_model):
    return build_scalar_family(solve_scalar_front(sym_model, "U_eq", 2.0), solve_scalar_front(sym_model, "V_eq", 2.0))


class TestSelector:
    @pytest.mark.parametrize("text,expected", [("110", (1, 1, 0)), ((0, 0, 1), (0, 0, 1)), ([1, 1, 1], (1, 1, 1))])
    def test_parse(self, text, expected):
        assert parse_selector(text) == expected

    def test_all_zero(self, front_22, orbit_sym):
        with pytest.raises(SelectorAllZero):
            build_front_family(front_22, orbit_sym, (0, 0, 0))

    @pytest.mark.parametrize("bad", ["12", "1100", (2, 0, 0)])
    def test_malformed(self, bad):
        with pytest.raises(ValueError):
            parse_selector(bad)

    def test_seven_selectors(self):
        assert len(set(FRONT_SELECTORS)) == 7 and (0, 0, 0) not in FRONT_SELECTORS


class TestFrontFamily:
    def test_symmetric_pair_at_origin(self, pair_110, front_22):
        t = np.linspace(-5, 5, 11)
        assert np.array_equal(pair_110.u_lower(0.0, t), front_22.evaluate(2.2 * t))

    def test_single_front_branch(self, front_22, orbit_sym):
        pair = build_front_family(front_22, orbit_sym, (1, 0, 0))
        x = np.linspace(-10, 10, 21)
        assert np.array_equal(pair.u_lower(x, 1.0), front_22.evaluate(x + 2.2))
        assert np.array_equal(pair.v_upper(x, 1.0), front_22.evaluate(x + 2.2, "psi"))

    def test_orbit_only(self, front_22, orbit_sym):
        pair = build_front_family(front_22, orbit_sym, (0, 0, 1))
        p, q = orbit_sym.evaluate(0.7)
        assert pair.u_lower(3.0, 0.7) == p and pair.v_upper(-3.0, 0.7) == q

    @pytest.mark.parametrize("selector", FRONT_SELECTORS)
    def test_ordering_and_bounds(self, front_22, orbit_sym, selector):
        pair = build_front_family(front_22, orbit_sym, selector)
        X, T = Lattice(nx=81, nt=41).mesh()
        ul, vh = pair.u_lower(X, T), pair.v_upper(X, T)
        assert np.all(ul <= pair.u_upper(X, T)) and np.all(pair.v_lower(X, T) <= vh)
        assert np.all((0 <= ul) & (ul <= 1)) and np.all((0 <= vh) & (vh <= 1))

    @pytest.mark.parametrize("selector", [(1, 1, 0), (1, 1, 1)])
    def test_even_in_space(self, front_22, orbit_sym, selector):
        pair = build_front_family(front_22, orbit_sym, selector)
        X, T = Lattice(nx=81, nt=41).mesh()
        assert np.array_equal(pair.u_lower(X, T), pair.u_lower(-X, T))
        assert np.array_equal(pair.v_upper(X, T), pair.v_upper(-X, T))

    @pytest.mark.parametrize("selector", [(1, 0, 0), (1, 1, 0), (0, 0, 1), (1, 1, 1)])
    def test_approach_coexistence(self, front_22, orbit_sym, selector):
        pair = build_front_family(front_22, orbit_sym, selector)
        us, vs = coexistence(front_22.model)
        x = np.linspace(-5, 5, 11)
        gaps = [max(np.max(np.abs(pair.u_lower(x, t) - us)), np.max(np.abs(pair.v_upper(x, t) - vs))) for t in (5.0, 10.0, 40.0)]
        assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-5

    def test_domain_exceeded(self, pair_110):
        with pytest.raises(DomainExceeded):
            pair_110.check_domain(np.array([0.0]), np.array([-300.0]), tol=1e-20)
        pair_110.check_domain(np.array([0.0]), np.array([-300.0]))

    def test_rejects_mismatched_orbit(self, front_22, asym_model):
        from lventire.odefree import monotone_orbit_theta, solve_diffusion_free

        other = solve_diffusion_free(asym_model, *monotone_orbit_theta(asym_model))
        with pytest.raises(ValueError):
            build_front_family(front_22, other, (1, 1, 1))


class TestScalarFamily:
    def test_even_and_bounded(self, scalar_pair):
        X, T = Lattice(nx=81, nt=41).mesh()
        ul = scalar_pair.u_lower(X, T)
        assert np.array_equal(ul, scalar_pair.u_lower(-X, T))
        assert np.all(scalar_pair.u_upper(X, T) == 1) and np.all(scalar_pair.v_upper(X, T) == 1)
        assert np.all(ul <= 0.5 + 1e-15)

    def test_forward_limit(self, scalar_pair):
        assert np.max(np.abs(scalar_pair.u_lower(np.linspace(-3, 3, 7), 60.0) - 0.5)) < 1e-8

    def test_sup_does_not_vanish_backward(self, scalar_pair):
        x = np.linspace(-800, 800, 8001)
        # Fixed x decays, the supremum over x does not.
        assert scalar_pair.u_lower(0.0, -60.0) < 1e-10
        assert scalar_pair.u_lower(x, -60.0).max() > 0.49

    def test_subminimal_front(self, sym_model):
        fu = solve_scalar_front(sym_model, "U_eq", 2.0)
        fv = dataclasses.replace(solve_scalar_front(sym_model, "V_eq", 1.5), c=1.0)
        with pytest.raises(SubminimalSpeed):
            build_scalar_family(fu, fv)


class TestInequalities:
    @pytest.mark.parametrize("mode", ["substitution", "direct"])
    @pytest.mark.parametrize("selector", FRONT_SELECTORS)
    def test_front_family_passes(self, front_22, orbit_sym, selector, mode):
        cert = verify_inequalities(build_front_family(front_22, orbit_sym, selector), mode=mode)
        assert cert.passed and cert.ordering_ok
        assert cert.ridge_fraction < 0.01
        assert cert.worst_super_u >= -cert.slack and cert.worst_sub_u <= cert.slack
        assert cert.worst_super_v >= -cert.slack and cert.worst_sub_v <= cert.slack

    @pytest.mark.parametrize("mode", ["substitution", "direct"])
    def test_scalar_family_passes(self, scalar_pair, mode):
        cert = verify_inequalities(scalar_pair, mode=mode)
        assert cert.passed and cert.ridge_fraction < 0.01

    def test_super_u_residual_is_exactly_zero(self, pair_110):
        cert = verify_inequalities(pair_110)
        assert cert.worst_super_u == 0.0

    def test_single_front_residual_vanishes(self, front_22, orbit_sym):
        cert = verify_inequalities(build_front_family(front_22, orbit_sym, (1, 0, 0)))
        assert abs(cert.worst_sub_u) <= 10 * front_22.residual_norm
        assert cert.ridge_points_skipped == 0

    def test_negative_slack_is_caught(self, pair_110):
        with pytest.raises(InequalityViolated):
            verify_inequalities(pair_110, slack=-1e-3)
        cert = verify_inequalities(pair_110, slack=-1e-3, raise_on_failure=False)
        assert not cert.passed

    def test_deterministic(self, pair_110):
        lat = Lattice(nx=61, nt=61)
        a = verify_inequalities(pair_110, lat).to_json()
        b = verify_inequalities(pair_110, lat).to_json()
        assert a == b
        assert json.loads(a)["family"] == "FrontFamily"

    def test_bad_mode(self, pair_110):
        with pytest.raises(ValueError):
            verify_inequalities(pair_110, mode="symbolic")
