import math

import numpy as np
import pytest

from varlex import exponents as E
from varlex import functions as F
from varlex.composition import (asymptotic_composition_test, compose,
                                composition_membership_test, empirical_lipschitz,
                                identity_in_y, lipschitz_window_check,
                                product_two_parameter, tanh_gain)
from varlex.errors import ContractError, DomainError

INF = math.inf


class TestCompose:
    def test_identity_in_state(self):
        grid = np.linspace(0.0, 10.0, 2001)
        h = compose(identity_in_y(), F.make_sin(), grid)
        assert h(1.3) == pytest.approx(math.sin(1.3), abs=1e-9)

    def test_gain(self):
        grid = np.linspace(0.0, 10.0, 2001)
        h = compose(product_two_parameter(), F.constant(1.0), grid)
        assert h(2.0) == pytest.approx(math.sin(2.0), abs=1e-9)

    def test_pointwise_cross_check(self):
        grid = np.linspace(0.0, 5.0, 501)
        h = compose(tanh_gain(), F.make_cos(), grid)
        t = grid[137]
        oracle = (math.sin(t) + math.sin(math.sqrt(2) * t)) * math.tanh(math.cos(t))
        assert h(t) == pytest.approx(oracle, rel=1e-12)

    def test_state_range_enforced(self):
        f2 = tanh_gain()
        with pytest.raises(DomainError):
            compose(f2, F.constant(7.0), np.linspace(0.0, 1.0, 11))


class TestLipschitz:
    def test_exact_constant_recovered(self):
        grid = np.linspace(0.0, 8.0, 801)
        L = empirical_lipschitz(product_two_parameter(), grid, np.linspace(-1, 1, 9))
        assert np.max(np.abs(L.values(grid)[:, 0] - np.abs(np.sin(grid)))) < 1e-9

    def test_quadratic_bound(self):
        f2 = __import__("varlex.composition", fromlist=["TwoParameterFunction"]
                        ).TwoParameterFunction("square", lambda ts, ys: ys ** 2)
        grid = np.linspace(0.0, 2.0, 101)
        L = empirical_lipschitz(f2, grid, np.linspace(-1, 1, 21))
        assert float(np.max(L.values(grid))) <= 2.0 + 1e-9

    def test_constant_function_flat(self):
        f2 = __import__("varlex.composition", fromlist=["TwoParameterFunction"]
                        ).TwoParameterFunction("const", lambda ts, ys: np.full(ts.shape, 3.0))
        grid = np.linspace(0.0, 2.0, 101)
        L = empirical_lipschitz(f2, grid, np.linspace(-1, 1, 5))
        assert np.all(L.values(grid) == 0.0)

    def test_window_series_bounded(self):
        grid = np.linspace(0.0, 6.0, 601)
        series = lipschitz_window_check(product_two_parameter(), E.constant(2.0),
                                        grid, np.linspace(-1, 1, 7))
        assert series.details["bounded"]
        assert not series.details["exceeds_declared"]

    def test_needs_two_samples(self):
        with pytest.raises(ContractError):
            empirical_lipschitz(product_two_parameter(), np.linspace(0, 1, 11), [0.5])


class TestMembership:
    def test_identity_on_sign_function(self, pell_shifts):
        rep = composition_membership_test(identity_in_y(), F.sign_two_sine(),
                                          E.constant(2.0), E.constant(INF),
                                          pell_shifts, tolerance=0.2)
        assert rep.verdict == "true"
        assert rep.details["q_bounds"] == pytest.approx((2.0, 2.0))
        assert rep.details["constant_floor_verdict"] == "true"

    def test_product_of_periodics(self, periodic_shifts):
        rep = composition_membership_test(product_two_parameter(), F.make_sin(),
                                          E.constant(2.0), E.constant(INF),
                                          periodic_shifts,
                                          y_samples=np.linspace(-1, 1, 7))
        assert rep.verdict == "true"
        assert rep.lipschitz_window_norms is not None

    def test_composed_exponent_below_p(self, periodic_shifts):
        rep = composition_membership_test(product_two_parameter(), F.make_sin(),
                                          E.constant(2.0), E.constant(4.0),
                                          periodic_shifts)
        lo, hi = rep.details["q_bounds"]
        assert hi == pytest.approx(4.0 / 3.0)
        assert hi < 2.0

    def test_failed_precondition_inconclusive(self):
        rep = composition_membership_test(identity_in_y(), F.ramp(),
                                          E.constant(2.0), E.constant(INF),
                                          [1.0, 3.0, 9.0, 27.0])
        assert rep.verdict == "inconclusive"
        assert "precondition" in rep.details["cause"]


class TestAsymptotic:
    def test_decaying_state_perturbation(self, periodic_shifts):
        rep = asymptotic_composition_test(identity_in_y(), F.make_sin(),
                                          (None, F.rational_decay()),
                                          E.constant(2.0), E.constant(INF),
                                          periodic_shifts)
        assert rep.verdict == "true"

    def test_no_perturbation_reduces_to_membership(self, periodic_shifts):
        rep = asymptotic_composition_test(identity_in_y(), F.make_sin(),
                                          (None, None),
                                          E.constant(2.0), E.constant(INF),
                                          periodic_shifts)
        assert rep.verdict == "true"

    def test_constant_perturbation_fails(self, periodic_shifts):
        rep = asymptotic_composition_test(identity_in_y(), F.make_sin(),
                                          (None, F.constant(1.0)),
                                          E.constant(2.0), E.constant(INF),
                                          periodic_shifts)
        assert rep.verdict == "false"
