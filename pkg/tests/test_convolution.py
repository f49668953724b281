import math

import numpy as np
import pytest

from oracles import exp_kernel_M, l1_relaxation
from varlex import exponents as E
from varlex import functions as F
from varlex.convolution import (ergodic_component_classify, finite_convolution,
                                line_convolution, m_t_series, solve_dfp,
                                tail_constant_M)
from varlex.errors import ContractError, DivergenceError
from varlex.fractional import ResolventFamily, exponential_kernel, mittag_leffler

INF = math.inf


@pytest.fixture(scope="module")
def exp_kernel():
    return exponential_kernel(1.0)


class TestTailConstant:
    def test_l2_closed_form(self, exp_kernel):
        M, rem = tail_constant_M(exp_kernel, E.constant(2.0), K=40)
        assert M == pytest.approx(exp_kernel_M(2.0), rel=1e-8)
        assert rem < 1e-15

    def test_l1_is_one(self, exp_kernel):
        M, _ = tail_constant_M(exp_kernel, E.constant(1.0), K=40)
        assert M == pytest.approx(1.0, rel=1e-8)

    def test_slow_decay_rejected(self):
        rf = ResolventFamily(
            "kernel", kernel=F.power(-0.5, domain=(0.0, INF)),
            decay=__import__("varlex.fractional", fromlist=["DecayModel"]).DecayModel(
                "polynomial", C=1.0, exponent=-0.5))
        with pytest.raises(DivergenceError):
            tail_constant_M(rf, E.constant(2.0))

    def test_too_singular_first_window(self):
        # q (gamma - 1) = -1: the k = 0 window norm blows up
        rf = ResolventFamily("R", 0.5, (1.0,))
        with pytest.raises(DivergenceError):
            tail_constant_M(rf, E.constant(2.0), K=10)


class TestMtSeries:
    def test_exponential_factorization(self, exp_kernel):
        mt = m_t_series(exp_kernel, E.constant(2.0), [0.0, 1.0], K=40)
        M = exp_kernel_M(2.0)
        assert mt["values"][0] == pytest.approx(M, rel=1e-8)
        assert mt["values"][1] == pytest.approx(math.exp(-1.0) * M, rel=1e-8)

    def test_subordinated_kernel_slope(self):
        # R_gamma ~ t**(-1-gamma) so m_t ~ t**-gamma; with nu = 0.3 the
        # claimed envelope exponent nu*(-1-gamma) = -0.45 must majorize it
        R = ResolventFamily("R", 0.5, (1.0,))
        mt = m_t_series(R, E.constant(1.5), np.arange(1.0, 51.0, 2.0), K=60)
        assert mt["fitted_slope"] <= 0.3 * (-1.5) + 0.1


class TestLineConvolution:
    def test_exp_sin_closed_form(self, exp_kernel):
        ts = np.linspace(0.0, 20.0, 81)
        res = line_convolution(exp_kernel, F.make_sin(), E.constant(2.0), ts)
        oracle = (np.sin(ts) - np.cos(ts)) / 2.0
        assert float(np.max(np.abs(res.component() - oracle))) < 1e-6
        assert res.tail_bounds[0] < 1e-7

    def test_constant_forcing(self, exp_kernel):
        ts = np.linspace(0.0, 5.0, 11)
        res = line_convolution(exp_kernel, F.constant(1.0), E.constant(2.0), ts)
        assert np.allclose(res.component(), 1.0, atol=1e-8)

    def test_zero_forcing(self, exp_kernel):
        res = line_convolution(exp_kernel, F.zero(), E.constant(2.0), [0.0, 1.0])
        assert np.all(res.values == 0.0)

    def test_tail_bound_soundness(self, exp_kernel):
        ts = np.linspace(0.0, 6.0, 13)
        coarse = line_convolution(exp_kernel, F.make_sin(), E.constant(2.0), ts, K=5)
        fine = line_convolution(exp_kernel, F.make_sin(), E.constant(2.0), ts, K=40)
        gap = np.abs(coarse.component() - fine.component())
        assert np.all(gap <= coarse.tail_bounds + 1e-12)

    def test_commutes_with_translation(self, exp_kernel):
        tau = 1.7
        ts = np.linspace(0.0, 5.0, 11)
        direct = line_convolution(exp_kernel, F.make_sin().translate(tau),
                                  E.constant(2.0), ts)
        shifted = line_convolution(exp_kernel, F.make_sin(), E.constant(2.0), ts + tau)
        assert np.allclose(direct.values, shifted.values, atol=1e-8)


class TestFiniteConvolution:
    def test_step_response(self, exp_kernel):
        ts = np.linspace(0.0, 10.0, 41)
        res = finite_convolution(exp_kernel, F.constant(1.0, domain=(0.0, INF)), ts)
        assert np.allclose(res.component(), 1.0 - np.exp(-ts), atol=1e-10)

    def test_zero(self, exp_kernel):
        res = finite_convolution(exp_kernel, F.zero(domain=(0.0, INF)), [0.0, 2.0])
        assert np.all(res.values == 0.0)

    def test_decomposition_identity(self, exp_kernel):
        ts = np.linspace(0.0, 20.0, 41)
        f = F.make_sin() + F.rational_decay()
        res = finite_convolution(exp_kernel, f, ts,
                                 decomposition=(F.make_sin(), F.rational_decay()),
                                 p=E.constant(2.0))
        assert res.decomposition["identity_defect"] < 1e-6

    def test_f2_hoelder_bound(self, exp_kernel):
        # ||F2(t)|| <= 2 ||g-reflected||_S m_t at every grid point
        ts = np.linspace(0.0, 10.0, 21)
        f = F.make_sin() + F.rational_decay()
        res = finite_convolution(exp_kernel, f, ts,
                                 decomposition=(F.make_sin(), F.rational_decay()),
                                 p=E.constant(2.0))
        gs = res.decomposition["g_stepanov_sup_reflected"]
        mt = m_t_series(exp_kernel, E.constant(2.0), ts, K=40)["values"]
        f2 = np.abs(res.decomposition["F2"][:, 0])
        assert np.all(f2 <= 2.0 * gs * mt + 1e-8)

    def test_requires_exponent_for_decomposition(self, exp_kernel):
        with pytest.raises(ContractError):
            finite_convolution(exp_kernel, F.make_sin(), [0.0, 1.0],
                               decomposition=(F.make_sin(), F.zero()))


class TestSolveDfp:
    def test_classical_semigroup(self):
        ts = np.linspace(0.0, 10.0, 101)
        res = solve_dfp(1.0, 1.0, 1.0, F.zero(), ts)
        assert np.allclose(res.component(), np.exp(-ts), atol=1e-12)

    def test_classical_step_response(self):
        ts = np.linspace(0.0, 10.0, 101)
        res = solve_dfp(1.0, 1.0, 0.0, F.constant(1.0, domain=(0.0, INF)), ts)
        assert np.allclose(res.component(), 1.0 - np.exp(-ts), atol=1e-10)

    def test_half_order_homogeneous_is_ml(self):
        ts = np.linspace(0.0, 5.0, 26)
        res = solve_dfp(0.5, 1.0, 1.0, F.zero(), ts)
        oracle = np.array([mittag_leffler(0.5, 1.0, -math.sqrt(t)) if t > 0 else 1.0
                           for t in ts])
        assert np.allclose(res.component(), oracle, atol=1e-10)

    def test_half_order_forced_vs_l1(self):
        # independent L1 stepper; smooth forcing keeps both schemes in their
        # accuracy regime
        ts = np.linspace(0.0, 5.0, 1001)
        u_ref = l1_relaxation(0.5, 1.0, 0.0, math.sin, ts)
        idx = np.arange(0, ts.size, 40)
        res = solve_dfp(0.5, 1.0, 0.0, F.make_sin(), ts[idx])
        assert float(np.max(np.abs(res.component() - u_ref[idx]))) < 1e-4

    def test_diagonal_system(self):
        ts = np.linspace(0.0, 3.0, 16)
        res = solve_dfp(1.0, [1.0, 2.0], [1.0, 1.0], F.zero(), ts)
        assert np.allclose(res.values[:, 0], np.exp(-ts), atol=1e-12)
        assert np.allclose(res.values[:, 1], np.exp(-2 * ts), atol=1e-12)

    def test_aa_part_of_forced_solution(self):
        # gamma = 1, f = sin: the almost automorphic part of u is
        # (sin - cos)/2; the remainder decays
        from varlex.almost_automorphy import asymptotic_decompose

        ts = np.arange(0.0, 80.0, 1.0 / 16.0)
        res = solve_dfp(1.0, 1.0, 1.0, F.make_sin(), ts)
        u = res.as_function()
        aa_part = F.fourier(terms=((0.5, 1.0, 0.0), (0.5, 1.0, math.pi / 2 + math.pi)))
        rep = asymptotic_decompose(u, E.constant(2.0), aa_part, horizon=70.0,
                                   shifts=[2 * math.pi * k for k in range(1, 7)])
        assert rep.verdict == "true"


class TestErgodicClassification:
    def test_decaying_perturbation_passes(self, exp_kernel):
        ts = np.arange(0.0, 41.0, 0.25)
        f = F.make_sin() + F.rational_decay()
        res = finite_convolution(exp_kernel, f, ts,
                                 decomposition=(F.make_sin(), F.rational_decay()),
                                 p=E.constant(2.0))
        rep = ergodic_component_classify(res, exp_kernel, E.constant(2.0),
                                         E.constant(2.0), E.constant(2.0))
        assert rep.verdict == "true"

    def test_constant_perturbation_fails_condition_i(self, exp_kernel):
        ts = np.arange(0.0, 41.0, 0.25)
        f = F.make_sin() + F.constant(1.0)
        res = finite_convolution(exp_kernel, f, ts,
                                 decomposition=(F.make_sin(), F.constant(1.0)),
                                 p=E.constant(2.0))
        rep = ergodic_component_classify(res, exp_kernel, E.constant(2.0),
                                         E.constant(2.0), E.constant(2.0))
        assert rep.details["condition_i"]["verdict"] == "false"
        assert rep.verdict == "false"

    def test_missing_decomposition_rejected(self, exp_kernel):
        res = finite_convolution(exp_kernel, F.make_sin(), [0.0, 1.0])
        with pytest.raises(ContractError):
            ergodic_component_classify(res, exp_kernel, E.constant(2.0),
                                       E.constant(2.0), E.constant(2.0))
