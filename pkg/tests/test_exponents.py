import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varlex import exponents as E
from varlex.errors import ContractError, DomainError

INF = math.inf


class TestEval:
    def test_constant(self):
        p = E.constant(2.0)
        assert p.eval(0.5) == 2.0

    def test_one_minus_log_at_one(self):
        assert E.one_minus_log().eval(1.0) == 1.0

    def test_one_minus_log_at_inv_e(self):
        assert E.one_minus_log().eval(math.exp(-1.0)) == pytest.approx(2.0, abs=1e-12)

    def test_one_minus_log_infinite_at_zero(self):
        assert E.one_minus_log().eval(0.0) == INF

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            E.one_minus_log().eval(1.5)

    def test_below_one_rejected(self):
        with pytest.raises(ContractError):
            E.affine(0.5, 0.1)


class TestEssentialBounds:
    def test_constant(self):
        assert E.constant(3.0).essential_bounds() == (3.0, 3.0)

    def test_one_minus_log(self):
        lo, hi = E.one_minus_log().essential_bounds()
        assert lo == 1.0
        assert hi == INF

    def test_sinusoidal(self):
        lo, hi = E.sinusoidal(2.0, 1.0).essential_bounds()
        assert lo == pytest.approx(1.0, abs=1e-7)
        assert hi == pytest.approx(3.0, abs=1e-7)

    def test_monotone_under_pointwise_ordering(self):
        p = E.sinusoidal(2.0, 0.5)
        q = E.sinusoidal(3.0, 0.5)  # q = p + 1 pointwise
        plo, phi_ = p.essential_bounds()
        qlo, qhi = q.essential_bounds()
        assert plo <= qlo and phi_ <= qhi


class TestClassify:
    def test_c_plus(self):
        assert E.sinusoidal(3.0, 1.0).classify() == "C+"

    def test_d_plus(self):
        assert E.sinusoidal(2.0, 1.0).classify() == "D+"  # p- = 1

    def test_p_general(self):
        assert E.one_minus_log().classify() == "P"

    def test_infinite_constant(self):
        assert E.constant(INF).classify() == "P"


class TestConjugate:
    def test_self_conjugate(self):
        q = E.conjugate(E.constant(2.0))
        assert q.eval(0.3) == pytest.approx(2.0)

    def test_boundary_conventions(self):
        assert E.conjugate(E.constant(1.0)).eval(0.5) == INF
        assert E.conjugate(E.constant(INF)).eval(0.5) == 1.0

    def test_one_minus_log_pointwise(self):
        q = E.conjugate(E.one_minus_log())
        x = 0.25
        p = 1.0 - math.log(x)
        assert q.eval(x) == pytest.approx(p / (p - 1.0), rel=1e-12)
        assert q.eval(1.0) == INF

    @given(st.floats(min_value=1.05, max_value=50.0))
    @settings(max_examples=30, deadline=None)
    def test_involution(self, c):
        p = E.constant(c)
        back = E.conjugate(E.conjugate(p))
        xs = np.linspace(0.0, 1.0, 11)
        assert np.allclose(back.values(xs), p.values(xs), rtol=1e-12)

    def test_involution_variable(self):
        p = E.sinusoidal(2.5, 0.9)
        back = E.conjugate(E.conjugate(p))
        xs = np.linspace(0.0, 1.0, 101)
        assert np.allclose(back.values(xs), p.values(xs), rtol=1e-10)


class TestCompositionExponent:
    def test_equal_pair(self):
        q = E.composition_exponent(E.constant(2.0), E.constant(2.0))
        assert q.eval(0.5) == pytest.approx(1.0)

    def test_infinite_r_returns_p(self):
        q = E.composition_exponent(E.constant(2.0), E.constant(INF))
        assert q.eval(0.5) == pytest.approx(2.0)

    def test_three_six(self):
        q = E.composition_exponent(E.constant(3.0), E.constant(6.0))
        assert q.eval(0.5) == pytest.approx(2.0)

    def test_precondition_violation(self):
        with pytest.raises(ContractError, match="r >= max"):
            E.composition_exponent(E.constant(2.0), E.constant(1.5))

    def test_range_bound(self):
        p = E.sinusoidal(3.0, 0.5)
        q = E.composition_exponent(p, E.constant(12.0))
        xs = np.linspace(0.0, 1.0, 301)
        pv, qv = p.values(xs), q.values(xs)
        assert np.all(qv >= 1.0 - 1e-12)
        assert np.all(qv < pv)


class TestHarmonic:
    def test_holder_pair(self):
        q = E.combine_harmonic(E.constant(2.0), E.constant(2.0))
        assert q.eval(0.1) == pytest.approx(1.0)

    def test_with_infinity(self):
        q = E.combine_harmonic(E.constant(2.0), E.constant(INF))
        assert q.eval(0.1) == pytest.approx(2.0)


class TestGrid:
    def test_interpolation(self):
        p = E.from_grid([0.0, 1.0], [1.0, 3.0])
        assert p.eval(0.5) == pytest.approx(2.0)

    def test_bad_grid(self):
        with pytest.raises(ContractError):
            E.from_grid([0.0, 0.0], [1.0, 2.0])
