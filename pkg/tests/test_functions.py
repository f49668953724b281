import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varlex import functions as F
from varlex.errors import ContractError, DomainError

SQRT2 = math.sqrt(2.0)


class TestEvaluate:
    def test_sin(self):
        assert F.make_sin()(math.pi / 2) == pytest.approx(1.0)

    def test_two_sine_odd(self):
        assert F.two_sine()(0.0) == 0.0

    def test_grid_interpolation(self):
        g = F.from_grid([0.0, 1.0], [1.0, 3.0])
        assert g(0.5) == pytest.approx(2.0)

    def test_grid_extrapolation_rejected(self):
        g = F.from_grid([0.0, 1.0], [1.0, 3.0])
        with pytest.raises(DomainError):
            g(1.5)

    def test_grid_rejects_nan(self):
        with pytest.raises(ContractError):
            F.from_grid([0.0, 1.0], [1.0, math.nan])


class TestTranslate:
    def test_periodicity(self):
        f = F.make_sin()
        g = f.translate(2.0 * math.pi)
        ts = np.linspace(-5.0, 5.0, 101)
        assert np.max(np.abs(g.values(ts) - f.values(ts))) < 1e-12

    def test_identity_shift(self):
        f = F.sign_two_sine()
        ts = np.linspace(0.0, 10.0, 201)
        assert np.array_equal(f.translate(0.0).values(ts), f.values(ts))

    def test_grid_domain_shift(self):
        g = F.from_grid(np.arange(0.0, 10.5, 0.5), np.arange(21.0))
        shifted = g.translate(3.0)
        assert shifted.domain == (-3.0, 7.0)
        assert shifted(0.0) == g(3.0)

    @given(st.floats(-20, 20), st.floats(-20, 20))
    @settings(max_examples=25, deadline=None)
    def test_composition_of_translates(self, a, b):
        f = F.two_sine()
        lhs = f.translate(a).translate(b)
        rhs = f.translate(a + b)
        ts = np.linspace(-3.0, 3.0, 41)
        assert np.max(np.abs(lhs.values(ts) - rhs.values(ts))) < 1e-12


class TestReflect:
    def test_sin_odd(self):
        ts = np.linspace(-4.0, 4.0, 81)
        assert np.allclose(F.make_sin().reflect().values(ts),
                           -F.make_sin().values(ts), atol=1e-15)

    def test_cos_even(self):
        ts = np.linspace(-4.0, 4.0, 81)
        assert np.allclose(F.make_cos().reflect().values(ts),
                           F.make_cos().values(ts), atol=1e-15)

    def test_exp(self):
        f = F.exp_decay(1.0).reflect()
        assert f(2.0) == pytest.approx(math.exp(2.0))

    def test_involution(self):
        f = F.aa_exemplar()
        ts = np.linspace(-5.0, 5.0, 101)
        assert np.array_equal(f.reflect().reflect().values(ts), f.values(ts))

    def test_half_line_domain(self):
        f = F.rational_decay(domain=(0.0, math.inf)).reflect()
        assert f.domain == (-math.inf, 0.0)
        with pytest.raises(DomainError):
            f(1.0)


class TestSign:
    def test_zero_convention(self):
        assert F.sign_two_sine()(0.0) == 0.0

    def test_values(self):
        F_ = F.sign_of(F.make_sin())
        assert F_(math.pi / 2) == 1.0
        assert F_(3 * math.pi / 2) == -1.0

    def test_range(self):
        vals = F.sign_two_sine().values(np.linspace(0.0, 50.0, 2001))
        assert set(np.unique(vals)) <= {-1.0, 0.0, 1.0}

    def test_vector_rejected(self):
        with pytest.raises(ContractError):
            F.sign_of(F.circle())

    def test_jumps_bracket_roots(self):
        f = F.two_sine()
        jumps = F.sign_two_sine().jumps(0.1, 10.0)
        assert jumps.size > 0
        assert np.max(np.abs(f.values(jumps)[:, 0])) < 1e-10


class TestCombinations:
    def test_lincomb(self):
        h = F.make_sin() + F.rational_decay()
        assert h(0.0) == pytest.approx(1.0)

    def test_difference_of_translates_jumps(self):
        Fs = F.sign_two_sine()
        d = Fs.translate(1.0) - Fs.translate(5.0)
        js = d.jumps(0.0, 2.0)
        inner = np.sort(np.concatenate([Fs.jumps(1.0, 3.0) - 1.0,
                                        Fs.jumps(5.0, 7.0) - 5.0]))
        assert js.size == inner.size

    def test_product(self):
        h = F.product(F.make_sin(), F.make_cos())
        assert h(0.7) == pytest.approx(math.sin(0.7) * math.cos(0.7))

    def test_average_of_translates(self):
        g = F.average_of_translates(F.make_sin(), [2 * math.pi, 4 * math.pi])
        ts = np.linspace(0.0, 5.0, 51)
        assert np.max(np.abs(g.values(ts) - F.make_sin().values(ts))) < 1e-12


class TestRegistryAndCsv:
    def test_vector_function(self):
        v = F.circle().evaluate(0.3)
        assert v == pytest.approx([math.sin(0.3), math.cos(0.3)])

    def test_step_jumps(self):
        s = F.step(0.25, 0.75)
        assert list(s.jumps(0.0, 1.0)) == [0.25, 0.75]

    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "f.csv"
        ts = np.linspace(0.0, 1.0, 11)
        path.write_text("t,v1\n" + "\n".join(f"{t},{t * t}" for t in ts))
        g = F.from_csv(path)
        assert g(0.5) == pytest.approx(0.25, abs=1e-2)

    def test_csv_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,1.0\n0.5,2.0\n")
        with pytest.raises(ContractError):
            F.from_csv(path)
