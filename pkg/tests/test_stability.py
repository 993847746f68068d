"""Dispersion-relation and threshold tests.

The exact reference numbers below were frozen from an independent sympy/
mpmath computation of the dispersion quadratic at a = 3, eps0 = 1/32,
delta = beta = r = 1 (so f(1) = 1/2), where everything is rational:
chi_marginal(lam) = 4/lam + 17/8 + lam/16, minimized at lam* = 8 with
value 25/8, and chi_subcrit = 2.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sclerolab as sl
from sclerolab.stability import growth_rates, reduced_matrix

PARAM_STRATEGY = st.builds(
    sl.ModelParams,
    a=st.floats(1.05, 6.0),
    chi=st.floats(0.05, 8.0),
    eps0=st.floats(1e-3, 2.0),
    delta=st.floats(0.05, 5.0),
    beta=st.floats(0.05, 5.0),
)


class TestThresholds:
    def test_chi_c0_reference_value(self, ref_params):
        assert sl.chi_c0(ref_params) == pytest.approx(3.125, abs=1e-12)

    def test_chi_subcrit_reference_value(self, ref_params):
        assert sl.chi_subcrit(ref_params) == pytest.approx(2.0, abs=1e-12)

    def test_domain_threshold_hits_continuum_minimum(self, ref_params, square):
        # lam* = sqrt((a-1)/eps0) = 8 is attained exactly by the (2, 2) mode
        # on the pi x pi square, so the discrete and continuum minima agree.
        chi_d, mode = sl.chi_c_domain(ref_params, square, 16, 16)
        assert chi_d == pytest.approx(3.125, abs=1e-12)
        assert (mode.p, mode.q) == (2, 2)
        assert mode.lam == pytest.approx(8.0, rel=1e-14)

    def test_chi_marginal_rational_values(self, ref_params):
        # chi_marginal(lam) = 4/lam + 17/8 + lam/16 at the reference point.
        expected = {
            2.0: 4.25,
            4.0: 3.375,
            5.0: 3.2375,
            8.0: 3.125,
            9.0: 4.0 / 9.0 + 17.0 / 8.0 + 9.0 / 16.0,
            10.0: 3.15,
            13.0: 4.0 / 13.0 + 17.0 / 8.0 + 13.0 / 16.0,
        }
        for lam, chi in expected.items():
            assert sl.chi_marginal(ref_params, lam) == pytest.approx(chi, rel=1e-14)

    def test_optimality_identity_at_eps0_inverse(self):
        # chi_subcrit / chi_c0 = 4s/(1+s)^2 with s = sqrt(eps0 (a-1)), which
        # reaches 1 exactly at eps0 = 1/(a-1).
        p = sl.ModelParams(a=3.0, chi=1.0, eps0=0.5, delta=1.0, beta=1.0)
        assert sl.chi_subcrit(p) == pytest.approx(sl.chi_c0(p), abs=1e-12)

    @settings(max_examples=80, deadline=None)
    @given(params=PARAM_STRATEGY)
    def test_subcrit_never_exceeds_continuum_threshold(self, params):
        assert sl.chi_subcrit(params) <= sl.chi_c0(params) * (1.0 + 1e-12)

    @settings(max_examples=60, deadline=None)
    @given(params=PARAM_STRATEGY, lam=st.floats(1e-2, 400.0))
    def test_chi_c0_is_global_minimum_of_chi_marginal(self, params, lam):
        assert sl.chi_c0(params) <= sl.chi_marginal(params, lam) * (1.0 + 1e-12)

    @settings(max_examples=60, deadline=None)
    @given(params=PARAM_STRATEGY)
    def test_marginal_chi_zeroes_the_determinant(self, params):
        lam = math.sqrt((params.a - 1.0) / params.eps0)  # the minimizer
        chi = sl.chi_marginal(params, lam)
        import dataclasses

        tuned = dataclasses.replace(params, chi=chi)
        point = growth_rates(tuned, lam)
        assert point.det == pytest.approx(0.0, abs=1e-10 * max(1.0, abs(point.trace)))

    def test_domain_threshold_never_below_continuum(self, ref_params):
        dom = sl.RectDomain(2.0, 1.3)
        chi_d, _ = sl.chi_c_domain(ref_params, dom, 12, 12)
        assert chi_d >= sl.chi_c0(ref_params) - 1e-12


class TestDispersion:
    def test_reduced_matrix_at_threshold(self, ref_params):
        import dataclasses

        p = dataclasses.replace(ref_params, chi=3.125)
        n = reduced_matrix(p, 8.0)
        assert np.array_equal(n, np.array([[-10.0, 12.5], [1.0, -1.25]]))
        # Singular at the marginal point: the determinant vanishes exactly.
        assert n[0, 0] * n[1, 1] - n[0, 1] * n[1, 0] == 0.0

    def test_roots_at_lam_zero(self, ref_params):
        point = growth_rates(ref_params, 0.0)
        assert point.sigma_plus == pytest.approx(-1.0, abs=1e-14)
        assert point.sigma_minus == pytest.approx(-2.0, abs=1e-14)
        assert point.g_branch == pytest.approx(-0.5, rel=1e-14)

    def test_frozen_growth_rates(self, ref_params):
        # (lam, chi) -> (sigma+, sigma-), frozen from the rational oracle.
        import dataclasses

        cases = [
            (8.0, 3.18, 0.0195216804, -11.2695216804),
            (8.0, 3.0, -0.0446214286, -11.2053785714),
            (8.0, 1.0, -0.8145296488, -10.4354703512),
            (8.0, 3.10, -0.0088959233, -11.2411040767),
            (9.0, 3.18, 0.0175829691, -12.2988329691),
            (10.0, 3.18, 0.0112580849, -13.3237580849),
        ]
        for lam, chi, s_plus, s_minus in cases:
            p = dataclasses.replace(ref_params, chi=chi)
            point = growth_rates(p, lam)
            assert point.sigma_plus.imag == 0.0
            assert point.sigma_plus.real == pytest.approx(s_plus, abs=1e-9)
            assert point.sigma_minus.real == pytest.approx(s_minus, abs=1e-9)

    def test_trace_and_det_at_lam_eight(self, ref_params):
        import dataclasses

        p = dataclasses.replace(ref_params, chi=3.18)
        point = growth_rates(p, 8.0)
        assert point.trace == pytest.approx(-11.25, rel=1e-14)
        assert point.det == pytest.approx(-0.22, abs=1e-13)

    @settings(max_examples=80, deadline=None)
    @given(params=PARAM_STRATEGY, lam=st.floats(0.0, 300.0))
    def test_root_pair_satisfies_vieta(self, params, lam):
        point = growth_rates(params, lam)
        scale = max(1.0, abs(point.trace), abs(point.det))
        assert point.sigma_plus + point.sigma_minus == pytest.approx(
            point.trace, abs=1e-9 * scale
        )
        assert point.sigma_plus * point.sigma_minus == pytest.approx(
            point.det, abs=1e-9 * scale
        )

    @settings(max_examples=80, deadline=None)
    @given(params=PARAM_STRATEGY, lam=st.floats(0.0, 300.0))
    def test_instability_iff_negative_det(self, params, lam):
        point = growth_rates(params, lam)
        if point.det < 0:
            assert point.sigma_plus.real > 0
        elif point.det > 0:
            assert point.sigma_plus.real < 0


class TestModeEnumeration:
    def test_count_and_ordering(self, square):
        modes = sl.neumann_eigenvalues(square, 5, 3)
        assert len(modes) == 6 * 4
        lams = [m.lam for m in modes]
        assert lams == sorted(lams)
        assert (modes[0].p, modes[0].q, modes[0].lam) == (0, 0, 0.0)

    def test_eigenvalues_on_square(self, square):
        modes = {(m.p, m.q): m.lam for m in sl.neumann_eigenvalues(square, 3, 3)}
        assert modes[(2, 2)] == pytest.approx(8.0, rel=1e-14)
        assert modes[(3, 0)] == pytest.approx(9.0, rel=1e-14)
        assert modes[(1, 3)] == pytest.approx(10.0, rel=1e-14)

    def test_rectangle_eigenvalues(self):
        dom = sl.RectDomain(2.0 * math.pi, math.pi)
        modes = {(m.p, m.q): m.lam for m in sl.neumann_eigenvalues(dom, 2, 1)}
        assert modes[(2, 0)] == pytest.approx(1.0, rel=1e-14)
        assert modes[(0, 1)] == pytest.approx(1.0, rel=1e-14)
        assert modes[(2, 1)] == pytest.approx(2.0, rel=1e-14)

    def test_negative_bounds_rejected(self, square):
        with pytest.raises(sl.ValidationError):
            sl.neumann_eigenvalues(square, -1, 3)


class TestUnstableBand:
    def test_band_just_above_threshold(self, ref_params, square):
        import dataclasses

        p = dataclasses.replace(ref_params, chi=3.13)
        band = sl.unstable_band(p, square, 16, 16)
        assert [(m.p, m.q) for m in band] == [(2, 2)]

    def test_band_at_chi_318(self, ref_params, square):
        import dataclasses

        p = dataclasses.replace(ref_params, chi=3.18)
        band = sl.unstable_band(p, square, 16, 16)
        assert {(m.p, m.q) for m in band} == {(2, 2), (3, 0), (0, 3), (1, 3), (3, 1)}

    def test_band_empty_below_threshold(self, ref_params, square):
        assert sl.unstable_band(ref_params, square, 16, 16) == []

    def test_marginal_mode_counts_stable(self, ref_params, square):
        import dataclasses

        p = dataclasses.replace(ref_params, chi=3.125)
        band = sl.unstable_band(p, square, 16, 16)
        assert band == []

    @settings(max_examples=40, deadline=None)
    @given(
        chi=st.floats(0.1, 8.0),
        a=st.floats(1.2, 5.0),
        eps0=st.floats(0.01, 1.0),
    )
    def test_band_nonempty_iff_above_domain_threshold(self, chi, a, eps0):
        params = sl.ModelParams(a=a, chi=chi, eps0=eps0, delta=1.0, beta=1.0)
        dom = sl.RectDomain(math.pi, math.pi)
        chi_d, _ = sl.chi_c_domain(params, dom, 24, 24)
        band = sl.unstable_band(params, dom, 24, 24)
        if chi > chi_d * (1.0 + 1e-9):
            assert band
        elif chi < chi_d * (1.0 - 1e-9):
            assert not band


class TestValidation:
    def test_negative_lam_rejected(self, ref_params):
        with pytest.raises(sl.ValidationError):
            growth_rates(ref_params, -1.0)
        with pytest.raises(sl.ValidationError):
            reduced_matrix(ref_params, -1.0)

    def test_chi_marginal_needs_positive_lam(self, ref_params):
        with pytest.raises(sl.ValidationError, match="lam > 0"):
            sl.chi_marginal(ref_params, 0.0)

    def test_degenerate_sensitivity_rejected_for_thresholds(self):
        nl = sl.NonlinearitySpec.custom(f=lambda m: 0.0 * m, g=lambda m: m * m)
        p = sl.ModelParams(a=3.0, chi=1.0, eps0=0.5, delta=1.0, beta=1.0, nonlinearity=nl)
        with pytest.raises(sl.ValidationError, match=r"f\(1\) > 0"):
            sl.chi_c0(p)
        # The dispersion roots themselves stay well defined (chi drops out).
        point = growth_rates(p, 4.0)
        assert point.sigma_plus.real < 0
