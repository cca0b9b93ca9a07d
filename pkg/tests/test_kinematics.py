"""Pair-kinematics tests: closed forms, symmetry, thresholds, cones."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vacuumpairs import dispersion
from vacuumpairs.dispersion import ConstantIndex, DispersionModel
from vacuumpairs.kinematics import (
    NoSignChangeError,
    PerturbationKinematics,
    PhotonMode,
    SubluminalError,
    cerenkov_angle,
    classify_cones,
    constraint_tolerance,
    doppler_frequency,
    pair_constraint_residual,
    solve_partner,
    wavenumber,
)
from vacuumpairs.materials import get_material


def constant(n0):
    return DispersionModel(base=ConstantIndex(n0))


def closed_form_partner(lam1, beta, n0):
    """Collinear partner for a dispersionless medium."""
    bn = beta * n0
    return lam1 * (bn + 1.0) / (bn - 1.0)


class TestWavenumber:
    def test_definition(self):
        model = constant(1.5)
        assert wavenumber(model, 0.5) == pytest.approx(2.0 * math.pi * 1.5 / 0.5)

    def test_array(self):
        model = get_material("fused_silica")
        lams = np.array([0.5, 1.0, 2.0])
        np.testing.assert_allclose(
            wavenumber(model, lams),
            [wavenumber(model, float(l)) for l in lams],
        )


class TestCerenkov:
    def test_angle_closed_form(self):
        kin = PerturbationKinematics(beta=2.0)
        angle = cerenkov_angle(1.0, kin, constant(1.5))
        assert angle == pytest.approx(math.acos(1.0 / 3.0))

    def test_subluminal_raises(self):
        kin = PerturbationKinematics(beta=0.5)
        with pytest.raises(SubluminalError):
            cerenkov_angle(1.0, kin, constant(1.5))

    @given(
        st.floats(min_value=1.01, max_value=50.0),
        st.floats(min_value=1.0, max_value=3.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_angle_grows_with_speed(self, beta, n0):
        if beta * n0 <= 1.0:
            return
        model = constant(n0)
        a1 = cerenkov_angle(1.0, PerturbationKinematics(beta=beta), model)
        a2 = cerenkov_angle(1.0, PerturbationKinematics(beta=beta * 1.5), model)
        assert a2 > a1


class TestResidual:
    def test_zero_on_closed_form_pair(self):
        beta, n0 = 2.0, 1.5
        kin = PerturbationKinematics(beta=beta)
        lam1 = 1.0
        lam2 = closed_form_partner(lam1, beta, n0)
        res = pair_constraint_residual(
            PhotonMode(lam1, 0.0), PhotonMode(lam2, math.pi), kin, constant(n0)
        )
        assert abs(res) < constraint_tolerance(lam1, lam2, kin)

    def test_exchange_symmetry(self):
        kin = PerturbationKinematics(beta=3.0)
        model = get_material("fused_silica")
        m1 = PhotonMode(0.8, 0.3)
        m2 = PhotonMode(1.9, 2.6)
        assert pair_constraint_residual(m1, m2, kin, model) == pair_constraint_residual(
            m2, m1, kin, model
        )

    def test_tabulated_pair_nearly_on_curve(self):
        # beta = 2 reference pair (2.51, 4.98) um in fused silica
        kin = PerturbationKinematics(beta=2.0)
        model = get_material("fused_silica")
        res = pair_constraint_residual(
            PhotonMode(2.51, 0.0), PhotonMode(4.98, math.pi), kin, model
        )
        k1 = wavenumber(model, 2.51)
        assert abs(res) / k1 < 0.02


class TestSolvePartner:
    @given(
        st.floats(min_value=0.3, max_value=5.0),
        st.floats(min_value=1.2, max_value=30.0),
        st.floats(min_value=1.1, max_value=2.5),
    )
    @settings(max_examples=80, deadline=None)
    def test_matches_closed_form(self, lam1, beta, n0):
        if beta * n0 < 1.05:
            return
        kin = PerturbationKinematics(beta=beta)
        lam2 = solve_partner(lam1, 0.0, math.pi, kin, constant(n0))
        assert lam2 == pytest.approx(
            closed_form_partner(lam1, beta, n0), rel=1e-10
        )

    def test_partner_monotone_in_lam1(self):
        kin = PerturbationKinematics(beta=5.0)
        model = get_material("fused_silica")
        lams = np.geomspace(0.5, 2.0, 20)
        partners = [solve_partner(float(l), 0.0, math.pi, kin, model) for l in lams]
        assert all(a < b for a, b in zip(partners, partners[1:]))

    def test_wavelength_ratio_shrinks_with_beta(self):
        model = get_material("fused_silica")
        ratios = []
        for beta in (2.0, 5.0, 10.0, 20.0):
            lam2 = solve_partner(1.0, 0.0, math.pi, PerturbationKinematics(beta=beta), model)
            ratios.append(lam2 / 1.0)
        assert all(a > b for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] > 1.0  # backward photon always redder

    def test_subluminal_has_no_partner(self):
        kin = PerturbationKinematics(beta=0.5)
        with pytest.raises(NoSignChangeError):
            solve_partner(1.0, 0.0, math.pi, kin, get_material("fused_silica"))

    def test_residual_vanishes_at_solution(self):
        kin = PerturbationKinematics(beta=10.0)
        model = get_material("fused_silica")
        lam1, theta1, theta2 = 0.7, 0.2, 2.9
        lam2 = solve_partner(lam1, theta1, theta2, kin, model)
        res = pair_constraint_residual(
            PhotonMode(lam1, theta1), PhotonMode(lam2, theta2), kin, model
        )
        assert abs(res) < constraint_tolerance(lam1, lam2, kin)


class TestDoppler:
    def test_constant_index_normal_branch(self):
        n0, beta, theta = 1.5, 0.4, math.pi / 2.0
        kin = PerturbationKinematics(beta=beta)
        gamma = 1.0 / math.sqrt(1.0 - beta * beta)
        omega_c = 1.0e15
        omega, regime = doppler_frequency(
            omega_c, theta, kin, constant(n0), (1e13, 1e17)
        )
        # cos(theta) = 0: omega_lab = omega'/gamma exactly
        assert omega == pytest.approx(omega_c / gamma, rel=1e-9)
        assert regime == "normal"

    def test_anomalous_branch_inside_cone(self):
        n0, beta = 1.5, 2.0
        kin = PerturbationKinematics(beta=beta)
        omega_c = 1.0e15
        omega, regime = doppler_frequency(omega_c, 0.0, kin, constant(n0), (1e13, 1e17))
        # head-on inside the Cerenkov cone: |1 - beta n| = 2
        assert omega == pytest.approx(omega_c / 2.0, rel=1e-9)
        assert regime == "anomalous"


class TestCones:
    def test_overlap_for_normal_dispersion(self):
        model = get_material("fused_silica")
        kin = PerturbationKinematics(beta=2.0)
        # n(lam1) > n(lam2) in the normal region: the short-wavelength cone
        # is wider
        cones = classify_cones(0.5, 2.0, kin, model)
        assert cones.variant == "overlap"
        assert cones.theta_cone1 > cones.theta_cone2

    def test_gap_when_order_reversed(self):
        model = get_material("fused_silica")
        kin = PerturbationKinematics(beta=2.0)
        cones = classify_cones(2.0, 0.5, kin, model)
        assert cones.variant == "gap"

    def test_degenerate_for_equal_wavelengths(self):
        model = get_material("fused_silica")
        kin = PerturbationKinematics(beta=2.0)
        assert classify_cones(1.0, 1.0, kin, model).variant == "degenerate"


class TestValidation:
    def test_beta_positive(self):
        with pytest.raises(ValueError):
            PerturbationKinematics(beta=0.0)

    def test_mode_validation(self):
        with pytest.raises(ValueError):
            PhotonMode(wavelength=-1.0, theta=0.0)
        with pytest.raises(ValueError):
            PhotonMode(wavelength=1.0, theta=4.0)

    def test_velocity_properties(self):
        kin = PerturbationKinematics(beta=2.0)
        assert kin.v_m_s == pytest.approx(2.0 * 299792458.0)
        assert kin.v_um_s == pytest.approx(kin.v_m_s * 1e6)
