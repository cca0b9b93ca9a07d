"""Emission geometry of photon pairs from a moving index perturbation.

Cerenkov cone angles, normal/anomalous Doppler classification, the
delta-function constraint linking the two photons of a pair, and its
numerical solution for the partner wavelength.

Both polar angles are measured from the propagation axis (+x) and lie in
[0, pi]; the backward photon of a collinear pair has theta = pi.
Wavenumbers are in um^-1, wavelengths in um.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import dispersion
from .dispersion import C_M_S, C_UM_S

TOL_ANGLE = 1e-9  # rad, degenerate-cone classification
_TOL_DIVERGENCE = 1e-9  # relative, Doppler denominator


class KinematicsError(ValueError):
    """Base class for kinematic failures."""


class SubluminalError(KinematicsError):
    """beta * n < 1: no Cerenkov cone, no pair emission at this frequency."""


class NoRootError(KinematicsError):
    """The implicit Doppler equation has no root in the given bracket."""


class NoSignChangeError(KinematicsError):
    """The pair constraint has no solution in the given bracket."""


class DivergenceError(KinematicsError):
    """1 - beta n cos(theta) vanished: on the Cerenkov cone itself."""


class MultipleRootsWarning(UserWarning):
    """More than one partner wavelength satisfies the constraint."""


@dataclass(frozen=True)
class PerturbationKinematics:
    """Velocity of the moving perturbation, as beta = v/c."""

    beta: float

    def __post_init__(self) -> None:
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise ValueError("beta must be positive and finite")

    @property
    def v_m_s(self) -> float:
        return self.beta * C_M_S

    @property
    def v_um_s(self) -> float:
        return self.beta * C_UM_S


@dataclass(frozen=True)
class PhotonMode:
    """One emitted photon: wavelength (um), polar angle, azimuth."""

    wavelength: float
    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be positive")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")


@dataclass(frozen=True)
class ConeClassification:
    variant: str  # "overlap" | "gap" | "degenerate"
    theta_cone1: float
    theta_cone2: float


def wavenumber(model, wavelength):
    """k = 2 pi n / lambda in um^-1."""
    lam = np.asarray(wavelength, dtype=float)
    k = 2.0 * np.pi * dispersion.refractive_index(model, wavelength) / lam
    return float(k) if lam.ndim == 0 else k


def cerenkov_angle(wavelength: float, kin: PerturbationKinematics, model) -> float:
    """Cone angle arccos(1/(beta n)); raises SubluminalError below threshold."""
    bn = kin.beta * dispersion.refractive_index(model, wavelength)
    if bn < 1.0:
        raise SubluminalError(
            f"beta*n = {bn:.6g} < 1 at {wavelength} um: no Cerenkov cone"
        )
    return math.acos(1.0 / bn)


def doppler_frequency(
    omega_comoving: float,
    theta: float,
    kin: PerturbationKinematics,
    model,
    omega_lab_bracket: tuple[float, float],
) -> tuple[float, str]:
    """Lab frequency solving omega |1 - beta n(omega) cos(theta)| = omega'/gamma.

    For beta >= 1 the Lorentz factor does not exist; gamma is then set to 1
    and the result is meaningful only as a regime classifier.
    Returns (omega_lab, regime) with regime "normal" or "anomalous".
    """
    if omega_comoving <= 0.0:
        raise dispersion.NonPositiveError("comoving frequency must be positive")
    beta = kin.beta
    gamma = 1.0 / math.sqrt(1.0 - beta * beta) if beta < 1.0 else 1.0
    target = omega_comoving / gamma
    cos_t = math.cos(theta)

    def f(omega: float) -> float:
        lam = dispersion.omega_to_wavelength(omega)
        n = dispersion.refractive_index(model, lam)
        return omega * abs(1.0 - beta * n * cos_t) - target

    a, b = omega_lab_bracket
    fa, fb = f(a), f(b)
    if fa == 0.0:
        omega_lab = a
    elif fb == 0.0:
        omega_lab = b
    elif fa * fb > 0.0:
        raise NoRootError("no Doppler solution in the given frequency bracket")
    else:
        omega_lab = brentq(f, a, b, xtol=1e-6, rtol=1e-14)
    n = dispersion.refractive_index(model, dispersion.omega_to_wavelength(omega_lab))
    denom = 1.0 - beta * n * cos_t
    if abs(denom) < _TOL_DIVERGENCE:
        raise DivergenceError("on the Cerenkov cone: Doppler factor diverges")
    regime = "anomalous" if beta * n * cos_t > 1.0 else "normal"
    return omega_lab, regime


def pair_constraint_residual(
    mode1: PhotonMode, mode2: PhotonMode, kin: PerturbationKinematics, model
) -> float:
    """k1x + k2x - (omega1 + omega2)/v, in um^-1.

    Zero iff the pair is kinematically allowed.  Symmetric under exchange of
    the two modes.
    """
    lam1, lam2 = mode1.wavelength, mode2.wavelength
    n1 = dispersion.refractive_index(model, lam1)
    n2 = dispersion.refractive_index(model, lam2)
    return 2.0 * math.pi * (
        n1 * math.cos(mode1.theta) / lam1
        + n2 * math.cos(mode2.theta) / lam2
        - (1.0 / lam1 + 1.0 / lam2) / kin.beta
    )


def constraint_tolerance(lam1: float, lam2: float, kin: PerturbationKinematics) -> float:
    """Absolute residual tolerance 1e-10 * (omega1+omega2)/v, in um^-1."""
    return 1e-10 * 2.0 * math.pi * (1.0 / lam1 + 1.0 / lam2) / kin.beta


def _residual_of_lambda2(lam2, lam1, cos_t1, cos_t2, kin, model):
    """Vectorized constraint residual as a function of the partner wavelength.

    Wavelengths where the dispersion model is invalid evaluate to nan so a
    bracketing scan can simply skip them.
    """
    n1 = dispersion.refractive_index(model, lam1)
    n2, _, bad = dispersion.index_fields(model, lam2)
    inv_b = 1.0 / kin.beta
    res = 2.0 * np.pi * (
        (n1 * cos_t1 - inv_b) / lam1 + (n2 * cos_t2 - inv_b) / lam2
    )
    return np.where(bad, np.nan, res) if np.ndim(res) else (math.nan if bad else float(res))


def solve_partner(
    lam1: float,
    theta1: float,
    theta2: float,
    kin: PerturbationKinematics,
    model,
    bracket: tuple[float, float] | None = None,
    scan_points: int = 400,
) -> float:
    """Partner wavelength lam2 with zero constraint residual.

    The default bracket is the transparency window of the model, keeping the
    search off any unphysical branch beyond an infrared pole.
    Scans the bracket on a log grid for sign changes, then refines each with
    bracketed root finding.  Returns the smallest root; warns via
    MultipleRootsWarning when the scan finds more than one (possible for
    non-monotonic, fast-light dispersion).  Raises NoSignChangeError when no
    partner exists in the bracket (in particular in the subluminal regime,
    where there is no pair emission at all).
    """
    if bracket is None:
        bracket = dispersion.transparency_window(model)
    cos_t1, cos_t2 = math.cos(theta1), math.cos(theta2)
    grid = np.geomspace(bracket[0], bracket[1], scan_points)
    res = _residual_of_lambda2(grid, lam1, cos_t1, cos_t2, kin, model)
    sign = np.sign(res)
    roots: list[float] = []
    exact = np.nonzero(sign == 0.0)[0]
    roots.extend(float(grid[i]) for i in exact)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0.0)[0]
    f = lambda l2: _residual_of_lambda2(float(l2), lam1, cos_t1, cos_t2, kin, model)
    for i in flips:
        roots.append(brentq(f, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15))
    if not roots:
        raise NoSignChangeError(
            f"no partner wavelength in [{bracket[0]}, {bracket[1]}] um for "
            f"lam1={lam1} um (subluminal or out of bracket)"
        )
    roots = sorted(set(roots))
    if len(roots) > 1:
        warnings.warn(
            f"{len(roots)} partner roots found; returning the smallest",
            MultipleRootsWarning,
            stacklevel=2,
        )
    return roots[0]


def classify_cones(
    lam1: float, lam2: float, kin: PerturbationKinematics, model
) -> ConeClassification:
    """Overlap/gap/degenerate classification of the two Cerenkov cones."""
    theta_c1 = cerenkov_angle(lam1, kin, model)
    theta_c2 = cerenkov_angle(lam2, kin, model)
    if abs(theta_c1 - theta_c2) <= TOL_ANGLE:
        variant = "degenerate"
    elif theta_c1 > theta_c2:
        variant = "overlap"
    else:
        variant = "gap"
    return ConeClassification(variant=variant, theta_cone1=theta_c1, theta_cone2=theta_c2)
