"""Material dispersion models.

Refractive index n(lambda) of a Sellmeier medium (or a constant-index
medium), optionally modified by additive Lorentzian resonances that can push
the group index below 1 ("fast light").  All wavelengths are vacuum
wavelengths in micrometres; conversions to SI happen only at the boundaries
of this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

C_M_S = 299_792_458.0
C_UM_S = C_M_S * 1e6  # um/s

# Minimum allowed |lambda^2 - l_i| in um^2; closer approaches to a Sellmeier
# pole are rejected instead of silently producing garbage.
POLE_GUARD_UM2 = 1e-6

_SQRT3 = math.sqrt(3.0)


class DispersionError(ValueError):
    """Base class for dispersion-evaluation failures."""


class PoleProximityError(DispersionError):
    """Wavelength too close to a Sellmeier pole."""


class NegativeRadicandError(DispersionError):
    """The Sellmeier bracket went negative; the model is not usable there."""


class NonPositiveError(DispersionError):
    """Wavelength or frequency must be strictly positive."""


@dataclass(frozen=True)
class SellmeierModel:
    """n(lam)^2 = 1 + sum_i a_i lam^2 / (lam^2 - l_i).

    ``terms`` is a sequence of (a_i, l_i) pairs: a_i is the dimensionless
    oscillator strength, l_i the squared resonance wavelength in um^2.
    """

    terms: tuple[tuple[float, float], ...]
    name: str = ""

    def __post_init__(self) -> None:
        terms = tuple((float(a), float(l)) for a, l in self.terms)
        object.__setattr__(self, "terms", terms)
        if any(a < 0.0 for a, _ in terms):
            raise ValueError("Sellmeier oscillator strengths must be >= 0")


@dataclass(frozen=True)
class ConstantIndex:
    """Dispersionless medium with fixed index n0."""

    n0: float

    def __post_init__(self) -> None:
        if not (self.n0 > 0.0 and math.isfinite(self.n0)):
            raise ValueError("constant index must be positive and finite")


@dataclass(frozen=True)
class LorentzianResonance:
    """Additive index peak amplitude*width^2 / ((lam-center)^2 + width^2).

    ``width`` is the half width at half maximum in um, ``center`` the peak
    wavelength in um, ``amplitude`` the peak index contribution.
    """

    center: float
    amplitude: float
    width: float

    def __post_init__(self) -> None:
        if self.center <= 0.0:
            raise ValueError("resonance center must be positive")
        if self.width <= 0.0:
            raise ValueError("resonance width must be positive")
        if not math.isfinite(self.amplitude):
            raise ValueError("resonance amplitude must be finite")


@dataclass(frozen=True)
class DispersionModel:
    """A base medium plus any number of Lorentzian corrections."""

    base: SellmeierModel | ConstantIndex
    resonances: tuple[LorentzianResonance, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "resonances", tuple(self.resonances))


@dataclass(frozen=True)
class GroupIndexSample:
    """One (wavelength, n, n_g) sample with its regime tag."""

    wavelength: float
    n: float
    n_g: float

    @property
    def regime(self) -> str:
        return group_regime(self.n_g)


def group_regime(n_g: float) -> str:
    """Classify a group index: normal (>=1), fast (0<n_g<1), anomalous (<=0)."""
    if n_g <= 0.0:
        return "anomalous"
    if n_g < 1.0:
        return "fast"
    return "normal"


def as_model(model) -> DispersionModel:
    """Wrap a bare base medium in a DispersionModel; pass models through."""
    if isinstance(model, DispersionModel):
        return model
    if isinstance(model, (SellmeierModel, ConstantIndex)):
        return DispersionModel(base=model)
    raise TypeError(f"not a dispersion model: {model!r}")


def _checked_wavelength(model: DispersionModel, wavelength):
    lam = np.asarray(wavelength, dtype=float)
    if np.any(lam <= 0.0) or not np.all(np.isfinite(lam)):
        raise NonPositiveError("wavelength must be positive and finite (um)")
    if isinstance(model.base, SellmeierModel):
        lam2 = lam * lam
        for _, l_i in model.base.terms:
            if np.any(np.abs(lam2 - l_i) <= POLE_GUARD_UM2):
                raise PoleProximityError(
                    f"wavelength too close to Sellmeier pole at l={l_i} um^2"
                )
    return lam


def refractive_index(model, wavelength):
    """Refractive index at vacuum wavelength(s) in um.

    Accepts a scalar or an ndarray and returns the same shape.
    """
    model = as_model(model)
    lam = _checked_wavelength(model, wavelength)
    scalar = lam.ndim == 0
    base = model.base
    if isinstance(base, ConstantIndex):
        n = np.full(lam.shape, base.n0)
    else:
        lam2 = lam * lam
        rad = np.ones_like(lam)
        for a_i, l_i in base.terms:
            rad = rad + a_i * lam2 / (lam2 - l_i)
        if np.any(rad < 0.0):
            raise NegativeRadicandError(
                "Sellmeier bracket is negative; model invalid at this wavelength"
            )
        n = np.sqrt(rad)
    for res in model.resonances:
        w2 = res.width * res.width
        n = n + res.amplitude * w2 / ((lam - res.center) ** 2 + w2)
    return float(n) if scalar else n


def index_derivative(model, wavelength):
    """Analytic dn/dlambda in um^-1 (same shape as the input)."""
    model = as_model(model)
    lam = _checked_wavelength(model, wavelength)
    scalar = lam.ndim == 0
    base = model.base
    if isinstance(base, ConstantIndex):
        dn = np.zeros(lam.shape)
    else:
        lam2 = lam * lam
        rad = np.ones_like(lam)
        drad = np.zeros_like(lam)
        for a_i, l_i in base.terms:
            denom = lam2 - l_i
            rad = rad + a_i * lam2 / denom
            # d/dlam [lam^2/(lam^2 - l)] = -2 lam l / (lam^2 - l)^2
            drad = drad - 2.0 * a_i * lam * l_i / (denom * denom)
        if np.any(rad < 0.0):
            raise NegativeRadicandError(
                "Sellmeier bracket is negative; model invalid at this wavelength"
            )
        dn = 0.5 * drad / np.sqrt(rad)
    for res in model.resonances:
        w2 = res.width * res.width
        d = lam - res.center
        dn = dn - 2.0 * res.amplitude * w2 * d / (d * d + w2) ** 2
    return float(dn) if scalar else dn


def group_index(model, wavelength):
    """Group index n_g = n - lambda * dn/dlambda.

    May be < 1 or <= 0 for fast-light models; returned as-is.
    """
    lam = np.asarray(wavelength, dtype=float)
    n = refractive_index(model, wavelength)
    ng = n - lam * index_derivative(model, wavelength)
    return float(ng) if lam.ndim == 0 else ng


def index_fields(model, wavelength):
    """Array-safe n, n_g and a bad-sample mask; never raises on bad cells.

    Samples where the model is invalid (non-positive wavelength, Sellmeier
    pole within POLE_GUARD_UM2, negative radicand, |n_g| ~ 0) are flagged in
    the returned boolean mask; their n, n_g values are placeholders.
    """
    model = as_model(model)
    lam = np.asarray(wavelength, dtype=float)
    bad = ~np.isfinite(lam) | (lam <= 0.0)
    lam_safe = np.where(bad, 1.0, lam)
    base = model.base
    if isinstance(base, ConstantIndex):
        n = np.full(lam.shape, base.n0)
        dn = np.zeros(lam.shape)
    else:
        lam2 = lam_safe * lam_safe
        rad = np.ones_like(lam_safe)
        drad = np.zeros_like(lam_safe)
        for a_i, l_i in base.terms:
            denom = lam2 - l_i
            bad |= np.abs(denom) <= POLE_GUARD_UM2
            denom = np.where(np.abs(denom) <= POLE_GUARD_UM2, 1.0, denom)
            rad = rad + a_i * lam2 / denom
            drad = drad - 2.0 * a_i * lam_safe * l_i / (denom * denom)
        bad |= rad < 0.0
        rad = np.where(rad < 0.0, 1.0, rad)
        n = np.sqrt(rad)
        dn = 0.5 * drad / n
    for res in model.resonances:
        w2 = res.width * res.width
        d = lam_safe - res.center
        n = n + res.amplitude * w2 / (d * d + w2)
        dn = dn - 2.0 * res.amplitude * w2 * d / (d * d + w2) ** 2
    ng = n - lam_safe * dn
    return n, ng, bad


def transparency_window(model, bounds=(0.02, 500.0), points=4096):
    """Widest contiguous wavelength interval (um) where the model is valid.

    Scans ``bounds`` on a log grid and returns the endpoints of the longest
    run (in log-wavelength) of samples that avoid Sellmeier poles and
    negative radicands.  Root searches and maxima scans stay inside this
    window so they cannot wander onto the unphysical branch beyond an
    infrared pole.
    """
    model = as_model(model)
    lam = np.geomspace(bounds[0], bounds[1], points)
    _, _, bad = index_fields(model, lam)
    if isinstance(model.base, SellmeierModel):
        # a weak oscillator keeps the radicand positive arbitrarily close to
        # its pole; exclude a 1% relative neighbourhood so the window never
        # bridges a resonance
        lam2 = lam * lam
        for _, l_i in model.base.terms:
            bad |= np.abs(lam2 - l_i) <= 0.01 * l_i
    good = ~bad
    if not np.any(good):
        raise DispersionError("model is invalid everywhere in the scan bounds")
    best_len, best = -1.0, None
    i = 0
    while i < points:
        if good[i]:
            j = i
            while j + 1 < points and good[j + 1]:
                j += 1
            span = math.log(lam[j] / lam[i])
            if span > best_len:
                best_len, best = span, (i, j)
            i = j + 1
        else:
            i += 1
    i, j = best
    return float(lam[i]), float(lam[j])


def sample_group_index(model, wavelength: float) -> GroupIndexSample:
    """Evaluate n and n_g at one wavelength, with the regime tag attached."""
    return GroupIndexSample(
        wavelength=float(wavelength),
        n=refractive_index(model, float(wavelength)),
        n_g=group_index(model, float(wavelength)),
    )


def wavelength_to_omega(wavelength_um):
    """Angular frequency in rad/s for a vacuum wavelength in um."""
    lam = np.asarray(wavelength_um, dtype=float)
    if np.any(lam <= 0.0):
        raise NonPositiveError("wavelength must be positive")
    omega = 2.0 * np.pi * C_UM_S / lam
    return float(omega) if lam.ndim == 0 else omega


def omega_to_wavelength(omega_rad_s):
    """Vacuum wavelength in um for an angular frequency in rad/s."""
    omega = np.asarray(omega_rad_s, dtype=float)
    if np.any(omega <= 0.0):
        raise NonPositiveError("frequency must be positive")
    lam = 2.0 * np.pi * C_UM_S / omega
    return float(lam) if omega.ndim == 0 else lam


def fast_light_resonance(
    amplitude: float, width: float, max_slope_at: float
) -> LorentzianResonance:
    """Lorentzian whose steepest rising wing sits at ``max_slope_at``.

    The maximum positive slope of the Lorentzian lies at
    center - width/sqrt(3); placing it at the requested wavelength puts the
    group-index dip on top of the region of interest.
    """
    return LorentzianResonance(
        center=max_slope_at + width / _SQRT3,
        amplitude=amplitude,
        width=width,
    )
