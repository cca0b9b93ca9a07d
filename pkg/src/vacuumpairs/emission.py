"""Pair-emission spectral densities.

Evaluates the differential number of emitted photon pairs per unit
wavenumber of each photon, for a Gaussian or tanh-shaped refractive-index
perturbation moving at v = beta*c through a dispersive medium, and for the
nondispersive closed form.  The pair constraint
k1x + k2x = (omega1 + omega2)/v is consumed analytically; the squared
constraint delta is regularized by delta(0) -> L/(2 pi) with L the
interaction length.

Normalization convention (stored in every config snapshot): wavenumbers in
um^-1, mode measure d^3k/(2 pi)^3 per photon, a single 2 pi azimuthal
factor, delta(0) = L/(2 pi) with L in um, and the constraint delta consumed
with the inverse gradient norm of the residual over (k1x, k2x), and a
spectral weight of half the summed inverse optical wavelength.  A single
calibration constant multiplies the output; it was fixed once against the
reference emission maximum at beta = 10, sigma = 1 um in fused silica.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import dispersion, kinematics, materials
from .dispersion import C_UM_S, ConstantIndex, DispersionModel, SellmeierModel, as_model
from .kinematics import PerturbationKinematics, PhotonMode

TWO_PI = 2.0 * math.pi

NG_FLOOR = 1e-3  # |n_g| below this is treated as singular (resonance center)
KX_FLOOR = 1e-6  # um^-1, csch^2 singularity guard for the tanh profile

# Fixed once against the tabulated reference maximum (beta=10, sigma=1 um,
# fused silica); see calibrate_reference_row() in the analysis module.
DEFAULT_CALIBRATION = 0.3300190266624311

CONVENTION = (
    "per-dk-um; d3k/(2pi)^3 per photon; single 2pi azimuth; "
    "delta(0)=L/2pi; inverse-gradient delta consumption; "
    "spectral weight (n1/lam1+n2/lam2)/2 per um^-1"
)

FLAG_OK = 0
FLAG_FORBIDDEN = 1  # no real emission angle for this cell
FLAG_HOLE = 2  # numerical singularity (pole, negative radicand, n_g ~ 0)

FLAG_LEGEND = {FLAG_OK: "ok", FLAG_FORBIDDEN: "forbidden", FLAG_HOLE: "hole"}


class EmissionError(ValueError):
    """Base class for emission-evaluation failures."""


class ConstraintViolatedError(EmissionError):
    """The mode pair does not satisfy the kinematic constraint."""


class GroupIndexSingularError(EmissionError):
    """|n_g| below NG_FLOOR: the density diverges at a resonance center."""


class CschSingularError(EmissionError):
    """|k1x + k2x| below KX_FLOOR: csch^2 pole of the tanh profile."""


@dataclass(frozen=True)
class GaussianProfile:
    """Isotropic Gaussian index bump: amplitude eta, radius sigma (um)."""

    eta: float
    sigma: float

    def __post_init__(self) -> None:
        if self.eta < 0.0:
            raise ValueError("eta must be >= 0 (only the amplitude matters)")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class TanhProfile:
    """tanh front along x with Gaussian transverse profile (all sizes in um)."""

    eta: float
    sigma_x: float
    sigma_y: float
    sigma_z: float

    def __post_init__(self) -> None:
        if self.eta < 0.0:
            raise ValueError("eta must be >= 0")
        if min(self.sigma_x, self.sigma_y, self.sigma_z) <= 0.0:
            raise ValueError("all sigmas must be positive")


@dataclass(frozen=True)
class EmissionConfig:
    """Everything needed to evaluate densities: medium, profile, velocity, L."""

    material: DispersionModel
    profile: GaussianProfile | TanhProfile
    kin: PerturbationKinematics
    length_m: float
    calibration: float = DEFAULT_CALIBRATION
    convention: str = CONVENTION

    def __post_init__(self) -> None:
        object.__setattr__(self, "material", as_model(self.material))
        if self.length_m <= 0.0:
            raise ValueError("interaction length must be positive")

    @property
    def length_um(self) -> float:
        return self.length_m * 1e6


def profile_to_dict(profile) -> dict:
    if isinstance(profile, GaussianProfile):
        return {"shape": "gaussian", "eta": profile.eta, "sigma_um": profile.sigma}
    return {
        "shape": "tanh",
        "eta": profile.eta,
        "sigma_x_um": profile.sigma_x,
        "sigma_y_um": profile.sigma_y,
        "sigma_z_um": profile.sigma_z,
    }


def profile_from_dict(doc: dict):
    shape = doc.get("shape")
    if shape == "gaussian":
        return GaussianProfile(eta=float(doc["eta"]), sigma=float(doc["sigma_um"]))
    if shape == "tanh":
        return TanhProfile(
            eta=float(doc["eta"]),
            sigma_x=float(doc["sigma_x_um"]),
            sigma_y=float(doc["sigma_y_um"]),
            sigma_z=float(doc["sigma_z_um"]),
        )
    raise ValueError(f"unknown profile shape: {shape!r}")


def config_to_dict(config: EmissionConfig) -> dict:
    return {
        "material": materials.model_to_dict(config.material),
        "profile": profile_to_dict(config.profile),
        "beta": config.kin.beta,
        "L_m": config.length_m,
        "calibration": config.calibration,
        "convention": config.convention,
    }


def config_from_dict(doc: dict) -> EmissionConfig:
    return EmissionConfig(
        material=materials.model_from_dict(doc["material"]),
        profile=profile_from_dict(doc["profile"]),
        kin=PerturbationKinematics(beta=float(doc["beta"])),
        length_m=float(doc["L_m"]),
        calibration=float(doc.get("calibration", DEFAULT_CALIBRATION)),
        convention=str(doc.get("convention", CONVENTION)),
    )


# ---------------------------------------------------------------------------
# profile form factors (squared Fourier transforms, delta stripped)

def gaussian_form_factor(profile: GaussianProfile, kx, ky, kz):
    """sigma^6 exp(-sigma^2 |K|^2) with K the summed pair momentum (um^-1)."""
    s2 = profile.sigma * profile.sigma
    return profile.sigma**6 * np.exp(-s2 * (kx * kx + ky * ky + kz * kz))


def tanh_form_factor(profile: TanhProfile, kx, ky, kz):
    """sx^2 sy^2 sz^2 (pi/2) csch^2(pi sx kx / 2) exp(-sy^2 ky^2 - sz^2 kz^2)."""
    arg = 0.5 * math.pi * profile.sigma_x * np.asarray(kx, dtype=float)
    csch2 = 1.0 / np.sinh(arg) ** 2
    return (
        (profile.sigma_x * profile.sigma_y * profile.sigma_z) ** 2
        * (math.pi / 2.0)
        * csch2
        * np.exp(
            -profile.sigma_y**2 * np.asarray(ky) ** 2
            - profile.sigma_z**2 * np.asarray(kz) ** 2
        )
    )


# ---------------------------------------------------------------------------
# scalar point densities

def _mode_quantities(model, mode: PhotonMode):
    lam = mode.wavelength
    n = dispersion.refractive_index(model, lam)
    ng = dispersion.group_index(model, lam)
    if abs(ng) < NG_FLOOR:
        raise GroupIndexSingularError(
            f"|n_g| = {abs(ng):.2e} < {NG_FLOOR} at {lam} um"
        )
    omega = dispersion.wavelength_to_omega(lam)
    k = TWO_PI * n / lam
    st, ct = math.sin(mode.theta), math.cos(mode.theta)
    kvec = np.array([k * ct, k * st * math.cos(mode.phi), k * st * math.sin(mode.phi)])
    return n, ng, omega, k, kvec


def _check_constraint(mode1, mode2, kin, model) -> None:
    residual = kinematics.pair_constraint_residual(mode1, mode2, kin, model)
    tol = kinematics.constraint_tolerance(mode1.wavelength, mode2.wavelength, kin)
    if abs(residual) > tol:
        raise ConstraintViolatedError(
            f"pair constraint residual {residual:.3e} um^-1 exceeds tolerance {tol:.3e}"
        )


def _point_density(mode1, mode2, config, model, form_factor) -> float:
    kin = config.kin
    n1, ng1, w1, k1, kvec1 = _mode_quantities(model, mode1)
    n2, ng2, w2, k2, kvec2 = _mode_quantities(model, mode2)
    ksum = kvec1 + kvec2
    cos_psi = float(np.dot(kvec1, kvec2)) / (k1 * k2)
    angular = 1.0 + cos_psi * cos_psi
    v_um = kin.v_um_s
    common = (
        config.profile.eta**2
        * math.pi**2
        / (v_um * v_um)
        * w1
        * w2
        * (n1 + n2) ** 2
        * angular
        / (n1 * n1 * ng1 * ng1 * n2 * n2 * ng2 * ng2)
    )
    ff = form_factor(float(ksum[0]), float(ksum[1]), float(ksum[2]))
    # inverse gradient norm of the residual over (k1x, k2x): symmetric in the
    # two photons, so the density keeps its exchange symmetry
    g1 = 1.0 - math.cos(mode1.theta) / (kin.beta * ng1)
    g2 = 1.0 - math.cos(mode2.theta) / (kin.beta * ng2)
    jac = 1.0 / math.hypot(g1, g2)
    # the mean pair wavenumber weights the spectral density (um^-1)
    weight = 0.5 * (k1 + k2) / TWO_PI
    measure = k1 * k1 * k2 * k2 * jac * weight * (config.length_um / TWO_PI) / TWO_PI**5
    return float(config.calibration * common * ff * measure)


def density_gaussian(mode1: PhotonMode, mode2: PhotonMode, config: EmissionConfig) -> float:
    """Pair density for a Gaussian perturbation in the dispersive medium."""
    if not isinstance(config.profile, GaussianProfile):
        raise EmissionError("density_gaussian requires a Gaussian profile")
    _check_constraint(mode1, mode2, config.kin, config.material)
    ff = lambda kx, ky, kz: gaussian_form_factor(config.profile, kx, ky, kz)
    return _point_density(mode1, mode2, config, config.material, ff)


def density_tanh(mode1: PhotonMode, mode2: PhotonMode, config: EmissionConfig) -> float:
    """Pair density for a tanh front with Gaussian transverse profile."""
    if not isinstance(config.profile, TanhProfile):
        raise EmissionError("density_tanh requires a tanh profile")
    _check_constraint(mode1, mode2, config.kin, config.material)
    n1 = dispersion.refractive_index(config.material, mode1.wavelength)
    n2 = dispersion.refractive_index(config.material, mode2.wavelength)
    k1x = TWO_PI * n1 / mode1.wavelength * math.cos(mode1.theta)
    k2x = TWO_PI * n2 / mode2.wavelength * math.cos(mode2.theta)
    if abs(k1x + k2x) < KX_FLOOR:
        raise CschSingularError("k1x + k2x too close to the csch^2 pole")
    ff = lambda kx, ky, kz: tanh_form_factor(config.profile, kx, ky, kz)
    return _point_density(mode1, mode2, config, config.material, ff)


def density_nondispersive(
    mode1: PhotonMode, mode2: PhotonMode, n0: float, config: EmissionConfig
) -> float:
    """Closed-form density for a constant-index medium (Gaussian profile).

    Evaluates 2^2 sigma^6 pi^2 eta^2 / (v^2 n0^6) * omega1 omega2
    * exp(-sigma^2 |k1+k2|^2) * (1 + cos^2 psi), with the corrected 2^2
    prefactor, under the same measure convention as the dispersive density.
    """
    if not isinstance(config.profile, GaussianProfile):
        raise EmissionError("the nondispersive closed form assumes a Gaussian profile")
    model = DispersionModel(base=ConstantIndex(n0))
    _check_constraint(mode1, mode2, config.kin, model)
    profile = config.profile
    kin = config.kin
    lam1, lam2 = mode1.wavelength, mode2.wavelength
    w1 = dispersion.wavelength_to_omega(lam1)
    w2 = dispersion.wavelength_to_omega(lam2)
    k1, k2 = TWO_PI * n0 / lam1, TWO_PI * n0 / lam2
    st1, ct1 = math.sin(mode1.theta), math.cos(mode1.theta)
    st2, ct2 = math.sin(mode2.theta), math.cos(mode2.theta)
    kvec1 = np.array([k1 * ct1, k1 * st1 * math.cos(mode1.phi), k1 * st1 * math.sin(mode1.phi)])
    kvec2 = np.array([k2 * ct2, k2 * st2 * math.cos(mode2.phi), k2 * st2 * math.sin(mode2.phi)])
    ksum = kvec1 + kvec2
    cos_psi = float(np.dot(kvec1, kvec2)) / (k1 * k2)
    angular = 1.0 + cos_psi * cos_psi
    v_um = kin.v_um_s
    value = (
        4.0
        * profile.sigma**6
        * math.pi**2
        * profile.eta**2
        / (v_um * v_um * n0**6)
        * w1
        * w2
        * math.exp(-profile.sigma**2 * float(np.dot(ksum, ksum)))
        * angular
    )
    g1 = 1.0 - ct1 / (kin.beta * n0)
    g2 = 1.0 - ct2 / (kin.beta * n0)
    jac = 1.0 / math.hypot(g1, g2)
    weight = 0.5 * (k1 + k2) / TWO_PI
    measure = k1 * k1 * k2 * k2 * jac * weight * (config.length_um / TWO_PI) / TWO_PI**5
    return float(config.calibration * value * measure)


# ---------------------------------------------------------------------------
# array-safe field evaluation (no exceptions; bad cells are masked)

def _index_fields(model, lam):
    """n, n_g and a bad-cell mask; adds the group-index floor to the mask."""
    n, ng, bad = dispersion.index_fields(model, lam)
    return n, ng, bad | (np.abs(ng) < NG_FLOOR)


@dataclass
class PairDensityGrid:
    """Sampled pair density over (lambda1, lambda2) in collinear geometry.

    Photon 1 is emitted exactly forward (theta1 = 0); for every grid cell
    photon 2 takes the polar angle implied by the pair constraint (theta2 =
    pi exactly on the constraint curve).  Cells with no real emission angle
    are flagged FORBIDDEN and cells hitting numerical singularities are
    flagged HOLE; both carry density 0.
    """

    lambda1_um: np.ndarray
    lambda2_um: np.ndarray
    values: np.ndarray  # shape (len(lambda1), len(lambda2))
    flags: np.ndarray  # int codes, same shape
    theta1: float
    theta2_nominal: float
    config: EmissionConfig

    def max_value(self) -> float:
        return float(np.max(self.values))

    def to_csv(self, path, header_lines=()) -> None:
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write("lambda1_um,lambda2_um,density,flag\n")
            for i, l1 in enumerate(self.lambda1_um):
                for j, l2 in enumerate(self.lambda2_um):
                    fh.write(
                        f"{float(l1)!r},{float(l2)!r},{float(self.values[i, j])!r},"
                        f"{FLAG_LEGEND[int(self.flags[i, j])]}\n"
                    )

    def to_json(self, path) -> None:
        doc = {
            "config": config_to_dict(self.config),
            "theta1": self.theta1,
            "theta2_nominal": self.theta2_nominal,
            "lambda1_um": [float(x) for x in self.lambda1_um],
            "lambda2_um": [float(x) for x in self.lambda2_um],
            "values": [[float(x) for x in row] for row in self.values],
            "flags": [[int(x) for x in row] for row in self.flags],
            "flag_legend": {str(k): v for k, v in FLAG_LEGEND.items()},
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")


def _grid_fields(config: EmissionConfig, lam1, lam2):
    """Vectorized density over broadcast (lambda1, lambda2) arrays.

    Returns (values, flags).  lam1 is the forward photon (theta1 = 0); the
    partner angle follows from the constraint at each cell.
    """
    kin = config.kin
    model = config.material
    profile = config.profile
    n1, ng1, bad1 = _index_fields(model, lam1)
    n2, ng2, bad2 = _index_fields(model, lam2)
    s_total = (TWO_PI / kin.beta) * (1.0 / lam1 + 1.0 / lam2)  # (w1+w2)/v, um^-1
    k1 = TWO_PI * n1 / lam1
    k2 = TWO_PI * n2 / lam2
    k2x = s_total - k1
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_t2 = k2x / k2
    forbidden = np.abs(cos_t2) > 1.0
    cos_t2 = np.clip(cos_t2, -1.0, 1.0)
    sin_t2 = np.sqrt(np.clip(1.0 - cos_t2 * cos_t2, 0.0, None))
    kx, ky = s_total, k2 * sin_t2
    if isinstance(profile, GaussianProfile):
        ff = gaussian_form_factor(profile, kx, ky, 0.0)
        hole = bad1 | bad2
    else:
        hole = bad1 | bad2 | (np.abs(kx) < KX_FLOOR)
        kx_safe = np.where(np.abs(kx) < KX_FLOOR, 1.0, kx)
        ff = tanh_form_factor(profile, kx_safe, ky, 0.0)
    w1 = dispersion.wavelength_to_omega(np.asarray(lam1, dtype=float))
    w2 = dispersion.wavelength_to_omega(np.asarray(lam2, dtype=float))
    v_um = kin.v_um_s
    with np.errstate(invalid="ignore", divide="ignore"):
        common = (
            profile.eta**2
            * math.pi**2
            / (v_um * v_um)
            * w1
            * w2
            * (n1 + n2) ** 2
            * (1.0 + cos_t2 * cos_t2)
            / (n1 * n1 * ng1 * ng1 * n2 * n2 * ng2 * ng2)
        )
        g1 = 1.0 - 1.0 / (kin.beta * ng1)
        g2 = 1.0 - cos_t2 / (kin.beta * ng2)
        jac = 1.0 / np.hypot(g1, g2)
    weight = 0.5 * (k1 + k2) / TWO_PI
    measure = k1 * k1 * k2 * k2 * jac * weight * (config.length_um / TWO_PI) / TWO_PI**5
    values = config.calibration * common * ff * measure
    flags = np.where(hole, FLAG_HOLE, np.where(forbidden, FLAG_FORBIDDEN, FLAG_OK))
    values = np.where(flags == FLAG_OK, values, 0.0)
    values = np.where(np.isfinite(values), values, 0.0)
    return values, flags


def collinear_grid(
    config: EmissionConfig,
    lambda1_range: tuple[float, float],
    lambda2_range: tuple[float, float],
    resolution: int | tuple[int, int] = 121,
) -> PairDensityGrid:
    """Pair density sampled on a log-spaced (lambda1, lambda2) grid.

    Deterministic: cells are evaluated in one vectorized pass and reductions
    are taken in fixed index order.
    """
    if min(lambda1_range) <= 0.0 or min(lambda2_range) <= 0.0:
        raise ValueError("wavelength ranges must be positive")
    n1, n2 = (resolution, resolution) if np.isscalar(resolution) else resolution
    lam1 = np.geomspace(lambda1_range[0], lambda1_range[1], n1)
    lam2 = np.geomspace(lambda2_range[0], lambda2_range[1], n2)
    values, flags = _grid_fields(config, lam1[:, None], lam2[None, :])
    return PairDensityGrid(
        lambda1_um=lam1,
        lambda2_um=lam2,
        values=values,
        flags=flags,
        theta1=0.0,
        theta2_nominal=math.pi,
        config=config,
    )
