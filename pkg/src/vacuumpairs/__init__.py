"""Photon-pair emission from a superluminal index perturbation in a dispersive medium."""

from .dispersion import (
    C_M_S,
    C_UM_S,
    ConstantIndex,
    DispersionError,
    DispersionModel,
    GroupIndexSample,
    LorentzianResonance,
    NegativeRadicandError,
    PoleProximityError,
    SellmeierModel,
    fast_light_resonance,
    group_index,
    index_derivative,
    refractive_index,
    sample_group_index,
    omega_to_wavelength,
    wavelength_to_omega,
)
from .materials import (
    UnknownMaterialError,
    available_materials,
    get_material,
    load_material_file,
    model_from_dict,
    model_to_dict,
)
from .kinematics import (
    ConeClassification,
    KinematicsError,
    MultipleRootsWarning,
    NoSignChangeError,
    PerturbationKinematics,
    PhotonMode,
    SubluminalError,
    cerenkov_angle,
    classify_cones,
    doppler_frequency,
    pair_constraint_residual,
    solve_partner,
    wavenumber,
)
from .emission import (
    DEFAULT_CALIBRATION,
    EmissionConfig,
    EmissionError,
    GaussianProfile,
    PairDensityGrid,
    TanhProfile,
    collinear_grid,
    config_from_dict,
    config_to_dict,
    density_gaussian,
    density_nondispersive,
    density_tanh,
)
from .analysis import (
    FAST_LIGHT_AMPLITUDE,
    FAST_LIGHT_WIDTH_UM,
    EmissionMaximum,
    FastLightStudy,
    NoEmissionError,
    QuadratureNotConvergedError,
    SweepResult,
    TotalCount,
    beta_sweep,
    constraint_density,
    correlation_curve,
    count_peaks,
    fast_light_study,
    find_maximum,
    total_count,
)

__version__ = "0.1.0"
