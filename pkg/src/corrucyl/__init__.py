"""Electrostatic and van der Waals lateral forces near a corrugated conducting cylinder."""

from .charge import (
    ChargeEnergyResult,
    CorrugationAxis,
    curvature_ratio,
    lateral_sum_phi,
    lateral_sum_z,
    u0_charge,
    u1_charge_generic,
    u1_charge_phi,
    u1_charge_z,
    u1_plane,
)
from .geometry import (
    ConstraintViolation,
    CorrugationProfile,
    CylinderGeometry,
    FieldPoint,
    Mode,
    PerturbativeValidityWarning,
    make_sinusoidal_phi,
    make_sinusoidal_z,
    mode_count,
)
from .numerics import ConvergenceError, ConvergenceReport, NumericsConfig
from .vdw import (
    DipoleTensor,
    ParticleOrientation,
    Regime,
    RegimeResult,
    dipole_from_orientation,
    equilibrium_position,
    kernel_integrals,
    phase_analysis,
    plane_reference,
    r_functions_phi,
    r_functions_z,
    u0_vdw,
    u1_vdw,
    u1_vdw_generic,
    xi_coefficients,
)

__version__ = "0.1.0"
