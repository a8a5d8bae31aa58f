"""Momentum entanglement between a resonantly scattered photon and a free atom."""

__version__ = "0.1.0"

from .params import ControlParams, GridSpec, PhysicalParams, default_grid, derive_controls  # noqa: E402
from .amplitude import (  # noqa: E402
    AmplitudeField,
    scattered_field,
    scattered_point,
    spontaneous_field,
    transmitted_field,
)
from .moments import VarianceReport, conditional_variance, ratio_R, ratio_R_asymptotic, unconditional_variance  # noqa: E402
from .schmidt import (  # noqa: E402
    SchmidtSpectrum,
    atom_modes_from_photon,
    count_peaks,
    oracle_schmidt,
    reconstruct,
    schmidt_decompose,
    schmidt_number,
)
from .analysis import FitResult, SweepTable, epc, epc_curve_fit, linear_fit, sweep  # noqa: E402

__all__ = [
    "AmplitudeField", "ControlParams", "FitResult", "GridSpec", "PhysicalParams",
    "SchmidtSpectrum", "SweepTable", "VarianceReport",
    "atom_modes_from_photon", "conditional_variance", "count_peaks", "default_grid",
    "derive_controls", "epc", "epc_curve_fit", "linear_fit", "oracle_schmidt",
    "ratio_R", "ratio_R_asymptotic", "reconstruct", "scattered_field", "scattered_point",
    "schmidt_decompose", "schmidt_number", "spontaneous_field", "sweep",
    "transmitted_field", "unconditional_variance",
]
