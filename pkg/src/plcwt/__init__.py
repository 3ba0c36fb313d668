"""Two-dimensional polar linear canonical wavelet transform (PLCWT).

The transform analyses a complex image with rotated, dilated and
chirp-modulated copies of a mother wavelet.  An ``LctParams`` matrix selects
the chirp; ``A = 0`` gives the ordinary polar wavelet transform.
"""
from .errors import (AdmissibilityError, BandwidthError, ConfigError, DivergenceError,
                     DomainError, EmptyStack, FormatError, GridMismatch, MomentOverflow,
                     PlcwtError, ScaleError)
from .grid import ComplexField2D, GridSpec, Rotation, rotate_point
from .lct import LctParams, fourier_params, lc_convolution, lct_forward, lct_inverse
from .wavelet import (AdmissibilityConstant, GaussianMixtureWavelet, ScaleQuadrature,
                      WaveletSpec, admissibility, daughter_eval, lc_wavelet_spectrum,
                      mother_eval, mother_spectrum)
from .transform import (CoefficientVolume, ScaleAngleGrid, energy, orthogonality_inner,
                        parseval_diagnostic, plcwt_direct, plcwt_forward, plcwt_inverse,
                        pwt_forward, relative_error, spectral_factorization)
from .theorems import (InequalityReport, TheoremReport, generalized_heisenberg, heisenberg,
                       logarithmic_uncertainty, verify_convolution_theorem,
                       verify_correlation_theorem)
from .edge import EdgeConfig, EdgeMap, bundled_wheel, edge_detect, pwt_baseline

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityConstant", "AdmissibilityError", "BandwidthError", "CoefficientVolume",
    "ComplexField2D", "ConfigError", "DivergenceError", "DomainError", "EdgeConfig",
    "EdgeMap", "EmptyStack", "FormatError", "GaussianMixtureWavelet", "GridMismatch",
    "GridSpec", "InequalityReport", "LctParams", "MomentOverflow", "PlcwtError",
    "Rotation", "ScaleAngleGrid", "ScaleError", "ScaleQuadrature", "TheoremReport",
    "WaveletSpec", "admissibility", "bundled_wheel", "daughter_eval", "edge_detect",
    "energy", "fourier_params", "generalized_heisenberg", "heisenberg", "lc_convolution",
    "lc_wavelet_spectrum", "lct_forward", "lct_inverse", "logarithmic_uncertainty",
    "mother_eval", "mother_spectrum", "orthogonality_inner", "parseval_diagnostic",
    "plcwt_direct", "plcwt_forward", "plcwt_inverse", "pwt_forward", "relative_error",
    "rotate_point", "spectral_factorization", "verify_convolution_theorem",
    "verify_correlation_theorem",
]
