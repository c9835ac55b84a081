"""Covariant integral quantization on the discrete cylinder ``Z x S^1``."""

from .core import (TWO_PI, AliasingError, AngleGrid, CircleSamples, ClassicalObservable,
                   CylqError, DivergenceError, DomainError, FourierState, NotAvailableError,
                   OperatorMatrix, PhasePoint, PreconditionError, TailMassError,
                   TruncationError, Weight, half_phase, interior_distance, reduce_angle,
                   symmetric_angle)
from .fiducials import FiducialKind, closed_kernel, make_fiducial, printed_kernel
from .gabor import (GaborTable, coherent_state, gabor_reconstruct, gabor_transform,
                    kernel_numeric, weyl_apply, weyl_matrix)
from .portrait import (NonDensityWarning, PortraitTable, autocorrelation_distribution,
                       portrait, portrait_of_operator)
from .quantize import (QuantizationContext, build_M, parity_weight, quantize,
                       transport_M, weight_from_operator, weight_from_state,
                       weight_from_table)
from .wigner import WignerTable, wigner, wigner_from_gabor, wigner_half_integer, wigner_table

__version__ = "0.1.0"

__all__ = [n for n in dir() if not n.startswith("_")]
