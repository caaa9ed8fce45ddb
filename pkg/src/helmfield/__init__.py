"""Zero-shot physics-informed dictionary learning for sound field reconstruction."""

from .dictionary import (Dictionary, atom_frequencies, bessel_covariance, measured_rows,
                         sample_baseline_dictionary)
from .errors import FieldFormatError, NumericError
from .grid import Grid2D, MeasurementMask, draw_mask, index_to_position, position_to_index
from .helmholtz import HelmholtzOperator, Variant, build_operator, residual, residual_norm_sq
from .learner import (LearnConfig, LearnResult, fit_coefficients, full_objective, learn,
                      reconstruct, synthesize)
from .metrics import Score, ncc, nmse_db
from .sparse import Coefficients, SparseProblem, objective, sparse_code
from .synthfield import (MeasurementSet, PressureField, add_noise, cylindrical_wave_field,
                         plane_wave_field, sample_field)

__version__ = "0.1.0"
