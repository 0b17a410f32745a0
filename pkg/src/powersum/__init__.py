"""Exact power-sum representation counting with asymptotic error analysis.

The package computes S_{k,s}(x) — the number of ordered s-tuples of
positive integers whose k-th powers sum to at most x — by three
independent exact algorithms, evaluates the two-term Gamma-coefficient
asymptotic at high precision, verifies the sawtooth/exponential-sum
machinery behind the error bound, and measures empirical error exponents
via log-log fits on dyadic-window suprema.
"""

from ._kernels import BACKEND as kernel_backend
from .asymptotics import (AsymptoticEstimate, PrecReal, area_closed_form_s2,
                          area_quadrature_s2, beta_gamma_check,
                          default_precision_bits, gamma_hp,
                          integrand_monotone_check, main_coeff, second_coeff,
                          two_term)
from .counting import (CountTable, build_table, integer_kth_root, powers_upto,
                       r_count, split_s2_table, summatory_direct,
                       summatory_direct_table, summatory_recursive,
                       summatory_recursive_table, summatory_split_s2)
from .errors import (DegenerateFitError, EnvelopeViolationError,
                     OracleMismatchError, PowersumError, PrecisionError,
                     QuadratureError, ResourceLimitError)
from .instance import Instance
from .residuals import (ExponentFit, ResidualScan, ScanRecord, fit_exponent,
                        grid_points, probe_beyond_theorem, scan,
                        second_term_benefit, window_sup)
from .sawtooth import (Block, CancellationDecomposition, ExpSumConfig,
                       SawtoothValue, VdcBound, admissible_H_exponent_range,
                       b1, b1_fourier_remainder, b2, block_partition,
                       cancellation_blocks, cancellation_sum, default_H,
                       default_nu, distance_to_nearest_integer, dyadic_blocks,
                       phase_second_derivative, sawtooth_value, t_sum,
                       vdc_bound, working_precision)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticEstimate", "Block", "CancellationDecomposition", "CountTable",
    "DegenerateFitError", "EnvelopeViolationError", "ExponentFit",
    "ExpSumConfig", "Instance", "OracleMismatchError", "PowersumError",
    "PrecReal", "PrecisionError", "QuadratureError", "ResidualScan",
    "ResourceLimitError", "SawtoothValue", "ScanRecord", "VdcBound",
    "admissible_H_exponent_range", "area_closed_form_s2",
    "area_quadrature_s2", "b1", "b1_fourier_remainder", "b2",
    "beta_gamma_check", "block_partition", "build_table",
    "cancellation_blocks", "cancellation_sum", "default_H", "default_nu",
    "default_precision_bits", "distance_to_nearest_integer", "dyadic_blocks",
    "fit_exponent", "gamma_hp", "grid_points", "integer_kth_root",
    "integrand_monotone_check", "kernel_backend", "main_coeff",
    "phase_second_derivative", "powers_upto", "probe_beyond_theorem",
    "r_count", "sawtooth_value", "scan", "second_coeff",
    "second_term_benefit", "split_s2_table", "summatory_direct",
    "summatory_direct_table", "summatory_recursive",
    "summatory_recursive_table", "summatory_split_s2", "t_sum", "two_term",
    "vdc_bound", "window_sup", "working_precision",
]
