"""Exponential-stability certificates and simulation for almost-periodic delayed networks."""

from .errors import (AssumptionError, BlowUpError, DomainError, InfeasibleError,
                     InsufficientDataError, KernelDivergenceError, ModelError,
                     SpectralConvergenceError)
from .history import HistoryFunction
from .model import (ActivationSpec, Atom, BoundsSummary, DelayKernel, Density, NetworkModel,
                    QuasiPeriodicSignal, ScanConfig, derive_bounds, eval_signal,
                    find_almost_period, from_discrete_delays, from_distributed_delays,
                    kernel_moment, signal_bounds, validate_activation, validate_assumptions)
from .certificate import (StabilityCertificate, brute_force_feasibility,
                          build_comparison_matrix, certify_at_beta, certify_lemma1,
                          check_pointwise_criterion, criterion_lhs, maximize_beta,
                          spectral_radius)
from .integrator import (SimConfig, Trajectory, history_eval, integrate, kernel_convolve, rhs,
                         truncation_bound)
from .analysis import (DecayReport, almost_period_defect, boundedness_check,
                       fit_exponential_rate, trajectory_distance, weighted_norm)

__version__ = "0.1.0"
