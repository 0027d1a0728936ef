"""Symbol-by-symbol hybrid precoding for millimeter-wave arrays.

A hybrid array with L RF chains and a switched network of Q fixed phase
shifters re-optimizes its analog and baseband precoders at every symbol so
that it emits (approximately) the signal of a fully digital array serving
K > L users.
"""

__version__ = "0.1.0"

from .array_model import (ElementPattern, UlaConfig, beampattern, element_gain, emitted_field,
                          radiated_power, steering_matrix, steering_vector)
from .errors import (BlockPrecodingError, ConfigurationError, DegenerateSelectionError,
                     DomainError, InvalidArgumentError, RankDeficiencyError, SamplingStuckError,
                     SbsError, SizeLimitError)
from .metrics import GainDecomposition, RateReport, decompose, rate_report, sidr
from .omp import (Dictionary, SbSSolution, complete_dictionary, omp_cholesky,
                  omp_cholesky_batch, omp_naive, sbs_precode_block, steering_dictionary)
from .phase_opt import (PhaseSearchState, PhaseSet, brute_force_phase_vector,
                        optimal_phase_vector, phase_search)
from .precoding import (DigitalPrecoder, StandardHybridPrecoder, build_digital, build_sbs,
                        build_standard_hybrid)
from .sim import (Scenario, ScenarioParams, SweepResult, reference_scenario,
                  run_sidr_sweep, run_sumrate_sweep, sample_scenario)
