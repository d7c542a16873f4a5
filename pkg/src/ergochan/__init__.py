"""Ergodic quantum channels: construction, master equations,
non-Markovianity diagnostics, divisibility analysis and ergotropy dynamics."""

from .matkernel import (BlochVector, DensityMatrix, bloch_to_density, density_to_bloch,
                        eig_hermitian, matrix_sqrt_psd, trace_distance, trace_norm)
from .channels import (ErgodicChannel, ProbabilitySchedule, apply_ergodic,
                       apply_ergodic_kraus_qubit, eval_schedule, mub_unitaries, weyl_operator)
from .lindblad import (HermitianBasis, LindbladTerm, Superoperator, extract_generator,
                       generator_ddim, generator_elementwise, generator_qubit,
                       hermitian_basis, integrate)
from .nonmarkov import (BlpResult, RhpResult, backflow_windows, blp_rate,
                        rhp_closed_qubit, rhp_rate)
from .divisibility import (LorentzForm, TMatrix, divisibility_scan,
                           infinitesimal_divisibility, lorentz_singular_values,
                           p_divisibility, t_matrix)
from .ergotropy import (ErgotropyTrace, Hamiltonian, anti_ergotropy, ergotropy,
                        ergotropy_qubit_closed, max_ergotropy_state, nm_measure,
                        passive_state, sigma_w)
from .config import RunConfig, parse_config

__version__ = "0.1.0"
