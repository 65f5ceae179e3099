"""Numerical simulation of a macroscopic Bell test with a circular two-mode cat state."""

from .asymptotic import (Angles, DeadZone, QuadratureDensity, QuadratureGrid, asymptotic_chsh,
                         convergence_to_asymptote, quadrature_joint_density, required_alpha,
                         solve_delta0)
from .coherent import coherent_fock_amplitude, coherent_overlap, fock_amplitudes, quadrature_wavefunction
from .errors import (DegenerateDeadZone, InconsistentConfigs, NonConvergence, TruncationTooLossy)
from .joint import FockCutoff, JointNumberDistribution, joint_pmn, party_marginal
from .lhv import HiddenAssignment, all_assignments, chsh_of_assignment, mixture_bound
from .measurement import BinnedStatistics, ChshResult, bin_distribution, chsh
from .state import BranchLabels, CatStateSpec, NetworkConfig, branch_labels, norm_constant

__version__ = "0.1.0"
