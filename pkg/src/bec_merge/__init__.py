"""Merging of two independent condensates in the time-dependent two-mode model."""
from .observables import condensate_reading, density_matrix, energy, level_populations
from .propagator import EvolutionConfig, Trajectory, dense_reference_evolve, evolve_mixture, evolve_sector
from .schedule import Direction, FrozenSchedule, MergeSchedule, TrapGeometry, calibrate
from .spectrum import eigenvalues, regime_classify, spectrum_sweep
from .spin_core import SectorBasis, build_hamiltonian
from .states import MixtureState, SectorState, fock_coherent, fock_fock

__version__ = "0.1.0"
