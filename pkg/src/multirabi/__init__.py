"""Exact Rabi-oscillation dynamics of a resonantly driven n-level ladder atom."""
from ._accel import USE_NUMBA, backend_name
from .closed_form import (QuarticSpectrum4, QuinticSpectrum5, closed_eigenvalues, eigenvectors4,
                          eigenvectors5, expc, expc2, expc3, expc4, expc5, spectrum4, spectrum5)
from .errors import (AllZeroCouplings, ConvergenceFailure, DegenerateSpectrum, IndexOutOfRange,
                     ModelInvalid, NotResonant, NotUnitary, RabiError)
from .evolution import (Kernel, PropagatorOptions, TimeSeries, populations, propagator,
                        schrodinger_residual, time_series)
from .ladder import (CouplingVector, LadderModel, ResonanceReport, SymmetricTridiagonal,
                     build_hamiltonian, coupling_matrix, resonance_report, rotating_frame)
from .spectral import SpectralDecomposition, expm_series, expm_spectral, tridiag_eigen

__version__ = "0.1.0"
