"""Spatiotemporal Schmidt decomposition of rotationally symmetric
down-conversion states.

The reduced pipeline exploits the state's dependence on the azimuthal
difference alone: an FFT over that axis splits the problem into one
flattened matrix per orbital-angular-momentum index, each decomposed
independently, cutting the cost from a dense six-variable SVD to a stack
of four-variable ones.  A brute-force oracle certifies the reduction at
small grid sizes, and the high-gain path carries the same machinery over
to the coherent-mode decomposition of the sinh-amplified correlation
function.
"""

from .analysis import mode_width, nonseparability, sweep, theta_window_comparison
from .biphoton import (
    BiphotonTensor,
    PumpLowGain,
    boundary_ratio,
    build_wavefunction,
    marginal_intensity,
    pump_amplitude,
    pump_q_magnitude,
)
from .config import DESK, FULL_SCALE, RunConfig
from .container import load_arrays, save_arrays
from .dispersion import (
    BBO,
    CrystalConfig,
    SellmeierSet,
    central_delta_kz,
    delta_kz,
    effective_pump_index,
    extraordinary_index,
    ordinary_index,
)
from .errors import ConfigError, DomainError, InvariantError, NumericalError, StsmError
from .grid import GridSpec
from .highgain import (
    GainCalibration,
    PumpHighGain,
    build_g1,
    coherent_modes,
    gain_sweep,
    gamma,
    integrated_intensity,
    pump_envelope,
    sinhc_gain,
)
from .oracle import brute_force_K, brute_force_spectrum, gaussian_1d_oracle
from .schmidt import (
    AzimuthalKernel,
    CorrelationTensor,
    SchmidtResult,
    assemble,
    azimuthal_kernels,
    benchmark,
    decompose,
    decompose_kernel,
    g1_from_psi,
    parseval_residual,
    reconstruct,
    reconstruct_mode,
    schmidt_number_from_psi,
    schmidt_number_g1,
)

__version__ = "0.1.0"
