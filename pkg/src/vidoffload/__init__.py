"""Joint offloading, airtime and CPU allocation for video DNN inference at the edge."""

from .config import ExperimentConfig, load_config
from .core import (
    Allocation,
    AllocationEntry,
    CostBreakdown,
    DeviceProfile,
    InfeasibleAccuracyError,
    InfeasibleAllocationError,
    SystemConfig,
    device_cost,
    total_cost,
    validate,
)
from .dnn import (
    AffineComplexity,
    LayeredComplexity,
    LayerSpec,
    SaturatingAccuracy,
    TabularAccuracy,
    TabularComplexity,
    fit_affine,
    macs,
    min_frames,
)
from .experiment import generate_scenario, run_trials, sweep
from .offload import Models, SolveReport, baseline, enumerate_offload, greedy_offload
from .solvers import kkt_residuals, solve_edge, solve_local
from .wireless import ChannelParams, achievable_rate_bps, path_loss_dB, tx_delay_energy

__version__ = "0.1.0"
