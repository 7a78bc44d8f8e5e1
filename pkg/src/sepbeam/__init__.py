"""Low-complexity Kronecker-separable beamforming for rectangular arrays.

The package designs and evaluates three linear receive beamformers for a
uniform rectangular array: the classical full-array Wiener (MMSE) filter,
an alternating separable design (TMMSE) and a one-shot sub-array design
with diagonal loading (KMMSE). A Monte Carlo harness reproduces BER,
conditioning, flop-count and beampattern studies and writes CSV/JSON
results consumed by the companion plotting tool.
"""

from ._kernels import BACKEND
from .array_model import (
    DirectionCosines,
    ManifoldSet,
    UraGeometry,
    build_manifolds,
    full_steering,
    manifold_tensor,
    subarray_steering,
)
from .beamformers import (
    AnalyticStatsProvider,
    DesignFailure,
    SampleStatsProvider,
    SeparableBeamformer,
    TmmseReport,
    apply,
    kmmse,
    kmmse_output,
    matched_separable_limit,
    mmse_direct,
    mmse_lemma,
    random_separable_init,
    tmmse,
    tmmse_stats_analytic,
    tmmse_stats_sample,
    zf_separable_limit,
)
from .kron_algebra import (
    SingularMatrixError,
    condition_number_2,
    fold,
    hermitian_solve,
    khatri_rao,
    kron,
    mode3_product,
    pseudo_inverse,
    unfold,
    vector_angle,
)
from .metrics import (
    ArrayFactorGrid,
    FlopsModel,
    array_factor,
    ber,
    condition_sweep,
    flops,
    mse_eval,
    subarray_factor,
)
from .signal_model import (
    Scenario,
    SecondOrderStats,
    SnapshotBlock,
    analytic_full_stats,
    analytic_subarray_stats,
    draw_directions,
    qpsk_demodulate,
    qpsk_modulate,
    qpsk_symbols,
    sample_full_stats,
    sample_subarray_stats,
    subarray_received,
    synthesize,
)

__version__ = "0.1.0"
