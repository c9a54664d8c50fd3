"""Frequent-Directions-sketched linear contextual bandits.

SOFUL and sketched linear Thompson sampling next to their exact counterparts,
with brute-force oracles for the sketch guarantees and an experiment harness.
"""

from .confidence import (
    ConfidenceConfig,
    beta_oful,
    beta_sketched,
    det_trace_rhs,
    gamma_sketched,
    leverage_bound_rhs,
    spectral_error,
    spectral_error_tail,
)
from .environments import (
    BanditStream,
    LabeledDataset,
    SyntheticEnvSpec,
    classification_to_bandit,
    ingest_csv,
    pca_project,
    synth_generate,
)
from .harness import (
    DatasetSource,
    RunConfig,
    RunOutput,
    RunResult,
    bench_scaling,
    bench_update,
    compare_pca,
    grid_search,
    play,
    read_run_csv,
    run,
)
from .oracle import (
    LemmaReport,
    check_det_trace,
    check_fd_sandwich,
    check_leverage,
    check_prop_ve,
    coverage_mc,
)
from .policies import (
    ExactRlsState,
    Policy,
    PolicyKind,
    SketchedRlsState,
    lin_ts_select,
    oful_select,
    policy_update,
    sketched_ts_select,
    soful_select,
)
from .sketch import (
    InvSqrtMode,
    SketchState,
    fd_update,
    inv_apply,
    inv_sqrt_apply,
    quad_norm,
    quad_norms,
    sketch_stream,
)

__version__ = "0.1.0"
