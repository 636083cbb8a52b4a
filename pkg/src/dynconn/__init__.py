"""Static and dynamic multimodal connectivity graph analysis.

Builds signed weighted graphs from correlation matrices of concurrent
EEG-power and fMRI-component time courses, computes strength, clustering,
and efficiency at node and graph level, tracks them through a sliding
window, and groups windows into connectivity states by modularity
maximization over their node-strength similarity.
"""

from .dynamics import (
    DynamicGraphSeries,
    WindowSpec,
    dynamic_graph_series,
    low_freq_amplitude,
    make_windows,
    metric_series,
    temporal_variance,
)
from .eeg_power import (
    HrfKernel,
    RawEegRecord,
    band_power_series,
    hrf_convolve,
    hrf_kernel,
)
from .graph import (
    CorrelationMatrix,
    GraphMetricSet,
    SignedWeightedGraph,
    clustering_coefficient,
    connectivity_strength,
    global_efficiency,
    graph_metrics,
    pearson_correlation_matrix,
    split_signed,
)
from .pipeline import PipelineConfig, PipelineError, PipelineResult, run_pipeline
from .states import (
    StatePartition,
    WindowSimilarityMatrix,
    detect_states,
    modularity_score,
    state_average_graphs,
    window_similarity,
)
from .stats import PairedSamples, TTestResult, paired_ttest
from .synth import StateTemplate, SyntheticDataset, block_template, generate_dataset
from .timeseries import (
    DEFAULT_BANDS,
    BandDefinition,
    TimeSeriesMatrix,
    bandpass_filter,
    detrend_polynomial,
    regress_nuisance,
    remove_outliers,
)

__version__ = "0.1.0"
