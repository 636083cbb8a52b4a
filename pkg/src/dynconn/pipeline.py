"""End-to-end analysis: preprocessing, graphs, dynamics, states, reports.

The pipeline consumes either a combined node-by-time matrix (EEG power
columns already on the TR grid, concatenated with fMRI component columns)
or a raw EEG recording plus an fMRI matrix, in which case each configured
band is reduced to TR-gridded power, convolved with the hemodynamic
kernel, concatenated with the fMRI columns, and analyzed separately under
``<output>/<band>/``.

Every stage failure is re-raised as a :class:`PipelineError` tagged with
the stage name. All report files are plain text with full float precision
and no timestamps, so identical inputs and configuration produce
byte-identical outputs.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import io
from .dynamics import (
    METRICS,
    SIGNS,
    DynamicGraphSeries,
    WindowSpec,
    dynamic_graph_series,
    low_freq_amplitude,
    metric_series,
    temporal_variance,
)
from .eeg_power import RawEegRecord, band_power_series, hrf_convolve, hrf_kernel
from .graph import (
    GraphMetricSet,
    SignedWeightedGraph,
    graph_metrics,
    pearson_correlation_matrix,
    split_signed,
)
from .states import (
    StatePartition,
    WindowSimilarityMatrix,
    detect_states,
    state_average_graphs,
    window_similarity,
)
from .synth import SyntheticDataset
from .timeseries import (
    BAND_NAMES,
    DEFAULT_BANDS,
    BandDefinition,
    TimeSeriesMatrix,
    bandpass_filter,
    detrend_polynomial,
    regress_nuisance,
    remove_outliers,
)


class PipelineError(RuntimeError):
    """A stage failed; the message is prefixed with the stage name."""


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except Exception as err:
        raise PipelineError(f"{name}: {err}") from err


def default_bands() -> list[BandDefinition]:
    return [DEFAULT_BANDS[name] for name in BAND_NAMES]


@dataclass
class PipelineConfig:
    """Everything needed to reproduce one analysis run.

    Exactly one of ``input_matrix`` or (``raw_eeg`` and ``fmri_matrix``)
    must be set. ``detrend_order=0`` and ``outlier_z=0`` disable those
    steps; ``bandpass=False`` disables filtering.
    """

    output_dir: str
    input_matrix: str | None = None
    raw_eeg: str | None = None
    fmri_matrix: str | None = None
    nuisance: str | None = None
    labels: str | None = None
    tr_seconds: float = 2.0
    bands: list[BandDefinition] = field(default_factory=default_bands)
    hrf_duration: float = 32.0
    window: WindowSpec = field(default_factory=WindowSpec)
    detrend_order: int = 3
    outlier_z: float = 4.0
    bandpass: bool = True
    bandpass_lo: float = 0.01
    bandpass_hi: float = 0.10
    nuisance_derivatives: bool = True
    state_sign: str = "positive"
    resolution: float = 1.0
    seed: int = 0
    clustering_denominator: str = "strength"

    def __post_init__(self):
        if not self.output_dir:
            raise ValueError("output_dir is required")
        combined = self.input_matrix is not None
        two_stream = self.raw_eeg is not None and self.fmri_matrix is not None
        if combined == two_stream:
            raise ValueError(
                "set exactly one input: input_matrix, or raw_eeg plus fmri_matrix"
            )
        if not self.tr_seconds > 0:
            raise ValueError(f"tr_seconds must be positive, got {self.tr_seconds}")
        if self.state_sign not in SIGNS:
            raise ValueError(f"state_sign must be one of {SIGNS}, got {self.state_sign!r}")

    def echo(self) -> dict:
        """Flat key-value view of the configuration for the summary."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "bands":
                # Same syntax the CLI --bands flag parses.
                value = ",".join(f"{b.name}:{b.lo:g}-{b.hi:g}" for b in value)
            elif f.name == "window":
                out["config.window_length_tr"] = value.length_tr
                out["config.window_step_tr"] = value.step_tr
                continue
            elif value is None:
                value = ""
            out[f"config.{f.name}"] = value
        return out


@dataclass
class PipelineResult:
    """Everything one analysis computed, as written to the report files."""

    preprocessed: TimeSeriesMatrix
    static_graph: SignedWeightedGraph
    static_metrics: dict[str, GraphMetricSet]
    dyn: DynamicGraphSeries
    node_series: dict[tuple[str, str], np.ndarray]
    net_series: dict[tuple[str, str], np.ndarray]
    temporal_rows: list[list]
    similarity: WindowSimilarityMatrix
    partition: StatePartition
    summary: dict


def preprocess(ts: TimeSeriesMatrix, config: PipelineConfig) -> TimeSeriesMatrix:
    """Detrend, regress nuisance, despike, and bandpass per configuration."""
    with _stage("detrend"):
        if config.detrend_order:
            ts = detrend_polynomial(ts, config.detrend_order)
    with _stage("nuisance"):
        if config.nuisance:
            header, rows = io.read_table(config.nuisance)
            columns = io.numeric_columns(header, rows)
            if not columns:
                raise ValueError(f"{config.nuisance}: no numeric regressor columns")
            regressors = np.column_stack([columns[name] for name in header if name in columns])
            ts = regress_nuisance(ts, regressors, config.nuisance_derivatives)
    with _stage("outliers"):
        if config.outlier_z:
            ts = remove_outliers(ts, config.outlier_z)
    with _stage("bandpass"):
        if config.bandpass:
            ts = bandpass_filter(ts, config.bandpass_lo, config.bandpass_hi)
    return ts


def build_band_matrix(
    raw: RawEegRecord, fmri: TimeSeriesMatrix, band: BandDefinition, config: PipelineConfig
) -> TimeSeriesMatrix:
    """EEG band power on the TR grid, HRF-convolved, joined with fMRI columns."""
    with _stage(f"bandpower[{band.name}]"):
        power = band_power_series(raw, band, config.tr_seconds)
        kernel = hrf_kernel(config.tr_seconds, config.hrf_duration)
        power = hrf_convolve(power, kernel)
    with _stage(f"concat[{band.name}]"):
        if power.n_samples != fmri.n_samples:
            raise ValueError(
                f"EEG power has {power.n_samples} TRs but the fMRI matrix has "
                f"{fmri.n_samples}"
            )
        if abs(power.dt - fmri.dt) > 1e-9 * max(power.dt, fmri.dt):
            raise ValueError(
                f"TR mismatch: EEG power dt={power.dt}, fMRI dt={fmri.dt}"
            )
        return TimeSeriesMatrix(
            np.hstack([power.values, fmri.values]),
            power.labels + fmri.labels,
            power.modalities + fmri.modalities,
            power.dt,
        )


def analyze_matrix(ts: TimeSeriesMatrix, config: PipelineConfig, out_dir: Path) -> PipelineResult:
    """Run the full single-matrix analysis chain and write its report."""
    clean = preprocess(ts, config)

    with _stage("static_graph"):
        static_graph = split_signed(pearson_correlation_matrix(clean))
        static_metrics = {
            sign: graph_metrics(static_graph.weights(sign), config.clustering_denominator)
            for sign in SIGNS
        }

    with _stage("dynamic_graphs"):
        dyn = dynamic_graph_series(clean, config.window)
        node_series, net_series = {}, {}
        for metric in METRICS:
            for sign in SIGNS:
                node_series[(metric, sign)], net_series[(metric, sign)] = metric_series(
                    dyn, metric, sign
                )

    with _stage("temporal_summary"):
        dt_eff = config.window.step_tr * clean.dt
        temporal_rows = []
        for (metric, sign), net in sorted(net_series.items()):
            series_name = f"{metric}_{sign}"
            temporal_rows.append(
                [series_name, "net", temporal_variance(net), low_freq_amplitude(net, dt_eff)]
            )
            nodes = node_series[(metric, sign)]
            for j, label in enumerate(dyn.labels):
                temporal_rows.append(
                    [
                        series_name,
                        label,
                        temporal_variance(nodes[:, j]),
                        low_freq_amplitude(nodes[:, j], dt_eff),
                    ]
                )

    with _stage("states"):
        similarity = window_similarity(dyn, config.state_sign)
        partition = detect_states(similarity, config.resolution, config.seed)
        partition.state_graphs = state_average_graphs(dyn, partition.assignment)

    summary = dict(config.echo())
    summary["data.n_samples"] = ts.n_samples
    summary["data.n_nodes"] = ts.n_nodes
    summary["data.n_eeg"] = ts.modalities.count("EEG")
    summary["data.n_fmri"] = ts.modalities.count("FMRI")
    summary["dynamic.n_windows"] = dyn.n_windows
    for sign in SIGNS:
        m = static_metrics[sign]
        summary[f"static.{sign}.cs_net"] = m.cs_net
        summary[f"static.{sign}.cc_net"] = m.cc_net
        summary[f"static.{sign}.ge_net"] = m.ge_net
    for (metric, sign), net in net_series.items():
        summary[f"dynamic_mean.{sign}.{metric}_net"] = float(net.mean())
        summary[f"temporal.{sign}.{metric}_net.variance"] = temporal_variance(net)
        summary[f"temporal.{sign}.{metric}_net.lfa"] = low_freq_amplitude(
            net, config.window.step_tr * clean.dt
        )
    summary["states.n_states"] = partition.n_states
    summary["states.modularity_q"] = partition.modularity_q
    summary["states.sign"] = config.state_sign

    result = PipelineResult(
        preprocessed=clean,
        static_graph=static_graph,
        static_metrics=static_metrics,
        dyn=dyn,
        node_series=node_series,
        net_series=net_series,
        temporal_rows=temporal_rows,
        similarity=similarity,
        partition=partition,
        summary=summary,
    )
    with _stage("report"):
        write_report(result, config, out_dir)
    return result


def write_report(result: PipelineResult, config: PipelineConfig, out_dir) -> None:
    """Emit the full report file set for one analysis."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    clean = result.preprocessed
    labels, modalities = clean.labels, clean.modalities

    io.write_timeseries(out / "preprocessed.csv", clean)

    graph_dt = 1.0  # row index stands in for time in square-matrix files
    for sign in SIGNS:
        io.write_matrix_file(
            out / f"static_graph_{sign}.csv",
            result.static_graph.weights(sign),
            labels,
            modalities,
            graph_dt,
        )

    rows = []
    for j, label in enumerate(labels):
        row = [label, modalities[j]]
        for sign in SIGNS:
            m = result.static_metrics[sign]
            row += [m.cs_node[j], m.cc_node[j], m.ge_node[j]]
        rows.append(row)
    io.write_table(
        out / "static_metrics.csv",
        ["label", "modality"]
        + [f"{metric}_{sign}" for sign in SIGNS for metric in METRICS],
        rows,
    )

    window_dt = config.window.step_tr * clean.dt
    for (metric, sign), nodes in result.node_series.items():
        io.write_matrix_file(
            out / f"dynamic_{metric}_{sign}.csv", nodes, labels, modalities, window_dt
        )
    net_header = ["window_start_s"] + [
        f"{metric}_{sign}" for sign in SIGNS for metric in METRICS
    ]
    net_rows = []
    for i, (start, _) in enumerate(result.dyn.windows):
        net_rows.append(
            [start * clean.dt]
            + [result.net_series[(metric, sign)][i] for sign in SIGNS for metric in METRICS]
        )
    io.write_table(out / "dynamic_net.csv", net_header, net_rows)

    io.write_table(
        out / "temporal_summary.csv",
        ["series", "node", "variance", "low_freq_amplitude"],
        result.temporal_rows,
    )

    m = result.dyn.n_windows
    window_labels = [f"win{i:04d}" for i in range(m)]
    io.write_matrix_file(
        out / f"similarity_{config.state_sign}.csv",
        result.similarity.s,
        window_labels,
        ["FMRI"] * m,
        window_dt,
    )

    io.write_labels_file(out / "state_assignment.txt", result.partition.assignment)
    for k, g in enumerate(result.partition.state_graphs or []):
        for sign in SIGNS:
            io.write_matrix_file(
                out / f"state_{k:02d}_{sign}.csv",
                g.weights(sign),
                labels,
                modalities,
                graph_dt,
            )

    io.write_summary(out / "summary.txt", result.summary)


def run_pipeline(config: PipelineConfig) -> dict[str, PipelineResult]:
    """Execute the configured analysis and write all reports.

    Returns the per-analysis results keyed by ``"combined"`` for a single
    matrix input, or by band name when raw EEG is supplied.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    results: dict[str, PipelineResult] = {}
    if config.input_matrix is not None:
        with _stage("read_input"):
            ts = io.read_matrix_file(config.input_matrix)
        results["combined"] = analyze_matrix(ts, config, out)
        return results

    with _stage("read_input"):
        eeg_ts = io.read_matrix_file(config.raw_eeg)
        if any(mod != "EEG" for mod in eeg_ts.modalities):
            raise ValueError(f"{config.raw_eeg}: all raw EEG columns must be tagged EEG")
        raw = RawEegRecord(eeg_ts.values, 1.0 / eeg_ts.dt, eeg_ts.labels)
        fmri = io.read_matrix_file(config.fmri_matrix)
    for band in config.bands:
        ts = build_band_matrix(raw, fmri, band, config)
        results[band.name] = analyze_matrix(ts, config, out / band.name)
    top = dict(config.echo())
    top["bands.analyzed"] = ";".join(b.name for b in config.bands)
    for band in config.bands:
        for key in ("states.n_states", "states.modularity_q"):
            top[f"band.{band.name}.{key}"] = results[band.name].summary[key]
    io.write_summary(out / "summary.txt", top)
    return results


def dataset_to_files(dataset: SyntheticDataset, out_dir) -> tuple[Path, Path]:
    """Write a synthetic dataset as a matrix file plus a labels sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    matrix_path = out / "synthetic.csv"
    labels_path = out / "synthetic_labels.txt"
    io.write_timeseries(matrix_path, dataset.ts)
    io.write_labels_file(labels_path, dataset.true_labels)
    return matrix_path, labels_path
