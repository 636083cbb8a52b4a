"""Command-line front end.

Subcommands read and write the common file formats so stages compose
through files: ``synth`` makes ground-truth fixtures, ``preprocess`` /
``bandpower`` / ``static`` / ``dynamic`` / ``states`` run one stage each,
``ttest`` compares paired condition tables, and ``run`` executes the whole
pipeline. ``--config FILE`` loads ``key = value`` defaults with the same
names as the long flags; explicit flags win.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .dynamics import (
    METRICS,
    SIGNS,
    WindowSpec,
    dynamic_graph_series,
    low_freq_amplitude,
    metric_series,
    temporal_variance,
)
from .eeg_power import RawEegRecord, band_power_series, hrf_convolve, hrf_kernel
from .graph import graph_metrics, pearson_correlation_matrix, split_signed
from .pipeline import PipelineConfig, PipelineError, dataset_to_files, run_pipeline
from .states import detect_states, state_average_graphs, window_similarity
from .stats import PairedSamples, paired_ttest
from .synth import StateTemplate, generate_dataset
from .timeseries import (
    BAND_NAMES,
    DEFAULT_BANDS,
    BandDefinition,
    bandpass_filter,
    detrend_polynomial,
    regress_nuisance,
    remove_outliers,
)


def parse_bands(spec: str) -> list[BandDefinition]:
    """Comma-separated band names, optionally with custom edges (name:lo-hi)."""
    bands = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        name, sep, edges = token.partition(":")
        if sep:
            lo, _, hi = edges.partition("-")
            bands.append(BandDefinition(name, float(lo), float(hi)))
        elif name in DEFAULT_BANDS:
            bands.append(DEFAULT_BANDS[name])
        else:
            raise argparse.ArgumentTypeError(
                f"unknown band {name!r}; use one of {BAND_NAMES} or name:lo-hi"
            )
    if not bands:
        raise argparse.ArgumentTypeError("no bands given")
    return bands


def _preprocessing_args(parser):
    parser.add_argument("--detrend-order", type=int, default=3,
                        help="polynomial detrend order 1-3, 0 disables (default 3)")
    parser.add_argument("--outlier-z", type=float, default=4.0,
                        help="robust z threshold for despiking, 0 disables (default 4)")
    parser.add_argument("--bandpass", default=True, action=argparse.BooleanOptionalAction,
                        help="zero-phase bandpass of every column (default on)")
    parser.add_argument("--bandpass-lo", type=float, default=0.01)
    parser.add_argument("--bandpass-hi", type=float, default=0.10)
    parser.add_argument("--regressors", "--nuisance", dest="regressors", default=None,
                        help="CSV table of nuisance regressors to residualize against")
    parser.add_argument("--nuisance-derivatives", default=True,
                        action=argparse.BooleanOptionalAction,
                        help="extend the nuisance design with first differences")


def _window_args(parser):
    parser.add_argument("--window-length", "--window-length-tr", dest="window_length",
                        type=int, default=20, help="window width in TRs")
    parser.add_argument("--window-step", "--window-step-tr", dest="window_step",
                        type=int, default=1, help="window step in TRs")


def _state_args(parser, seed_required):
    parser.add_argument("--sign", "--state-sign", dest="sign", choices=SIGNS,
                        default="positive", help="weight matrix used for state detection")
    parser.add_argument("--resolution", type=float, default=1.0)
    parser.add_argument("--seed", type=int, required=seed_required,
                        default=None if seed_required else 0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynconn",
        description="Static and dynamic multimodal connectivity graph analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset with planted states")
    p.add_argument("--config", default=None)
    p.add_argument("--n-eeg", type=int, default=6)
    p.add_argument("--n-fmri", type=int, default=14)
    p.add_argument("--n-states", type=int, default=2)
    p.add_argument("--strong", type=float, default=0.7,
                   help="within-block correlation of each state's strong block")
    p.add_argument("--weak", type=float, default=0.2,
                   help="within-block correlation of the remaining blocks")
    p.add_argument("--between", type=float, default=0.0)
    p.add_argument("--dwell", default="500,500",
                   help="comma-separated dwell lengths, cycling through the states")
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--tr", type=float, default=2.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("preprocess", help="detrend, despike, regress, and bandpass a matrix")
    p.add_argument("--config", default=None)
    p.add_argument("--input", required=True)
    _preprocessing_args(p)
    p.add_argument("--out", required=True, help="output matrix file")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("bandpower", help="per-band EEG power on the TR grid, HRF-convolved")
    p.add_argument("--config", default=None)
    p.add_argument("--input", required=True, help="raw EEG matrix file (modality EEG)")
    p.add_argument("--bands", type=parse_bands, default=parse_bands(",".join(BAND_NAMES)))
    p.add_argument("--tr", type=float, default=2.0)
    p.add_argument("--hrf-duration", type=float, default=32.0)
    p.add_argument("--hrf", default=True, action=argparse.BooleanOptionalAction,
                   help="convolve the power series with the hemodynamic kernel")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_bandpower)

    p = sub.add_parser("static", help="static signed graph and its metrics")
    p.add_argument("--config", default=None)
    p.add_argument("--input", required=True)
    p.add_argument("--clustering-denominator", choices=("strength", "degree"),
                   default="strength")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_static)

    p = sub.add_parser("dynamic", help="sliding-window metric series and temporal summaries")
    p.add_argument("--config", default=None)
    p.add_argument("--input", required=True)
    _window_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_dynamic)

    p = sub.add_parser("states", help="window similarity and connectivity-state detection")
    p.add_argument("--config", default=None)
    p.add_argument("--input", required=True)
    _window_args(p)
    _state_args(p, seed_required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_states)

    p = sub.add_parser("ttest", help="paired t-tests between two condition tables")
    p.add_argument("--config", default=None)
    p.add_argument("--a", required=True, help="first condition CSV table")
    p.add_argument("--b", required=True, help="second condition CSV table")
    p.add_argument("--out", required=True, help="output table file")
    p.set_defaults(func=cmd_ttest)

    p = sub.add_parser("run", help="full pipeline: preprocess, graphs, dynamics, states")
    p.add_argument("--config", default=None)
    p.add_argument("--input-matrix", default=None,
                   help="combined [EEG | fMRI] matrix on the TR grid")
    p.add_argument("--raw-eeg", default=None, help="raw EEG matrix file")
    p.add_argument("--fmri", "--fmri-matrix", dest="fmri", default=None,
                   help="fMRI component matrix file")
    p.add_argument("--labels", default=None, help="ground-truth labels sidecar (echoed)")
    p.add_argument("--bands", type=parse_bands, default=parse_bands(",".join(BAND_NAMES)))
    p.add_argument("--tr", "--tr-seconds", dest="tr", type=float, default=2.0)
    p.add_argument("--hrf-duration", type=float, default=32.0)
    _preprocessing_args(p)
    _window_args(p)
    _state_args(p, seed_required=False)
    p.add_argument("--clustering-denominator", choices=("strength", "degree"),
                   default="strength")
    p.add_argument("--out", "--output-dir", dest="out", required=True,
                   help="output directory")
    p.set_defaults(func=cmd_run)

    return parser


def _inject_config(argv: list[str]) -> list[str]:
    """Expand ``--config FILE`` into flag defaults ahead of explicit flags."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        raise SystemExit("error: --config needs a path")
    entries = io.read_summary(argv[at + 1])
    injected = []
    for key, value in entries.items():
        flag = "--" + key.replace("_", "-")
        if value.lower() == "true":
            injected.append(flag)
        elif value.lower() == "false":
            injected.append("--no-" + flag[2:])
        else:
            injected += [flag, value]
    rest = argv[:at] + argv[at + 2:]
    return rest[:1] + injected + rest[1:]


def cmd_synth(args) -> int:
    dwell_lengths = [int(v) for v in str(args.dwell).split(",") if v.strip()]
    n = args.n_eeg + args.n_fmri
    k = args.n_states
    if k < 1 or n < 2 * k:
        raise ValueError(f"need at least 2 nodes per state, got n={n}, states={k}")
    bounds = np.linspace(0, n, k + 1).astype(int)
    groups = [list(range(bounds[i], bounds[i + 1])) for i in range(k)]
    # State k strengthens its own block; states differ in strength profile,
    # which is what window similarity discriminates on.
    templates = []
    for state in range(k):
        cov = np.full((n, n), float(args.between))
        for gi, group in enumerate(groups):
            idx = np.asarray(group)
            cov[np.ix_(idx, idx)] = args.strong if gi == state else args.weak
        np.fill_diagonal(cov, 1.0)
        templates.append(StateTemplate(cov, f"state{state}"))
    dwells = [(i % k, length) for i, length in enumerate(dwell_lengths)]
    dataset = generate_dataset(
        templates, dwells, args.n_eeg, args.n_fmri, args.noise, args.seed, dt=args.tr
    )
    matrix_path, labels_path = dataset_to_files(dataset, args.out)
    io.write_summary(
        Path(args.out) / "synth_config.txt",
        {
            "n_eeg": args.n_eeg,
            "n_fmri": args.n_fmri,
            "n_states": k,
            "strong": args.strong,
            "weak": args.weak,
            "between": args.between,
            "dwell": args.dwell,
            "noise": args.noise,
            "tr": args.tr,
            "seed": args.seed,
        },
    )
    print(f"wrote {matrix_path} and {labels_path}")
    return 0


def cmd_preprocess(args) -> int:
    ts = io.read_matrix_file(args.input)
    if args.detrend_order:
        ts = detrend_polynomial(ts, args.detrend_order)
    if args.regressors:
        header, rows = io.read_table(args.regressors)
        columns = io.numeric_columns(header, rows)
        if not columns:
            raise ValueError(f"{args.regressors}: no numeric regressor columns")
        regressors = np.column_stack([columns[name] for name in header if name in columns])
        ts = regress_nuisance(ts, regressors, args.nuisance_derivatives)
    if args.outlier_z:
        ts = remove_outliers(ts, args.outlier_z)
    if args.bandpass:
        ts = bandpass_filter(ts, args.bandpass_lo, args.bandpass_hi)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    io.write_timeseries(args.out, ts)
    print(f"wrote {args.out}")
    return 0


def cmd_bandpower(args) -> int:
    eeg_ts = io.read_matrix_file(args.input)
    if any(mod != "EEG" for mod in eeg_ts.modalities):
        raise ValueError(f"{args.input}: all raw EEG columns must be tagged EEG")
    raw = RawEegRecord(eeg_ts.values, 1.0 / eeg_ts.dt, eeg_ts.labels)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kernel = hrf_kernel(args.tr, args.hrf_duration) if args.hrf else None
    for band in args.bands:
        power = band_power_series(raw, band, args.tr)
        if kernel is not None:
            power = hrf_convolve(power, kernel)
        io.write_timeseries(out / f"{band.name}.csv", power)
    print(f"wrote {len(args.bands)} band power file(s) to {out}")
    return 0


def cmd_static(args) -> int:
    ts = io.read_matrix_file(args.input)
    graph = split_signed(pearson_correlation_matrix(ts))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    rows = [[label, mod] for label, mod in zip(ts.labels, ts.modalities)]
    for sign in SIGNS:
        io.write_matrix_file(
            out / f"static_graph_{sign}.csv", graph.weights(sign),
            ts.labels, ts.modalities, 1.0,
        )
        metrics = graph_metrics(graph.weights(sign), args.clustering_denominator)
        for j in range(ts.n_nodes):
            rows[j] += [metrics.cs_node[j], metrics.cc_node[j], metrics.ge_node[j]]
        summary[f"static.{sign}.cs_net"] = metrics.cs_net
        summary[f"static.{sign}.cc_net"] = metrics.cc_net
        summary[f"static.{sign}.ge_net"] = metrics.ge_net
    io.write_table(
        out / "static_metrics.csv",
        ["label", "modality"] + [f"{m}_{s}" for s in SIGNS for m in METRICS],
        rows,
    )
    io.write_summary(out / "static_summary.txt", summary)
    print(f"wrote static graph report to {out}")
    return 0


def cmd_dynamic(args) -> int:
    ts = io.read_matrix_file(args.input)
    spec = WindowSpec(args.window_length, args.window_step)
    dyn = dynamic_graph_series(ts, spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dt_eff = spec.step_tr * ts.dt
    net_columns = {}
    temporal_rows = []
    for metric in METRICS:
        for sign in SIGNS:
            nodes, net = metric_series(dyn, metric, sign)
            io.write_matrix_file(
                out / f"dynamic_{metric}_{sign}.csv", nodes,
                ts.labels, ts.modalities, dt_eff,
            )
            net_columns[f"{metric}_{sign}"] = net
            temporal_rows.append(
                [f"{metric}_{sign}", "net",
                 temporal_variance(net), low_freq_amplitude(net, dt_eff)]
            )
            for j, label in enumerate(ts.labels):
                temporal_rows.append(
                    [f"{metric}_{sign}", label,
                     temporal_variance(nodes[:, j]),
                     low_freq_amplitude(nodes[:, j], dt_eff)]
                )
    names = sorted(net_columns)
    io.write_table(
        out / "dynamic_net.csv",
        ["window_start_s"] + names,
        [
            [start * ts.dt] + [net_columns[name][i] for name in names]
            for i, (start, _) in enumerate(dyn.windows)
        ],
    )
    io.write_table(
        out / "temporal_summary.csv",
        ["series", "node", "variance", "low_freq_amplitude"],
        temporal_rows,
    )
    io.write_summary(out / "dynamic_summary.txt", {"dynamic.n_windows": dyn.n_windows})
    print(f"wrote dynamic report ({dyn.n_windows} windows) to {out}")
    return 0


def cmd_states(args) -> int:
    ts = io.read_matrix_file(args.input)
    spec = WindowSpec(args.window_length, args.window_step)
    dyn = dynamic_graph_series(ts, spec)
    similarity = window_similarity(dyn, args.sign)
    partition = detect_states(similarity, args.resolution, args.seed)
    partition.state_graphs = state_average_graphs(dyn, partition.assignment)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    m = dyn.n_windows
    io.write_matrix_file(
        out / f"similarity_{args.sign}.csv", similarity.s,
        [f"win{i:04d}" for i in range(m)], ["FMRI"] * m, spec.step_tr * ts.dt,
    )
    io.write_labels_file(out / "state_assignment.txt", partition.assignment)
    for k, g in enumerate(partition.state_graphs):
        for sign in SIGNS:
            io.write_matrix_file(
                out / f"state_{k:02d}_{sign}.csv", g.weights(sign),
                ts.labels, ts.modalities, 1.0,
            )
    io.write_summary(
        out / "states_summary.txt",
        {
            "states.n_states": partition.n_states,
            "states.modularity_q": partition.modularity_q,
            "states.sign": args.sign,
            "states.seed": args.seed,
            "dynamic.n_windows": m,
        },
    )
    print(f"detected {partition.n_states} state(s), Q={partition.modularity_q:.6g}")
    return 0


def cmd_ttest(args) -> int:
    header_a, rows_a = io.read_table(args.a)
    header_b, rows_b = io.read_table(args.b)
    cols_a = io.numeric_columns(header_a, rows_a)
    cols_b = io.numeric_columns(header_b, rows_b)
    shared = [name for name in header_a if name in cols_a and name in cols_b]
    if not shared:
        raise ValueError("the two tables share no numeric columns")
    rows = []
    for name in shared:
        result = paired_ttest(PairedSamples(cols_a[name], cols_b[name]))
        rows.append([name, result.t, float(result.df), result.p_two_sided])
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    io.write_table(args.out, ["column", "t", "df", "p_two_sided"], rows)
    print(f"wrote paired t-table for {len(rows)} column(s) to {args.out}")
    return 0


def cmd_run(args) -> int:
    config = PipelineConfig(
        output_dir=args.out,
        input_matrix=args.input_matrix,
        raw_eeg=args.raw_eeg,
        fmri_matrix=args.fmri,
        nuisance=args.regressors,
        labels=args.labels,
        tr_seconds=args.tr,
        bands=args.bands,
        hrf_duration=args.hrf_duration,
        window=WindowSpec(args.window_length, args.window_step),
        detrend_order=args.detrend_order,
        outlier_z=args.outlier_z,
        bandpass=args.bandpass,
        bandpass_lo=args.bandpass_lo,
        bandpass_hi=args.bandpass_hi,
        nuisance_derivatives=args.nuisance_derivatives,
        state_sign=args.sign,
        resolution=args.resolution,
        seed=args.seed,
        clustering_denominator=args.clustering_denominator,
    )
    results = run_pipeline(config)
    for name, result in results.items():
        print(
            f"{name}: {result.dyn.n_windows} windows, "
            f"{result.partition.n_states} state(s), "
            f"Q={result.partition.modularity_q:.6g}"
        )
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config(argv)
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (ValueError, PipelineError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
