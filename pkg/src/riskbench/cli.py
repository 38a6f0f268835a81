"""Operator command line: aggregate, fit, forecast, simulate, benchmark, serve.

Exit codes: 0 ok, 1 internal failure, 2 invalid input. Failures emit a
machine-readable JSON object on stderr. Forecasting commands work on
local files only; nothing leaves the machine unless `serve` is started,
and that binds loopback by default.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import aggregation, forecast as fc, gapindex, simulation
from .aggregation import (
    AggregationError,
    AggregationSession,
    decode_share_message,
    encode_share_message,
    participant_wire_tag,
    post_process,
    report_from_json,
    report_to_json,
    session_wire_tag,
    share_vector,
)
from .catalog import MaturityLevel
from .config import ConfigError, SectorConfig
from .forecast import (
    baseline_from_json,
    baseline_to_json,
    build_baseline,
    firm_forecast,
    forecast_to_json,
    posture_comparison,
    render_forecast_text,
    risk_curve_csv,
    risk_curve_table,
)
from .gapindex import build_model, model_from_json, model_to_json
from .money import format_usd, format_usd_pretty
from .service import ServiceState, build_server
from .simulation import histogram, histogram_csv, lec_csv, lec_from_samples, lec_query, sample_losses
from .submission import (
    EncodingParams,
    ParticipantSubmission,
    VectorLayout,
    canonical_bytes,
    encode_submission_vector,
    submission_from_json,
    validate_submission,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2


def _fail(kind: str, message: str, *, detail: dict | None = None, code: int = EXIT_INVALID) -> int:
    doc = {"error": {"type": kind, "message": message}}
    if detail:
        doc["error"]["detail"] = detail
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    return code


def _load_config(args) -> SectorConfig:
    if getattr(args, "config", None):
        return SectorConfig.load(args.config)
    return SectorConfig.default()


def _expand_submission_paths(inputs: list[str]) -> list[Path]:
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.json")))
        else:
            paths.append(p)
    return paths


def _read_submissions(paths: list[Path], config: SectorConfig) -> list[tuple[Path, ParticipantSubmission]]:
    """Parse and validate every file; raises _SubmissionRejected on failure."""
    out = []
    for path in paths:
        try:
            sub = submission_from_json(path.read_text())
        except (OSError, ValueError) as exc:
            raise _SubmissionRejected(path, [f"Unreadable: {exc}"]) from exc
        result = validate_submission(
            sub, config.catalog, loss_threshold_cents=config.loss_threshold_cents
        )
        if not result.ok:
            raise _SubmissionRejected(path, [str(v) for v in result.violations])
        out.append((path, sub))
    return out


class _SubmissionRejected(Exception):
    def __init__(self, path: Path, reasons: list[str]):
        self.path = path
        self.reasons = reasons
        super().__init__(f"{path}: {'; '.join(reasons)}")


def _session_id(submissions: list[ParticipantSubmission]) -> str:
    digests = sorted(hashlib.sha256(canonical_bytes(s)).digest() for s in submissions)
    return hashlib.sha256(b"".join(digests)).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_aggregate(args) -> int:
    config = _load_config(args)
    paths = _expand_submission_paths(args.submissions)
    if not paths:
        return _fail("NoSubmissions", "no submission files given")
    try:
        submissions = _read_submissions(paths, config)
    except _SubmissionRejected as exc:
        return _fail(
            "InvalidSubmission",
            f"rejected {exc.path}: session aborted",
            detail={"file": str(exc.path), "violations": exc.reasons},
        )

    if len(submissions) < config.min_participants:
        return _fail(
            "BelowReleaseThreshold",
            f"{len(submissions)} valid submissions, need at least "
            f"{config.min_participants} to release an aggregate",
        )
    ids = [sub.participant_id for _, sub in submissions]
    if len(set(ids)) != len(ids):
        return _fail("DuplicateParticipant", "two submissions share a participant id")

    layout = VectorLayout(config.catalog, config.bands)
    params = EncodingParams.for_layout(layout, aggregator_count=2)
    session_id = _session_id([sub for _, sub in submissions])
    session = AggregationSession(
        session_id, params, ids, min_participants=config.min_participants
    )
    rng = np.random.default_rng(config.share_seed)

    tag_to_id = {participant_wire_tag(pid): pid for pid in ids}
    wire_session = session_wire_tag(session_id)
    for _, sub in submissions:
        vector = encode_submission_vector(
            sub,
            config.catalog,
            config.bands,
            band_mode=config.band_mode,
            loss_threshold_cents=config.loss_threshold_cents,
        )
        for share in share_vector(vector, params.aggregator_count, rng, sub.participant_id):
            # Round-trip the wire frame an aggregator node would receive.
            frame = encode_share_message(
                wire_session,
                participant_wire_tag(share.participant_id),
                share.aggregator_index,
                share.entries,
            )
            message, _ = decode_share_message(frame)
            session.aggregate_shares(
                aggregation.ShareVector(
                    participant_id=tag_to_id[message.participant_tag],
                    aggregator_index=message.aggregator_index,
                    entries=message.entries,
                )
            )
    session.seal()
    raw = session.decode_aggregate()
    report = post_process(
        raw, len(submissions), config.catalog, config.bands, session_id=session_id
    )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.json"
    report_path.write_text(report_to_json(report, config.catalog))

    print(
        f"aggregated {report.participant_count} submissions: "
        f"incidents={report.incident_count} "
        f"total_loss_usd={format_usd(report.total_loss_cents)} "
        f"overall_avg_maturity={report.overall_avg_maturity:.4f}"
    )
    print(f"report written to {report_path}")
    return EXIT_OK


def cmd_fit(args) -> int:
    config = _load_config(args)
    report = report_from_json(Path(args.report).read_text())
    model = build_model(
        report,
        config.catalog,
        requested_split=config.group_split,
        anchors=config.anchors,
        deviation_bounds=config.deviation_bounds,
        ratio_cap=config.ratio_cap,
    )
    baseline = build_baseline(report, config.window_years)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_path = out_dir / "model.json"
    baseline_path = out_dir / "baseline.json"
    model_path.write_text(model_to_json(model))
    baseline_path.write_text(baseline_to_json(baseline))

    print(f"{'control':8} {'name':34} {'attributed':>12} {'weight':>7}")
    for code, name in model.catalog.controls:
        loss = report.per_control_loss_cents[code]
        print(
            f"{code:8} {name:34} {format_usd_pretty(loss):>12} "
            f"{model.weights.weights[code]:7.1%}"
        )
    if model.no_loss_baseline:
        print("no attributed losses: equal weights, multiplier pinned to 1")
    else:
        print(f"fitted exponent: {model.exponent:.4f}")
    print(
        f"baseline: rate={baseline.incidents_per_firm_year:g}/firm-year "
        f"mean_loss={format_usd_pretty(baseline.mean_loss_cents)} "
        f"annual_risk={format_usd_pretty(baseline.annual_risk_cents)}"
    )
    print(f"model written to {model_path}")
    print(f"baseline written to {baseline_path}")
    return EXIT_OK


def _load_own_maturities(path: Path, model: gapindex.GapIndexModel) -> dict:
    doc = json.loads(path.read_text())
    raw = doc.get("maturities")
    if not isinstance(raw, dict):
        raise ValueError("own-posture file must carry a 'maturities' object")
    missing = sorted(c for c in model.catalog.codes if c not in raw)
    if missing:
        raise ValueError(f"missing maturity rating for controls: {', '.join(missing)}")
    unknown = sorted(c for c in raw if c not in model.catalog)
    if unknown:
        raise ValueError(f"ratings for unknown controls: {', '.join(unknown)}")
    parsed = {}
    for code, value in raw.items():
        if isinstance(value, str):
            parsed[code] = MaturityLevel.from_label(value)
        else:
            parsed[code] = float(value)
    return parsed


def cmd_forecast(args) -> int:
    model = model_from_json(Path(args.model).read_text())
    baseline = baseline_from_json(Path(args.baseline).read_text())
    own = _load_own_maturities(Path(args.own), model)

    forecast = firm_forecast(own, model, baseline)
    comparison = posture_comparison(own, None, model)

    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "forecast.json").write_text(forecast_to_json(forecast, comparison))
        if args.grid:
            grid = [float(v) for v in args.grid.split(",")]
            rows = risk_curve_table(model, baseline, grid)
            (out_dir / "risk_curve.csv").write_text(risk_curve_csv(rows))
    if args.format == "json":
        print(forecast_to_json(forecast, comparison), end="")
    else:
        print(render_forecast_text(forecast, comparison), end="")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _load_config(args)
    seed = args.seed if args.seed is not None else config.sim_seed
    result = sample_losses(config.mixture, config.sim_n, seed)
    bins = histogram(result)
    curve = lec_from_samples(result)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "histogram.csv").write_text(histogram_csv(bins))
    headline = lec_query(curve, [1_000_000, 50_000_000, 100_000_000])
    (out_dir / "lec.csv").write_text(lec_csv(headline))
    if args.samples:
        lines = ["loss_usd"] + [format_usd(int(v)) for v in result.samples]
        (out_dir / "samples.csv").write_text("\n".join(lines) + "\n")

    for threshold, prob in headline:
        print(f"p(loss > {format_usd_pretty(threshold)}) = {prob:.4f}")
    print(f"histogram and exceedance curve written to {out_dir}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    code = cmd_aggregate(args)
    if code != EXIT_OK:
        return code
    fit_args = argparse.Namespace(
        config=args.config, report=str(Path(args.out) / "report.json"), out=args.out
    )
    code = cmd_fit(fit_args)
    if code != EXIT_OK:
        return code
    sim_args = argparse.Namespace(config=args.config, out=args.out, seed=None, samples=False)
    return cmd_simulate(sim_args)


def cmd_serve(args) -> int:
    config = _load_config(args)
    model = model_from_json(Path(args.model).read_text())
    baseline = baseline_from_json(Path(args.baseline).read_text())
    result = sample_losses(config.mixture, config.sim_n, config.sim_seed)
    ui_root = Path(args.ui) if args.ui else None
    if ui_root is not None and not ui_root.is_dir():
        return _fail("FileNotFound", f"UI directory does not exist: {ui_root}")
    state = ServiceState(
        model=model, baseline=baseline, curve=lec_from_samples(result), ui_root=ui_root
    )
    server = build_server(state, host=args.host, port=args.port)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port} (ctrl-c to stop)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskbench",
        description="Sectoral cyber-risk benchmarking over privacy-preserving peer aggregates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("aggregate", help="run a secure-sum session over submission files")
    p.add_argument("submissions", nargs="+", help="submission files or directories")
    p.add_argument("--config", help="sector config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("fit", help="fit the sector gap model from an aggregate report")
    p.add_argument("--config", help="sector config JSON")
    p.add_argument("--report", required=True, help="aggregate report JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("forecast", help="firm-private risk forecast (offline)")
    p.add_argument("--model", required=True, help="gap model JSON")
    p.add_argument("--baseline", required=True, help="peer baseline JSON")
    p.add_argument("--own", required=True, help="own submission or maturities JSON")
    p.add_argument("--out", help="output directory (writes forecast.json)")
    p.add_argument("--grid", help="comma-separated deviations for risk_curve.csv")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("simulate", help="loss mixture Monte Carlo and exceedance curve")
    p.add_argument("--config", help="sector config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--samples", action="store_true", help="also write samples.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("benchmark", help="aggregate, fit, and simulate in one run")
    p.add_argument("submissions", nargs="+", help="submission files or directories")
    p.add_argument("--config", help="sector config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("serve", help="serve the read-only dashboard API (loopback)")
    p.add_argument("--config", help="sector config JSON")
    p.add_argument("--model", required=True, help="gap model JSON")
    p.add_argument("--baseline", required=True, help="peer baseline JSON")
    p.add_argument("--ui", help="directory of static dashboard assets to serve at /")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8157)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("ConfigError", str(exc))
    except (gapindex.ConstraintUnsatisfiable, gapindex.DegenerateAnchors) as exc:
        return _fail(type(exc).__name__, str(exc))
    except AggregationError as exc:
        return _fail(type(exc).__name__, str(exc))
    except FileNotFoundError as exc:
        return _fail("FileNotFound", str(exc))
    except (ValueError, KeyError) as exc:
        return _fail("InvalidInput", str(exc))
    except Exception as exc:  # pragma: no cover - last-resort guard
        return _fail("Internal", f"{type(exc).__name__}: {exc}", code=EXIT_INTERNAL)


if __name__ == "__main__":
    sys.exit(main())
