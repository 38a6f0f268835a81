"""Read-only loopback HTTP API backing the what-if dashboard.

Versioned under /v1, JSON bodies, currency as decimal strings:

    GET  /v1/baseline                 peer baseline
    GET  /v1/model                    gap model (catalog, weights, averages)
    GET  /v1/lec?thresholds=a,b,...   exceedance probabilities (USD thresholds)
    POST /v1/forecast                 {"maturities": {...}} -> forecast + comparison
    POST /v1/whatif                   {"maturities": {...}, "variants": [...]}
                                      -> forecast per variant

Privacy stance: posture data arrives only in POST bodies, is used for the
single response, and is never persisted or logged; the access log carries
method, path, and status only. All model math happens here so clients
never re-implement it.
"""

from __future__ import annotations

import json
import mimetypes
import warnings
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .catalog import MaturityLevel
from .forecast import (
    PeerBaseline,
    baseline_to_json,
    firm_forecast,
    forecast_to_json,
    posture_comparison,
)
from .gapindex import GapIndexModel, model_to_json
from .money import format_usd, parse_usd
from .simulation import LossExceedanceCurve, lec_query

__all__ = ["ServiceState", "build_server", "DEFAULT_LEC_THRESHOLDS_CENTS"]

DEFAULT_LEC_THRESHOLDS_CENTS = (1_000_000, 50_000_000, 100_000_000)  # $10k, $500k, $1m


class BadRequest(ValueError):
    pass


@dataclass(frozen=True)
class ServiceState:
    """Immutable artifacts shared by every request handler.

    ``ui_root``, when set, is a directory of static dashboard assets
    served same-origin so the browser client never needs CORS access to
    the API.
    """

    model: GapIndexModel
    baseline: PeerBaseline
    curve: LossExceedanceCurve | None = None
    ui_root: Path | None = None


def _parse_maturities(state: ServiceState, body: dict) -> dict:
    raw = body.get("maturities")
    if not isinstance(raw, dict):
        raise BadRequest("body must carry a 'maturities' object")
    catalog = state.model.catalog
    unknown = sorted(c for c in raw if c not in catalog)
    if unknown:
        raise BadRequest(f"unknown controls: {', '.join(unknown)}")
    missing = sorted(c for c in catalog.codes if c not in raw)
    if missing:
        raise BadRequest(f"missing maturity for controls: {', '.join(missing)}")
    parsed = {}
    for code, value in raw.items():
        if isinstance(value, str):
            try:
                parsed[code] = MaturityLevel.from_label(value)
            except ValueError as exc:
                raise BadRequest(str(exc)) from exc
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            if not 0.0 <= float(value) <= 1.0:
                raise BadRequest(f"maturity fraction for {code} must lie in [0, 1]")
            parsed[code] = float(value)
        else:
            raise BadRequest(f"maturity for {code} must be a level name or fraction")
    return parsed


def _forecast_payload(state: ServiceState, maturities: dict) -> dict:
    with warnings.catch_warnings():
        # Forecast warnings would echo posture-derived values into logs.
        warnings.simplefilter("ignore", RuntimeWarning)
        fc = firm_forecast(maturities, state.model, state.baseline)
        comparison = posture_comparison(maturities, None, state.model)
    return json.loads(forecast_to_json(fc, comparison))


def _handle_forecast(state: ServiceState, body: dict) -> dict:
    return _forecast_payload(state, _parse_maturities(state, body))


def _handle_whatif(state: ServiceState, body: dict) -> dict:
    base_maturities = _parse_maturities(state, body)
    variants = body.get("variants")
    if not isinstance(variants, list) or not variants:
        raise BadRequest("body must carry a non-empty 'variants' array")
    base = _forecast_payload(state, base_maturities)
    base_risk = parse_usd(base["annual_risk_usd"])

    out = []
    for i, variant in enumerate(variants):
        changes = variant.get("changes") if isinstance(variant, dict) else None
        if not isinstance(changes, list) or not changes:
            raise BadRequest(f"variant {i} must carry a non-empty 'changes' array")
        adjusted = dict(base_maturities)
        for change in changes:
            if not isinstance(change, dict):
                raise BadRequest(f"variant {i}: each change must be an object")
            code = change.get("control_id")
            if code not in state.model.catalog:
                raise BadRequest(f"variant {i}: unknown control {code!r}")
            try:
                adjusted[code] = MaturityLevel.from_label(change.get("level"))
            except ValueError as exc:
                raise BadRequest(f"variant {i}: {exc}") from exc
        if all(
            _fraction(adjusted[c]) == _fraction(base_maturities[c])
            for c in state.model.catalog.codes
        ):
            raise BadRequest(f"variant {i} does not differ from the base posture")
        forecast = _forecast_payload(state, adjusted)
        delta = parse_usd(forecast["annual_risk_usd"]) - base_risk
        out.append(
            {
                "changes": changes,
                "forecast": forecast,
                "annual_risk_delta_usd": format_usd(delta),
            }
        )
    return {"base": base, "variants": out}


def _fraction(value) -> float:
    return value.fraction if isinstance(value, MaturityLevel) else float(value)


def _handle_lec(state: ServiceState, query: dict) -> dict:
    if state.curve is None:
        raise BadRequest("no loss curve is loaded")
    raw = query.get("thresholds", [])
    if raw:
        try:
            thresholds = [parse_usd(part) for part in raw[0].split(",") if part]
        except ValueError as exc:
            raise BadRequest(f"bad threshold: {exc}") from exc
        if not thresholds:
            raise BadRequest("thresholds parameter is empty")
    else:
        thresholds = list(DEFAULT_LEC_THRESHOLDS_CENTS)
    rows = lec_query(state.curve, thresholds)
    return {
        "rows": [
            {"threshold_usd": format_usd(t), "exceedance_prob": p} for t, p in rows
        ]
    }


class _Handler(BaseHTTPRequestHandler):
    server_version = "riskbench/0.1"

    @property
    def state(self) -> ServiceState:
        return self.server.state  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):  # noqa: A003 - stdlib signature
        # Log method, path, and status only; request bodies stay private.
        import sys

        path = urlparse(self.path).path
        print(f"{self.command} {path} {args[-2] if len(args) >= 2 else ''}".strip(),
              file=sys.stderr)

    def _send(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, status: int, message: str) -> None:
        self._send(status, {"error": {"status": status, "message": message}})

    def _send_file(self, path: Path) -> None:
        body = path.read_bytes()
        content_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _try_static(self, url_path: str) -> bool:
        root = self.state.ui_root
        if root is None:
            return False
        relative = url_path.lstrip("/") or "index.html"
        candidate = (root / relative).resolve()
        try:
            candidate.relative_to(root.resolve())
        except ValueError:
            return False  # traversal outside the UI root
        if candidate.is_file():
            self._send_file(candidate)
            return True
        return False

    def do_GET(self):  # noqa: N802 - stdlib signature
        url = urlparse(self.path)
        try:
            if url.path == "/v1/baseline":
                self._send(200, json.loads(baseline_to_json(self.state.baseline)))
            elif url.path == "/v1/model":
                self._send(200, json.loads(model_to_json(self.state.model)))
            elif url.path == "/v1/lec":
                self._send(200, _handle_lec(self.state, parse_qs(url.query)))
            elif not url.path.startswith("/v1/") and self._try_static(url.path):
                pass
            else:
                self._send_error(404, f"unknown route: {url.path}")
        except BadRequest as exc:
            self._send_error(400, str(exc))
        except Exception:  # pragma: no cover - last-resort guard
            self._send_error(500, "internal error")

    def do_POST(self):  # noqa: N802 - stdlib signature
        url = urlparse(self.path)
        try:
            length = int(self.headers.get("Content-Length") or 0)
            if length <= 0 or length > 1_000_000:
                raise BadRequest("request body required (at most 1 MB)")
            try:
                body = json.loads(self.rfile.read(length))
            except json.JSONDecodeError as exc:
                raise BadRequest(f"body is not valid JSON: {exc}") from exc
            if not isinstance(body, dict):
                raise BadRequest("body must be a JSON object")

            if url.path == "/v1/forecast":
                self._send(200, _handle_forecast(self.state, body))
            elif url.path == "/v1/whatif":
                self._send(200, _handle_whatif(self.state, body))
            else:
                self._send_error(404, f"unknown route: {url.path}")
        except BadRequest as exc:
            self._send_error(400, str(exc))
        except Exception:  # pragma: no cover - last-resort guard
            self._send_error(500, "internal error")


def build_server(
    state: ServiceState, host: str = "127.0.0.1", port: int = 0
) -> ThreadingHTTPServer:
    """Create (but do not start) the HTTP server; port 0 picks a free port."""
    server = ThreadingHTTPServer((host, port), _Handler)
    server.state = state  # type: ignore[attr-defined]
    return server
