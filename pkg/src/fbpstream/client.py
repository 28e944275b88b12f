"""Thin HTTP client for the fbpstream service.

The CLI talks to the service exclusively through this client.  With a base
URL it uses a real HTTP connection; without one it mounts the application
in-process behind the same httpx interface, so no separate server is needed
for local runs.
"""
from __future__ import annotations

from typing import Any

import httpx


class ServiceError(Exception):
    """An error response from the service, with its machine-readable code."""

    def __init__(self, code: str, message: str, status: int) -> None:
        super().__init__(message)
        self.code = code
        self.status = status

    EXIT_CODES = {
        "configuration_error": 2,
        "argument_error": 2,
        "validation_error": 2,
        "data_error": 3,
        "query_error": 4,
        "inconsistency_error": 4,
        "not_found": 4,
    }

    @property
    def exit_code(self) -> int:
        return self.EXIT_CODES.get(self.code, 1)


class ServiceClient:
    """Typed wrapper around the service endpoints used by the CLI."""

    def __init__(self, base_url: str | None = None) -> None:
        if base_url:
            self._client: httpx.Client = httpx.Client(base_url=base_url, timeout=300.0)
        else:
            import warnings
            with warnings.catch_warnings():
                # starlette warns about its own test client on import
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient
            from .service import create_app
            self._client = TestClient(create_app())

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _call(self, method: str, url: str, payload: dict | None = None) -> Any:
        response = self._client.request(method, url, json=payload)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail")
            except ValueError:
                detail = None
            if isinstance(detail, dict) and "code" in detail:
                raise ServiceError(detail["code"], detail.get("message", ""),
                                   response.status_code)
            if response.status_code == 422:
                raise ServiceError("validation_error", str(detail), 422)
            raise ServiceError("error", response.text, response.status_code)
        return response.json()

    def create_session(self, config: dict) -> str:
        return self._call("POST", "/sessions", config)["session_id"]

    def close_session(self, session_id: str) -> None:
        self._call("DELETE", f"/sessions/{session_id}")

    def push_window(self, session_id: str, rows: list[list[float]]) -> dict:
        return self._call("POST", f"/sessions/{session_id}/windows", {"rows": rows})

    def force_snapshot(self, session_id: str) -> dict:
        return self._call("POST", f"/sessions/{session_id}/snapshots")

    def list_snapshots(self, session_id: str) -> list[int]:
        return self._call("GET", f"/sessions/{session_id}/snapshots")["taken_at"]

    def get_snapshot(self, session_id: str, taken_at: int) -> dict:
        return self._call("GET", f"/sessions/{session_id}/snapshots/{taken_at}")

    def report(self, session_id: str) -> dict:
        return self._call("GET", f"/sessions/{session_id}/report")

    def events(self, session_id: str) -> dict:
        return self._call("GET", f"/sessions/{session_id}/events")

    def summarize(self, **payload: Any) -> dict:
        return self._call("POST", "/summarize", payload)

    def render_svg(self, fbp: dict, style: dict | None = None) -> str:
        return self._call("POST", "/render/svg", {"fbp": fbp, "style": style})["svg"]
