"""HTTP access to the service for the CLI and other thin clients.

Without a server URL the service app is driven in-process through its ASGI
interface, so no separate process is needed; with one, requests go over
the network to a running instance.
"""

from __future__ import annotations

import httpx


def make_client(server: str | None = None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)
