"""Drives the web UI's compiled state machine against a live service.

Exercises what the browser shows: zero red nodes initially, the
speed-increase change turning the stop-safety solution and its ancestors
red under a stage-2 badge, the frame-rate change offering apply, and the
refreshed all-valid tree after applying. Skipped when the TypeScript
toolchain is unavailable; the rest of the suite does not depend on the
frontend being built.
"""

from __future__ import annotations

import shutil
import subprocess
from pathlib import Path

import pytest

from safecase.server import serve_in_thread

FRONTEND = Path(__file__).resolve().parents[1] / "frontend"

pytestmark = pytest.mark.skipif(
    shutil.which("tsc") is None
    or shutil.which("node") is None
    or not FRONTEND.is_dir(),
    reason="TypeScript toolchain or frontend sources not available",
)


@pytest.fixture(scope="module")
def compiled_frontend():
    result = subprocess.run(
        ["tsc", "-p", "tsconfig.test.json"],
        cwd=FRONTEND,
        capture_output=True,
        text=True,
    )
    if result.returncode != 0:
        pytest.fail(f"frontend build failed:\n{result.stdout}{result.stderr}")
    return FRONTEND


def test_ui_flow_against_live_service(compiled_frontend, sample_case_dir):
    httpd, _ = serve_in_thread(sample_case_dir, ui_dir=str(FRONTEND))
    base = f"http://127.0.0.1:{httpd.server_address[1]}"
    try:
        # the same service hosts the static bundle
        import urllib.request

        with urllib.request.urlopen(base + "/") as response:
            assert b"safecase" in response.read()

        result = subprocess.run(
            ["node", "test/flow.mjs", base],
            cwd=compiled_frontend,
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert result.returncode == 0, (
            f"ui flow failed\nstdout:\n{result.stdout}\nstderr:\n{result.stderr}"
        )
        assert "flow: all checks passed" in result.stdout
    finally:
        httpd.shutdown()
        httpd.server_close()
