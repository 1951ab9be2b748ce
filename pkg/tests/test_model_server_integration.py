"""Cross-language conformance: the Python client against the reference server.

Runs only when the TypeScript server has been built (server/dist) and
node is on PATH; the server-side golden-fixture conformance itself lives
in server/test (vitest).
"""

import json
import shutil
import subprocess
import time
from pathlib import Path

import pytest
import requests

from cryptidhunt.backend import BackendEndpoint, HttpBackend, RetryPolicy, embed_images, run_plan
from cryptidhunt.planner import plan_adapter_weight_sweep
from cryptidhunt.store import RunStore

SERVER_DIST = Path(__file__).parent.parent / "server" / "dist" / "index.js"

pytestmark = pytest.mark.skipif(
    shutil.which("node") is None or not SERVER_DIST.exists(),
    reason="reference server not built (cd server && npm install && npm run build)",
)


@pytest.fixture
def reference_server(tmp_path):
    config = tmp_path / "server.json"
    config.write_text(json.dumps({
        "port": 0,
        "adapters": {"default": "procedural://adapter/default"},
    }))
    proc = subprocess.Popen(
        ["node", str(SERVER_DIST), "--config", str(config)],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True,
    )
    try:
        line = proc.stdout.readline()
        info = json.loads(line)
        assert info["event"] == "listening"
        base_url = f"http://127.0.0.1:{info['port']}"
        for _ in range(50):
            try:
                requests.post(base_url + "/v1/generate", json={}, timeout=1)
                break
            except requests.RequestException:
                time.sleep(0.1)
        yield base_url
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_client_runs_plan_against_reference_server(reference_server, tmp_path):
    plan = plan_adapter_weight_sweep((0.0, 1.0), (1, 2), "portrait of a woman")
    endpoint = BackendEndpoint(base_url=reference_server, timeout=30, max_in_flight=2)
    backend = HttpBackend(endpoint, retry=RetryPolicy(backoff=(0.1, 0.1, 0.1)))
    store = RunStore.open_run(tmp_path / "run", plan)
    records = run_plan(plan, backend, store)
    assert len(records) == 4
    assert all(r.backend_id == "procedural-sd-ref-1" for r in records)

    embs = embed_images(records, "image_clip", backend, store)
    assert len(embs) == 4
    assert all(e.vector.shape == (768,) for e in embs)

    faces = embed_images(records, "face", backend, store)
    assert all(f.vector is not None and f.vector.shape == (512,) for f in faces)


def test_zero_weight_adapter_equals_no_adapter(reference_server):
    """[SECONDARY] zero-weight outputs equal no-adapter outputs, 3 seeds."""
    base = {
        "prompt": "portrait of a woman, studio photography",
        "negative_prompt": "",
        "guidance_scale": 7.5,
        "steps": 30,
        "width": 64,
        "height": 64,
    }
    for seed in (1, 2, 3):
        bare = requests.post(reference_server + "/v1/generate",
                             json={**base, "seed": seed}, timeout=30)
        zero = requests.post(
            reference_server + "/v1/generate",
            json={**base, "seed": seed, "adapter": {"name": "default", "weight": 0.0}},
            timeout=30)
        assert bare.status_code == zero.status_code == 200
        assert bare.content == zero.content
    print("\n[ACCEPTANCE] zero-weight adapter equivalence (3 seeds): PASS")


def test_unknown_adapter_404_and_malformed_400(reference_server):
    resp = requests.post(
        reference_server + "/v1/generate",
        json={"prompt": "a mushroom", "negative_prompt": "", "seed": 4,
              "guidance_scale": 7.5, "steps": 30, "width": 64, "height": 64,
              "adapter": {"name": "no-such-adapter", "weight": 1.0}},
        timeout=30)
    assert resp.status_code == 404
    resp = requests.post(
        reference_server + "/v1/generate",
        data="{not json",
        headers={"Content-Type": "application/json"},
        timeout=30)
    assert resp.status_code == 400
