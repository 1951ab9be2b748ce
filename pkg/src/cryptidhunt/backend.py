"""Generation/embedding backend client over the pinned wire protocol.

Protocol (version 1):

* ``POST {base}/v1/generate`` with JSON
  ``{prompt, negative_prompt, seed, guidance_scale, steps, width, height,
  adapter?: {name, weight}}`` -> 200 with a PNG body and an
  ``X-Backend-Id`` response header.
* ``POST {base}/v1/embed`` as multipart/form-data with a ``request`` part
  (JSON ``{modality}``) and an ``image`` part (PNG) -> JSON
  ``{vector: [f32...], face_detected?: bool, model_id}``.

Transport errors and 5xx responses are retried with exponential backoff;
4xx is fatal for that job (a long GPU job must never be duplicated on a
request the server already rejected).  Contract violations (non-PNG body,
wrong vector dimension, missing headers) abort the whole run.
"""

from __future__ import annotations

import json
import threading
import time
from concurrent.futures import FIRST_EXCEPTION, ThreadPoolExecutor, wait
from dataclasses import dataclass, field

import numpy as np
import requests

from .store import MODALITY_DIMS, EmbeddingRecord

GENERATE_PATH = "/v1/generate"
EMBED_PATH = "/v1/embed"
_PNG_SIG = b"\x89PNG\r\n\x1a\n"

ENDPOINT_KINDS = ("generation", "image_embedding", "face_embedding")


class BackendError(RuntimeError):
    """A job-scoped backend failure (after retries, or a 4xx rejection)."""


class ProtocolError(BackendError):
    """The backend violated the wire contract; fatal for the run."""


@dataclass(frozen=True)
class BackendEndpoint:
    base_url: str
    kind: str = "generation"
    timeout: float = 120.0
    max_in_flight: int = 4

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        if self.kind not in ENDPOINT_KINDS:
            raise ValueError(f"unknown endpoint kind {self.kind!r}")


@dataclass
class RetryPolicy:
    """Initial try plus one retry per backoff entry."""

    backoff: tuple = (1.0, 4.0, 16.0)
    sleep: object = field(default=time.sleep, repr=False)


def generate_payload(job) -> dict:
    payload = {
        "prompt": job.prompt,
        "negative_prompt": job.negative_prompt,
        "seed": job.seed,
        "guidance_scale": job.guidance_scale,
        "steps": job.steps,
        "width": job.width,
        "height": job.height,
    }
    if job.adapter_weight is not None:
        payload["adapter"] = {"name": "default", "weight": job.adapter_weight}
    return payload


class HttpBackend:
    """Client for one wire-protocol endpoint."""

    mode = "live"

    def __init__(self, endpoint: BackendEndpoint, retry: RetryPolicy | None = None,
                 session=None):
        self.endpoint = endpoint
        self.retry = retry or RetryPolicy()
        self._post = (session or requests).post
        self.max_in_flight = endpoint.max_in_flight

    def _url(self, path):
        return self.endpoint.base_url.rstrip("/") + path

    def _request_with_retry(self, describe, send):
        attempts = 1 + len(self.retry.backoff)
        last = None
        for attempt in range(attempts):
            if attempt:
                self.retry.sleep(self.retry.backoff[attempt - 1])
            try:
                resp = send()
            except requests.RequestException as exc:
                last = f"transport error: {exc}"
                continue
            if 500 <= resp.status_code < 600:
                last = f"server error {resp.status_code}"
                continue
            if 400 <= resp.status_code < 500:
                raise BackendError(f"{describe}: rejected with {resp.status_code}: "
                                   f"{resp.text[:200]}")
            return resp
        raise BackendError(f"{describe}: gave up after {attempts} attempts ({last})")

    def generate(self, job):
        resp = self._request_with_retry(
            f"generate {job.job_id}",
            lambda: self._post(self._url(GENERATE_PATH), json=generate_payload(job),
                               timeout=self.endpoint.timeout),
        )
        body = resp.content
        if not body.startswith(_PNG_SIG):
            raise ProtocolError(f"generate {job.job_id}: response body is not PNG")
        backend_id = resp.headers.get("X-Backend-Id")
        if not backend_id:
            raise ProtocolError(f"generate {job.job_id}: missing X-Backend-Id header")
        return body, backend_id

    def embed(self, image_bytes: bytes, modality: str) -> dict:
        if modality not in MODALITY_DIMS:
            raise ValueError(f"unknown modality {modality!r}")
        files = {
            "request": (None, json.dumps({"modality": modality}), "application/json"),
            "image": ("image.png", image_bytes, "image/png"),
        }
        resp = self._request_with_retry(
            f"embed ({modality})",
            lambda: self._post(self._url(EMBED_PATH), files=files,
                               timeout=self.endpoint.timeout),
        )
        try:
            doc = resp.json()
        except ValueError as exc:
            raise ProtocolError(f"embed response is not JSON: {exc}") from exc
        if "model_id" not in doc:
            raise ProtocolError("embed response missing model_id")
        if doc.get("vector") is not None:
            dim = MODALITY_DIMS[modality]
            if len(doc["vector"]) != dim:
                raise ProtocolError(
                    f"embed returned {len(doc['vector'])}-d vector, want {dim}-d"
                )
        return doc


def _bounded_map(fn, items, workers):
    """Run fn over items with bounded parallelism.

    fn is expected to record recoverable per-item failures itself; any
    exception that escapes it (protocol violations, interrupts) aborts
    the map, cancelling not-yet-started work.
    """
    if not items:
        return
    workers = max(1, min(workers, len(items)))
    if workers == 1:
        for item in items:
            fn(item)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(fn, item): item for item in items}
        done, not_done = wait(futures, return_when=FIRST_EXCEPTION)
        fatal = None
        for fut in done:
            exc = fut.exception()
            if exc is not None:
                fatal = exc
                break
        if fatal is not None:
            for fut in not_done:
                fut.cancel()
            raise fatal


def run_plan(plan, backend, store, max_in_flight=None):
    """Execute every pending job of the bound plan; resumable and idempotent.

    Per-job failures (after the client's retry budget) are recorded in the
    manifest and excluded from the result; protocol violations abort.
    Returns one ImageRecord per completed job in plan order.
    """
    store.record_backend_mode(getattr(backend, "mode", "stub"))
    pending = store.pending_jobs()
    workers = max_in_flight or getattr(backend, "max_in_flight", 1)

    def one(job):
        try:
            data, backend_id = backend.generate(job)
        except ProtocolError:
            raise
        except BackendError as exc:
            store.record_failure(job, str(exc))
            return
        store.put_image(job, data, backend_id)

    _bounded_map(one, pending, workers)
    return store.done_records()


def _normalize_unit(vec):
    norm = float(np.linalg.norm(np.asarray(vec, dtype=np.float64)))
    if norm == 0.0:
        raise ProtocolError("backend returned a zero embedding vector")
    return (np.asarray(vec, dtype=np.float64) / norm).astype(np.float32)


def embed_images(records, modality, backend, store, max_in_flight=None):
    """Embed stored images; one EmbeddingRecord per input record.

    image_clip vectors are unit-normalized on ingestion.  Face records
    where the backend reports no detection carry no vector.  Previously
    embedded jobs are served from the store without backend calls.
    """
    if modality not in MODALITY_DIMS:
        raise ValueError(f"unknown modality {modality!r}")
    store.record_backend_mode(getattr(backend, "mode", "stub"))

    known_vectors = {}
    path = store.embeddings_path(modality)
    if path.exists():
        matrix, identities = store.read_embeddings(modality)
        for row, ident in zip(matrix, identities):
            known_vectors[ident["job_id"]] = row
    events = {e["job_id"]: e for e in store.embedding_events(modality)}

    out: dict[str, EmbeddingRecord] = {}
    to_embed = []
    for rec in records:
        tag, seed = store.job_identity(rec.job_id)
        if rec.job_id in known_vectors:
            out[rec.job_id] = EmbeddingRecord(
                job_id=rec.job_id, modality=modality,
                vector=known_vectors[rec.job_id],
                face_detected=True, tag=tag, seed=seed,
            )
        elif rec.job_id in events and not events[rec.job_id]["face_detected"]:
            out[rec.job_id] = EmbeddingRecord(
                job_id=rec.job_id, modality=modality, vector=None,
                face_detected=False, tag=tag, seed=seed,
            )
        else:
            to_embed.append((rec, tag, seed))

    lock = threading.Lock()

    def one(item):
        rec, tag, seed = item
        try:
            doc = backend.embed(store.image_bytes(rec.job_id), modality)
        except ProtocolError:
            raise
        except BackendError as exc:
            store.record_embed_failure(rec.job_id, modality, str(exc))
            return
        detected = bool(doc.get("face_detected", True))
        if modality == "face" and not detected:
            vector = None
        else:
            if doc.get("vector") is None:
                raise ProtocolError(f"embed {rec.job_id}: vector missing")
            vector = np.asarray(doc["vector"], dtype=np.float32)
            if modality == "image_clip":
                vector = _normalize_unit(vector)
        emb = EmbeddingRecord(
            job_id=rec.job_id, modality=modality, vector=vector,
            face_detected=detected if modality == "face" else True,
            tag=tag, seed=seed,
        )
        with lock:
            out[rec.job_id] = emb

    workers = max_in_flight or getattr(backend, "max_in_flight", 1)
    _bounded_map(one, to_embed, workers)

    results = [out[r.job_id] for r in records if r.job_id in out]
    with_vectors = [r for r in results if r.vector is not None]
    if to_embed or not path.exists():
        store.write_embeddings(with_vectors, modality)
    for r in results:
        store.record_embedding(r)
    return results
