"""Resumable, content-addressed run directory.

Layout:

    run_dir/
      plan.json                 # the bound experiment plan
      manifest.jsonl            # append-only event log (single writer)
      images/<job_id>.png
      embeddings/<modality>.embx (+ .embx.json row-identity sidecar)
      reports/

The manifest is the source of truth for job status: replaying it
reconstructs exactly which jobs are done, failed, or embedded.  Files
are written temp-then-rename so readers never observe torn artifacts.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MODALITY_DIMS = {"image_clip": 768, "face": 512}
MODALITY_CODES = {"image_clip": 1, "face": 2}
_CODE_TO_MODALITY = {v: k for k, v in MODALITY_CODES.items()}

EMBX_MAGIC = b"EMBX"
EMBX_VERSION = 1
_EMBX_HEADER = struct.Struct("<4sIIIB")


class StoreError(RuntimeError):
    pass


class IntegrityError(StoreError):
    """Stored bytes do not match their recorded identity."""


@dataclass(frozen=True)
class ImageRecord:
    job_id: str
    content_hash: str
    file_path: str
    backend_id: str
    created_at: float


@dataclass
class EmbeddingRecord:
    job_id: str
    modality: str
    vector: np.ndarray | None
    face_detected: bool = True
    tag: str = ""
    seed: int = 0


def _atomic_write(path: Path, data: bytes):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class RunStore:
    """Single-writer store bound to one plan; see open_run."""

    def __init__(self, root: Path, plan):
        self.root = Path(root)
        self.plan = plan
        self.manifest_path = self.root / "manifest.jsonl"
        self.images_dir = self.root / "images"
        self.embeddings_dir = self.root / "embeddings"
        self.reports_dir = self.root / "reports"
        self.run_id = f"{plan.name}-{plan.sha256()[:8]}"
        self._lock = threading.Lock()
        self._done: dict[str, ImageRecord] = {}
        self._failed: dict[str, str] = {}
        self._embeds: dict[str, dict[str, dict]] = {m: {} for m in MODALITY_DIMS}
        self._backend_mode: str | None = None
        self._jobs = {j.job_id: j for j in plan.jobs}

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def open_run(cls, path, plan) -> "RunStore":
        """Create a fresh run directory or resume an existing one."""
        root = Path(path)
        root.mkdir(parents=True, exist_ok=True)
        store = cls(root, plan)
        for d in (store.images_dir, store.embeddings_dir, store.reports_dir):
            d.mkdir(exist_ok=True)
        plan_path = root / "plan.json"
        if store.manifest_path.exists():
            store._replay(plan)
        else:
            _atomic_write(plan_path, plan.to_json_bytes())
            store._append({
                "event": "run_opened",
                "run_id": store.run_id,
                "plan_name": plan.name,
                "plan_hash": plan.sha256(),
            })
        return store

    def _replay(self, plan):
        plan_hash = plan.sha256()
        with self.manifest_path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                ev = json.loads(line)
                kind = ev.get("event")
                if kind == "run_opened":
                    if ev.get("plan_hash") != plan_hash:
                        raise StoreError(
                            f"run directory {self.root} belongs to plan "
                            f"{ev.get('plan_hash')}, refusing to open with {plan_hash}"
                        )
                elif kind == "backend_mode":
                    self._backend_mode = ev.get("mode")
                elif kind == "job_done":
                    self._done[ev["job_id"]] = ImageRecord(
                        job_id=ev["job_id"],
                        content_hash=ev["content_hash"],
                        file_path=ev["file_path"],
                        backend_id=ev["backend_id"],
                        created_at=ev["created_at"],
                    )
                    self._failed.pop(ev["job_id"], None)
                elif kind == "job_failed":
                    if ev["job_id"] not in self._done:
                        self._failed[ev["job_id"]] = ev.get("error", "")
                elif kind == "embed_done":
                    self._embeds.setdefault(ev["modality"], {})[ev["job_id"]] = ev

    def _append(self, event: dict):
        line = json.dumps(event, sort_keys=True, separators=(",", ":")) + "\n"
        with self.manifest_path.open("a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()

    # -- generation records --------------------------------------------------

    def record_backend_mode(self, mode: str):
        with self._lock:
            if self._backend_mode is None:
                self._backend_mode = mode
                self._append({"event": "backend_mode", "mode": mode})
            elif self._backend_mode != mode:
                raise StoreError(
                    f"run was started in {self._backend_mode!r} mode; "
                    f"refusing to continue in {mode!r} mode"
                )

    def job_identity(self, job_id: str):
        job = self._jobs.get(job_id)
        if job is None:
            raise StoreError(f"job {job_id} is not part of this plan")
        return job.tag, job.seed

    def pending_jobs(self):
        return [j for j in self.plan.jobs if j.job_id not in self._done]

    def done_records(self):
        return [self._done[j.job_id] for j in self.plan.jobs if j.job_id in self._done]

    def failed_jobs(self) -> dict[str, str]:
        return dict(self._failed)

    def image_path(self, job_id: str) -> Path:
        return self.images_dir / f"{job_id}.png"

    def put_image(self, job, data: bytes, backend_id: str) -> ImageRecord:
        content_hash = hashlib.sha256(data).hexdigest()
        rel = f"images/{job.job_id}.png"
        _atomic_write(self.root / rel, data)
        record = ImageRecord(
            job_id=job.job_id,
            content_hash=content_hash,
            file_path=rel,
            backend_id=backend_id,
            created_at=time.time(),
        )
        with self._lock:
            self._done[job.job_id] = record
            self._failed.pop(job.job_id, None)
            self._append({
                "event": "job_done",
                "job_id": job.job_id,
                "tag": job.tag,
                "seed": job.seed,
                "content_hash": content_hash,
                "file_path": rel,
                "backend_id": backend_id,
                "created_at": record.created_at,
            })
        return record

    def record_failure(self, job, error: str):
        with self._lock:
            self._failed[job.job_id] = error
            self._append({
                "event": "job_failed",
                "job_id": job.job_id,
                "tag": job.tag,
                "error": error,
            })

    def image_bytes(self, job_id: str) -> bytes:
        record = self._done.get(job_id)
        if record is None:
            raise StoreError(f"no stored image for job {job_id}")
        data = (self.root / record.file_path).read_bytes()
        if hashlib.sha256(data).hexdigest() != record.content_hash:
            raise IntegrityError(f"image bytes for {job_id} do not match recorded hash")
        return data

    def image_record(self, job_id: str):
        return self._done.get(job_id)

    # -- embeddings ------------------------------------------------------------

    def embedding_events(self, modality: str):
        return list(self._embeds.get(modality, {}).values())

    def record_embed_failure(self, job_id: str, modality: str, error: str):
        with self._lock:
            self._append({
                "event": "embed_failed",
                "job_id": job_id,
                "modality": modality,
                "error": error,
            })

    def record_embedding(self, rec: EmbeddingRecord):
        with self._lock:
            if rec.job_id in self._embeds.setdefault(rec.modality, {}):
                return
            ev = {
                "event": "embed_done",
                "job_id": rec.job_id,
                "modality": rec.modality,
                "tag": rec.tag,
                "seed": rec.seed,
                "face_detected": bool(rec.face_detected),
            }
            self._embeds[rec.modality][rec.job_id] = ev
            self._append(ev)

    def embeddings_path(self, modality: str) -> Path:
        return self.embeddings_dir / f"{modality}.embx"

    def write_embeddings(self, records, modality: str) -> Path:
        """Write the row-major float32 matrix + identity sidecar for a modality.

        Rows are the records that carry vectors, ordered by (tag, seed) so
        downstream artifacts are independent of completion order.
        """
        dim = MODALITY_DIMS[modality]
        rows = [r for r in records if r.vector is not None]
        rows.sort(key=lambda r: (r.tag, r.seed, r.job_id))
        n = len(rows)
        matrix = np.zeros((n, dim), dtype=np.float32)
        identities = []
        for i, r in enumerate(rows):
            vec = np.asarray(r.vector, dtype=np.float32)
            if vec.shape != (dim,):
                raise StoreError(f"vector for {r.job_id} has shape {vec.shape}, want ({dim},)")
            matrix[i] = vec
            identities.append({"job_id": r.job_id, "tag": r.tag, "seed": r.seed})
        header = _EMBX_HEADER.pack(EMBX_MAGIC, EMBX_VERSION, n, dim, MODALITY_CODES[modality])
        path = self.embeddings_path(modality)
        _atomic_write(path, header + matrix.tobytes(order="C"))
        sidecar = json.dumps(identities, sort_keys=True, separators=(",", ":")) + "\n"
        _atomic_write(path.with_suffix(".embx.json"), sidecar.encode("utf-8"))
        return path

    def read_embeddings(self, modality_or_path):
        """Read an embedding matrix file; returns (float32 matrix, identities)."""
        if modality_or_path in MODALITY_DIMS:
            path = self.embeddings_path(modality_or_path)
        else:
            path = Path(modality_or_path)
        return read_embedding_file(path)


def read_embedding_file(path):
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise StoreError(f"cannot read embedding file {path}: {exc}") from exc
    if len(raw) < _EMBX_HEADER.size:
        raise IntegrityError(f"{path} is truncated (no header)")
    magic, version, n, dim, code = _EMBX_HEADER.unpack(raw[: _EMBX_HEADER.size])
    if magic != EMBX_MAGIC:
        raise IntegrityError(f"{path} has bad magic {magic!r}")
    if version != EMBX_VERSION:
        raise IntegrityError(f"{path} has unsupported version {version}")
    if code not in _CODE_TO_MODALITY:
        raise IntegrityError(f"{path} has unknown modality code {code}")
    payload = raw[_EMBX_HEADER.size :]
    expected = n * dim * 4
    if len(payload) != expected:
        raise IntegrityError(
            f"{path} payload is {len(payload)} bytes, header promises {expected}"
        )
    matrix = np.frombuffer(payload, dtype="<f4").reshape(n, dim).copy()
    sidecar_path = path.with_suffix(".embx.json")
    try:
        identities = json.loads(sidecar_path.read_text("utf-8"))
    except OSError as exc:
        raise IntegrityError(f"missing sidecar for {path}: {exc}") from exc
    if len(identities) != n:
        raise IntegrityError(
            f"sidecar length {len(identities)} disagrees with matrix rows {n}"
        )
    return matrix, identities
