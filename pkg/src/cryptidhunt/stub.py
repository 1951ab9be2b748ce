"""Deterministic stub backend for GPU-free runs and tests.

stub_generate emits a tiny valid grayscale PNG whose pixel payload
carries (cluster_id, noise_sigma, per-job noise key); stub_embed reads
the payload back and synthesizes an embedding around a per-cluster
pseudo-orthogonal basis vector:

    vector = normalize(basis(cluster_id) + noise_sigma * gaussian(job stream))

With noise_sigma = 0 all images of a cluster embed identically; large
sigma scatters a tag into the shared diffuse cloud.  The whole pipeline
is a pure function of (job_id, master_seed, concept_map).
"""

from __future__ import annotations

import hashlib
import json
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._rng import HashStream
from .backend import ProtocolError

STUB_BACKEND_ID = "stub-v1"
STUB_MAGIC = b"STUB"
STUB_VERSION = 1

_PNG_SIG = b"\x89PNG\r\n\x1a\n"
_SIDE = 16  # 16x16 grayscale: 256 payload bytes


@dataclass(frozen=True)
class StubConcept:
    tag: str
    cluster_id: int
    noise_sigma: float

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")


DEFAULT_DIFFUSE = StubConcept(tag="*", cluster_id=-1, noise_sigma=1.5)


def load_concept_map(path):
    """Concept map JSON: {"default": {...}, "concepts": [{tag, cluster_id, noise_sigma}]}."""
    doc = json.loads(Path(path).read_text("utf-8"))
    default = DEFAULT_DIFFUSE
    if "default" in doc:
        d = doc["default"]
        default = StubConcept("*", int(d.get("cluster_id", -1)), float(d.get("noise_sigma", 1.5)))
    concepts = {}
    for entry in doc.get("concepts", []):
        c = StubConcept(entry["tag"], int(entry["cluster_id"]), float(entry["noise_sigma"]))
        concepts[c.tag] = c
    return concepts, default


def _png_chunk(kind, payload):
    return (
        struct.pack(">I", len(payload))
        + kind
        + payload
        + struct.pack(">I", zlib.crc32(kind + payload) & 0xFFFFFFFF)
    )


def _encode_png(pixels: bytes) -> bytes:
    """Grayscale 8-bit PNG of the fixed stub geometry."""
    assert len(pixels) == _SIDE * _SIDE
    ihdr = struct.pack(">IIBBBBB", _SIDE, _SIDE, 8, 0, 0, 0, 0)
    raw = b"".join(b"\x00" + pixels[r * _SIDE : (r + 1) * _SIDE] for r in range(_SIDE))
    idat = zlib.compress(raw, 9)
    return _PNG_SIG + _png_chunk(b"IHDR", ihdr) + _png_chunk(b"IDAT", idat) + _png_chunk(b"IEND", b"")


def _decode_png(data: bytes) -> bytes:
    if not data.startswith(_PNG_SIG):
        raise ProtocolError("not a PNG")
    pos = len(_PNG_SIG)
    idat = b""
    width = height = None
    while pos + 8 <= len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        kind = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        if kind == b"IHDR":
            width, height, depth, color = struct.unpack(">IIBB", payload[:10])
            if (width, height, depth, color) != (_SIDE, _SIDE, 8, 0):
                raise ProtocolError("unexpected stub image geometry")
        elif kind == b"IDAT":
            idat += payload
        elif kind == b"IEND":
            break
        pos += 12 + length
    if width is None:
        raise ProtocolError("missing IHDR")
    raw = zlib.decompress(idat)
    rows = []
    stride = _SIDE + 1
    for r in range(_SIDE):
        row = raw[r * stride : (r + 1) * stride]
        if row[0] != 0:
            raise ProtocolError("unexpected PNG filter in stub image")
        rows.append(row[1:])
    return b"".join(rows)


def stub_generate(job, concept_map=None, master_seed: int = 0) -> bytes:
    """Deterministic stub image bytes for one job."""
    concept = (concept_map or {}).get(job.tag, DEFAULT_DIFFUSE)
    noise_key = hashlib.sha256(f"{job.job_id}|{master_seed}".encode("utf-8")).digest()[:16]
    payload = (
        STUB_MAGIC
        + struct.pack("<B", STUB_VERSION)
        + struct.pack("<i", concept.cluster_id)
        + struct.pack("<f", concept.noise_sigma)
        + noise_key
    )
    pixels = payload + bytes(_SIDE * _SIDE - len(payload))
    return _encode_png(pixels)


def _parse_stub_payload(image_bytes):
    pixels = _decode_png(image_bytes)
    if pixels[:4] != STUB_MAGIC:
        raise ProtocolError("stub payload magic missing")
    version = pixels[4]
    if version != STUB_VERSION:
        raise ProtocolError(f"unsupported stub payload version {version}")
    (cluster_id,) = struct.unpack("<i", pixels[5:9])
    (sigma,) = struct.unpack("<f", pixels[9:13])
    noise_key = pixels[13:29]
    return cluster_id, sigma, noise_key


def cluster_basis(cluster_id: int, dim: int) -> np.ndarray:
    """Deterministic pseudo-orthogonal unit vector for a cluster."""
    v = HashStream("basis", cluster_id, dim).normals(dim)
    return v / np.linalg.norm(v)


def stub_embed(image_bytes: bytes, modality: str, master_seed: int = 0) -> dict:
    """Embed stub bytes; returns the wire-shaped {vector, face_detected, model_id}.

    The stub bytes are self-describing (the noise key already binds
    job_id and master_seed at generation time).
    """
    from .store import MODALITY_DIMS  # local import; store depends on planner only

    if modality not in MODALITY_DIMS:
        raise ProtocolError(f"unknown modality {modality!r}")
    dim = MODALITY_DIMS[modality]
    cluster_id, sigma, noise_key = _parse_stub_payload(image_bytes)
    base = cluster_basis(cluster_id, dim)
    noise = HashStream("noise", noise_key.hex(), modality).normals(dim)
    v = base + sigma * noise
    v = v / np.linalg.norm(v)
    return {
        "vector": v.astype(np.float32),
        "face_detected": True,
        "model_id": f"{STUB_BACKEND_ID}:{modality}",
    }


class StubBackend:
    """Backend double exposing the same generate/embed surface as HTTP."""

    def __init__(self, concept_map=None, master_seed: int = 0, default=DEFAULT_DIFFUSE,
                 max_in_flight: int = 4):
        self.concept_map = dict(concept_map or {})
        self.default = default
        self.master_seed = master_seed
        self.max_in_flight = max_in_flight
        self.backend_id = STUB_BACKEND_ID

    def _concept_for(self, tag):
        return self.concept_map.get(tag, self.default)

    def generate(self, job):
        concepts = {job.tag: self._concept_for(job.tag)}
        return stub_generate(job, concepts, self.master_seed), self.backend_id

    def embed(self, image_bytes, modality):
        return stub_embed(image_bytes, modality, self.master_seed)
