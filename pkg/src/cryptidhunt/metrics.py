"""Nearest-neighbor purity and pairwise-similarity summaries.

Purity@1 of a tag is the fraction of its images whose single nearest
neighbor (cosine, over the entire pooled matrix, self excluded) carries
the same tag.  The kernel normalizes rows once and works in blocked
matrix products; exact ties resolve to the lowest row index so results
are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class PurityResult:
    tag: str
    purity: float
    per_image_hits: tuple

    @property
    def n_images(self):
        return len(self.per_image_hits)


@dataclass(frozen=True)
class SimilaritySummary:
    n_images: int
    n_faces: int
    detection_rate: float
    avg_pairwise: float | None
    max_pairwise: float | None


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise MetricError(f"dimension mismatch {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise MetricError("cosine similarity is undefined for zero vectors")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def _normalized_rows(matrix):
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2:
        raise MetricError(f"expected 2-d matrix, got shape {x.shape}")
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0.0):
        raise MetricError("matrix contains zero rows")
    return x / norms[:, None]


def nearest_neighbors(matrix, block: int = 512) -> np.ndarray:
    """Index of each row's cosine nearest neighbor (self excluded)."""
    x = _normalized_rows(matrix)
    n = x.shape[0]
    if n < 2:
        raise MetricError("nearest neighbors need at least 2 rows")
    nn = np.empty(n, dtype=np.int64)
    for start in range(0, n, block):
        stop = min(start + block, n)
        sims = x[start:stop] @ x.T
        sims[np.arange(stop - start), np.arange(start, stop)] = -np.inf
        nn[start:stop] = np.argmax(sims, axis=1)
    return nn


def purity_at_1(matrix, tags, block: int = 512) -> list[PurityResult]:
    """Per-tag Purity@1 over the pooled matrix; results sorted by tag."""
    tags = np.asarray(list(tags), dtype=object)
    x = np.asarray(matrix)
    if x.shape[0] != tags.shape[0]:
        raise MetricError(f"{x.shape[0]} rows but {tags.shape[0]} tags")
    nn = nearest_neighbors(x, block=block)
    hits = tags[nn] == tags
    results = []
    for tag in sorted(set(tags.tolist())):
        mask = tags == tag
        tag_hits = tuple(bool(h) for h in hits[mask])
        results.append(PurityResult(tag=tag, purity=float(np.mean(hits[mask])),
                                    per_image_hits=tag_hits))
    return results


def pairwise_summary(face_records) -> SimilaritySummary:
    """Detection rate plus avg/max pairwise cosine over detected faces.

    Records without a detected face count in the denominator only; with
    fewer than two faces the pairwise stats are absent.
    """
    records = list(face_records)
    n_images = len(records)
    vectors = [r.vector for r in records if getattr(r, "face_detected", True) and r.vector is not None]
    n_faces = len(vectors)
    detection_rate = (n_faces / n_images) if n_images else 0.0
    if n_faces < 2:
        return SimilaritySummary(n_images, n_faces, detection_rate, None, None)
    v = _normalized_rows(np.stack([np.asarray(x, dtype=np.float64) for x in vectors]))
    sims = np.clip(v @ v.T, -1.0, 1.0)
    iu = np.triu_indices(n_faces, k=1)
    pair_sims = sims[iu]
    return SimilaritySummary(
        n_images=n_images,
        n_faces=n_faces,
        detection_rate=detection_rate,
        avg_pairwise=float(np.mean(pair_sims)),
        max_pairwise=float(np.max(pair_sims)),
    )
