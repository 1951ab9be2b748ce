import math

import numpy as np
import pytest

from cryptidhunt.metrics import (
    MetricError,
    SimilaritySummary,
    cosine_similarity,
    nearest_neighbors,
    pairwise_summary,
    purity_at_1,
)
from cryptidhunt.store import EmbeddingRecord


def naive_purity(matrix, tags):
    """Independent O(n^2) oracle: per-row loop, explicit cosine, first-max tie."""
    x = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(x, axis=1)
    n = x.shape[0]
    hits = {}
    for i in range(n):
        best_j, best_sim = -1, -np.inf
        for j in range(n):
            if j == i:
                continue
            sim = float(np.dot(x[i], x[j]) / (norms[i] * norms[j]))
            if sim > best_sim:
                best_sim, best_j = sim, j
        hits.setdefault(tags[i], []).append(tags[best_j] == tags[i])
    return {t: sum(h) / len(h) for t, h in hits.items()}, hits


def test_cosine_examples():
    e1 = [1, 0, 0]
    e2 = [0, 1, 0]
    assert cosine_similarity(e1, e1) == 1.0
    assert cosine_similarity(e1, e2) == 0.0
    # hand computation: 1/sqrt(2)
    assert cosine_similarity([1, 1], [1, 0]) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_cosine_errors():
    with pytest.raises(MetricError):
        cosine_similarity([0, 0], [1, 0])
    with pytest.raises(MetricError):
        cosine_similarity([1, 0], [1, 0, 0])


def test_cosine_clamped():
    v = [1e-8, 1.0]
    assert -1.0 <= cosine_similarity(v, v) <= 1.0


def test_purity_trivial_orthogonal_pairs():
    m = np.array([[1, 0], [1, 0], [0, 1], [0, 1]], dtype=float)
    res = purity_at_1(m, ["a", "a", "b", "b"])
    assert {r.tag: r.purity for r in res} == {"a": 1.0, "b": 1.0}
    assert all(r.per_image_hits == (True, True) for r in res)


def test_purity_single_tag_all_hits():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((6, 4))
    res = purity_at_1(m, ["only"] * 6)
    assert res[0].purity == 1.0


def test_purity_needs_two_rows():
    with pytest.raises(MetricError):
        purity_at_1(np.ones((1, 3)), ["a"])
    with pytest.raises(MetricError):
        purity_at_1(np.vstack([np.ones(3), np.zeros(3)]), ["a", "b"])


def test_purity_matches_naive_oracle():
    rng = np.random.default_rng(1234)
    m = rng.standard_normal((200, 16))
    tags = [f"t{rng.integers(20)}" for _ in range(200)]
    oracle, oracle_hits = naive_purity(m, tags)
    res = purity_at_1(m, tags)
    got = {r.tag: r.purity for r in res}
    assert got == oracle
    for r in res:
        assert list(r.per_image_hits) == oracle_hits[r.tag]


def test_purity_tie_break_lowest_row_index():
    # rows 0 and 1 duplicate row 2's direction; argmax must take the lowest index
    m = np.array([[1, 0], [1, 0], [1, 0], [0, 1]], dtype=float)
    nn = nearest_neighbors(m)
    assert nn[0] == 1  # not 2
    assert nn[1] == 0
    assert nn[2] == 0
    res1 = purity_at_1(m, ["a", "b", "b", "c"])
    res2 = purity_at_1(m, ["a", "b", "b", "c"])
    assert res1 == res2


def test_purity_invariances():
    rng = np.random.default_rng(7)
    n, d = 120, 24
    m = rng.standard_normal((n, d))
    tags = [f"g{rng.integers(8)}" for _ in range(n)]
    base = {r.tag: r.purity for r in purity_at_1(m, tags)}
    # global orthonormal transform preserves cosines
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    rotated = {r.tag: r.purity for r in purity_at_1(m @ q, tags)}
    assert rotated == base
    # per-row positive rescaling preserves cosines
    scales = rng.uniform(0.1, 10.0, size=n)[:, None]
    scaled = {r.tag: r.purity for r in purity_at_1(m * scales, tags)}
    assert scaled == base
    # row permutation preserves per-tag purity
    perm = rng.permutation(n)
    permuted = {r.tag: r.purity for r in purity_at_1(m[perm], [tags[i] for i in perm])}
    assert permuted == base


def test_purity_values_in_unit_interval():
    rng = np.random.default_rng(11)
    m = rng.standard_normal((50, 8))
    for r in purity_at_1(m, [f"t{i % 7}" for i in range(50)]):
        assert 0.0 <= r.purity <= 1.0
        assert r.purity == pytest.approx(np.mean(r.per_image_hits))


def _face(job_id, vec, detected=True):
    v = None if vec is None else np.asarray(vec, dtype=np.float32)
    return EmbeddingRecord(job_id=job_id, modality="face", vector=v,
                           face_detected=detected, tag="arm", seed=0)


def test_pairwise_trivial_identical():
    recs = [_face("a", [1, 0, 0]), _face("b", [1, 0, 0])]
    s = pairwise_summary(recs)
    assert s == SimilaritySummary(2, 2, 1.0, pytest.approx(1.0), pytest.approx(1.0))


def test_pairwise_detection_rate_seven_of_ten():
    recs = [_face(f"j{i}", [1, 0, 0]) for i in range(7)]
    recs += [_face(f"n{i}", None, detected=False) for i in range(3)]
    s = pairwise_summary(recs)
    assert s.n_images == 10 and s.n_faces == 7
    assert s.detection_rate == pytest.approx(0.7)


def test_pairwise_three_face_hand_enumeration():
    # pairs: (e1,e2)=0, (e1,v)=0.7071, (e2,v)=0.7071 -> avg 0.4714, max 0.7071
    v = [1 / math.sqrt(2), 1 / math.sqrt(2), 0]
    recs = [_face("a", [1, 0, 0]), _face("b", [0, 1, 0]), _face("c", v)]
    s = pairwise_summary(recs)
    assert s.avg_pairwise == pytest.approx((0 + 2 / math.sqrt(2)) / 3, abs=1e-6)
    assert s.avg_pairwise == pytest.approx(0.4714, abs=1e-4)
    assert s.max_pairwise == pytest.approx(0.7071, abs=1e-4)


def test_pairwise_fewer_than_two_faces():
    s = pairwise_summary([_face("a", [1, 0]), _face("b", None, detected=False)])
    assert s.n_faces == 1
    assert s.avg_pairwise is None and s.max_pairwise is None
    empty = pairwise_summary([])
    assert empty.n_images == 0 and empty.detection_rate == 0.0


def test_pairwise_avg_le_max_and_normalization_invariance():
    rng = np.random.default_rng(3)
    recs = [_face(f"j{i}", rng.standard_normal(32)) for i in range(9)]
    s = pairwise_summary(recs)
    assert s.avg_pairwise <= s.max_pairwise
    scaled = [_face(r.job_id, np.asarray(r.vector) * (i + 1)) for i, r in enumerate(recs)]
    s2 = pairwise_summary(scaled)
    assert s2.avg_pairwise == pytest.approx(s.avg_pairwise, abs=1e-6)
    assert s2.max_pairwise == pytest.approx(s.max_pairwise, abs=1e-6)
