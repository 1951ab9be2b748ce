#!/usr/bin/env python3
"""Walkthrough: the three push-pull conditioning arms and face similarity.

Arm A pushes with inverse descriptors, Arm B pulls with a negative
prompt only, Arm C does both.  Each arm runs seeds 1-10; the stub face
embedder then feeds the per-condition similarity table.
"""

import tempfile
from pathlib import Path

from cryptidhunt import embed_images, pairwise_summary, plan_push_pull, run_plan
from cryptidhunt.planner import (
    MARILYN_NEGATIVE_PROMPT,
    NEUTRAL_PROMPT,
    SHADOW_POSITIVE_PROMPT,
)
from cryptidhunt.store import EmbeddingRecord, RunStore
from cryptidhunt.stub import StubBackend, StubConcept


def main():
    print("Prompt constants:")
    print("  shadow positive:", SHADOW_POSITIVE_PROMPT[:60] + "...")
    print("  marilyn negative:", MARILYN_NEGATIVE_PROMPT[:60] + "...")
    print("  neutral:", NEUTRAL_PROMPT)

    # Give each arm its own face cluster with arm-specific spread so the
    # similarity table has visible contrast.
    sigma = {"armA": 0.05, "armB": 1.5, "armC": 0.08}
    rows = []
    for arm in "ABC":
        plan = plan_push_pull(arm, (1, 10))
        tag = f"arm{arm}"
        backend = StubBackend({tag: StubConcept(tag, ord(arm), sigma[tag])})
        with tempfile.TemporaryDirectory() as tmp:
            store = RunStore.open_run(Path(tmp) / "run", plan)
            records = run_plan(plan, backend, store)
            embs = embed_images(records, "face", backend, store)
            summary = pairwise_summary(embs)
        rows.append((tag, summary))

    print("\nPer-arm face similarity (stub embeddings):")
    print(f"  {'condition':<10} {'faces':>5} {'detect':>7} {'avg':>8} {'max':>8}")
    for tag, s in rows:
        print(f"  {tag:<10} {s.n_faces:>2}/{s.n_images:<2} {s.detection_rate:>7.2f} "
              f"{s.avg_pairwise:>8.4f} {s.max_pairwise:>8.4f}")
    print("\nTighter concepts (smaller sigma) give higher pairwise similarity;")
    print("a real backend substitutes ArcFace vectors through the same pipeline.")


if __name__ == "__main__":
    main()
