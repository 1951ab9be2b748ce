#!/usr/bin/env python3
"""Walkthrough: a complete hunt on the stub backend, no GPU required.

Generates a small lexicon, plans one job per (candidate, seed), runs the
deterministic stub, embeds, and scores Purity@1.  The concept map gives
four candidates tight clusters; everything else lands in diffuse noise,
so those four come out at purity 1.0.
"""

import tempfile
from pathlib import Path

from cryptidhunt import (
    build_lexicon,
    embed_images,
    plan_crungus_hunt,
    purity_at_1,
    run_plan,
)
from cryptidhunt.lexicon import CandidateWord, Lexicon
from cryptidhunt.store import RunStore
from cryptidhunt.stub import StubBackend, StubConcept

TIGHT = ("snudgeoid", "crashax", "broomix", "mushroom")


def main():
    # Small lexicon for a quick demo; swap in build_lexicon(seed=42) for
    # the full 354-candidate version.
    full = build_lexicon(seed=142)
    keep = [c for c in full.candidates if c.surface in TIGHT]
    keep += full.by_group("random_pronounceable")[:6]
    keep += full.by_group("negative_control")[:4]
    lexicon = Lexicon(candidates=keep, generation_seed=full.generation_seed)
    print(f"Lexicon: {len(lexicon)} candidates")

    plan = plan_crungus_hunt(lexicon, (1000, 1015))
    print(f"Plan: {plan.name}, {len(plan.jobs)} jobs "
          f"({len(lexicon)} candidates x 16 seeds)")

    concepts = {tag: StubConcept(tag, i + 1, 0.05) for i, tag in enumerate(TIGHT)}
    backend = StubBackend(concepts, master_seed=0)

    with tempfile.TemporaryDirectory() as tmp:
        store = RunStore.open_run(Path(tmp) / "run", plan)
        records = run_plan(plan, backend, store)
        print(f"Generated {len(records)} stub images")

        embed_images(records, "image_clip", backend, store)
        matrix, identities = store.read_embeddings("image_clip")
        print(f"Embedded: {matrix.shape[0]} x {matrix.shape[1]} matrix")

        results = purity_at_1(matrix, [i["tag"] for i in identities])
        groups = {c.surface: c.group for c in lexicon.candidates}
        print("\nPurity@1 (tight concepts should hit 1.0):")
        for r in sorted(results, key=lambda r: -r.purity):
            marker = " <-- tight cluster" if r.tag in TIGHT else ""
            print(f"  {r.tag:<12} {groups[r.tag]:<21} {r.purity:.4f}{marker}")


if __name__ == "__main__":
    main()
