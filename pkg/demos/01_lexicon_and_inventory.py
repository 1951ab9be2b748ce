#!/usr/bin/env python3
"""Walkthrough: the phonestheme inventory and lexicon generation.

Builds the full 354-candidate lexicon with the default seed and shows
what each group looks like, plus the compose/decompose machinery.
"""

from cryptidhunt import build_inventory, build_lexicon, compose, decompose
from cryptidhunt.wordlist import default_wordlist, is_real_word


def main():
    inv = build_inventory()
    print("Inventory:")
    for part in ("onsets", "nuclei", "suffixes"):
        clusters = ", ".join(p.cluster for p in inv[part])
        print(f"  {part:9s} ({len(inv[part]):2d}): {clusters}")

    print("\nComposition:")
    for triple in (("sn", "udge", "oid"), ("cr", "ash", "ax"), ("br", "oom", "ix")):
        surface = compose(*triple)
        parts = "+".join(triple)
        print(f"  {parts:<14} -> {surface:<10} decompose -> {decompose(surface)}")

    wordlist = default_wordlist()
    print(f"\nBundled wordlist: {len(wordlist)} entries, sha256 {wordlist.sha256[:12]}...")
    print("  'mushroom' is a real word:", is_real_word("mushroom", wordlist))
    print("  'snudgeoid' is a real word:", is_real_word("snudgeoid", wordlist))

    lexicon = build_lexicon(seed=42)
    print(f"\nLexicon (seed 42): {len(lexicon)} candidates, sha256 {lexicon.sha256()[:12]}...")
    for group, count in lexicon.group_counts().items():
        sample = ", ".join(c.surface for c in lexicon.by_group(group)[:5])
        print(f"  {group:21s} n={count:3d}  e.g. {sample}")

    again = build_lexicon(seed=42)
    print("\nRegeneration with the same seed is byte-identical:",
          again.to_json_bytes() == lexicon.to_json_bytes())


if __name__ == "__main__":
    main()
