"""Candidate lexicon generation: phonestheme pseudowords plus controls.

A full lexicon holds four groups (defaults in parentheses):

* phonestheme (200): onset+nucleus+suffix compositions, length-filtered
  and dictionary-excluded, sampled uniformly without replacement;
* random_pronounceable (100): CV-template strings with no phonesthemic
  structure, dictionary-excluded;
* positive_control (4): crungus, goblin, fungus, mushroom;
* negative_control (50): unpronounceable all-consonant strings.

Everything is driven by the pinned hash stream, so a (seed, config) pair
reproduces the identical lexicon byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from ._rng import HashStream
from .inventory import INVENTORY_VERSION, all_compositions, build_inventory
from .wordlist import WordlistHandle, default_wordlist, is_real_word

GROUP_PHONESTHEME = "phonestheme"
GROUP_RANDOM = "random_pronounceable"
GROUP_POSITIVE = "positive_control"
GROUP_NEGATIVE = "negative_control"
GROUPS = (GROUP_PHONESTHEME, GROUP_RANDOM, GROUP_POSITIVE, GROUP_NEGATIVE)

VOWELS = "aeiou"
CONSONANTS = "bcdfghjklmnpqrstvwxyz"

DEFAULT_SEED = 42
DEFAULT_COUNTS = (200, 100, 4, 50)
DEFAULT_LENGTH_BOUNDS = (5, 9)
DEFAULT_PATTERNS = ("CVC", "CVCC", "CVCVC")
DEFAULT_NEGATIVE_LENGTHS = (4, 6)
POSITIVE_WORDS = ("crungus", "goblin", "fungus", "mushroom")

# Consecutive rejected draws before giving up on a constrained sampler.
RETRY_LIMIT = 10_000


class ExhaustionError(RuntimeError):
    """The requested count exceeds what the constrained space can yield."""


@dataclass(frozen=True)
class CandidateWord:
    surface: str
    group: str
    decomposition: tuple[str, str, str] | None
    origin_seed: int

    def to_obj(self):
        obj = {"surface": self.surface, "group": self.group}
        if self.decomposition is not None:
            obj["decomposition"] = list(self.decomposition)
        obj["origin_seed"] = self.origin_seed
        return obj

    @classmethod
    def from_obj(cls, obj):
        decomp = obj.get("decomposition")
        return cls(
            surface=obj["surface"],
            group=obj["group"],
            decomposition=tuple(decomp) if decomp else None,
            origin_seed=int(obj["origin_seed"]),
        )


@dataclass
class Lexicon:
    candidates: list[CandidateWord]
    inventory_version: str = INVENTORY_VERSION
    generation_seed: int = DEFAULT_SEED

    def __len__(self):
        return len(self.candidates)

    def surfaces(self):
        return [c.surface for c in self.candidates]

    def group_counts(self):
        counts = {g: 0 for g in GROUPS}
        for c in self.candidates:
            counts[c.group] = counts.get(c.group, 0) + 1
        return counts

    def by_group(self, group):
        return [c for c in self.candidates if c.group == group]

    def group_of(self, surface):
        for c in self.candidates:
            if c.surface == surface:
                return c.group
        return None

    def to_json_bytes(self) -> bytes:
        # Pinned layout: one candidate object per line, fixed key order.
        lines = [json.dumps(c.to_obj(), separators=(",", ":")) for c in self.candidates]
        return ("[\n" + ",\n".join(lines) + "\n]\n").encode("utf-8")

    @classmethod
    def from_json_bytes(cls, raw: bytes) -> "Lexicon":
        objs = json.loads(raw.decode("utf-8"))
        candidates = [CandidateWord.from_obj(o) for o in objs]
        seed = candidates[0].origin_seed if candidates else DEFAULT_SEED
        return cls(candidates=candidates, generation_seed=seed)

    def sha256(self) -> str:
        return hashlib.sha256(self.to_json_bytes()).hexdigest()


def generate_phonestheme_candidates(
    inventory,
    count: int,
    rng_seed: int,
    length_bounds=DEFAULT_LENGTH_BOUNDS,
    wordlist: WordlistHandle | None = None,
    exclude=(),
) -> list[CandidateWord]:
    """Sample composed pseudowords uniformly from the filtered space.

    exclude lists surfaces reserved elsewhere in the lexicon (e.g. the
    positive controls: "crungus" is itself a valid composition); they are
    skipped so whole-lexicon surface uniqueness holds.
    """
    wordlist = wordlist if wordlist is not None else default_wordlist()
    lo, hi = length_bounds
    seen = set(exclude)
    pool = []
    for triple, surface in all_compositions(inventory):
        if not (lo <= len(surface) <= hi):
            continue
        if is_real_word(surface, wordlist):
            continue
        if surface in seen:
            continue
        seen.add(surface)
        pool.append((triple, surface))
    if count > len(pool):
        raise ExhaustionError(
            f"requested {count} phonestheme candidates but only {len(pool)} "
            f"compositions survive the filters"
        )
    stream = HashStream("phonestheme", rng_seed)
    picked = stream.sample(pool, count)
    return [
        CandidateWord(surface=s, group=GROUP_PHONESTHEME, decomposition=t, origin_seed=rng_seed)
        for t, s in picked
    ]


def _inventory_affixes(inventory):
    inv = inventory or build_inventory()
    onsets = tuple(p.cluster for p in inv["onsets"])
    suffixes = tuple(p.cluster for p in inv["suffixes"])
    return onsets, suffixes


def generate_random_controls(
    count: int,
    rng_seed: int,
    patterns=DEFAULT_PATTERNS,
    wordlist: WordlistHandle | None = None,
    avoid_inventory_affixes: bool = True,
) -> list[CandidateWord]:
    """CV-template controls (C = consonant, V = vowel), dictionary-excluded.

    By default surfaces that begin with an inventory onset or end with an
    inventory suffix are redrawn, keeping the control group free of the
    structure under test.
    """
    wordlist = wordlist if wordlist is not None else default_wordlist()
    onsets, suffixes = _inventory_affixes(None)
    stream = HashStream("random_pronounceable", rng_seed)
    out = []
    seen = set()
    misses = 0
    while len(out) < count:
        if misses > RETRY_LIMIT:
            raise ExhaustionError(
                f"random controls exhausted after {RETRY_LIMIT} consecutive rejections"
            )
        template = stream.choice(list(patterns))
        surface = "".join(
            stream.choice(CONSONANTS) if ch == "C" else stream.choice(VOWELS)
            for ch in template
        )
        bad = (
            surface in seen
            or is_real_word(surface, wordlist)
            or (
                avoid_inventory_affixes
                and (surface.startswith(onsets) or surface.endswith(suffixes))
            )
        )
        if bad:
            misses += 1
            continue
        misses = 0
        seen.add(surface)
        out.append(
            CandidateWord(surface=surface, group=GROUP_RANDOM, decomposition=None, origin_seed=rng_seed)
        )
    return out


def generate_negative_controls(
    count: int,
    rng_seed: int,
    length_range=DEFAULT_NEGATIVE_LENGTHS,
) -> list[CandidateWord]:
    """Unpronounceable all-consonant strings (no a/e/i/o/u)."""
    lo, hi = length_range
    stream = HashStream("negative_control", rng_seed)
    out = []
    seen = set()
    misses = 0
    while len(out) < count:
        if misses > RETRY_LIMIT:
            raise ExhaustionError(
                f"negative controls exhausted after {RETRY_LIMIT} consecutive rejections"
            )
        length = lo + stream.randbelow(hi - lo + 1)
        surface = "".join(stream.choice(CONSONANTS) for _ in range(length))
        if surface in seen:
            misses += 1
            continue
        misses = 0
        seen.add(surface)
        out.append(
            CandidateWord(surface=surface, group=GROUP_NEGATIVE, decomposition=None, origin_seed=rng_seed)
        )
    return out


def positive_controls(origin_seed: int = 0) -> list[CandidateWord]:
    """The four fixed known-coherent probe words."""
    return [
        CandidateWord(surface=w, group=GROUP_POSITIVE, decomposition=None, origin_seed=origin_seed)
        for w in POSITIVE_WORDS
    ]


def build_lexicon(
    seed: int = DEFAULT_SEED,
    counts=DEFAULT_COUNTS,
    wordlist: WordlistHandle | None = None,
    length_bounds=DEFAULT_LENGTH_BOUNDS,
    patterns=DEFAULT_PATTERNS,
    negative_lengths=DEFAULT_NEGATIVE_LENGTHS,
    avoid_inventory_affixes: bool = True,
) -> Lexicon:
    """Assemble the full candidate lexicon for one experiment."""
    wordlist = wordlist if wordlist is not None else default_wordlist()
    n_phon, n_random, n_positive, n_negative = counts
    if n_positive > len(POSITIVE_WORDS):
        raise ExhaustionError(f"at most {len(POSITIVE_WORDS)} positive controls exist")
    inventory = build_inventory()
    reserved = POSITIVE_WORDS[:n_positive]
    candidates = []
    candidates += generate_phonestheme_candidates(
        inventory, n_phon, seed, length_bounds, wordlist, exclude=reserved
    )
    candidates += generate_random_controls(
        n_random, seed, patterns, wordlist, avoid_inventory_affixes
    )
    candidates += positive_controls(origin_seed=seed)[:n_positive]
    candidates += generate_negative_controls(n_negative, seed, negative_lengths)
    surfaces = [c.surface for c in candidates]
    if len(set(surfaces)) != len(surfaces):
        raise ExhaustionError("surface collision across groups; widen the space or reseed")
    return Lexicon(candidates=candidates, generation_seed=seed)
