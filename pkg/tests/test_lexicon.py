import re

import pytest

from cryptidhunt.inventory import build_inventory, decompose
from cryptidhunt.lexicon import (
    CONSONANTS,
    VOWELS,
    ExhaustionError,
    Lexicon,
    build_lexicon,
    generate_negative_controls,
    generate_phonestheme_candidates,
    generate_random_controls,
    positive_controls,
)
from cryptidhunt.wordlist import WordlistHandle, default_wordlist, is_real_word


def test_default_wordlist_contents():
    wl = default_wordlist()
    assert is_real_word("mushroom", wl)
    assert is_real_word("crash", wl)
    assert not is_real_word("snudgeoid", wl)
    assert not is_real_word("crungus", wl)
    assert len(wl) > 1000


def test_phonestheme_candidates_contract():
    inv = build_inventory()
    cands = generate_phonestheme_candidates(inv, 200, 42)
    assert len(cands) == 200
    wl = default_wordlist()
    surfaces = [c.surface for c in cands]
    assert len(set(surfaces)) == 200
    for c in cands:
        assert 5 <= len(c.surface) <= 9
        assert c.decomposition is not None
        assert "".join(c.decomposition) == c.surface
        assert not is_real_word(c.surface, wl)


def test_phonestheme_zero_and_exhaustion():
    inv = build_inventory()
    assert generate_phonestheme_candidates(inv, 0, 42) == []
    with pytest.raises(ExhaustionError):
        generate_phonestheme_candidates(inv, 10_000, 42)


def test_phonestheme_full_space_with_empty_wordlist():
    # oracle: exhaustive enumeration of the 10 x 10 x 8 triples
    inv = build_inventory()
    cands = generate_phonestheme_candidates(
        inv, 800, 42, length_bounds=(1, 99), wordlist=WordlistHandle.empty()
    )
    assert len(cands) == 800
    assert len({c.surface for c in cands}) == 800
    for c in cands:
        assert decompose(c.surface) is not None


def _matches_template(surface, template):
    classes = {"C": CONSONANTS, "V": VOWELS}
    return len(surface) == len(template) and all(
        ch in classes[t] for ch, t in zip(surface, template)
    )


def test_random_controls_contract():
    cands = generate_random_controls(100, 42)
    assert len(cands) == 100
    wl = default_wordlist()
    inv = build_inventory()
    onsets = tuple(p.cluster for p in inv["onsets"])
    suffixes = tuple(p.cluster for p in inv["suffixes"])
    assert len({c.surface for c in cands}) == 100
    for c in cands:
        assert any(_matches_template(c.surface, t) for t in ("CVC", "CVCC", "CVCVC"))
        assert not is_real_word(c.surface, wl)
        assert not c.surface.startswith(onsets)
        assert not c.surface.endswith(suffixes)


def test_random_controls_deterministic_and_forced_length():
    a = generate_random_controls(100, 42)
    b = generate_random_controls(100, 42)
    assert [c.surface for c in a] == [c.surface for c in b]
    one = generate_random_controls(1, 7, patterns=("CVC",))
    assert len(one) == 1 and len(one[0].surface) == 3


def test_negative_controls_contract():
    cands = generate_negative_controls(50, 42)
    assert len(cands) == 50
    assert len({c.surface for c in cands}) == 50
    for c in cands:
        assert 4 <= len(c.surface) <= 6
        assert not any(v in c.surface for v in "aeiou")
    one = generate_negative_controls(1, 1, (4, 4))
    assert len(one) == 1 and len(one[0].surface) == 4


def test_positive_controls_fixed():
    cands = positive_controls()
    assert [c.surface for c in cands] == ["crungus", "goblin", "fungus", "mushroom"]
    assert all(c.group == "positive_control" for c in cands)
    assert positive_controls() == positive_controls()


def test_build_lexicon_counts_and_determinism():
    lex = build_lexicon(seed=42)
    assert len(lex) == 354
    assert lex.group_counts() == {
        "phonestheme": 200,
        "random_pronounceable": 100,
        "positive_control": 4,
        "negative_control": 50,
    }
    again = build_lexicon(seed=42)
    assert lex.to_json_bytes() == again.to_json_bytes()
    assert lex.sha256() == again.sha256()
    # different seed changes the sample
    assert build_lexicon(seed=43).sha256() != lex.sha256()


def test_lexicon_surfaces_unique_across_groups():
    lex = build_lexicon(seed=42)
    surfaces = lex.surfaces()
    assert len(set(surfaces)) == len(surfaces)
    # crungus is reserved for the positive controls even though composable
    phon = {c.surface for c in lex.by_group("phonestheme")}
    assert "crungus" not in phon


def test_lexicon_json_round_trip():
    lex = build_lexicon(seed=42)
    raw = lex.to_json_bytes()
    back = Lexicon.from_json_bytes(raw)
    assert back.to_json_bytes() == raw
    assert back.generation_seed == 42
    assert back.group_of("mushroom") == "positive_control"
    # serialized form is a JSON array of candidate objects
    assert raw.lstrip().startswith(b"[")
    assert re.search(rb'\{"surface":"[a-z]+","group":"phonestheme","decomposition":\[', raw)
