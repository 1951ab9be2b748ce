import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cryptidhunt.lexicon import CandidateWord, Lexicon
from cryptidhunt.stub import StubConcept


@pytest.fixture
def tiny_lexicon():
    """Five-candidate lexicon covering all four groups."""
    cands = [
        CandidateWord("snudgeoid", "phonestheme", ("sn", "udge", "oid"), 7),
        CandidateWord("crashax", "phonestheme", ("cr", "ash", "ax"), 7),
        CandidateWord("diwoz", "random_pronounceable", None, 7),
        CandidateWord("mushroom", "positive_control", None, 7),
        CandidateWord("rjrv", "negative_control", None, 7),
    ]
    return Lexicon(candidates=cands, generation_seed=7)


@pytest.fixture
def tight_concepts():
    return {
        "snudgeoid": StubConcept("snudgeoid", 1, 0.05),
        "crashax": StubConcept("crashax", 2, 0.05),
        "mushroom": StubConcept("mushroom", 3, 0.05),
    }
