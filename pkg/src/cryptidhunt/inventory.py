"""English phonestheme inventory and pseudoword (de)composition.

Candidate pseudowords are built as onset + nucleus + suffix, where each
part is a sound cluster with a documented semantic association.  The
inventory below is the fixed probe set this harness ships with; its
version string participates in provenance hashes, so any edit must bump
INVENTORY_VERSION.
"""

from __future__ import annotations

from dataclasses import dataclass

INVENTORY_VERSION = "en-phonesthemes-1"

ONSET = "onset"
NUCLEUS = "nucleus"
SUFFIX = "suffix"


class InventoryError(ValueError):
    """A part was used that is not in the inventory."""


@dataclass(frozen=True)
class Phonestheme:
    cluster: str
    position: str  # onset | nucleus | suffix
    gloss: str
    examples: tuple[str, ...]

    def __post_init__(self):
        if not self.cluster or not self.cluster.isalpha() or not self.cluster.islower():
            raise InventoryError(f"bad cluster {self.cluster!r}")
        if self.position not in (ONSET, NUCLEUS, SUFFIX):
            raise InventoryError(f"bad position {self.position!r}")


def _ph(cluster, position, gloss, examples):
    return Phonestheme(cluster, position, gloss, tuple(examples))


ONSETS = (
    _ph("cr", ONSET, "Impact, breaking, rough texture", ["crash", "crush", "crumble", "crisp"]),
    _ph("gl", ONSET, "Light, vision, smooth surfaces", ["glow", "gleam", "glitter", "gloss"]),
    _ph("sn", ONSET, "Nasal/oral, sneaky, quick motion", ["snout", "sniff", "snap", "sneak"]),
    _ph("sl", ONSET, "Sliding, slippery, low/negative", ["slide", "slime", "sloth", "sludge"]),
    _ph("gr", ONSET, "Grasping, grinding, discomfort", ["grip", "grind", "groan", "grit"]),
    _ph("thr", ONSET, "Violent motion, penetration", ["throw", "thrust", "thrash", "throttle"]),
    _ph("br", ONSET, "Breaking, broad, abrupt", ["break", "broad", "brash", "bristle"]),
    _ph("dr", ONSET, "Dragging, dripping, dull", ["drag", "drip", "drone", "drudge"]),
    _ph("sk", ONSET, "Surface, scraping, skeletal", ["skin", "skull", "skeleton", "skim"]),
    _ph("scr", ONSET, "Scraping, scratching, harsh", ["scrape", "scratch", "screech", "scrawl"]),
)

NUCLEI = (
    _ph("ung", NUCLEUS, "Grungy, fungal, dungeon-dark", ["grunge", "fungus", "dungeon"]),
    _ph("ump", NUCLEUS, "Blunt, lumpy, rounded mass", ["lump", "bump", "stump", "clump"]),
    _ph("oth", NUCLEUS, "Muffled, ancient, cloth-like", ["moth", "sloth", "broth", "cloth"]),
    _ph("ob", NUCLEUS, "Blobby, rounded, lumpen", ["blob", "glob", "knob", "gob"]),
    _ph("udge", NUCLEUS, "Heavy, sludgy, dense material", ["sludge", "drudge", "smudge", "budge"]),
    _ph("oom", NUCLEUS, "Resonant, looming, expansive", ["boom", "gloom", "loom", "doom"]),
    _ph("unk", NUCLEUS, "Dense, junky, compact", ["chunk", "junk", "clunk", "trunk"]),
    _ph("ash", NUCLEUS, "Sudden violent action", ["crash", "bash", "smash", "thrash"]),
    _ph("og", NUCLEUS, "Boggy, heavy, earthbound", ["bog", "fog", "log", "slog"]),
    _ph("ulch", NUCLEUS, "Wet, composted, yielding", ["mulch", "gulch"]),
)

SUFFIXES = (
    _ph("oid", SUFFIX, "Resembling, robotic, biological", ["android", "humanoid", "asteroid"]),
    _ph("ax", SUFFIX, "Tool, sharp, decisive", ["pickax", "ajax", "thorax"]),
    _ph("us", SUFFIX, "Latin biological/taxonomic", ["fungus", "cactus", "octopus"]),
    _ph("um", SUFFIX, "Latin element/material", ["uranium", "podium", "museum"]),
    _ph("or", SUFFIX, "Agent, doer", ["predator", "terminator"]),
    _ph("ix", SUFFIX, "Comic/magical, feminine-coded", ["asterix", "matrix", "phoenix"]),
    _ph("ling", SUFFIX, "Small, diminutive, creature", ["duckling", "goblin", "changeling"]),
    _ph("a", SUFFIX, "Open, feminine, organic", ["chimera", "hydra", "flora"]),
)


def build_inventory() -> dict[str, list[Phonestheme]]:
    """The static probe inventory: 10 onsets, 10 nuclei, 8 suffixes."""
    return {
        "onsets": list(ONSETS),
        "nuclei": list(NUCLEI),
        "suffixes": list(SUFFIXES),
    }


def _clusters(entries):
    return [p.cluster for p in entries]


def compose(onset: str, nucleus: str, suffix: str, inventory=None) -> str:
    """Concatenate inventory parts into a candidate surface."""
    inv = inventory or build_inventory()
    if onset not in _clusters(inv["onsets"]):
        raise InventoryError(f"unknown onset {onset!r}")
    if nucleus not in _clusters(inv["nuclei"]):
        raise InventoryError(f"unknown nucleus {nucleus!r}")
    if suffix not in _clusters(inv["suffixes"]):
        raise InventoryError(f"unknown suffix {suffix!r}")
    return (onset + nucleus + suffix).lower()


def decompose(surface: str, inventory=None):
    """Inverse of compose: the (onset, nucleus, suffix) parse of a surface.

    Returns None when no parse exists.  When several parses exist the
    longest onset wins, then the longest suffix.
    """
    inv = inventory or build_inventory()
    surface = surface.lower()
    onsets = sorted(_clusters(inv["onsets"]), key=len, reverse=True)
    suffixes = sorted(_clusters(inv["suffixes"]), key=len, reverse=True)
    nuclei = set(_clusters(inv["nuclei"]))
    for onset in onsets:
        if not surface.startswith(onset):
            continue
        rest = surface[len(onset):]
        for suffix in suffixes:
            if len(rest) <= len(suffix) or not rest.endswith(suffix):
                continue
            if rest[: -len(suffix)] in nuclei:
                return (onset, rest[: -len(suffix)], suffix)
    return None


def all_compositions(inventory=None):
    """Every onset x nucleus x suffix triple with its surface, in table order."""
    inv = inventory or build_inventory()
    out = []
    for o in inv["onsets"]:
        for n in inv["nuclei"]:
            for s in inv["suffixes"]:
                out.append(((o.cluster, n.cluster, s.cluster), o.cluster + n.cluster + s.cluster))
    return out
