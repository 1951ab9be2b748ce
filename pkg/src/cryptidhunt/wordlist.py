"""Wordlist loading and real-word checks.

A wordlist is a newline-delimited UTF-8 file, lowercased on load; lines
starting with '#' are comments.  The bundled default ships in-repo and is
hashed so run manifests can pin exactly which list filtered a lexicon.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class ConfigurationError(RuntimeError):
    """A required external resource (wordlist, config) is unavailable."""


@dataclass(frozen=True)
class WordlistHandle:
    words: frozenset[str]
    sha256: str
    source: str = "<memory>"

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def from_bytes(cls, raw: bytes, source: str = "<memory>") -> "WordlistHandle":
        digest = hashlib.sha256(raw).hexdigest()
        words = set()
        for line in raw.decode("utf-8").splitlines():
            line = line.strip().lower()
            if line and not line.startswith("#"):
                words.add(line)
        return cls(words=frozenset(words), sha256=digest, source=source)

    @classmethod
    def from_path(cls, path) -> "WordlistHandle":
        path = Path(path)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise ConfigurationError(f"wordlist unavailable: {path}: {exc}") from exc
        return cls.from_bytes(raw, source=str(path))

    @classmethod
    def empty(cls) -> "WordlistHandle":
        return cls.from_bytes(b"", source="<empty>")


_DEFAULT = None


def default_wordlist() -> WordlistHandle:
    """The bundled English wordlist (cached)."""
    global _DEFAULT
    if _DEFAULT is None:
        ref = resources.files("cryptidhunt").joinpath("data/english-wordlist.txt")
        try:
            raw = ref.read_bytes()
        except OSError as exc:
            raise ConfigurationError(f"bundled wordlist missing: {exc}") from exc
        _DEFAULT = WordlistHandle.from_bytes(raw, source="bundled:english-wordlist.txt")
    return _DEFAULT


def is_real_word(surface: str, wordlist: WordlistHandle) -> bool:
    """True iff surface is an exact (case-insensitive) wordlist entry."""
    if wordlist is None:
        raise ConfigurationError("no wordlist loaded")
    return surface in wordlist
