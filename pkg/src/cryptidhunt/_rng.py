"""Deterministic random streams pinned to SHA-256 counter mode.

The stdlib and numpy generators do not promise identical streams across
interpreter versions, and the sampled lexicon is a file-format contract:
the same seed must reproduce the same bytes forever.  So every sampling
decision in this package draws from a hash stream instead -- SHA-256 over
(key, block counter), consumed 8 bytes at a time.  The construction only
uses integer arithmetic, so it is platform-independent.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

_U64_MAX = 2**64


class HashStream:
    """Deterministic byte/number stream keyed by arbitrary seed parts."""

    def __init__(self, *key_parts):
        key = "\x1f".join(str(p) for p in key_parts)
        self._base = hashlib.sha256(key.encode("utf-8")).digest()
        self._counter = 0
        self._buf = b""
        self._pos = 0

    def _blocks(self, n_blocks):
        chunks = []
        for _ in range(n_blocks):
            chunks.append(
                hashlib.sha256(self._base + struct.pack("<Q", self._counter)).digest()
            )
            self._counter += 1
        return b"".join(chunks)

    def bytes(self, n):
        while len(self._buf) - self._pos < n:
            self._buf = self._buf[self._pos :] + self._blocks(max(1, (n // 32) + 1))
            self._pos = 0
        out = self._buf[self._pos : self._pos + n]
        self._pos += n
        return out

    def u64(self):
        return struct.unpack("<Q", self.bytes(8))[0]

    def randbelow(self, n):
        """Uniform integer in [0, n) via rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        limit = (_U64_MAX // n) * n
        while True:
            x = self.u64()
            if x < limit:
                return x % n

    def uniform(self):
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.u64() >> 11) * 2.0**-53

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def sample(self, seq, k):
        """k items without replacement, partial Fisher-Yates order."""
        pool = list(seq)
        if k > len(pool):
            raise ValueError(f"cannot sample {k} from population of {len(pool)}")
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def normals(self, n):
        """n standard normal draws (Box-Muller over the uniform stream)."""
        if n <= 0:
            return np.zeros(0, dtype=np.float64)
        m = (n + 1) // 2
        raw = np.frombuffer(self.bytes(16 * m), dtype="<u8")
        # (u >> 11) + 1 maps to (0, 1], keeping log() finite.
        u1 = ((raw[:m] >> np.uint64(11)) + np.uint64(1)) * 2.0**-53
        u2 = (raw[m:] >> np.uint64(11)) * 2.0**-53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
        return out[:n]
