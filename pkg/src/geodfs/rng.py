"""Seeded random streams: one independent Philox substream per sample index.

Philox4x64 is counter based.  The run seed becomes the 128-bit key and the
sample index fills the two high words of the 256-bit counter, leaving the
two low words as that sample's private block counter.  Sample ``i`` of a run
therefore sees the same 64-bit word sequence however the run is chunked,
which is what makes partial runs mergeable.

Bounded integers are drawn exactly: a word ``u`` is accepted only below the
largest multiple of the bound that fits in 64 bits, then reduced modulo the
bound.
"""
from __future__ import annotations

from typing import Iterator

import numpy as np

_WORD = (1 << 64) - 1
_SPAN = 1 << 64
_BLOCK = 64

#: Bumped whenever the seed-to-output mapping changes.
STREAM_VERSION = 1


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError("seed must be an integer")
    seed = int(seed)
    if not 0 <= seed < 1 << 128:
        raise ValueError("seed must be in [0, 2**128)")
    return seed


def acceptance_limit(bound: int) -> int:
    """Words below this value map uniformly onto ``0..bound-1`` by ``u % bound``."""
    if not 0 < bound <= _SPAN:
        raise ValueError("bound must be in 1..2**64")
    return _SPAN - _SPAN % bound


class WordStream:
    """The sequential 64-bit words of one substream.

    Iterating yields words from a single shared cursor, so interleaving
    :meth:`below` with direct iteration never skips or repeats a word.
    """

    def __init__(self, bitgen: np.random.Philox):
        self._cursor = self._blocks(bitgen)

    @staticmethod
    def _blocks(bitgen: np.random.Philox) -> Iterator[int]:
        raw = bitgen.random_raw
        while True:
            yield from raw(_BLOCK).tolist()

    def __iter__(self) -> Iterator[int]:
        return self._cursor

    def below(self, bound: int) -> int:
        """One exact uniform draw from ``0..bound-1``."""
        limit = acceptance_limit(bound)
        for u in self._cursor:
            if u < limit:
                return u % bound
        raise AssertionError("unreachable")


class StreamFactory:
    """Hands out the word stream for sample ``index`` of the run keyed by ``seed``.

    One Philox bit generator is re-positioned on every call, so a stream is
    only valid until the next :meth:`stream`.
    """

    def __init__(self, seed: int):
        self.seed = _check_seed(seed)
        self._bitgen = np.random.Philox(key=self.seed)
        self._state = self._bitgen.state

    def stream(self, index: int) -> WordStream:
        if index < 0:
            raise ValueError("sample index must be non-negative")
        st = self._state
        st["state"]["counter"][:] = (0, 0, index & _WORD, (index >> 64) & _WORD)
        st["state"]["key"][:] = (self.seed & _WORD, self.seed >> 64)
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bitgen.state = st
        return WordStream(self._bitgen)


def sample_stream(seed: int, index: int) -> WordStream:
    """A stream positioned at the start of substream ``index``, owning its generator."""
    return StreamFactory(seed).stream(index)
