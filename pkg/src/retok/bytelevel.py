"""Byte to printable-character bijection used by byte-level BPE vocabularies.

Every UTF-8 byte is mapped to a printable code point so that merge tables
and vocabulary files never contain raw whitespace or control characters.
The table is the GPT-2 ByteLevel convention: printable ASCII and Latin-1
ranges map to themselves, everything else is shifted into U+0100..U+01FF.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class ByteBijection:
    """A 256-entry bijection between byte values and printable characters."""

    forward: dict[int, str]
    inverse: dict[str, int]

    def encode_bytes(self, data: bytes) -> str:
        """Map raw bytes to the printable symbol alphabet."""
        fwd = self.forward
        return "".join(fwd[b] for b in data)

    def decode_symbols(self, symbols: str) -> bytes:
        """Map a symbol string back to raw bytes.

        Raises KeyError if a character is outside the bijection image.
        """
        inv = self.inverse
        return bytes(inv[ch] for ch in symbols)


@lru_cache(maxsize=1)
def bijection_map() -> ByteBijection:
    """Build the canonical byte <-> printable-character table."""
    printable = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("\xa1"), ord("\xac") + 1))
        + list(range(ord("\xae"), ord("\xff") + 1))
    )
    codes = printable[:]
    shift = 0
    for b in range(256):
        if b not in printable:
            printable.append(b)
            codes.append(256 + shift)
            shift += 1
    forward = {b: chr(c) for b, c in zip(printable, codes)}
    inverse = {ch: b for b, ch in forward.items()}
    return ByteBijection(forward=forward, inverse=inverse)


# Symbol for a leading space, the most common word-boundary marker.
SPACE_SYMBOL = bijection_map().forward[0x20]


def text_to_symbols(text: str) -> str:
    """UTF-8 encode *text* (surrogateescape-tolerant) and map to symbols."""
    return bijection_map().encode_bytes(text.encode("utf-8", errors="surrogateescape"))


def symbols_to_bytes(symbols: str) -> bytes:
    return bijection_map().decode_symbols(symbols)
