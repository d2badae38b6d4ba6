"""Unicode-block script classification for tokens and code points.

A ScriptTable maps code-point ranges to script names and groups scripts
into disjointness classes: two scripts in different classes count as
disjoint writing systems, so a token touching both is cross-script.
Hiragana and Katakana share one class; every other pair is disjoint.

Digits, ASCII punctuation, the danda marks (U+0964-U+0965), ZWJ/ZWNJ and
shared combining marks are neutral: they never make a token cross-script.
Unlisted code points also classify as neutral.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

from .bytelevel import bijection_map

if TYPE_CHECKING:  # pragma: no cover
    from .model import TokenizerModel

NEUTRAL = "neutral"

SCRIPT_TABLE_VERSION = 1

# (start, end, script, disjointness class); ranges are inclusive.
_DEFAULT_BLOCKS: list[tuple[int, int, str, str]] = [
    # Latin
    (0x0041, 0x005A, "latin", "latin"),
    (0x0061, 0x007A, "latin", "latin"),
    (0x00C0, 0x00D6, "latin", "latin"),
    (0x00D8, 0x00F6, "latin", "latin"),
    (0x00F8, 0x024F, "latin", "latin"),
    (0x1E00, 0x1EFF, "latin", "latin"),
    # Brahmic blocks
    (0x0900, 0x097F, "devanagari", "devanagari"),
    (0x0980, 0x09FF, "bengali", "bengali"),
    (0x0A00, 0x0A7F, "gurmukhi", "gurmukhi"),
    (0x0A80, 0x0AFF, "gujarati", "gujarati"),
    (0x0B00, 0x0B7F, "oriya", "oriya"),
    (0x0B80, 0x0BFF, "tamil", "tamil"),
    (0x0C00, 0x0C7F, "telugu", "telugu"),
    (0x0C80, 0x0CFF, "kannada", "kannada"),
    (0x0D00, 0x0D7F, "malayalam", "malayalam"),
    # Prune-target scripts
    (0x0370, 0x03FF, "greek", "greek"),
    (0x1F00, 0x1FFF, "greek", "greek"),
    (0x0400, 0x04FF, "cyrillic", "cyrillic"),
    (0x0500, 0x052F, "cyrillic", "cyrillic"),
    (0x0590, 0x05FF, "hebrew", "hebrew"),
    (0x0600, 0x06FF, "arabic", "arabic"),
    (0x0750, 0x077F, "arabic", "arabic"),
    (0x08A0, 0x08FF, "arabic", "arabic"),
    (0xFB50, 0xFDFF, "arabic", "arabic"),
    (0xFE70, 0xFEFF, "arabic", "arabic"),
    (0x0D80, 0x0DFF, "sinhala", "sinhala"),
    (0x0E00, 0x0E7F, "thai", "thai"),
    (0x1100, 0x11FF, "hangul", "hangul"),
    (0x3130, 0x318F, "hangul", "hangul"),
    (0xAC00, 0xD7AF, "hangul", "hangul"),
    (0x3040, 0x309F, "hiragana", "japanese"),
    (0x30A0, 0x30FF, "katakana", "japanese"),
    (0x31F0, 0x31FF, "katakana", "japanese"),
    (0x3400, 0x4DBF, "cjk", "cjk"),
    (0x4E00, 0x9FFF, "cjk", "cjk"),
    (0xF900, 0xFAFF, "cjk", "cjk"),
]

# Neutral overrides take precedence over block membership (the danda pair
# sits inside the Devanagari block but is shared across Brahmic scripts).
_DEFAULT_NEUTRAL: list[tuple[int, int]] = [
    (0x0000, 0x0040),  # controls, whitespace, digits, ASCII punctuation
    (0x005B, 0x0060),
    (0x007B, 0x00BF),  # incl. Latin-1 punctuation/symbols
    (0x00D7, 0x00D7),
    (0x00F7, 0x00F7),
    (0x0300, 0x036F),  # shared combining marks
    (0x0964, 0x0965),  # danda, double danda
    (0x2000, 0x206F),  # general punctuation incl. ZWSP/ZWJ/ZWNJ/bidi controls
    (0xFEFF, 0xFEFF),  # BOM / ZWNBSP
]

# The nine prune-target groups of the script-prune crop, as classes.
PRUNE_CLASSES = (
    "cjk",
    "hangul",
    "japanese",
    "arabic",
    "cyrillic",
    "thai",
    "greek",
    "hebrew",
    "sinhala",
)

BRAHMIC_CLASSES = (
    "devanagari",
    "bengali",
    "gurmukhi",
    "gujarati",
    "oriya",
    "tamil",
    "telugu",
    "kannada",
    "malayalam",
)


@dataclass
class ScriptTable:
    blocks: list[tuple[int, int, str, str]]
    neutral: list[tuple[int, int]]
    version: int = SCRIPT_TABLE_VERSION
    _starts: list[int] = field(default_factory=list, repr=False, compare=False)
    _neutral_starts: list[int] = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        self.blocks = sorted(self.blocks)
        self.neutral = sorted(self.neutral)
        prev_end = -1
        for start, end, _script, _cls in self.blocks:
            if start <= prev_end:
                raise ValueError(f"overlapping block at U+{start:04X}")
            prev_end = end
        self._starts = [b[0] for b in self.blocks]
        self._neutral_starts = [n[0] for n in self.neutral]

    def classify(self, cp: int) -> str:
        """Script name for a code point; NEUTRAL for shared or unknown."""
        i = bisect_right(self._neutral_starts, cp) - 1
        if i >= 0 and cp <= self.neutral[i][1]:
            return NEUTRAL
        i = bisect_right(self._starts, cp) - 1
        if i >= 0 and cp <= self.blocks[i][1]:
            return self.blocks[i][2]
        return NEUTRAL

    def script_class(self, script: str) -> str:
        for _start, _end, name, cls in self.blocks:
            if name == script:
                return cls
        return script

    def classify_class(self, cp: int) -> str:
        """Disjointness class for a code point; NEUTRAL when shared/unknown."""
        i = bisect_right(self._neutral_starts, cp) - 1
        if i >= 0 and cp <= self.neutral[i][1]:
            return NEUTRAL
        i = bisect_right(self._starts, cp) - 1
        if i >= 0 and cp <= self.blocks[i][1]:
            return self.blocks[i][3]
        return NEUTRAL

    def class_of_range(self, lo: int, hi: int) -> str | None:
        """Single class covering every code point in [lo, hi], else None."""
        i = bisect_right(self._starts, lo) - 1
        if i >= 0:
            start, end, _script, cls = self.blocks[i]
            if start <= lo and hi <= end:
                # Neutral overrides inside the window disqualify certainty
                # only if they change the class; neutral never conflicts.
                return cls
        return None

    def save(self, path: str | Path) -> None:
        payload = {
            "version": self.version,
            "blocks": [
                [f"{s:04X}", f"{e:04X}", script, cls]
                for s, e, script, cls in self.blocks
            ],
            "neutral": [[f"{s:04X}", f"{e:04X}"] for s, e in self.neutral],
        }
        Path(path).write_text(
            json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "ScriptTable":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            blocks=[
                (int(s, 16), int(e, 16), script, klass)
                for s, e, script, klass in raw["blocks"]
            ],
            neutral=[(int(s, 16), int(e, 16)) for s, e in raw.get("neutral", [])],
            version=int(raw.get("version", SCRIPT_TABLE_VERSION)),
        )


def default_table() -> ScriptTable:
    return ScriptTable(blocks=list(_DEFAULT_BLOCKS), neutral=list(_DEFAULT_NEUTRAL))


def classify_codepoint(table: ScriptTable, cp: int | str) -> str:
    if isinstance(cp, str):
        cp = ord(cp)
    return table.classify(cp)


@dataclass
class TokenProfile:
    byte_length: int
    scripts: set[str]  # disjointness classes, neutral excluded
    is_cross_script: bool
    is_partial_char: bool
    codepoints: list[int] = field(default_factory=list)


# UTF-8 continuation-byte constraints per lead byte, as (lo, hi) pairs.
def _cont_ranges(lead: int) -> list[tuple[int, int]] | None:
    if 0xC2 <= lead <= 0xDF:
        return [(0x80, 0xBF)]
    if lead == 0xE0:
        return [(0xA0, 0xBF), (0x80, 0xBF)]
    if 0xE1 <= lead <= 0xEC or lead in (0xEE, 0xEF):
        return [(0x80, 0xBF), (0x80, 0xBF)]
    if lead == 0xED:
        return [(0x80, 0x9F), (0x80, 0xBF)]
    if lead == 0xF0:
        return [(0x90, 0xBF), (0x80, 0xBF), (0x80, 0xBF)]
    if 0xF1 <= lead <= 0xF3:
        return [(0x80, 0xBF), (0x80, 0xBF), (0x80, 0xBF)]
    if lead == 0xF4:
        return [(0x80, 0x8F), (0x80, 0xBF), (0x80, 0xBF)]
    return None  # ASCII handled separately; anything else is invalid.


def _decode_walk(data: bytes):
    """Walk UTF-8 bytes, yielding complete code points and edge fragments.

    Yields ("char", codepoint, nbytes) for complete characters and
    ("fragment", (lo, hi) | None, nbytes) for incomplete or invalid runs,
    where (lo, hi) bounds the code point a truncated trailing sequence
    could still become (None when nothing can be inferred).
    """
    i, n = 0, len(data)
    while i < n:
        b = data[i]
        if b < 0x80:
            yield ("char", b, 1)
            i += 1
            continue
        ranges = _cont_ranges(b)
        if ranges is None:
            # Bare continuation or invalid lead: consume the run of
            # continuation bytes as one undetermined fragment.
            j = i
            while j < n and 0x80 <= data[j] <= 0xBF:
                j += 1
            yield ("fragment", None, max(j - i, 1))
            i = max(j, i + 1)
            continue
        need = len(ranges)
        got = []
        j = i + 1
        while j < n and len(got) < need:
            lo, hi = ranges[len(got)]
            if lo <= data[j] <= hi:
                got.append(data[j])
                j += 1
            else:
                break
        if len(got) == need:
            cp = b & (0x7F >> (need + 1))
            for cont in got:
                cp = (cp << 6) | (cont & 0x3F)
            yield ("char", cp, need + 1)
            i = j
        elif j >= n:
            # Truncated at the end of the token: bound the code point.
            lo_cp = b & (0x7F >> (need + 1))
            hi_cp = lo_cp
            for k in range(need):
                if k < len(got):
                    lo_cp = (lo_cp << 6) | (got[k] & 0x3F)
                    hi_cp = (hi_cp << 6) | (got[k] & 0x3F)
                else:
                    lo, hi = ranges[k]
                    lo_cp = (lo_cp << 6) | (lo & 0x3F)
                    hi_cp = (hi_cp << 6) | (hi & 0x3F)
            yield ("fragment", (lo_cp, hi_cp), n - i)
            i = n
        else:
            # Mismatched continuation mid-token: the lead byte is garbage.
            yield ("fragment", None, 1)
            i += 1


def token_bytes(model: "TokenizerModel", token: str) -> bytes:
    """Decoded byte content of a vocabulary token."""
    if model.byte_level:
        return bijection_map().decode_symbols(token)
    # Plain-text vocabularies: strip the metaspace word marker if present.
    return token.replace("▁", " ").encode("utf-8", errors="surrogateescape")


def profile_token(
    model: "TokenizerModel", table: ScriptTable, token: str
) -> TokenProfile:
    """Script profile of a token's decoded bytes.

    Complete characters contribute their disjointness class; a truncated
    edge fragment contributes a class only when the lead byte pins the
    code point inside a single block. Any incomplete or invalid sequence
    marks the token as splitting a multi-byte character.
    """
    data = token_bytes(model, token)
    scripts: set[str] = set()
    codepoints: list[int] = []
    partial = False
    for kind, value, _nbytes in _decode_walk(data):
        if kind == "char":
            codepoints.append(value)
            cls = table.classify_class(value)
            if cls != NEUTRAL:
                scripts.add(cls)
        else:
            partial = True
            if value is not None:
                lo, hi = value
                cls = table.class_of_range(lo, hi)
                if cls is not None and cls != NEUTRAL:
                    scripts.add(cls)
    return TokenProfile(
        byte_length=len(data),
        scripts=scripts,
        is_cross_script=len(scripts) >= 2,
        is_partial_char=partial,
        codepoints=codepoints,
    )


def char_boundaries(data: bytes) -> set[int]:
    """Byte offsets that start a character (or undetermined fragment run)."""
    bounds = set()
    pos = 0
    for _kind, _value, nbytes in _decode_walk(data):
        bounds.add(pos)
        pos += nbytes
    bounds.add(pos)
    return bounds
