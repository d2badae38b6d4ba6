"""Byte-level BPE encode/decode with whole-token-priority semantics.

Encoding segments text with the model's pre-tokenizer regex, maps each
pretoken's UTF-8 bytes through the byte bijection, and then applies merge
rules one at a time: always the lowest-rank applicable pair, leftmost on
ties, until no rule applies. When ``ignore_merges`` is set, a pretoken
whose whole symbol string is a vocabulary entry is emitted as that single
token without running merges at all.

Any byte input is encodable: the 256 single-byte tokens are the floor every
symbol bottoms out on, so there is no unknown-token sentinel. Invalid UTF-8
is carried through ``surrogateescape`` and round-trips byte-perfectly.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import regex

from .bytelevel import bijection_map, symbols_to_bytes, text_to_symbols
from .model import TokenizerModel


class UnknownIdError(KeyError):
    """decode() was handed an ID outside the vocabulary."""


@dataclass
class TokenSequence:
    ids: list[int]
    surfaces: list[str]

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)


def _compiled_pattern(model: TokenizerModel):
    pat = model._caches.get("split_regex")
    if pat is None:
        pat = regex.compile(model.pretokenizer_pattern) if model.pretokenizer_pattern else None
        model._caches["split_regex"] = pat
    return pat


def _special_splitter(model: TokenizerModel):
    if "special_regex" not in model._caches:
        surfaces = sorted(
            (sp.surface for sp in model.special_tokens), key=len, reverse=True
        )
        if surfaces:
            alternation = "|".join(regex.escape(s) for s in surfaces)
            model._caches["special_regex"] = regex.compile(f"({alternation})")
            model._caches["special_ids"] = {
                sp.surface: sp.id for sp in model.special_tokens
            }
        else:
            model._caches["special_regex"] = None
            model._caches["special_ids"] = {}
    return model._caches["special_regex"], model._caches["special_ids"]


def apply_merges(parts: list[str], ranks: dict[tuple[str, str], int]) -> list[str]:
    """Run merge rules to fixed point: lowest rank first, leftmost on ties.

    Linked-list walk with a lazy heap; O(n log n) in the pretoken length,
    one merge application per step so rank priority is exact.
    """
    n = len(parts)
    if n < 2:
        return parts
    parts = list(parts)
    nxt = list(range(1, n)) + [-1]
    prv = [-1] + list(range(n - 1))
    alive = [True] * n
    version = [0] * n
    heap: list[tuple[int, int, int]] = []
    for i in range(n - 1):
        r = ranks.get((parts[i], parts[i + 1]))
        if r is not None:
            heap.append((r, i, 0))
    heapq.heapify(heap)
    while heap:
        rank, i, ver = heapq.heappop(heap)
        if not alive[i] or version[i] != ver:
            continue
        j = nxt[i]
        if j == -1 or ranks.get((parts[i], parts[j])) != rank:
            continue
        parts[i] = parts[i] + parts[j]
        alive[j] = False
        nxt[i] = nxt[j]
        if nxt[i] != -1:
            prv[nxt[i]] = i
        version[i] += 1
        if nxt[i] != -1:
            r = ranks.get((parts[i], parts[nxt[i]]))
            if r is not None:
                heapq.heappush(heap, (r, i, version[i]))
        p = prv[i]
        if p != -1:
            version[p] += 1
            r = ranks.get((parts[p], parts[i]))
            if r is not None:
                heapq.heappush(heap, (r, p, version[p]))
    return [parts[i] for i in range(n) if alive[i]]


def _encode_pretoken(model: TokenizerModel, symbols: str) -> tuple[int, ...]:
    cache = model._caches.setdefault("pretoken_cache", {})
    hit = cache.get(symbols)
    if hit is not None:
        return hit
    vocab = model.vocab
    if model.ignore_merges and symbols in vocab:
        out = (vocab[symbols],)
    else:
        pieces = apply_merges(list(symbols), model.merge_ranks)
        out = tuple(vocab[p] for p in pieces)
    if len(cache) < 200_000:
        cache[symbols] = out
    return out


def encode(model: TokenizerModel, text: str | bytes) -> TokenSequence:
    """Tokenize text (or raw bytes) into IDs plus their symbol surfaces."""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="surrogateescape")
    ids: list[int] = []
    surfaces: list[str] = []
    special_re, special_ids = _special_splitter(model)
    chunks = special_re.split(text) if special_re else [text]
    split_pat = _compiled_pattern(model)
    id_to_token = model.id_to_token
    for chunk in chunks:
        if not chunk:
            continue
        if chunk in special_ids:
            ids.append(special_ids[chunk])
            surfaces.append(chunk)
            continue
        pretokens = (
            (m.group(0) for m in split_pat.finditer(chunk)) if split_pat else (chunk,)
        )
        for pre in pretokens:
            for tid in _encode_pretoken(model, text_to_symbols(pre)):
                ids.append(tid)
                surfaces.append(id_to_token[tid])
    return TokenSequence(ids=ids, surfaces=surfaces)


def decode(model: TokenizerModel, tokens: TokenSequence | list[int]) -> bytes:
    """Map IDs back to bytes; special tokens decode to their literal surface."""
    ids = tokens.ids if isinstance(tokens, TokenSequence) else tokens
    id_to_token = model.id_to_token
    specials = model.special_by_id
    out = bytearray()
    for tid in ids:
        if tid in specials:
            out += specials[tid].surface.encode("utf-8")
            continue
        surface = id_to_token.get(tid)
        if surface is None:
            raise UnknownIdError(f"ID {tid} is not in the vocabulary")
        if model.byte_level:
            out += symbols_to_bytes(surface)
        else:
            out += surface.encode("utf-8", errors="surrogateescape")
    return bytes(out)


def decode_text(model: TokenizerModel, tokens: TokenSequence | list[int]) -> str:
    return decode(model, tokens).decode("utf-8", errors="surrogateescape")


def token_byte_length(model: TokenizerModel, token: str) -> int:
    from .scripts import token_bytes

    return len(token_bytes(model, token))


__all__ = [
    "TokenSequence",
    "UnknownIdError",
    "apply_merges",
    "bijection_map",
    "encode",
    "decode",
    "decode_text",
    "token_byte_length",
]
