"""Deterministic synthetic fixtures: a small multilingual base tokenizer,
training and audit corpora, and default audit-suite inputs.

The base model is trained fresh from the bundled corpus on every call (it
is cached); nothing here is random, so fixtures are bit-stable across runs
and worker counts. The corpus mix mirrors the shape of a production
retrofit: Latin and Devanagari content the base covers well, CJK/Hangul
content destined for the script-prune crop, Greek content whose tokens go
corpus-dead, and Odia content the base can only reach through byte
fallback until surgery adds coverage.
"""

from __future__ import annotations

from functools import lru_cache

from .bytelevel import bijection_map
from .model import (
    GPT2_SPLIT_PATTERN,
    MARK_AWARE_SPLIT_PATTERN,
    SpecialToken,
    TokenizerModel,
)

ENGLISH_DOCS = [
    "the quick brown fox jumps over the lazy dog.",
    "the language of the people is the language of the land.",
    "people speak and people write, and the words carry the day.",
    "a tokenizer splits text into tokens for the model to read.",
    "the state language of the land is spoken by the people.",
    "water and land and day and night, the words of the world.",
    "reading and writing are the work of the school day.",
    "the school teaches the children to read the words.",
]

HINDI_DOCS = [
    "भारत एक देश है और हिन्दी एक भाषा है।",
    "लोग हिन्दी भाषा बोलते हैं और पानी पीते हैं।",
    "विद्यालय में बच्चे भाषा पढ़ते हैं।",
    "भारत के लोग अपने देश से प्रेम करते हैं।",
    "दिन में लोग काम करते हैं और पानी पीते हैं।",
    "हिन्दी भारत की भाषा है और लोग उसे बोलते हैं।",
]

# Audit-only Hindi: words the base training never saw, so the surgery has
# genuinely new word-level material to add.
HINDI_AUDIT_EXTRA = [
    "नमस्ते दुनिया, सूरज आकाश में है।",
    "बच्चे सुबह नमस्ते कहते हैं और आकाश देखते हैं।",
    "दुनिया में सूरज सबके लिए उगता है।",
]

ODIA_DOCS = [
    "ଓଡ଼ିଆ ଭାଷା ଓଡ଼ିଶା ରାଜ୍ୟର ସରକାରୀ ଭାଷା।",
    "ଲୋକେ ଓଡ଼ିଆ ଭାଷା କୁହନ୍ତି ଏବଂ ଲେଖନ୍ତି।",
    "ଓଡ଼ିଶା ର ଲୋକେ ପାଣି ପିଅନ୍ତି ଏବଂ କାମ କରନ୍ତି।",
    "ରାଜ୍ୟ ର ସରକାର ଲୋକଙ୍କ ପାଇଁ କାମ କରେ।",
]

CJK_DOCS = [
    "你好 世界 今天 天气 很好",
    "我们 学习 中文 语言 文字",
    "天气 很好 我们 学习 文字",
]

HANGUL_DOCS = [
    "안녕 하세요 한국어 언어",
    "한국어 언어 문자 학습",
]

GREEK_DOCS = [
    "γλώσσα ελληνικά αθήνα λόγος",
    "ελληνικά γλώσσα λόγος γραφή",
]

# Training quotas per sub-corpus: enough merges for realistic coverage
# while keeping the model small.
_TRAIN_MIX = (
    (ENGLISH_DOCS, 70),
    (HINDI_DOCS, 60),
    (CJK_DOCS, 24),
    (HANGUL_DOCS, 14),
    (GREEK_DOCS, 20),
)

SPECIAL_SURFACES = ("<|bos|>", "<|eos|>", "<|pad|>")


@lru_cache(maxsize=1)
def byte_only_model() -> TokenizerModel:
    """256 byte tokens, zero merges: the floor every encoder bottoms out on."""
    fwd = bijection_map().forward
    return TokenizerModel(
        vocab={fwd[b]: b for b in range(256)},
        merges=[],
        ignore_merges=False,
        special_tokens=[],
        pretokenizer_pattern=GPT2_SPLIT_PATTERN,
        byte_level=True,
        name="byte-only",
    )


def model_from_merges(
    merges: list[tuple[str, str]],
    extra_tokens: list[str] = (),
    specials: list[str] = SPECIAL_SURFACES,
    ignore_merges: bool = True,
    name: str = "synthetic",
    pattern: str = GPT2_SPLIT_PATTERN,
) -> TokenizerModel:
    """Assemble a byte-level model from a merge list (closure by construction)."""
    fwd = bijection_map().forward
    vocab = {fwd[b]: b for b in range(256)}
    next_id = 256
    for left, right in merges:
        composed = left + right
        if composed not in vocab:
            vocab[composed] = next_id
            next_id += 1
    for token in extra_tokens:
        if token not in vocab:
            vocab[token] = next_id
            next_id += 1
    special_tokens = []
    for surface in specials:
        special_tokens.append(SpecialToken(surface=surface, id=next_id, pinned=True))
        next_id += 1
    return TokenizerModel(
        vocab=vocab,
        merges=list(merges),
        ignore_merges=ignore_merges,
        special_tokens=special_tokens,
        pretokenizer_pattern=pattern,
        byte_level=True,
        declared_size=next_id,
        name=name,
    )


@lru_cache(maxsize=1)
def base_model() -> TokenizerModel:
    """The bundled multilingual base tokenizer, trained from the corpus mix.

    Uses the mark-aware split pattern so Brahmic words are whole pretokens;
    the classic pattern would cut them at every dependent vowel.
    """
    from .surgery import train_candidates

    merges: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for docs, quota in _TRAIN_MIX:
        for cand in train_candidates(
            docs, max_candidates=quota, pretokenizer_pattern=MARK_AWARE_SPLIT_PATTERN
        ):
            pair = (cand.left, cand.right)
            if pair not in seen:
                seen.add(pair)
                merges.append(pair)
    return model_from_merges(
        merges, name="synthetic-base", pattern=MARK_AWARE_SPLIT_PATTERN
    )


def base_training_corpus() -> list[str]:
    docs = []
    for sub, _quota in _TRAIN_MIX:
        docs.extend(sub)
    return docs


def audit_corpus() -> list[tuple[str, str]]:
    """The fire-rate measurement corpus: no CJK, Hangul, or Greek content."""
    docs = [(text, "en") for text in ENGLISH_DOCS]
    docs += [(text, "hi") for text in HINDI_DOCS + HINDI_AUDIT_EXTRA]
    docs += [(text, "or") for text in ODIA_DOCS]
    return docs


def surgery_word_list() -> list[str]:
    """Whole-word insertions; space-prefixed twins cover mid-sentence use."""
    return [
        "नमस्ते",
        " नमस्ते",
        " दुनिया",
        "ଭାଷା",
        " ଭାଷା",
        " ଓଡ଼ିଶା",
    ]


def surgery_numerals() -> list[str]:
    return ["१", "२", "३", "०", "୧", "୨"]


def surgery_punctuation() -> list[str]:
    # The bare danda is already in the base vocabulary via training; these
    # two forms are not.
    return ["॥", " ।"]


def fertility_fixture() -> dict[str, list[str]]:
    """Twenty sentences across three languages for bookkeeping checks."""
    return {
        "en": ENGLISH_DOCS,  # 8 sentences
        "hi": HINDI_DOCS,  # 6 sentences
        "or": ODIA_DOCS + [ODIA_DOCS[0], ODIA_DOCS[1]],  # 6 sentences
    }


def default_audit_fixtures():
    from .audit import AuditFixtures

    round_trip = [text for text, _lang in audit_corpus()]
    round_trip += [
        "mixed भारत and english ଓଡ଼ିଆ text 123",
        "  spaces\tand\nnewlines  ",
        "emoji \U0001f600\U0001f680 and digits 42",
    ]
    return AuditFixtures(
        round_trip_texts=round_trip,
        fragment_samples=[(text, "en") for text in ENGLISH_DOCS],
        fragment_ceiling=0.005,
    )
