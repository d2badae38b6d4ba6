"""Shared fixtures and independent reference implementations (oracles).

The oracles here stay deliberately naive so they never share code paths
with the implementations they check.
"""

from __future__ import annotations

import random

import pytest

from retok import default_table
from retok.bytelevel import bijection_map, text_to_symbols
from retok.model import TokenizerModel
from retok.synthetic import base_model, byte_only_model, model_from_merges


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture(scope="session")
def byte_model():
    return byte_only_model()


@pytest.fixture(scope="session")
def base():
    return base_model()


def make_model(
    merges=(),
    extra_tokens=(),
    specials=("<|bos|>", "<|eos|>", "<|pad|>"),
    ignore_merges=True,
    name="fixture",
    pattern=None,
) -> TokenizerModel:
    kwargs = {} if pattern is None else {"pattern": pattern}
    return model_from_merges(
        list(merges),
        extra_tokens=list(extra_tokens),
        specials=list(specials),
        ignore_merges=ignore_merges,
        name=name,
        **kwargs,
    )


def symbols(text: str) -> str:
    return text_to_symbols(text)


# -- oracles ----------------------------------------------------------------


def naive_bpe(parts: list[str], ranks: dict[tuple[str, str], int]) -> list[str]:
    """O(n^2) reference: lowest-rank pair first, leftmost occurrence on ties."""
    parts = list(parts)
    while True:
        best_rank, best_i = None, None
        for i in range(len(parts) - 1):
            rank = ranks.get((parts[i], parts[i + 1]))
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank, best_i = rank, i
        if best_i is None:
            return parts
        parts[best_i : best_i + 2] = [parts[best_i] + parts[best_i + 1]]


def naive_encode(model: TokenizerModel, text: str) -> list[str]:
    """Reference encoder: pretokenize, then naive merge application."""
    import regex

    out = []
    pattern = regex.compile(model.pretokenizer_pattern)
    for match in pattern.finditer(text):
        sym = text_to_symbols(match.group(0))
        if model.ignore_merges and sym in model.vocab:
            out.append(sym)
            continue
        out.extend(naive_bpe(list(sym), model.merge_ranks))
    return out


def brute_force_allocation(curves: dict[str, list[int]], budget: int) -> int:
    """Exhaustive maximum of the slot-allocation objective."""

    def value(script, n):
        return curves[script][n - 1] if n > 0 else 0

    scripts = sorted(curves)

    def recurse(idx: int, remaining: int) -> int:
        if idx == len(scripts):
            return 0 if remaining == 0 else -10**18
        best = -10**18
        script = scripts[idx]
        for n in range(0, min(len(curves[script]), remaining) + 1):
            rest = recurse(idx + 1, remaining - n)
            if rest > -10**18:
                best = max(best, value(script, n) + rest)
        return best

    return recurse(0, budget)


def random_concave_instance(rng: random.Random, max_scripts=4, max_slots=8, max_budget=12):
    """A feasible random instance with curves that are concave by construction."""
    n_scripts = rng.randint(1, max_scripts)
    curves = {}
    for i in range(n_scripts):
        k = rng.randint(0, max_slots)
        fires = sorted((rng.randint(0, 50) for _ in range(k)), reverse=True)
        running, cumulative = 0, []
        for f in fires:
            running += f
            cumulative.append(running)
        curves[f"s{i}"] = cumulative
    ceiling = sum(len(c) for c in curves.values())
    budget = rng.randint(0, min(max_budget, ceiling))
    return curves, budget


def sequential_fire_counts(model: TokenizerModel, docs) -> list[int]:
    """Plain one-document-at-a-time counting used to cross-check count_fires."""
    from retok import encode

    counts = [0] * model.size
    for doc in docs:
        text = doc[0] if isinstance(doc, tuple) else doc
        for tid in encode(model, text).ids:
            counts[tid] += 1
    return counts


MIXED_SCRIPT_POOL = (
    "abcdefghij XYZ 0123456789 "
    "नमस्ते भाषा "
    "ଓଡ଼ିଆ ଭାଷା "
    "你好世界 αβγ "
    "\U0001f600\U0001f680 ​﻿।'\"()[]{}.,!?-"
)


def random_text(rng: random.Random, max_len: int = 60) -> str:
    n = rng.randint(0, max_len)
    return "".join(rng.choice(MIXED_SCRIPT_POOL) for _ in range(n))


def random_bytes(rng: random.Random, max_len: int = 40) -> bytes:
    return bytes(rng.randrange(256) for _ in range(rng.randint(0, max_len)))
