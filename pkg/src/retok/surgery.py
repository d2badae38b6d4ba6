"""Vocabulary surgery: dead slots out, new script content in, atomically.

The flow: train candidate merges on a script-restricted corpus, discard
cross-script candidates, allocate per-script slot counts, assemble a typed
plan balancing removals against insertions exactly, and apply it in one
step. New merge rules are appended after every inherited rule, so inherited
tokenization never changes priority; an ID permutation afterwards orders
the vocabulary by descending corpus frequency without touching behavior.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import regex

from .bpe import apply_merges, encode
from .bytelevel import text_to_symbols
from .model import SpecialToken, TokenizerModel, validate_model
from .scripts import NEUTRAL, ScriptTable, profile_token
from .audit import DeadSlotReport, FireCounts, _normalize_doc
from .allocation import AllocationResult


class SurgeryError(ValueError):
    pass


class InsufficientDeadSlotsError(SurgeryError):
    def __init__(self, needed: int, available: int):
        super().__init__(
            f"{needed} insertions need slots but only "
            f"{available} removable dead slots are available"
        )
        self.needed = needed
        self.available = available


@dataclass
class CandidateMerge:
    left: str
    right: str
    fire_count: int
    scripts: set[str] = field(default_factory=set)
    is_cross_script: bool = False

    @property
    def composed(self) -> str:
        return self.left + self.right


def train_candidates(
    corpus,
    max_candidates: int,
    table: ScriptTable | None = None,
    target_scripts: set[str] | None = None,
    pretokenizer_pattern: str | None = None,
    reference: TokenizerModel | None = None,
) -> list[CandidateMerge]:
    """Learn candidate merges by greedy pair-frequency BPE over the corpus.

    Documents are pre-tokenized, mapped to the symbol alphabet, and merged
    from single symbols upward; each step records the winning pair and its
    frequency as the candidate's fire count. When *target_scripts* is given
    the corpus is restricted first: only pretokens whose profile touches one
    of those classes survive. Candidates are returned in training order,
    which also keeps every candidate's inputs reachable from its
    predecessors.
    """
    from .model import GPT2_SPLIT_PATTERN

    pattern = regex.compile(pretokenizer_pattern or GPT2_SPLIT_PATTERN)
    probe = reference
    if probe is None and table is not None:
        # A minimal byte-only carrier so profile_token can decode symbols.
        from .synthetic import byte_only_model

        probe = byte_only_model()

    word_counts: Counter[str] = Counter()
    for doc in corpus:
        text, _lang = _normalize_doc(doc)
        for match in pattern.finditer(text):
            word_counts[match.group(0)] += 1
    if target_scripts is not None:
        if table is None:
            raise SurgeryError("target_scripts filtering requires a script table")
        classes = {table.script_class(s) for s in target_scripts}
        kept: Counter[str] = Counter()
        for word, count in word_counts.items():
            symbols = text_to_symbols(word)
            prof = profile_token(probe, table, symbols)
            if prof.scripts and prof.scripts <= classes:
                kept[word] = count
        word_counts = kept
    if not word_counts:
        raise SurgeryError("effective training corpus is empty")

    sequences: list[tuple[list[str], int]] = [
        (list(text_to_symbols(word)), count) for word, count in sorted(word_counts.items())
    ]

    candidates: list[CandidateMerge] = []
    for _step in range(max_candidates):
        pair_counts: Counter[tuple[str, str]] = Counter()
        for symbols, count in sequences:
            for a, b in zip(symbols, symbols[1:]):
                pair_counts[(a, b)] += count
        if not pair_counts:
            break
        best_pair, best_count = min(
            pair_counts.items(), key=lambda kv: (-kv[1], kv[0])
        )
        if best_count < 1:
            break
        merged = best_pair[0] + best_pair[1]
        for i, (symbols, count) in enumerate(sequences):
            j = 0
            out = []
            while j < len(symbols):
                if (
                    j < len(symbols) - 1
                    and symbols[j] == best_pair[0]
                    and symbols[j + 1] == best_pair[1]
                ):
                    out.append(merged)
                    j += 2
                else:
                    out.append(symbols[j])
                    j += 1
            sequences[i] = (out, count)
        cand = CandidateMerge(
            left=best_pair[0], right=best_pair[1], fire_count=best_count
        )
        if table is not None and probe is not None:
            prof = profile_token(probe, table, cand.composed)
            cand.scripts = prof.scripts
            cand.is_cross_script = prof.is_cross_script
        candidates.append(cand)
    return candidates


def filter_cross_script(
    candidates: list[CandidateMerge],
    table: ScriptTable,
    reference: TokenizerModel | None = None,
) -> tuple[list[CandidateMerge], list[CandidateMerge]]:
    """Partition candidates into (admissible, rejected) by the composed profile."""
    if reference is None:
        from .synthetic import byte_only_model

        reference = byte_only_model()
    admissible: list[CandidateMerge] = []
    rejected: list[CandidateMerge] = []
    for cand in candidates:
        prof = profile_token(reference, table, cand.composed)
        cand.scripts = prof.scripts
        cand.is_cross_script = prof.is_cross_script
        (rejected if prof.is_cross_script else admissible).append(cand)
    return admissible, rejected


@dataclass
class PlanEntry:
    token: str  # symbol-alphabet surface
    category: str  # char-infra | word-level | single-script | numeral | punctuation | artifact
    script: str = NEUTRAL
    merge: tuple[str, str] | None = None
    retained: bool = False  # artifact already present; kept, not inserted


@dataclass
class SurgeryPlan:
    removals: list[int]
    insertions: list[PlanEntry]
    new_merges: list[tuple[str, str]]

    def category_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for entry in self.insertions:
            counts[entry.category] = counts.get(entry.category, 0) + 1
        return counts

    def per_script_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for entry in self.insertions:
            if entry.category in ("single-script", "word-level", "char-infra"):
                counts[entry.script] = counts.get(entry.script, 0) + 1
        return counts

    @property
    def inserted(self) -> list[PlanEntry]:
        return [e for e in self.insertions if not e.retained]

    def summary(self) -> dict:
        return {
            "removals": len(self.removals),
            "insertions": len(self.inserted),
            "retained_artifacts": sum(1 for e in self.insertions if e.retained),
            "new_merges": len(self.new_merges),
            "merge_free_insertions": len(self.inserted) - len(self.new_merges),
            "by_category": self.category_counts(),
            "by_script": dict(sorted(self.per_script_counts().items())),
        }

    def save(self, path: str | Path) -> None:
        payload = dict(self.summary())
        payload["removal_ids"] = self.removals
        payload["entries"] = [
            {
                "token": e.token,
                "category": e.category,
                "script": e.script,
                "merge": list(e.merge) if e.merge else None,
                "retained": e.retained,
            }
            for e in self.insertions
        ]
        Path(path).write_text(
            json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8"
        )


def _pieces_under_merges(model: TokenizerModel, symbols: str) -> list[str]:
    return apply_merges(list(symbols), model.merge_ranks)


def _entry_for_text(
    model: TokenizerModel,
    table: ScriptTable,
    text: str,
    category: str,
) -> PlanEntry:
    """Build an insertion entry for a raw-text addition (word, numeral, ...).

    The composing rule policy: already reducible to one piece means the
    token is in the vocabulary (error); two pieces get a single new merge;
    deeper splits carry no rule and rely on whole-pretoken matching, which
    requires ignore_merges.
    """
    symbols = text_to_symbols(text)
    if symbols in model.vocab:
        raise SurgeryError(f"entry {text!r} is already in the vocabulary")
    prof = profile_token(model, table, symbols)
    if prof.is_cross_script:
        raise SurgeryError(f"entry {text!r} spans disjoint scripts {prof.scripts}")
    script = next(iter(prof.scripts)) if len(prof.scripts) == 1 else NEUTRAL
    pieces = _pieces_under_merges(model, symbols)
    if len(pieces) == 1:
        raise SurgeryError(f"entry {text!r} already composes to an existing token")
    if len(pieces) == 2:
        merge = (pieces[0], pieces[1])
    else:
        if not model.ignore_merges:
            raise SurgeryError(
                f"entry {text!r} needs {len(pieces) - 1} rules to compose and the "
                "model does not match whole pretokens"
            )
        merge = None
    return PlanEntry(token=symbols, category=category, script=script, merge=merge)


def assemble_plan(
    model: TokenizerModel,
    table: ScriptTable,
    dead: DeadSlotReport,
    allocation: AllocationResult,
    candidates_by_script: dict[str, list[CandidateMerge]],
    word_list: list[str] = (),
    numerals: list[str] = (),
    punctuation: list[str] = (),
    artifacts: list[str] = (),
) -> SurgeryPlan:
    """Balance dead-slot removals against typed insertions.

    Per-script slot counts come from the allocation; a script's word-level
    entries consume its slots first and ranked candidates fill the rest in
    training order (which preserves merge-input reachability). Numerals,
    punctuation and artifacts sit outside the per-script budget. The plan
    removes exactly as many dead slots as it inserts entries.
    """
    vocab = model.vocab
    entries: list[PlanEntry] = []
    seen: set[str] = set()

    words_by_script: dict[str, list[PlanEntry]] = {}
    for word in word_list:
        entry = _entry_for_text(model, table, word, "word-level")
        if entry.script == NEUTRAL:
            raise SurgeryError(f"word entry {word!r} carries no script")
        words_by_script.setdefault(entry.script, []).append(entry)

    for script in sorted(allocation.x):
        slots = allocation.x[script]
        script_words = words_by_script.pop(script, [])
        if len(script_words) > slots:
            raise SurgeryError(
                f"{script}: {len(script_words)} word entries exceed the "
                f"{slots}-slot allocation"
            )
        for entry in script_words:
            if entry.token in seen:
                raise SurgeryError(f"duplicate insertion {entry.token!r}")
            seen.add(entry.token)
            entries.append(entry)
        remaining = slots - len(script_words)
        for cand in candidates_by_script.get(script, []):
            if remaining == 0:
                break
            if cand.is_cross_script:
                continue
            composed = cand.composed
            if composed in vocab or composed in seen:
                continue
            prof = profile_token(model, table, composed)
            category = "char-infra" if prof.is_partial_char else "single-script"
            entries.append(
                PlanEntry(
                    token=composed,
                    category=category,
                    script=script,
                    merge=(cand.left, cand.right),
                )
            )
            seen.add(composed)
            remaining -= 1
        if remaining:
            raise SurgeryError(
                f"{script}: allocation wants {slots} slots but only "
                f"{slots - remaining} admissible insertions exist"
            )
    if words_by_script:
        leftover = sorted(words_by_script)
        raise SurgeryError(f"word entries for unallocated scripts: {leftover}")

    for text in numerals:
        entries.append(_category_entry(model, table, text, "numeral", seen))
    for text in punctuation:
        entries.append(_category_entry(model, table, text, "punctuation", seen))
    for text in artifacts:
        symbols = text_to_symbols(text)
        if symbols in vocab:
            # Inherited noise kept by policy: flagged, occupies no new slot.
            entries.append(
                PlanEntry(token=symbols, category="artifact", retained=True)
            )
        else:
            entries.append(_category_entry(model, table, text, "artifact", seen))

    inserted = [e for e in entries if not e.retained]
    new_merges = [e.merge for e in inserted if e.merge is not None]
    removable = removable_dead_tokens(model, dead, new_merges)
    id_to_token = model.id_to_token
    dead_ids = [t for t in dead.all_dead if id_to_token[t] in removable]
    if len(dead_ids) < len(inserted):
        raise InsufficientDeadSlotsError(len(inserted), len(dead_ids))
    removals = dead_ids[: len(inserted)]
    return SurgeryPlan(removals=removals, insertions=entries, new_merges=new_merges)


def removable_dead_tokens(
    model: TokenizerModel, dead: DeadSlotReport, new_merges: list[tuple[str, str]] = ()
) -> set[str]:
    """Dead tokens that are safe to remove.

    Two protections. A dead token an incoming rule references must survive,
    or the rule would point at nothing. And a dead token on the merge chain
    of any surviving token must survive: such intermediates fire zero times
    themselves (whole-token matches shadow them) but dropping their rules
    would re-route composition inside longer pretokens and change encodings
    of otherwise untouched text.
    """
    id_to_token = model.id_to_token
    dead_tokens = {id_to_token[t] for t in dead.all_dead}
    dead_tokens -= {side for merge in new_merges for side in merge}
    changed = True
    while changed:
        changed = False
        for left, right in model.merges:
            if (left + right) in dead_tokens:
                continue  # the whole chain below may go
            for side in (left, right):
                if side in dead_tokens:
                    dead_tokens.discard(side)
                    changed = True
    return dead_tokens


def _category_entry(model, table, text, category, seen) -> PlanEntry:
    entry = _entry_for_text(model, table, text, category)
    if entry.token in seen:
        raise SurgeryError(f"duplicate insertion {text!r}")
    seen.add(entry.token)
    return entry


def apply_surgery(model: TokenizerModel, plan: SurgeryPlan) -> TokenizerModel:
    """Swap dead slots for planned insertions; all-or-nothing.

    The vocabulary size is unchanged: each inserted entry takes over one
    freed ID (freed IDs assigned in ascending order). New merges append
    after every inherited rule. Inherited rules whose tokens were removed
    are dropped to keep closure.
    """
    id_to_token = model.id_to_token
    inserted = plan.inserted
    if len(plan.removals) != len(inserted):
        raise SurgeryError(
            f"plan is unbalanced: {len(plan.removals)} removals vs "
            f"{len(inserted)} insertions"
        )
    for tid in plan.removals:
        if tid not in id_to_token:
            raise SurgeryError(f"removal ID {tid} is not a normal token")

    removed_tokens = {id_to_token[tid] for tid in plan.removals}
    new_vocab = {
        tok: i for tok, i in model.vocab.items() if tok not in removed_tokens
    }
    for tid, entry in zip(sorted(plan.removals), inserted):
        if entry.token in new_vocab:
            raise SurgeryError(f"insertion {entry.token!r} already present")
        new_vocab[entry.token] = tid

    merges = [
        (left, right)
        for left, right in model.merges
        if left not in removed_tokens
        and right not in removed_tokens
        and (left + right) not in removed_tokens
    ]
    for left, right in plan.new_merges:
        if left not in new_vocab or right not in new_vocab or (left + right) not in new_vocab:
            raise SurgeryError(
                f"new merge ({left!r}, {right!r}) violates closure"
            )
        merges.append((left, right))

    out = model.replace(
        vocab=new_vocab,
        merges=merges,
        declared_size=model.size,
        name=f"{model.name}-surgered",
    )
    report = validate_model(out)
    if not report.ok:
        raise SurgeryError(
            "surgery would break model invariants: "
            + "; ".join(f.message for f in report.findings[:5])
        )
    return out


def untouched_by_plan(model: TokenizerModel, plan: SurgeryPlan, text: str | bytes) -> bool:
    """True when surgery cannot change this text's encoding.

    Two ways a plan touches a text: its pre-surgery encoding uses a removed
    ID, or the text contains an inserted entry's byte content (which lets a
    new whole-token match or appended rule fire).
    """
    from .scripts import token_bytes

    data = text if isinstance(text, bytes) else text.encode("utf-8", errors="surrogateescape")
    if set(encode(model, data).ids) & set(plan.removals):
        return False
    for entry in plan.inserted:
        if token_bytes(model, entry.token) in data:
            return False
    return True


def permute_ids(model: TokenizerModel, fires: FireCounts) -> TokenizerModel:
    """Reassign IDs in descending fire-count order; behaviorally neutral.

    Pinned special tokens keep their IDs. Everything else is ranked by
    (fire count descending, old ID ascending) and packed into the remaining
    ID slots in ascending order, so more frequent tokens get lower IDs.
    """
    pinned = {sp.id for sp in model.special_tokens if sp.pinned}
    free_ids = sorted(i for i in range(model.size) if i not in pinned)

    movable: list[tuple[int, int]] = []  # (old_id, fire)
    for _tok, i in model.vocab.items():
        movable.append((i, int(fires.counts[i])))
    for sp in model.special_tokens:
        if not sp.pinned:
            movable.append((sp.id, int(fires.counts[sp.id])))
    movable.sort(key=lambda pair: (-pair[1], pair[0]))
    mapping = {old: new for (old, _f), new in zip(movable, free_ids)}
    for i in pinned:
        mapping[i] = i

    new_vocab = {tok: mapping[i] for tok, i in model.vocab.items()}
    new_specials = [
        SpecialToken(surface=sp.surface, id=mapping[sp.id], pinned=sp.pinned, special=sp.special)
        for sp in model.special_tokens
    ]
    return model.replace(
        vocab=new_vocab,
        special_tokens=new_specials,
        name=model.name,
    )
