"""retok: byte-level BPE vocabulary crop, audit, surgery, and evaluation."""

from .allocation import (
    AllocationProblem,
    AllocationResult,
    SaturationCurve,
    allocate,
    build_curve,
    compare_policies,
)
from .audit import (
    AuditFixtures,
    DeadSlotReport,
    FireCounts,
    byte_fragment_rate,
    classify_garbage,
    count_fires,
    find_dead_slots,
    read_corpus,
    run_audit_suite,
)
from .bpe import TokenSequence, decode, decode_text, encode
from .bytelevel import ByteBijection, bijection_map
from .crop import CropPlan, apply_crop, plan_crop
from .evaluate import (
    bytes_per_token,
    digit_grouping_check,
    fertility,
    merge_trace,
    regime_classify,
    token_volume,
)
from .model import (
    SpecialToken,
    TokenizerModel,
    ValidationReport,
    VocabDiff,
    load_tokenizer,
    save_tokenizer,
    validate_model,
)
from .pipeline import PipelineConfig, run_pipeline
from .scripts import (
    ScriptTable,
    TokenProfile,
    classify_codepoint,
    default_table,
    profile_token,
)
from .surgery import (
    CandidateMerge,
    SurgeryPlan,
    apply_surgery,
    assemble_plan,
    filter_cross_script,
    permute_ids,
    train_candidates,
)
from .verify import (
    VerifyReport,
    verify_max_byte_length,
    verify_no_cross_script_merges,
    verify_structural_identity,
    verify_unified,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationProblem",
    "AllocationResult",
    "AuditFixtures",
    "ByteBijection",
    "CandidateMerge",
    "CropPlan",
    "DeadSlotReport",
    "FireCounts",
    "PipelineConfig",
    "SaturationCurve",
    "ScriptTable",
    "SpecialToken",
    "SurgeryPlan",
    "TokenProfile",
    "TokenSequence",
    "TokenizerModel",
    "ValidationReport",
    "VerifyReport",
    "VocabDiff",
    "allocate",
    "apply_crop",
    "apply_surgery",
    "assemble_plan",
    "bijection_map",
    "build_curve",
    "byte_fragment_rate",
    "bytes_per_token",
    "classify_codepoint",
    "classify_garbage",
    "compare_policies",
    "count_fires",
    "decode",
    "decode_text",
    "default_table",
    "digit_grouping_check",
    "encode",
    "fertility",
    "filter_cross_script",
    "find_dead_slots",
    "load_tokenizer",
    "merge_trace",
    "permute_ids",
    "plan_crop",
    "profile_token",
    "read_corpus",
    "regime_classify",
    "run_audit_suite",
    "run_pipeline",
    "save_tokenizer",
    "token_volume",
    "train_candidates",
    "validate_model",
    "verify_max_byte_length",
    "verify_no_cross_script_merges",
    "verify_structural_identity",
    "verify_unified",
]
