"""cryptidhunt: probing text-to-image latent space with morphological structure.

Library surface: build a pseudoword lexicon, plan deterministic
generation experiments, drive a generation/embedding backend (or the
built-in stub), and compute purity, similarity, and group statistics.
"""

__version__ = "0.1.0"

from .backend import BackendEndpoint, HttpBackend, embed_images, run_plan
from .inventory import build_inventory, compose, decompose
from .lexicon import CandidateWord, Lexicon, build_lexicon
from .metrics import PurityResult, SimilaritySummary, cosine_similarity, pairwise_summary, purity_at_1
from .planner import (
    ExperimentPlan,
    GenerationJob,
    plan_adapter_weight_sweep,
    plan_cfg_sweep,
    plan_crungus_hunt,
    plan_push_pull,
)
from .report import ContaminationFlag, build_report, component_analysis, contamination_screen
from .stats import GroupComparison, GroupSummary, group_summary, p_from_t, pooled_t, t_from_summary
from .store import EmbeddingRecord, ImageRecord, RunStore
from .stub import StubBackend, StubConcept, stub_embed, stub_generate
from .wordlist import WordlistHandle, default_wordlist, is_real_word

__all__ = [
    "BackendEndpoint", "HttpBackend", "embed_images", "run_plan",
    "build_inventory", "compose", "decompose",
    "CandidateWord", "Lexicon", "build_lexicon",
    "PurityResult", "SimilaritySummary", "cosine_similarity", "pairwise_summary", "purity_at_1",
    "ExperimentPlan", "GenerationJob",
    "plan_adapter_weight_sweep", "plan_cfg_sweep", "plan_crungus_hunt", "plan_push_pull",
    "ContaminationFlag", "build_report", "component_analysis", "contamination_screen",
    "GroupComparison", "GroupSummary", "group_summary", "p_from_t", "pooled_t", "t_from_summary",
    "EmbeddingRecord", "ImageRecord", "RunStore",
    "StubBackend", "StubConcept", "stub_embed", "stub_generate",
    "WordlistHandle", "default_wordlist", "is_real_word",
]
