"""Deterministic experiment plans.

A plan is a named, ordered list of generation jobs.  Every builder is a
pure function of its inputs: replanning with the same arguments yields
the same job ids in the same order, which is what makes runs resumable
and cache keys stable.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field

PLAN_SCHEMA_VERSION = 1

# Default generation settings, recorded per job so runs are self-describing.
DEFAULT_WIDTH = 512
DEFAULT_HEIGHT = 512
DEFAULT_STEPS = 30
DEFAULT_GUIDANCE = 7.5

HUNT_SEED_RANGE = (1000, 1015)
HUNT_TEMPLATE = "a {candidate}"

ARM_SEED_RANGE = (1, 10)

SHADOW_POSITIVE_PROMPT = (
    "portrait of a woman, sharp angular bone structure, jet black slicked hair, "
    "harsh fluorescent lighting, cold blue-grey palette, severe expression, "
    "sunken eyes, skeletal features, 1980s corporate editorial, pale lips, "
    "high fashion, otherworldly, studio photography"
)

MARILYN_NEGATIVE_PROMPT = (
    "platinum blonde, blonde, golden hair, beauty mark, mole, red lips, "
    "red lipstick, 1950s, vintage, glamour, soft lighting, warm, breathy, "
    "vulnerable, curly hair, heart-shaped face, soft features, smile"
)

NEUTRAL_PROMPT = "portrait of a woman, studio photography"

QUALITY_NEGATIVE_PROMPT = "low quality, blurry, watermark"

DEFAULT_CFG_VALUES = (5.0, 7.0, 8.0, 9.0, 11.0)
DEFAULT_ADAPTER_WEIGHTS = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_SWEEP_SEEDS = (1, 2, 3)


class TemplateError(ValueError):
    """Prompt template does not contain exactly one placeholder."""


class RangeError(ValueError):
    """A sweep value is outside its legal interval."""


@dataclass(frozen=True)
class GenerationJob:
    job_id: str
    prompt: str
    negative_prompt: str
    seed: int
    guidance_scale: float
    adapter_weight: float | None
    width: int
    height: int
    steps: int
    tag: str

    def to_obj(self):
        return {
            "job_id": self.job_id,
            "prompt": self.prompt,
            "negative_prompt": self.negative_prompt,
            "seed": self.seed,
            "guidance_scale": self.guidance_scale,
            "adapter_weight": self.adapter_weight,
            "width": self.width,
            "height": self.height,
            "steps": self.steps,
            "tag": self.tag,
        }

    @classmethod
    def from_obj(cls, obj):
        return cls(**obj)


@dataclass
class ExperimentPlan:
    name: str
    jobs: list[GenerationJob]
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.jobs)

    def to_json_bytes(self) -> bytes:
        doc = {
            "schema_version": PLAN_SCHEMA_VERSION,
            "name": self.name,
            "metadata": self.metadata,
            "jobs": [j.to_obj() for j in self.jobs],
        }
        return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")

    @classmethod
    def from_json_bytes(cls, raw: bytes) -> "ExperimentPlan":
        doc = json.loads(raw.decode("utf-8"))
        if doc.get("schema_version") != PLAN_SCHEMA_VERSION:
            raise ValueError(f"unsupported plan schema {doc.get('schema_version')!r}")
        return cls(
            name=doc["name"],
            jobs=[GenerationJob.from_obj(o) for o in doc["jobs"]],
            metadata=doc.get("metadata", {}),
        )

    def sha256(self) -> str:
        return hashlib.sha256(self.to_json_bytes()).hexdigest()

    def job(self, job_id: str) -> GenerationJob:
        for j in self.jobs:
            if j.job_id == job_id:
                return j
        raise KeyError(job_id)


def _job_id(plan_name, fields):
    canonical = json.dumps({"plan": plan_name, **fields}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _make_job(plan_name, *, prompt, negative_prompt, seed, guidance_scale,
              adapter_weight, tag, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
              steps=DEFAULT_STEPS):
    if seed < 0:
        raise RangeError(f"seed must be >= 0, got {seed}")
    fields = {
        "prompt": prompt,
        "negative_prompt": negative_prompt,
        "seed": seed,
        "guidance_scale": guidance_scale,
        "adapter_weight": adapter_weight,
        "width": width,
        "height": height,
        "steps": steps,
        "tag": tag,
    }
    return GenerationJob(job_id=_job_id(plan_name, fields), **fields)


def _seed_list(seed_range):
    """Accept an inclusive (lo, hi) pair or any iterable of seeds."""
    if isinstance(seed_range, tuple) and len(seed_range) == 2 and all(
        isinstance(x, int) for x in seed_range
    ):
        lo, hi = seed_range
        if hi < lo:
            raise RangeError(f"empty seed interval {seed_range}")
        return list(range(lo, hi + 1))
    return [int(s) for s in seed_range]


_PLACEHOLDER = re.compile(r"\{[^{}]*\}")


def plan_crungus_hunt(lexicon, seed_range=HUNT_SEED_RANGE, template=HUNT_TEMPLATE,
                      guidance_scale=DEFAULT_GUIDANCE) -> ExperimentPlan:
    """One job per (candidate, seed): the full-lexicon coherence probe."""
    holes = _PLACEHOLDER.findall(template)
    if len(holes) != 1:
        raise TemplateError(f"template must contain exactly one placeholder: {template!r}")
    seeds = _seed_list(seed_range)
    name = "crungus-hunt"
    jobs = []
    for surface in sorted(lexicon.surfaces()):
        prompt = template.replace(holes[0], surface)
        for seed in seeds:
            jobs.append(_make_job(
                name, prompt=prompt, negative_prompt="", seed=seed,
                guidance_scale=guidance_scale, adapter_weight=None, tag=surface,
            ))
    metadata = {
        "lexicon_sha256": lexicon.sha256(),
        "inventory_version": lexicon.inventory_version,
        "template": template,
        "seeds": seeds,
        "kind": "crungus_hunt",
    }
    return ExperimentPlan(name=name, jobs=jobs, metadata=metadata)


ARM_PROMPTS = {
    "A": (SHADOW_POSITIVE_PROMPT, QUALITY_NEGATIVE_PROMPT),
    "B": (NEUTRAL_PROMPT, MARILYN_NEGATIVE_PROMPT),
    "C": (SHADOW_POSITIVE_PROMPT, MARILYN_NEGATIVE_PROMPT),
}


def plan_push_pull(arm, seed_range=ARM_SEED_RANGE, adapter_weight=None) -> ExperimentPlan:
    """One conditioning arm: A = push only, B = pull only, C = push + pull.

    adapter_weight None plans a base-model run; pass a weight to plan the
    same arm through a trained adapter.
    """
    arm = str(arm).strip().upper()
    if arm not in ARM_PROMPTS:
        raise RangeError(f"unknown arm {arm!r}; expected A, B or C")
    prompt, negative = ARM_PROMPTS[arm]
    seeds = _seed_list(seed_range)
    name = f"push-pull-arm{arm}"
    tag = f"arm{arm}"
    jobs = [
        _make_job(name, prompt=prompt, negative_prompt=negative, seed=seed,
                  guidance_scale=DEFAULT_GUIDANCE, adapter_weight=adapter_weight, tag=tag)
        for seed in seeds
    ]
    metadata = {"kind": "push_pull", "arm": arm, "seeds": seeds,
                "adapter_weight": adapter_weight}
    return ExperimentPlan(name=name, jobs=jobs, metadata=metadata)


def plan_cfg_sweep(cfg_values=DEFAULT_CFG_VALUES, seeds=DEFAULT_SWEEP_SEEDS,
                   base_prompt=NEUTRAL_PROMPT) -> ExperimentPlan:
    """Guidance-scale sweep at full adapter weight, seeds shared per value."""
    if not cfg_values or not seeds:
        raise RangeError("cfg sweep needs non-empty value and seed lists")
    seeds = [int(s) for s in seeds]
    name = "cfg-sweep"
    jobs = []
    for value in cfg_values:
        if value <= 0:
            raise RangeError(f"guidance scale must be positive, got {value}")
        tag = f"cfg{value:g}"
        for seed in seeds:
            jobs.append(_make_job(
                name, prompt=base_prompt, negative_prompt="", seed=seed,
                guidance_scale=float(value), adapter_weight=1.0, tag=tag,
            ))
    metadata = {"kind": "cfg_sweep", "values": [float(v) for v in cfg_values],
                "seeds": seeds, "base_prompt": base_prompt}
    return ExperimentPlan(name=name, jobs=jobs, metadata=metadata)


def plan_adapter_weight_sweep(weights=DEFAULT_ADAPTER_WEIGHTS, seeds=DEFAULT_SWEEP_SEEDS,
                              base_prompt=NEUTRAL_PROMPT) -> ExperimentPlan:
    """Adapter-weight sweep; weight 0.0 jobs are the no-adapter baseline."""
    if not weights or not seeds:
        raise RangeError("weight sweep needs non-empty weight and seed lists")
    seeds = [int(s) for s in seeds]
    name = "weight-sweep"
    jobs = []
    for weight in weights:
        w = float(weight)
        if not 0.0 <= w <= 1.0:
            raise RangeError(f"adapter weight must lie in [0, 1], got {weight}")
        tag = f"w{w:.2f}" + ("-baseline" if w == 0.0 else "")
        for seed in seeds:
            jobs.append(_make_job(
                name, prompt=base_prompt, negative_prompt="", seed=seed,
                guidance_scale=DEFAULT_GUIDANCE, adapter_weight=w, tag=tag,
            ))
    metadata = {"kind": "weight_sweep", "weights": [float(w) for w in weights],
                "seeds": seeds, "base_prompt": base_prompt}
    return ExperimentPlan(name=name, jobs=jobs, metadata=metadata)
