"""Command-line entry point: the pipeline as composable subcommands.

Every subcommand operates on a run directory, writes its artifact there,
and prints a one-line JSON summary to stdout.  Exit codes are stable
contracts: 0 success, 2 missing prerequisite artifact (named in the
message), 3 backend failure, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import report as report_mod
from .backend import (
    BackendEndpoint,
    BackendError,
    HttpBackend,
    RetryPolicy,
    embed_images,
    run_plan,
)
from .lexicon import DEFAULT_COUNTS, DEFAULT_SEED, ExhaustionError, Lexicon, build_lexicon
from .metrics import MetricError, purity_at_1
from .planner import (
    ARM_SEED_RANGE,
    DEFAULT_ADAPTER_WEIGHTS,
    DEFAULT_CFG_VALUES,
    DEFAULT_SWEEP_SEEDS,
    HUNT_SEED_RANGE,
    HUNT_TEMPLATE,
    NEUTRAL_PROMPT,
    ExperimentPlan,
    RangeError,
    TemplateError,
    plan_adapter_weight_sweep,
    plan_cfg_sweep,
    plan_crungus_hunt,
    plan_push_pull,
)
from .stats import StatsError, t_from_summary
from .store import RunStore, StoreError
from .stub import StubBackend, load_concept_map
from .wordlist import ConfigurationError, WordlistHandle, default_wordlist

ENV_BACKEND_URL = "CRYPTIDHUNT_BACKEND_URL"

EXIT_OK = 0
EXIT_MISSING = 2
EXIT_BACKEND = 3
EXIT_INVARIANT = 4


class MissingArtifact(RuntimeError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name


def _emit(obj):
    print(json.dumps(obj, sort_keys=True))


def _parse_seed_range(text):
    text = text.strip()
    for sep in ("..", "-"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return (int(lo), int(hi))
    value = int(text)
    return (value, value)


def _parse_int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _parse_float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _load_config(args):
    config = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise MissingArtifact(str(path))
        config = json.loads(path.read_text("utf-8"))
    return config


def _resolve(args, config, key, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _write_resolved_config(run_dir: Path, resolved: dict):
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.json").write_text(
        json.dumps(resolved, sort_keys=True, indent=2) + "\n", "utf-8"
    )


def _wordlist_from(args, config):
    path = _resolve(args, config, "wordlist")
    return WordlistHandle.from_path(path) if path else default_wordlist()


def _load_lexicon(run_dir: Path) -> Lexicon:
    path = run_dir / "lexicon.json"
    if not path.exists():
        raise MissingArtifact("lexicon.json")
    return Lexicon.from_json_bytes(path.read_bytes())


def _load_plan(run_dir: Path) -> ExperimentPlan:
    path = run_dir / "plan.json"
    if not path.exists():
        raise MissingArtifact("plan.json")
    return ExperimentPlan.from_json_bytes(path.read_bytes())


def _make_backend(args, config, kind):
    stub = bool(_resolve(args, config, "stub", False))
    backend_url = getattr(args, "backend_url", None) or os.environ.get(ENV_BACKEND_URL) \
        or config.get("backend_url")
    if stub:
        concepts, default = {}, None
        concept_path = _resolve(args, config, "concept_map")
        master_seed = int(_resolve(args, config, "master_seed", 0))
        max_in_flight = int(_resolve(args, config, "max_in_flight", 4))
        if concept_path:
            if not Path(concept_path).exists():
                raise MissingArtifact(str(concept_path))
            concepts, default = load_concept_map(concept_path)
        backend = StubBackend(concepts, master_seed=master_seed, max_in_flight=max_in_flight)
        if default is not None:
            backend.default = default
        return backend
    if not backend_url:
        raise MissingArtifact("backend_url (flag, config, or $" + ENV_BACKEND_URL + ")")
    endpoint = BackendEndpoint(
        base_url=backend_url,
        kind=kind,
        timeout=float(_resolve(args, config, "timeout", 120.0)),
        max_in_flight=int(_resolve(args, config, "max_in_flight", 4)),
    )
    retry = None
    if "retry_backoff" in config:
        retry = RetryPolicy(backoff=tuple(float(x) for x in config["retry_backoff"]))
    return HttpBackend(endpoint, retry=retry)


# -- subcommands ---------------------------------------------------------------

def cmd_lexicon(args):
    config = _load_config(args)
    run_dir = Path(args.run_dir)
    wordlist = _wordlist_from(args, config)
    counts = tuple(_parse_int_list(args.counts)) if args.counts else DEFAULT_COUNTS
    lexicon = build_lexicon(seed=args.seed, counts=counts, wordlist=wordlist)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "lexicon.json").write_bytes(lexicon.to_json_bytes())
    _write_resolved_config(run_dir, {
        "command": "lexicon", "seed": args.seed, "counts": list(counts),
        "wordlist_sha256": wordlist.sha256, "wordlist_source": wordlist.source,
    })
    _emit({
        "command": "lexicon",
        "path": str(run_dir / "lexicon.json"),
        "candidates": len(lexicon),
        "groups": lexicon.group_counts(),
        "sha256": lexicon.sha256(),
    })
    return EXIT_OK


def _build_plan(args, run_dir):
    kind = args.kind
    if kind == "crungus-hunt":
        lexicon = _load_lexicon(run_dir)
        seeds = _parse_seed_range(args.seeds) if args.seeds else HUNT_SEED_RANGE
        return plan_crungus_hunt(lexicon, seeds, args.template or HUNT_TEMPLATE)
    if kind == "push-pull":
        if not args.arm:
            raise TemplateError("push-pull requires --arm A|B|C")
        seeds = _parse_seed_range(args.seeds) if args.seeds else ARM_SEED_RANGE
        return plan_push_pull(args.arm, seeds, adapter_weight=args.adapter_weight)
    if kind == "cfg-sweep":
        values = _parse_float_list(args.values) if args.values else DEFAULT_CFG_VALUES
        seeds = _parse_int_list(args.seeds) if args.seeds else DEFAULT_SWEEP_SEEDS
        return plan_cfg_sweep(values, seeds, args.prompt or NEUTRAL_PROMPT)
    if kind == "weight-sweep":
        weights = _parse_float_list(args.values) if args.values else DEFAULT_ADAPTER_WEIGHTS
        seeds = _parse_int_list(args.seeds) if args.seeds else DEFAULT_SWEEP_SEEDS
        return plan_adapter_weight_sweep(weights, seeds, args.prompt or NEUTRAL_PROMPT)
    raise RangeError(f"unknown plan kind {kind!r}")


def cmd_plan(args):
    run_dir = Path(args.run_dir)
    plan = _build_plan(args, run_dir)
    plan_path = run_dir / "plan.json"
    run_dir.mkdir(parents=True, exist_ok=True)
    if plan_path.exists():
        existing = ExperimentPlan.from_json_bytes(plan_path.read_bytes())
        if existing.sha256() != plan.sha256() and (run_dir / "manifest.jsonl").exists():
            raise StoreError(
                "run directory already holds a started run of a different plan"
            )
    plan_path.write_bytes(plan.to_json_bytes())
    _emit({
        "command": "plan",
        "name": plan.name,
        "jobs": len(plan.jobs),
        "sha256": plan.sha256(),
        "path": str(plan_path),
    })
    return EXIT_OK


def cmd_run(args):
    config = _load_config(args)
    run_dir = Path(args.run_dir)
    plan = _load_plan(run_dir)
    backend = _make_backend(args, config, "generation")
    store = RunStore.open_run(run_dir, plan)
    records = run_plan(plan, backend, store, max_in_flight=args.max_in_flight)
    failed = store.failed_jobs()
    _emit({
        "command": "run",
        "plan": plan.name,
        "jobs": len(plan.jobs),
        "done": len(records),
        "failed": len(failed),
    })
    return EXIT_OK if not failed else EXIT_BACKEND


def cmd_embed(args):
    config = _load_config(args)
    run_dir = Path(args.run_dir)
    plan = _load_plan(run_dir)
    if not (run_dir / "manifest.jsonl").exists():
        raise MissingArtifact("manifest.jsonl")
    kind = "face_embedding" if args.modality == "face" else "image_embedding"
    backend = _make_backend(args, config, kind)
    store = RunStore.open_run(run_dir, plan)
    records = store.done_records()
    if not records:
        raise MissingArtifact("images (run stage has not completed any jobs)")
    embedded = embed_images(records, args.modality, backend, store,
                            max_in_flight=args.max_in_flight)
    detected = sum(1 for r in embedded if r.vector is not None)
    _emit({
        "command": "embed",
        "modality": args.modality,
        "records": len(embedded),
        "with_vector": detected,
        "path": str(store.embeddings_path(args.modality)),
    })
    return EXIT_OK


def cmd_purity(args):
    run_dir = Path(args.run_dir)
    plan = _load_plan(run_dir)
    store = RunStore.open_run(run_dir, plan)
    path = store.embeddings_path("image_clip")
    if not path.exists():
        raise MissingArtifact("embeddings/image_clip.embx")
    matrix, identities = store.read_embeddings("image_clip")
    tags = [i["tag"] for i in identities]
    results = purity_at_1(matrix, tags)
    groups = {}
    lex_path = run_dir / "lexicon.json"
    if lex_path.exists():
        lexicon = Lexicon.from_json_bytes(lex_path.read_bytes())
        groups = {c.surface: c.group for c in lexicon.candidates}
    rows = [(r.tag, groups.get(r.tag, ""), r.purity, r.n_images) for r in results]
    data = report_mod._csv_bytes(["tag", "group", "purity", "n_images"], rows)
    out = store.reports_dir / "purity.csv"
    out.write_bytes(data)
    mean_purity = sum(r.purity for r in results) / len(results) if results else 0.0
    _emit({
        "command": "purity",
        "tags": len(results),
        "rows": len(matrix),
        "mean_purity": round(mean_purity, 4),
        "path": str(out),
    })
    return EXIT_OK


def cmd_facesim(args):
    run_dir = Path(args.run_dir)
    plan = _load_plan(run_dir)
    store = RunStore.open_run(run_dir, plan)
    events = store.embedding_events("face")
    if not events:
        raise MissingArtifact("embeddings/face.embx")
    summaries = report_mod._face_summaries(store, events)
    rows = [
        (tag, s.n_images, s.n_faces, s.detection_rate, s.avg_pairwise, s.max_pairwise)
        for tag, s in summaries
    ]
    data = report_mod._csv_bytes(
        ["condition", "n_images", "n_faces", "detection_rate", "avg_pairwise", "max_pairwise"],
        rows,
    )
    out = store.reports_dir / "similarity.csv"
    out.write_bytes(data)
    _emit({
        "command": "facesim",
        "conditions": len(rows),
        "path": str(out),
    })
    return EXIT_OK


def cmd_stats(args):
    run_dir = Path(args.run_dir)
    purity_path = run_dir / "reports" / "purity.csv"
    if not purity_path.exists():
        raise MissingArtifact("reports/purity.csv")
    rows = report_mod.load_purity_csv(purity_path)
    by_group = {}
    for row in rows:
        by_group.setdefault(row["group"], []).append(row["purity"])
    if args.compare:
        pairs = [tuple(args.compare.split(":", 1))]
    else:
        pairs = list(report_mod.COMPARISON_PAIRS)
    out_rows = []
    for a, b in pairs:
        if a not in by_group or b not in by_group:
            raise MissingArtifact(f"group {a if a not in by_group else b} in purity.csv")
        ga, gb = by_group[a], by_group[b]
        if len(ga) < 2 or len(gb) < 2:
            raise StatsError(f"comparison {a}:{b} needs n >= 2 per group")
        comp = t_from_summary(*report_mod._summary_triple(ga), *report_mod._summary_triple(gb))
        out_rows.append({
            "group_a": a, "group_b": b,
            "t": round(comp.t_statistic, 4),
            "df": int(comp.degrees_of_freedom),
            "p": float(f"{comp.p_two_tailed:.6g}"),
            "d": round(comp.cohens_d, 4),
        })
    csv_rows = [(r["group_a"], r["group_b"], r["t"], r["df"], r["p"], r["d"])
                for r in out_rows]
    data = report_mod._csv_bytes(["group_a", "group_b", "t", "df", "p", "d"], csv_rows)
    out = run_dir / "reports" / "comparisons.csv"
    out.parent.mkdir(exist_ok=True)
    out.write_bytes(data)
    _emit({"command": "stats", "comparisons": out_rows, "path": str(out)})
    return EXIT_OK


def cmd_report(args):
    config = _load_config(args)
    run_dir = Path(args.run_dir)
    plan = _load_plan(run_dir)
    store = RunStore.open_run(run_dir, plan)
    lexicon = None
    if (run_dir / "lexicon.json").exists():
        lexicon = Lexicon.from_json_bytes((run_dir / "lexicon.json").read_bytes())
    wordlist = _wordlist_from(args, config)
    entity_lists = [WordlistHandle.from_path(p) for p in (args.entity_list or [])]
    adjudications = None
    if args.adjudications:
        if not Path(args.adjudications).exists():
            raise MissingArtifact(args.adjudications)
        adjudications = json.loads(Path(args.adjudications).read_text("utf-8"))
    summary = report_mod.build_report(
        store, lexicon=lexicon, wordlist=wordlist,
        entity_lists=entity_lists, adjudications=adjudications,
        threshold=args.threshold,
    )
    _emit({
        "command": "report",
        "sections": {k: v["status"] for k, v in summary["sections"].items()},
        "reports_dir": str(store.reports_dir),
    })
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="cryptidhunt",
        description="Phonestheme pseudoword probes of text-to-image latent space",
    )
    parser.add_argument("--run-dir", default="run", help="run directory (default: ./run)")
    parser.add_argument("--config", help="JSON config file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lexicon", help="generate the candidate lexicon")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--counts", help="phonestheme,random,positive,negative (default 200,100,4,50)")
    p.add_argument("--wordlist", help="newline-delimited wordlist replacing the bundled one")
    p.set_defaults(func=cmd_lexicon)

    p = sub.add_parser("plan", help="build an experiment plan")
    p.add_argument("kind", choices=["crungus-hunt", "push-pull", "cfg-sweep", "weight-sweep"])
    p.add_argument("--arm", choices=["A", "B", "C"])
    p.add_argument("--seeds", help="seed interval a..b (hunt/arms) or list a,b,c (sweeps)")
    p.add_argument("--template", help="prompt template with one placeholder")
    p.add_argument("--values", help="sweep values, comma separated")
    p.add_argument("--prompt", help="base prompt for sweeps")
    p.add_argument("--adapter-weight", type=float, help="adapter weight for push-pull arms")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("run", help="execute the plan against a backend")
    _backend_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("embed", help="embed stored images")
    p.add_argument("--modality", choices=["image_clip", "face"], default="image_clip")
    _backend_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("purity", help="nearest-neighbor purity per tag")
    p.set_defaults(func=cmd_purity)

    p = sub.add_parser("facesim", help="pairwise face-similarity per condition")
    p.set_defaults(func=cmd_facesim)

    p = sub.add_parser("stats", help="two-group comparisons over purity scores")
    p.add_argument("--compare", help="pair as group_a:group_b (default: the three standard pairs)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="assemble the full report bundle")
    p.add_argument("--adjudications", help="JSON map surface -> {verdict, rationale}")
    p.add_argument("--entity-list", action="append", help="entity wordlist (repeatable)")
    p.add_argument("--wordlist", help="override the bundled wordlist")
    p.add_argument("--threshold", type=float, default=1.0)
    p.set_defaults(func=cmd_report)

    return parser


def _backend_flags(p):
    p.add_argument("--stub", action="store_true", default=None,
                   help="use the deterministic stub backend")
    p.add_argument("--concept-map", dest="concept_map",
                   help="stub concept map JSON")
    p.add_argument("--master-seed", dest="master_seed", type=int,
                   help="stub master seed (default 0)")
    p.add_argument("--backend-url", dest="backend_url",
                   help=f"wire-protocol endpoint (or ${ENV_BACKEND_URL})")
    p.add_argument("--max-in-flight", dest="max_in_flight", type=int)
    p.add_argument("--timeout", type=float)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MissingArtifact as exc:
        _emit({"error": "missing_artifact", "artifact": exc.name,
               "command": args.command})
        return EXIT_MISSING
    except ConfigurationError as exc:
        _emit({"error": "configuration", "detail": str(exc), "command": args.command})
        return EXIT_MISSING
    except BackendError as exc:
        _emit({"error": "backend", "detail": str(exc), "command": args.command})
        return EXIT_BACKEND
    except (StoreError, MetricError, StatsError, ExhaustionError,
            TemplateError, RangeError, AssertionError) as exc:
        _emit({"error": "invariant", "detail": str(exc), "command": args.command})
        return EXIT_INVARIANT


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
