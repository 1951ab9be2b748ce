"""Analysis artifact assembly.

Emits the run's analysis bundle into ``reports/``:

  (a) group_summary.csv      per-group purity summary
  (b) comparisons.csv        two-group tests (group_a, group_b, t, df, p, d)
  (c) perfect_purity.csv     purity == 1.0 candidates with contamination flags
  (d) component_onsets.csv / component_suffixes.csv
  (e) similarity.csv         per-condition face-similarity table
  (f) plots.json             plot series (histograms, purity vs sweep value)
  (g) summary.json           everything above plus provenance hashes

Missing inputs mark their section "skipped" rather than vanishing, and
regeneration over an unchanged store is byte-identical (stable sort
orders, floats pinned to 4 decimals).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .inventory import build_inventory
from .lexicon import GROUPS
from .metrics import pairwise_summary
from .stats import StatsError, group_summary, t_from_summary
from .store import EmbeddingRecord
from .wordlist import is_real_word

REASON_WHOLE_WORD = "whole_word_in_dictionary"
REASON_STEM_SUFFIX = "stem_plus_suffix"
REASON_ENTITY = "known_entity_list_hit"
REASON_MANUAL = "manual_review_required"

VERDICT_CLEAN = "clean"
VERDICT_CONTAMINATED = "contaminated"
VERDICT_NEEDS_REVIEW = "needs_review"

COMPARISON_PAIRS = (
    ("phonestheme", "random_pronounceable"),
    ("phonestheme", "negative_control"),
    ("random_pronounceable", "negative_control"),
)


@dataclass
class ContaminationFlag:
    surface: str
    reasons: list = field(default_factory=list)  # (reason, detail) pairs
    verdict: str = VERDICT_NEEDS_REVIEW
    rationale: str = ""

    @property
    def automated_reasons(self):
        return [r for r in self.reasons if r[0] != REASON_MANUAL]

    def reason_strings(self):
        out = []
        for reason, detail in self.reasons:
            out.append(f"{reason}({detail})" if detail else reason)
        return out


@dataclass(frozen=True)
class ComponentRow:
    cluster: str
    position: str  # onset | suffix
    mean_purity: float
    n: int


def contamination_screen(candidate, wordlist, entity_lists=(), inventory=None) -> ContaminationFlag:
    """Automated contamination heuristics for one candidate.

    Flags whole-word dictionary hits, transparent (dictionary word +
    inventory suffix) constructions, and entity-list hits.  Automation
    never declares "clean": unflagged candidates come back needs_review
    for manual adjudication.
    """
    surface = candidate if isinstance(candidate, str) else candidate.surface
    surface = surface.lower()
    inv = inventory or build_inventory()
    reasons = []
    if is_real_word(surface, wordlist):
        reasons.append((REASON_WHOLE_WORD, ""))
    for suffix in sorted((p.cluster for p in inv["suffixes"]), key=len, reverse=True):
        stem = surface[: -len(suffix)] if surface.endswith(suffix) else ""
        if len(stem) >= 2 and is_real_word(stem, wordlist):
            reasons.append((REASON_STEM_SUFFIX, f"stem={stem}"))
            break
    for entity_list in entity_lists:
        if surface in entity_list:
            reasons.append((REASON_ENTITY, getattr(entity_list, "source", "")))
    if reasons:
        return ContaminationFlag(surface=surface, reasons=reasons, verdict=VERDICT_CONTAMINATED)
    return ContaminationFlag(
        surface=surface,
        reasons=[(REASON_MANUAL, "")],
        verdict=VERDICT_NEEDS_REVIEW,
    )


def apply_adjudication(flag: ContaminationFlag, adjudications) -> ContaminationFlag:
    """Merge a manual adjudication entry ({verdict, rationale}) into a flag.

    "clean" requires both the automated pass and the manual entry; a clean
    adjudication on a surface with automated reasons is downgraded to
    needs_review so the disagreement stays visible.
    """
    entry = (adjudications or {}).get(flag.surface)
    if not entry:
        return flag
    verdict = entry.get("verdict", "").strip().lower()
    rationale = entry.get("rationale", "")
    if verdict not in (VERDICT_CLEAN, VERDICT_CONTAMINATED, VERDICT_NEEDS_REVIEW):
        return flag
    if verdict == VERDICT_CLEAN and flag.automated_reasons:
        flag.verdict = VERDICT_NEEDS_REVIEW
        flag.rationale = f"adjudicated clean but automated flags remain: {rationale}"
        return flag
    flag.verdict = verdict
    flag.rationale = rationale
    return flag


def component_analysis(purity_results, lexicon) -> list[ComponentRow]:
    """Mean purity per onset and per suffix over decomposable candidates."""
    purity_by_tag = {r.tag: r.purity for r in purity_results}
    buckets: dict[tuple, list] = {}
    for cand in lexicon.candidates:
        if cand.decomposition is None or cand.surface not in purity_by_tag:
            continue
        onset, _, suffix = cand.decomposition
        buckets.setdefault(("onset", onset), []).append(purity_by_tag[cand.surface])
        buckets.setdefault(("suffix", suffix), []).append(purity_by_tag[cand.surface])
    rows = [
        ComponentRow(cluster=cluster, position=position,
                     mean_purity=sum(vals) / len(vals), n=len(vals))
        for (position, cluster), vals in buckets.items()
    ]
    rows.sort(key=lambda r: (r.position, -r.mean_purity, r.cluster))
    return rows


# -- CSV / JSON rendering ------------------------------------------------------

def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.4f}"
    return str(x)


def _csv_bytes(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def _round(x, places=4):
    return None if x is None else round(float(x), places)


def load_purity_csv(path):
    """Rows of reports/purity.csv as dicts with typed fields."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append({
                "tag": row["tag"],
                "group": row["group"],
                "purity": float(row["purity"]),
                "n_images": int(row["n_images"]),
            })
    return out


class _PurityView:
    """Adapter so component_analysis can consume purity.csv rows."""

    def __init__(self, row):
        self.tag = row["tag"]
        self.purity = row["purity"]


def build_report(store, lexicon=None, wordlist=None, entity_lists=(),
                 adjudications=None, threshold=1.0):
    """Assemble and write the full report bundle; returns the summary dict."""
    reports = store.reports_dir
    sections = {}
    bundle_files = {}

    purity_path = reports / "purity.csv"
    purity_rows = load_purity_csv(purity_path) if purity_path.exists() else None

    # (a) group summary + (b) comparisons
    if purity_rows and lexicon is not None:
        by_group = {}
        for row in purity_rows:
            by_group.setdefault(row["group"], []).append(row["purity"])
        summaries = []
        for group in GROUPS:
            if group in by_group:
                summaries.append(group_summary(by_group[group], threshold, group=group))
        bundle_files["group_summary.csv"] = _csv_bytes(
            ["group", "n", "mean_purity", "std_dev", "median", "pass_count", "pass_rate"],
            [(s.group, s.n, s.mean, s.sample_sd, s.median, s.pass_count, s.pass_rate)
             for s in summaries],
        )
        sections["group_summary"] = {
            "status": "present",
            "rows": [
                {"group": s.group, "n": s.n, "mean": _round(s.mean),
                 "std_dev": _round(s.sample_sd), "median": _round(s.median),
                 "pass_count": s.pass_count, "pass_rate": _round(s.pass_rate)}
                for s in summaries
            ],
        }

        comparison_rows = []
        for a, b in COMPARISON_PAIRS:
            if len(by_group.get(a, [])) >= 2 and len(by_group.get(b, [])) >= 2:
                try:
                    comp = t_from_summary(
                        *_summary_triple(by_group[a]), *_summary_triple(by_group[b])
                    )
                except StatsError:
                    continue
                comparison_rows.append(
                    (a, b, comp.t_statistic, comp.degrees_of_freedom,
                     comp.p_two_tailed, comp.cohens_d)
                )
        bundle_files["comparisons.csv"] = _csv_bytes(
            ["group_a", "group_b", "t", "df", "p", "d"],
            [(a, b, t, int(df), _p_fmt(p), d) for a, b, t, df, p, d in comparison_rows],
        )
        sections["comparisons"] = {
            "status": "present",
            "rows": [
                {"group_a": a, "group_b": b, "t": _round(t), "df": int(df),
                 "p": float(f"{p:.6g}"), "d": _round(d)}
                for a, b, t, df, p, d in comparison_rows
            ],
        }
    else:
        reason = "purity.csv missing" if not purity_rows else "lexicon missing"
        sections["group_summary"] = {"status": "skipped", "reason": reason}
        sections["comparisons"] = {"status": "skipped", "reason": reason}

    # (c) perfect purity with contamination flags
    if purity_rows and lexicon is not None and wordlist is not None:
        perfect = [r for r in purity_rows if r["purity"] >= 1.0]
        group_order = {g: i for i, g in enumerate(GROUPS)}
        perfect.sort(key=lambda r: (group_order.get(r["group"], 99), r["tag"]))
        flag_rows = []
        flags_json = []
        for row in perfect:
            flag = contamination_screen(row["tag"], wordlist, entity_lists)
            flag = apply_adjudication(flag, adjudications)
            flag_rows.append((
                row["tag"], row["group"], row["purity"],
                ";".join(flag.reason_strings()), flag.verdict, flag.rationale,
            ))
            flags_json.append({
                "surface": row["tag"], "group": row["group"],
                "purity": _round(row["purity"]),
                "reasons": flag.reason_strings(),
                "verdict": flag.verdict, "rationale": flag.rationale,
            })
        bundle_files["perfect_purity.csv"] = _csv_bytes(
            ["surface", "group", "purity", "reasons", "verdict", "rationale"], flag_rows
        )
        sections["perfect_purity"] = {"status": "present", "rows": flags_json}
    else:
        sections["perfect_purity"] = {"status": "skipped",
                                      "reason": "purity, lexicon or wordlist missing"}

    # (d) component analysis
    if purity_rows and lexicon is not None:
        rows = component_analysis([_PurityView(r) for r in purity_rows], lexicon)
        for position, fname in (("onset", "component_onsets.csv"),
                                ("suffix", "component_suffixes.csv")):
            sub = [r for r in rows if r.position == position]
            bundle_files[fname] = _csv_bytes(
                ["cluster", "position", "mean_purity", "n"],
                [(r.cluster, r.position, r.mean_purity, r.n) for r in sub],
            )
        sections["components"] = {
            "status": "present",
            "rows": [
                {"cluster": r.cluster, "position": r.position,
                 "mean_purity": _round(r.mean_purity), "n": r.n}
                for r in rows
            ],
        }
    else:
        sections["components"] = {"status": "skipped", "reason": "purity or lexicon missing"}

    # (e) per-condition face similarity
    face_events = store.embedding_events("face")
    if face_events:
        summaries = _face_summaries(store, face_events)
        bundle_files["similarity.csv"] = _csv_bytes(
            ["condition", "n_images", "n_faces", "detection_rate", "avg_pairwise", "max_pairwise"],
            [(tag, s.n_images, s.n_faces, s.detection_rate, s.avg_pairwise, s.max_pairwise)
             for tag, s in summaries],
        )
        sections["similarity"] = {
            "status": "present",
            "rows": [
                {"condition": tag, "n_images": s.n_images, "n_faces": s.n_faces,
                 "detection_rate": _round(s.detection_rate),
                 "avg_pairwise": _round(s.avg_pairwise),
                 "max_pairwise": _round(s.max_pairwise)}
                for tag, s in summaries
            ],
        }
    else:
        sections["similarity"] = {"status": "skipped", "reason": "no face embeddings"}

    # (f) plot series
    series = []
    if purity_rows and lexicon is not None:
        for group in GROUPS:
            vals = [r["purity"] for r in purity_rows if r["group"] == group]
            if not vals:
                continue
            edges = [i / 16 for i in range(17)]
            counts = [0] * 16
            for v in vals:
                idx = min(int(v * 16), 15)
                counts[idx] += 1
            series.append({"label": f"purity_hist_{group}",
                           "x": [_round(e) for e in edges[:-1]], "y": counts})
    kind = store.plan.metadata.get("kind")
    if purity_rows and kind in ("cfg_sweep", "weight_sweep"):
        purity_by_tag = {r["tag"]: r["purity"] for r in purity_rows}
        if kind == "cfg_sweep":
            pairs = [(v, purity_by_tag.get(f"cfg{v:g}")) for v in store.plan.metadata["values"]]
            label = "purity_vs_cfg"
        else:
            pairs = []
            for w in store.plan.metadata["weights"]:
                tag = f"w{w:.2f}" + ("-baseline" if w == 0.0 else "")
                pairs.append((w, purity_by_tag.get(tag)))
            label = "purity_vs_adapter_weight"
        pairs = [(x, y) for x, y in pairs if y is not None]
        if pairs:
            series.append({"label": label,
                           "x": [_round(x) for x, _ in pairs],
                           "y": [_round(y) for _, y in pairs]})
    bundle_files["plots.json"] = (
        json.dumps({"series": series}, sort_keys=True, separators=(",", ":")) + "\n"
    ).encode("utf-8")
    sections["plots"] = {"status": "present" if series else "skipped",
                         "n_series": len(series)}

    # (g) summary with provenance
    failed = store.failed_jobs()
    provenance = {
        "run_id": store.run_id,
        "plan_name": store.plan.name,
        "plan_hash": store.plan.sha256(),
        "lexicon_sha256": lexicon.sha256() if lexicon is not None else None,
        "wordlist_sha256": getattr(wordlist, "sha256", None),
        "backend_ids": sorted({r.backend_id for r in store.done_records()}),
        "jobs_total": len(store.plan.jobs),
        "jobs_done": len(store.done_records()),
        "generation_failures": len(failed),
    }
    summary = {"sections": sections, "provenance": provenance}
    bundle_files["summary.json"] = (
        json.dumps(summary, sort_keys=True, separators=(",", ":")) + "\n"
    ).encode("utf-8")

    for name, data in bundle_files.items():
        (reports / name).write_bytes(data)
    return summary


def _summary_triple(values):
    s = group_summary(values)
    return (s.mean, s.sample_sd, s.n)


def _p_fmt(p):
    return f"{p:.6g}"


def _face_summaries(store, face_events):
    """Per-tag SimilaritySummary over recorded face embeddings."""
    vectors = {}
    path = store.embeddings_path("face")
    if path.exists():
        matrix, identities = store.read_embeddings("face")
        for row, ident in zip(matrix, identities):
            vectors[ident["job_id"]] = row
    by_tag = {}
    for ev in face_events:
        rec = EmbeddingRecord(
            job_id=ev["job_id"], modality="face",
            vector=vectors.get(ev["job_id"]),
            face_detected=bool(ev["face_detected"]),
            tag=ev["tag"], seed=ev["seed"],
        )
        by_tag.setdefault(ev["tag"], []).append(rec)
    out = []
    for tag in sorted(by_tag):
        records = sorted(by_tag[tag], key=lambda r: (r.seed, r.job_id))
        out.append((tag, pairwise_summary(records)))
    return out
