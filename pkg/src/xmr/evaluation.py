"""Rule-quality metrics, threshold sweeps, and score normalization.

Metrics are averaged over photo streams.  All per-stream arithmetic is
exact (integer set counting and Fractions); floats appear only when a
report is serialized or rendered.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import AlignmentError, BoundsError, EmptyInputError
from .inference import ConceptSet, infer_stream
from .ingest import Story, Vocabulary
from .miner import mine_frequent
from .rules import generate_rules
from .transactions import Transaction, TransactionDatabase, preprocess_tokens


@dataclass(frozen=True)
class EvalStream:
    """One evaluation unit: a five-image story and its reference word set."""

    story_id: str
    transactions: tuple[Transaction, ...]
    reference: frozenset[str]


@dataclass(frozen=True)
class EvalReport:
    n_streams: int
    num: Fraction
    hit: Fraction
    zero: Fraction
    precision: Fraction
    recall: Fraction
    f1: Fraction
    f1_pooled: Fraction
    supp_min: int | None = None
    conf_min: Fraction | None = None
    rule_count: int | None = None

    def as_json_dict(self) -> dict:
        record = {}
        if self.supp_min is not None:
            record["supp_min"] = self.supp_min
        if self.conf_min is not None:
            record["conf_min"] = [self.conf_min.numerator, self.conf_min.denominator]
        if self.rule_count is not None:
            record["rule_count"] = self.rule_count
        record.update({
            "num": float(self.num),
            "hit": float(self.hit),
            "zero": float(self.zero),
            "precision": float(self.precision),
            "recall": float(self.recall),
            "f1": float(self.f1),
            "f1_pooled": float(self.f1_pooled),
        })
        return record


def reference_labels(story: Story, vocab: Vocabulary, text_mode: str) -> set[str]:
    """The story's reference word set: preprocessed tokens of all five
    sentences, restricted to vocabulary words (the only words a rule can
    ever produce)."""
    labels: set[str] = set()
    for image in story.images:
        for word in preprocess_tokens(image.tokens, text_mode):
            if word in vocab:
                labels.add(word)
    return labels


def _harmonic(p: Fraction, r: Fraction) -> Fraction:
    if p == 0 and r == 0:
        return Fraction(0)
    return 2 * p * r / (p + r)


def evaluate(
    inferences: list[ConceptSet],
    references: list[tuple[str, set[str]]],
    supp_min: int | None = None,
    conf_min: Fraction | None = None,
    rule_count: int | None = None,
) -> EvalReport:
    """Score inferred concepts against references, aligned by story_id.

    Per stream: num = |S|, hit = |S ∩ R|, precision = hit/num, recall =
    hit/|R| (zero denominators score 0), f1 = harmonic mean.  The report
    holds the per-stream means; ``f1_pooled`` is instead the harmonic mean
    of the report-level precision and recall.
    """
    if len(inferences) != len(references):
        raise AlignmentError(
            f"{len(inferences)} inferences vs {len(references)} references"
        )
    if not inferences:
        raise EmptyInputError("no streams to evaluate")
    nums: list[int] = []
    hits: list[int] = []
    precisions: list[Fraction] = []
    recalls: list[Fraction] = []
    f1s: list[Fraction] = []
    zero_count = 0
    for concept_set, (ref_id, reference) in zip(inferences, references):
        if concept_set.story_id != ref_id:
            raise AlignmentError(
                f"inference for {concept_set.story_id!r} paired with "
                f"reference for {ref_id!r}"
            )
        inferred = concept_set.word_set()
        num = len(inferred)
        hit = len(inferred & reference)
        if num == 0:
            zero_count += 1
        prec = Fraction(hit, num) if num else Fraction(0)
        rec = Fraction(hit, len(reference)) if reference else Fraction(0)
        nums.append(num)
        hits.append(hit)
        precisions.append(prec)
        recalls.append(rec)
        f1s.append(_harmonic(prec, rec))
    n = len(inferences)
    mean_prec = sum(precisions, Fraction(0)) / n
    mean_rec = sum(recalls, Fraction(0)) / n
    return EvalReport(
        n_streams=n,
        num=Fraction(sum(nums), n),
        hit=Fraction(sum(hits), n),
        zero=Fraction(zero_count, n),
        precision=mean_prec,
        recall=mean_rec,
        f1=sum(f1s, Fraction(0)) / n,
        f1_pooled=_harmonic(mean_prec, mean_rec),
        supp_min=supp_min,
        conf_min=conf_min,
        rule_count=rule_count,
    )


DEFAULT_GRID: tuple[tuple[int, Fraction], ...] = (
    (10, Fraction(3, 5)),
    (5, Fraction(3, 5)),
    (3, Fraction(3, 5)),
    (3, Fraction(7, 10)),
    (3, Fraction(4, 5)),
)


def threshold_sweep(
    db: TransactionDatabase,
    grid,
    streams: list[EvalStream],
    strict: bool = False,
    threads: int = 1,
    tag: str = "sweep",
) -> list[EvalReport]:
    """Mine, generate, infer, and evaluate once per (supp_min, conf_min)
    grid point; reports come back in grid order."""
    if not grid:
        raise EmptyInputError("sweep grid is empty")
    if not streams:
        raise EmptyInputError("no evaluation streams")
    references = [(s.story_id, set(s.reference)) for s in streams]
    reports = []
    for supp_min, conf_min in grid:
        conf_min = Fraction(str(conf_min)) if isinstance(conf_min, float) else Fraction(conf_min)
        mining_floor = supp_min + 1 if strict else supp_min
        freq = mine_frequent(db, mining_floor)
        store = generate_rules(
            freq, conf_min, db.feature_dim, supp_min, db.vocabulary,
            tag=f"{tag}:s{supp_min}c{conf_min}", strict=strict,
        )

        def infer_one(stream: EvalStream) -> ConceptSet:
            return infer_stream(stream.story_id, list(stream.transactions), store)

        if threads > 1 and len(streams) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                inferences = list(pool.map(infer_one, streams))
        else:
            inferences = [infer_one(s) for s in streams]
        reports.append(evaluate(
            inferences, references,
            supp_min=supp_min, conf_min=conf_min, rule_count=len(store),
        ))
    return reports


def comprehensive_score(
    rows: list[dict[str, float]],
    lower_bounds: dict[str, float],
    upper_bounds: dict[str, float],
) -> list[float]:
    """Sum of per-metric min-max normalized scores, one total per row.

    Each metric value is mapped to (x - l) / (r - l) and clamped to [0, 1]
    before summing, so a value outside the stated bounds saturates instead
    of dragging the total outside its range.
    """
    for metric, lower in lower_bounds.items():
        upper = upper_bounds[metric]
        if upper <= lower:
            raise BoundsError(
                f"metric {metric!r}: upper bound {upper} must exceed lower {lower}"
            )
    scores = []
    for row in rows:
        total = 0.0
        for metric, lower in lower_bounds.items():
            upper = upper_bounds[metric]
            normalized = (row[metric] - lower) / (upper - lower)
            total += min(1.0, max(0.0, normalized))
        scores.append(total)
    return scores


def render_table(reports: list[EvalReport]) -> str:
    """Plain-text sweep table: thresholds then Num, Hit, Zero, Prec,
    Recall, F1 (and the pooled F1 variant last)."""
    header = (
        f"{'supp':>4} {'conf':>6} {'num':>7} {'hit':>7} {'zero':>7} "
        f"{'prec':>7} {'recall':>7} {'f1':>6} {'f1_pool':>7}"
    )
    lines = [header, "-" * len(header)]
    for r in reports:
        supp = "-" if r.supp_min is None else str(r.supp_min)
        conf = "-" if r.conf_min is None else f"{float(r.conf_min) * 100:.0f}%"
        lines.append(
            f"{supp:>4} {conf:>6} {float(r.num):>7.1f} {float(r.hit):>7.1f} "
            f"{float(r.zero) * 100:>6.1f}% {float(r.precision) * 100:>6.1f}% "
            f"{float(r.recall) * 100:>6.1f}% {float(r.f1):>6.3f} "
            f"{float(r.f1_pooled):>7.3f}"
        )
    return "\n".join(lines)


def save_reports(reports: list[EvalReport], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([r.as_json_dict() for r in reports], fh, indent=2)
        fh.write("\n")
