"""Ranked-retrieval evaluation: lift-curve threshold selection,
classification, confusion-matrix metrics, and micro-aggregated reports.

The experiment runner samples a candidate subset per query with a seeded
RNG, ranks it under each (annotation scheme, measure) pair, picks the
classification threshold at the maximum lift, and pools the resulting
confusion matrices per pair.
"""

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .retrieval import score_record
from .similarity import CONCEPT_MEASURES, LEXICAL_MEASURES, Measure

SCHEME_KEYWORD = "keyword"
SCHEME_CONCEPT = "concept"


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other):
        return ConfusionMatrix(
            self.tp + other.tp,
            self.fp + other.fp,
            self.fn + other.fn,
            self.tn + other.tn,
        )


@dataclass(frozen=True)
class MetricRecord:
    accuracy: float
    precision: float
    recall: float
    fallout_standard: float
    miss_rate: float
    f1: float
    precision_undefined: bool = False


def lift_curve(ranked_entries, judgments):
    """For each rank r: lift(r) = precision@r / base-rate.

    `judgments` maps stimulus key -> bool and must cover every entry.
    Raises when no entry is relevant (lift undefined).
    """
    keys = [k for k, _ in ranked_entries]
    missing = [k for k in keys if k not in judgments]
    if missing:
        raise ValidationError(f"unjudged stimuli: {missing[:5]}")
    n = len(keys)
    relevant_total = sum(1 for k in keys if judgments[k])
    if relevant_total == 0:
        raise ValidationError("no relevant item in the ranked list; lift undefined")
    base = Fraction(relevant_total, n)
    curve = []
    hits = 0
    for r, k in enumerate(keys, start=1):
        if judgments[k]:
            hits += 1
        curve.append((r, float(Fraction(hits, r) / base)))
    return curve


def select_threshold(curve):
    """Rank with the highest lift; ties broken by the smallest rank."""
    if not curve:
        raise ValidationError("empty lift curve")
    return max(curve, key=lambda rl: (rl[1], -rl[0]))[0]


def classify_at_threshold(ranked_entries, t):
    """Label exactly the top-t entries True."""
    n = len(ranked_entries)
    if not 1 <= t <= n:
        raise ValidationError(f"threshold {t} out of range 1..{n}")
    return {k: r <= t for r, (k, _) in enumerate(ranked_entries, start=1)}


def confusion(labels, judgments):
    if set(labels) != set(judgments):
        raise ValidationError("labels and judgments cover different stimuli")
    tp = fp = fn = tn = 0
    for k, predicted in labels.items():
        actual = judgments[k]
        if predicted and actual:
            tp += 1
        elif predicted and not actual:
            fp += 1
        elif not predicted and actual:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, fp, fn, tn)


def _ratio(num, den):
    return num / den if den else 0.0


def metrics(m):
    precision = _ratio(m.tp, m.tp + m.fp)
    recall = _ratio(m.tp, m.tp + m.fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    return MetricRecord(
        accuracy=_ratio(m.tp + m.tn, m.total),
        precision=precision,
        recall=recall,
        fallout_standard=_ratio(m.fp, m.fp + m.tn),
        miss_rate=_ratio(m.fn, m.fn + m.tp),
        f1=f1,
        precision_undefined=(m.tp + m.fp) == 0,
    )


def aggregate(matrices):
    """Micro-average: element-wise sum, then compute metrics once."""
    if not matrices:
        raise ValidationError("nothing to aggregate")
    total = ConfusionMatrix()
    for m in matrices:
        total = total + m
    return metrics(total)


@dataclass(frozen=True)
class ExperimentQuery:
    qid: str
    concept: str | None = None
    keyword: str | None = None

    def term_for(self, scheme):
        return self.concept if scheme == SCHEME_CONCEPT else self.keyword


@dataclass
class ExperimentConfig:
    candidate_size: int = 100
    seed: int = 0
    max_resamples: int = 5


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple  # ((scheme, measure, n_queries, MetricRecord), ...)
    notes: tuple


def _compatible(scheme, measure):
    if scheme == SCHEME_KEYWORD:
        return measure in LEXICAL_MEASURES
    return measure in CONCEPT_MEASURES


def run_experiment(corpus, graph, queries, judgments, measures, schemes, config):
    """Rank a sampled candidate subset per (scheme, measure, query), apply
    the lift-threshold classification rule, and micro-aggregate.

    `judgments` maps query id -> set of relevant stimulus keys over the
    whole corpus.  Queries whose sampled subset has no relevant item are
    resampled up to `config.max_resamples` times, then skipped with a note.
    """
    all_keys = sorted(r.key for r in corpus)
    records = {r.key: r for r in corpus}
    rows = []
    notes = []
    for scheme in sorted(schemes):
        for measure in sorted(measures, key=lambda m: Measure(m).value):
            measure = Measure(measure)
            if not _compatible(scheme, measure):
                continue
            matrices = []
            used = 0
            for query in sorted(queries, key=lambda q: q.qid):
                term = query.term_for(scheme)
                if term is None:
                    continue
                if query.qid not in judgments:
                    raise ValidationError(f"no judgments for query {query.qid}")
                relevant = judgments[query.qid]
                candidates = None
                for attempt in range(config.max_resamples + 1):
                    rng = random.Random(
                        f"{config.seed}:{scheme}:{measure.value}:"
                        f"{query.qid}:{attempt}"
                    )
                    size = min(config.candidate_size, len(all_keys))
                    sample = rng.sample(all_keys, size)
                    if any(k in relevant for k in sample):
                        candidates = sample
                        break
                if candidates is None:
                    notes.append(
                        f"query {query.qid} ({scheme}/{measure.value}): no "
                        f"relevant candidate after {config.max_resamples + 1} "
                        "samples; skipped"
                    )
                    continue
                scored = [
                    (k, score_record(measure, term, records[k], graph=graph))
                    for k in candidates
                ]
                scored.sort(key=lambda e: (-e[1], e[0]))
                local_judgments = {k: k in relevant for k, _ in scored}
                curve = lift_curve(scored, local_judgments)
                t = select_threshold(curve)
                labels = classify_at_threshold(scored, t)
                matrices.append(confusion(labels, local_judgments))
                used += 1
            if matrices:
                rows.append((scheme, measure.value, used, aggregate(matrices)))
            else:
                notes.append(f"{scheme}/{measure.value}: no usable queries")
    return ExperimentReport(rows=tuple(rows), notes=tuple(notes))


REPORT_COLUMNS = [
    "scheme",
    "measure",
    "queries",
    "accuracy",
    "precision",
    "recall",
    "fallout",
    "f_measure",
    "fallout_standard",
    "miss_rate",
    "f1_standard",
]


def report_to_tsv(report):
    lines = ["\t".join(REPORT_COLUMNS)]
    for scheme, measure, n, rec in report.rows:
        lines.append(
            "\t".join(
                [
                    scheme,
                    measure,
                    str(n),
                    f"{rec.accuracy:.4f}",
                    f"{rec.precision:.4f}",
                    f"{rec.recall:.4f}",
                    f"{rec.fallout_standard:.4f}",
                    f"{rec.f1:.4f}",
                    f"{rec.fallout_standard:.4f}",
                    f"{rec.miss_rate:.4f}",
                    f"{rec.f1:.4f}",
                ]
            )
        )
    for note in report.notes:
        lines.append(f"# {note}")
    return "\n".join(lines) + "\n"


def parse_judgments(text):
    """Parse `query-id<TAB>stimulus-id<TAB>0|1` lines into
    qid -> set-of-relevant-keys (only the 1 rows) plus qid -> judged keys."""
    from .errors import ParseError

    relevant = {}
    judged = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3 or parts[2] not in ("0", "1"):
            raise ParseError(
                f"expected `qid<TAB>stimulus<TAB>0|1`, got {raw!r}", line=lineno
            )
        qid, key, flag = parts
        judged.setdefault(qid, set()).add(key)
        relevant.setdefault(qid, set())
        if flag == "1":
            relevant[qid].add(key)
    return relevant, judged
