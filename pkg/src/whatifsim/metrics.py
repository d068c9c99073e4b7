"""Corpus evaluation: BLEU-1..4 with aggregate BLEU, ROUGE-L, and the
correct-objects-mentioned (COM) score.

All metrics are per-sentence with a single reference; corpus scores are
arithmetic (macro) averages.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .core.catalog import ObjectClass, all_surface_forms
from .parsing.tokenize import tokenize_or_empty

_SURFACE_FORMS = all_surface_forms()

ROUGE_BETA = 1.2


@dataclass(frozen=True)
class EvalReport:
    bleu: float
    bleu_n: tuple[float, float, float, float]
    rouge_l: float
    com: float
    n_examples: int

    def as_table_row(self) -> dict[str, float]:
        return {
            "BLEU": self.bleu,
            "BLEU-1": self.bleu_n[0],
            "BLEU-2": self.bleu_n[1],
            "BLEU-3": self.bleu_n[2],
            "BLEU-4": self.bleu_n[3],
            "ROUGE": self.rouge_l,
            "COM": self.com,
        }


def mentioned_objects(text: str) -> set[ObjectClass]:
    """Classes named in the text, by canonical name or any synonym.

    Longest match wins at each position and matches do not overlap; the
    result is a set, so repeats collapse.
    """
    tokens = tokenize_or_empty(text)
    found: set[ObjectClass] = set()
    i = 0
    while i < len(tokens):
        matched = False
        for form, cls in _SURFACE_FORMS:
            k = len(form)
            if tuple(tokens[i : i + k]) == form:
                found.add(cls)
                i += k
                matched = True
                break
        if not matched:
            i += 1
    return found


def com(prediction: str, reference: str) -> float:
    """Intersection over union of the mentioned-object sets. Two texts that
    both mention nothing agree perfectly and score 1."""
    p = mentioned_objects(prediction)
    r = mentioned_objects(reference)
    if not p and not r:
        return 1.0
    union = p | r
    return len(p & r) / len(union)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_n(prediction: str, reference: str, n: int) -> float:
    """Modified (clipped) n-gram precision of order n.

    A prediction shorter than n scores 0 against a reference that has
    n-grams; if neither side has any n-grams the match is vacuous and
    scores 1 (so identical short sentences keep a perfect score).
    """
    if n not in (1, 2, 3, 4):
        raise ValueError("n must be in 1..4")
    pred = tokenize_or_empty(prediction)
    ref = tokenize_or_empty(reference)
    p_counts = _ngrams(pred, n)
    r_counts = _ngrams(ref, n)
    total = sum(p_counts.values())
    if total == 0:
        return 1.0 if not r_counts else 0.0
    clipped = sum(min(c, r_counts[g]) for g, c in p_counts.items())
    return clipped / total


def bleu(prediction: str, reference: str) -> float:
    """Brevity penalty times the geometric mean of the four clipped precisions."""
    precisions = [bleu_n(prediction, reference, n) for n in (1, 2, 3, 4)]
    if any(p == 0.0 for p in precisions):
        return 0.0
    c = len(tokenize_or_empty(prediction))
    r = len(tokenize_or_empty(reference))
    if c == 0:
        return 1.0 if r == 0 else 0.0
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return bp * math.exp(sum(math.log(p) for p in precisions) / 4.0)


def _lcs_length(a: list[str], b: list[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[len(b)]


def rouge_l(prediction: str, reference: str) -> float:
    """Longest-common-subsequence F-measure with beta = 1.2."""
    pred = tokenize_or_empty(prediction)
    ref = tokenize_or_empty(reference)
    if not pred or not ref:
        return 1.0 if not pred and not ref else 0.0
    lcs = _lcs_length(pred, ref)
    if lcs == 0:
        return 0.0
    p = lcs / len(pred)
    r = lcs / len(ref)
    b2 = ROUGE_BETA * ROUGE_BETA
    return (1.0 + b2) * p * r / (r + b2 * p)


def evaluate_corpus(pairs: list[tuple[str, str]]) -> EvalReport:
    """Macro-averaged metrics over (prediction, reference) pairs."""
    if not pairs:
        raise ValueError("no examples to evaluate")
    n = len(pairs)
    bleu_total = 0.0
    bleu_n_totals = [0.0, 0.0, 0.0, 0.0]
    rouge_total = 0.0
    com_total = 0.0
    for pred, ref in pairs:
        bleu_total += bleu(pred, ref)
        for k in range(4):
            bleu_n_totals[k] += bleu_n(pred, ref, k + 1)
        rouge_total += rouge_l(pred, ref)
        com_total += com(pred, ref)
    return EvalReport(
        bleu_total / n,
        tuple(v / n for v in bleu_n_totals),  # type: ignore[arg-type]
        rouge_total / n,
        com_total / n,
        n,
    )
