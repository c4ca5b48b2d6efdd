"""Diversity and summary-quality measures."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import spearmanr

from .errors import ParameterError
from .graph import Graph

_TOKEN = re.compile(r"[a-z0-9]+")


def density(g: Graph, nodes: Iterable[int]) -> float:
    """Fraction of ordered pairs u != v in ``nodes`` joined by a positive edge."""
    idx = np.array(sorted(set(int(v) for v in nodes)), dtype=np.int64)
    m = idx.size
    if m < 2:
        raise ParameterError("density needs at least two nodes")
    if g.absorbing is not None and g.absorbing in idx:
        raise ParameterError("density is undefined over the absorbing node")
    sub = g.weights[idx][:, idx].tocoo()
    linked = int(np.count_nonzero((sub.data > 0) & (sub.row != sub.col)))
    return linked / (m * (m - 1))


@dataclass(frozen=True)
class CoverageReport:
    attribute: str
    k: int
    unique_values: int


def attribute_coverage(g: Graph, nodes: Sequence[int], attribute: str) -> CoverageReport:
    """Number of distinct ``attribute`` values carried by ``nodes``."""
    if attribute not in g.attribute_names():
        raise ParameterError(f"unknown attribute {attribute!r}")
    seen: set[str] = set()
    for v in nodes:
        seen.update(g.attributes.get(int(v), {}).get(attribute, ()))
    return CoverageReport(attribute, len(nodes), len(seen))


def coverage_curve(g: Graph, nodes: Sequence[int], attribute: str) -> list[int]:
    """Coverage of every prefix of ``nodes``."""
    out, seen = [], set()
    for v in nodes:
        seen.update(g.attributes.get(int(v), {}).get(attribute, ()))
        out.append(len(seen))
    return out


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class RougeScore:
    recall: float
    overlap: int
    reference_total: int
    per_reference: tuple[float, ...] = ()


def rouge1_recall(candidate: str, references: Sequence[str]) -> RougeScore:
    """Clipped unigram recall, averaged over the non-empty references.

    ``overlap`` and ``reference_total`` are summed over references, so
    ``recall == overlap / reference_total`` holds for a single reference.
    """
    cand = Counter(tokenize(candidate))
    recalls, overlap, total = [], 0, 0
    for ref in references:
        ref_counts = Counter(tokenize(ref))
        n = sum(ref_counts.values())
        if n == 0:
            continue
        hit = sum(min(c, cand[t]) for t, c in ref_counts.items())
        recalls.append(hit / n)
        overlap += hit
        total += n
    if not recalls:
        raise ParameterError("rouge1_recall needs at least one non-empty reference")
    return RougeScore(float(np.mean(recalls)), overlap, total, tuple(recalls))


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation; a constant series counts as no trend (0.0)."""
    if len(set(x)) < 2 or len(set(y)) < 2:
        return 0.0
    return float(spearmanr(x, y).statistic)
