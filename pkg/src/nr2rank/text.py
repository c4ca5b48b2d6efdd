"""Extractive multi-document summarization on a sentence-similarity graph."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from nltk.stem import PorterStemmer

from .errors import ParameterError, ValidationError
from .graph import Graph
from .rankers import RankingResult, RankParams, rank

# fmt: off
STOPWORDS = frozenset("""
a about above after again against all am an and any are aren't as at be because
been before being below between both but by can can't cannot could couldn't did
didn't do does doesn't doing don't down during each few for from further had
hadn't has hasn't have haven't having he he'd he'll he's her here here's hers
herself him himself his how how's i i'd i'll i'm i've if in into is isn't it
it's its itself let's me more most mustn't my myself no nor not of off on once
only or other ought our ours ourselves out over own same shan't she she'd
she'll she's should shouldn't so some such than that that's the their theirs
them themselves then there there's these they they'd they'll they're they've
this those through to too under until up very was wasn't we we'd we'll we're
we've were weren't what what's when when's where where's which while who who's
whom why why's with won't would wouldn't you you'd you'll you're you've your
yours yourself yourselves also just s t d ll m o re ve y said says will
""".split())

ABBREVIATIONS = frozenset("""
mr. mrs. ms. dr. prof. sr. jr. st. vs. etc. inc. ltd. co. corp. gen. gov. sen.
rep. lt. col. capt. sgt. mt. ft. no. jan. feb. mar. apr. jun. jul. aug. sep.
sept. oct. nov. dec. u.s. u.k. u.n. e.g. i.e. a.m. p.m.
""".split())
# fmt: on

_TERMINATOR = re.compile(r"[.!?]+[\"')\]]*(?=\s|$)")
_WORD = re.compile(r"[a-z0-9]+")
_stemmer = PorterStemmer()


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    position: int
    raw: str
    tokens: tuple[str, ...] = ()

    @property
    def node_id(self) -> str:
        return f"{self.doc_id}:{self.position}"

    @property
    def word_count(self) -> int:
        return len(self.raw.split())


def _is_abbreviation(segment: str) -> bool:
    last = segment.split()[-1].lower().lstrip("\"'([")
    last = last.rstrip("\"')]")
    if last in ABBREVIATIONS:
        return True
    # initials such as "J." in "J. Smith"
    return len(last) == 2 and last[0].isalpha() and last[1] == "."


def split_sentences(doc: str, doc_id: str = "doc") -> list[Sentence]:
    """Rule-based segmentation at '.', '!' or '?' followed by whitespace."""
    pieces, start = [], 0
    for m in _TERMINATOR.finditer(doc):
        segment = doc[start:m.end()]
        if m.group().startswith(".") and len(m.group().rstrip("\"')]")) == 1 and _is_abbreviation(segment):
            continue
        pieces.append(segment)
        start = m.end()
    pieces.append(doc[start:])
    raws = [" ".join(p.split()) for p in pieces]
    return [Sentence(doc_id, i, raw) for i, raw in enumerate((r for r in raws if r), 1)]


def preprocess(s: Sentence, stopwords: Iterable[str] = STOPWORDS) -> Sentence:
    """Lowercase, keep alphanumeric runs, drop stopwords, Porter-stem."""
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    words = _WORD.findall(s.raw.lower())
    return replace(s, tokens=tuple(_stemmer.stem(w) for w in words if w not in stop))


def load_stopwords(path) -> frozenset[str]:
    text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.lower() for w in text.split())


@dataclass(frozen=True, eq=False)
class SentenceGraph:
    graph: Graph
    sentences: tuple[Sentence, ...]
    vectors: sp.csr_matrix
    threshold: float


def tfidf_vectors(sentences: Sequence[Sentence]) -> sp.csr_matrix:
    """Raw term counts times idf = 1 + ln(m / df), one row per sentence."""
    m = len(sentences)
    df = Counter(t for s in sentences for t in set(s.tokens))
    vocab = {t: i for i, t in enumerate(sorted(df))}
    idf = np.array([1.0 + math.log(m / df[t]) for t in sorted(df)])
    rows, cols, vals = [], [], []
    for i, s in enumerate(sentences):
        for t, c in sorted(Counter(s.tokens).items()):
            rows.append(i)
            cols.append(vocab[t])
            vals.append(c * idf[vocab[t]])
    return sp.csr_matrix((vals, (rows, cols)), shape=(m, len(vocab)))


def build_sentence_graph(sentences: Sequence[Sentence], threshold: float = 0.1) -> SentenceGraph:
    """Cosine-similarity graph over tf-idf vectors with unit self edges.

    Pairs with cosine >= ``threshold`` (and > 0) are linked with the cosine as
    weight. ``threshold=0`` therefore gives the dense weighted graph.
    """
    if not sentences:
        raise ValidationError("need at least one sentence")
    sentences = tuple(sentences)
    m = len(sentences)
    x = tfidf_vectors(sentences)
    norms = np.sqrt(np.asarray(x.multiply(x).sum(axis=1)).ravel())
    safe = np.where(norms > 0, norms, 1.0)
    xn = sp.diags(1.0 / safe) @ x
    cos = np.minimum((xn @ xn.T).toarray(), 1.0)
    upper = np.triu(cos, k=1)
    cos = upper + upper.T
    keep = (cos >= threshold) & (cos > 0)
    np.fill_diagonal(keep, False)
    w = sp.csr_matrix(np.where(keep, cos, 0.0)) + sp.identity(m, format="csr")
    w = w.tocsr()
    w.sort_indices()
    g = Graph(w, tuple(s.node_id for s in sentences))
    return SentenceGraph(g, sentences, x.tocsr(), threshold)


def position_prior(sentences: Sequence[Sentence], gamma: float) -> np.ndarray:
    """r(s) proportional to l^-gamma for a sentence at 1-based position l."""
    if gamma < 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    weights = np.array([float(s.position) ** -gamma for s in sentences])
    return weights / weights.sum()


def extract_summary(sg: SentenceGraph, ranking: RankingResult, budget: int) -> str:
    """Greedily take ranked sentences whose word count still fits ``budget``."""
    if budget < 1:
        raise ParameterError(f"budget must be >= 1, got {budget}")
    chosen, left = [], budget
    for i in ranking.indices:
        s = sg.sentences[i]
        if s.word_count <= left:
            chosen.append(s.raw)
            left -= s.word_count
        if left == 0:
            break
    return " ".join(chosen)


def prepare_cluster(
    docs: Sequence[str],
    doc_ids: Sequence[str] | None = None,
    threshold: float = 0.1,
    stopwords: Iterable[str] = STOPWORDS,
) -> SentenceGraph:
    if doc_ids is None:
        doc_ids = [f"d{i}" for i in range(len(docs))]
    if len(doc_ids) != len(docs):
        raise ValidationError("doc_ids and docs differ in length")
    stop = frozenset(stopwords)
    sentences = [preprocess(s, stop) for text, did in zip(docs, doc_ids) for s in split_sentences(text, did)]
    if not sentences:
        raise ValidationError("cluster contains no sentences")
    return build_sentence_graph(sentences, threshold)


def summarize_cluster(
    docs: Sequence[str],
    algorithm: str = "nr2",
    params: RankParams | None = None,
    gamma: float = 0.5,
    threshold: float = 0.1,
    budget: int = 100,
    doc_ids: Sequence[str] | None = None,
    stopwords: Iterable[str] = STOPWORDS,
    candidate_pool: int | None = None,
) -> str:
    """Split, vectorize, rank and extract a ``budget``-word summary.

    The ranker sees every sentence unless ``candidate_pool`` caps k.
    """
    if budget < 1:
        raise ParameterError(f"budget must be >= 1, got {budget}")
    sg = prepare_cluster(docs, doc_ids, threshold, stopwords)
    ranking = rank_cluster(sg, algorithm, params, gamma, candidate_pool)
    return extract_summary(sg, ranking, budget)


def rank_cluster(
    sg: SentenceGraph,
    algorithm: str = "nr2",
    params: RankParams | None = None,
    gamma: float = 0.5,
    candidate_pool: int | None = None,
) -> RankingResult:
    m = len(sg.sentences)
    k = m if candidate_pool is None else max(1, min(candidate_pool, m))
    params = replace(params or RankParams(), k=k)
    return rank(algorithm, sg.graph, position_prior(sg.sentences, gamma), params)
