"""Top-k ranking algorithms: PageRank, PPR, MMR, GRASSHOPPER, DivRank and NR2.

All argmax selections break ties toward the lowest node index.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterator

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ParameterError, SolverError, ValidationError
from .graph import Graph, TransitionMatrix, augment_absorbing, row_normalize
from .solver import Factorization, check_damping, factorize, solve

ALGORITHMS = ("pagerank", "ppr", "mmr", "grasshopper", "divrank", "nr2")

PRIOR_SUM_TOL = 1e-12


@dataclass(frozen=True)
class RankParams:
    damping: float = 0.85
    alpha: float = 0.5
    beta: float = 0.1
    k: int = 10
    lambda_mmr: float = 0.5
    divrank_iters: int = 100

    def __post_init__(self):
        check_damping(self.damping)
        if self.alpha < 0:
            raise ParameterError(f"alpha must be >= 0, got {self.alpha}")
        if not 0 <= self.beta <= 1:
            raise ParameterError(f"beta must lie in [0, 1], got {self.beta}")
        if not 0 <= self.lambda_mmr <= 1:
            raise ParameterError(f"lambda_mmr must lie in [0, 1], got {self.lambda_mmr}")
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if self.divrank_iters < 1:
            raise ParameterError(f"divrank_iters must be >= 1, got {self.divrank_iters}")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RankingResult:
    algorithm: str
    indices: tuple[int, ...]
    node_ids: tuple[str, ...]
    scores: tuple[float, ...]
    params: RankParams

    @property
    def entries(self) -> list[tuple[str, float]]:
        return list(zip(self.node_ids, self.scores))

    def __len__(self):
        return len(self.indices)


def _argmax(scores: np.ndarray, mask: np.ndarray | None = None) -> int:
    if mask is not None:
        scores = np.where(mask, scores, -np.inf)
    # np.argmax returns the first maximal index
    return int(np.argmax(scores))


def top_k(scores: np.ndarray, k: int) -> np.ndarray:
    return np.argsort(-np.asarray(scores), kind="stable")[:k]


def normalize_prior(r, n: int) -> np.ndarray:
    """Validate a nonnegative prior and scale it to unit sum."""
    r = np.asarray(r, dtype=float)
    if r.shape != (n,):
        raise ValidationError(f"prior has shape {r.shape}, expected ({n},)")
    if not np.all(np.isfinite(r)) or r.min(initial=0.0) < 0:
        raise ValidationError("prior must be finite and nonnegative")
    total = r.sum()
    if total <= 0:
        raise ValidationError("prior has zero total mass")
    return r / total


def _result(algorithm, g_ids, picks, scores, params) -> RankingResult:
    return RankingResult(
        algorithm,
        tuple(int(i) for i in picks),
        tuple(g_ids[i] for i in picks),
        tuple(float(s) for s in scores),
        params,
    )


# --
# PageRank family


def personalized_pagerank(w: TransitionMatrix, r, lam: float) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.min(initial=0.0) < 0:
        raise ValidationError("PPR prior must be nonnegative")
    return solve(factorize(w, lam), r)


def pagerank(w: TransitionMatrix, lam: float) -> np.ndarray:
    return personalized_pagerank(w, np.full(w.n, 1.0 / w.n), lam)


# --
# MMR


def mmr_rank(scores, g: Graph, lambda_mmr: float, k: int, params: RankParams | None = None) -> RankingResult:
    """Greedy maximal marginal relevance over raw graph similarities."""
    rel = np.asarray(scores, dtype=float)
    n = g.n
    if not 0 <= lambda_mmr <= 1:
        raise ParameterError(f"lambda_mmr must lie in [0, 1], got {lambda_mmr}")
    if k > n:
        raise ParameterError(f"k={k} exceeds node count {n}")
    sim = g.weights.tolil(copy=True)
    sim.setdiag(0)
    sim = sim.tocsr()

    candidate = np.ones(n, dtype=bool)
    max_sim = np.zeros(n)
    first = _argmax(rel)
    picks, picked_scores = [first], [rel[first]]
    candidate[first] = False
    for _ in range(1, k):
        max_sim = np.maximum(max_sim, sim.getrow(picks[-1]).toarray().ravel())
        objective = lambda_mmr * rel - (1.0 - lambda_mmr) * max_sim
        nxt = _argmax(objective, candidate)
        picks.append(nxt)
        picked_scores.append(objective[nxt])
        candidate[nxt] = False
    params = params or RankParams(k=k, lambda_mmr=lambda_mmr)
    return _result("mmr", g.node_ids, picks, picked_scores, params)


# --
# GRASSHOPPER


def grasshopper_visits(w: TransitionMatrix, r, lam: float, ranked) -> np.ndarray:
    """Expected visits to each transient node once ``ranked`` nodes absorb.

    The walk matrix is P = lam W + (1 - lam) 1 r'. Visits are the column
    means of N = (I - Q)^-1 over transient start states; the rank-one
    teleport term is handled with Sherman-Morrison so only the sparse part
    is factored. Absorbed nodes get 0.
    """
    n = w.n
    r = np.asarray(r, dtype=float)
    absorbed = np.zeros(n, dtype=bool)
    absorbed[list(ranked)] = True
    t = np.flatnonzero(~absorbed)
    if t.size == 0:
        return np.zeros(n)
    w_tt = w.matrix[t][:, t]
    # (I - Q)' = B + u 1'  with  B = (I - lam W_tt)',  u = -(1 - lam) r_t
    b_mat = (sp.identity(t.size, format="csc") - lam * w_tt.T).tocsc()
    u = -(1.0 - lam) * r[t]
    rhs = np.full(t.size, 1.0 / t.size)
    try:
        lu = splu(b_mat)
    except RuntimeError as exc:
        raise SolverError(f"singular transient block: {exc}") from exc
    x = lu.solve(rhs)
    y = lu.solve(u)
    denom = 1.0 + y.sum()
    if abs(denom) < 1e-14:
        raise SolverError("(I - Q) is singular")
    visits = x - y * (x.sum() / denom)
    out = np.zeros(n)
    out[t] = visits
    return out


def grasshopper_rank(w: TransitionMatrix, r, lam: float, k: int, node_ids=None, params: RankParams | None = None) -> RankingResult:
    n = w.n
    if k > n:
        raise ParameterError(f"k={k} exceeds node count {n}")
    lam = check_damping(lam)
    p = personalized_pagerank(w, r, lam)
    first = _argmax(p)
    picks, scores = [first], [p[first]]
    for _ in range(1, k):
        visits = grasshopper_visits(w, r, lam, picks)
        mask = np.ones(n, dtype=bool)
        mask[picks] = False
        nxt = _argmax(visits, mask)
        picks.append(nxt)
        scores.append(visits[nxt])
    node_ids = node_ids or tuple(str(i) for i in range(n))
    return _result("grasshopper", node_ids, picks, scores, params or RankParams(damping=lam, k=k))


# --
# DivRank


@dataclass(frozen=True)
class DivRankState:
    step: int
    visits: np.ndarray
    distribution: np.ndarray
    degree_norm: np.ndarray


def divrank_walk(w: TransitionMatrix, r, lam: float, iters: int) -> Iterator[DivRankState]:
    """Vertex-reinforced walk with cumulative visit counts.

    Yields the state after each step T = 1..iters; ``degree_norm`` is the
    D_T used to produce that step's distribution.
    """
    lam = check_damping(lam)
    if iters < 1:
        raise ParameterError("divrank needs at least one iteration")
    r = np.asarray(r, dtype=float)
    wm = w.matrix
    wt = wm.T.tocsr()
    visits = np.ones(w.n)
    pi = r.copy()
    for step in range(1, iters + 1):
        d = wm @ visits
        pi = (1.0 - lam) * r * pi.sum() + lam * visits * (wt @ (pi / d))
        visits = visits + pi
        yield DivRankState(step, visits, pi, d)


def divrank_rank(w: TransitionMatrix, r, lam: float, iters: int, k: int, node_ids=None, params: RankParams | None = None) -> RankingResult:
    if k > w.n:
        raise ParameterError(f"k={k} exceeds node count {w.n}")
    state = None
    for state in divrank_walk(w, r, lam, iters):
        pass
    picks = top_k(state.distribution, k)
    node_ids = node_ids or tuple(str(i) for i in range(w.n))
    params = params or RankParams(damping=lam, k=k, divrank_iters=iters)
    return _result("divrank", node_ids, picks, state.distribution[picks], params)


# --
# NR2


@dataclass(frozen=True)
class NR2Step:
    """One solve of the NR2 loop: the prior used, the scores, and the pick."""

    iteration: int
    prior: np.ndarray
    scores: np.ndarray
    pick: int


def _unit_or_uniform(values: np.ndarray) -> np.ndarray:
    total = values.sum()
    if total > 0:
        return values / total
    return np.full(values.size, 1.0 / values.size)


def nr2_prior(r_ext: np.ndarray, ranked: np.ndarray, unranked: np.ndarray, d: int, alpha: float, beta: float) -> np.ndarray:
    """Signed prior r* for one NR2 iteration over the augmented node set."""
    r_star = np.zeros_like(r_ext)
    r_star[ranked] = -alpha * _unit_or_uniform(r_ext[ranked])
    r_star[unranked] = (1.0 + alpha - beta) * _unit_or_uniform(r_ext[unranked])
    r_star[d] = beta
    return r_star


def nr2_factorize(g: Graph, damping: float) -> Factorization:
    """Factor (I - lam W') for the absorbing-augmented graph.

    The result depends only on (g, damping), so sweeps over alpha, beta, k
    or the prior can share it.
    """
    return factorize(row_normalize(augment_absorbing(g)), damping)


def nr2_steps(g: Graph, r, params: RankParams, factorization: Factorization | None = None) -> Iterator[NR2Step]:
    """Run the negative-reinforcement loop, yielding every solve.

    The graph gets an absorbing node d, (I - lam W') is factored once, and
    each later pick solves against a prior where ranked nodes carry -alpha,
    d carries beta and unranked nodes carry the remaining 1 + alpha - beta.
    """
    r = np.asarray(r, dtype=float)
    n = g.n
    if params.k > n:
        raise ParameterError(f"k={params.k} exceeds node count {n}")
    d = n
    r_ext = np.append(r, 0.0)
    r_ext = r_ext / r_ext.sum()
    if factorization is None:
        f = nr2_factorize(g, params.damping)
    else:
        f = factorization
        if f.n != n + 1 or f.lam != params.damping:
            raise ValidationError("factorization does not match the augmented graph or damping")

    candidate = np.ones(n + 1, dtype=bool)
    candidate[d] = False
    ranked: list[int] = []

    prior = r_ext
    for j in range(1, params.k + 1):
        if j > 1:
            prior = nr2_prior(r_ext, np.array(ranked), np.flatnonzero(candidate), d, params.alpha, params.beta)
            if abs(prior.sum() - 1.0) > PRIOR_SUM_TOL:
                raise SolverError(f"NR2 prior sums to {prior.sum()!r} at iteration {j}")
        p = solve(f, prior)
        pick = _argmax(p, candidate)
        ranked.append(pick)
        candidate[pick] = False
        yield NR2Step(j, prior, p, pick)


def nr2_rank(g: Graph, r, params: RankParams, factorization: Factorization | None = None) -> RankingResult:
    steps = list(nr2_steps(g, r, params, factorization))
    picks = [s.pick for s in steps]
    scores = [s.scores[s.pick] for s in steps]
    return _result("nr2", g.node_ids, picks, scores, params)


# --
# dispatch


def rank(algorithm: str, g: Graph, r=None, params: RankParams | None = None) -> RankingResult:
    """Run ``algorithm`` on ``g`` and return its top ``params.k`` nodes.

    ``r`` defaults to uniform and is rescaled to unit sum before use.
    """
    if algorithm not in ALGORITHMS:
        raise ParameterError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    params = params or RankParams()
    n = g.n
    if n == 0:
        raise ValidationError("cannot rank an empty graph")
    if params.k > len(g.regular_nodes()):
        raise ParameterError(f"k={params.k} exceeds node count {len(g.regular_nodes())}")
    r = np.full(n, 1.0 / n) if r is None else normalize_prior(r, n)
    lam = params.damping

    if algorithm == "nr2":
        return nr2_rank(g, r, params)
    w = row_normalize(g)
    if algorithm == "pagerank":
        s = pagerank(w, lam)
    elif algorithm == "ppr":
        s = personalized_pagerank(w, r, lam)
    elif algorithm == "mmr":
        return mmr_rank(pagerank(w, lam), g, params.lambda_mmr, params.k, params)
    elif algorithm == "grasshopper":
        return grasshopper_rank(w, r, lam, params.k, g.node_ids, params)
    else:
        return divrank_rank(w, r, lam, params.divrank_iters, params.k, g.node_ids, params)
    picks = top_k(s, params.k)
    return _result(algorithm, g.node_ids, picks, s[picks], params)
