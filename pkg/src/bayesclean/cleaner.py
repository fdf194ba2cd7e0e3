"""MAP repair: pick argmax_{T*} log Pr[T | T*] + log Pr[T*] per tuple.

Candidates for an observed tuple are the distinct tuples of the training
relation within a summed per-attribute edit distance, plus the tuple itself.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .bayes_net import BayesNet, learn_bayes_net
from .error_model import ErrorModel, ErrorModelParams, _text
from .relation import DomainIndex, Relation, build_domain_index

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 4
_TIE_TOL = 1e-9


def tuple_distance(a, b) -> int:
    return sum(_kernels.levenshtein(_text(x), _text(y)) for x, y in zip(a, b))


def _order_key(t):
    return tuple((v is not None, v or "") for v in t)


class CandidateIndex:
    """Distinct tuples of a relation with per-attribute capped distance matrices.

    Distances above the threshold are stored as ``threshold + 1``: one such
    attribute already rules a tuple out, so the capped sum is exact where it
    matters. The length difference prunes most pairs before any Levenshtein
    run. An unbounded threshold needs no distances at all.
    """

    def __init__(self, r: Relation, threshold: Optional[float] = DEFAULT_THRESHOLD):
        if threshold is not None and threshold < 0:
            raise ValueError("threshold must be >= 0")
        self.frequency = Counter(r.rows)
        self.tuples = list(self.frequency)
        self.m = r.m
        self.threshold = math.inf if threshold is None or threshold == math.inf else int(threshold)
        self.domains = []
        self.lookup = []
        self.matrices = []
        if self.threshold == math.inf:
            return
        for j in range(r.m):
            dom = list(dict.fromkeys(t[j] for t in self.tuples))
            self.domains.append(dom)
            self.lookup.append({v: k for k, v in enumerate(dom)})
            self.matrices.append(
                np.ascontiguousarray(_kernels.distance_matrix([_text(v) for v in dom], self.threshold), dtype=np.int32)
            )
        self.codes = np.array(
            [[self.lookup[j][t[j]] for j in range(r.m)] for t in self.tuples], dtype=np.int32
        ).reshape(len(self.tuples), r.m)

    def _row(self, j, value):
        k = self.lookup[j].get(value)
        if k is not None:
            return self.matrices[j][k]
        text = _text(value)
        return np.array(
            [_kernels.bounded_levenshtein(text, _text(v), self.threshold) for v in self.domains[j]], dtype=np.int32
        )

    def within(self, t) -> list:
        """Distinct tuples within the threshold of ``t``, in first-seen relation order."""
        if self.threshold == math.inf:
            return list(self.tuples)
        rows = [self._row(j, v) for j, v in enumerate(t)]
        hits = _kernels.rows_within(self.codes, rows, self.threshold)
        return [self.tuples[k] for k in hits]


@dataclass(frozen=True)
class CandidateSet:
    observed: tuple
    candidates: tuple

    def pools(self) -> list:
        """Per-attribute value pools projected from the candidates, first-seen order."""
        return [list(dict.fromkeys(c[i] for c in self.candidates)) for i in range(len(self.observed))]


@dataclass(frozen=True)
class Repair:
    original: tuple
    chosen: tuple
    log_posterior: float
    changed_attributes: frozenset
    runner_up_margin: float
    n_candidates: int = 1

    @property
    def changed(self) -> bool:
        return bool(self.changed_attributes)

    def to_json(self, attributes=None) -> dict:
        changed = sorted(self.changed_attributes)
        doc = {
            "original": list(self.original),
            "chosen": list(self.chosen),
            "changed_attributes": changed,
            "log_posterior": self.log_posterior if math.isfinite(self.log_posterior) else None,
            "runner_up_margin": self.runner_up_margin if math.isfinite(self.runner_up_margin) else None,
            "n_candidates": self.n_candidates,
        }
        if attributes is not None:
            doc["changed_names"] = [attributes[i] for i in changed]
        return doc


def generate_candidates(t, r: Relation, threshold: float = DEFAULT_THRESHOLD, index: CandidateIndex = None):
    t = tuple(t)
    if index is None or index.threshold != (math.inf if threshold is None else threshold):
        index = CandidateIndex(r, threshold)
    found = index.within(t)
    if t not in found:
        found.append(t)
    return CandidateSet(t, tuple(found))


def score_candidates(observed, cs: CandidateSet, bn: BayesNet, model: ErrorModel) -> list:
    """Log-posterior of every candidate in ``cs`` (same order)."""
    observed = tuple(observed)
    pools = cs.pools()
    m = len(observed)
    log_z = {}
    scores = []
    for cand in cs.candidates:
        agree = tuple(o == c for o, c in zip(observed, cand))
        total = bn.log_joint(cand)
        for i in range(m):
            # contexts are limited to the cells both tuples share
            scope = frozenset((j, observed[j]) for j in range(m) if j != i and agree[j])
            z = log_z.get((i, scope))
            if z is None:
                z = log_z[(i, scope)] = model.log_partition(i, observed[i], pools[i], scope)
            total += model.energy(i, observed[i], cand[i], scope) - z
        scores.append(total)
    return scores


def score_candidate(observed, candidate, bn: BayesNet, params: ErrorModelParams, idx: DomainIndex, pools=None):
    """log Pr[observed | candidate] + log Pr[candidate].

    ``pools`` defaults to the two-element pools {observed_i, candidate_i}.
    """
    observed, candidate = tuple(observed), tuple(candidate)
    model = ErrorModel(params, idx)
    if pools is None:
        pools = [list(dict.fromkeys((o, c))) for o, c in zip(observed, candidate)]
    return model.tuple_log_probability(observed, candidate, pools) + bn.log_joint(candidate)


def select(observed, candidates, scores) -> tuple:
    """Argmax with ties going to ``observed``, then to the lexicographically smallest tuple."""
    best = max(scores)
    tied = [c for c, s in zip(candidates, scores) if s >= best - _TIE_TOL * max(1.0, abs(best))]
    if observed in tied:
        return observed
    return min(tied, key=_order_key)


@dataclass
class CleanerConfig:
    alpha: float = 2.3
    beta: float = 3.5
    mu: float = 1.0
    threshold: Optional[float] = DEFAULT_THRESHOLD
    max_parents: int = 3
    smoothing: float = 1.0
    seed: int = 0
    restarts: int = 5

    @property
    def params(self) -> ErrorModelParams:
        return ErrorModelParams(self.alpha, self.beta, self.mu)


class Cleaner:
    """Frozen models for one relation; repairs are memoized per distinct tuple."""

    def __init__(self, r: Relation, config: CleanerConfig = None, bn: BayesNet = None, idx: DomainIndex = None):
        self.config = config or CleanerConfig()
        self.relation = r
        self.idx = idx or build_domain_index(r)
        self.bn = bn or learn_bayes_net(
            r, self.config.max_parents, self.config.seed, self.config.smoothing, self.config.restarts
        )
        self.model = ErrorModel(self.config.params, self.idx)
        self.index = CandidateIndex(r, self.config.threshold)
        self._repairs = {}

    def candidates(self, t) -> CandidateSet:
        return generate_candidates(t, self.relation, self.config.threshold, self.index)

    def clean_tuple(self, t) -> Repair:
        t = tuple(t)
        hit = self._repairs.get(t)
        if hit is not None:
            return hit
        cs = self.candidates(t)
        scores = score_candidates(t, cs, self.bn, self.model)
        chosen = select(t, cs.candidates, scores)
        best = scores[cs.candidates.index(chosen)]
        others = [s for c, s in zip(cs.candidates, scores) if c != chosen]
        margin = best - max(others) if others else math.inf
        changed = frozenset(i for i, (a, b) in enumerate(zip(t, chosen)) if a != b)
        rep = Repair(t, chosen, best, changed, margin, len(cs.candidates))
        self._repairs[t] = rep
        return rep

    def clean(self, r: Relation = None, workers: int = 1):
        """Repair every tuple of ``r`` (default: the training relation).

        ``workers`` > 1 scores distinct tuples in a process pool first; the
        result is identical to a sequential run since each repair is a pure
        function of the frozen models.
        """
        r = self.relation if r is None else r
        if workers > 1:
            self._prefetch(r, workers)
        repairs = []
        for k, t in enumerate(r.rows):
            try:
                repairs.append(self.clean_tuple(t))
            except Exception:  # keep going; the tuple is left as is
                log.exception("tuple %d could not be cleaned; kept unchanged", k)
                repairs.append(Repair(t, t, float("nan"), frozenset(), 0.0, 0))
        out = r.with_rows([rep.chosen for rep in repairs], source=f"cleaned:{r.source}")
        return out, repairs


    def _prefetch(self, r: Relation, workers: int) -> None:
        todo = [t for t in dict.fromkeys(r.rows) if t not in self._repairs]
        if len(todo) < 2:
            return
        size = -(-len(todo) // (4 * workers))
        chunks = [todo[k : k + size] for k in range(0, len(todo), size)]
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(self,)) as pool:
            for reps in pool.map(_clean_chunk, chunks):
                for rep in reps:
                    if rep is not None:
                        self._repairs[rep.original] = rep


_worker: Optional[Cleaner] = None


def _init_worker(cleaner: Cleaner) -> None:
    global _worker
    _worker = cleaner


def _clean_chunk(chunk) -> list:
    out = []
    for t in chunk:
        try:
            out.append(_worker.clean_tuple(t))
        except Exception:  # retried, and logged, by the sequential pass
            out.append(None)
    return out


def clean_tuple(t, bn: BayesNet, params: ErrorModelParams, idx: DomainIndex, r: Relation, threshold=DEFAULT_THRESHOLD):
    cfg = CleanerConfig(params.alpha, params.beta, params.mu, threshold)
    return Cleaner(r, cfg, bn=bn, idx=idx).clean_tuple(t)


def clean_relation(r: Relation, config: CleanerConfig = None, bn: BayesNet = None, workers: int = 1):
    """Learn both models on ``r`` once, then repair every tuple independently."""
    return Cleaner(r, config, bn=bn).clean(workers=workers)
