"""Per-attribute corruption model Pr[observed | clean].

Two features are combined log-linearly and normalized over a candidate pool:

    f_ed(v, v*) = exp(-ED(v, v*))
    f_ds(v, v*) = sum_{c in C(v, v*)} Pr[c|v*] Pr[c|v] Pr[v] / Pr[c]
    Pr[v | v*]  = exp(alpha f_ed + beta f_ds) / Z

with Pr[x] = #(x) / n, Pr[c] = #(c) / n and the Laplace estimate

    Pr[c|x] = (#(c, x) + mu) / (#(x) + mu |D(c)|)

where D(c) is the active domain of c's attribute. Z sums over the candidate
pool with the observed value fixed. The tuple-level model is the product
over attributes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

from . import _kernels
from .relation import DomainIndex

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ErrorModelParams:
    alpha: float = 2.3
    beta: float = 3.5
    mu: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValueError(f"mu must be positive, got {self.mu}")


def _text(v) -> str:
    # NULL is scored as the empty string: ED(v, NULL) = len(v).
    return "" if v is None else v


def edit_distance(a, b) -> int:
    return _kernels.levenshtein(_text(a), _text(b))


def f_ed(observed, candidate) -> float:
    return math.exp(-edit_distance(observed, candidate))


def shared_context(observed_tuple, candidate_tuple, attr: int) -> frozenset:
    """Cells the two tuples agree on, excluding ``attr``: the scope of a tuple-pair context."""
    return frozenset(
        (j, o) for j, (o, c) in enumerate(zip(observed_tuple, candidate_tuple)) if j != attr and o == c
    )


def context_set(attr, observed, candidate, idx: DomainIndex, observed_tuple=None, candidate_tuple=None):
    """Items co-occurring with both values; narrowed to the cells the two tuples share when given."""
    ctx = idx.cooccurring(attr, observed).keys() & idx.cooccurring(attr, candidate).keys()
    if observed_tuple is not None and candidate_tuple is not None:
        ctx &= shared_context(observed_tuple, candidate_tuple, attr)
    return frozenset(ctx)


def f_ds_terms(attr, observed, candidate, idx: DomainIndex, mu: float) -> dict:
    """Per-context-item summands of f_ds over the unrestricted context."""
    n_obs = idx.count(attr, observed)
    n_cand = idx.count(attr, candidate)
    if n_cand == 0:
        log.warning("f_ds: candidate %r of attribute %d is absent from the index", candidate, attr)
        return {}
    if n_obs == 0:
        # Pr[observed] = 0 zeroes every summand.
        return {}
    n = idx.n
    with_obs = idx.cooccurring(attr, observed)
    with_cand = idx.cooccurring(attr, candidate)
    p_obs = n_obs / n
    terms = {}
    for c in with_obs.keys() & with_cand.keys():
        k = mu * idx.domain_size(c[0])
        p_c_cand = (with_cand[c] + mu) / (n_cand + k)
        p_c_obs = (with_obs[c] + mu) / (n_obs + k)
        p_c = idx.counts[c] / n
        terms[c] = p_c_cand * p_c_obs * p_obs / p_c
    return terms


def f_ds(attr, observed, candidate, idx: DomainIndex, mu: float = 1.0, scope=None) -> float:
    terms = f_ds_terms(attr, observed, candidate, idx, mu)
    if scope is None:
        return math.fsum(terms.values())
    return math.fsum(t for c, t in terms.items() if c in scope)


def _logsumexp(xs) -> float:
    top = max(xs)
    return top + math.log(math.fsum(math.exp(x - top) for x in xs))


class ErrorModel:
    """Feature evaluation with memoization, bound to one index and parameter set.

    Caches are plain dicts; share an instance across threads only read-only
    after warm-up, or give each worker its own.
    """

    def __init__(self, params: ErrorModelParams, idx: DomainIndex):
        self.params = params
        self.idx = idx
        self._ed = {}
        self._terms = {}

    def edit_distance(self, a, b) -> int:
        key = (a, b) if _text(a) <= _text(b) else (b, a)
        d = self._ed.get(key)
        if d is None:
            d = self._ed[key] = edit_distance(a, b)
        return d

    def f_ed(self, observed, candidate) -> float:
        return math.exp(-self.edit_distance(observed, candidate))

    def f_ds(self, attr, observed, candidate, scope=None) -> float:
        key = (attr, observed, candidate)
        terms = self._terms.get(key)
        if terms is None:
            terms = self._terms[key] = f_ds_terms(attr, observed, candidate, self.idx, self.params.mu)
        if scope is None:
            return math.fsum(terms.values())
        return math.fsum(t for c, t in terms.items() if c in scope)

    def energy(self, attr, observed, candidate, scope=None) -> float:
        """alpha f_ed + beta f_ds, the unnormalized log-score."""
        p = self.params
        e = p.alpha * self.f_ed(observed, candidate) if p.alpha else 0.0
        if p.beta:
            e += p.beta * self.f_ds(attr, observed, candidate, scope)
        return e

    def log_partition(self, attr, observed, pool, scope=None) -> float:
        """log Z over ``pool`` as the candidate slot, ``observed`` fixed."""
        return _logsumexp([self.energy(attr, observed, v, scope) for v in pool])

    def attribute_log_probability(self, attr, observed, candidate, pool, scope=None) -> float:
        if candidate not in pool:
            raise ValueError(f"candidate {candidate!r} is not in the pool")
        return self.energy(attr, observed, candidate, scope) - self.log_partition(attr, observed, pool, scope)

    def tuple_log_probability(self, observed, candidate, pools, scoped: bool = True) -> float:
        if len(observed) != len(candidate) or len(pools) != len(observed):
            raise ValueError("observed, candidate and pools must have equal arity")
        total = 0.0
        for i, (o, c) in enumerate(zip(observed, candidate)):
            scope = shared_context(observed, candidate, i) if scoped else None
            total += self.attribute_log_probability(i, o, c, pools[i], scope)
        return total


def attribute_error_probability(
    attr, observed, candidate, candidate_pool, params: ErrorModelParams, idx: DomainIndex, scope=None
) -> float:
    model = ErrorModel(params, idx)
    return math.exp(model.attribute_log_probability(attr, observed, candidate, list(candidate_pool), scope))


def tuple_error_log_probability(
    observed, candidate, pools, params: ErrorModelParams, idx: DomainIndex, scoped: bool = True
) -> float:
    return ErrorModel(params, idx).tuple_log_probability(observed, candidate, pools, scoped)


def tuple_error_probability(
    observed, candidate, pools, params: ErrorModelParams, idx: DomainIndex, scoped: bool = True
) -> float:
    return math.exp(tuple_error_log_probability(observed, candidate, pools, params, idx, scoped))
