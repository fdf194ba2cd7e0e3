"""Discrete Bayes network over the attributes of a relation.

Structure is found by greedy hill climbing on BIC (edge add / delete /
reverse) with seeded random restarts; CPTs are Laplace-smoothed counts.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .relation import Relation

log = logging.getLogger(__name__)

FORMAT_TAG = "bayesclean.bayesnet/1"
_SCORE_RTOL = 1e-9


@dataclass(frozen=True)
class NetworkStructure:
    """Parent sets indexed like the schema. ``parents[i]`` is a tuple of attribute indices."""

    attributes: tuple
    parents: tuple

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "parents", tuple(tuple(sorted(p)) for p in self.parents))
        if len(self.parents) != len(self.attributes):
            raise ValueError("one parent set per attribute is required")
        if topological_order(self.parents) is None:
            raise ValueError("parent graph has a cycle")

    @classmethod
    def empty(cls, attributes):
        return cls(tuple(attributes), tuple(() for _ in attributes))

    @classmethod
    def from_edges(cls, attributes, edges):
        """Build from ``(parent_name, child_name)`` pairs."""
        attributes = tuple(attributes)
        parents = [set() for _ in attributes]
        for p, c in edges:
            parents[attributes.index(c)].add(attributes.index(p))
        return cls(attributes, tuple(tuple(sorted(p)) for p in parents))

    @property
    def edges(self) -> tuple:
        """Edges as sorted ``(parent_name, child_name)`` pairs; also the tie-break key."""
        names = self.attributes
        return tuple(sorted((names[p], names[c]) for c, ps in enumerate(self.parents) for p in ps))

    def max_in_degree(self) -> int:
        return max((len(p) for p in self.parents), default=0)


def topological_order(parents) -> Optional[list]:
    """Kahn's algorithm; ``None`` if the graph is cyclic."""
    m = len(parents)
    indeg = [len(p) for p in parents]
    children = [[] for _ in range(m)]
    for c, ps in enumerate(parents):
        for p in ps:
            children[p].append(c)
    ready = [i for i in range(m) if indeg[i] == 0]
    order = []
    while ready:
        i = ready.pop()
        order.append(i)
        for c in children[i]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    return order if len(order) == m else None


def _encode(r: Relation):
    codes = np.empty((r.n, r.m), dtype=np.int64)
    domains = []
    for j in range(r.m):
        dom = r.active_domain(j)
        lookup = {v: k for k, v in enumerate(dom)}
        codes[:, j] = [lookup[v] for v in r.column(j)]
        domains.append(dom)
    return codes, domains


class BICScorer:
    """Decomposable BIC with a per-family cache.

    local(i, P) = sum N_ijk log(N_ijk / N_ij) - 0.5 log(n) * df(i, P)

    df is the number of distinct (parents, child) value combinations seen in
    the data, minus one. Counting the full product of cardinalities lets a
    handful of misspelled singletons inflate the penalty enough to erase
    exact dependencies, and subtracting the parent configurations instead
    rewards parent sets that shatter the data into one-row groups.
    """

    def __init__(self, r: Relation):
        self.codes, self.domains = _encode(r)
        self.n = r.n
        self.card = [len(d) for d in self.domains]
        self._cache = {}

    def local(self, node: int, parents) -> float:
        key = (node, tuple(sorted(parents)))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        parents = key[1]
        child = self.codes[:, node]
        if parents:
            pa = np.zeros(self.n, dtype=np.int64)
            for p in parents:
                pa = pa * self.card[p] + self.codes[:, p]
            _, pa = np.unique(pa, return_inverse=True)
            joint = pa * self.card[node] + child
            _, n_jk = np.unique(joint, return_counts=True)
            _, n_j = np.unique(pa, return_counts=True)
            ll = float(np.sum(n_jk * np.log(n_jk))) - float(np.sum(n_j * np.log(n_j)))
            df = len(n_jk) - 1
        else:
            _, n_k = np.unique(child, return_counts=True)
            ll = float(np.sum(n_k * np.log(n_k))) - self.n * math.log(self.n)
            df = len(n_k) - 1
        score = ll - 0.5 * math.log(self.n) * df
        self._cache[key] = score
        return score

    def total(self, parents) -> float:
        return sum(self.local(i, p) for i, p in enumerate(parents))


def bic_score(r: Relation, s: NetworkStructure) -> float:
    return BICScorer(r).total(s.parents)


def _creates_cycle(parents, u, v) -> bool:
    """Would adding u -> v close a cycle, i.e. is u reachable from v?"""
    children = [[] for _ in parents]
    for c, ps in enumerate(parents):
        for p in ps:
            children[p].append(c)
    stack, seen = [v], {v}
    while stack:
        x = stack.pop()
        if x == u:
            return True
        for y in children[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def _edge_key(names, parents):
    return tuple(sorted((names[p], names[c]) for c, ps in enumerate(parents) for p in ps))


def _better(score, key, best_score, best_key) -> bool:
    tol = _SCORE_RTOL * max(1.0, abs(best_score))
    if score > best_score + tol:
        return True
    return abs(score - best_score) <= tol and key < best_key


def _hill_climb(scorer: BICScorer, names, parents, max_parents):
    m = len(parents)
    parents = [frozenset(p) for p in parents]
    score = scorer.total(parents)
    while True:
        best = None  # (delta, key, new_parents)
        for v in range(m):
            for u in range(m):
                if u == v:
                    continue
                moves = []
                if u in parents[v]:
                    removed = parents[v] - {u}
                    d_rm = scorer.local(v, removed) - scorer.local(v, parents[v])
                    moves.append((d_rm, {v: removed}))
                    if len(parents[u]) < max_parents:
                        trial = list(parents)
                        trial[v] = removed
                        if not _creates_cycle(trial, v, u):
                            added = parents[u] | {v}
                            d_rev = d_rm + scorer.local(u, added) - scorer.local(u, parents[u])
                            moves.append((d_rev, {v: removed, u: added}))
                elif len(parents[v]) < max_parents and not _creates_cycle(parents, u, v):
                    added = parents[v] | {u}
                    moves.append((scorer.local(v, added) - scorer.local(v, parents[v]), {v: added}))
                for delta, change in moves:
                    trial = list(parents)
                    for k, ps in change.items():
                        trial[k] = ps
                    key = _edge_key(names, trial)
                    if best is None or _better(delta, key, best[0], best[1]):
                        best = (delta, key, trial)
        if best is None or best[0] <= _SCORE_RTOL * max(1.0, abs(score)):
            return parents, score
        parents = best[2]
        score = scorer.total(parents)


def _random_dag(rng: random.Random, m, max_parents):
    order = list(range(m))
    rng.shuffle(order)
    parents = [set() for _ in range(m)]
    for pos, c in enumerate(order):
        earlier = order[:pos]
        rng.shuffle(earlier)
        k = rng.randint(0, min(max_parents, len(earlier)))
        parents[c].update(earlier[:k])
    return parents


def learn_structure(
    r: Relation, max_parents: int = 3, seed: int = 0, restarts: int = 5, scorer: Optional[BICScorer] = None
) -> NetworkStructure:
    """BIC hill climbing. Restart 0 starts from the empty graph, the rest from seeded random DAGs."""
    if r.n == 0:
        raise ValueError("cannot learn from an empty relation")
    if max_parents < 0:
        raise ValueError("max_parents must be >= 0")
    names = r.schema.attributes
    m = r.m
    if m == 1 or max_parents == 0:
        return NetworkStructure.empty(names)
    scorer = scorer or BICScorer(r)
    rng = random.Random(seed)
    best = None
    for k in range(max(1, restarts)):
        start = [set() for _ in range(m)] if k == 0 else _random_dag(rng, m, max_parents)
        parents, score = _hill_climb(scorer, names, start, max_parents)
        key = _edge_key(names, parents)
        if best is None or _better(score, key, best[0], best[1]):
            best = (score, key, parents)
    return NetworkStructure(names, tuple(tuple(sorted(p)) for p in best[2]))


@dataclass
class BayesNet:
    """Structure plus smoothed CPT counts.

    ``tables[i]`` maps a parent assignment (tuple of parent values) to
    ``(total, {value: count})``.
    """

    structure: NetworkStructure
    domains: tuple
    tables: tuple
    smoothing: float = 1.0
    metadata: dict = field(default_factory=dict)
    unseen_parent_queries: int = field(default=0, compare=False)

    def __post_init__(self):
        self._domain_sets = tuple(frozenset(d) for d in self.domains)
        self._cache = {}

    @property
    def attributes(self):
        return self.structure.attributes

    def conditional(self, node: int, value, parent_values: tuple) -> float:
        """Pr[node = value | parents = parent_values] with Laplace smoothing.

        A value outside the training domain is scored as one extra unseen
        value; an unseen parent assignment yields the uniform distribution.
        """
        s = self.smoothing
        d = len(self.domains[node])
        total, counts = self.tables[node].get(parent_values, (0, None))
        if counts is None and self.structure.parents[node]:
            self.unseen_parent_queries += 1
        if value in self._domain_sets[node]:
            c = counts.get(value, 0) if counts else 0
            return (c + s) / (total + s * d)
        return s / (total + s * (d + 1))

    def distribution(self, node: int, parent_values: tuple) -> dict:
        return {v: self.conditional(node, v, parent_values) for v in self.domains[node]}

    def joint_probability(self, t) -> float:
        p = 1.0
        for i, ps in enumerate(self.structure.parents):
            p *= self.conditional(i, t[i], tuple(t[j] for j in ps))
        return p

    def log_joint(self, t) -> float:
        t = tuple(t)
        hit = self._cache.get(t)
        if hit is None:
            hit = 0.0
            for i, ps in enumerate(self.structure.parents):
                hit += math.log(self.conditional(i, t[i], tuple(t[j] for j in ps)))
            self._cache[t] = hit
        return hit

    def to_json(self) -> dict:
        nodes = []
        for i, name in enumerate(self.attributes):
            rows = [
                {"parents": list(pa), "total": total, "counts": [[v, c] for v, c in counts.items()]}
                for pa, (total, counts) in self.tables[i].items()
            ]
            nodes.append(
                {
                    "name": name,
                    "parents": [self.attributes[p] for p in self.structure.parents[i]],
                    "domain": list(self.domains[i]),
                    "cpt": rows,
                }
            )
        return {
            "format": FORMAT_TAG,
            "attributes": list(self.attributes),
            "edges": [list(e) for e in self.structure.edges],
            "smoothing": self.smoothing,
            "nodes": nodes,
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BayesNet":
        if doc.get("format") != FORMAT_TAG:
            raise ValueError(f"not a {FORMAT_TAG} document")
        attrs = tuple(doc["attributes"])
        structure = NetworkStructure.from_edges(attrs, [tuple(e) for e in doc["edges"]])
        domains, tables = [], []
        for node in doc["nodes"]:
            domains.append(tuple(node["domain"]))
            tables.append(
                {
                    tuple(row["parents"]): (row["total"], {v: c for v, c in row["counts"]})
                    for row in node["cpt"]
                }
            )
        return cls(structure, tuple(domains), tuple(tables), doc["smoothing"], doc.get("metadata", {}))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "BayesNet":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def learn_cpts(r: Relation, s: NetworkStructure, smoothing: float = 1.0) -> BayesNet:
    if not smoothing > 0:
        raise ValueError("smoothing must be positive")
    if r.n == 0:
        raise ValueError("cannot learn from an empty relation")
    tables = []
    for i, ps in enumerate(s.parents):
        table = {}
        for row in r.rows:
            pa = tuple(row[j] for j in ps)
            entry = table.get(pa)
            if entry is None:
                entry = table[pa] = [0, {}]
            entry[0] += 1
            entry[1][row[i]] = entry[1].get(row[i], 0) + 1
        tables.append({pa: (tot, counts) for pa, (tot, counts) in table.items()})
    domains = tuple(tuple(r.active_domain(i)) for i in range(r.m))
    meta = {"n_rows": r.n, "source": r.source}
    return BayesNet(s, domains, tuple(tables), float(smoothing), meta)


def learn_bayes_net(
    r: Relation, max_parents: int = 3, seed: int = 0, smoothing: float = 1.0, restarts: int = 5
) -> BayesNet:
    scorer = BICScorer(r)
    s = learn_structure(r, max_parents, seed, restarts, scorer=scorer)
    bn = learn_cpts(r, s, smoothing)
    bn.metadata.update(
        {"bic": scorer.total(s.parents), "seed": seed, "max_parents": max_parents, "restarts": restarts}
    )
    return bn


def joint_probability(bn: BayesNet, t) -> float:
    return bn.joint_probability(t)


def log_joint(bn: BayesNet, t) -> float:
    return bn.log_joint(t)
