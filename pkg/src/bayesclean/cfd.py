"""Exact conditional functional dependency mining (level-wise, zero tolerance).

Two rule families are mined for every lhs attribute set X (|X| <= max_lhs)
and rhs attribute B outside X:

* constant rules   (X = x) -> (B = b)
* variable rules   (Y = y, A = _) -> (B = _)   with X = Y + {A}

A rule is reported only when it holds on every matching tuple, has support
>= min_support, and no rule with a strictly smaller lhs already implies it.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .relation import Relation


class _Wildcard:
    __slots__ = ()

    def __repr__(self):
        return "_"

    def __reduce__(self):
        return (_wildcard, ())


def _wildcard():
    return WILDCARD


WILDCARD = _Wildcard()


@dataclass(frozen=True)
class CFDRule:
    """``lhs`` is a tuple of ``(attr_index, value | WILDCARD)``; ``rhs`` likewise."""

    lhs: tuple
    rhs: tuple
    support: int

    @property
    def is_constant(self) -> bool:
        return self.rhs[1] is not WILDCARD

    def matches(self, row) -> bool:
        return all(v is WILDCARD or row[a] == v for a, v in self.lhs)

    def describe(self, attributes) -> str:
        def fmt(a, v):
            return f"{attributes[a]}={'_' if v is WILDCARD else v}"

        lhs = ", ".join(fmt(a, v) for a, v in self.lhs)
        return f"[{lhs}] -> [{fmt(*self.rhs)}] (support {self.support})"

    def to_json(self, attributes) -> dict:
        def enc(a, v):
            if v is WILDCARD:
                return {"attribute": attributes[a], "wildcard": True}
            return {"attribute": attributes[a], "value": v}

        return {
            "lhs": [enc(a, v) for a, v in self.lhs],
            "rhs": enc(*self.rhs),
            "support": self.support,
            "kind": "constant" if self.is_constant else "variable",
        }

    @classmethod
    def from_json(cls, doc, attributes) -> "CFDRule":
        def dec(p):
            a = attributes.index(p["attribute"])
            return (a, WILDCARD if p.get("wildcard") else p["value"])

        return cls(tuple(dec(p) for p in doc["lhs"]), dec(doc["rhs"]), doc["support"])


def count_violations(r: Relation, rule: CFDRule) -> int:
    """Tuples that must be removed for ``rule`` to hold."""
    b, want = rule.rhs
    wild = [a for a, v in rule.lhs if v is WILDCARD]
    groups = defaultdict(Counter)
    for row in r.rows:
        if rule.matches(row):
            groups[tuple(row[a] for a in wild)][row[b]] += 1
    bad = 0
    for hist in groups.values():
        size = sum(hist.values())
        if want is WILDCARD:
            bad += size - max(hist.values())
        else:
            bad += size - hist.get(want, 0)
    return bad


def _sort_key(rule: CFDRule):
    attrs = tuple(a for a, _ in rule.lhs)
    pattern = tuple((v is WILDCARD, "" if v is WILDCARD or v is None else v) for _, v in rule.lhs)
    rhs_v = rule.rhs[1]
    return (len(rule.lhs), attrs, rule.rhs[0], rule.is_constant is False, pattern,
            "" if rhs_v is WILDCARD or rhs_v is None else rhs_v)


def mine_cfds(r: Relation, min_support: int = 5, max_lhs: int = 3) -> list:
    if min_support < 1 or max_lhs < 1:
        raise ValueError("min_support and max_lhs must be >= 1")
    weights = Counter(r.rows)
    m = r.m
    const_found = set()  # (frozenset of lhs items, rhs attr)
    var_found = set()  # (frozenset of constant items, wildcard attr, rhs attr)
    rules = []
    for size in range(1, min(max_lhs, m - 1) + 1):
        for xs in combinations(range(m), size):
            for b in range(m):
                if b in xs:
                    continue
                # constant rules
                hist = defaultdict(Counter)
                for row, w in weights.items():
                    hist[tuple(row[a] for a in xs)][row[b]] += w
                for x, h in hist.items():
                    support = sum(h.values())
                    if len(h) != 1 or support < min_support:
                        continue
                    items = tuple(zip(xs, x))
                    if any(
                        (frozenset(sub), b) in const_found
                        for k in range(1, size)
                        for sub in combinations(items, k)
                    ):
                        continue
                    const_found.add((frozenset(items), b))
                    rules.append(CFDRule(items, (b, next(iter(h))), support))
                # variable rules: one wildcard attribute, constants on the rest
                for a in xs:
                    ys = tuple(y for y in xs if y != a)
                    groups = defaultdict(lambda: defaultdict(Counter))
                    for row, w in weights.items():
                        groups[tuple(row[y] for y in ys)][row[a]][row[b]] += w
                    for y, by_a in groups.items():
                        support = sum(sum(h.values()) for h in by_a.values())
                        if support < min_support:
                            continue
                        if any(len(h) != 1 for h in by_a.values()):
                            continue
                        if len({next(iter(h)) for h in by_a.values()}) == 1:
                            continue  # rhs constant on the pattern: a constant rule says more
                        if len(by_a) == support:
                            continue  # every wildcard value unique: holds vacuously
                        items = tuple(zip(ys, y))
                        if any(
                            (frozenset(sub), a, b) in var_found
                            for k in range(len(items))
                            for sub in combinations(items, k)
                        ):
                            continue
                        var_found.add((frozenset(items), a, b))
                        lhs = tuple(sorted(items + ((a, WILDCARD),), key=lambda p: p[0]))
                        rules.append(CFDRule(lhs, (b, WILDCARD), support))
    rules.sort(key=_sort_key)
    return rules


def save_rules(rules, attributes, path, summary=None) -> None:
    doc = {"rules": [rule.to_json(attributes) for rule in rules], "count": len(rules)}
    if summary:
        doc["summary"] = summary
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")
