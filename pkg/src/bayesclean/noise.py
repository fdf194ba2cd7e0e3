"""Seeded cell-level corruption with ground-truth bookkeeping.

Each cell is corrupted independently with probability ``tau`` by one of:
a spelling error (random character edits reaching edit distance 1..4),
a replacement (another value from the attribute's active domain) or a
deletion (NULL).
"""

from __future__ import annotations

import json
import logging
import random
import string
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import _kernels
from .relation import Relation

log = logging.getLogger(__name__)

SPELLING, REPLACEMENT, DELETION = "spelling", "replacement", "deletion"
ERROR_TYPES = (SPELLING, REPLACEMENT, DELETION)


@dataclass(frozen=True)
class NoiseSpec:
    tau: float = 0.01
    mix: tuple = (1 / 3, 1 / 3, 1 / 3)
    spelling_range: tuple = (1, 4)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {self.tau}")
        mix = tuple(float(w) for w in self.mix)
        if len(mix) != 3 or any(w < 0 for w in mix) or abs(sum(mix) - 1.0) > 1e-9:
            raise ValueError(f"mix needs three non-negative weights summing to 1, got {self.mix}")
        object.__setattr__(self, "mix", mix)
        lo, hi = self.spelling_range
        if not 1 <= lo <= hi <= 4:
            raise ValueError(f"spelling range must sit inside [1, 4], got {self.spelling_range}")
        object.__setattr__(self, "spelling_range", (int(lo), int(hi)))


@dataclass(frozen=True)
class Corruption:
    row: int
    attr: int
    clean: object
    dirty: object
    error_type: str


@dataclass
class GroundTruth:
    entries: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def cells(self) -> set:
        return {(e.row, e.attr) for e in self.entries}

    def to_json(self) -> dict:
        return {"entries": [asdict(e) for e in self.entries]}

    @classmethod
    def from_json(cls, doc) -> "GroundTruth":
        entries = [Corruption(**e) for e in doc["entries"]]
        for e in entries:
            if e.clean == e.dirty or e.error_type not in ERROR_TYPES or e.row < 0 or e.attr < 0:
                raise ValueError(f"invalid ground-truth entry {e}")
        return cls(entries)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "GroundTruth":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def _edit(rng: random.Random, s: str, alphabet) -> str:
    ops = ["sub", "ins", "del"] if len(s) > 1 else ["sub", "ins"]
    if not s:
        ops = ["ins"]
    op = rng.choice(ops)
    k = rng.randrange(len(s) + (op == "ins"))
    if op == "sub":
        return s[:k] + rng.choice(alphabet) + s[k + 1 :]
    if op == "ins":
        return s[:k] + rng.choice(alphabet) + s[k:]
    return s[:k] + s[k + 1 :]


def misspell(rng: random.Random, value, distance: int, alphabet, forbidden, attempts: int = 200) -> str:
    """A non-empty string at exactly ``distance`` edits from ``value`` and outside ``forbidden``."""
    base = value or ""
    for _ in range(attempts):
        cur = base
        d = 0
        # Each edit moves the distance by at most one, so the walk lands on ``distance`` exactly.
        for _ in range(8 * distance + 8):
            cur = _edit(rng, cur, alphabet)
            d = _kernels.levenshtein(base, cur)
            if d >= distance:
                break
        if d == distance and cur and cur not in forbidden:
            return cur
    raise RuntimeError(f"could not misspell {value!r} at distance {distance}")


def _alphabet(values) -> list:
    chars = sorted({ch for v in values if v for ch in v})
    if len(chars) < 2:
        chars = sorted(set(chars) | set(string.ascii_lowercase))
    return chars


def inject(r: Relation, spec: NoiseSpec):
    """Corrupt ``r`` (taken as clean) and return ``(dirty, ground_truth)``."""
    rng = random.Random(spec.seed)
    domains = [r.active_domain(j) for j in range(r.m)]
    domain_sets = [set(d) for d in domains]
    non_null = [[v for v in d if v is not None] for d in domains]
    alphabets = [_alphabet(d) for d in domains]
    lo, hi = spec.spelling_range
    rows = [list(t) for t in r.rows]
    entries = []
    fallbacks = 0
    for i, row in enumerate(rows):
        for j, clean in enumerate(row):
            if rng.random() >= spec.tau:
                continue
            kind = rng.choices(ERROR_TYPES, weights=spec.mix)[0]
            if kind == REPLACEMENT:
                others = [v for v in non_null[j] if v != clean]
                if others:
                    dirty = rng.choice(others)
                else:
                    kind = SPELLING
                    fallbacks += 1
            elif kind == DELETION:
                if clean is not None:
                    dirty = None
                else:
                    kind = SPELLING
                    fallbacks += 1
            if kind == SPELLING:
                d = rng.randint(lo, hi)
                dirty = misspell(rng, clean, d, alphabets[j], domain_sets[j])
            row[j] = dirty
            entries.append(Corruption(i, j, clean, dirty, kind))
    if fallbacks:
        log.info("%d corruptions fell back to spelling errors", fallbacks)
    dirty_rel = r.with_rows(rows, source=f"{r.source}+noise(tau={spec.tau},seed={spec.seed})")
    return dirty_rel, GroundTruth(entries)


def replay(gt: GroundTruth, dirty: Relation) -> Relation:
    """Undo ``gt`` on ``dirty``; raises if a recorded dirty value is not where it should be."""
    rows = [list(t) for t in dirty.rows]
    for e in gt:
        if not (0 <= e.row < dirty.n and 0 <= e.attr < dirty.m):
            raise ValueError(f"ground-truth coordinate ({e.row}, {e.attr}) is outside the relation")
        if rows[e.row][e.attr] != e.dirty:
            raise ValueError(
                f"cell ({e.row}, {e.attr}) holds {rows[e.row][e.attr]!r}, ground truth expects {e.dirty!r}"
            )
        rows[e.row][e.attr] = e.clean
    return dirty.with_rows(rows)
