"""Relations over categorical attributes, CSV I/O and the frequency index.

A cell is a ``str`` or ``None``; ``None`` is the NULL sentinel and is kept
distinct from every string, including the empty one.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional, Sequence

Cell = Optional[str]
Row = tuple  # tuple[Cell, ...]


class RelationError(ValueError):
    """Malformed relation or CSV input."""


class CSVParseError(RelationError):
    def __init__(self, path, row_number, message):
        self.path = str(path)
        self.row_number = row_number
        super().__init__(f"{path}: row {row_number}: {message}")


@dataclass(frozen=True)
class Schema:
    attributes: tuple

    def __post_init__(self):
        attrs = tuple(self.attributes)
        object.__setattr__(self, "attributes", attrs)
        if not attrs:
            raise RelationError("schema needs at least one attribute")
        if any(not isinstance(a, str) or not a for a in attrs):
            raise RelationError("attribute names must be non-empty strings")
        dupes = sorted(a for a, k in Counter(attrs).items() if k > 1)
        if dupes:
            raise RelationError(f"duplicate attribute names: {dupes}")

    def __len__(self):
        return len(self.attributes)

    def index(self, name: str) -> int:
        return self.attributes.index(name)


@dataclass(frozen=True)
class Relation:
    """An ordered, immutable bag of tuples over a schema."""

    schema: Schema
    rows: tuple
    source: str = "<memory>"

    def __post_init__(self):
        if not isinstance(self.schema, Schema):
            object.__setattr__(self, "schema", Schema(tuple(self.schema)))
        rows = tuple(tuple(r) for r in self.rows)
        m = len(self.schema)
        for k, r in enumerate(rows):
            if len(r) != m:
                raise RelationError(f"tuple {k} has arity {len(r)}, schema has {m}")
            for v in r:
                if v is not None and not isinstance(v, str):
                    raise RelationError(f"tuple {k}: cell {v!r} is neither str nor NULL")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, attributes: Sequence[str], rows: Iterable[Sequence[Cell]], source="<memory>"):
        return cls(Schema(tuple(attributes)), tuple(tuple(r) for r in rows), source)

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.schema)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.schema == other.schema and self.rows == other.rows

    def __hash__(self):
        return hash((self.schema, self.rows))

    def column(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def active_domain(self, j: int) -> list:
        """Distinct values of attribute ``j`` in first-seen order."""
        return list(dict.fromkeys(r[j] for r in self.rows))

    def with_rows(self, rows, source=None) -> "Relation":
        return Relation(self.schema, tuple(rows), self.source if source is None else source)


def load_csv(path, null_token: str = "") -> Relation:
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise RelationError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CSVParseError(path, 1, "empty file (a header row is required)") from None
        except csv.Error as exc:
            raise CSVParseError(path, 1, str(exc)) from exc
        try:
            schema = Schema(tuple(header))
        except RelationError as exc:
            raise CSVParseError(path, 1, str(exc)) from exc
        rows = []
        try:
            for raw in reader:
                if len(raw) != len(header):
                    raise CSVParseError(
                        path, reader.line_num, f"expected {len(header)} fields, got {len(raw)}"
                    )
                rows.append(tuple(None if v == null_token else v for v in raw))
        except csv.Error as exc:
            raise CSVParseError(path, reader.line_num, str(exc)) from exc
    return Relation(schema, tuple(rows), str(path))


def write_csv(r: Relation, path, null_token: str = "") -> None:
    path = Path(path)
    for k, row in enumerate(r.rows):
        for v in row:
            if v is not None and v == null_token:
                raise RelationError(
                    f"tuple {k}: value {v!r} equals the null token and would not round-trip"
                )
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            # CRLF terminators make the writer quote values holding a bare \r or \n.
            # QUOTE_MINIMAL leaves "" unquoted; a lone empty field on a
            # one-column row must be quoted or csv reads it as a blank line.
            writer = csv.writer(fh, lineterminator="\r\n")
            writer.writerow(r.schema.attributes)
            for row in r.rows:
                cells = [null_token if v is None else v for v in row]
                if len(cells) == 1 and cells[0] == "":
                    fh.write('""\r\n')
                else:
                    writer.writerow(cells)
    except OSError as exc:
        raise RelationError(f"cannot write {path}: {exc}") from exc
    except csv.Error as exc:  # e.g. NUL characters, which csv cannot represent
        raise RelationError(f"cannot write {path}: {exc}") from exc


@dataclass(frozen=True)
class DomainIndex:
    """Value and co-occurrence counts for one relation.

    Items are ``(attribute_index, value)`` pairs. ``pairs[item]`` maps every
    item found alongside ``item`` in some tuple to the number of such tuples.
    """

    n: int
    counts: dict = field(repr=False)
    pairs: dict = field(repr=False)

    def count(self, attr: int, value: Cell) -> int:
        return self.counts.get((attr, value), 0)

    def pair_count(self, a: int, u: Cell, b: int, v: Cell) -> int:
        return self.pairs.get((a, u), {}).get((b, v), 0)

    def cooccurring(self, attr: int, value: Cell) -> dict:
        """Items that co-occur with ``(attr, value)``, with tuple counts."""
        return self.pairs.get((attr, value), {})

    def attribute_counts(self, attr: int) -> dict:
        return {v: k for (a, v), k in self.counts.items() if a == attr}

    def domain_size(self, attr: int) -> int:
        sizes = self.__dict__.get("_sizes")
        if sizes is None:
            sizes = Counter(a for a, _ in self.counts)
            object.__setattr__(self, "_sizes", sizes)
        return sizes[attr]


def build_domain_index(r: Relation) -> DomainIndex:
    if r.n == 0:
        raise RelationError("cannot index an empty relation")
    distinct = Counter(r.rows)
    counts: Counter = Counter()
    pairs: dict = {}
    for row, k in distinct.items():
        items = list(enumerate(row))
        for it in items:
            counts[it] += k
        for x, y in combinations(items, 2):
            px = pairs.setdefault(x, {})
            px[y] = px.get(y, 0) + k
            py = pairs.setdefault(y, {})
            py[x] = py.get(x, 0) + k
    return DomainIndex(r.n, dict(counts), pairs)
