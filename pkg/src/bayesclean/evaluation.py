"""Ground-truth scoring and parameter sweeps."""

from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

from .cleaner import Cleaner, CleanerConfig
from .noise import GroundTruth, NoiseSpec, inject
from .relation import Relation

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CleaningMetrics:
    values_corrected: int
    false_positives: int
    missed: int
    dirty_cells: int
    total_cells: int

    @property
    def overall_gain(self) -> int:
        return self.values_corrected - self.false_positives

    @property
    def correction_rate(self) -> float:
        return self.values_corrected / self.dirty_cells if self.dirty_cells else 0.0

    @property
    def clean_cells(self) -> int:
        return self.total_cells - self.dirty_cells

    @property
    def false_positive_rate(self) -> float:
        return self.false_positives / self.clean_cells if self.clean_cells else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(
            overall_gain=self.overall_gain,
            correction_rate=self.correction_rate,
            false_positive_rate=self.false_positive_rate,
        )
        return d


def _check_aligned(*rels: Relation) -> None:
    first = rels[0]
    for r in rels[1:]:
        if r.schema != first.schema or r.n != first.n:
            raise ValueError(
                f"relations are not cell-aligned: {first.n}x{first.m} {first.schema.attributes} "
                f"vs {r.n}x{r.m} {r.schema.attributes}"
            )


def score(clean: Relation, dirty: Relation, repaired: Relation, gt: GroundTruth) -> CleaningMetrics:
    _check_aligned(clean, dirty, repaired)
    dirty_cells = gt.cells()
    for e in gt:
        if not (0 <= e.row < clean.n and 0 <= e.attr < clean.m):
            raise ValueError(f"ground truth cell ({e.row}, {e.attr}) is outside the relation")
    corrected = sum(1 for e in gt if repaired[e.row][e.attr] == clean[e.row][e.attr])
    false_pos = 0
    for i, (d, o) in enumerate(zip(dirty.rows, repaired.rows)):
        if d == o:
            continue
        false_pos += sum(1 for j in range(clean.m) if d[j] != o[j] and (i, j) not in dirty_cells)
    return CleaningMetrics(corrected, false_pos, len(gt) - corrected, len(gt), clean.n * clean.m)


def clean_cell_gain(clean: Relation, dirty: Relation, repaired: Relation) -> int:
    """Clean cells in ``repaired`` minus clean cells in ``dirty``."""
    _check_aligned(clean, dirty, repaired)

    def agree(r):
        return sum(a == b for x, y in zip(clean.rows, r.rows) for a, b in zip(x, y))

    return agree(repaired) - agree(dirty)


@dataclass
class SweepPoint:
    value: float
    params: dict
    metrics: Optional[CleaningMetrics]
    seconds: float
    error: Optional[str] = None


@dataclass
class SweepResult:
    axis: str
    points: list = field(default_factory=list)

    def rows(self) -> list:
        out = []
        for p in self.points:
            row = {"axis": self.axis, "value": p.value, **p.params, "seconds": round(p.seconds, 4)}
            if p.metrics is not None:
                row.update(p.metrics.to_dict())
            row["error"] = p.error or ""
            out.append(row)
        return out

    def write_csv(self, path_or_file) -> None:
        rows = self.rows()
        keys = []
        for row in rows:
            keys.extend(k for k in row if k not in keys)
        if not keys:
            keys = ["axis", "value", "seconds", "error"]
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
        try:
            w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        finally:
            if own:
                fh.close()


def run_once(clean: Relation, spec: NoiseSpec, config: CleanerConfig):
    """Inject, learn, clean and score. Seconds cover learning plus cleaning."""
    dirty, gt = inject(clean, spec)
    start = time.perf_counter()
    repaired, _ = Cleaner(dirty, config).clean()
    seconds = time.perf_counter() - start
    return score(clean, dirty, repaired, gt), seconds


def _point(task):
    value, params, clean, spec, config, repeats = task
    try:
        metrics, seconds = run_once(clean, spec, config)
        for _ in range(repeats - 1):
            seconds = min(seconds, run_once(clean, spec, config)[1])
        return SweepPoint(value, params, metrics, seconds)
    except Exception as exc:  # one bad point must not sink the sweep
        log.exception("sweep point %s failed", params)
        return SweepPoint(value, params, None, 0.0, f"{type(exc).__name__}: {exc}")


def _run(axis, tasks, workers: int, repeats: int) -> SweepResult:
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    tasks = [t + (repeats,) for t in tasks]
    if workers > 1 and len(tasks) > 1:
        # timings from concurrent points are not comparable; use for metrics only
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_point, tasks))
    else:
        points = [_point(t) for t in tasks]
    points.sort(key=lambda p: (p.value, sorted(p.params.items())))
    return SweepResult(axis, points)


def sweep_beta(
    clean: Relation,
    spec: NoiseSpec,
    betas,
    alpha_ratio: float = 0.667,
    config: CleanerConfig = None,
    workers: int = 1,
    repeats: int = 1,
) -> SweepResult:
    config = config or CleanerConfig()
    tasks = []
    for b in betas:
        cfg = replace(config, alpha=round(alpha_ratio * b, 12), beta=b)
        tasks.append((b, {"beta": b, "alpha": cfg.alpha}, clean, spec, cfg))
    return _run("beta", tasks, workers, repeats)


def sweep_scale(
    clean: Relation,
    taus,
    sizes,
    config: CleanerConfig = None,
    spec: NoiseSpec = None,
    workers: int = 1,
    repeats: int = 1,
) -> SweepResult:
    """End-to-end runs over the (n, tau) grid; each n uses the first n rows of ``clean``.

    With ``repeats`` > 1 a point keeps its fastest wall time.
    """
    config = config or CleanerConfig()
    spec = spec or NoiseSpec()
    taus, sizes = list(taus), list(sizes)
    axis = "n" if len(set(sizes)) > 1 and len(set(taus)) <= 1 else "tau" if len(set(sizes)) <= 1 else "n,tau"
    tasks = []
    for n in sizes:
        if not 1 <= n <= clean.n:
            raise ValueError(f"size {n} is outside 1..{clean.n}")
        sub = clean.with_rows(clean.rows[:n])
        for tau in taus:
            value = n if axis != "tau" else tau
            tasks.append((value, {"n": n, "tau": tau}, sub, replace(spec, tau=tau), config))
    return _run(axis, tasks, workers, repeats)
