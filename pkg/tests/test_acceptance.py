"""Acceptance criteria 1-7. Each test records one PASS/FAIL line, shown in the terminal summary."""

import statistics
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from bayesclean.bayes_net import learn_bayes_net
from bayesclean.cfd import count_violations, mine_cfds
from bayesclean.cleaner import Cleaner, CleanerConfig
from bayesclean.error_model import context_set, f_ds, shared_context
from bayesclean.evaluation import score, sweep_beta, sweep_scale
from bayesclean.noise import NoiseSpec, inject
from bayesclean.relation import build_domain_index
from bayesclean.synthetic import example_relation, generate_cars
from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.slow

ROWS = 10_000
OBSERVED = ("Focus", "Honda", "JPN", "Full-size", "V6")
ACCORD = ("Accord", "Honda", "JPN", "Full-size", "V6")
CIVIC = ("Civic", "Honda", "JPN", "Mid-size", "V4")


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def desk_run(seed, configs):
    clean = generate_cars(ROWS, seed=seed)
    dirty, gt = inject(clean, NoiseSpec(0.01, seed=seed))
    bn = learn_bayes_net(dirty)
    idx = build_domain_index(dirty)
    out = []
    for cfg in configs:
        repaired, _ = Cleaner(dirty, cfg, bn=bn, idx=idx).clean()
        out.append(score(clean, dirty, repaired, gt))
    return out


def test_criterion_1_desk_scale_correction():
    (m,) = desk_run(0, [CleanerConfig()])
    limit = 0.002 * m.clean_cells
    ok = m.correction_rate >= 0.25 and m.false_positives <= limit
    report(1, ok, f"correction_rate={m.correction_rate:.3f} (>=0.25) false_positives={m.false_positives} (<={limit:.0f})")


def test_criterion_2_ablation_ordering():
    configs = [CleanerConfig(), CleanerConfig(beta=0.0), CleanerConfig(alpha=0.0)]
    rates = [desk_run(seed, configs) for seed in (1, 2, 3)]
    combined, no_ds, no_ed = (statistics.mean(r[k].correction_rate for r in rates) for k in range(3))
    ok = combined >= no_ds and combined >= no_ed
    report(2, ok, f"mean correction_rate combined={combined:.4f} beta=0:{no_ds:.4f} alpha=0:{no_ed:.4f}")


def test_criterion_3_beta_tradeoff():
    clean = generate_cars(ROWS, seed=1)
    res = sweep_beta(clean, NoiseSpec(0.01, seed=1), [0.5, 1, 2, 3, 4, 6])
    fp = [p.metrics.false_positives for p in res.points]
    gain = [p.metrics.overall_gain for p in res.points]
    inversions = sum(b > a for a, b in zip(fp, fp[1:]))
    top = max(range(len(gain)), key=gain.__getitem__)
    ok = inversions <= 1 and 0 < top < len(gain) - 1
    report(3, ok, f"false_positives={fp} ({inversions} inversions) overall_gain={gain} peak at beta={res.points[top].value}")


def test_criterion_4_cfd_collapse():
    clean = generate_cars(ROWS, seed=0)
    rels = [clean] + [inject(clean, NoiseSpec(tau, seed=0))[0] for tau in (0.001, 0.01)]
    counts, exact = [], True
    for r in rels:
        rules = mine_cfds(r, min_support=20, max_lhs=1)
        counts.append(len(rules))
        exact = exact and all(count_violations(r, rule) == 0 for rule in rules)
    ok = counts[0] > counts[1] > counts[2] and exact
    report(4, ok, f"rules at 0%/0.1%/1% noise = {counts}, all exact={exact}")


def test_criterion_5_worked_example():
    r = example_relation()
    idx = build_domain_index(r)
    a = f_ds(0, "Focus", "Accord", idx, 1.0, shared_context(OBSERVED, ACCORD, 0))
    c = f_ds(0, "Focus", "Civic", idx, 1.0, shared_context(OBSERVED, CIVIC, 0))
    ctx_a = {v for _, v in context_set(0, "Focus", "Accord", idx, OBSERVED, ACCORD)}
    ctx_c = {v for _, v in context_set(0, "Focus", "Civic", idx, OBSERVED, CIVIC)}
    # ED(Focus, Accord) = 5, one above the default candidate bound
    chosen = Cleaner(r, CleanerConfig(threshold=5)).clean_tuple(OBSERVED).chosen
    ok = (
        a > c
        and ctx_a == {"Honda", "JPN", "Full-size", "V6"}
        and ctx_c == {"Honda", "JPN"}
        and chosen == ACCORD
    )
    report(5, ok, f"f_ds Accord={a:.4f} > Civic={c:.4f}; contexts ok={ctx_a == {'Honda', 'JPN', 'Full-size', 'V6'} and ctx_c == {'Honda', 'JPN'}}; repair={chosen}")


def test_criterion_6_property_suites():
    here = Path(__file__).parent
    files = ["test_error_model.py", "test_bayes_net.py", "test_cleaner.py", "test_noise.py", "test_evaluation.py"]
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *(str(here / f) for f in files)],
        capture_output=True,
        text=True,
        cwd=here.parent,
    )
    seconds = time.perf_counter() - start
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    report(6, proc.returncode == 0 and seconds < 60, f"{tail} in {seconds:.1f}s (<60s)")


def test_criterion_7_scaling_shape():
    clean = generate_cars(ROWS, seed=0)
    spec = NoiseSpec(0.01, seed=0)
    by_n = sweep_scale(clean, [0.01], [1000, 2000, 5000, 10000], spec=spec, repeats=2)
    ns = [p.value for p in by_n.points]
    secs = [p.seconds for p in by_n.points]
    slope = float(np.polyfit(np.log(ns), np.log(secs), 1)[0])
    by_tau = sweep_scale(clean, [0.001, 0.01, 0.05], [5000], spec=spec, repeats=2)
    tsecs = [p.seconds for p in by_tau.points]
    monotone = all(b >= a for a, b in zip(tsecs, tsecs[1:]))
    ok = slope <= 1.3 and monotone
    report(
        7,
        ok,
        f"n-exponent={slope:.2f} (<=1.3) times={[round(s, 2) for s in secs]}; "
        f"tau times={[round(s, 2) for s in tsecs]} non-decreasing={monotone}",
    )
