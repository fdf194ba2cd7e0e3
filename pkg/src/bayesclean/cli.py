"""Command-line entry point: ``bayesclean <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

from .bayes_net import BayesNet, learn_bayes_net
from .cfd import mine_cfds, save_rules
from .cleaner import DEFAULT_THRESHOLD, Cleaner, CleanerConfig
from .evaluation import score, sweep_beta, sweep_scale
from .noise import GroundTruth, NoiseSpec, inject
from .relation import load_csv, write_csv
from .synthetic import example_relation, generate_cars

log = logging.getLogger("bayesclean")


def _mix(text: str) -> tuple:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--mix takes three weights: spelling,replacement,deletion")
    total = sum(parts)
    if total <= 0 or min(parts) < 0:
        raise argparse.ArgumentTypeError("--mix weights must be non-negative with a positive sum")
    return tuple(p / total for p in parts)


def _threshold(text: str):
    return None if text in ("inf", "none") else int(text)


def cmd_generate(args) -> int:
    r = example_relation() if args.example else generate_cars(args.n, seed=args.seed)
    write_csv(r, args.output, args.null_token)
    log.info("wrote %d rows to %s", r.n, args.output)
    return 0


def cmd_inject(args) -> int:
    r = load_csv(args.input, args.null_token)
    dirty, gt = inject(r, NoiseSpec(args.tau, args.mix, seed=args.seed))
    write_csv(dirty, args.output, args.null_token)
    gt.save(args.ground_truth)
    log.info("corrupted %d of %d cells", len(gt), r.n * r.m)
    return 0


def cmd_learn(args) -> int:
    r = load_csv(args.input, args.null_token)
    bn = learn_bayes_net(r, args.max_parents, args.seed, args.smoothing, args.restarts)
    bn.save(args.output)
    log.info("edges: %s", ", ".join(f"{a}->{b}" for a, b in bn.structure.edges) or "none")
    return 0


def cmd_clean(args) -> int:
    r = load_csv(args.input, args.null_token)
    config = CleanerConfig(
        alpha=args.alpha,
        beta=args.beta,
        mu=args.mu,
        threshold=args.edit_threshold,
        max_parents=args.max_parents,
        seed=args.seed,
    )
    bn = None
    if args.model and Path(args.model).exists():
        bn = BayesNet.load(args.model)
        if bn.attributes != r.schema.attributes:
            raise SystemExit(f"model attributes {bn.attributes} do not match {r.schema.attributes}")
    cleaner = Cleaner(r, config, bn=bn)
    if args.model and bn is None:
        cleaner.bn.save(args.model)
    out, repairs = cleaner.clean()
    write_csv(out, args.output, args.null_token)
    changed = [(k, rep) for k, rep in enumerate(repairs) if rep.changed]
    if args.repairs:
        doc = {
            "attributes": list(r.schema.attributes),
            "changed_tuples": len(changed),
            "repairs": [dict(row=k, **rep.to_json(r.schema.attributes)) for k, rep in changed],
        }
        Path(args.repairs).write_text(json.dumps(doc, indent=1), encoding="utf-8")
    log.info("changed %d of %d tuples", len(changed), r.n)
    return 0


def cmd_eval(args) -> int:
    clean = load_csv(args.clean, args.null_token)
    dirty = load_csv(args.dirty, args.null_token)
    repaired = load_csv(args.repaired, args.null_token)
    metrics = score(clean, dirty, repaired, GroundTruth.load(args.ground_truth))
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        if args.report == "json":
            out.write(json.dumps(metrics.to_dict(), indent=1) + "\n")
        else:
            row = metrics.to_dict()
            w = csv.DictWriter(out, fieldnames=list(row), lineterminator="\n")
            w.writeheader()
            w.writerow(row)
    finally:
        if args.output:
            out.close()
    return 0


def _sweep_relation(cfg: dict):
    if "input" in cfg:
        return load_csv(cfg["input"], cfg.get("null_token", ""))
    return generate_cars(int(cfg.get("rows", 10000)), seed=int(cfg.get("data_seed", cfg.get("seed", 0))))


def cmd_sweep(args) -> int:
    cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    clean = _sweep_relation(cfg)
    spec = NoiseSpec(
        float(cfg.get("tau", 0.01)),
        tuple(cfg["mix"]) if "mix" in cfg else (1 / 3, 1 / 3, 1 / 3),
        seed=int(cfg.get("seed", 0)),
    )
    config = CleanerConfig(
        alpha=float(cfg.get("alpha", 2.3)),
        beta=float(cfg.get("beta", 3.5)),
        mu=float(cfg.get("mu", 1.0)),
        threshold=cfg.get("threshold", DEFAULT_THRESHOLD),
    )
    workers = int(cfg.get("workers", 1))
    repeats = int(cfg.get("repeats", 1))
    if args.axis == "beta":
        result = sweep_beta(
            clean, spec, cfg.get("betas", [0.5, 1, 2, 3, 4, 6]), float(cfg.get("alpha_ratio", 0.667)),
            config, workers, repeats,
        )
    elif args.axis == "tau":
        n = int(cfg.get("n", clean.n))
        result = sweep_scale(clean, cfg.get("taus", [0.001, 0.01, 0.05]), [n], config, spec, workers, repeats)
    else:
        sizes = cfg.get("sizes", [1000, 2000, 5000, 10000])
        result = sweep_scale(clean, [spec.tau], sizes, config, spec, workers, repeats)
    if args.output:
        result.write_csv(args.output)
    else:
        result.write_csv(sys.stdout)
    failed = [p for p in result.points if p.error]
    return 1 if failed else 0


def cmd_mine_cfd(args) -> int:
    r = load_csv(args.input, args.null_token)
    start = time.perf_counter()
    rules = mine_cfds(r, args.min_support, args.max_lhs)
    seconds = time.perf_counter() - start
    summary = {"noise": args.noise_label, "rules": len(rules), "seconds": round(seconds, 4)}
    save_rules(rules, r.schema.attributes, args.output, summary)
    line = f"{summary['noise']},{summary['rules']},{summary['seconds']}\n"
    if args.summary_csv:
        path = Path(args.summary_csv)
        fresh = not path.exists() or path.stat().st_size == 0
        with path.open("a", encoding="utf-8") as fh:
            if fresh:
                fh.write("noise,rules,seconds\n")
            fh.write(line)
    sys.stdout.write("noise,rules,seconds\n" + line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bayesclean", description="Probabilistic cleaning of categorical relations.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, null_token=True):
        sp.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
        if null_token:
            sp.add_argument("--null-token", default="", help="CSV token read and written as NULL (default: empty)")

    g = sub.add_parser("generate", help="write a synthetic used-car relation")
    g.add_argument("--n", type=int, default=10000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--example", action="store_true", help="write the 470-row worked example instead")
    g.add_argument("--output", required=True)
    common(g)
    g.set_defaults(func=cmd_generate)

    i = sub.add_parser("inject", help="corrupt a clean relation")
    i.add_argument("--input", required=True)
    i.add_argument("--output", required=True)
    i.add_argument("--tau", type=float, required=True)
    i.add_argument("--mix", type=_mix, default=(1 / 3, 1 / 3, 1 / 3), help="spelling,replacement,deletion weights")
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--ground-truth", required=True)
    common(i)
    i.set_defaults(func=cmd_inject)

    lr = sub.add_parser("learn", help="learn a Bayes network and save it as JSON")
    lr.add_argument("--input", required=True)
    lr.add_argument("--output", required=True)
    lr.add_argument("--max-parents", type=int, default=3)
    lr.add_argument("--seed", type=int, default=0)
    lr.add_argument("--restarts", type=int, default=5)
    lr.add_argument("--smoothing", type=float, default=1.0)
    common(lr)
    lr.set_defaults(func=cmd_learn)

    c = sub.add_parser("clean", help="repair every tuple of a relation")
    c.add_argument("--input", required=True)
    c.add_argument("--output", required=True)
    c.add_argument("--model", help="Bayes network JSON; learned and written here if the file is missing")
    c.add_argument("--alpha", type=float, default=2.3)
    c.add_argument("--beta", type=float, default=3.5)
    c.add_argument("--mu", type=float, default=1.0)
    c.add_argument("--edit-threshold", type=_threshold, default=DEFAULT_THRESHOLD, help="integer or 'inf'")
    c.add_argument("--max-parents", type=int, default=3)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--repairs", help="write changed tuples as JSON")
    common(c)
    c.set_defaults(func=cmd_clean)

    e = sub.add_parser("eval", help="score a repaired relation against ground truth")
    e.add_argument("--clean", required=True)
    e.add_argument("--dirty", required=True)
    e.add_argument("--repaired", required=True)
    e.add_argument("--ground-truth", required=True)
    e.add_argument("--report", choices=("json", "csv"), default="json")
    e.add_argument("--output", help="default: stdout")
    common(e)
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="run a beta, tau or n sweep and emit CSV")
    s.add_argument("--axis", choices=("beta", "tau", "n"), required=True)
    s.add_argument("--config", required=True, help="JSON sweep configuration")
    s.add_argument("--output", help="default: stdout")
    common(s, null_token=False)
    s.set_defaults(func=cmd_sweep)

    mc = sub.add_parser("mine-cfd", help="mine exact CFDs")
    mc.add_argument("--input", required=True)
    mc.add_argument("--min-support", type=int, default=5)
    mc.add_argument("--max-lhs", type=int, default=3)
    mc.add_argument("--output", required=True)
    mc.add_argument("--noise-label", default="", help="label for the summary row")
    mc.add_argument("--summary-csv", help="append the summary row to this CSV")
    common(mc)
    mc.set_defaults(func=cmd_mine_cfd)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
