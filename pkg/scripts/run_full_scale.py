"""Full-scale disambiguation experiment.

Builds (or loads) a co-occurrence space, then evaluates all seven models on
a judgment dataset and prints the results table. Intended for a large
lemmatised corpus with externally extracted subject-verb-object triples.

    python3 scripts/run_full_scale.py --corpus bnc.txt --triples svo.tsv \\
        --dataset judgments.tsv --space-cache space.tsv --json results.json

The reference correlations printed at the end are the published figures
for this experiment. Differences of a few hundredths are expected because
the context window and stoplist behind them are unknown.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from tensor_verb import ALL_MODELS, build_space, evaluate, load_space, load_triples, parse_dataset, read_corpus, save_space
from tensor_verb.evaluation import format_table, reports_to_json, upper_bound
from tensor_verb.stoplist import DEFAULT_STOPLIST, read_stoplist
from tensor_verb.verbs import VerbMatrixStore

REFERENCE_RHO = {
    "categorical:kron_self": 0.28,
    "categorical:indirect": 0.21,
    "multiply": 0.17,
    "categorical:zero_diag": 0.17,
    "baseline": 0.16,
    "categorical:one_diag": 0.08,
    "add": 0.05,
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--corpus", type=Path)
    ap.add_argument("--space-cache", type=Path, help="load this space if it exists, otherwise build and save it")
    ap.add_argument("--triples", type=Path, required=True)
    ap.add_argument("--dataset", type=Path, required=True)
    ap.add_argument("--basis-size", type=int, default=2000)
    ap.add_argument("--window", type=int, default=5)
    ap.add_argument("--stoplist", type=Path)
    ap.add_argument("--aggregate", default="per-judgment", choices=("per-judgment", "mean-per-pair"))
    ap.add_argument("--cache-dir", type=Path, help="verb-matrix cache")
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--json", type=Path)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    log = logging.getLogger("run_full_scale")

    t0 = time.perf_counter()
    if args.space_cache is not None and args.space_cache.is_file():
        space = load_space(args.space_cache)
        log.info("loaded space %s (%d words, dim %d)", args.space_cache, len(space), space.dimension)
    else:
        if args.corpus is None:
            ap.error("--corpus is required when no cached space exists")
        stoplist = read_stoplist(args.stoplist) if args.stoplist else DEFAULT_STOPLIST
        space = build_space(
            read_corpus(args.corpus),
            basis_size=args.basis_size,
            window=args.window,
            stoplist=stoplist,
            workers=args.workers,
        )
        log.info("built space (%d words, dim %d) in %.1fs", len(space), space.dimension, time.perf_counter() - t0)
        if args.space_cache is not None:
            save_space(space, args.space_cache)

    triples = load_triples(args.triples)
    dataset = parse_dataset(args.dataset)
    store = VerbMatrixStore(space, triples, cache_dir=args.cache_dir)
    reports = evaluate(dataset, ALL_MODELS, space, triples, store=store, aggregate=args.aggregate, workers=args.workers)
    upper = upper_bound(dataset)
    sys.stdout.write(format_table(reports, upper))
    if args.json:
        args.json.write_text(reports_to_json(reports, upper), encoding="utf-8")

    print("\nreference comparison (|Δρ| <= 0.05):")
    for r in reports:
        ref = REFERENCE_RHO[r.model.key]
        delta = None if r.rho is None else r.rho - ref
        flag = "ok" if delta is not None and abs(delta) <= 0.05 else "off"
        shown = "undef" if delta is None else f"{delta:+.3f}"
        print(f"  {r.model.label:<18} ref {ref:.2f}  Δ {shown:>7}  {flag}")
    log.info("done in %.1fs", time.perf_counter() - t0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
