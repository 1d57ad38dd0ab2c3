"""``tensor-verb`` command line.

Subcommands: ``build-space``, ``build-verbs``, ``similarity``, ``evaluate``.
Failures print one ``E_<CODE>: message`` line to stderr and exit with
2 (usage, I/O, parse), 3 (out of vocabulary) or 4 (degenerate statistics).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .compose import ALL_MODELS, ModelName, ModelSpec
from .compose import similarity as meaning_similarity
from .errors import TensorVerbError
from .evaluation import (
    AGGREGATE_MODES,
    compose_sentence,
    evaluate,
    format_table,
    parse_dataset,
    reports_to_json,
    upper_bound,
)
from .space import build_space, load_space, load_triples, read_corpus, save_space
from .stoplist import DEFAULT_STOPLIST, read_stoplist
from .verbs import Method, VerbMatrixStore

log = logging.getLogger("tensor_verb")

EXIT_USAGE = 2
EXIT_OOV = 3
EXIT_DEGENERATE = 4
_EXIT = {"E_USAGE": EXIT_USAGE, "E_IO": EXIT_USAGE, "E_PARSE": EXIT_USAGE, "E_OOV": EXIT_OOV, "E_DEGENERATE": EXIT_DEGENERATE}

THREADS_ENV = "TENSOR_VERB_THREADS"


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    corpus_path: Path | None = None
    triples_path: Path | None = None
    dataset_path: Path | None = None
    space_path: Path | None = None
    window: int = 5
    basis_size: int = 2000
    stoplist_path: Path | None = None
    use_stoplist: bool = True
    targets_path: Path | None = None
    models: list[ModelSpec] = field(default_factory=lambda: list(ALL_MODELS))
    aggregate_mode: str = "per-judgment"
    exclude_degenerate: bool = False
    oov: str = "skip"
    json_out: Path | None = None
    cache_dir: Path | None = None
    type_level: bool = False

    def __post_init__(self):
        if self.window < 1 or self.basis_size < 1:
            raise CliError("E_USAGE", "window and basis size must be >= 1")

    def require(self, *names: str) -> None:
        """Fail fast on missing input files before any work starts."""
        for name in names:
            path = getattr(self, name)
            if path is None:
                raise CliError("E_USAGE", f"--{name.removesuffix('_path').replace('_', '-')} is required")
            if not Path(path).is_file():
                raise CliError("E_IO", f"no such file: {path}")


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise CliError("E_USAGE", f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise CliError("E_USAGE", f"{THREADS_ENV} must be >= 0")
    return n or (os.cpu_count() or 1)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"E_USAGE: {self.prog}: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _model_list(text: str) -> list[ModelSpec]:
    try:
        return [ModelSpec.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _method(text: str) -> Method:
    try:
        return Method.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_words(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [w for line in fh for w in line.split() if not line.startswith("#")]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tensor-verb", description="Transitive-verb matrices and sentence similarity.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-space", help="build a co-occurrence space from a lemmatised corpus")
    b.add_argument("--corpus", required=True, type=Path)
    b.add_argument("--out", required=True, type=Path)
    b.add_argument("--basis-size", type=_positive_int, default=2000)
    b.add_argument("--window", type=_positive_int, default=5)
    stop = b.add_mutually_exclusive_group()
    stop.add_argument("--stoplist", type=Path, help="file of words excluded from the basis")
    stop.add_argument("--no-stoplist", action="store_true", help="select basis words from raw frequencies")
    b.add_argument("--targets", type=Path, help="only build vectors for these words (one per line)")

    v = sub.add_parser("build-verbs", help="build and cache verb matrices")
    v.add_argument("--space", required=True, type=Path)
    v.add_argument("--triples", type=Path)
    v.add_argument("--method", type=_method, action="append", help="repeatable; default: all four")
    v.add_argument("--verbs", help="comma-separated verbs; default: every verb in the triples file")
    v.add_argument("--cache-dir", required=True, type=Path)
    v.add_argument("--type-level", action="store_true", help="indirect: count each (subject, object) pair once")

    s = sub.add_parser("similarity", help="similarity of two subject-verb-object sentences")
    s.add_argument("--space", required=True, type=Path)
    s.add_argument("--triples", type=Path)
    s.add_argument("--model", required=True, choices=[m.value for m in ModelName])
    s.add_argument("--matrix-method", type=_method)
    s.add_argument("--cache-dir", type=Path)
    s.add_argument("--type-level", action="store_true")
    s.add_argument("words", nargs="+", metavar="WORD", help="SUB VERB OBJ / SUB VERB OBJ")

    e = sub.add_parser("evaluate", help="run the disambiguation evaluation")
    e.add_argument("--space", required=True, type=Path)
    e.add_argument("--dataset", required=True, type=Path)
    e.add_argument("--triples", type=Path)
    e.add_argument(
        "--models",
        type=_model_list,
        default=list(ALL_MODELS),
        help="comma-separated: baseline, add, multiply, indirect, zero-diag, one-diag, kron-self",
    )
    e.add_argument("--aggregate", choices=AGGREGATE_MODES, default="per-judgment")
    e.add_argument("--exclude-degenerate", action="store_true")
    e.add_argument("--oov", choices=("skip", "zero"), default="skip")
    e.add_argument("--json", dest="json_out", type=Path)
    e.add_argument("--cache-dir", type=Path)
    e.add_argument("--type-level", action="store_true")
    return p


def cmd_build_space(config: RunConfig) -> int:
    config.require("corpus_path")
    if config.stoplist_path is not None:
        config.require("stoplist_path")
        stoplist = read_stoplist(config.stoplist_path)
    else:
        stoplist = DEFAULT_STOPLIST if config.use_stoplist else frozenset()
    targets = None
    if config.targets_path is not None:
        config.require("targets_path")
        targets = _read_words(config.targets_path)
    corpus = read_corpus(config.corpus_path)
    space = build_space(
        corpus,
        basis_size=config.basis_size,
        window=config.window,
        stoplist=stoplist,
        targets=targets,
        workers=worker_count(),
    )
    save_space(space, config.space_path)
    n_tokens = sum(len(s) for s in corpus)
    print(f"dimension={space.dimension} vocabulary={len(space)} tokens={n_tokens} out={config.space_path}")
    return 0


def _load_inputs(config: RunConfig, need_triples: bool):
    config.require("space_path")
    space = load_space(config.space_path)
    triples = None
    if config.triples_path is not None:
        config.require("triples_path")
        triples = load_triples(config.triples_path)
    elif need_triples:
        raise CliError("E_USAGE", "--triples is required for the indirect method")
    return space, triples


def cmd_build_verbs(config: RunConfig, methods: list[Method], verbs: list[str] | None) -> int:
    space, triples = _load_inputs(config, Method.INDIRECT in methods)
    if verbs is None:
        if triples is None:
            raise CliError("E_USAGE", "--verbs is required without a triples file")
        verbs = triples.verbs
    store = VerbMatrixStore(space, triples, cache_dir=config.cache_dir, type_level=config.type_level)
    for method in methods:
        for verb in verbs:
            vm = store.get(verb, method)
            print(f"{method.value}\t{verb}\t{vm.dimension}x{vm.dimension}")
    return 0


def _split_sentences(words: list[str]) -> tuple[tuple[str, str, str], tuple[str, str, str]]:
    if "/" in words:
        i = words.index("/")
        left, right = words[:i], words[i + 1 :]
    else:
        left, right = words[:3], words[3:]
    if len(left) != 3 or len(right) != 3:
        raise CliError("E_USAGE", "expected two sentences: SUB VERB OBJ / SUB VERB OBJ")
    return tuple(left), tuple(right)


def cmd_similarity(config: RunConfig, sentence1, sentence2, model: ModelSpec) -> int:
    space, triples = _load_inputs(config, model.matrix_method is Method.INDIRECT)
    store = VerbMatrixStore(space, triples, cache_dir=config.cache_dir, type_level=config.type_level)
    m1 = compose_sentence(model, *sentence1, space, store)
    m2 = compose_sentence(model, *sentence2, space, store)
    cos = meaning_similarity(m1, m2)
    if cos.degenerate:
        print("warning: zero-norm sentence meaning, similarity reported as 0", file=sys.stderr)
    print(repr(cos.value))
    return 0


def cmd_evaluate(config: RunConfig) -> int:
    needs_indirect = any(m.matrix_method is Method.INDIRECT for m in config.models)
    config.require("dataset_path")
    space, triples = _load_inputs(config, needs_indirect)
    dataset = parse_dataset(config.dataset_path)
    store = VerbMatrixStore(space, triples, cache_dir=config.cache_dir, type_level=config.type_level)
    reports = evaluate(
        dataset,
        config.models,
        space,
        triples,
        store=store,
        aggregate=config.aggregate_mode,
        exclude_degenerate=config.exclude_degenerate,
        oov=config.oov,
        workers=worker_count(),
    )
    upper = upper_bound(dataset)
    sys.stdout.write(format_table(reports, upper))
    if config.json_out is not None:
        with open(config.json_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(reports_to_json(reports, upper))
    undefined = [r for r in reports if r.rho_error is not None]
    if undefined:
        for r in undefined:
            print(f"E_DEGENERATE: {r.model.label}: {r.rho_error}", file=sys.stderr)
        return EXIT_DEGENERATE
    return 0


def _dispatch(args) -> int:
    if args.command == "build-space":
        config = RunConfig(
            corpus_path=args.corpus,
            space_path=args.out,
            basis_size=args.basis_size,
            window=args.window,
            stoplist_path=args.stoplist,
            use_stoplist=not args.no_stoplist,
            targets_path=args.targets,
        )
        return cmd_build_space(config)
    if args.command == "build-verbs":
        config = RunConfig(
            space_path=args.space,
            triples_path=args.triples,
            cache_dir=args.cache_dir,
            type_level=args.type_level,
        )
        methods = args.method or list(Method)
        verbs = [w for w in args.verbs.split(",") if w] if args.verbs else None
        return cmd_build_verbs(config, methods, verbs)
    if args.command == "similarity":
        if args.model == ModelName.CATEGORICAL.value:
            if args.matrix_method is None:
                raise CliError("E_USAGE", "--model categorical requires --matrix-method")
        elif args.matrix_method is not None:
            raise CliError("E_USAGE", "--matrix-method only applies to --model categorical")
        model = ModelSpec(ModelName(args.model), args.matrix_method)
        config = RunConfig(
            space_path=args.space,
            triples_path=args.triples,
            cache_dir=args.cache_dir,
            type_level=args.type_level,
        )
        s1, s2 = _split_sentences(args.words)
        return cmd_similarity(config, s1, s2, model)
    config = RunConfig(
        space_path=args.space,
        dataset_path=args.dataset,
        triples_path=args.triples,
        models=args.models,
        aggregate_mode=args.aggregate,
        exclude_degenerate=args.exclude_degenerate,
        oov=args.oov,
        json_out=args.json_out,
        cache_dir=args.cache_dir,
        type_level=args.type_level,
    )
    return cmd_evaluate(config)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _dispatch(args)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except TensorVerbError as exc:
        code, msg = exc.code, str(exc)
    except OSError as exc:
        code, msg = "E_IO", f"{exc.strerror or exc}: {exc.filename}" if exc.filename else str(exc)
    print(f"{code}: {' '.join(msg.split())}", file=sys.stderr)
    return _EXIT[code]


if __name__ == "__main__":
    sys.exit(main())
