"""Generate the synthetic disambiguation fixture.

Two ambiguous verbs each have two senses, and every sense has its own pool
of subjects, objects and context words, so the senses see disjoint argument
distributions. Writes corpus.txt, triples.tsv and dataset.tsv.

    python3 scripts/make_fixture.py --out tests/fixtures
"""

from __future__ import annotations

import argparse
import random
from collections import Counter
from pathlib import Path

SENSES = {
    # sense: (landmark verb, subjects, objects, context words)
    "satisfy": ("satisfy", ["system", "plan", "design"], ["criterion", "requirement", "standard"], ["rule", "test", "quality"]),
    "visit": ("visit", ["child", "friend", "family"], ["house", "town", "village"], ["home", "street", "holiday"]),
    "depict": ("depict", ["artist", "painter", "student"], ["scene", "portrait", "landscape"], ["paper", "pencil", "colour"]),
    "pull": ("pull", ["horse", "man", "team"], ["cart", "rope", "boat"], ["strength", "road", "weight"]),
}
AMBIGUOUS = {"meet": ("satisfy", "visit"), "draw": ("depict", "pull")}
FUNCTION_WORDS = ["the", "a", "of", "in", "with"]
GENERIC = ["time", "day", "year"]
SALIENCE = [0, 1, 4, 16]
# each noun owns two of these; the pools deliberately straddle senses
MODIFIERS = ["old", "new", "big", "small", "red", "green", "strong", "quiet", "local", "modern", "simple", "heavy"]


def make_sentence(rng: random.Random, sense: str, verb: str, p_generic: float) -> tuple[list[str], str, str]:
    _, subs, objs, ctx = SENSES[sense]
    s, o = rng.choice(subs), rng.choice(objs)
    tokens = ["the", s, verb, "the", o]
    for _ in range(rng.randint(1, 3)):
        tokens.append(rng.choice(FUNCTION_WORDS))
        tokens.append(rng.choice(GENERIC) if rng.random() < p_generic else rng.choice(ctx))
    return tokens, s, o


def noun_modifiers(rng: random.Random) -> dict[str, tuple[str, str]]:
    nouns = sorted({n for _, subs, objs, _ in SENSES.values() for n in subs + objs})
    return {n: tuple(rng.sample(MODIFIERS, 2)) for n in nouns}


def noun_salience(rng: random.Random, nouns: list[str]) -> list[int]:
    """Relative share of verb-free sentences per noun; uneven on purpose."""
    return [rng.choice(SALIENCE) for _ in nouns]


def describe(rng: random.Random, noun: str, mods: tuple[str, str]) -> list[str]:
    # verb-free sentence: a noun with its own modifiers only
    return ["the", rng.choice(mods), noun, rng.choice(FUNCTION_WORDS), rng.choice(mods)]


def generate(
    seed: int, n_sentences: int, p_ambiguous: float, p_generic: float, p_describe: float, human_noise: float
):
    rng = random.Random(seed)
    corpus, triples = [], Counter()
    senses = list(SENSES)
    modifiers = noun_modifiers(rng)
    nouns = sorted(modifiers)
    salience = noun_salience(rng, nouns)
    for _ in range(n_sentences):
        if rng.random() < p_describe:
            noun = rng.choices(nouns, weights=salience)[0]
            corpus.append(describe(rng, noun, modifiers[noun]))
            continue
        sense = rng.choice(senses)
        amb = next(v for v, ss in AMBIGUOUS.items() if sense in ss)
        verb = amb if rng.random() < p_ambiguous else SENSES[sense][0]
        tokens, s, o = make_sentence(rng, sense, verb, p_generic)
        corpus.append(tokens)
        triples[(verb, s, o)] += 1

    rows = []
    for verb, (sense_a, sense_b) in AMBIGUOUS.items():
        for i in range(5):
            # alternate the sense of the arguments across the five sentences
            arg_sense = sense_a if i % 2 == 0 else sense_b
            _, subs, objs, _ = SENSES[arg_sense]
            s, o = rng.choice(subs), rng.choice(objs)
            for landmark_sense in (sense_a, sense_b):
                band = "HIGH" if landmark_sense == arg_sense else "LOW"
                for annotator in ("p1", "p2"):
                    centre = 5.5 if band == "HIGH" else 2.5
                    score = round(centre + rng.gauss(0.0, human_noise))
                    score = min(7, max(1, score))
                    rows.append((annotator, verb, s, o, SENSES[landmark_sense][0], score, band))
    return corpus, triples, rows


def write(out: Path, corpus, triples, rows) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "corpus.txt", "w", encoding="utf-8", newline="\n") as fh:
        for tokens in corpus:
            fh.write(" ".join(tokens) + "\n")
    with open(out / "triples.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# verb\tsubject\tobject\tcount\n")
        for (v, s, o), n in sorted(triples.items()):
            fh.write(f"{v}\t{s}\t{o}\t{n}\n")
    with open(out / "dataset.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("annotator\tverb\tsubject\tobject\tlandmark\tscore\tband\n")
        for row in rows:
            fh.write("\t".join(map(str, row)) + "\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=Path("tests/fixtures"))
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--sentences", type=int, default=2000)
    ap.add_argument("--p-ambiguous", type=float, default=0.5)
    ap.add_argument("--p-generic", type=float, default=0.3)
    ap.add_argument("--p-describe", type=float, default=0.5)
    ap.add_argument("--human-noise", type=float, default=1.2)
    args = ap.parse_args()
    corpus, triples, rows = generate(
        args.seed, args.sentences, args.p_ambiguous, args.p_generic, args.p_describe, args.human_noise
    )
    write(args.out, corpus, triples, rows)
    vocab = {t for s in corpus for t in s}
    print(f"{len(corpus)} sentences, vocabulary {len(vocab)}, {len(triples)} distinct triples, {len(rows)} judgments")


if __name__ == "__main__":
    main()
