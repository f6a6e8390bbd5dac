#!/usr/bin/env python3
"""Corrupt clean sentences with one or two keyboard-style typos.

Writes TSV lines "corrupted<TAB>clean". The output is checked in; rerun only
when the input sentences change.

    tools/make_typo_pairs.py tests/fixtures/text/eng_heldout.txt \
        > tests/fixtures/text/eng_typo_pairs.tsv
"""
import argparse
import random
import sys

NEIGHBOURS = {
    "a": "qsz", "b": "vghn", "c": "xdfv", "d": "serfcx", "e": "wrd", "f": "drtgv",
    "g": "ftyhb", "h": "gyujn", "i": "ujko", "j": "huikm", "k": "jiolm", "l": "kop",
    "m": "njk", "n": "bhjm", "o": "iklp", "p": "ol", "q": "wa", "r": "edft",
    "s": "awedxz", "t": "rfgy", "u": "yhji", "v": "cfgb", "w": "qase", "x": "zsdc",
    "y": "tghu", "z": "asx",
}


def corrupt_word(word, rng):
    i = rng.randrange(1, len(word) - 1)
    op = rng.choice(["swap", "drop", "double", "neighbour"])
    if op == "swap":
        return word[:i] + word[i + 1] + word[i] + word[i + 2:]
    if op == "drop":
        return word[:i] + word[i + 1:]
    if op == "double":
        return word[:i] + word[i] + word[i:]
    c = word[i].lower()
    return word[:i] + rng.choice(NEIGHBOURS.get(c, c)) + word[i + 1:]


def corrupt(sentence, rng):
    words = sentence.split(" ")
    candidates = [k for k, w in enumerate(words) if len(w) >= 4 and w.isalpha()]
    for k in rng.sample(candidates, min(len(candidates), rng.choice([1, 1, 2]))):
        words[k] = corrupt_word(words[k], rng)
    return " ".join(words)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("sentences")
    ap.add_argument("--seed", type=int, default=20200511)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    with open(args.sentences, encoding="utf-8") as f:
        for line in f:
            clean = line.rstrip("\n")
            if not clean:
                continue
            bad = corrupt(clean, rng)
            while bad == clean:
                bad = corrupt(clean, rng)
            sys.stdout.write(f"{bad}\t{clean}\n")


if __name__ == "__main__":
    main()
