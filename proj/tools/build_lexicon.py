#!/usr/bin/env python3
"""Build data/lexicon/core_lexicon.csv from the POS seed list.

Frequencies come from the wordfreq package (Zipf scale minus 3, i.e. log10
occurrences per million words). Syllable counts come from the CMU
Pronouncing Dictionary. Age-of-acquisition and concreteness are only filled
from norm files passed on the command line; without them the columns stay
blank.
"""

import argparse
import csv
import sys
from pathlib import Path

import cmudict
from wordfreq import zipf_frequency


def read_seed(path):
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, tags = line.split("\t")
        rows.append((word.strip().lower(), tags.strip()))
    return rows


def read_norms(path, word_col, value_col):
    if not path:
        return {}
    out = {}
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            word = row[word_col].strip().lower()
            value = row[value_col].strip()
            if word and value:
                out[word] = float(value)
    return out


def syllables(pron, word):
    entries = pron.get(word)
    if not entries:
        return ""
    return str(sum(1 for phone in entries[0] if phone[-1].isdigit()))


def main():
    here = Path(__file__).resolve().parent.parent / "data" / "lexicon"
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", default=str(here / "pos_seed.tsv"))
    ap.add_argument("--out", default=str(here / "core_lexicon.csv"))
    ap.add_argument("--aoa", help="CSV with Word and AoA columns")
    ap.add_argument("--aoa-columns", default="Word,AoA")
    ap.add_argument("--concreteness", help="CSV with Word and Conc.M columns")
    ap.add_argument("--concreteness-columns", default="Word,Conc.M")
    args = ap.parse_args()

    aoa = read_norms(args.aoa, *args.aoa_columns.split(","))
    conc = read_norms(args.concreteness, *args.concreteness_columns.split(","))
    pron = cmudict.dict()

    with open(args.out, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["word", "log_frequency", "aoa", "concreteness", "pos_tags", "syllables"])
        for word, tags in read_seed(args.seed):
            zipf = zipf_frequency(word, "en")
            freq = f"{zipf - 3:.2f}" if zipf > 0 else ""
            w.writerow([
                word,
                freq,
                f"{aoa[word]:.2f}" if word in aoa else "",
                f"{conc[word]:.2f}" if word in conc else "",
                tags,
                syllables(pron, word),
            ])
    print(f"wrote {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
