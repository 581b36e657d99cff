#!/usr/bin/env python3
"""Convert langdetect n-gram profiles into conspigraph trigram profile files.

Usage: build_language_profiles.py <langdetect/profiles dir> <out dir> [code ...]

Each output file holds one `trigram<TAB>weight` pair per line. Weights are
sqrt(count) over the top-N lowercased trigrams, L2-normalized. manifest.tsv
lists `code<TAB>file`.
"""
import json
import math
import os
import sys

TOP_N = 1000
DEFAULT = "en de es pt it fr nl ru pl sv".split()


def build(src, code):
    with open(os.path.join(src, code), encoding="utf-8") as fh:
        freq = json.load(fh)["freq"]
    merged = {}
    for gram, count in freq.items():
        if len(gram) != 3:
            continue
        key = gram.lower()
        merged[key] = merged.get(key, 0) + count
    top = sorted(merged.items(), key=lambda kv: (-kv[1], kv[0]))[:TOP_N]
    weights = [(g, math.sqrt(c)) for g, c in top]
    norm = math.sqrt(sum(w * w for _, w in weights))
    return [(g, w / norm) for g, w in weights]


def main():
    src, out = sys.argv[1], sys.argv[2]
    codes = sys.argv[3:] or DEFAULT
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "manifest.tsv"), "w", encoding="utf-8") as manifest:
        for code in codes:
            name = f"{code}.tsv"
            with open(os.path.join(out, name), "w", encoding="utf-8") as fh:
                for gram, weight in build(src, code):
                    fh.write(f"{gram}\t{weight:.8f}\n")
            manifest.write(f"{code}\t{name}\n")


if __name__ == "__main__":
    main()
