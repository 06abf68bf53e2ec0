#!/usr/bin/env python3
"""Convert the NLTK Brown corpus to the `category<TAB>tokens` labeled format.

Needs `nltk` with the `brown` corpus downloaded (`python -m nltk.downloader brown`).
Punctuation-only tokens are dropped and every Brown category is kept; pass
`--exclude editorial` when training. The acceptance suite drops it itself.

    python3 scripts/brown_to_labeled.py > brown.tsv
    VIRALITY_BROWN_CORPUS=brown.tsv cargo test -p virality-core --test acceptance
"""

import argparse
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("-o", "--output", help="write here instead of stdout")
    args = parser.parse_args()

    try:
        from nltk.corpus import brown
    except ImportError:
        print("nltk is not installed (pip install nltk)", file=sys.stderr)
        return 1

    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    counts = {}
    with out:
        for category in brown.categories():
            for sentence in brown.sents(categories=category):
                words = [w for w in sentence if any(c.isalnum() for c in w)]
                if not words:
                    continue
                out.write(f"{category}\t{' '.join(words)}\n")
                counts[category] = counts.get(category, 0) + 1
    for category, n in sorted(counts.items()):
        print(f"{category}\t{n}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
