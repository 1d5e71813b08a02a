#!/usr/bin/env python3
"""Convert the KEEL copies of AUSTRALIAN and MUSHROOM to LIBSVM files under data/.

The KEEL files ship inside the `keel_ds` wheel on PyPI (keel_ds/data/...). Usage:

    python3 scripts/make_desk_data.py australian.dat mushroom.dat data/

australian: 14 numeric columns plus a 0/1 class. Each column is min-max scaled to
[-1, 1]; class 1 -> +1, class 0 -> -1.
mushroom: 22 categorical columns plus e/p. Every (column, value) pair observed becomes
one binary feature, in column order then sorted value order; e -> +1, p -> -1.
"""

import argparse
import gzip
import io
import pathlib


def fmt(v):
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def write(path, rows, labels):
    if path.suffix == ".gz":
        out = io.TextIOWrapper(gzip.GzipFile(path, "wb", mtime=0), encoding="ascii")
    else:
        out = open(path, "w", encoding="ascii")
    with out:
        for y, row in zip(labels, rows):
            feats = " ".join(f"{i + 1}:{fmt(v)}" for i, v in row if v != 0)
            out.write(f"{'+1' if y > 0 else '-1'}{' ' + feats if feats else ''}\n")


def australian(src, dst):
    raw = [line.strip().split(",") for line in open(src) if line.strip() and not line.startswith("@")]
    cols = list(zip(*[[float(v) for v in r[:-1]] for r in raw]))
    lo = [min(c) for c in cols]
    hi = [max(c) for c in cols]
    rows = []
    for r in raw:
        vals = [float(v) for v in r[:-1]]
        scaled = [(-1.0 + 2.0 * (v - l) / (h - l)) if h > l else 0.0 for v, l, h in zip(vals, lo, hi)]
        rows.append(list(enumerate(scaled)))
    labels = [1 if r[-1].strip() == "1" else -1 for r in raw]
    write(dst, rows, labels)
    return len(rows), len(cols)


def mushroom(src, dst):
    raw = [line.strip().split(",") for line in open(src) if line.strip() and not line.startswith("@")]
    ncol = len(raw[0]) - 1
    index = {}
    for c in range(ncol):
        for v in sorted({r[c] for r in raw}):
            index[(c, v)] = len(index)
    rows = [sorted((index[(c, r[c])], 1.0) for c in range(ncol)) for r in raw]
    labels = [1 if r[-1].strip() == "e" else -1 for r in raw]
    write(dst, rows, labels)
    return len(rows), len(index)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("australian")
    ap.add_argument("mushroom")
    ap.add_argument("outdir", type=pathlib.Path)
    a = ap.parse_args()
    a.outdir.mkdir(parents=True, exist_ok=True)
    print("australian n=%d d=%d" % australian(a.australian, a.outdir / "australian_desk.libsvm"))
    print("mushrooms n=%d d=%d" % mushroom(a.mushroom, a.outdir / "mushrooms_desk.libsvm.gz"))


if __name__ == "__main__":
    main()
