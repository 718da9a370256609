#!/usr/bin/env python3
"""Brute-force oracle for the 19 features.

Evaluates the 19 feature formulas directly from raw coordinates, with no
code shared with the C++ library. Writes one CSV row per landmark set:
name, x1, y1, ..., x19, y19, f1, ..., f19.

Usage:
    table1_oracle.py OUT.csv [--templates native19.csv]

The random sets come from a fixed seed, so the output is reproducible. With
--templates, each row of a native-19 file (such as a zero-noise synth run)
is appended under its label.
"""

import argparse
import csv
import math
import random


def dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


def angle(p, chin):
    dx = p[0] - chin[0]
    dy = p[1] - chin[1]
    if abs(dy) < 1e-9:
        return math.pi / 2 if dx >= 0 else -math.pi / 2
    return math.atan(dx / dy)


def features(pts):
    """pts is a dict keyed 1..19."""
    f = [
        dist(pts[9], pts[18]) / dist(pts[1], pts[17]),
        dist(pts[5], pts[13]) / dist(pts[1], pts[17]),
        dist(pts[9], pts[19]) / dist(pts[5], pts[13]),
    ]
    for i in range(4, 12):
        f.append(angle(pts[i - 3], pts[9]))
    for i in range(12, 20):
        f.append(angle(pts[i - 2], pts[9]))
    return f


def random_set(rng):
    """A valid set: hairline above the chin, every contour point above it too."""
    chin = (rng.uniform(-500, 500), rng.uniform(-500, 500))
    pts = {9: chin}
    for i in list(range(1, 9)) + list(range(10, 18)):
        pts[i] = (chin[0] + rng.uniform(-300, 300), chin[1] - rng.uniform(1, 300))
    pts[18] = (chin[0] + rng.uniform(-50, 50), chin[1] - rng.uniform(50, 600))
    pts[19] = (chin[0] + rng.uniform(-50, 50), chin[1] + rng.uniform(-200, 200))
    return pts


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--templates")
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=20240519)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    rows = [("random%03d" % k, random_set(rng)) for k in range(args.count)]
    if args.templates:
        with open(args.templates, newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            for rec in reader:
                vals = [float(v) for v in rec[2:]]
                rows.append((rec[1], {i + 1: (vals[2 * i], vals[2 * i + 1]) for i in range(19)}))

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name"] + [c + str(i) for i in range(1, 20) for c in "xy"] + ["f%d" % i for i in range(1, 20)])
        for name, pts in rows:
            coords = [repr(v) for i in range(1, 20) for v in pts[i]]
            w.writerow([name] + coords + [repr(v) for v in features(pts)])


if __name__ == "__main__":
    main()
