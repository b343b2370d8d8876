"""Exhaustive sweep of the Y-mixer surrogate over the 5-point-per-axis grid.

Independent re-implementation of the formula documented in objectives.hpp;
writes mixer_grid.csv (all 625 values) and mixer_grid_minimum.txt.
"""
import itertools
import math
import pathlib

BOX = [(0.0, 30.0), (0.2, 0.5), (0.5, 1.5), (0.2, 0.6)]


def gauss2(x, s):
    return math.exp(-x / (2 * s * s))


def surrogate(p):
    a, c, l, s = ((v - lo) / (hi - lo) for v, (lo, hi) in zip(p, BOX))
    q = (c - 0.25) ** 2 + (s - 0.25) ** 2
    return (0.30
            - 0.273 * gauss2((a - 0.75) ** 2 + (l - 0.25) ** 2, 0.12) * gauss2(q, 0.30)
            - 0.241 * gauss2((a - 0.25) ** 2 + (l - 0.75) ** 2, 0.15) * gauss2(q, 0.35)
            + 0.35 * q
            + 0.01 * (1 - math.cos(4 * math.pi * (a + l))))


def coord(lo, hi, k, n=5):
    t = k / (n - 1)
    return lo * (1 - t) + hi * t


def main():
    here = pathlib.Path(__file__).parent
    rows = []
    for idx in itertools.product(range(5), repeat=4):
        p = [coord(lo, hi, k) for (lo, hi), k in zip(BOX, idx)]
        rows.append((idx, surrogate(p)))
    with open(here / "mixer_grid.csv", "w") as f:
        f.write("i0,i1,i2,i3,value\n")
        for idx, v in rows:
            f.write(",".join(map(str, idx)) + f",{v:.17g}\n")
    best = min(rows, key=lambda r: (r[1], r[0]))
    with open(here / "mixer_grid_minimum.txt", "w") as f:
        f.write(" ".join(map(str, best[0])) + f" {best[1]:.17g}\n")
    print(best)


if __name__ == "__main__":
    main()
