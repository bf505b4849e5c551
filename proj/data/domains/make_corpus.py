#!/usr/bin/env python3
"""Regenerate the rectilinear corpus domains in this directory."""
import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))


def reduce(num, log2den):
    while log2den > 0 and num % 2 == 0:
        num //= 2
        log2den -= 1
    return num, log2den


def triple(x, y, log2den):
    # common denominator per vertex, reduced
    nx, lx = reduce(x, log2den)
    ny, ly = reduce(y, log2den)
    l = max(lx, ly)
    return [nx << (l - lx), ny << (l - ly), l]


def write(name, verts, log2den):
    doc = {"name": name, "vertices": [triple(x, y, log2den) for x, y in verts]}
    with open(os.path.join(HERE, name + ".json"), "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def trace(cells):
    """Boundary of a union of unit grid cells, counterclockwise, collinear points dropped."""
    out = {}
    for (i, j) in cells:
        if (i, j - 1) not in cells:
            out.setdefault((i, j), []).append((i + 1, j))
        if (i + 1, j) not in cells:
            out.setdefault((i + 1, j), []).append((i + 1, j + 1))
        if (i, j + 1) not in cells:
            out.setdefault((i + 1, j + 1), []).append((i, j + 1))
        if (i - 1, j) not in cells:
            out.setdefault((i, j + 1), []).append((i, j))
    if any(len(v) > 1 for v in out.values()):
        raise ValueError("pinch vertex")
    start = min(out)
    loop = [start]
    cur = out[start][0]
    while cur != start:
        loop.append(cur)
        cur = out[cur][0]
    if len(loop) != len(out):
        raise ValueError("more than one boundary cycle")
    keep = []
    n = len(loop)
    for k in range(n):
        a, b, c = loop[k - 1], loop[k], loop[(k + 1) % n]
        if (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) != 0:
            keep.append(b)
    return keep


def rects(rs):
    cells = set()
    for x0, y0, x1, y1 in rs:
        for i in range(x0, x1):
            for j in range(y0, y1):
                cells.add((i, j))
    return cells


def holes_filled(cells, size):
    outside = set()
    stack = [(-1, -1)]
    while stack:
        p = stack.pop()
        if p in outside or p in cells:
            continue
        if not (-1 <= p[0] <= size and -1 <= p[1] <= size):
            continue
        outside.add(p)
        i, j = p
        stack += [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)]
    return {(i, j) for i in range(size) for j in range(size) if (i, j) not in outside}


def pinch_free(cells):
    changed = True
    while changed:
        changed = False
        for (i, j) in list(cells):
            for di, dj in ((1, 1), (1, -1)):
                o = (i + di, j + dj)
                if o in cells and (i + di, j) not in cells and (i, j + dj) not in cells:
                    cells.add((i + di, j))
                    changed = True
    return cells


def main():
    write("unit_square", [(0, 0), (1, 0), (1, 1), (0, 1)], 0)
    write("rectangle", [(0, 0), (2, 0), (2, 1), (0, 1)], 1)
    write("l_shape", [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)], 1)

    # comb: base strip [0,1]x[0,9/16], 8 teeth of width 9/128 up to 1, slits of width 1/16
    comb = [(0, 0), (128, 0)]
    x = 128
    for t in range(8):
        comb += [(x, 128), (x - 9, 128)]
        x -= 9
        if t < 7:
            comb += [(x, 72), (x - 8, 72)]
            x -= 8
    comb = [(0, 0), (128, 0), (128, 128)] + comb[3:]
    write("comb", comb, 7)

    # spiral: unit square minus a one-cell wall winding inwards from the left edge
    wall = rects([(0, 2, 14, 3), (13, 2, 14, 14), (2, 13, 14, 14), (2, 5, 3, 14),
                  (2, 5, 11, 6), (10, 5, 11, 11), (5, 10, 11, 11), (5, 8, 6, 11)])
    spiral = {(i, j) for i in range(16) for j in range(16)} - wall
    write("spiral", trace(spiral), 4)

    # random polyomino grown from the centre, holes filled, diagonal contacts thickened
    rng = random.Random(20240607)
    cells = {(8, 8)}
    while len(cells) < 110:
        i, j = rng.choice(sorted(cells))
        di, dj = rng.choice(((1, 0), (-1, 0), (0, 1), (0, -1)))
        p = (i + di, j + dj)
        if 1 <= p[0] <= 14 and 1 <= p[1] <= 14:
            cells.add(p)
    cells = pinch_free(holes_filled(cells, 16))
    cells = holes_filled(cells, 16)
    write("random_polyomino", trace(cells), 4)


if __name__ == "__main__":
    main()
