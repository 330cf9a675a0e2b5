#!/usr/bin/env python3
"""Regenerate macdonald_table.csv with mpmath at 50 significant digits.

Columns: re_w, im_w, re_k0, im_k0, re_k1, im_k1. Arguments cover the real
axis, the open right half-plane and both halves of the imaginary axis for
|w| in [1e-6, 50].
"""
import math
import mpmath as mp

mp.mp.dps = 50


def points():
    pts = []
    # real axis
    for r in [1e-6, 1e-4, 1e-2, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 1.9, 2.0, 2.1,
              2.5, 3.0, 4.0, 5.0, 6.5, 8.0, 10.0, 12.5, 15.0, 17.0, 18.0, 19.0,
              20.0, 25.0, 30.0, 40.0, 50.0]:
        pts.append((r, 0.0))
    # rays in the right half-plane, including the imaginary axis
    radii = [1e-6, 1e-3, 0.05, 0.3, 0.9, 1.7, 2.2, 3.3, 5.0, 7.7, 11.0, 16.0,
             18.5, 24.0, 33.0, 49.0]
    angles = [math.pi / 2, -math.pi / 2, 0.3, -0.3, 0.6, -0.6, 0.9, -1.0, -1.2,
              1.4, -1.5, 1.55]
    for t in angles:
        for r in radii:
            pts.append((r * math.cos(t), r * math.sin(t)))
    # exact imaginary axis with clean arguments
    for y in [0.5, 1.0, 2.0, 3.0, 6.0, 10.0, 20.0, 45.0]:
        pts.append((0.0, y))
        pts.append((0.0, -y))
    return pts


def main():
    rows = []
    for (x, y) in points():
        if x != 0.0 and abs(x) < 1e-300:
            x = 0.0
        if abs(x) < 1e-15 * math.hypot(x, y):
            x = 0.0
        w = mp.mpc(x, y)
        k0 = mp.besselk(0, w)
        k1 = mp.besselk(1, w)
        rows.append((x, y, k0, k1))
    with open("macdonald_table.csv", "w") as f:
        f.write("re_w,im_w,re_k0,im_k0,re_k1,im_k1\n")
        for x, y, k0, k1 in rows:
            f.write("%s,%s,%s,%s,%s,%s\n" % (
                repr(x), repr(y),
                mp.nstr(k0.real, 20, min_fixed=0, max_fixed=0),
                mp.nstr(k0.imag, 20, min_fixed=0, max_fixed=0),
                mp.nstr(k1.real, 20, min_fixed=0, max_fixed=0),
                mp.nstr(k1.imag, 20, min_fixed=0, max_fixed=0)))
    print(len(rows), "rows")


if __name__ == "__main__":
    main()
