#!/usr/bin/env python3
"""Solve for fully symmetric triangle quadrature rules and print C++ tables.

Orbit structure per degree (S3 = centroid, S21 = 3-point orbit, S111 =
6-point orbit) follows the positive-interior families of Witherden and
Vincent. Nodes are barycentric; weights are normalised to the reference
triangle area 1/2.
"""
import itertools
import math
import sys

import numpy as np
from scipy.optimize import least_squares

ORBITS = {
    1: (1, 0, 0),
    2: (0, 1, 0),
    3: (0, 2, 0),
    4: (0, 2, 0),
    5: (1, 2, 0),
    6: (0, 2, 1),
    7: (0, 3, 1),
    8: (1, 3, 1),
    9: (1, 4, 1),
}


def expand(params, n0, n1, n2):
    pts, wts = [], []
    i = 0
    if n0:
        wts.append(params[i]); pts.append((1 / 3, 1 / 3)); i += 1
    for _ in range(n1):
        w, a = params[i], params[i + 1]; i += 2
        b = 1 - 2 * a
        for bc in ((a, a, b), (a, b, a), (b, a, a)):
            pts.append(bc[:2]); wts.append(w)
    for _ in range(n2):
        w, a, b = params[i], params[i + 1], params[i + 2]; i += 3
        c = 1 - a - b
        for bc in set(itertools.permutations((a, b, c))):
            pts.append(bc[:2]); wts.append(w)
    return np.array(pts), np.array(wts)


def exact(m, n):
    return math.factorial(m) * math.factorial(n) / math.factorial(m + n + 2)


def residual(params, deg, orb):
    pts, wts = expand(params, *orb)
    out = []
    for m in range(deg + 1):
        for n in range(deg + 1 - m):
            out.append(np.dot(wts, pts[:, 0] ** m * pts[:, 1] ** n) - exact(m, n))
    return np.array(out)


def solve(deg, rng):
    n0, n1, n2 = ORBITS[deg]
    npar = n0 + 2 * n1 + 3 * n2
    for _ in range(20000):
        x0 = []
        if n0:
            x0.append(rng.uniform(0, 0.2))
        for _ in range(n1):
            x0 += [rng.uniform(0, 0.1), rng.uniform(0.01, 0.49)]
        for _ in range(n2):
            x0 += [rng.uniform(0, 0.1), rng.uniform(0.01, 0.5), rng.uniform(0.01, 0.5)]
        sol = least_squares(residual, np.array(x0), args=(deg, (n0, n1, n2)),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        pts, wts = expand(sol.x, n0, n1, n2)
        if np.max(np.abs(residual(sol.x, deg, (n0, n1, n2)))) > 1e-15:
            continue
        bary = np.column_stack([pts, 1 - pts.sum(axis=1)])
        if np.all(wts > 0) and np.all(bary > 0) and len(pts) == len(set(map(tuple, np.round(pts, 12)))):
            return pts, wts
    raise RuntimeError(f"no rule found for degree {deg}")


def main():
    rng = np.random.default_rng(1)
    for deg in range(1, 10):
        pts, wts = solve(deg, rng)
        print(f"// degree {deg}: {len(wts)} points")
        print(f"constexpr RuleEntry kDegree{deg}[] = {{")
        for (x, y), w in zip(pts, wts):
            print(f"    {{{float(x)!r}, {float(y)!r}, {float(w)!r}}},")
        print("};", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
