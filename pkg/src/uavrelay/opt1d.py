"""Tiny 1-D minimization helpers (coarse grid scan + golden-section refine)."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_min(f, lo: float, hi: float, tol: float = 1e-6) -> tuple[float, float]:
    """Golden-section search for the minimum of a unimodal ``f`` on [lo, hi]."""
    a, b = (lo, hi) if lo <= hi else (hi, lo)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(n - 1):
        if yc < yd:
            b, d, yd = d, c, yc
            h *= INV_PHI
            c = a + INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= INV_PHI
            d = a + INV_PHI * h
            yd = f(d)
    return (c, yc) if yc < yd else (d, yd)


def grid_then_golden(f, lo: float, hi: float, step: float, tol: float = 1e-6) -> tuple[float, float]:
    """Minimize ``f`` on [lo, hi]: coarse scan, then golden refine around the best cell.

    The returned point is the best of the refined point, the best grid
    point, and both interval endpoints, so exact endpoint minima are
    returned exactly.
    """
    if hi < lo:
        raise ValueError("empty interval")
    xs = [lo]
    x = lo + step
    while x < hi:
        xs.append(x)
        x += step
    xs.append(hi)
    ys = [f(v) for v in xs]
    k = min(range(len(xs)), key=ys.__getitem__)
    bl = xs[max(k - 1, 0)]
    bh = xs[min(k + 1, len(xs) - 1)]
    xg, yg = golden_min(f, bl, bh, tol)
    best_x, best_y = xg, yg
    for cx, cy in ((xs[k], ys[k]), (lo, ys[0]), (hi, ys[-1])):
        if cy < best_y:
            best_x, best_y = cx, cy
    return best_x, best_y
