"""Vectorised numpy implementations of the raster / point-in-region kernels.

Used when the compiled ``_ckernels`` extension is unavailable. All functions
share the compiled module's signatures and produce identical results.

Conventions: coordinates are in canvas pixel units, pixel ``(r, c)`` is
sampled at its centre ``(c + 0.5, r + 0.5)``; rings are concatenated in
``xs``/``ys`` with ``starts`` holding the first index of each ring plus a
final sentinel; filling uses the even-odd rule with half-open spans.
"""

from __future__ import annotations

import math

import numpy as np


def _edges(xs, ys, starts):
    x0, y0, x1, y1 = [], [], [], []
    for k in range(len(starts) - 1):
        a, b = int(starts[k]), int(starts[k + 1])
        if b - a < 2:
            continue
        rx, ry = xs[a:b], ys[a:b]
        x0.append(rx)
        y0.append(ry)
        x1.append(np.roll(rx, -1))
        y1.append(np.roll(ry, -1))
    if not x0:
        return (np.empty(0),) * 4
    return tuple(np.concatenate(v) for v in (x0, y0, x1, y1))


def points_in_rings(px, py, xs, ys, starts):
    px = np.asarray(px, float)
    py = np.asarray(py, float)
    x0, y0, x1, y1 = _edges(np.asarray(xs, float), np.asarray(ys, float), starts)
    if len(x0) == 0:
        return np.zeros(len(px), np.uint8)
    P = py[:, None]
    crosses = (y0 > P) != (y1 > P)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x0 + (P - y0) * (x1 - x0) / (y1 - y0)
    hit = crosses & (px[:, None] < xc)
    return (hit.sum(axis=1) & 1).astype(np.uint8)


def _paint_spans(canvas, rows, xa, xb, value, closed_right=False):
    """Paint the union of spans ``[xa, xb)`` (``[xa, xb]`` where closed_right)."""
    H, W = canvas.shape
    c0 = np.clip(np.ceil(xa - 0.5), 0, W).astype(np.int64)
    hi = np.where(closed_right, np.floor(xb - 0.5) + 1, np.ceil(xb - 0.5))
    c1 = np.clip(hi, 0, W).astype(np.int64)
    ok = (c1 > c0) & (rows >= 0) & (rows < H)
    if not ok.any():
        return
    rows, c0, c1 = rows[ok], c0[ok], c1[ok]
    r_lo, r_hi = rows.min(), rows.max() + 1
    w_lo, w_hi = c0.min(), c1.max()
    diff = np.zeros((r_hi - r_lo, w_hi - w_lo + 1), np.int32)
    np.add.at(diff, (rows - r_lo, c0 - w_lo), 1)
    np.add.at(diff, (rows - r_lo, c1 - w_lo), -1)
    mask = np.cumsum(diff[:, :-1], axis=1) > 0
    canvas[r_lo:r_hi, w_lo:w_hi][mask] = value


def _row_range(lo, hi, H):
    r_lo = max(0, int(math.floor(lo - 0.5)))
    r_hi = min(H, int(math.ceil(hi + 0.5)))
    return np.arange(r_lo, max(r_lo, r_hi))


def _ring_spans(x0, y0, x1, y1, rows):
    Y = (rows + 0.5)[:, None]
    crosses = (y0 > Y) != (y1 > Y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = np.where(crosses, x0 + (Y - y0) * (x1 - x0) / (y1 - y0), np.inf)
    xc.sort(axis=1)
    kmax = int(crosses.sum(axis=1).max()) if len(rows) else 0
    if kmax < 2:
        return np.empty(0, np.int64), np.empty(0), np.empty(0)
    xa = xc[:, 0:kmax:2]
    xb = xc[:, 1:kmax:2]
    xa = xa[:, :xb.shape[1]]
    valid = np.isfinite(xb)
    rr = np.broadcast_to(rows[:, None], xa.shape)
    return rr[valid], xa[valid], xb[valid]


def _ellipse_spans(cx, cy, rx, ry, H):
    """Spans of several ellipses at once (arrays of equal length)."""
    cx, cy, rx, ry = (np.atleast_1d(np.asarray(v, float)) for v in (cx, cy, rx, ry))
    good = (rx > 0) & (ry > 0)
    cx, cy, rx, ry = cx[good], cy[good], rx[good], ry[good]
    if len(cx) == 0:
        return np.empty(0, np.int64), np.empty(0), np.empty(0)
    rows = _row_range((cy - ry).min(), (cy + ry).max(), H)
    t = 1.0 - (((rows + 0.5)[:, None] - cy) / ry) ** 2
    ok = t >= 0
    half = rx * np.sqrt(np.where(ok, t, 0.0))
    rr = np.broadcast_to(rows[:, None], t.shape)
    return rr[ok], (cx - half)[ok], (cx + half)[ok]


def paint_rings(canvas, xs, ys, starts, value):
    H, W = canvas.shape
    x0, y0, x1, y1 = _edges(np.asarray(xs, float), np.asarray(ys, float), starts)
    if len(x0) == 0:
        return
    rows = _row_range(min(y0.min(), y1.min()), max(y0.max(), y1.max()), H)
    if len(rows):
        _paint_spans(canvas, *_ring_spans(x0, y0, x1, y1, rows), value)


def paint_ellipse(canvas, cx, cy, rx, ry, value):
    rows, xa, xb = _ellipse_spans(cx, cy, rx, ry, canvas.shape[0])
    _paint_spans(canvas, rows, xa, xb, value, closed_right=True)


def paint_stroke(canvas, xs, ys, closed, half_width, value):
    """Stroke a polyline: one quad per segment plus a round joint per vertex."""
    H, W = canvas.shape
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    n = len(xs)
    if n == 0 or half_width <= 0:
        return
    i = np.arange(n if closed and n > 2 else n - 1)
    j = (i + 1) % n
    dx, dy = xs[j] - xs[i], ys[j] - ys[i]
    L = np.hypot(dx, dy)
    keep = L > 0
    i, j, dx, dy, L = i[keep], j[keep], dx[keep], dy[keep], L[keep]
    spans = []
    if len(i):
        nx, ny = -dy / L * half_width, dx / L * half_width
        qx = np.stack([xs[i] + nx, xs[j] + nx, xs[j] - nx, xs[i] - nx], axis=1)
        qy = np.stack([ys[i] + ny, ys[j] + ny, ys[j] - ny, ys[i] - ny], axis=1)
        rows = _row_range(qy.min(), qy.max(), H)
        if len(rows):
            # each quad is convex: its span on a row is [min crossing, max crossing)
            x0, y0 = qx, qy
            x1, y1 = np.roll(qx, -1, axis=1), np.roll(qy, -1, axis=1)
            Y = (rows + 0.5)[:, None, None]
            crosses = (y0 > Y) != (y1 > Y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xc = x0 + (Y - y0) * (x1 - x0) / (y1 - y0)
            lo = np.where(crosses, xc, np.inf).min(axis=2)
            hi = np.where(crosses, xc, -np.inf).max(axis=2)
            ok = crosses.sum(axis=2) >= 2
            rr = np.broadcast_to(rows[:, None], lo.shape)
            spans.append((rr[ok], lo[ok], hi[ok], False))
    r, a, b = _ellipse_spans(xs, ys, np.full(n, half_width), np.full(n, half_width), H)
    spans.append((r, a, b, True))
    rows = np.concatenate([s[0] for s in spans])
    xa = np.concatenate([s[1] for s in spans])
    xb = np.concatenate([s[2] for s in spans])
    cr = np.concatenate([np.full(len(s[0]), s[3]) for s in spans])
    _paint_spans(canvas, rows, xa, xb, value, closed_right=cr)


def rmse(a, b):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return float(np.sqrt(np.mean((a - b) ** 2)))
