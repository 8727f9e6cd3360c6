"""Sequence pair -> packing.

Free blocks are visited in gamma_minus order. Every block that precedes ``b``
in gamma_minus is either a left-predecessor (also precedes ``b`` in
gamma_plus) or a below-predecessor (succeeds ``b`` in gamma_plus), so a
single O(n^2) pass yields the minimal coordinates.

Fixed blocks are obstacles. A free block that lands on one is pushed to the
obstacle's right edge or top edge, whichever is the shorter move (ties go
right), until it is clear of all of them. This displacement rule is a
reconstruction, not a standard convention.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from numba import njit

from .model import ProblemInstance, SequencePair


@njit(cache=True)
def _pack_kernel(gp, gm, w, h, fix_ids, fix_x, fix_y, x, y):
    n = gp.shape[0]
    pos_plus = np.empty(w.shape[0], np.int64)
    for k in range(n):
        pos_plus[gp[k]] = k
    for j in range(n):
        b = gm[j]
        pb = pos_plus[b]
        xb = 0.0
        yb = 0.0
        for i in range(j):
            a = gm[i]
            if pos_plus[a] < pb:
                v = x[a] + w[a]
                if v > xb:
                    xb = v
            else:
                v = y[a] + h[a]
                if v > yb:
                    yb = v
        moved = True
        while moved:
            moved = False
            for k in range(fix_ids.shape[0]):
                f = fix_ids[k]
                fx = fix_x[k]
                fy = fix_y[k]
                if xb < fx + w[f] and fx < xb + w[b] and yb < fy + h[f] and fy < yb + h[b]:
                    right = fx + w[f]
                    top = fy + h[f]
                    if right - xb <= top - yb:
                        xb = right
                    else:
                        yb = top
                    moved = True
                    break
        x[b] = xb
        y[b] = yb


@dataclass(frozen=True)
class Packing:
    """Lower-left coordinates of every block (free and fixed).

    ``widths``/``heights`` are the dimensions actually used, which differ
    from the instance only when a block was rotated.
    """
    x: np.ndarray
    y: np.ndarray
    widths: np.ndarray
    heights: np.ndarray
    bbox_width: float
    bbox_height: float

    @property
    def origins(self) -> Dict[int, Tuple[float, float]]:
        return {i: (float(self.x[i]), float(self.y[i])) for i in range(len(self.x))}

    @property
    def area(self) -> float:
        return self.bbox_width * self.bbox_height


class Packer:
    """Reusable packing context for one instance (arrays prepared once)."""

    def __init__(self, instance: ProblemInstance):
        self.instance = instance
        self.widths = np.ascontiguousarray(instance.widths, dtype=np.float64)
        self.heights = np.ascontiguousarray(instance.heights, dtype=np.float64)
        fixed = [instance.blocks[i] for i in instance.fixed_ids]
        self.fix_ids = np.array([b.id for b in fixed], dtype=np.int64)
        self.fix_x = np.array([b.fixed_origin[0] for b in fixed], dtype=np.float64)
        self.fix_y = np.array([b.fixed_origin[1] for b in fixed], dtype=np.float64)

    def coords(self, gp: np.ndarray, gm: np.ndarray,
               widths: Optional[np.ndarray] = None, heights: Optional[np.ndarray] = None):
        """Raw (x, y) arrays; no validation. Hot path for the annealer."""
        w = self.widths if widths is None else widths
        h = self.heights if heights is None else heights
        n = len(w)
        x = np.zeros(n)
        y = np.zeros(n)
        x[self.fix_ids] = self.fix_x
        y[self.fix_ids] = self.fix_y
        _pack_kernel(gp, gm, w, h, self.fix_ids, self.fix_x, self.fix_y, x, y)
        return x, y

    def pack(self, sp: SequencePair, widths=None, heights=None) -> Packing:
        sp.validate(self.instance)
        gp, gm = sp.arrays()
        return self.pack_arrays(gp, gm, widths, heights)

    def pack_arrays(self, gp, gm, widths=None, heights=None) -> Packing:
        w = self.widths if widths is None else np.asarray(widths, dtype=np.float64)
        h = self.heights if heights is None else np.asarray(heights, dtype=np.float64)
        x, y = self.coords(gp, gm, w, h)
        bw, bh = _extents(x, y, w, h)
        return Packing(x, y, w.copy(), h.copy(), bw, bh)


def _extents(x, y, w, h) -> Tuple[float, float]:
    bw = float(np.max(x + w) - min(0.0, float(np.min(x))))
    bh = float(np.max(y + h) - min(0.0, float(np.min(y))))
    return bw, bh


def pack(instance: ProblemInstance, sp: SequencePair, widths=None, heights=None) -> Packing:
    """Pack ``sp`` for ``instance``; raises ValueError on an invalid pair."""
    return Packer(instance).pack(sp, widths, heights)


def bounding_box(p: Packing) -> Tuple[float, float]:
    return _extents(p.x, p.y, p.widths, p.heights)


def overlapping_pairs(p: Packing):
    """All (i, j) pairs whose rectangles intersect with positive area."""
    x0, y0 = p.x, p.y
    x1, y1 = p.x + p.widths, p.y + p.heights
    ox = (x0[:, None] < x1[None, :]) & (x0[None, :] < x1[:, None])
    oy = (y0[:, None] < y1[None, :]) & (y0[None, :] < y1[:, None])
    both = np.triu(ox & oy, k=1)
    return [tuple(map(int, ij)) for ij in np.argwhere(both)]
