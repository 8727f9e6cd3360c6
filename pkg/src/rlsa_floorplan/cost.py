"""Chip area, center-to-center Manhattan wirelength and the weighted cost."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numba import njit

from .model import CostWeights, ProblemInstance, SequencePair
from .packer import Packer, Packing, _pack_kernel


@dataclass(frozen=True)
class CostBreakdown:
    area: float
    wirelength: float
    total: float

    def to_dict(self) -> dict:
        return {"area": self.area, "wirelength": self.wirelength, "total": self.total}

    @classmethod
    def from_dict(cls, d: dict) -> "CostBreakdown":
        return cls(float(d["area"]), float(d["wirelength"]), float(d["total"]))


class NetlistError(ValueError):
    pass


def area(p: Packing) -> float:
    return p.bbox_width * p.bbox_height


def edge_wirelength(edges: np.ndarray, x, y, w, h) -> float:
    if len(edges) == 0:
        return 0.0
    cx = x + 0.5 * w
    cy = y + 0.5 * h
    a, b = edges[:, 0], edges[:, 1]
    return float(np.sum(np.abs(cx[a] - cx[b]) + np.abs(cy[a] - cy[b])))


def wirelength(instance: ProblemInstance, p: Packing) -> float:
    """Sum over net edges of the Manhattan distance between block centers."""
    edges = instance.edges
    if len(edges) and edges.max() >= len(p.x):
        raise NetlistError(f"net references block {int(edges.max())} missing from packing")
    return edge_wirelength(edges, p.x, p.y, p.widths, p.heights)


def combine(area_value: float, wire_value: float, weights: CostWeights,
            normalize: Optional[Callable[[float, float], tuple]] = None) -> CostBreakdown:
    """Weighted total. ``normalize`` maps (area, wirelength) to rescaled terms
    before weighting; identity by default."""
    a, wl = (area_value, wire_value) if normalize is None else normalize(area_value, wire_value)
    return CostBreakdown(area_value, wire_value, weights.w_area * a + weights.w_wire * wl)


def cost(instance: ProblemInstance, p: Packing, weights: Optional[CostWeights] = None) -> CostBreakdown:
    return combine(area(p), wirelength(instance, p), weights or instance.weights)


@njit(cache=True)
def _pack_cost_kernel(gp, gm, w, h, fix_ids, fix_x, fix_y, ea, eb, w_area, w_wire, x, y):
    _pack_kernel(gp, gm, w, h, fix_ids, fix_x, fix_y, x, y)
    xmin = 0.0
    ymin = 0.0
    xmax = -np.inf
    ymax = -np.inf
    for i in range(x.shape[0]):
        if x[i] < xmin:
            xmin = x[i]
        if y[i] < ymin:
            ymin = y[i]
        if x[i] + w[i] > xmax:
            xmax = x[i] + w[i]
        if y[i] + h[i] > ymax:
            ymax = y[i] + h[i]
    a = (xmax - xmin) * (ymax - ymin)
    wl = 0.0
    for k in range(ea.shape[0]):
        i = ea[k]
        j = eb[k]
        wl += abs((x[i] + 0.5 * w[i]) - (x[j] + 0.5 * w[j])) + abs((y[i] + 0.5 * h[i]) - (y[j] + 0.5 * h[j]))
    return a, wl, w_area * a + w_wire * wl


class Evaluator:
    """Packs and scores raw sequence arrays for one instance.

    Used on hot paths (annealing, environment steps); results agree with
    ``cost(instance, pack(instance, sp))``.
    """

    def __init__(self, instance: ProblemInstance):
        self.instance = instance
        self.packer = Packer(instance)
        e = instance.edges
        self.ea = np.ascontiguousarray(e[:, 0])
        self.eb = np.ascontiguousarray(e[:, 1])
        self.w_area = float(instance.weights.w_area)
        self.w_wire = float(instance.weights.w_wire)
        n = instance.num_blocks
        self._x = np.zeros(n)
        self._y = np.zeros(n)

    def total(self, gp, gm, widths=None, heights=None) -> float:
        return self.breakdown(gp, gm, widths, heights).total

    def breakdown(self, gp, gm, widths=None, heights=None) -> CostBreakdown:
        pk = self.packer
        w = pk.widths if widths is None else widths
        h = pk.heights if heights is None else heights
        x, y = self._x, self._y
        x[pk.fix_ids] = pk.fix_x
        y[pk.fix_ids] = pk.fix_y
        a, wl, tot = _pack_cost_kernel(gp, gm, w, h, pk.fix_ids, pk.fix_x, pk.fix_y,
                                       self.ea, self.eb, self.w_area, self.w_wire, x, y)
        return CostBreakdown(a, wl, tot)

    def evaluate(self, sp: SequencePair) -> CostBreakdown:
        sp.validate(self.instance)
        return self.breakdown(*sp.arrays())
