"""Simulated annealing over sequence pairs.

Exponential cooling, ``T_k = t_max * (t_min / t_max) ** (k / steps)``, the
same schedule family as the ``simanneal`` package. Moves are a double swap of
two blocks, a position swap in gamma_plus, a position swap in gamma_minus and,
optionally, a width/height transpose of one block.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .cost import CostBreakdown, Evaluator
from .model import ProblemInstance, SequencePair, swap_pair, swap_single

log = logging.getLogger(__name__)

ROTATION_PROB = 0.1
SWAP_BOTH, SWAP_PLUS, SWAP_MINUS, ROTATE = 0, 1, 2, 3


@dataclass(frozen=True)
class SAConfig:
    steps: int = 5000
    # None means: estimate with auto_temperature from the initial pair
    t_max: Optional[float] = None
    t_min: Optional[float] = None
    move_probs: Tuple[float, float, float] = (0.4, 0.3, 0.3)
    rotation_enabled: bool = False
    seed: int = 0
    trace_every: Optional[int] = None

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if (self.t_max is None) != (self.t_min is None):
            raise ValueError("give both t_max and t_min, or neither")
        if self.t_max is not None and not (self.t_max >= self.t_min > 0):
            raise ValueError("need t_max >= t_min > 0")
        p = self.move_probs
        if len(p) != 3 or min(p) < 0 or not math.isclose(sum(p), 1.0, abs_tol=1e-9):
            raise ValueError(f"move_probs must be 3 non-negative values summing to 1, got {p}")

    def kind_probs(self) -> np.ndarray:
        p = np.array(self.move_probs, dtype=float)
        if self.rotation_enabled:
            return np.append(p * (1 - ROTATION_PROB), ROTATION_PROB)
        return np.append(p, 0.0)


@dataclass
class SAResult:
    best: SequencePair
    best_cost: CostBreakdown
    trace: List[Tuple[int, float, float]] = field(default_factory=list)
    accepted_moves: int = 0
    initial_cost: Optional[CostBreakdown] = None
    t_max: float = 0.0
    t_min: float = 0.0
    # block id -> (w, h) for blocks left transposed in the best state
    dimension_overrides: Dict[int, Tuple[float, float]] = field(default_factory=dict)


class TempEstimate(NamedTuple):
    t_max: float
    t_min: float
    fallback: bool = False


def _distinct_pair(rng, n):
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    return i, j + (j >= i)


def propose_move(sp: SequencePair, cfg: SAConfig, rng: np.random.Generator,
                 overrides: Optional[Dict[int, Tuple[float, float]]] = None,
                 instance: Optional[ProblemInstance] = None) -> SequencePair:
    """One random neighbour of ``sp``.

    A rotation move leaves the pair unchanged and instead transposes the
    chosen block's entry in ``overrides`` (requires ``instance`` for the base
    dimensions).
    """
    n = len(sp)
    if n < 2:
        return sp
    kind = int(rng.choice(4, p=cfg.kind_probs()))
    if kind == ROTATE:
        if overrides is None or instance is None:
            raise ValueError("rotation moves need an overrides map and the instance")
        b = int(sp.gamma_plus[int(rng.integers(n))])
        w, h = overrides.get(b, (instance.blocks[b].width, instance.blocks[b].height))
        overrides[b] = (h, w)
        return sp
    i, j = _distinct_pair(rng, n)
    if kind == SWAP_BOTH:
        return swap_pair(sp, sp.gamma_plus[i], sp.gamma_plus[j])
    return swap_single(sp, "gamma_plus" if kind == SWAP_PLUS else "gamma_minus", i, j)


def auto_temperature(instance: ProblemInstance, init: SequencePair, target_accept_hi: float = 0.98,
                     target_accept_lo: float = 0.02, sample: int = 200, seed=0,
                     move_probs=(0.4, 0.3, 0.3)) -> TempEstimate:
    """Temperatures at which the median worsening move is accepted with
    probability ``target_accept_hi`` (t_max) and ``target_accept_lo`` (t_min).

    Each sampled move starts from ``init``.
    """
    ev = Evaluator(instance)
    init.validate(instance)
    gp0, gm0 = init.arrays()
    c0 = ev.total(gp0, gm0)
    rng = np.random.default_rng(seed)
    cfg = SAConfig(move_probs=tuple(move_probs))
    deltas = []
    if len(init) >= 2:
        for _ in range(sample):
            sp = propose_move(init, cfg, rng)
            deltas.append(ev.total(*sp.arrays()) - c0)
    # rounding noise from equal-cost packings is not a worsening move
    tol = 1e-9 * max(abs(c0), 1e-300)
    worse = np.array([d for d in deltas if d > tol])
    if worse.size == 0:
        log.warning("auto_temperature: no worsening move among %d samples; using fallback", sample)
        return TempEstimate(1.0, 1e-6, True)
    med = float(np.median(worse))
    return TempEstimate(-med / math.log(target_accept_hi), -med / math.log(target_accept_lo))


def sa_run(instance: ProblemInstance, init: SequencePair, cfg: SAConfig) -> SAResult:
    """Anneal from ``init`` for exactly ``cfg.steps`` proposals."""
    try:
        init.validate(instance)
    except ValueError as e:
        raise ValueError(f"sa_run: invalid initial sequence pair: {e}") from None
    ev = Evaluator(instance)
    if cfg.t_max is None:
        t_max, t_min, _ = auto_temperature(instance, init, seed=cfg.seed, move_probs=cfg.move_probs)
    else:
        t_max, t_min = cfg.t_max, cfg.t_min

    gp, gm = init.arrays()
    w = ev.packer.widths.copy()
    h = ev.packer.heights.copy()
    cur_b = ev.breakdown(gp, gm, w, h)
    cur = cur_b.total
    best = (gp.copy(), gm.copy(), w.copy(), h.copy(), cur_b)
    result = SAResult(init, cur_b, initial_cost=cur_b, t_max=t_max, t_min=t_min)

    n, steps = len(gp), cfg.steps
    every = cfg.trace_every or max(1, steps // 100)
    if steps == 0:
        return result
    rng = np.random.default_rng(cfg.seed)
    kinds = rng.choice(4, size=steps, p=cfg.kind_probs())
    ii = rng.integers(0, max(n, 1), size=steps)
    jj = rng.integers(0, max(n - 1, 1), size=steps)
    jj = jj + (jj >= ii)
    us = rng.random(steps)
    ratio = t_min / t_max
    pos_p = np.empty(instance.num_blocks, np.int64)
    pos_m = np.empty(instance.num_blocks, np.int64)
    pos_p[gp] = np.arange(n)
    pos_m[gm] = np.arange(n)
    accepted = 0

    for k in range(steps):
        T = t_max * ratio ** (k / steps)
        kind, i, j = kinds[k], ii[k], jj[k]
        if n >= 2:
            if kind == SWAP_BOTH:
                a, b = gp[i], gp[j]
                ma, mb = pos_m[a], pos_m[b]
                gp[i], gp[j] = b, a
                gm[ma], gm[mb] = b, a
            elif kind == SWAP_PLUS:
                gp[i], gp[j] = gp[j], gp[i]
            elif kind == SWAP_MINUS:
                gm[i], gm[j] = gm[j], gm[i]
            else:
                b = gp[i]
                w[b], h[b] = h[b], w[b]
            new_b = ev.breakdown(gp, gm, w, h)
            delta = new_b.total - cur
            if delta <= 0 or us[k] < math.exp(-delta / T):
                accepted += 1
                cur, cur_b = new_b.total, new_b
                if kind == SWAP_BOTH:
                    pos_p[a], pos_p[b] = j, i
                    pos_m[a], pos_m[b] = mb, ma
                elif kind == SWAP_PLUS:
                    pos_p[gp[i]], pos_p[gp[j]] = i, j
                elif kind == SWAP_MINUS:
                    pos_m[gm[i]], pos_m[gm[j]] = i, j
                if cur < best[4].total:
                    best = (gp.copy(), gm.copy(), w.copy(), h.copy(), cur_b)
            else:
                if kind == SWAP_BOTH:
                    gp[i], gp[j] = a, b
                    gm[ma], gm[mb] = a, b
                elif kind == SWAP_PLUS:
                    gp[i], gp[j] = gp[j], gp[i]
                elif kind == SWAP_MINUS:
                    gm[i], gm[j] = gm[j], gm[i]
                else:
                    w[b], h[b] = h[b], w[b]
        if k % every == 0 or k == steps - 1:
            result.trace.append((k, cur, best[4].total))

    bgp, bgm, bw, bh, bcost = best
    result.best = SequencePair(bgp, bgm)
    result.best_cost = bcost
    result.accepted_moves = accepted
    base_w, base_h = instance.widths, instance.heights
    result.dimension_overrides = {int(b): (float(bw[b]), float(bh[b]))
                                  for b in np.nonzero((bw != base_w) | (bh != base_h))[0]}
    return result
