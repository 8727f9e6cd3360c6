"""Paired RL-init vs random-init comparisons with shared annealing settings."""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from .anneal import SAConfig, auto_temperature, sa_run
from .model import ProblemInstance, random_sequence_pair
from .results import RunRecord
from .rl.policy import PolicyNet
from .rl.trainer import rl_init


def report_units(instance: ProblemInstance) -> Tuple[str, float]:
    """Area-only costs are reported in mm^2, everything else as-is (um)."""
    w = instance.weights
    if w.w_wire == 0:
        return "mm2", 1e-6
    if w.w_area == 0:
        return "um", 1.0
    return "cost", 1.0


def fixed_temperatures(instance: ProblemInstance, sa_cfg: SAConfig, seed: int = 0) -> SAConfig:
    """Pin t_max/t_min once per instance so both arms anneal identically."""
    if sa_cfg.t_max is not None:
        return sa_cfg
    ref = random_sequence_pair(instance, np.random.SeedSequence([seed, 0xA11]))
    est = auto_temperature(instance, ref, seed=seed, move_probs=sa_cfg.move_probs)
    return replace(sa_cfg, t_max=est.t_max, t_min=est.t_min)


@dataclass
class Comparison:
    records: List[RunRecord]
    wins: int  # runs where the RL arm ended strictly cheaper

    @property
    def runs(self) -> int:
        return len(self.records) // 2

    def costs(self, method: str) -> np.ndarray:
        return np.array([r.reported_cost for r in self.records if r.method == method])


def _record(instance, method, seed, res, steps, seconds, unit, scale, meta):
    meta = dict(meta, init_cost=res.initial_cost.total, best=res.best.to_dict())
    return RunRecord(instance.name, method, seed, steps, res.best_cost, res.trace, seconds,
                     unit, scale, meta)


def compare(instance: ProblemInstance, net: PolicyNet, runs: int = 10, r_steps: int = 200,
            sa_cfg: SAConfig = SAConfig(), seed: int = 0, greedy: bool = False) -> Comparison:
    """Run ``runs`` paired experiments.

    Seed ``seed + i`` drives both arms: the random arm starts from
    ``random_sequence_pair(seed+i)``, the RL arm from the same pair after
    ``r_steps`` policy swaps. Both anneal with the same SA seed, step budget
    and temperatures.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    sa_cfg = fixed_temperatures(instance, sa_cfg, seed)
    unit, scale = report_units(instance)
    records, wins = [], 0
    for i in range(runs):
        s = seed + i
        cfg_i = replace(sa_cfg, seed=s)
        meta = {"pair": i, "sa_seed": s, "sa_steps": cfg_i.steps, "t_max": cfg_i.t_max,
                "t_min": cfg_i.t_min, "r_steps": r_steps, "greedy": greedy}

        t0 = time.perf_counter()
        init_a = rl_init(instance, net, r_steps, s, greedy)
        res_a = sa_run(instance, init_a, cfg_i)
        rec_a = _record(instance, "rl_init", s, res_a, cfg_i.steps, time.perf_counter() - t0,
                        unit, scale, meta)

        t0 = time.perf_counter()
        init_b = random_sequence_pair(instance, s)
        res_b = sa_run(instance, init_b, cfg_i)
        rec_b = _record(instance, "random_init", s, res_b, cfg_i.steps, time.perf_counter() - t0,
                        unit, scale, meta)

        wins += rec_a.final.total < rec_b.final.total
        records += [rec_a, rec_b]
    return Comparison(records, wins)
