"""Placement environment: the agent picks a candidate block to swap with the
current input block."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..cost import Evaluator
from ..model import ProblemInstance, SequencePair, random_sequence_pair, swap_pair


@dataclass(frozen=True)
class EnvState:
    sp: SequencePair
    input_block: int
    encoded: np.ndarray


def encode(instance: ProblemInstance, sp: SequencePair, input_block: int) -> np.ndarray:
    """[pos in gamma_plus / n, pos in gamma_minus / n, one-hot(input)], each
    indexed by the block's rank among free ids."""
    free = instance.free_ids
    n = len(free)
    rank = {b: k for k, b in enumerate(free)}
    v = np.zeros(3 * n)
    for pos, b in enumerate(sp.gamma_plus):
        v[rank[b]] = pos / n
    for pos, b in enumerate(sp.gamma_minus):
        v[n + rank[b]] = pos / n
    v[2 * n + rank[input_block]] = 1.0
    return v


class PlacementEnv:
    """Holds the instance, a cost evaluator and the env RNG stream."""

    def __init__(self, instance: ProblemInstance, seed=None):
        self.instance = instance
        self.evaluator = Evaluator(instance)
        self.free = np.array(instance.free_ids, dtype=np.int64)
        self._free_set = frozenset(instance.free_ids)
        self.rng = np.random.default_rng(seed)
        self.state: EnvState | None = None

    @property
    def n_actions(self) -> int:
        return len(self.free)

    @property
    def obs_size(self) -> int:
        return 3 * len(self.free)

    def action_block(self, action_index: int) -> int:
        return int(self.free[action_index])

    def action_index(self, block: int) -> int:
        idx = np.nonzero(self.free == block)[0]
        if idx.size == 0:
            raise ValueError(f"block {block} is not a free block")
        return int(idx[0])

    def cost(self, sp: SequencePair) -> float:
        return self.evaluator.total(*sp.arrays())

    def _draw_input(self) -> int:
        return int(self.free[self.rng.integers(len(self.free))])

    def reset(self, seed=None) -> EnvState:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        sp = random_sequence_pair(self.instance, self.rng)
        b = self._draw_input()
        self.state = EnvState(sp, b, encode(self.instance, sp, b))
        return self.state

    def step(self, action: int) -> Tuple[EnvState, float]:
        """Swap the input block with block ``action`` (a free-block id).

        Reward is cost before minus cost after, so reductions are positive.
        """
        state = self.state
        if action not in self._free_set:
            raise ValueError(f"action {action} is not a free-block id")
        sp2 = swap_pair(state.sp, state.input_block, int(action))
        reward = self.cost(state.sp) - self.cost(sp2)
        b = self._draw_input()
        self.state = EnvState(sp2, b, encode(self.instance, sp2, b))
        return self.state, reward


def env_reset(instance: ProblemInstance, seed=None) -> Tuple[PlacementEnv, EnvState]:
    env = PlacementEnv(instance, seed)
    return env, env.reset()
