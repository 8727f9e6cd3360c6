"""Problem description and the sequence-pair representation.

A :class:`ProblemInstance` holds blocks, 2-pin nets and cost weights. Free
blocks are ordered by a :class:`SequencePair`; fixed blocks never appear in
it and act as obstacles during packing.
"""
from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np


class BlockKind(str, enum.Enum):
    FREE = "free"
    FIXED = "fixed"


@dataclass(frozen=True)
class Block:
    id: int
    name: str
    width: float
    height: float
    kind: BlockKind = BlockKind.FREE
    fixed_origin: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"block {self.name!r}: width and height must be positive")
        if (self.kind is BlockKind.FIXED) != (self.fixed_origin is not None):
            raise ValueError(f"block {self.name!r}: fixed_origin must be given iff kind is fixed")

    @property
    def is_fixed(self) -> bool:
        return self.kind is BlockKind.FIXED

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class Net:
    id: int
    members: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(int(m) for m in self.members))
        if len(self.members) < 2:
            raise ValueError(f"net {self.id}: needs at least two members")
        if len(set(self.members)) != len(self.members):
            raise ValueError(f"net {self.id}: duplicate members {self.members}")


@dataclass(frozen=True)
class CostWeights:
    w_area: float = 0.0
    w_wire: float = 1.0

    def __post_init__(self):
        if self.w_area < 0 or self.w_wire < 0:
            raise ValueError("cost weights must be non-negative")
        if self.w_area + self.w_wire <= 0:
            raise ValueError("at least one cost weight must be positive")


def _rects_overlap(ax, ay, aw, ah, bx, by, bw, bh) -> bool:
    # open-interval intersection: touching edges do not count
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah


@dataclass(frozen=True)
class ProblemInstance:
    blocks: Tuple[Block, ...]
    nets: Tuple[Net, ...]
    weights: CostWeights
    name: str = "instance"
    notes: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "nets", tuple(self.nets))
        for i, b in enumerate(self.blocks):
            if b.id != i:
                raise ValueError(f"block ids must be dense 0..n-1; got id {b.id} at position {i}")
        if not any(not b.is_fixed for b in self.blocks):
            raise ValueError("instance needs at least one free block")
        n = len(self.blocks)
        for net in self.nets:
            for m in net.members:
                if not 0 <= m < n:
                    raise ValueError(f"net {net.id} references unknown block {m}")
        fixed = [b for b in self.blocks if b.is_fixed]
        for i, a in enumerate(fixed):
            for b in fixed[i + 1:]:
                if _rects_overlap(*a.fixed_origin, a.width, a.height,
                                  *b.fixed_origin, b.width, b.height):
                    raise ValueError(f"fixed blocks {a.name!r} and {b.name!r} overlap")

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @cached_property
    def free_ids(self) -> Tuple[int, ...]:
        return tuple(b.id for b in self.blocks if not b.is_fixed)

    @cached_property
    def fixed_ids(self) -> Tuple[int, ...]:
        return tuple(b.id for b in self.blocks if b.is_fixed)

    @property
    def num_free(self) -> int:
        return len(self.free_ids)

    @cached_property
    def widths(self) -> np.ndarray:
        a = np.array([b.width for b in self.blocks], dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def heights(self) -> np.ndarray:
        a = np.array([b.height for b in self.blocks], dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def edges(self) -> np.ndarray:
        """(m, 2) int array of consecutive member pairs over all nets."""
        pairs = [(net.members[k], net.members[k + 1])
                 for net in self.nets for k in range(len(net.members) - 1)]
        a = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        a.flags.writeable = False
        return a

    def block_by_name(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def fingerprint(self) -> str:
        """Stable hash of geometry, connectivity and weights."""
        h = hashlib.sha256()
        for b in self.blocks:
            h.update(f"{b.name}|{b.width!r}|{b.height!r}|{b.kind.value}|{b.fixed_origin!r};".encode())
        for net in self.nets:
            h.update((",".join(map(str, net.members)) + ";").encode())
        h.update(f"{self.weights.w_area!r}|{self.weights.w_wire!r}".encode())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class SequencePair:
    gamma_plus: Tuple[int, ...]
    gamma_minus: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "gamma_plus", tuple(int(v) for v in self.gamma_plus))
        object.__setattr__(self, "gamma_minus", tuple(int(v) for v in self.gamma_minus))
        if sorted(self.gamma_plus) != sorted(self.gamma_minus) or \
                len(set(self.gamma_plus)) != len(self.gamma_plus):
            raise ValueError("gamma_plus and gamma_minus must be permutations of the same ids")

    def __len__(self):
        return len(self.gamma_plus)

    def validate(self, instance: ProblemInstance) -> None:
        """Raise ValueError unless both sequences permute exactly the free ids."""
        free = sorted(instance.free_ids)
        if sorted(self.gamma_plus) != free or sorted(self.gamma_minus) != free:
            raise ValueError(f"sequence pair does not permute the free blocks of {instance.name!r}")

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return (np.array(self.gamma_plus, dtype=np.int64),
                np.array(self.gamma_minus, dtype=np.int64))

    def to_dict(self) -> dict:
        return {"gamma_plus": list(self.gamma_plus), "gamma_minus": list(self.gamma_minus)}

    @classmethod
    def from_dict(cls, d: dict) -> "SequencePair":
        return cls(d["gamma_plus"], d["gamma_minus"])


def random_sequence_pair(instance: ProblemInstance, seed=None) -> SequencePair:
    """Two independent uniform permutations of the free-block ids.

    ``seed`` may be an int, a ``numpy.random.Generator`` or None.
    """
    rng = np.random.default_rng(seed)
    free = np.array(instance.free_ids, dtype=np.int64)
    return SequencePair(rng.permutation(free), rng.permutation(free))


def swap_pair(sp: SequencePair, a: int, b: int) -> SequencePair:
    """Exchange blocks ``a`` and ``b`` in both sequences."""
    gp, gm = list(sp.gamma_plus), list(sp.gamma_minus)
    try:
        ia, ib = gp.index(a), gp.index(b)
        ja, jb = gm.index(a), gm.index(b)
    except ValueError:
        raise ValueError(f"swap_pair: block ids {a}, {b} not both in sequence pair") from None
    gp[ia], gp[ib] = gp[ib], gp[ia]
    gm[ja], gm[jb] = gm[jb], gm[ja]
    return SequencePair(gp, gm)


def swap_single(sp: SequencePair, which: str, i: int, j: int) -> SequencePair:
    """Exchange positions ``i`` and ``j`` of one sequence.

    ``which`` is ``"gamma_plus"`` or ``"gamma_minus"``.
    """
    if which not in ("gamma_plus", "gamma_minus"):
        raise ValueError(f"swap_single: unknown sequence {which!r}")
    n = len(sp)
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"swap_single: positions ({i}, {j}) out of range for length {n}")
    seq = list(getattr(sp, which))
    seq[i], seq[j] = seq[j], seq[i]
    if which == "gamma_plus":
        return SequencePair(seq, sp.gamma_minus)
    return SequencePair(sp.gamma_plus, seq)


def make_instance(dims: Sequence[Tuple[float, float]], edges: Iterable[Tuple[int, int]] = (),
                  weights: CostWeights = CostWeights(1.0, 0.0), name: str = "instance") -> ProblemInstance:
    """Small helper: free blocks from (w, h) pairs and 2-member nets from edges."""
    blocks = [Block(i, f"b{i}", float(w), float(h)) for i, (w, h) in enumerate(dims)]
    nets = [Net(k, e) for k, e in enumerate(edges)]
    return ProblemInstance(blocks, nets, weights, name)
