"""Cyclic RL -> SA training loop.

Each epoch: reset the environment, let the policy make ``r_steps`` swaps,
anneal the resulting pair for ``s_steps``, and use the SA improvement as the
terminal value of the episode when computing advantages.
"""
from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from ..anneal import SAConfig, SAResult, sa_run
from ..model import ProblemInstance, SequencePair, random_sequence_pair, swap_pair
from .env import PlacementEnv
from .policy import Adam, PolicyNet, log_softmax
from .ppo import NonFiniteLossError, Transition, compute_gae, ppo_update

log = logging.getLogger(__name__)

SIGN_IMPROVEMENT = "improvement"
SIGN_COST_INCREASE = "cost_increase"


@dataclass(frozen=True)
class RLConfig:
    epochs: int = 10
    r_steps: int = 200
    s_steps: int = 5000
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_eps: float = 0.2
    learning_rate: float = 3e-4
    ppo_epochs: int = 4
    minibatch_size: int = 64
    value_coef: float = 0.5
    entropy_coef: float = 0.01
    seed: int = 0
    global_reward_sign: str = SIGN_IMPROVEMENT
    hidden: int = 128
    # None: 1 / median |cost change| of random swaps on a random pair
    reward_scale: Optional[float] = None
    greedy_eval: bool = False

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must be in (0, 1]")
        if not 0 <= self.gae_lambda <= 1:
            raise ValueError("gae_lambda must be in [0, 1]")
        if self.clip_eps <= 0:
            raise ValueError("clip_eps must be positive")
        if self.r_steps < 1 or self.s_steps < 0 or self.epochs < 0:
            raise ValueError("need r_steps >= 1, s_steps >= 0, epochs >= 0")
        if self.global_reward_sign not in (SIGN_IMPROVEMENT, SIGN_COST_INCREASE):
            raise ValueError(f"unknown global_reward_sign {self.global_reward_sign!r}")


@dataclass
class EpochRecord:
    epoch: int
    init_cost: float
    post_sa_cost: float
    global_reward: float
    mean_local_reward: float
    policy_loss: float
    value_loss: float
    entropy: float
    seconds: float


@dataclass
class TrainReport:
    records: List[EpochRecord] = field(default_factory=list)
    params: Optional[np.ndarray] = None
    reward_scale: float = 1.0
    config: Optional[RLConfig] = None
    net: Optional[PolicyNet] = field(default=None, repr=False)
    optimizer: Optional[Adam] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"records": [asdict(r) for r in self.records],
                "reward_scale": self.reward_scale,
                "config": asdict(self.config) if self.config else None}


class TrainingAborted(RuntimeError):
    def __init__(self, msg, report: TrainReport):
        super().__init__(msg)
        self.report = report


def global_reward(init_cost: float, final_cost: float, sign: str) -> float:
    if sign == SIGN_IMPROVEMENT:
        return init_cost - final_cost
    return final_cost - init_cost


def _epoch_seeds(seed: int, epoch: int):
    ss = np.random.SeedSequence([seed, epoch])
    env_s, pol_s, sa_s, upd_s = ss.generate_state(4)
    return int(env_s), int(pol_s), int(sa_s), int(upd_s)


def _sample(p: np.ndarray, rng, greedy: bool) -> int:
    if greedy:
        return int(np.argmax(p))
    k = int(np.searchsorted(np.cumsum(p), rng.random() * p.sum(), side="right"))
    return min(k, len(p) - 1)


def rollout(env: PlacementEnv, net: PolicyNet, r_steps: int, rng, greedy: bool = False,
            env_seed=None) -> List[Transition]:
    """Reset ``env`` and run ``r_steps`` policy steps."""
    state = env.reset(env_seed)
    traj = []
    for t in range(r_steps):
        logits, values, _ = net.forward(state.encoded)
        logp = log_softmax(logits)[0]
        k = _sample(np.exp(logp), rng, greedy)
        block = env.action_block(k)
        x = state.encoded
        state, reward = env.step(block)
        traj.append(Transition(x, block, k, float(logp[k]), float(values[0]), float(reward),
                               done=(t == r_steps - 1)))
    return traj


def estimate_reward_scale(instance: ProblemInstance, seed: int = 0, samples: int = 100) -> float:
    env = PlacementEnv(instance, seed)
    rng = np.random.default_rng(seed)
    sp = random_sequence_pair(instance, rng)
    c0 = env.cost(sp)
    free = instance.free_ids
    if len(free) < 2:
        return 1.0
    deltas = []
    for _ in range(samples):
        a, b = rng.choice(len(free), size=2, replace=False)
        deltas.append(abs(env.cost(swap_pair(sp, free[a], free[b])) - c0))
    med = float(np.median([d for d in deltas if d > 0] or [0.0]))
    return 1.0 / med if med > 0 else 1.0


def run_epoch(instance: ProblemInstance, net: PolicyNet, cfg: RLConfig, sa_cfg: SAConfig,
              epoch: int = 0) -> Tuple[List[Transition], Optional[SAResult], float]:
    """One RL phase followed by one SA phase. Returns (trajectory, SA result, global reward)."""
    env_s, pol_s, sa_s, _ = _epoch_seeds(cfg.seed, epoch)
    env = PlacementEnv(instance)
    traj = rollout(env, net, cfg.r_steps, np.random.default_rng(pol_s), env_seed=env_s)
    sp_r = env.state.sp
    if cfg.s_steps == 0:
        return traj, None, 0.0
    res = sa_run(instance, sp_r, replace(sa_cfg, steps=cfg.s_steps, seed=sa_s))
    rg = global_reward(res.initial_cost.total, res.best_cost.total, cfg.global_reward_sign)
    return traj, res, rg


def train(instance: ProblemInstance, cfg: RLConfig, sa_cfg: SAConfig,
          net: Optional[PolicyNet] = None, optimizer: Optional[Adam] = None,
          start_epoch: int = 0, reward_scale: Optional[float] = None,
          progress=None) -> TrainReport:
    """Run ``cfg.epochs`` cycles of run_epoch -> compute_gae -> ppo_update.

    Epoch numbering (and per-epoch seeding) continues from ``start_epoch``
    so a resumed run follows the same seed schedule.
    """
    n = instance.num_free
    net = net or PolicyNet(3 * n, n, cfg.hidden, seed=cfg.seed)
    if net.n_inputs != 3 * n or net.n_actions != n:
        raise ValueError(f"network shape ({net.n_inputs}->{net.n_actions}) does not fit "
                         f"{instance.name} with {n} free blocks")
    opt = optimizer or Adam(net.size, cfg.learning_rate)
    if reward_scale is None:
        reward_scale = cfg.reward_scale or estimate_reward_scale(instance, cfg.seed)
    report = TrainReport(params=net.params.copy(), reward_scale=reward_scale, config=cfg,
                         net=net, optimizer=opt)
    for epoch in range(start_epoch, start_epoch + cfg.epochs):
        t0 = time.perf_counter()
        try:
            traj, res, rg = run_epoch(instance, net, cfg, sa_cfg, epoch)
            adv, ret = compute_gae(traj, rg, cfg.gamma, cfg.gae_lambda, reward_scale)
            upd_rng = np.random.default_rng(_epoch_seeds(cfg.seed, epoch)[3])
            net, losses = ppo_update(net, traj, adv, ret, cfg, upd_rng, opt)
        except (NonFiniteLossError, FloatingPointError) as e:
            raise TrainingAborted(f"epoch {epoch}: {e}", report) from e
        if res is not None:
            init_c, post_c = res.initial_cost.total, res.best_cost.total
        else:
            init_c = post_c = PlacementEnv(instance).cost(_final_pair(instance, traj, cfg, epoch))
        rec = EpochRecord(epoch, init_c, post_c, rg,
                          float(np.mean([t.local_reward for t in traj])),
                          losses["policy_loss"], losses["value_loss"], losses["entropy"],
                          time.perf_counter() - t0)
        report.records.append(rec)
        report.params = net.params.copy()
        report.net = net
        if progress:
            progress(rec)
        log.info("epoch %d: before SA %.6g, after SA %.6g, global reward %.6g", epoch, rec.init_cost,
                 rec.post_sa_cost, rg)
    return report


def _final_pair(instance, traj, cfg, epoch) -> SequencePair:
    # replay the episode to recover the policy's final pair when no SA phase ran
    env_s = _epoch_seeds(cfg.seed, epoch)[0]
    env = PlacementEnv(instance)
    env.reset(env_s)
    for t in traj:
        env.step(t.action)
    return env.state.sp


def rl_init(instance: ProblemInstance, net: PolicyNet, r_steps: int, seed, greedy: bool = False
            ) -> SequencePair:
    """The pair the policy reaches from a fresh reset: the SA starting point.

    With ``r_steps=0`` this is ``random_sequence_pair(instance, seed)``.
    """
    env = PlacementEnv(instance, seed)
    env.reset()
    pol_rng = np.random.default_rng(np.random.SeedSequence([int(seed), 7]))
    for _ in range(r_steps):
        p = np.exp(log_softmax(net.forward(env.state.encoded)[0])[0])
        env.step(env.action_block(_sample(p, pol_rng, greedy)))
    return env.state.sp


# -------------------------------------------------------------------- persistence

FORMAT = "rlsa-floorplan/policy-v1"


def save_network(path: Union[str, Path], net: PolicyNet, instance: ProblemInstance,
                 cfg: Optional[RLConfig] = None, epochs_completed: int = 0,
                 reward_scale: float = 1.0, optimizer: Optional[Adam] = None) -> Path:
    doc = {
        "format": FORMAT,
        "layers": net.layers(),
        "config": asdict(cfg) if cfg else None,
        "instance": {"name": instance.name, "num_blocks": instance.num_blocks,
                     "num_free": instance.num_free, "fingerprint": instance.fingerprint()},
        "epochs_completed": epochs_completed,
        "reward_scale": reward_scale,
        "optimizer": optimizer.state_dict() if optimizer else None,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc))
    return path


@dataclass
class SavedPolicy:
    net: PolicyNet
    config: Optional[RLConfig]
    epochs_completed: int
    reward_scale: float
    optimizer: Optional[Adam]
    instance_info: dict


def load_network(path: Union[str, Path], instance: Optional[ProblemInstance] = None) -> SavedPolicy:
    """Load a saved policy; with ``instance`` given, check the shapes fit."""
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT:
        raise ValueError(f"{path}: not a saved policy (format {doc.get('format')!r})")
    net = PolicyNet.from_layers(doc["layers"])
    if instance is not None:
        n = instance.num_free
        if net.n_inputs != 3 * n or net.n_actions != n:
            raise ValueError(f"{path}: network expects {net.n_actions} free blocks, "
                             f"{instance.name} has {n}")
        if doc["instance"]["fingerprint"] != instance.fingerprint():
            log.warning("%s was trained on a different instance (%s)", path, doc["instance"]["name"])
    cfg = RLConfig(**doc["config"]) if doc.get("config") else None
    opt = None
    if doc.get("optimizer"):
        opt = Adam(net.size, cfg.learning_rate if cfg else 3e-4)
        opt.load_state_dict(doc["optimizer"])
    return SavedPolicy(net, cfg, int(doc.get("epochs_completed", 0)),
                       float(doc.get("reward_scale", 1.0)), opt, doc["instance"])
