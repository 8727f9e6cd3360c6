"""GAE with a bootstrapped terminal value, and the clipped PPO update."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .policy import Adam, PolicyNet, log_softmax

MAX_GRAD_NORM = 0.5


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    action: int          # free-block id of the candidate
    action_index: int    # column of the actor output
    log_prob: float
    value: float
    local_reward: float
    done: bool = False


class NonFiniteLossError(FloatingPointError):
    pass


def gae(rewards: np.ndarray, values: np.ndarray, terminal_value: float,
        gamma: float, lam: float) -> Tuple[np.ndarray, np.ndarray]:
    """delta_t = r_t + gamma V_{t+1} - V_t with V_T := terminal_value;
    A_t = sum_k (gamma lam)^k delta_{t+k}; returns = A + V."""
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    T = len(rewards)
    if T == 0:
        raise ValueError("empty trajectory")
    next_v = np.append(values[1:], terminal_value)
    deltas = rewards + gamma * next_v - values
    adv = np.zeros(T)
    acc = 0.0
    for t in range(T - 1, -1, -1):
        acc = deltas[t] + gamma * lam * acc
        adv[t] = acc
    return adv, adv + values


def compute_gae(traj: Sequence[Transition], terminal_value: float, gamma: float, lam: float,
                reward_scale: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """GAE over a trajectory. Local rewards and the terminal value are raw
    costs and get multiplied by ``reward_scale``; stored values are already in
    scaled units."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    r = np.array([t.local_reward for t in traj]) * reward_scale
    v = np.array([t.value for t in traj])
    return gae(r, v, terminal_value * reward_scale, gamma, lam)


def ppo_loss_and_grad(net: PolicyNet, X, actions, old_logp, adv, returns,
                      clip_eps: float, value_coef: float, entropy_coef: float):
    """Loss to minimize: -surrogate + value_coef*MSE - entropy_coef*entropy.

    Returns (loss, flat_grad, stats).
    """
    B = len(actions)
    logits, values, cache = net.forward(X)
    logp_all = log_softmax(logits)
    p = np.exp(logp_all)
    rows = np.arange(B)
    logp = logp_all[rows, actions]
    ratio = np.exp(logp - old_logp)
    clipped = np.clip(ratio, 1 - clip_eps, 1 + clip_eps)
    unclipped_term = ratio * adv
    surr = np.minimum(unclipped_term, clipped * adv)
    entropy = -(p * logp_all).sum(axis=1)
    verr = values - returns
    loss = -surr.mean() + value_coef * np.mean(verr ** 2) - entropy_coef * entropy.mean()

    # d(-surr)/dlogits: only the unclipped branch carries gradient
    active = (unclipped_term <= clipped * adv).astype(np.float64)
    coef = -(adv * active * ratio) / B
    onehot = np.zeros_like(p)
    onehot[rows, actions] = 1.0
    dlogits = coef[:, None] * (onehot - p)
    dlogits += (entropy_coef / B) * p * (logp_all + entropy[:, None])
    dvalues = 2.0 * value_coef * verr / B
    grad = net.backward(cache, dlogits, dvalues)
    stats = {"policy_loss": float(-surr.mean()), "value_loss": float(np.mean(verr ** 2)),
             "entropy": float(entropy.mean()), "surrogate": float(surr.mean()),
             "max_ratio_dev": float(np.max(np.abs(ratio - 1.0)))}
    return float(loss), grad, stats


def ppo_update(net: PolicyNet, traj: Sequence[Transition], advantages, returns, cfg,
               rng: np.random.Generator, optimizer: Optional[Adam] = None):
    """Clipped-surrogate PPO on one trajectory; returns (new_net, losses).

    ``net`` itself is left untouched. If a non-finite loss shows up, the
    update is abandoned and NonFiniteLossError is raised.
    """
    new = net.copy()
    opt = optimizer or Adam(net.size, cfg.learning_rate)
    snapshot = (opt.m.copy(), opt.v.copy(), opt.t)
    X = np.stack([t.state for t in traj])
    actions = np.array([t.action_index for t in traj])
    old_logp = np.array([t.log_prob for t in traj])
    adv = np.asarray(advantages, dtype=np.float64)
    if len(adv) > 1:
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    returns = np.asarray(returns, dtype=np.float64)
    B = len(traj)
    mb = max(1, min(cfg.minibatch_size, B))
    history = []
    for _ in range(cfg.ppo_epochs):
        order = rng.permutation(B)
        for start in range(0, B, mb):
            idx = order[start:start + mb]
            loss, grad, stats = ppo_loss_and_grad(
                new, X[idx], actions[idx], old_logp[idx], adv[idx], returns[idx],
                cfg.clip_eps, cfg.value_coef, cfg.entropy_coef)
            if not (np.isfinite(loss) and np.all(np.isfinite(grad))):
                opt.m, opt.v, opt.t = snapshot
                raise NonFiniteLossError(
                    f"non-finite PPO loss ({loss}) at minibatch {len(history)}; parameters rolled back")
            gnorm = float(np.linalg.norm(grad))
            if gnorm > MAX_GRAD_NORM:
                grad = grad * (MAX_GRAD_NORM / gnorm)
            opt.step(new.params, grad)
            stats["loss"] = loss
            stats["grad_norm"] = gnorm
            history.append(stats)
    losses = {k: float(np.mean([h[k] for h in history])) for k in
              ("policy_loss", "value_loss", "entropy", "loss")}
    losses["first_surrogate"] = history[0]["surrogate"] if history else 0.0
    losses["first_max_ratio_dev"] = history[0]["max_ratio_dev"] if history else 0.0
    losses["n_minibatches"] = len(history)
    return new, losses
