"""End-to-end acceptance checks, one test per criterion.

Each test records a single PASS/FAIL line; conftest prints them in the
terminal summary so they show up in a plain ``pytest -v`` run.
"""
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from oracles import (AMI49_STANDIN_TOTAL_AREA, LATTICE_2X2_OPTIMUM, all_sequence_pairs,
                     center_wirelength, constraint_graph_pack, discounted_value)
from rlsa_floorplan.anneal import SAConfig, sa_run
from rlsa_floorplan.bench import gen_lattice
from rlsa_floorplan.experiment import compare
from rlsa_floorplan.model import SequencePair, make_instance, random_sequence_pair
from rlsa_floorplan.packer import Packer, overlapping_pairs, pack
from rlsa_floorplan.rl.policy import PolicyNet, log_softmax
from rlsa_floorplan.rl.ppo import compute_gae, gae, ppo_loss_and_grad, ppo_update
from rlsa_floorplan.rl.trainer import SIGN_COST_INCREASE, RLConfig, run_epoch, train

RESULTS = []


def verdict(number, title, ok, detail):
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} :: {detail}")
    assert ok, detail


# ---------------------------------------------------------------- 1. packing

def test_criterion_1_packing_oracle():
    t0 = time.perf_counter()
    mismatches = checked = 0
    for n in (1, 2, 3, 4):
        rng = np.random.default_rng(1000 + n)
        for _ in range(20):
            dims = rng.integers(1, 30, size=(n, 2)).astype(float)
            pk = Packer(make_instance(dims))
            for gp, gm in all_sequence_pairs(range(n)):
                p = pk.pack(SequencePair(gp, gm))
                ox, oy = constraint_graph_pack(gp, gm, dims[:, 0], dims[:, 1])
                checked += 1
                mismatches += any(p.x[b] != ox[b] or p.y[b] != oy[b] for b in range(n))
    secs = time.perf_counter() - t0
    verdict(1, "packing equals constraint-graph oracle", mismatches == 0 and secs < 60,
            f"{checked} pairs, {mismatches} mismatches, {secs:.1f}s")


# ------------------------------------------------------------ 2. non-overlap

def test_criterion_2_non_overlap(ami49, ami49_fixed):
    t0 = time.perf_counter()
    bad = moved = 0
    for inst in (ami49, ami49_fixed):
        pk = Packer(inst)
        rng = np.random.default_rng(2)
        for _ in range(1000):
            p = pk.pack(random_sequence_pair(inst, rng))
            bad += bool(overlapping_pairs(p))
            moved += sum((p.x[f], p.y[f]) != inst.blocks[f].fixed_origin for f in inst.fixed_ids)
    secs = time.perf_counter() - t0
    verdict(2, "no overlaps, fixed blocks unmoved", bad == 0 and moved == 0 and secs < 60,
            f"2x1000 packings, {bad} with overlaps, {moved} moved fixed blocks, {secs:.1f}s")


# ------------------------------------------------------- 3. toy optimality

def test_criterion_3_lattice_2x2_optimum(lattice2):
    edges = lattice2.edges.tolist()
    unit = [1.0] * 4
    optimum = min(center_wirelength(edges, *constraint_graph_pack(gp, gm, unit, unit), unit, unit)
                  for gp, gm in all_sequence_pairs(range(4)))
    assert optimum == LATTICE_2X2_OPTIMUM
    hits = sum(sa_run(lattice2, random_sequence_pair(lattice2, s),
                      SAConfig(steps=20_000, seed=s)).best_cost.total == optimum
               for s in range(100))
    verdict(3, "SA reaches the 2x2 lattice optimum", hits >= 99,
            f"optimum {optimum}, hit in {hits}/100 runs")


# ----------------------------------------------- 4-6. RL-init vs random-init

def _train_and_compare(instance, epochs):
    cfg = RLConfig(epochs=epochs, r_steps=200, s_steps=5000, seed=0)
    sa_cfg = SAConfig(steps=5000)
    report = train(instance, cfg, sa_cfg)
    result = compare(instance, report.net, runs=10, r_steps=cfg.r_steps,
                     sa_cfg=replace(sa_cfg, steps=cfg.s_steps), seed=1000)
    a, b = result.costs("rl_init"), result.costs("random_init")
    return result, a, b


def _describe(a, b, wins, unit):
    return (f"RL {a.mean():.4g}±{a.std(ddof=1):.3g} vs random {b.mean():.4g}±{b.std(ddof=1):.3g} "
            f"{unit}, RL better in {wins}/10 pairs")


def test_criterion_4_lattice_rl_vs_random():
    result, a, b = _train_and_compare(gen_lattice(10), 15)
    verdict(4, "lattice 10x10: RL-init beats random-init", a.mean() < b.mean() and result.wins >= 6,
            _describe(a, b, result.wins, "um"))


def test_criterion_5_ami49_rl_vs_random(ami49):
    result, a, b = _train_and_compare(ami49, 10)
    areas_ok = all(r.final.area >= AMI49_STANDIN_TOTAL_AREA for r in result.records)
    ok = a.mean() < b.mean() and result.wins >= 6 and areas_ok
    verdict(5, "ami49: RL-init beats random-init", ok,
            _describe(a, b, result.wins, "mm2") + f", area lower bound held: {areas_ok}")


def test_criterion_6_ami49_fixed_rl_vs_random(ami49_fixed):
    result, a, b = _train_and_compare(ami49_fixed, 10)
    exact = True
    for rec in result.records:
        p = pack(ami49_fixed, SequencePair.from_dict(rec.meta["best"]))
        exact &= all((p.x[f], p.y[f]) == ami49_fixed.blocks[f].fixed_origin
                     for f in ami49_fixed.fixed_ids)
        exact &= not overlapping_pairs(p)
    verdict(6, "ami49 + fixed blocks: RL-init mean <= random-init mean", a.mean() <= b.mean() and exact,
            _describe(a, b, result.wins, "mm2") + f", fixed blocks exact: {exact}")


# ------------------------------------------------------ 7. RL numerics

def test_criterion_7_rl_numerics():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst_grad = 0.0
    for point in range(10):
        net = PolicyNet(12, 4, hidden=8, seed=point)
        net.set_params(net.params + rng.normal(scale=0.3, size=net.size))
        B = 16
        X = rng.normal(size=(B, 12))
        logits, values, _ = net.forward(X)
        acts = rng.integers(4, size=B)
        old = log_softmax(logits)[np.arange(B), acts] + rng.normal(scale=0.15, size=B)
        args = (X, acts, old, rng.normal(size=B), values + rng.normal(size=B), 0.2, 0.5, 0.01)
        _, grad, _ = ppo_loss_and_grad(net, *args)
        theta = net.params.copy()
        for c in rng.choice(net.size, size=30, replace=False):
            probe = net.copy()
            probe.params[c] = theta[c] + 1e-6
            up = ppo_loss_and_grad(probe, *args)[0]
            probe.params[c] = theta[c] - 1e-6
            down = ppo_loss_and_grad(probe, *args)[0]
            fd = (up - down) / 2e-6
            denom = max(abs(fd), abs(grad[c]), 1e-8)
            worst_grad = max(worst_grad, abs(fd - grad[c]) / denom if denom > 1e-8 else 0.0)

    r, v, vt, g = rng.normal(size=20), rng.normal(size=20), 1.7, 0.93
    adv1, ret1 = gae(r, v, vt, g, 1.0)
    target = np.array([discounted_value(r, vt, g, t) for t in range(20)])
    gae_one = np.max(np.abs(ret1 - target))
    terminal_rel = np.max(np.abs(ret1 - target) / np.abs(target))
    adv0, _ = gae(r, v, vt, g, 0.0)
    gae_zero = np.max(np.abs(adv0 - (r + g * np.append(v[1:], vt) - v)))

    inst = gen_lattice(4)
    net = PolicyNet(48, 16, hidden=32, seed=0)
    cfg = RLConfig(r_steps=40, s_steps=1000)
    sa_cfg = SAConfig(t_max=1.0, t_min=0.01)
    traj, _, rg_imp = run_epoch(inst, net, cfg, sa_cfg, epoch=2)
    _, _, rg_inc = run_epoch(inst, net, replace(cfg, global_reward_sign=SIGN_COST_INCREASE), sa_cfg, 2)
    adv, ret = compute_gae(traj, rg_imp, cfg.gamma, cfg.gae_lambda)
    _, losses = ppo_update(net, traj, adv, ret, cfg, np.random.default_rng(0))
    ratio_dev = losses["first_max_ratio_dev"]
    secs = time.perf_counter() - t0

    ok = (worst_grad < 1e-4 and gae_one < 1e-9 and gae_zero < 1e-9 and terminal_rel < 1e-9
          and rg_imp == -rg_inc and ratio_dev < 1e-9 and secs < 60)
    verdict(7, "RL numerical suite", ok,
            f"grad rel err {worst_grad:.1e}, GAE l=1 {gae_one:.1e}, l=0 {gae_zero:.1e}, "
            f"terminal rel {terminal_rel:.1e}, sign flip {rg_imp:.4g}/{rg_inc:.4g}, "
            f"first ratio dev {ratio_dev:.1e}, {secs:.1f}s")


# --------------------------------------------------------- 8. Metropolis

def test_criterion_8_metropolis():
    # 1x1 next to 3x1 costs 4, stacked costs 6; a gamma_plus swap toggles
    inst = make_instance([(1, 1), (3, 1)])
    T, dC = 1.5, 2.0
    res = sa_run(inst, SequencePair([0, 1], [0, 1]),
                 SAConfig(steps=30_000, t_max=T, t_min=T, move_probs=(0, 1, 0), trace_every=1, seed=8))
    series = [res.initial_cost.total] + [c for _, c, _ in res.trace]
    tries = [b for a, b in zip(series, series[1:]) if a == 4.0]
    n, k = len(tries), sum(b == 6.0 for b in tries)
    p = math.exp(-dC / T)
    sigma = math.sqrt(n * p * (1 - p))
    verdict(8, "Metropolis acceptance rate", n >= 10_000 and abs(k - n * p) <= 3 * sigma,
            f"{k}/{n} accepted = {k / n:.4f}, expected {p:.4f} ± {3 * sigma / n:.4f} (3 sigma)")
