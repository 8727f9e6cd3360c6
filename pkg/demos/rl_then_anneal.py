"""
Training the swap policy and comparing starts
=============================================

Each training epoch resets to a random pair, lets the policy swap the
current input block with a block of its choice 200 times, anneals the
result, and feeds the annealing gain back as the value of the last state.
Afterwards the policy's output is used as a starting point for SA and
compared, pair by pair, with a random start.
"""

import numpy as np

from rlsa_floorplan.anneal import SAConfig
from rlsa_floorplan.bench import gen_lattice
from rlsa_floorplan.experiment import compare
from rlsa_floorplan.rl.trainer import RLConfig, train

inst = gen_lattice(6)
cfg = RLConfig(epochs=10, r_steps=200, s_steps=2000, seed=0)
report = train(inst, cfg, SAConfig(),
               progress=lambda r: print("epoch %2d  before SA %6.1f  after SA %6.1f  entropy %.2f"
                                        % (r.epoch, r.init_cost, r.post_sa_cost, r.entropy)))

###############################################################################
# Ten paired runs. Run i uses seed+i for both arms: the same random reset,
# the same SA seed, and temperatures fixed once for the instance.

result = compare(inst, report.net, runs=10, r_steps=200, sa_cfg=SAConfig(steps=2000), seed=100)
a, b = result.costs("rl_init"), result.costs("random_init")
print("RL start     %.1f +- %.1f um" % (a.mean(), a.std(ddof=1)))
print("random start %.1f +- %.1f um" % (b.mean(), b.std(ddof=1)))
print("RL start better in %d of %d pairs" % (result.wins, result.runs))

###############################################################################
# How far did the policy itself move the cost before SA took over?

init_a = np.array([r.meta["init_cost"] for r in result.records if r.method == "rl_init"])
init_b = np.array([r.meta["init_cost"] for r in result.records if r.method == "random_init"])
print("cost handed to SA: RL %.1f vs random %.1f" % (init_a.mean(), init_b.mean()))
