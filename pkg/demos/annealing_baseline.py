"""
Simulated annealing from a random start
=======================================

The baseline every RL result is measured against: anneal a random sequence
pair with exponential cooling. Temperatures come from the cost changes of a
few hundred random moves, so the same code works in um of wire and um2 of
area.
"""

from rlsa_floorplan.anneal import SAConfig, auto_temperature, sa_run
from rlsa_floorplan.bench import gen_lattice
from rlsa_floorplan.model import random_sequence_pair

inst = gen_lattice(10)
init = random_sequence_pair(inst, 0)

est = auto_temperature(inst, init)
print("t_max %.3g  t_min %.3g" % (est.t_max, est.t_min))

res = sa_run(inst, init, SAConfig(steps=5000, seed=0))
print("start %.0f um -> best %.0f um, %d moves accepted"
      % (res.initial_cost.total, res.best_cost.total, res.accepted_moves))

###############################################################################
# The trace holds (step, current cost, best cost) every 1% of the run.

for step, cur, best in res.trace[::20]:
    print("%5d  %7.1f  %7.1f" % (step, cur, best))

###############################################################################
# More steps keep paying off on this instance; the perfect grid scores 180.

for steps in (1000, 5000, 20000, 50000):
    r = sa_run(inst, init, SAConfig(steps=steps, seed=0))
    print("%6d steps: %.0f um" % (steps, r.best_cost.total))
