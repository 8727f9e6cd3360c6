"""
Packing a sequence pair and scoring it
======================================

A sequence pair is two orderings of the same blocks. If block a comes
before block b in both, a sits to the left of b. If a comes after b in the
first ordering but before it in the second, a sits below b. Packing turns
those relations into the tightest coordinates.
"""

import numpy as np

from rlsa_floorplan.bench import gen_lattice, load_yal, ami49_standin_path
from rlsa_floorplan.cost import cost
from rlsa_floorplan.model import SequencePair, make_instance, random_sequence_pair
from rlsa_floorplan.packer import pack

# three blocks, one wide and two small
inst = make_instance([(4, 1), (1, 1), (1, 2)], edges=[(0, 1), (1, 2)])

# 0 before 1 in both orders: 0 is left of 1.
# 2 is after 1 in gamma_plus but before it in gamma_minus: 2 sits below 1.
sp = SequencePair(gamma_plus=[0, 1, 2], gamma_minus=[0, 2, 1])
p = pack(inst, sp)
print("origins:", p.origins)
print("bounding box: %g x %g" % (p.bbox_width, p.bbox_height))
print(cost(inst, p))

###############################################################################
# The lattice benchmark
# ---------------------
# n*n unit squares wired to their grid neighbours. The perfect grid has
# wirelength 2n(n-1), one unit per edge.

lat = gen_lattice(4)
grid = SequencePair(gamma_plus=[12, 13, 14, 15, 8, 9, 10, 11, 4, 5, 6, 7, 0, 1, 2, 3],
                    gamma_minus=list(range(16)))
print("grid wirelength:", cost(lat, pack(lat, grid)).wirelength)
print("random pair wirelength:", cost(lat, pack(lat, random_sequence_pair(lat, 0))).wirelength)

###############################################################################
# ami49
# -----
# The bundled file is a synthetic stand-in with 49 blocks. Point RLSA_AMI49
# at the real MCNC file to use that instead. Area is the only cost term.

ami = load_yal(ami49_standin_path())
block_area = sum(b.area for b in ami.blocks)
areas = np.array([cost(ami, pack(ami, random_sequence_pair(ami, s))).area for s in range(200)])
print("sum of block areas: %.2f mm2" % (block_area * 1e-6))
print("random pairs: %.1f +- %.1f mm2 (best %.1f)" % (areas.mean() * 1e-6, areas.std() * 1e-6,
                                                       areas.min() * 1e-6))
