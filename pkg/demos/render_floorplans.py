"""
Drawing floorplans
==================

SVG output of an annealed ami49 stand-in, with and without three
pre-placed blocks. Fixed blocks are drawn in grey; the dashed outline is
the bounding box whose area is being minimized.
"""

from pathlib import Path

from rlsa_floorplan.anneal import SAConfig, sa_run
from rlsa_floorplan.bench import (FixedConfig, ami49_standin_path, apply_fixed,
                                  example_fixed_config_path, load_yal)
from rlsa_floorplan.model import random_sequence_pair
from rlsa_floorplan.packer import pack
from rlsa_floorplan.svg import render_svg

out = Path("demo_out")
ami = load_yal(ami49_standin_path())
fixed = apply_fixed(ami, FixedConfig.from_json(example_fixed_config_path()))

for name, inst in (("ami49", ami), ("ami49_fixed", fixed)):
    res = sa_run(inst, random_sequence_pair(inst, 0), SAConfig(steps=20000, seed=0))
    path = render_svg(inst, pack(inst, res.best), out / f"{name}.svg", res.best_cost,
                      title=f"{name}, {res.best_cost.area * 1e-6:.1f} mm2")
    print(path)
