import numpy as np
import pytest

from oracles import (LATTICE_2X2_OPTIMUM, all_sequence_pairs, center_wirelength,
                     constraint_graph_pack)
from rlsa_floorplan.bench import gen_lattice
from rlsa_floorplan.cost import CostBreakdown, Evaluator, NetlistError, area, combine, cost, wirelength
from rlsa_floorplan.model import CostWeights, SequencePair, make_instance, random_sequence_pair
from rlsa_floorplan.packer import Packing, bounding_box, pack


def test_area_examples():
    assert area(pack(make_instance([(30, 40)]), SequencePair([0], [0]))) == 1200
    strip = pack(make_instance([(1, 1), (1, 1)]), SequencePair([0, 1], [0, 1]))
    assert area(strip) == 2


def test_wirelength_two_blocks():
    inst = make_instance([(1, 1), (1, 1)], edges=[(0, 1)])
    p = pack(inst, SequencePair([0, 1], [0, 1]))
    assert wirelength(inst, p) == 1.0


def test_wirelength_missing_block():
    inst = make_instance([(1, 1), (1, 1), (1, 1)], edges=[(0, 2)])
    p = pack(inst, SequencePair([0, 1, 2], [0, 1, 2]))
    short = Packing(p.x[:2], p.y[:2], p.widths[:2], p.heights[:2], 2, 1)
    with pytest.raises(NetlistError):
        wirelength(inst, short)


def test_lattice_2x2_grid_is_optimal(lattice2):
    # perfect grid: 0 1 on the bottom row? lattice rows are 0-1 and 2-3, columns 0-2, 1-3
    grid = SequencePair([2, 3, 0, 1], [0, 1, 2, 3])
    p = pack(lattice2, grid)
    assert p.origins == {0: (0, 0), 1: (1, 0), 2: (0, 1), 3: (1, 1)}
    assert wirelength(lattice2, p) == LATTICE_2X2_OPTIMUM
    # and nothing beats it (oracle packing + oracle wirelength over all 576 pairs)
    edges = lattice2.edges.tolist()
    best = min(center_wirelength(edges, *map(lambda d: [d[b] for b in range(4)],
                                             constraint_graph_pack(gp, gm, [1] * 4, [1] * 4)),
                                 [1] * 4, [1] * 4)
               for gp, gm in all_sequence_pairs(range(4)))
    assert best == LATTICE_2X2_OPTIMUM


def test_cost_weights():
    inst = make_instance([(1, 1), (1, 1)], edges=[(0, 1)])
    p = pack(inst, SequencePair([0, 1], [0, 1]))
    assert cost(inst, p, CostWeights(0, 1)).total == wirelength(inst, p)
    assert cost(inst, p, CostWeights(1, 0)).total == area(p)
    assert cost(inst, p, CostWeights(1, 1)) == CostBreakdown(2.0, 1.0, 3.0)


def test_lattice_and_ami49_weights(ami49):
    lat = gen_lattice(3)
    p = pack(lat, random_sequence_pair(lat, 0))
    c = cost(lat, p)
    assert c.total == c.wirelength and c.area > 0
    p = pack(ami49, random_sequence_pair(ami49, 0))
    c = cost(ami49, p)
    assert c.total == c.area and c.wirelength > 0


def test_area_equals_bbox_product(ami49):
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = pack(ami49, random_sequence_pair(ami49, rng))
        xs = p.x + p.widths
        ys = p.y + p.heights
        assert area(p) == (xs.max() - min(0, p.x.min())) * (ys.max() - min(0, p.y.min()))
        w, h = bounding_box(p)
        assert area(p) == w * h
        assert area(p) >= max(b.area for b in ami49.blocks)


def test_translation_invariance(ami49):
    rng = np.random.default_rng(3)
    p = pack(ami49, random_sequence_pair(ami49, rng))
    base = wirelength(ami49, p)
    for _ in range(20):
        dx, dy = rng.uniform(-1e4, 1e4, size=2)
        moved = Packing(p.x + dx, p.y + dy, p.widths, p.heights, p.bbox_width, p.bbox_height)
        assert wirelength(ami49, moved) == pytest.approx(base, rel=1e-12)


def test_zero_weight_decoupling():
    dims = [(2, 1), (1, 3), (2, 2)]
    a = make_instance(dims, edges=[(0, 1)], weights=CostWeights(1, 0))
    b = make_instance(dims, edges=[(1, 2), (0, 2)], weights=CostWeights(1, 0))
    sp = SequencePair([0, 2, 1], [1, 0, 2])
    assert cost(a, pack(a, sp)).total == cost(b, pack(b, sp)).total


def test_linearity(ami49):
    p = pack(ami49, random_sequence_pair(ami49, 9))
    w1, w2 = CostWeights(0.3, 2.0), CostWeights(1.5, 0.25)
    both = CostWeights(w1.w_area + w2.w_area, w1.w_wire + w2.w_wire)
    assert cost(ami49, p, both).total == pytest.approx(
        cost(ami49, p, w1).total + cost(ami49, p, w2).total, rel=1e-14)


def test_normalize_hook_defaults_to_identity():
    c = combine(10.0, 4.0, CostWeights(1, 1))
    assert c.total == 14.0
    c = combine(10.0, 4.0, CostWeights(1, 1), normalize=lambda a, w: (a / 10, w / 4))
    assert c.total == 2.0 and c.area == 10.0


def test_evaluator_matches_reference(ami49_fixed):
    ev = Evaluator(ami49_fixed)
    rng = np.random.default_rng(4)
    for _ in range(100):
        sp = random_sequence_pair(ami49_fixed, rng)
        assert ev.evaluate(sp) == cost(ami49_fixed, pack(ami49_fixed, sp))
