"""Generate the bundled ami49 stand-in YAL file and its example fixed config.

The MCNC ami49.yal benchmark is not redistributed here. This writes a
synthetic 49-module netlist with the same block count and dimension range
(170 to 3200 um) so that every code path can run offline. Point
``RLSA_AMI49`` (or ``--yal``) at the real file to use it instead.

    python tools/make_ami49_standin.py
"""
from pathlib import Path

import numpy as np

from rlsa_floorplan.bench import FixedConfig, parse_yal
from rlsa_floorplan.model import random_sequence_pair
from rlsa_floorplan.packer import pack

DATA = Path(__file__).resolve().parents[1] / "src" / "rlsa_floorplan" / "data"


def main(seed=49):
    rng = np.random.default_rng(seed)
    lo, hi = 170.0, 3200.0
    dims = np.round(np.exp(rng.uniform(np.log(lo), np.log(1750.0), size=(49, 2))) / 10) * 10
    dims = np.clip(dims, lo, hi)
    dims[0] = (3200.0, 1540.0)
    dims[1] = (1050.0, 2310.0)
    dims[2] = (170.0, 630.0)
    out = ["/* Synthetic stand-in for MCNC ami49: 49 hard modules, 170-3200 um.",
           "   Generated by tools/make_ami49_standin.py; not the original benchmark. */", ""]
    pins_of = []
    for i, (w, h) in enumerate(dims):
        name = f"bk{i + 1}"
        if i in (5, 17):
            # L-shaped rectilinear outline; bounding box is w x h
            verts = [0, 0, 0, h, w / 2, h, w / 2, h / 2, w, h / 2, w, 0]
        else:
            verts = [0, 0, 0, h, w, h, w, 0]
        npins = int(rng.integers(4, 11))
        pins_of.append(npins)
        out.append(f"MODULE {name};")
        out.append(" TYPE GENERAL;")
        out.append(" DIMENSIONS " + " ".join(f"{v:g}" for v in verts) + ";")
        out.append(" IOLIST;")
        for p in range(npins):
            out.append(f"  P{p + 1} B {0:g} {h * (p + 1) / (npins + 1):g} 1 METAL2;")
        out.append(" ENDIOLIST;")
        out.append("ENDMODULE;")
        out.append("")
    nsig = 220
    out.append("MODULE bound;")
    out.append(" TYPE PARENT;")
    out.append(" DIMENSIONS 0 0 0 8000 8000 8000 8000 0;")
    out.append(" IOLIST;")
    for p in range(8):
        out.append(f"  PAD{p + 1} B {p * 1000:g} 0 1 METAL2;")
    out.append(" ENDIOLIST;")
    out.append(" NETWORK;")
    for i, npins in enumerate(pins_of):
        sigs = [f"s{int(s)}" for s in rng.integers(0, nsig, size=npins)]
        if i % 7 == 0:
            sigs[-1] = f"PAD{i // 7 + 1}"
        out.append(f"  C_{i} bk{i + 1} " + " ".join(sigs) + ";")
    out.append(" ENDNETWORK;")
    out.append("ENDMODULE;")
    text = "\n".join(out) + "\n"
    (DATA / "ami49_standin.yal").write_text(text)

    inst = parse_yal(text, "ami49_standin")
    p = pack(inst, random_sequence_pair(inst, 0))
    bw, bh = p.bbox_width, p.bbox_height
    # three mid-sized blocks, pinned inside the reference packing's bounding box
    names = ["bk4", "bk9", "bk23"]
    anchors = [(0.0, 0.0), (0.45, 0.30), (0.15, 0.65)]
    entries = tuple((n, float(round(fx * bw, -1)), float(round(fy * bh, -1)))
                    for n, (fx, fy) in zip(names, anchors))
    FixedConfig(entries).to_json(DATA / "ami49_fixed3.json")
    print(f"wrote {len(inst.blocks)} modules, {len(inst.nets)} edges; ref bbox {bw:g} x {bh:g}")
    print(entries)


if __name__ == "__main__":
    main()
