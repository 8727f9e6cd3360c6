"""Benchmark construction: lattice generator, MCNC YAL reader, fixed blocks."""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .model import Block, BlockKind, CostWeights, Net, ProblemInstance, _rects_overlap

log = logging.getLogger(__name__)

LATTICE_WEIGHTS = CostWeights(w_area=0.0, w_wire=1.0)
AREA_WEIGHTS = CostWeights(w_area=1.0, w_wire=0.0)


def gen_lattice(n: int) -> ProblemInstance:
    """n*n unit blocks; block i is joined to i+1 (same row) and to i+n."""
    if n < 2:
        raise ValueError(f"lattice side must be >= 2, got {n}")
    blocks = [Block(i, f"L{i}", 1.0, 1.0) for i in range(n * n)]
    edges = []
    for i in range(n * n):
        if i + 1 < n * n and (i + 1) % n != 0:
            edges.append((i, i + 1))
        if i + n < n * n:
            edges.append((i, i + n))
    nets = [Net(k, e) for k, e in enumerate(edges)]
    return ProblemInstance(blocks, nets, LATTICE_WEIGHTS, f"lattice{n}x{n}")


# --------------------------------------------------------------------------- YAL

class YALParseError(ValueError):
    def __init__(self, msg: str, line: int):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass
class _Module:
    name: str
    line: int
    type: Optional[str] = None
    dims: Optional[List[float]] = None
    network: Optional[List[Tuple[int, List[str]]]] = None


_COMMENT = re.compile(r"/\*.*?\*/", re.S)


def _statements(text: str):
    """Yield (line_no, tokens) for every ';'-terminated statement."""
    # blank out comments but keep newlines so line numbers stay right
    text = _COMMENT.sub(lambda m: "\n" * m.group(0).count("\n"), text)
    line = 1
    start_line = None
    buf: List[str] = []
    for part in re.split(r"(;|\n)", text):
        if part == "\n":
            line += 1
        elif part == ";":
            if buf:
                yield start_line, buf
            elif start_line is None:
                yield line, []
            buf, start_line = [], None
        else:
            toks = part.split()
            if toks:
                if start_line is None:
                    start_line = line
                buf.extend(toks)
    if buf:
        raise YALParseError("statement not terminated by ';'", start_line)


def _is_rectilinear(xs: Sequence[float], ys: Sequence[float]) -> bool:
    n = len(xs)
    return all(xs[k] == xs[(k + 1) % n] or ys[k] == ys[(k + 1) % n] for k in range(n))


def parse_yal(text: str, name: str = "yal") -> ProblemInstance:
    """Parse the MODULE/TYPE/DIMENSIONS/IOLIST/NETWORK subset of MCNC YAL.

    Every non-parent module becomes a free block sized by the bounding box of
    its outline. Signals of the parent NETWORK that touch two or more blocks
    become nets, split into consecutive 2-member edges. Pin data is skipped.
    """
    modules: List[_Module] = []
    cur: Optional[_Module] = None
    section = None  # None | "iolist" | "network"
    for line, toks in _statements(text):
        if not toks:
            continue
        kw = toks[0].upper()
        if section == "iolist":
            if kw == "ENDIOLIST":
                section = None
            continue
        if section == "network":
            if kw == "ENDNETWORK":
                section = None
            elif len(toks) < 2:
                raise YALParseError("network entry needs an instance and a module name", line)
            else:
                cur.network.append((line, toks[1:]))
            continue
        if kw == "MODULE":
            if cur is not None:
                raise YALParseError(f"MODULE inside unterminated module {cur.name!r}", line)
            if len(toks) != 2:
                raise YALParseError("MODULE expects exactly one name", line)
            cur = _Module(toks[1], line)
        elif cur is None:
            raise YALParseError(f"{toks[0]!r} outside of a MODULE", line)
        elif kw == "TYPE":
            if len(toks) != 2:
                raise YALParseError("TYPE expects one value", line)
            cur.type = toks[1].upper()
        elif kw == "DIMENSIONS":
            try:
                vals = [float(t) for t in toks[1:]]
            except ValueError:
                raise YALParseError("non-numeric DIMENSIONS", line) from None
            if len(vals) < 6 or len(vals) % 2:
                raise YALParseError("DIMENSIONS needs at least three x y vertex pairs", line)
            cur.dims = vals
        elif kw == "IOLIST":
            section = "iolist"
        elif kw == "NETWORK":
            cur.network = []
            section = "network"
        elif kw == "ENDMODULE":
            if cur.dims is None and cur.type != "PARENT":
                raise YALParseError(f"module {cur.name!r} has no DIMENSIONS", line)
            modules.append(cur)
            cur = None
        else:
            raise YALParseError(f"unexpected keyword {toks[0]!r}", line)
    if section is not None or cur is not None:
        raise YALParseError("unexpected end of file inside a module", cur.line if cur else 0)

    notes = []
    blocks: List[Block] = []
    index: Dict[str, int] = {}
    for m in modules:
        if m.type == "PARENT":
            continue
        xs, ys = m.dims[0::2], m.dims[1::2]
        if not _is_rectilinear(xs, ys):
            notes.append(f"non-rectilinear outline for {m.name}; using bounding box")
            log.warning("module %s: non-rectilinear outline, using its bounding box", m.name)
        w, h = max(xs) - min(xs), max(ys) - min(ys)
        if w <= 0 or h <= 0:
            raise YALParseError(f"module {m.name!r} has a degenerate outline", m.line)
        index[m.name] = len(blocks)
        blocks.append(Block(len(blocks), m.name, w, h))

    parents = [m for m in modules if m.type == "PARENT"]
    nets: List[Net] = []
    if not parents:
        notes.append("no parent module; empty netlist")
    else:
        signals: Dict[str, List[int]] = {}
        for line, (modname, *sigs) in parents[0].network or []:
            if modname not in index:
                raise YALParseError(f"network instance of unknown module {modname!r}", line)
            b = index[modname]
            for s in sigs:
                members = signals.setdefault(s, [])
                if b not in members:
                    members.append(b)
        for members in signals.values():
            if len(members) > 1:
                for k in range(len(members) - 1):
                    nets.append(Net(len(nets), (members[k], members[k + 1])))
        if any(len(m) > 2 for m in signals.values()):
            notes.append("multi-pin nets decomposed into consecutive-pair edges")
    return ProblemInstance(blocks, nets, AREA_WEIGHTS, name, tuple(notes))


def load_yal(path: Union[str, Path]) -> ProblemInstance:
    path = Path(path)
    return parse_yal(path.read_text(), name=path.name.split(".")[0])


def ami49_standin_path() -> Path:
    """Bundled synthetic 49-module stand-in for ami49 (not the MCNC file)."""
    return Path(str(resources.files("rlsa_floorplan") / "data" / "ami49_standin.yal"))


def example_fixed_config_path() -> Path:
    """Example 3-block fixed configuration for the ami49 stand-in."""
    return Path(str(resources.files("rlsa_floorplan") / "data" / "ami49_fixed3.json"))


# ------------------------------------------------------------------ fixed blocks

class FixedConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FixedConfig:
    entries: Tuple[Tuple[str, float, float], ...] = ()

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "FixedConfig":
        data = json.loads(Path(path).read_text())
        return cls(tuple((d["name"], float(d["x"]), float(d["y"])) for d in data))

    def to_json(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(
            [{"name": n, "x": x, "y": y} for n, x, y in self.entries], indent=2) + "\n")


def apply_fixed(instance: ProblemInstance, cfg: FixedConfig) -> ProblemInstance:
    if not cfg.entries:
        return instance
    names = [e[0] for e in cfg.entries]
    if len(set(names)) != len(names):
        raise FixedConfigError(f"duplicate block names in fixed config: {names}")
    by_name = {b.name: b for b in instance.blocks}
    blocks = list(instance.blocks)
    for name, x, y in cfg.entries:
        if name not in by_name:
            raise FixedConfigError(f"fixed config names unknown block {name!r}")
        b = by_name[name]
        blocks[b.id] = replace(b, kind=BlockKind.FIXED, fixed_origin=(x, y))
    fixed = [b for b in blocks if b.is_fixed]
    for i, a in enumerate(fixed):
        for b in fixed[i + 1:]:
            if _rects_overlap(*a.fixed_origin, a.width, a.height, *b.fixed_origin, b.width, b.height):
                raise FixedConfigError(f"fixed blocks {a.name!r} and {b.name!r} overlap")
    try:
        return ProblemInstance(blocks, instance.nets, instance.weights,
                               instance.name + "+fixed", instance.notes)
    except ValueError as e:
        raise FixedConfigError(str(e)) from e
