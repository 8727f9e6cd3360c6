"""Command-line front end: pack, sa, train, compare, render."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

from .anneal import SAConfig, sa_run
from .bench import (FixedConfig, FixedConfigError, YALParseError, ami49_standin_path, apply_fixed,
                    gen_lattice, load_yal)
from .cost import cost
from .experiment import compare, fixed_temperatures, report_units
from .model import ProblemInstance, SequencePair, random_sequence_pair
from .packer import pack
from .results import RunRecord, write_results
from .rl.trainer import RLConfig, TrainingAborted, load_network, save_network, train
from .svg import render_svg

log = logging.getLogger("rlsa_floorplan")


class CLIError(Exception):
    pass


@dataclass
class ExperimentSpec:
    lattice: Optional[int] = None
    yal: Optional[str] = None
    fixed: Optional[str] = None
    sa: SAConfig = field(default_factory=SAConfig)
    rl: RLConfig = field(default_factory=RLConfig)
    runs: int = 10
    out: str = "out"
    auto_temp: bool = True

    def __post_init__(self):
        if self.runs < 1:
            raise CLIError("runs must be >= 1")

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        d = json.loads(Path(path).read_text())
        sa = d.pop("sa", {}) or {}
        if "move_probs" in sa:
            sa["move_probs"] = tuple(sa["move_probs"])
        return cls(sa=SAConfig(**sa), rl=RLConfig(**(d.pop("rl", {}) or {})), **d)

    def instance(self) -> ProblemInstance:
        if (self.lattice is None) == (self.yal is None):
            raise CLIError("give exactly one of --lattice N or --yal PATH (or --ami49)")
        if self.lattice is not None:
            inst = gen_lattice(self.lattice)
        else:
            if not Path(self.yal).is_file():
                raise CLIError(f"YAL file not found: {self.yal}")
            inst = load_yal(self.yal)
        if self.fixed:
            if not Path(self.fixed).is_file():
                raise CLIError(f"fixed config not found: {self.fixed}")
            inst = apply_fixed(inst, FixedConfig.from_json(self.fixed))
        return inst


def _add_common(p: argparse.ArgumentParser):
    src = p.add_argument_group("instance")
    src.add_argument("--spec", help="ExperimentSpec JSON; explicit flags override it")
    src.add_argument("--lattice", type=int, metavar="N", help="n x n lattice benchmark")
    src.add_argument("--yal", metavar="PATH", help="MCNC YAL benchmark file")
    src.add_argument("--ami49", action="store_true",
                     help="ami49: $RLSA_AMI49 if set, else the bundled synthetic stand-in")
    src.add_argument("--fixed", metavar="PATH", help="fixed-block JSON config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="DIR")
    sa = p.add_argument_group("annealing")
    sa.add_argument("--sa-steps", type=int)
    sa.add_argument("--t-max", type=float)
    sa.add_argument("--t-min", type=float)
    sa.add_argument("--auto-temp", action="store_true", help="estimate temperatures (default)")
    sa.add_argument("--rotate", action="store_true", help="enable the rotation move")
    rl = p.add_argument_group("reinforcement learning")
    rl.add_argument("--epochs", type=int)
    rl.add_argument("--r-steps", type=int)
    rl.add_argument("--s-steps", type=int)
    rl.add_argument("--gamma", type=float)
    rl.add_argument("--lambda", dest="lam", type=float)
    rl.add_argument("--clip", type=float)
    rl.add_argument("--lr", type=float)
    rl.add_argument("--global-reward-sign", choices=["improvement", "cost_increase"])
    rl.add_argument("--greedy-eval", action="store_true")
    p.add_argument("--runs", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def build_spec(args) -> ExperimentSpec:
    spec = ExperimentSpec.from_json(args.spec) if args.spec else ExperimentSpec()
    if args.ami49:
        args.yal = os.environ.get("RLSA_AMI49") or str(ami49_standin_path())
    if args.lattice is not None or args.yal is not None:
        spec.lattice, spec.yal = args.lattice, args.yal
    if args.fixed:
        spec.fixed = args.fixed
    if args.out:
        spec.out = args.out
    if args.runs is not None:
        spec.runs = args.runs
        spec.__post_init__()
    sa_kw = {}
    if args.sa_steps is not None:
        sa_kw["steps"] = args.sa_steps
    if args.t_max is not None or args.t_min is not None:
        if args.t_max is None or args.t_min is None:
            raise CLIError("--t-max and --t-min go together")
        sa_kw.update(t_max=args.t_max, t_min=args.t_min)
        spec.auto_temp = False
    if args.auto_temp:
        sa_kw.update(t_max=None, t_min=None)
        spec.auto_temp = True
    if args.rotate:
        sa_kw["rotation_enabled"] = True
    if args.seed is not None:
        sa_kw["seed"] = args.seed
    spec.sa = replace(spec.sa, **sa_kw)
    rl_kw = {k: v for k, v in (("epochs", args.epochs), ("r_steps", args.r_steps),
                               ("s_steps", args.s_steps), ("gamma", args.gamma),
                               ("gae_lambda", args.lam), ("clip_eps", args.clip),
                               ("learning_rate", args.lr), ("seed", args.seed)) if v is not None}
    if args.global_reward_sign:
        rl_kw["global_reward_sign"] = args.global_reward_sign
    if args.greedy_eval:
        rl_kw["greedy_eval"] = True
    spec.rl = replace(spec.rl, **rl_kw)
    return spec


def _seed(args, spec):
    return args.seed if args.seed is not None else spec.sa.seed


def _load_sp(path, inst) -> SequencePair:
    try:
        sp = SequencePair.from_dict(json.loads(Path(path).read_text()))
    except (OSError, KeyError, json.JSONDecodeError) as e:
        raise CLIError(f"cannot read sequence pair from {path}: {e}") from e
    sp.validate(inst)
    return sp


def _trace_csv(path: Path, trace):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "current_cost", "best_cost"])
        w.writerows(trace)


def cmd_pack(args, spec):
    inst = spec.instance()
    sp = _load_sp(args.sp_file, inst) if args.sp_file else random_sequence_pair(inst, _seed(args, spec))
    p = pack(inst, sp)
    c = cost(inst, p)
    print(json.dumps({"instance": inst.name, **c.to_dict(),
                      "bbox": [p.bbox_width, p.bbox_height]}))
    out = Path(spec.out)
    render_svg(inst, p, out / "pack.svg", c)
    (out / "pack_sp.json").write_text(json.dumps(sp.to_dict()))


def cmd_render(args, spec):
    inst = spec.instance()
    if not args.sp_file:
        raise CLIError("render needs --sp-file")
    sp = _load_sp(args.sp_file, inst)
    p = pack(inst, sp)
    path = render_svg(inst, p, args.svg or Path(spec.out) / "render.svg", title=args.title or "")
    print(path)


def _sa_config(inst, spec, seed):
    cfg = replace(spec.sa, seed=seed)
    if cfg.t_max is None:
        cfg = fixed_temperatures(inst, cfg, seed)
    return cfg


def cmd_sa(args, spec):
    inst = spec.instance()
    seed = _seed(args, spec)
    cfg = _sa_config(inst, spec, seed)
    init = random_sequence_pair(inst, seed)
    t0 = time.perf_counter()
    res = sa_run(inst, init, cfg)
    unit, scale = report_units(inst)
    rec = RunRecord(inst.name, "random_init", seed, cfg.steps, res.best_cost, res.trace,
                    time.perf_counter() - t0, unit, scale,
                    {"t_max": cfg.t_max, "t_min": cfg.t_min, "accepted": res.accepted_moves,
                     "best": res.best.to_dict()})
    out = Path(spec.out)
    write_results([rec], out / "sa_results")
    _trace_csv(out / "sa_trace.csv", res.trace)
    render_svg(inst, pack(inst, res.best), out / "sa_final.svg", res.best_cost, "SA")
    print(json.dumps({"instance": inst.name, **res.best_cost.to_dict(),
                      "reported": rec.reported_cost, "unit": unit, "seconds": rec.seconds}))


def cmd_train(args, spec):
    inst = spec.instance()
    out = Path(spec.out)
    net = opt = None
    start = 0
    scale = None
    if args.resume:
        saved = load_network(args.resume, inst)
        net, opt, start, scale = saved.net, saved.optimizer, saved.epochs_completed, saved.reward_scale
    sa_cfg = _sa_config(inst, spec, spec.rl.seed)
    try:
        report = train(inst, spec.rl, sa_cfg, net, opt, start, scale,
                       progress=lambda r: print(f"epoch {r.epoch}: before SA {r.init_cost:.6g}, "
                                                f"after SA {r.post_sa_cost:.6g}, reward {r.global_reward:.6g} "
                                                f"({r.seconds:.1f}s)", file=sys.stderr))
    except TrainingAborted as e:
        (out / "train_report.partial.json").parent.mkdir(parents=True, exist_ok=True)
        (out / "train_report.partial.json").write_text(json.dumps(e.report.to_dict(), indent=1))
        raise CLIError(str(e)) from e
    done = start + len(report.records)
    out.mkdir(parents=True, exist_ok=True)
    doc = report.to_dict()
    doc.update(instance=inst.name, sa={**asdict(sa_cfg)}, start_epoch=start, epochs_completed=done)
    (out / "train_report.json").write_text(json.dumps(doc, indent=1))
    save_network(args.network or out / "policy.json", report.net, inst, spec.rl, done,
                 report.reward_scale, report.optimizer)
    print(json.dumps({"instance": inst.name, "epochs_completed": done,
                      "network": str(args.network or out / "policy.json")}))


def cmd_compare(args, spec):
    inst = spec.instance()
    if not args.network:
        raise CLIError("compare needs --network PATH (from `train`)")
    try:
        saved = load_network(args.network, inst)
    except (OSError, ValueError) as e:
        raise CLIError(str(e)) from e
    seed = _seed(args, spec)
    # both arms anneal for s_steps unless --sa-steps says otherwise
    sa_cfg = replace(spec.sa, steps=args.sa_steps if args.sa_steps is not None else spec.rl.s_steps)
    result = compare(inst, saved.net, spec.runs, spec.rl.r_steps, sa_cfg, seed, spec.rl.greedy_eval)
    out = Path(spec.out)
    csv_path, _ = write_results(result.records, out / "compare")
    a, b = result.costs("rl_init"), result.costs("random_init")
    sign = {"instance": inst.name, "runs": result.runs, "rl_wins": result.wins,
            "rl_mean": float(a.mean()), "random_mean": float(b.mean()),
            "unit": result.records[0].unit,
            "paired_fair": all(ra.meta["sa_seed"] == rb.meta["sa_seed"] and
                               ra.meta["sa_steps"] == rb.meta["sa_steps"]
                               for ra, rb in zip(result.records[0::2], result.records[1::2]))}
    (out / "compare_sign.json").write_text(json.dumps(sign, indent=1))
    first_a, first_b = result.records[0], result.records[1]
    for rec in (first_a, first_b):
        sp = SequencePair.from_dict(rec.meta["best"])
        render_svg(inst, pack(inst, sp), out / f"compare_{rec.method}.svg", rec.final, rec.method)
    print(csv_path.read_text(), end="")
    print(json.dumps(sign))


COMMANDS = {"pack": cmd_pack, "sa": cmd_sa, "train": cmd_train, "compare": cmd_compare,
            "render": cmd_render}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rlsa-floorplan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
        if name in ("pack", "render"):
            p.add_argument("--sp-file", help="sequence pair JSON {gamma_plus, gamma_minus}")
        if name == "render":
            p.add_argument("--svg", help="output SVG path")
            p.add_argument("--title")
        if name in ("train", "compare"):
            p.add_argument("--network", help="policy JSON (output for train, input for compare)")
        if name == "train":
            p.add_argument("--resume", help="continue training from a saved policy JSON")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = build_spec(args)
        COMMANDS[args.command](args, spec)
    except (CLIError, YALParseError, FixedConfigError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
