import argparse
import json
import logging
import math
import os
import sys
import time
import numpy as np
import pandas as pd
import QInterference
from QInterference import Channels
from QInterference import Conditions
from QInterference import DistSampler
from QInterference import Entropy
from QInterference import Errors
from QInterference import Geometry
from QInterference import Parallel
from QInterference import Regions
from QInterference import SelfTest
from QInterference import SimDec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
FLOAT_FORMAT = "%.12g"


class RunManifest:
    def __init__(self, command, params, seed=None):
        """Record of one CLI run written next to every output file."""
        self.command = command
        self.params = params
        self.seed = seed
        self.version = QInterference.__version__
        self.started = time.time()

    def to_dict(self):
        return {"command": self.command, "params": self.params, "seed": self.seed, "version": self.version,
                "wall_time": round(time.time() - self.started, 3)}

    def write_next_to(self, path):
        with open(manifest_path(path), "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True, default=str)


def params_of(args):
    return dict((k, v) for k, v in vars(args).items() if k != "func")


def manifest_path(path):
    return os.path.splitext(path)[0] + ".manifest.json"


def write_csv(frame, path, manifest):
    """Writes frame with a header row and 12 significant digits, plus the adjacent manifest."""
    folder = os.path.dirname(path)
    if folder and not os.path.isdir(folder):
        os.makedirs(folder)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    manifest.write_next_to(path)
    logger.debug("Wrote %s", path)


def write_json(obj, path, manifest):
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
    manifest.write_next_to(path)


def constant_channel():
    """Interference channel whose output is |00> whatever the inputs."""
    state = np.zeros((4, 4))
    state[0, 0] = 1.0
    return Channels.CcqqChannel((2, 2), (2, 2), lambda index: state)


def builtin_channel(spec):
    """theta-swap:<radians>, bb84 or constant."""
    name, _, arg = spec.partition(":")
    if name == "theta-swap":
        try:
            theta = float(arg)
        except ValueError:
            raise ValueError("theta-swap needs an angle, e.g. theta-swap:1.2, got " + repr(spec))
        return Channels.theta_swap(theta)
    if name == "bb84" and not arg:
        return Channels.bb84_cccq()
    if name == "constant" and not arg:
        return constant_channel()
    raise ValueError("Unknown builtin channel " + repr(spec) + " (builtins: theta-swap:<radians>, bb84, constant)")


def load_any(args):
    if args.channel is not None and args.builtin is not None:
        raise ValueError("Give either --channel or --builtin, not both")
    if args.channel is not None:
        return Channels.load_channel(args.channel)
    if args.builtin is not None:
        return builtin_channel(args.builtin)
    raise ValueError("A channel is required (--channel FILE or --builtin NAME)")


def as_mac(ch, receiver):
    if isinstance(ch, Channels.CcqMac):
        return ch
    return Channels.induced_mac(ch, receiver)


def as_ic(ch):
    if not isinstance(ch, Channels.CcqqChannel):
        raise ValueError("This command needs an interference (ccqq) channel, got " + repr(ch))
    return ch


def parse_dist(text, size, name):
    try:
        p = np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise ValueError(name + " must be comma-separated probabilities, got " + repr(text))
    if p.size != size or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(name + " must be a probability vector of length " + str(size) + ", got " + repr(text))
    return p


def input_dists(args, alphabets):
    out = []
    for k, a in enumerate(alphabets):
        text = getattr(args, "p" + str(k + 1))
        out.append(DistSampler.uniform(a) if text is None or args.uniform else parse_dist(text, a, "--p" + str(k + 1)))
    return out


def sampler_from(args):
    if args.samples is not None:
        return DistSampler.RandomSampler(args.samples, args.seed)
    return DistSampler.GridSampler(args.grid_step)


def parse_ints(text):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise ValueError("Expected comma-separated integers, got " + repr(text))


def split_pairs(step):
    grid = Regions.split_grid(step)
    return [(a, b) for a in grid for b in grid]


def points_frame(points):
    return pd.DataFrame([p.to_dict() for p in points], columns=["label", "R1", "R2"])


def cmd_entropy(args):
    ch = load_any(args)
    dists = input_dists(args, ch.alphabets)
    if isinstance(ch, Channels.CcqMac):
        table = Entropy.information_table(ch.ensemble(*dists))
    else:
        table = {}
        table.update(Entropy.information_table(ch.ensemble(dists[0], dists[1], receiver=1), "B1"))
        table.update(Entropy.information_table(ch.ensemble(dists[0], dists[1], receiver=2), "B2"))
        table.update(Entropy.information_table(ch.ensemble(dists[0], dists[1]), "B1B2"))
    table = dict((k, float(v)) for k, v in table.items())
    if args.out:
        write_json(table, args.out, RunManifest("entropy", params_of(args)))
    print(json.dumps(table, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_check_interference(args):
    ch = as_ic(load_any(args))
    report = Conditions.check_condition(ch, args.mode, args.grid_step, not args.no_refine, args.samples, args.seed)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def region_output(args, ch):
    """Returns (frame, metadata) for the requested region method."""
    method = args.method
    if method in ("gauss-sd-rs", "gauss-hk"):
        ic = gaussian_from(args)
        if method == "gauss-sd-rs":
            return points_frame(Regions.gaussian_sd_rs(ic, split_pairs(args.split_step))), ic.to_dict()
        region = Regions.gaussian_hk(ic, split_pairs(args.split_step))
        return region.to_frame(), region.metadata
    if ch is None:
        raise ValueError("Region method " + method + " needs a channel")
    dists = input_dists(args, ch.alphabets)
    if method == "mac2":
        region = Geometry.to_region2d(Regions.mac2_system(as_mac(ch, args.receiver), dists[0], dists[1]))
        return region.to_frame(), {"region": "mac2"}
    if method in ("mac3", "min-entropy"):
        if not (isinstance(ch, Channels.CcqMac) and len(ch.alphabets) == 3):
            raise ValueError("Region method " + method + " needs a three-sender MAC")
        if method == "mac3":
            sys3 = Regions.mac3_system(ch, *dists)
        else:
            perm = args.perm.split(",") if args.perm else None
            sys3 = Regions.minentropy3_system(ch, dists[0], dists[1], dists[2], perm)
        return sys3.to_frame(), sys3.to_dict()
    ch = as_ic(ch)
    if method == "sd-points":
        return points_frame(Regions.sd_points(ch, dists[0], dists[1])), {"region": "sd-points"}
    sampler = sampler_from(args)
    if method == "sim-inner":
        region = Regions.sim_inner_bound(ch, sampler)
    elif method == "vsi":
        region = Regions.vsi_capacity(ch, sampler, grid_step=args.check_step)
    elif method == "strong":
        region = Regions.strong_capacity(ch, sampler, grid_step=args.check_step)
    elif method == "hk":
        region = Regions.hk_inner_bound(ch, sampler, args.random_inputs, args.seed)
    elif method == "sato":
        region = Regions.sato_outer(ch, sampler)
    else:
        raise ValueError("Unknown region method " + method)
    return region.to_frame(), region.metadata


def cmd_region(args):
    gaussian = args.method.startswith("gauss-")
    ch = None if gaussian else load_any(args)
    frame, metadata = region_output(args, ch)
    params = dict(params_of(args), metadata=metadata)
    write_csv(frame, args.out, RunManifest("region", params, args.seed))
    return EXIT_OK


def cmd_sweep_theta(args):
    if args.step <= 0:
        raise ValueError("--step must be positive")
    count = int(math.floor((args.to - args.start) / args.step + 1e-9)) + 1
    thetas = [round(args.start + k * args.step, 12) for k in range(max(count, 0))]
    sampler = sampler_from(args)
    manifest = RunManifest("sweep-theta", params_of(args), args.seed)
    builder = Regions.vsi_capacity if args.mode == "very-strong" else Regions.strong_capacity
    rows = []
    for theta in thetas:
        ch = Channels.theta_swap(theta)
        report = Conditions.check_condition(ch, args.mode, args.check_step)
        row = {"theta": theta, "holds": bool(report.holds), "min_slack": report.min_slack, "max_r1": math.nan,
               "max_r2": math.nan, "max_sum": math.nan}
        if report.holds:
            region = builder(ch, sampler, report=report)
            row.update(max_r1=region.max_r1(), max_r2=region.max_r2(), max_sum=region.max_sum())
            write_csv(region.to_frame(), os.path.join(args.out_dir, "theta_" + format(theta, ".4f") + ".csv"),
                      manifest)
        rows.append(row)
    summary = pd.DataFrame(rows, columns=["theta", "holds", "min_slack", "max_r1", "max_r2", "max_sum"])
    write_csv(summary, os.path.join(args.out_dir, "summary.csv"), manifest)
    for theta, kind in Conditions.crossings(summary):
        logger.info("Condition %s at theta=%g", "starts" if kind == "enter" else "ends", theta)
    return EXIT_OK


def gaussian_from(args):
    return Channels.GaussianIc(args.snr1, args.snr2, args.inr1, args.inr2)


def cmd_gaussian(args):
    ic = gaussian_from(args)
    splits = split_pairs(args.split_step)
    manifest = RunManifest("gaussian", params_of(args))
    mac1, mac2 = Regions.gaussian_mac_regions(ic)
    hk = Regions.gaussian_hk(ic, splits)
    sd_rs = Regions.gaussian_sd_rs(ic, splits)
    sd = Regions.gaussian_sd_points(ic)
    out = args.out_dir
    write_csv(mac1.to_frame(), os.path.join(out, "mac1.csv"), manifest)
    write_csv(mac2.to_frame(), os.path.join(out, "mac2.csv"), manifest)
    write_csv(hk.to_frame(), os.path.join(out, "hk.csv"), manifest)
    write_csv(points_frame(sd_rs), os.path.join(out, "sd_rs.csv"), manifest)
    write_csv(points_frame(sd), os.path.join(out, "sd_points.csv"), manifest)
    worst = max((hk.distance_to(p.coords) for p in sd_rs), default=0.0)
    sd_rs_hull = Geometry.RateRegion2D.from_points([p.coords for p in sd_rs])
    summary = {
        "params": ic.to_dict(),
        "splits": len(splits),
        "sd_rs_in_hk": worst <= 1e-6,
        "sd_rs_distance": worst,
        "frontier_gap": Regions.frontier_gap(hk, sd_rs_hull),
        "time_sharing": "none",
    }
    write_json(summary, os.path.join(out, "summary.json"), manifest)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK if summary["sd_rs_in_hk"] else EXIT_FAILURE


def cmd_simulate(args):
    ch = load_any(args)
    mac = as_mac(ch, args.receiver)
    dists = input_dists(args, mac.alphabets)
    exp = SimDec.DecoderExperiment(mac, dists[0], dists[1], parse_ints(args.n), args.delta,
                                   rate_frac=args.rate_frac, trials=args.trials, seed=args.seed)
    curve = SimDec.run_experiment(exp)
    write_csv(curve, args.out, RunManifest("simulate", dict(params_of(args), rates=list(exp.rates)), args.seed))
    print(curve.to_csv(index=False, float_format=FLOAT_FORMAT), end="")
    return EXIT_OK


def cmd_selftest(args):
    names = list(SelfTest.SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        reports.extend(SelfTest.run_suite(name, seed=args.seed))
    for r in reports:
        print(("PASS " if r.passed else "FAIL ") + r.name + " (" + str(r.trials) + " trials, min slack "
              + format(r.min_slack, ".3g") + ")")
    if args.junit:
        SelfTest.write_junit(reports, args.junit)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILURE


def cmd_export_channel(args):
    if args.builtin is None:
        raise ValueError("export-channel needs --builtin NAME")
    Channels.save_channel(builtin_channel(args.builtin), args.out)
    return EXIT_OK


def _channel_flags(p):
    p.add_argument("--channel", help="channel JSON file")
    p.add_argument("--builtin", help="theta-swap:<radians>, bb84 or constant")


def _dist_flags(p):
    p.add_argument("--uniform", action="store_true", help="uniform input distributions (the default)")
    p.add_argument("--p1")
    p.add_argument("--p2")
    p.add_argument("--p3")


def _sampler_flags(p):
    p.add_argument("--grid-step", type=float, default=0.05, help="input distribution grid step")
    p.add_argument("--samples", type=int, help="use this many random input distributions instead of a grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-step", type=float, default=0.02, help="grid step of the interference condition check")


def _gaussian_flags(p):
    p.add_argument("--snr1", type=float, default=1.7)
    p.add_argument("--snr2", type=float, default=2.0)
    p.add_argument("--inr1", type=float, default=3.4)
    p.add_argument("--inr2", type=float, default=4.0)
    p.add_argument("--split-step", type=float, default=0.1, help="grid step of the common power fractions")


def build_parser():
    parser = argparse.ArgumentParser(prog="qic", description="Rate regions and decoders for quantum interference "
                                                             "channels.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="all entropies and informations of a channel at given inputs")
    _channel_flags(p)
    _dist_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("check-interference", help="very strong / strong interference condition check")
    _channel_flags(p)
    p.add_argument("--mode", choices=sorted(Conditions.SLACKS), default="very-strong")
    p.add_argument("--grid-step", type=float, default=0.02)
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_interference)

    p = sub.add_parser("region", help="compute one rate region")
    _channel_flags(p)
    _dist_flags(p)
    _sampler_flags(p)
    _gaussian_flags(p)
    p.add_argument("--method", required=True, choices=["mac2", "mac3", "min-entropy", "sim-inner", "vsi", "strong",
                                                       "hk", "sato", "sd-points", "gauss-sd-rs", "gauss-hk"])
    p.add_argument("--receiver", type=int, choices=[1, 2], default=1)
    p.add_argument("--perm", help="min-entropy role order, e.g. Y,X,Z")
    p.add_argument("--random-inputs", type=int, default=4, help="random HK splits per sampled distribution")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("sweep-theta", help="capacity regions of the theta-SWAP channel over a range of angles")
    _sampler_flags(p)
    p.add_argument("--from", dest="start", type=float, default=1.5708)
    p.add_argument("--to", type=float, default=2.18)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--mode", choices=sorted(Conditions.SLACKS), default="very-strong")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_sweep_theta)

    p = sub.add_parser("gaussian", help="Gaussian interference channel regions and successive decoding points")
    _gaussian_flags(p)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("simulate", help="Monte Carlo error of the simultaneous decoder")
    _channel_flags(p)
    _dist_flags(p)
    p.add_argument("--receiver", type=int, choices=[1, 2], default=1)
    p.add_argument("--n", default="4,6,8,10")
    p.add_argument("--rate-frac", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("selftest", help="randomized property suites")
    p.add_argument("--suite", choices=sorted(SelfTest.SUITES) + ["all"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--junit", help="write a JUnit-style XML report here")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("export-channel", help="write a builtin channel as channel JSON")
    p.add_argument("--builtin", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_channel)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        Parallel.set_workers(os.environ.get("QIC_THREADS", "1"))
        return args.func(args)
    except (Errors.PropertyFailure, Errors.PreconditionError, Errors.ConvergenceError) as err:
        logger.error("%s", err)
        return EXIT_FAILURE
    except Errors.BudgetError as err:
        logger.error("%s", err)
        return EXIT_BUDGET
    except (ValueError, OSError) as err:
        logger.error("%s", err)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
