"""Command-line interface: ``adpurify <command> [flags]``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import experiments as ex
from .channels import choi_of
from .protocols import (
    compensation_filter,
    estimate_gamma,
    purify_pair_one_ancilla,
    purify_pair_two_ancilla,
    purify_state,
)
from .qcore import BranchEnsemble, PureState, fidelity_to_pure
from .sampling import DEFAULT_SEED, Distribution, Kind, SampleSpec, sample_state, sample_unitary_channel


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def _unit_interval(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{value} is outside [0, 1]")
    return value


def _open_interval(text: str) -> float:
    value = _unit_interval(text)
    if value in (0.0, 1.0):
        raise argparse.ArgumentTypeError(f"{value} must lie strictly inside (0, 1)")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} must be at least 1")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _complexes(values) -> list[list[float]]:
    return [[float(np.real(v)), float(np.imag(v))] for v in np.asarray(values).reshape(-1)]


def _ensemble_json(ens: BranchEnsemble | None):
    if ens is None:
        return None
    return [
        {"weight": b.weight, "kraus_word": list(b.kraus_word), "state": _complexes(b.state.amplitudes)}
        for b in ens.branches
    ]


def _reports_json(reports) -> list[dict]:
    return [
        {
            "outcome": r.outcome_label,
            "probability": r.probability,
            "fidelity_before": r.fidelity_before,
            "fidelity_after": r.fidelity_after,
            "purified": _ensemble_json(r.purified),
        }
        for r in reports.values()
    ]


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, allow_nan=False))


def cmd_purify_state(args) -> int:
    alpha = args.alpha
    if args.beta is None:
        if abs(alpha) > 1:
            raise ValueError("|alpha| must not exceed 1")
        beta = math.sqrt(1 - alpha * alpha)
    else:
        beta = args.beta
    if abs(alpha * alpha + beta * beta - 1) > 1e-9:
        raise ValueError(f"alpha^2 + beta^2 = {alpha * alpha + beta * beta:.12g}, expected 1")
    psi = PureState(np.array([alpha, beta])).normalized()
    reports = purify_state(psi, args.gamma)
    out = {
        "protocol": "state_1q",
        "gamma": args.gamma,
        "input": _complexes(psi.amplitudes),
        "outcomes": _reports_json(reports),
    }
    kept = reports["0"].purified
    if args.compensate and kept is not None and args.gamma < 1:
        fixed = compensation_filter(kept.branches[0].state, args.gamma)
        out["compensated"] = {
            "state": _complexes(fixed.amplitudes),
            "fidelity": fidelity_to_pure(psi, BranchEnsemble.pure(fixed)),
        }
    _emit(out)
    return 0


def _pair_runner(ancillas: int):
    return purify_pair_one_ancilla if ancillas == 1 else purify_pair_two_ancilla


def cmd_purify_channel(args) -> int:
    spec = SampleSpec(Kind.UNITARY_CHANNEL, Distribution.HAAR_COMPLEX, args.seed)
    channel = sample_unitary_channel(spec, args.index)
    choi = choi_of(channel)
    reports = _pair_runner(args.ancillas)(choi.state, args.gamma)
    _emit(
        {
            "protocol": "channel_1anc" if args.ancillas == 1 else "pair_2anc",
            "gamma": args.gamma,
            "seed": args.seed,
            "index": args.index,
            "unitary": [_complexes(row) for row in channel.ops[0]],
            "choi_state": _complexes(choi.state.amplitudes),
            "outcomes": _reports_json(reports),
        }
    )
    return 0


def cmd_purify_pair(args) -> int:
    if args.amplitudes is not None:
        amps = np.array([complex(x) for x in args.amplitudes.split(",")])
        if amps.size != 4:
            raise ValueError("--amplitudes needs four comma-separated values")
        psi = PureState(amps).normalized()
    else:
        psi = sample_state(SampleSpec(Kind.TWO_QUBIT_STATE, args.dist, args.seed), args.index)
    reports = _pair_runner(args.ancillas)(psi, args.gamma)
    _emit(
        {
            "protocol": "channel_1anc" if args.ancillas == 1 else "pair_2anc",
            "gamma": args.gamma,
            "input": _complexes(psi.amplitudes),
            "outcomes": _reports_json(reports),
        }
    )
    return 0


def cmd_estimate_gamma(args) -> int:
    est, se = estimate_gamma(args.gamma_true, args.shots, np.random.default_rng(args.seed))
    print(f"{est:.6f} ± {se:.6f}  (shots={args.shots}, seed={args.seed})")
    return 0


def _spec_for(protocol: str, seed: int, dist: str | None) -> SampleSpec:
    spec = ex.default_spec(protocol, seed)
    if dist is None:
        return spec
    return SampleSpec(spec.kind, dist, seed)


def cmd_sweep(args) -> int:
    if args.gamma_max <= args.gamma_min and args.steps > 1:
        raise ValueError("--gamma-max must exceed --gamma-min")
    config = ex.SweepConfig(
        args.protocol,
        ex.default_grid(args.steps, args.gamma_min, args.gamma_max),
        args.samples,
        _spec_for(args.protocol, args.seed, args.dist),
        args.label,
    )
    rows = ex.run_sweep(config)
    if args.out is None:
        sys.stdout.write(ex.format_rows(rows))
    else:
        n = ex.write_rows(rows, args.out)
        print(f"wrote {n} bytes to {args.out} (seed={args.seed})", file=sys.stderr)
    return 0


def cmd_critical_point(args) -> int:
    config = ex.SweepConfig(
        args.protocol,
        samples_per_point=args.samples,
        sample_spec=_spec_for(args.protocol, args.seed, args.dist),
        post_select_label=args.label,
    )
    g = ex.critical_gamma(config, args.threshold)
    print(f"{g:.6f}")
    return 0


def cmd_reproduce(args) -> int:
    config = ex.figure_config(args.figure, args.seed, args.samples)
    rows = ex.run_sweep(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"figure{args.figure}.csv"
    ex.write_rows(rows, path)
    print(f"figure {args.figure} ({config.protocol}): {len(rows)} rows, seed={args.seed} -> {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adpurify", description="Post-selection purification of amplitude-damping noise.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("purify-state", help="purify a single-qubit state alpha|0> + beta|1>")
    p.add_argument("--gamma", type=_unit_interval, required=True, help="damping probability in [0, 1]")
    p.add_argument("--alpha", type=float, required=True, help="amplitude of |0>")
    p.add_argument("--beta", type=float, default=None, help="amplitude of |1> (default sqrt(1 - alpha^2))")
    p.add_argument("--compensate", action="store_true", help="also apply the compensation filter to outcome 0")
    p.set_defaults(func=cmd_purify_state)

    p = sub.add_parser("purify-channel", help="purify the Choi state of a Haar-random unitary channel")
    p.add_argument("--gamma", type=_unit_interval, required=True, help="damping probability in [0, 1]")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help=f"sampling seed (default {DEFAULT_SEED})")
    p.add_argument("--index", type=int, default=0, help="sample index under the seed (default 0)")
    p.add_argument("--ancillas", type=int, choices=(1, 2), default=1, help="one shared or two separate ancillas")
    p.set_defaults(func=cmd_purify_channel)

    p = sub.add_parser("purify-pair", help="purify a two-qubit state")
    p.add_argument("--gamma", type=_unit_interval, required=True, help="damping probability in [0, 1]")
    p.add_argument("--amplitudes", default=None, help="four comma-separated (complex) amplitudes, e.g. 1,0,0,1")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="seed used when --amplitudes is absent")
    p.add_argument("--index", type=int, default=0, help="sample index under the seed (default 0)")
    p.add_argument("--dist", choices=("haar_real", "haar_complex"), default="haar_real", help="sampling distribution")
    p.add_argument("--ancillas", type=int, choices=(1, 2), default=2, help="one shared or two separate ancillas")
    p.set_defaults(func=cmd_purify_pair)

    p = sub.add_parser("estimate-gamma", help="estimate gamma from simulated ancilla shots on input |1>")
    p.add_argument("--gamma-true", type=_unit_interval, required=True, help="true damping probability")
    p.add_argument("--shots", type=_positive_int, required=True, help="number of shots")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    p.set_defaults(func=cmd_estimate_gamma)

    dists = [d.value for d in Distribution]
    for name, helptext in (
        ("sweep", "Monte Carlo sweep over gamma, written as CSV"),
        ("critical-point", "gamma where the mean purified fidelity drops to a threshold"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--protocol", choices=ex.PROTOCOLS, required=True, help="which purification circuit")
        p.add_argument("--samples", type=_positive_int, default=1000, help="samples per gamma (default 1000)")
        p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help=f"sampling seed (default {DEFAULT_SEED})")
        p.add_argument("--dist", choices=dists, default=None, help="input distribution (default depends on protocol)")
        p.add_argument("--label", default=None, help="post-selected ancilla outcome (default all zeros)")
        if name == "sweep":
            p.add_argument("--gamma-min", type=_unit_interval, default=0.0, help="first grid point (default 0)")
            p.add_argument("--gamma-max", type=_unit_interval, default=0.5, help="last grid point (default 0.5)")
            p.add_argument("--steps", type=_positive_int, default=51, help="number of grid points (default 51)")
            p.add_argument("--out", default=None, help="CSV path (default stdout)")
            p.set_defaults(func=cmd_sweep)
        else:
            p.add_argument("--threshold", type=_open_interval, default=0.99, help="fidelity threshold (default 0.99)")
            p.set_defaults(func=cmd_critical_point)

    p = sub.add_parser("reproduce", help="write the data behind one of the fidelity/probability figures")
    p.add_argument("--figure", type=int, choices=sorted(ex.FIGURES), required=True,
                   help="4: single qubit, 5: channel with one ancilla, 6: two ancillas")
    p.add_argument("--out", default=".", help="output directory (default .)")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help=f"sampling seed (default {DEFAULT_SEED})")
    p.add_argument("--samples", type=_positive_int, default=1000, help="samples per gamma (default 1000)")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ex.worker_count()
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"adpurify {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
