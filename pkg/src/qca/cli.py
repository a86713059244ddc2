"""Command-line interface.

Exit codes: 0 success, 1 computation failure, 2 usage error.  Every flag is
validated before any computation starts.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from qca import channels as ch
from qca import envsim as es
from qca import geometry as geo
from qca.errors import DomainError, QcaError
from qca.validation import run_all
from qca.voxels import DEFAULT_MEMORY_CAP, check_memory

SCHEMA = geo.SCHEMA
MIN_VOLUME_SAMPLES = 10_000
GRID_RANGE = (50, 1000)


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc


def _default_seed() -> int:
    raw = os.environ.get("QCA_SEED")
    if raw is None:
        return 0
    try:
        return _nonneg_int(raw)
    except argparse.ArgumentTypeError:
        raise UsageError(f"QCA_SEED must be a nonnegative integer, got {raw!r}") from None


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _pos_int(text: str) -> int:
    v = _nonneg_int(text)
    if v == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return v


def _add_sampling(p: argparse.ArgumentParser, samples: int, grid: int | None = 200) -> None:
    p.add_argument("--samples", type=_nonneg_int, default=samples)
    if grid is not None:
        p.add_argument("--grid", type=_pos_int, default=grid, help="voxels per axis")
    p.add_argument("--seed", type=_nonneg_int, default=None, help="defaults to $QCA_SEED or 0")
    p.add_argument("--workers", type=_pos_int, default=1)
    p.add_argument("--mem-cap", type=_pos_int, default=DEFAULT_MEMORY_CAP, help="voxel bitset budget in bytes")
    p.add_argument("--proposal", choices=sorted(geo.PROPOSALS), default=geo.DEFAULT_PROPOSAL)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qca",
        description="Qubit channels from small environments: affine maps, GAD, and channel-volume geometry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("affine", help="affine map of the single-qubit-environment channel")
    for name in ("alpha", "beta", "gamma", "xi", "eta"):
        p.add_argument(f"--{name}", type=_finite, default=0.0)
    p.add_argument("--lambda", dest="lam", type=_finite, default=0.0)
    p.add_argument("--degrees", action="store_true", help="angles are given in degrees")
    p.add_argument("--canonical", action="store_true", help="require canonical-form output (needs alpha == gamma)")
    p.add_argument("--out", default=None)

    p = sub.add_parser("gad", help="generalized amplitude damping channel report")
    p.add_argument("--eps0", type=_finite, required=True)
    p.add_argument("--eps2", type=_finite, required=True)
    p.add_argument("--gamma0", type=_finite, required=True)
    p.add_argument("--gamma2", type=_finite, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("volume", help="volume estimate of a channel region")
    p.add_argument("region", choices=("gad", "single-env"))
    _add_sampling(p, samples=10_000_000)
    p.add_argument("--subsample", type=_pos_int, default=1, help="probe points per cell edge (single-env)")

    p = sub.add_parser("ratio", help="single-env volume over GAD volume")
    _add_sampling(p, samples=10_000_000)

    p = sub.add_parser("containment", help="fraction of single-env points inside the GAD occupancy")
    _add_sampling(p, samples=100_000)
    p.add_argument("--gad-samples", type=_nonneg_int, default=10_000_000)

    p = sub.add_parser("cloud", help="export a point cloud of a region")
    p.add_argument("region", choices=("gad", "single-env"))
    _add_sampling(p, samples=50_000, grid=None)
    p.add_argument("--format", choices=("csv", "json"), default=None, help="defaults from --out suffix, else csv")

    p = sub.add_parser("validate", help="run randomised property checks")
    p.add_argument("--draws", type=_pos_int, default=200)
    p.add_argument("--seed", type=_nonneg_int, default=None)
    return parser


# ---------------------------------------------------------------------------
# argument validation (no computation)


def _check_grid(args) -> None:
    lo, hi = GRID_RANGE
    if not lo <= args.grid <= hi:
        raise UsageError(f"--grid must lie in [{lo}, {hi}], got {args.grid}")
    try:
        check_memory(args.grid, args.mem_cap)
    except DomainError as exc:
        raise UsageError(f"--grid {args.grid}: {exc}") from None


def _check_volume_samples(flag: str, n: int) -> None:
    if n < MIN_VOLUME_SAMPLES:
        raise UsageError(f"{flag} must be >= {MIN_VOLUME_SAMPLES}, got {n}")


def _env_params(args) -> es.EnvParams:
    conv = math.radians if args.degrees else float
    try:
        return es.EnvParams(
            conv(args.alpha), conv(args.beta), conv(args.gamma), args.lam, conv(args.xi), conv(args.eta)
        )
    except DomainError as exc:
        raise UsageError(f"--lambda: {exc}") from None


def _gad_params(args) -> ch.GadParams:
    try:
        return ch.GadParams(args.eps0, args.eps2, args.gamma0, args.gamma2)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _prepare(args) -> None:
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    cmd = args.command
    if cmd == "affine":
        args.params = _env_params(args)
        if args.canonical and abs(args.params.alpha - args.params.gamma) > 1e-12:
            raise UsageError("alpha must equal gamma for --canonical")
    elif cmd == "gad":
        args.params = _gad_params(args)
    elif cmd == "volume":
        _check_grid(args)
        if args.region == "gad":
            _check_volume_samples("--samples", args.samples)
    elif cmd == "ratio":
        _check_grid(args)
        _check_volume_samples("--samples", args.samples)
    elif cmd == "containment":
        _check_grid(args)
        _check_volume_samples("--gad-samples", args.gad_samples)
        if args.samples < 1:
            raise UsageError("--samples must be >= 1")
    elif cmd == "cloud" and args.samples < 1:
        raise UsageError("--samples must be >= 1")


# ---------------------------------------------------------------------------
# commands


def cmd_affine(args) -> int:
    rep = es.report(args.params, canonical=True if args.canonical else None)
    _emit(_dump({"schema": SCHEMA, "kind": "affine", **rep}), args.out)
    return 0


def cmd_gad(args) -> int:
    p = args.params
    k = ch.gad(p)
    affine = ch.gad_affine_closed(p)
    _, defect = ch.is_trace_preserving(k)
    _, min_eig = ch.choi_psd_check(k)
    doc = {
        "schema": SCHEMA,
        "kind": "gad",
        "params": {"eps0": p.eps0, "eps2": p.eps2, "gamma0": p.gamma0, "gamma2": p.gamma2},
        **ch.channel_to_dict(k, affine),
        "trace_defect": defect,
        "choi_min_eigenvalue": min_eig,
        "point": list(geo.gad_point(p)),
    }
    _emit(_dump(doc), args.out)
    return 0


def cmd_volume(args) -> int:
    if args.region == "gad":
        rec = geo.gad_volume_estimate(args.samples, args.grid, args.seed, args.workers, args.proposal, args.mem_cap)
    else:
        rec = geo.single_env_volume_estimate(args.grid, args.subsample, args.mem_cap)
    _emit(_dump(rec), args.out)
    return 0


def cmd_ratio(args) -> int:
    rec = geo.volume_ratio(args.samples, args.grid, args.seed, args.workers, args.proposal, args.mem_cap)
    _emit(_dump(rec), args.out)
    return 0


def cmd_containment(args) -> int:
    rec = geo.containment_check(
        args.samples,
        args.grid,
        args.seed,
        gad_samples=args.gad_samples,
        workers=args.workers,
        proposal=args.proposal,
        memory_cap=args.mem_cap,
    )
    _emit(_dump(rec), args.out)
    return 0


def cmd_cloud(args) -> int:
    if args.region == "gad":
        cloud = geo.gad_cloud(args.samples, args.seed, args.workers, args.proposal)
    else:
        cloud = geo.single_env_cloud(args.samples, args.seed, args.workers)
    fmt = args.format or ("json" if (args.out or "").endswith(".json") else "csv")
    if args.out is None:
        sys.stdout.write(geo.cloud_to_csv(cloud) if fmt == "csv" else geo.cloud_to_json(cloud) + "\n")
    else:
        geo.export_cloud(cloud, args.out, fmt)
    return 0


def cmd_validate(args) -> int:
    results = run_all(args.draws, args.seed)
    for r in results:
        print(r.line())
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


COMMANDS = {
    "affine": cmd_affine,
    "gad": cmd_gad,
    "volume": cmd_volume,
    "ratio": cmd_ratio,
    "containment": cmd_containment,
    "cloud": cmd_cloud,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _prepare(args)
    except UsageError as exc:
        parser.error(str(exc))
    try:
        return COMMANDS[args.command](args)
    except (QcaError, ArithmeticError, OSError) as exc:
        print(f"qca: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
