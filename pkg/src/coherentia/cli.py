"""Command-line entry points.

Three executables share this module: ``coherence`` (measures and channel
verification), ``duality`` (interferometer objective, outer search, bound
certification), and ``norm-factor`` (normalization constant of the
trace-distance measure).  Every command prints single-line canonical JSON
and honors --seed for bit-reproducible output.

Exit codes: 0 success, 1 input/usage error, 2 computed but not converged.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, serialization
from .duality import (
    FULL_COMPLEX,
    REAL_RESTRICTED,
    DualitySearchConfig,
    certify_bound,
    evaluate_point,
    maximize_duality,
    objective,
)
from .interferometer import InterferometerConfig
from .measures import (
    OptConfig,
    ctr,
    minimal_completion_measure,
    normalization_factor,
)
from .resource import is_free_state, verify_class1, verify_class2

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one CLI invocation."""

    command: str
    inputs: tuple[str, ...]
    master_seed: int
    tool_version: str = __version__
    wall_time: float = 0.0
    outputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": list(self.inputs),
            "master_seed": self.master_seed,
            "tool_version": self.tool_version,
            "wall_time": self.wall_time,
            "outputs": self.outputs,
        }


def _emit(payload: dict) -> None:
    print(serialization.dumps(payload))


def _fail(message: str) -> int:
    print(json.dumps({"error": message}), file=sys.stderr)
    return EXIT_INPUT_ERROR


def _load(path: str, parser):
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    return parser(serialization.load_path(path))


def _opt_config(args) -> OptConfig:
    return OptConfig(restarts=args.restarts, seed=args.seed)


# ---------------------------------------------------------------- coherence


def cmd_ctr(args) -> int:
    try:
        basis = _load(args.basis, serialization.basis_from_dict)
        rho = _load(args.state, serialization.matrix_from_dict)
        result = ctr(basis, rho, _opt_config(args))
    except (ValueError, FileNotFoundError, KeyError) as exc:
        return _fail(str(exc))
    _emit(
        {
            "value": result.value,
            "converged": result.converged,
            "restarts_used": result.restarts_used,
            "iterations": result.iterations,
        }
    )
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_min_completion(args) -> int:
    try:
        basis = _load(args.basis, serialization.basis_from_dict)
        rho = _load(args.state, serialization.matrix_from_dict)
        result = minimal_completion_measure(
            basis, rho, seed_measure=args.measure, cfg=_opt_config(args)
        )
    except (ValueError, FileNotFoundError, KeyError) as exc:
        return _fail(str(exc))
    _emit({"value": result.value, "measure": args.measure, "converged": result.converged})
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_verify_channel(args) -> int:
    try:
        basis = _load(args.basis, serialization.basis_from_dict)
        channel = _load(args.channel, serialization.channel_from_dict)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        return _fail(str(exc))
    r1 = verify_class1(basis, channel)
    r2 = verify_class2(basis, channel)
    _emit(
        {
            "class1": bool(r1),
            "class2": bool(r2),
            "defects": {"class1": r1.defects, "class2": r2.defects},
        }
    )
    return EXIT_OK


def cmd_free_check(args) -> int:
    try:
        basis = _load(args.basis, serialization.basis_from_dict)
        rho = _load(args.state, serialization.matrix_from_dict)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        return _fail(str(exc))
    report = is_free_state(basis, rho, tol=args.tol)
    _emit({"free": bool(report), "defects": report.defects})
    return EXIT_OK


def coherence_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="coherence", description="Coherence measures for an incomplete orthonormal basis."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ctr", help="normalized trace-distance coherence of a state")
    p.add_argument("--basis", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_ctr)

    p = sub.add_parser("min-completion", help="minimal-completion coherence of a state")
    p.add_argument("--basis", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--measure", choices=("l1", "relent"), default="l1")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_min_completion)

    p = sub.add_parser("verify-channel", help="classify a Kraus channel against both free classes")
    p.add_argument("--basis", required=True)
    p.add_argument("--channel", required=True)
    p.set_defaults(func=cmd_verify_channel)

    p = sub.add_parser("free-check", help="test whether a state is free for the basis")
    p.add_argument("--basis", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_free_check)

    args = parser.parse_args(argv)
    return args.func(args)


# ------------------------------------------------------------------ duality


def _duality_search_config(args) -> DualitySearchConfig:
    return DualitySearchConfig(
        restarts=args.restarts,
        master_seed=args.seed,
        parametrization=REAL_RESTRICTED if args.real_only else FULL_COMPLEX,
        threads=args.threads,
    )


def cmd_duality_eval(args) -> int:
    try:
        cfg = _load(args.config, serialization.interferometer_config_from_dict)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        return _fail(str(exc))
    inner = OptConfig(restarts=args.restarts, seed=args.seed)
    point = evaluate_point(cfg, inner)
    _emit(
        {
            "objective": point.ctr_value + point.distinguishability,
            "ctr": point.ctr_value,
            "distinguishability": point.distinguishability,
            "gamma0": point.gamma0,
            "discard_probability": point.discard_probability,
        }
    )
    return EXIT_OK


def cmd_duality_optimize(args) -> int:
    t0 = time.time()
    try:
        search = _duality_search_config(args)
        opt = maximize_duality(search)
    except (ValueError, RuntimeError) as exc:
        return _fail(str(exc))
    outputs = {
        "best_value": round(opt.best_value, 6),
        "converged": opt.converged,
        "restarts": args.restarts,
        "parametrization": search.parametrization,
        "best_config": serialization.interferometer_config_to_dict(opt.best_config),
        "ctr": opt.best_point.ctr_value,
        "distinguishability": opt.best_point.distinguishability,
    }
    manifest = RunManifest(
        command="duality optimize",
        inputs=(),
        master_seed=args.seed,
        wall_time=round(time.time() - t0, 3),
        outputs=outputs,
    )
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(serialization.dumps(manifest.to_dict()) + "\n")
    _emit(outputs)
    return EXIT_OK if opt.converged else EXIT_NOT_CONVERGED


def cmd_duality_certify(args) -> int:
    try:
        report = certify_bound(args.samples, seed=args.seed)
    except ValueError as exc:
        return _fail(str(exc))
    _emit(
        {
            "samples": report.samples,
            "max_value": report.max_value,
            "threshold": report.threshold,
            "violations": [[i, v] for i, v in report.violations],
        }
    )
    return EXIT_OK


def duality_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="duality", description="Wave-particle trade-off for the four-slit which-path setup."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="objective value of one interferometer configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_duality_eval)

    p = sub.add_parser("optimize", help="multi-start search for the maximal objective")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--real-only", action="store_true")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--manifest", default=None, help="write a reproduction manifest to this path")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    p.set_defaults(func=cmd_duality_optimize)

    p = sub.add_parser("certify", help="empirical bound check on random configurations")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_duality_certify)

    args = parser.parse_args(argv)
    return args.func(args)


# --------------------------------------------------------------- norm-factor


def cmd_norm_factor_compute(args) -> int:
    try:
        cfg = OptConfig(restarts=args.restarts, seed=args.seed)
        value = normalization_factor(
            args.d, args.n, cfg=cfg, use_cache=not args.no_cache, force_compute=args.force
        )
    except ValueError as exc:
        return _fail(str(exc))
    _emit({"d": args.d, "n": args.n, "value": value})
    return EXIT_OK


def norm_factor_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="norm-factor",
        description="Normalization constant of the trace-distance coherence measure.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="max-over-states trace distance to the free set")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restarts", type=int, default=12)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--force", action="store_true", help="recompute even for known (d, n) pairs")
    p.add_argument("--no-cache", action="store_true")
    p.set_defaults(func=cmd_norm_factor_compute)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(coherence_main())
