"""Command-line front end: validation, measurement reports, optimization,
squeezing sweeps, key rates, and Monte Carlo sampling.

Exit codes: 0 success, 1 I/O or parse failure, 2 unphysical input,
3 numerical failure. All commands are deterministic for fixed inputs,
flags, and seed. ``--input -`` reads JSON from stdin; ``--output -``
(the default) writes the machine-readable result to stdout instead of a
file, in which case the human summary is suppressed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    NoConvergence,
    NotSymmetric,
    SteeringError,
    UnphysicalMixture,
    UnphysicalState,
)
from .gaussian import (
    CovMatrix,
    LocalSymplectic,
    SymplecticParams,
    apply_local,
    swap_parties,
    symplectic_eigenvalues,
    symplectic_from_params,
)
from .measures import _sig12, full_report, reid_product, schur_complement_b
from .optimize import minimize_reid
from .sampling import Basis, bootstrap_products, export_batch, sample
from .states import GaussianMixtureSpec, GaussianStateSpec, state_from_json_dict

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_UNPHYSICAL = 2
EXIT_NUMERICAL = 3

# Rotation used by the sweep command: u = v/(1+v^2), w = 1+v^2 puts each
# party's symplectic at [[1, v], [v, 1+v^2]].
SWEEP_V_A = 0.16
SWEEP_V_B = 0.19


@dataclass
class RunConfig:
    """Parsed command-line configuration."""

    command: str
    input_path: str = None
    output_path: str = "-"
    seed: int = 42
    restarts: int = 16
    samples: int = 10**6
    bins: int = 50
    r_grid: tuple = (0.01, 3.0, 100)
    direction: str = "a-to-b"
    raw_prefix: str = None

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        for name in ("restarts", "samples", "bins"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        r_min, r_max, steps = self.r_grid
        if steps < 1 or r_min <= 0 or r_max < r_min:
            raise ValueError("sweep grid needs 0 < r-min <= r-max and r-steps >= 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvsteer",
        description="Steering analysis of two-mode continuous-variable states",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True,
                           help="covariance/state JSON file, or '-' for stdin")
        p.add_argument("--output", default="-",
                       help="result path; '-' (default) prints to stdout")
        p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("validate", help="check a covariance matrix file for physicality")
    add_common(p)

    p = sub.add_parser("measure", help="steering measures, criteria, and key rates")
    add_common(p)
    p.add_argument("--direction", choices=("a-to-b", "b-to-a"), default="a-to-b",
                   help="which party steers (relabels the modes)")

    p = sub.add_parser("optimize", help="minimize the inference product numerically")
    add_common(p)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--direction", choices=("a-to-b", "b-to-a"), default="a-to-b")

    p = sub.add_parser("sweep-fig1", help="squeezing sweep comparing criteria on a rotated state")
    add_common(p, needs_input=False)
    p.add_argument("--r-min", type=float, default=0.01)
    p.add_argument("--r-max", type=float, default=3.0)
    p.add_argument("--r-steps", type=int, default=100)

    p = sub.add_parser("sample", help="Monte Carlo homodyne estimate of variance products")
    add_common(p)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--direction", choices=("a-to-b", "b-to-a"), default="a-to-b")
    p.add_argument("--raw-prefix", default=None,
                   help="also dump raw outcome CSVs at PREFIX_xx.csv / PREFIX_pp.csv")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input_path=getattr(args, "input", None),
        output_path=args.output,
        seed=args.seed,
        restarts=getattr(args, "restarts", 16),
        samples=getattr(args, "samples", 10**6),
        bins=getattr(args, "bins", 50),
        r_grid=(
            getattr(args, "r_min", 0.01),
            getattr(args, "r_max", 3.0),
            getattr(args, "r_steps", 100),
        ),
        direction=getattr(args, "direction", "a-to-b"),
        raw_prefix=getattr(args, "raw_prefix", None),
    )


def _read_json(config: RunConfig) -> dict:
    if config.input_path == "-":
        return json.load(sys.stdin)
    return json.loads(Path(config.input_path).read_text())


def _emit(config: RunConfig, text: str, summary_lines=()) -> None:
    """Write the machine output (file or stdout) and the human summary."""
    if config.output_path == "-":
        sys.stdout.write(text)
    else:
        Path(config.output_path).write_text(text)
        for line in summary_lines:
            print(line)


def _load_cm(config: RunConfig) -> CovMatrix:
    from .gaussian import cm_from_json_dict

    cm, _ = cm_from_json_dict(_read_json(config))
    if config.direction == "b-to-a":
        cm = swap_parties(cm)
    return cm


def cmd_validate(config: RunConfig) -> int:
    try:
        data = _read_json(config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        from .gaussian import cm_from_json_dict

        cm, _ = cm_from_json_dict(data)
    except (NotSymmetric, UnphysicalState) as exc:
        lines = [f"UNPHYSICAL: {exc}"]
        if isinstance(exc, UnphysicalState):
            lines.append(f"most negative eigenvalue of sigma + i*Omega: {exc.min_eigenvalue:.6e}")
        _emit(config, "\n".join(lines) + "\n", lines)
        return EXIT_UNPHYSICAL
    except ValueError as exc:
        print(f"error: bad covariance file: {exc}", file=sys.stderr)
        return EXIT_PARSE
    nu1, nu2 = symplectic_eigenvalues(cm)
    lines = [
        "VALID covariance matrix (vacuum units)",
        f"symplectic eigenvalues: {nu1:.12g}, {nu2:.12g}",
    ]
    _emit(config, "\n".join(lines) + "\n", lines)
    return EXIT_OK


def cmd_measure(config: RunConfig) -> int:
    cm = _load_cm(config)
    report = full_report(cm)
    text = json.dumps(report.to_json_dict(), indent=2) + "\n"
    fwd, rev = ("A->B", "B->A") if config.direction == "a-to-b" else ("B->A", "A->B")
    summary = [
        f"Gaussian steering {fwd}: {report.g_a_to_b:.6f} nats"
        + (" (steerable)" if report.wiseman_violated_a_to_b else " (not steerable)"),
        f"Gaussian steering {rev}: {report.g_b_to_a:.6f} nats",
        f"inference product (given basis): {report.reid_product_as_given:.6f}"
        + (" < 1: violation" if report.reid_violated else " >= 1: no violation"),
        f"key rate bound (given basis): {report.key_rate_bound:.6f} nats/use",
        f"key rate bound (optimal basis): {report.optimal_key_rate_bound:.6f} nats/use",
    ]
    _emit(config, text, summary)
    return EXIT_OK


def cmd_optimize(config: RunConfig) -> int:
    cm = _load_cm(config)
    result = minimize_reid(cm, restarts=config.restarts, seed=config.seed)
    det_m_b = float(np.linalg.det(schur_complement_b(cm)))
    payload = {
        "min_value": _sig12(result.min_value),
        "argmin": {
            "party_a": {"u": result.argmin[0].u, "v": result.argmin[0].v, "w": result.argmin[0].w},
            "party_b": {"u": result.argmin[1].u, "v": result.argmin[1].v, "w": result.argmin[1].w},
        },
        "iterations": result.iterations,
        "restarts_used": result.restarts_used,
        "converged": result.converged,
        "det_m_b": _sig12(det_m_b),
        "gap": _sig12(abs(result.min_value - det_m_b)),
    }
    text = json.dumps(payload, indent=2) + "\n"
    summary = [
        f"minimized inference product: {result.min_value:.9g}",
        f"closed-form minimum:         {det_m_b:.9g}",
        f"gap: {abs(result.min_value - det_m_b):.3e} "
        f"({result.restarts_used} restart(s), {result.iterations} iterations)",
    ]
    _emit(config, text, summary)
    return EXIT_OK


def _sweep_symplectic() -> LocalSymplectic:
    def party(v):
        return symplectic_from_params(
            SymplecticParams(u=v / (1 + v * v), v=v, w=1 + v * v)
        )

    return LocalSymplectic(party(SWEEP_V_A), party(SWEEP_V_B))


def cmd_sweep_fig1(config: RunConfig) -> int:
    from .states import tmsv

    r_min, r_max, steps = config.r_grid
    rotation = _sweep_symplectic()
    rows = ["r,det_m_b,reid_product_rotated,reid_product_standard"]
    for r in np.linspace(r_min, r_max, int(steps)):
        base = tmsv(float(r)).cm
        det_m_b = float(np.linalg.det(schur_complement_b(base)))
        rotated = reid_product(apply_local(base, rotation))
        standard = reid_product(base)
        rows.append(f"{r:.12g},{det_m_b:.12g},{rotated:.12g},{standard:.12g}")
    text = "\n".join(rows) + "\n"
    detected = sum(
        1 for line in rows[1:] if float(line.split(",")[2]) < 1.0
    )
    summary = [
        f"swept {int(steps)} squeezing values in [{r_min:g}, {r_max:g}]",
        f"rotated inference product < 1 on {detected}/{int(steps)} grid points; "
        "det M_B < 1 on all of them",
    ]
    _emit(config, text, summary)
    return EXIT_OK


def cmd_sample(config: RunConfig) -> int:
    state = state_from_json_dict(_read_json(config))
    if config.direction == "b-to-a":
        state = _swap_state(state)
    est = bootstrap_products(state, config.samples, config.seed, bins=config.bins)
    payload = {
        "inf_product": _sig12(est.inf_product),
        "min_product": _sig12(est.min_product),
        "inf_sigma": _sig12(est.inf_sigma),
        "min_sigma": _sig12(est.min_sigma),
        "diff_sigma": _sig12(est.diff_sigma),
        "n": est.n,
        "bins": est.bins,
        "seed": est.seed,
        "source": est.source,
    }
    text = json.dumps(payload, indent=2) + "\n"
    summary = [
        f"inference product (linear estimator): {est.inf_product:.6f} +- {est.inf_sigma:.6f}",
        f"inference product (conditional):      {est.min_product:.6f} +- {est.min_sigma:.6f}",
        f"samples per basis: {est.n}, bins: {est.bins}, source: {est.source}",
    ]
    if config.raw_prefix is not None:
        for basis, suffix, offset in ((Basis.XX, "_xx.csv", 0), (Basis.PP, "_pp.csv", 1_000_003)):
            batch = sample(state, basis, config.samples, config.seed + offset)
            export_batch(batch, config.raw_prefix + suffix)
        summary.append(f"raw outcomes written at {config.raw_prefix}_xx.csv / _pp.csv")
    _emit(config, text, summary)
    return EXIT_OK


def _swap_state(state):
    if isinstance(state, GaussianMixtureSpec):
        comps = tuple(
            (w, GaussianStateSpec(swap_parties(s.cm), s.mean[[2, 3, 0, 1]]))
            for w, s in state.components
        )
        return GaussianMixtureSpec(comps)
    return GaussianStateSpec(swap_parties(state.cm), state.mean[[2, 3, 0, 1]])


_COMMANDS = {
    "validate": cmd_validate,
    "measure": cmd_measure,
    "optimize": cmd_optimize,
    "sweep-fig1": cmd_sweep_fig1,
    "sample": cmd_sample,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    handler = _COMMANDS[config.command]
    if config.command == "validate":
        return handler(config)
    try:
        return handler(config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: bad input file: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NotSymmetric, UnphysicalState, UnphysicalMixture) as exc:
        print(f"error: unphysical input: {exc}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    except NoConvergence as exc:
        print(f"error: optimizer did not converge: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SteeringError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
