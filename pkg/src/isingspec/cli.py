"""Command-line interface wiring all modules together.

Exit codes: 0 success, 1 computational refusal (budget or convergence),
2 usage or input-parse errors.  Output files are written atomically
(temp file + rename).  Coupling flags accept exact rationals ("1/7")
as well as decimals; stochastic subcommands require an explicit --seed.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from .classical import compare_invariants, energy_spectrum, signature_polynomial
from .exceptions import BudgetError, ConvergenceError, GraphParseError
from .fixtures import FIXTURE_NAMES, fixture
from .graphs import Graph, encode_graph6, format_edge_list, parse_edge_list, parse_graph6
from .observables import ObservableSet
from .quantum import (
    IsingParams,
    QuantumOperator,
    annealing_sweep,
    full_spectrum_dense,
    lowest_k_eigenvalues,
    quantum_partition_function,
)
from .sampler import (
    GibbsModel,
    SignatureHistogram,
    bootstrap_ci,
    fit_temperature,
    metropolis_sample,
)
from .scan import LEVELS, scan_stream


def _coupling(text: str) -> float:
    """Exact rational flag values: '1', '0.25', '1/7'."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _observables(text: str) -> ObservableSet:
    try:
        return ObservableSet.from_names([t.strip() for t in text.split(",")])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _beta_grid(text: str):
    """'START:STOP:COUNT' (inclusive linspace) or comma-separated values."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return np.linspace(float(Fraction(start)), float(Fraction(stop)), int(count))
        return [float(Fraction(t)) for t in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad beta grid {text!r}") from None


def _add_graph_args(p: argparse.ArgumentParser, count: int = 1) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    if count == 1:
        group.add_argument("--fixture", metavar="NAME",
                           help=f"named reference graph ({', '.join(FIXTURE_NAMES)})")
        group.add_argument("--graph6", metavar="G6", help="one graph6 record")
        group.add_argument("--edges", metavar="LIST",
                           help="1-indexed edge list 'i,j;i,j;...' (needs --n)")
        p.add_argument("--n", type=int, metavar="N",
                       help="vertex count for --edges (default: max index)")
    else:
        group.add_argument("--fixtures", nargs=2, metavar=("A", "B"),
                           help="two named reference graphs")
        group.add_argument("--graph6", nargs=2, metavar=("X", "Y"),
                           help="two graph6 records")


def _graph_from_args(args) -> Graph:
    if args.fixture:
        return fixture(args.fixture)
    if args.graph6:
        return parse_graph6(args.graph6)
    text = args.edges
    n = args.n
    if n is None:
        indices = [int(tok) for pair in text.split(";") if pair.strip()
                   for tok in pair.split(",")]
        n = max(indices) if indices else 1
    return parse_edge_list(text, n)


def _graph_pair_from_args(args) -> tuple[Graph, Graph]:
    if args.fixtures:
        return fixture(args.fixtures[0]), fixture(args.fixtures[1])
    return parse_graph6(args.graph6[0]), parse_graph6(args.graph6[1])


def _write_output(path: str | None, text: str, summary: str) -> None:
    """Machine output to --output (atomic) or stdout; summary on the other."""
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        print(summary, file=sys.stderr)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".isingspec-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
    print(summary)


def _json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _cmd_fixtures(args) -> None:
    if args.name:
        g = fixture(args.name)
        if args.format == "graph6":
            body = encode_graph6(g) + "\n"
        else:
            body = format_edge_list(g) + "\n"
        summary = f"{args.name}: n={g.n}, edges={g.edge_count}"
        _write_output(args.output, body, summary)
        return
    lines = []
    for name in FIXTURE_NAMES:
        g = fixture(name)
        lines.append(f"{name:6s} n={g.n:3d} edges={g.edge_count:3d} {encode_graph6(g)}")
    _write_output(args.output, "\n".join(lines) + "\n", f"{len(FIXTURE_NAMES)} fixtures")


def _cmd_invariants(args) -> None:
    g = _graph_from_args(args)
    poly = signature_polynomial(g, args.observables)
    marginal = energy_spectrum(poly)
    data = {
        "n": g.n,
        "edges": g.edge_count,
        "graph6": encode_graph6(g),
        "energy_marginal": {str(e): c for e, c in sorted(marginal.items())},
        "polynomial": poly.to_json_dict(),
    }
    marg = ", ".join(f"{e}:{c}" for e, c in sorted(marginal.items()))
    _write_output(args.output, _json(data),
                  f"n={g.n} |E|={g.edge_count} energy marginal {{{marg}}}")


def _cmd_compare(args) -> None:
    g1, g2 = _graph_pair_from_args(args)
    report = compare_invariants(g1, g2, omega_ks=args.observables.omega_ks)
    data = report.to_json_dict()
    flags = [k for k, v in data.items() if v is True]
    _write_output(args.output, _json(data), "equal: " + (", ".join(flags) or "none"))


def _cmd_qspectrum(args) -> None:
    g = _graph_from_args(args)
    params = IsingParams(args.J, args.h, args.Delta)
    op = QuantumOperator(g, params)
    if args.mode == "full":
        spec = full_spectrum_dense(op)
    else:
        spec = lowest_k_eigenvalues(op, args.k, tol=args.tol, seed=args.seed)
    data = {
        "params": {"J": args.J, "h": args.h, "Delta": args.Delta},
        "mode": args.mode,
        "provenance": spec.provenance,
        "residual_tol": spec.residual_tol,
        "eigenvalues": [float(x) for x in spec.eigenvalues],
    }
    if args.beta is not None:
        data["beta"] = args.beta
        data["partition_function"] = quantum_partition_function(spec, args.beta)
    lo = spec.eigenvalues[0]
    _write_output(args.output, _json(data),
                  f"{len(spec.eigenvalues)} eigenvalues, lowest {lo:.10g}")


def _cmd_sweep(args) -> None:
    g = _graph_from_args(args)
    params = IsingParams(args.J, args.h, args.Delta, s=0.0)
    s_grid = np.linspace(0.0, 1.0, args.grid)
    result = annealing_sweep(g, params, s_grid=s_grid, k=args.k,
                             tol=args.tol, seed=args.seed)
    buf = io.StringIO()
    result.to_csv(buf)
    note = f", {len(result.failures)} failed grid points" if result.failures else ""
    _write_output(args.output, buf.getvalue(),
                  f"sweep over {args.grid} schedule points, k={args.k}{note}")


def _cmd_sample(args) -> None:
    g = _graph_from_args(args)
    model = GibbsModel(g, args.beta, args.J, args.h, args.observables)
    hist = metropolis_sample(model, args.sweeps, chains=args.chains,
                             seed=args.seed, burn_in=args.burn_in)
    if args.bootstrap:
        hist = bootstrap_ci(hist, args.bootstrap, seed=args.seed)
    if args.format == "json":
        body = _json(hist.to_json_dict())
    else:
        buf = io.StringIO()
        hist.to_csv(buf)
        body = buf.getvalue()
    _write_output(args.output, body,
                  f"{int(hist.total)} samples in {len(hist.counts)} bins")


def _cmd_fit(args) -> None:
    g = _graph_from_args(args)
    with open(args.target) as f:
        target = SignatureHistogram.from_json_dict(json.load(f))
    result = fit_temperature(g, target, args.beta_grid, J=args.J, h=args.h)
    data = {"beta": result.beta, "total_variation": result.total_variation}
    _write_output(args.output, _json(data),
                  f"best beta {result.beta:.6g} (TV {result.total_variation:.6g})")


def _cmd_scan(args) -> None:
    if args.input == "-":
        lines = sys.stdin
        family = "<stdin>"
    else:
        lines = open(args.input)
        family = args.input
    try:
        qparams = IsingParams(args.J, args.h, args.Delta)
        result = scan_stream(lines, args.level,
                             omega_ks=args.observables.omega_ks,
                             quantum_params=qparams if args.level == "quantum" else None,
                             family=family)
    finally:
        if lines is not sys.stdin:
            lines.close()
    _write_output(args.output, _json(result.to_json_dict()), result.summary())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isingspec",
        description="Map graphs to classical and quantum Ising spectral "
        "invariants; compare, sweep, sample, and scan.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--output", metavar="PATH",
                       help="write machine-readable output here (default: stdout)")

    p = sub.add_parser("fixtures", help="list or dump the named reference graphs")
    p.add_argument("--name", choices=FIXTURE_NAMES, help="dump one fixture")
    p.add_argument("--format", choices=("edges", "graph6"), default="edges",
                   help="dump format (default: edges)")
    add_common(p)
    p.set_defaults(func=_cmd_fixtures)

    p = sub.add_parser("invariants", help="signature polynomial and energy marginal")
    _add_graph_args(p)
    p.add_argument("--observables", type=_observables, default=ObservableSet(),
                   metavar="LIST", help="comma list starting 'e,m', e.g. e,m,omega2 "
                   "(default: e,m)")
    add_common(p)
    p.set_defaults(func=_cmd_invariants)

    p = sub.add_parser("compare", help="pairwise classical invariant report")
    _add_graph_args(p, count=2)
    p.add_argument("--observables", type=_observables,
                   default=ObservableSet((2,)), metavar="LIST",
                   help="comma list starting 'e,m' (default: e,m,omega2)")
    add_common(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("qspectrum", help="transverse-field spectrum")
    _add_graph_args(p)
    p.add_argument("--J", type=_coupling, default=1.0,
                   help="coupling strength, rational ok (default: 1)")
    p.add_argument("--h", type=_coupling, default=1.0,
                   help="longitudinal field (default: 1)")
    p.add_argument("--Delta", type=_coupling, default=1.0,
                   help="transverse field (default: 1)")
    p.add_argument("--mode", choices=("full", "lowest"), default="full",
                   help="full dense spectrum (n<=13) or k lowest (default: full)")
    p.add_argument("--k", type=int, default=1,
                   help="eigenvalue count for --mode lowest (default: 1)")
    p.add_argument("--tol", type=float, default=1e-10,
                   help="Krylov residual tolerance (default: 1e-10)")
    p.add_argument("--beta", type=_coupling, default=None,
                   help="if set, also report the partition function at this "
                   "inverse temperature")
    p.add_argument("--seed", type=int, default=0,
                   help="Krylov start-vector seed (default: 0)")
    add_common(p)
    p.set_defaults(func=_cmd_qspectrum)

    p = sub.add_parser("sweep", help="annealing-schedule spectrum sweep (CSV)")
    _add_graph_args(p)
    p.add_argument("--k", type=int, default=20,
                   help="lowest levels per schedule point (default: 20)")
    p.add_argument("--grid", type=int, default=101,
                   help="uniform schedule points in [0,1] (default: 101)")
    p.add_argument("--J", type=_coupling, default=1.0, help="coupling (default: 1)")
    p.add_argument("--h", type=_coupling, default=1.0, help="field (default: 1)")
    p.add_argument("--Delta", type=_coupling, default=1.0,
                   help="transverse field (default: 1)")
    p.add_argument("--tol", type=float, default=1e-10,
                   help="Krylov residual tolerance (default: 1e-10)")
    p.add_argument("--seed", type=int, default=0,
                   help="Krylov start-vector seed (default: 0)")
    add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("sample", help="Metropolis Gibbs sampling histogram")
    _add_graph_args(p)
    p.add_argument("--beta", type=_coupling, required=True,
                   help="inverse temperature (required)")
    p.add_argument("--J", type=_coupling, default=1.0,
                   help="coupling, rational ok e.g. 1/7 (default: 1)")
    p.add_argument("--h", type=_coupling, default=1.0, help="field (default: 1)")
    p.add_argument("--sweeps", type=int, default=10**6,
                   help="recorded sweeps per chain (default: 1000000)")
    p.add_argument("--chains", type=int, default=1,
                   help="independent chains (default: 1)")
    p.add_argument("--seed", type=int, required=True,
                   help="RNG seed (required; no ambient randomness)")
    p.add_argument("--burn-in", type=int, default=None,
                   help="burn-in sweeps per chain (default: sweeps//10)")
    p.add_argument("--observables", type=_observables, default=ObservableSet(),
                   metavar="LIST", help="comma list starting 'e,m' (default: e,m)")
    p.add_argument("--bootstrap", type=int, default=0, metavar="R",
                   help="attach 16-84 percentile CIs from R resamples (default: off)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format (default: csv)")
    add_common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("fit", help="fit Gibbs temperature to a target histogram")
    _add_graph_args(p)
    p.add_argument("--target", required=True, metavar="JSON",
                   help="target histogram (JSON as written by 'sample --format json')")
    p.add_argument("--beta-grid", type=_beta_grid, required=True, metavar="GRID",
                   help="'START:STOP:COUNT' linspace or comma list of betas")
    p.add_argument("--J", type=_coupling, default=1.0, help="coupling (default: 1)")
    p.add_argument("--h", type=_coupling, default=1.0, help="field (default: 1)")
    add_common(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("scan", help="scan a graph6 stream for equal-invariant "
                       "non-isomorphic pairs")
    p.add_argument("--input", required=True, metavar="FILE",
                   help="graph6 file, one record per line ('-' for stdin)")
    p.add_argument("--level", choices=LEVELS, required=True,
                   help="invariant level to bucket on")
    p.add_argument("--observables", type=_observables,
                   default=ObservableSet((2,)), metavar="LIST",
                   help="observables for --level multivariate (default: e,m,omega2)")
    p.add_argument("--J", type=_coupling, default=1.0,
                   help="quantum-level coupling (default: 1)")
    p.add_argument("--h", type=_coupling, default=1.0,
                   help="quantum-level field (default: 1)")
    p.add_argument("--Delta", type=_coupling, default=1.0,
                   help="quantum-level transverse field (default: 1)")
    add_common(p)
    p.set_defaults(func=_cmd_scan)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except GraphParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BudgetError, ConvergenceError, OverflowError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
