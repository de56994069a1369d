"""``graphmix`` command-line interface.

Exit status: 0 on success, 1 on usage or input errors, 2 on numerical
failures (non-convergence, degenerate fits, infeasible posteriors).
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

import numpy as np

from .errors import (
    ConstraintViolationError,
    GraphmixError,
    InfeasibleError,
    ZeroStatisticError,
)
from .fitting import PARAM_NAMES, FitConfig, GraphSet, comparison_csv, fit_mle, model_comparison
from .graphs import Graph, GraphSpace
from .io import graphset_to_dict, load_graphset, load_observations
from .models import (
    BernoulliParams,
    BetaBernoulliParams,
    CugParams,
    DirichletCategoricalParams,
    MeanDegreeParams,
    NonNullDegreeParams,
    UmanParams,
    resolve_params,
)
from .netinf import (
    ErrorModel,
    ExperimentDesign,
    GibbsConfig,
    parse_prior,
    point_estimate,
    posterior_density_summary,
    posterior_gibbs,
    psrf,
    results_csv,
    run_experiment,
)
from .oracle import exact_distribution
from .samplers import (
    make_rng,
    run_contagion,
    sample_bernoulli_graph,
    sample_beta_bernoulli,
    sample_cug,
    sample_dirichlet_categorical,
    sample_uman,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

FAMILIES = {
    "bernoulli": BernoulliParams,
    "cug": CugParams,
    "uman": UmanParams,
    "beta-bernoulli": BetaBernoulliParams,
    "dirichlet-categorical": DirichletCategoricalParams,
    "beta-bernoulli-meandeg": MeanDegreeParams,
    "dc-nnd": NonNullDegreeParams,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _make_params(family: str, values: list[float]):
    cls = FAMILIES[family]
    if family == "cug":
        if len(values) != 1 or values[0] != int(values[0]):
            raise UsageError("cug takes one integer edge count")
        return CugParams(int(values[0]))
    n_expected = len(cls.__dataclass_fields__)
    if len(values) != n_expected:
        raise UsageError(f"{family} takes {n_expected} parameters, got {len(values)}")
    return cls(*values)


def _sample(space: GraphSpace, params, rng) -> Graph:
    params = resolve_params(params, space)
    if isinstance(params, BernoulliParams):
        return sample_bernoulli_graph(space, params, rng)
    if isinstance(params, CugParams):
        return sample_cug(space, params.edges, rng)
    if isinstance(params, UmanParams):
        return sample_uman(space, params, rng)
    if isinstance(params, BetaBernoulliParams):
        return sample_beta_bernoulli(space, params, rng)[0]
    return sample_dirichlet_categorical(space, params, rng)[0]


def _write(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _rng(args) -> np.random.Generator:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return make_rng(args.seed)


# --- subcommands -------------------------------------------------------------------


def cmd_simulate(args) -> int:
    rng = _rng(args)
    params = _make_params(args.family, _floats(args.params))
    space = GraphSpace(args.n_vertices, directed=args.directed, loops=args.loops)
    graphs = [_sample(space, params, rng) for _ in range(args.n_graphs)]
    _write(args, json.dumps(graphset_to_dict(GraphSet(graphs))) + "\n")
    return EXIT_OK


def cmd_contagion(args) -> int:
    rng = _rng(args)
    space = GraphSpace(args.n_vertices, directed=True)
    p = BetaBernoulliParams(args.alpha, args.beta)
    if args.init == "exact":
        y0 = sample_beta_bernoulli(space, p, rng)[0]
    elif args.init == "empty":
        y0 = Graph.empty(space)
    elif args.init.startswith("density="):
        d = float(args.init.split("=", 1)[1])
        if not 0.0 <= d <= 1.0:
            raise UsageError(f"initial density must lie in [0, 1], got {d}")
        y0 = sample_cug(space, int(round(d * space.edge_capacity)), rng)
    else:
        raise UsageError(f"--init must be exact, empty or density=x, got {args.init!r}")
    thin = args.thin if args.thin is not None else space.edge_capacity
    trace = run_contagion(y0, p, args.rounds, thin, rng)
    _write(args, trace.to_csv())
    return EXIT_OK


def cmd_fit(args) -> int:
    gs = load_graphset(args.input)
    config = FitConfig(approx=args.approx)
    if args.compare:
        families = ["bernoulli", "beta-bernoulli"]
        if gs.directed and not gs.loops:
            families.append("dirichlet-categorical")
        fits = [fit_mle(gs, f, FitConfig()) for f in families]
        _write(args, comparison_csv(model_comparison(fits)))
    else:
        fits = [fit_mle(gs, args.family, config)]
        _write(args, fits[0].to_json() + "\n")
    failed = [f for f in fits if not f.converged or f.degenerate is not None]
    for f in failed:
        detail = f.degenerate.detail if f.degenerate is not None else "optimizer did not converge"
        print(f"{f.family}: {detail} (flags: {', '.join(f.flags)})", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_infer(args) -> int:
    rng = _rng(args)
    obs = load_observations(args.input)
    prior = parse_prior(args.prior)
    fixed = None
    if args.fix_error_rates:
        vals = _floats(args.fix_error_rates)
        if len(vals) != 2:
            raise UsageError("--fix-error-rates takes FP,FN")
        fixed = (vals[0], vals[1])
    config = GibbsConfig(chains=args.chains, burn_in=args.burnin, draws=args.draws, thin=args.thin, fixed_rates=fixed)
    em = ErrorModel(tuple(_floats(args.fp_prior)), tuple(_floats(args.fn_prior)), args.pooling)
    draws = posterior_gibbs(obs, prior, em, config, rng)
    est = point_estimate(draws)

    def safe(x):
        try:
            v = psrf(x)
        except GraphmixError:
            return None
        return None if not np.isfinite(v) else float(f"{v:.12g}")

    def r12(x):
        return float(f"{x:.12g}")

    marg = draws.marginals()
    rows, cols = obs.space.edge_index()
    summary = {
        "prior": args.prior,
        "n_slices": len(obs),
        "draws": draws.n_draws,
        "edges": [[int(i) + 1, int(j) + 1] for i, j in est.edges()],
        "inferred_density": r12(posterior_density_summary(draws)),
        "fp_mean": [r12(v) for v in draws.fp.mean(axis=(0, 1))],
        "fn_mean": [r12(v) for v in draws.fn.mean(axis=(0, 1))],
        "psrf_density": safe(draws.density_series()),
        "marginals": [[int(i) + 1, int(j) + 1, r12(marg[i, j])] for i, j in zip(rows, cols)],
    }
    _write(args, json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


def cmd_experiment(args) -> int:
    rng = _rng(args)
    try:
        doc = json.loads(Path(args.design).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.design}: invalid JSON ({exc})") from exc
    design = ExperimentDesign.from_dict(doc)
    _write(args, results_csv(run_experiment(design, rng)))
    return EXIT_OK


def cmd_oracle(args) -> int:
    params = _make_params(args.family, _floats(args.params))
    space = GraphSpace(args.n_vertices, directed=args.directed, loops=args.loops)
    _write(args, exact_distribution(space, resolve_params(params, space)).to_csv())
    return EXIT_OK


# --- parser ---------------------------------------------------------------------------


def _space_flags(p) -> None:
    p.add_argument("--n-vertices", type=int, required=False, default=10)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--directed", dest="directed", action="store_true", default=True)
    g.add_argument("--undirected", dest="directed", action="store_false")
    p.add_argument("--loops", action="store_true", default=False)


def _common(p, seeded: bool = True) -> None:
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--config", help="JSON or key=value file whose entries act as flag defaults")
    # deterministic commands accept --seed too, so every command shares one calling convention
    help_ = "64-bit seed; drawn from system entropy when omitted" if seeded else "accepted and ignored; this command is deterministic"
    p.add_argument("--seed", type=int, help=help_)


def build_parser() -> _Parser:
    parser = _Parser(prog="graphmix", description="Mixture models for random graphs.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("simulate", help="draw a graph set from a model")
    p.add_argument("--family", choices=sorted(FAMILIES), default="beta-bernoulli")
    p.add_argument("--params", default="1,1", help="comma-separated parameters of the family")
    p.add_argument("--n-graphs", type=int, default=1)
    _space_flags(p)
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("contagion", help="run contagious tie formation and emit its trace")
    p.add_argument("--n-vertices", type=int, default=8)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--rounds", type=int, default=1000)
    p.add_argument("--thin", type=int, help="rounds between records (default: number of edge variables)")
    p.add_argument("--init", default="empty", help="exact | empty | density=x")
    _common(p)
    p.set_defaults(func=cmd_contagion)

    p = sub.add_parser("fit", help="maximum-likelihood fit to a graph-set file")
    p.add_argument("input")
    p.add_argument("--family", choices=sorted(PARAM_NAMES), default="beta-bernoulli")
    p.add_argument("--approx", action="store_true", help="use the offset approximation")
    p.add_argument("--compare", action="store_true", help="fit the baseline families and compare by AIC")
    _common(p, seeded=False)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("infer", help="posterior inference of a criterion graph from slices")
    p.add_argument("input")
    p.add_argument("--prior", default="beta-bernoulli(1,1)")
    p.add_argument("--chains", type=int, default=3)
    p.add_argument("--burnin", type=int, default=100)
    p.add_argument("--draws", type=int, default=100, help="retained draws per chain")
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--fix-error-rates", help="FP,FN: hold the error rates fixed")
    p.add_argument("--fp-prior", default="1,11")
    p.add_argument("--fn-prior", default="1,11")
    p.add_argument("--pooling", choices=["global", "per-source"], default="global")
    _common(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("experiment", help="run a network-inference simulation study")
    p.add_argument("design", help="JSON design file")
    _common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("oracle", help="dump an exact distribution by enumeration")
    p.add_argument("--family", choices=sorted(FAMILIES), default="beta-bernoulli")
    p.add_argument("--params", default="1,1")
    _space_flags(p)
    p.set_defaults(n_vertices=3)
    _common(p, seeded=False)
    p.set_defaults(func=cmd_oracle)
    return parser


def read_config(path) -> dict:
    """Parse a JSON object or flat ``key=value`` lines; keys use flag spelling."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        doc = {}
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{ln}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            doc[key] = value
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: config must be an object")
    return {k.lstrip("-").replace("-", "_"): v for k, v in doc.items()}


def _apply_config(parser: _Parser, argv: list[str], args) -> argparse.Namespace:
    """Re-parse with config entries as defaults so explicit flags still win."""
    cfg = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in cfg.items():
        if key not in known or key in ("config", "func", "help"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        action = known[key]
        if isinstance(value, str) and action.type is not None:
            value = action.type(value)
        elif isinstance(value, str) and isinstance(action.default, bool):
            value = value.lower() in ("1", "true", "yes")
        defaults[key] = value
    sub.set_defaults(**defaults)
    for action in sub._actions:
        if action.dest in defaults:
            action.required = False
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            args = _apply_config(parser, argv, args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleError, ZeroStatisticError, ConstraintViolationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphmixError, ValueError, OSError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
