"""Command-line entry point: ``sparsewiener <subcommand> ...``.

Exit status is 0 on success (and PASS verdicts), 1 on computation errors or
FAIL verdicts, 2 when the input configuration is rejected.  Relative output
paths are resolved against ``$SPARSEWIENER_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from sparsewiener import kernels, norms, rates, sparse_grid
from sparsewiener.quasi_interp import apply_P
from sparsewiener.spectral import CutoffError, SpectralFunction

OUTPUT_DIR_ENV = "SPARSEWIENER_OUTPUT_DIR"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    """Input rejected before any computation starts."""


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _resolve(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _emit(text: str, path: str | None) -> None:
    target = _resolve(path)
    if target is None:
        sys.stdout.write(text)
        return
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _load_function(path: str) -> SpectralFunction:
    data = _load_json(path)
    try:
        return SpectralFunction.from_json_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad function file {path}: {exc}") from exc


def _parse_floats(text: str, count: int, what: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"{what} must be {count} comma-separated numbers") from exc
    if len(vals) != count:
        raise ConfigError(f"{what} must be {count} comma-separated numbers")
    return vals


def _scheme(name: str) -> kernels.QuasiInterpScheme:
    try:
        return kernels.builtin_scheme(name)
    except kernels.UnknownSchemeError as exc:
        raise ConfigError(str(exc)) from exc


# --------------------------------------------------------------------------
# experiment configuration
# --------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Validated ``rates --config`` file.

    Keys: ``experiment`` (``"rate"`` or ``"sharpness"``), ``scheme``,
    ``spec`` (the :class:`~sparsewiener.rates.RateSpec` fields p, q, alpha,
    beta, gamma, T, target, d), ``set`` (``{"kind": delta|smolyak|full|energy,
    "eps": ...}``), ``function`` (``{"family": korobov|block_lacunary, ...}``
    with ``cutoff`` for korobov), ``levels`` (list, or ``{"start", "stop"}``),
    ``seed``, ``tol``, ``budget_ratio``, ``trials``, ``n0`` and ``out``.
    """

    experiment: str
    scheme: kernels.QuasiInterpScheme
    spec: rates.RateSpec
    index_family: rates.IndexFamily
    function: dict
    levels: list
    seed: int = 0
    tol: float = 0.3
    budget_ratio: float = 1e-3
    trials: int = 8
    n0: int = 0
    out: str | None = None
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Mapping, seed: int | None = None) -> "ExperimentConfig":
        if not isinstance(data, Mapping):
            raise ConfigError("config must be a JSON object")
        known = {"experiment", "scheme", "spec", "set", "function", "levels", "seed", "tol",
                 "budget_ratio", "trials", "n0", "out"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        for key in ("scheme", "spec", "levels"):
            if key not in data:
                raise ConfigError(f"config is missing required key {key!r}")
        experiment = data.get("experiment", "rate")
        if experiment not in ("rate", "sharpness"):
            raise ConfigError("experiment must be 'rate' or 'sharpness'")
        scheme = _scheme(data["scheme"])
        try:
            spec = rates.RateSpec.from_dict(data["spec"])
            spec = rates._replace(spec, scheme_s=min(spec.scheme_s, scheme.declared_s)).validate()
            family = rates.IndexFamily(**data.get("set", {"kind": "delta"}))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"spec rejected: {exc}") from exc
        levels = data["levels"]
        if isinstance(levels, Mapping):
            levels = list(range(int(levels["start"]), int(levels["stop"]) + 1))
        if not levels or any(b <= a for a, b in zip(levels, levels[1:])):
            raise ConfigError("levels must be a non-empty strictly increasing list")
        base_seed = int(data.get("seed", 0)) if seed is None else int(seed)
        function = dict(data.get("function", {"family": "block_lacunary"}))
        if experiment == "rate":
            function.setdefault("alpha", spec.alpha)
            function.setdefault("beta", spec.beta)
            function.setdefault("p", spec.p)
            function.setdefault("seed", base_seed)
            if function.get("family") not in ("korobov", "block_lacunary"):
                raise ConfigError("function.family must be 'korobov' or 'block_lacunary'")
            if function["family"] == "korobov":
                if "cutoff" not in function or "a" not in function:
                    raise ConfigError("korobov functions need 'a' and 'cutoff'")
                rule = rates.KorobovRule(float(function["a"]), float(function.get("b", 0.0)))
                if not rule.in_space(spec.d, float(function["alpha"]), float(function["beta"]),
                                     rates._from_json_float(function["p"])):
                    raise ConfigError("korobov parameters violate membership in A_p^(alpha,beta): "
                                      "need p(a-alpha) summable per axis")
            if family.kind == "energy":
                try:
                    sparse_grid.energy_parameters(spec.alpha, spec.beta, spec.gamma, family.eps,
                                                  spec.sigma)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from exc
        else:
            try:
                rates._check_sharp_regime(rates._replace(spec, q=spec.p))
            except rates.SpecError as exc:
                raise ConfigError(str(exc)) from exc
        return cls(experiment, scheme, spec, family, function, list(levels), base_seed,
                   float(data.get("tol", 0.3 if experiment == "rate" else 0.2)),
                   float(data.get("budget_ratio", 1e-3)), int(data.get("trials", 8)),
                   int(data.get("n0", 0)), data.get("out"), dict(data))

    def build_function(self) -> SpectralFunction:
        params = {k: v for k, v in self.function.items() if k not in ("family", "cutoff")}
        return rates.make_test_function(self.function["family"], params, self.spec.d,
                                        self.function.get("cutoff"))


def run_config(config: ExperimentConfig):
    if config.experiment == "sharpness":
        return rates.sharpness_envelope(config.scheme, config.spec, config.levels, config.trials,
                                        config.n0, config.seed, config.tol)
    f = config.build_function()
    meta = {"function": config.function, "seed": config.seed}
    return rates.run_experiment(f, config.scheme, config.spec, config.levels, config.index_family,
                                config.tol, config.budget_ratio, meta)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_norm(args) -> int:
    f = _load_function(args.function)
    q = math.inf if args.q in ("inf", "infinity") else float(args.q)
    if args.variant == "hybrid":
        if args.alpha is None:
            raise ConfigError("hybrid norms need --alpha (and optionally --beta)")
        params = norms.NormParams.hybrid(args.alpha, args.beta or 0.0, q)
    else:
        g = args.gamma if args.gamma is not None else args.alpha
        if g is None:
            raise ConfigError(f"{args.variant} norms need --gamma (or --alpha)")
        params = (norms.NormParams.isotropic if args.variant == "iso" else norms.NormParams.mixed)(g, q)
    value = norms.wiener_norm(f, params)
    _emit(dumps(value.to_dict()), args.out)
    return EXIT_OK


def _index_set(args, dim: int) -> sparse_grid.SparseIndexSet:
    kind = args.set
    if kind == "smolyak":
        return sparse_grid.build_delta(args.n, 0.0, dim)
    if kind == "full":
        return sparse_grid.build_delta(args.n, sparse_grid.FULL_BOX, dim)
    if kind == "energy":
        if not args.energy:
            raise ConfigError("--set energy needs --energy alpha,beta,gamma,eps,sigma")
        a, b, g, e, s = _parse_floats(args.energy, 5, "--energy")
        return sparse_grid.build_energy(args.n, a, b, g, e, s, dim)
    if kind.startswith("T="):
        try:
            T = float(kind[2:])
        except ValueError as exc:
            raise ConfigError(f"bad set descriptor {kind!r}") from exc
        return sparse_grid.build_delta(args.n, T, dim)
    raise ConfigError(f"unknown set {kind!r}; use smolyak, energy, full or T=<t>")


def cmd_approx(args) -> int:
    scheme = _scheme(args.scheme)
    f = _load_function(args.function)
    if f.dim != args.dim:
        raise ConfigError(f"--dim {args.dim} does not match the function's dimension {f.dim}")
    try:
        gamma = _index_set(args, f.dim)
    except sparse_grid.InvalidIndexSetError as exc:
        raise ConfigError(str(exc)) from exc
    result = apply_P(scheme, gamma, f)
    _emit(dumps(result.to_json_dict()), args.out)
    return EXIT_OK


def cmd_grid(args) -> int:
    try:
        if args.energy:
            if args.xi is None:
                raise ConfigError("--energy needs --xi")
            a, b, g, e, s = _parse_floats(args.energy, 5, "--energy")
            gamma = sparse_grid.build_energy(args.xi, a, b, g, e, s, args.dim)
        else:
            if args.n is None:
                raise ConfigError("grid needs --n (or --energy with --xi)")
            T = sparse_grid.FULL_BOX if args.T in ("-inf", "full") else float(args.T)
            gamma = sparse_grid.build_delta(args.n, T, args.dim)
    except sparse_grid.InvalidIndexSetError as exc:
        raise ConfigError(str(exc)) from exc
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if args.emit == "members":
        writer.writerow([f"k_{i + 1}" for i in range(args.dim)])
        writer.writerows(gamma)
    elif args.emit == "points":
        nodes = sparse_grid.grid_points_of(gamma)
        writer.writerow([f"x_{i + 1}" for i in range(args.dim)])
        for row in nodes.rationals():
            writer.writerow([f"{r.numerator}/{r.denominator}" for r in row])
    else:
        writer.writerow(["members", "frequencies", "points"])
        writer.writerow([len(gamma), sparse_grid.frequency_count(gamma),
                         len(sparse_grid.grid_points_of(gamma))])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_check_conditions(args) -> int:
    scheme = _scheme(args.scheme)
    if args.s is not None and not args.s > 0:
        raise ConfigError("--s must be positive")
    if args.s is None and scheme.s_is_unbounded:
        raise ConfigError(f"{scheme.name} has unbounded order; pass --s")
    cert = kernels.certify(scheme, args.jmax, args.s)
    cert = {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in cert.items()}
    _emit(dumps(cert), args.out)
    return EXIT_OK if cert["verdict"] == "PASS" else EXIT_FAIL


def plot_report(report: Mapping, svg_path: str) -> None:
    """log2-error against level with a guide line of the predicted slope."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise RuntimeError("plotting needs matplotlib; install the 'plot' extra") from exc
    import numpy as np

    levels = np.asarray(report["levels"], dtype=float)
    errors = np.asarray(report["errors"], dtype=float)
    if levels.size == 0:
        raise RuntimeError("report has no positive errors to plot")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(levels, np.log2(errors), "o-", label="measured")
    guide = rates.omega(report["E"], report["L"], levels)
    shift = np.log2(errors[0]) - np.log2(guide[0])
    ax.plot(levels, np.log2(guide) + shift, "--", label=f"predicted (E={report['E']:.3g})")
    ax.set_xlabel("level")
    ax.set_ylabel("log2 error")
    ax.legend()
    fig.tight_layout()
    target = _resolve(svg_path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(target, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_rates(args) -> int:
    if args.plot:
        if not args.svg:
            raise ConfigError("--plot needs --svg")
        plot_report(_load_json(args.plot), args.svg)
        return EXIT_OK
    if not args.config:
        raise ConfigError("rates needs --config (or --plot)")
    config = ExperimentConfig.from_dict(_load_json(args.config), seed=args.seed)
    report = run_config(config)
    out = args.out or config.out
    data = report.to_json_dict()
    if out and out.endswith(".csv"):
        if not isinstance(report, rates.RateReport):
            raise ConfigError("CSV output is only available for rate experiments")
        _emit(report.to_csv(), out)
    else:
        _emit(dumps(data), out)
    return EXIT_OK if data["verdict"] in ("PASS", "EXACT") else EXIT_FAIL


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsewiener",
                                     description="Sparse-grid quasi-interpolation in Wiener spaces.")
    parser.add_argument("--threads", type=int, default=None, help="numba worker threads")
    parser.add_argument("--seed", type=int, default=None, help="override experiment seeds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="weighted Wiener norm of a function file")
    p.add_argument("--function", required=True)
    p.add_argument("--variant", choices=["iso", "mix", "hybrid"], required=True)
    p.add_argument("--q", default="2")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("approx", help="apply a sparse-grid quasi-interpolant")
    p.add_argument("--scheme", required=True)
    p.add_argument("--set", default="smolyak", help="smolyak | energy | full | T=<t>")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--energy", help="alpha,beta,gamma,eps,sigma for --set energy (n is xi)")
    p.add_argument("--function", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("grid", help="index sets, node sets and counts")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=float)
    p.add_argument("--T", default="0")
    p.add_argument("--energy", help="alpha,beta,gamma,eps,sigma")
    p.add_argument("--xi", type=float)
    p.add_argument("--emit", choices=["members", "points", "counts"], default="members")
    p.add_argument("--out")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("check-conditions", help="certify kernel conditions for a scheme")
    p.add_argument("--scheme", required=True)
    p.add_argument("--jmax", type=int, default=10)
    p.add_argument("--s", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check_conditions)

    p = sub.add_parser("rates", help="run a rate experiment or plot a report")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--plot", help="report JSON to plot")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_rates)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            parser.error("--threads must be positive")
        from sparsewiener import _accel
        if _accel.HAVE_NUMBA:
            import numba
            numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, RuntimeError, CutoffError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
