# src/cli/main.py
"""
index-transforms command line.

    python -m src.cli.main kernel --mu -0.5 --grid-x 0.5:3:3 --grid-tau 0.5:2:3
    python -m src.cli.main forward --direction G --fn "gauss_even_tau(a=1)" --nu 0.25
    python -m src.cli.main roundtrip --direction F --fn "centered_power_exp(a=1)"
    python -m src.cli.main verify ode
    python -m src.cli.main wedge --beta 3.14159 --mu 0.25

Exit codes: 0 pass, 1 tolerance breach, 2 configuration error, 3 numerical failure.
"""

import itertools
import logging
import math
import warnings
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table
from tqdm import tqdm

from src.cli.config import Direction, OutputFormat, RunConfig, apply_contour_overrides, build_config
from src.cli.output import write_report, write_table
from src.kernel.ode import gamma_cosine_pair_check, ode_terms
from src.kernel.phi import phi_direct, phi_fourier_cosine, phi_mellin_barnes
from src.models import Route, TransformParameters, TransformResult
from src.specfun.bessel import bessel_k_imag, lebedev_bound
from src.specfun.legendre import legendre_p
from src.transforms.auxiliary import AuxRoute, h_function, legendre_square_identity, u_mu
from src.transforms.forward import (bound_check_F, bound_check_G, forward_F, forward_F_contour,
                                    forward_G)
from src.transforms.functions import SampledFunction, Variable
from src.transforms.inversion import invert_F, invert_G, roundtrip_F, roundtrip_G
from src.utils.errors import (ConfigError, DomainError, HypothesisWarning, IndexTransformError,
                              ParameterError)
from src.utils.logging_config import setup_logging
from src.wedge.solver import WedgeProblem, boundary_traces, decay, pde_terms, solve_wedge

logger = logging.getLogger(__name__)
console = Console()

app = typer.Typer(name="index-transforms", add_completion=False,
                  help="Index transforms with the product of associated Legendre functions as kernel.")

EXIT_PASS, EXIT_BREACH, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_FUNCTIONS = {
    ("forward", Direction.F): "exp_decay(a=1)",
    ("forward", Direction.G): "gauss_even_tau(a=1)",
    ("roundtrip", Direction.F): "centered_power_exp(a=1)",
    ("roundtrip", Direction.G): "cosh_gauss_tau(a=1)",
}

SUITES = ("ode", "identities", "bounds", "wedge")


class Check:
    """One line of a verification report"""

    def __init__(self, name: str, measured: float, limit: float, passed: Optional[bool] = None, detail: str = ""):
        self.name = name
        self.measured = float(measured)
        self.limit = float(limit)
        self.passed = bool(self.measured <= self.limit) if passed is None else bool(passed)
        self.detail = detail

    def row(self) -> Dict[str, object]:
        return {"check": self.name, "measured": self.measured, "limit": self.limit,
                "passed": self.passed, "detail": self.detail}


def relative_difference(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0.0 else 0.0


def _execute(body: Callable[[], bool]) -> None:
    """Run a command body and map its outcome onto the exit-code contract"""
    setup_logging()
    try:
        passed = body()
    except (ValidationError, ConfigError, ParameterError, DomainError) as e:
        logger.error(f"configuration error: {e}")
        console.print(f"[red]configuration error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG)
    except IndexTransformError as e:
        logger.error(f"numerical failure: {e}")
        console.print(f"[red]numerical failure:[/red] {e}")
        raise typer.Exit(EXIT_NUMERIC)
    if not passed:
        console.print("[yellow]tolerance breached[/yellow]")
        raise typer.Exit(EXIT_BREACH)


def _function(cfg: RunConfig, variable: Variable) -> SampledFunction:
    if not cfg.fn and not cfg.fn_file:
        default = DEFAULT_FUNCTIONS.get((cfg.command, cfg.direction))
        if default is None:
            raise ConfigError("a function is required (--fn name(params) or --fn-file path.csv)")
        return SampledFunction.parse(default)
    return cfg.function(variable)


def _summary(title: str, rows: List[Dict[str, object]], columns: List[str]) -> None:
    table = Table(title=title)
    for column in columns:
        table.add_column(column)
    for row in rows:
        table.add_row(*[f"{row[c]:.6g}" if isinstance(row[c], float) else str(row[c]) for c in columns])
    console.print(table)


def _collect(caught: List[warnings.WarningMessage]) -> List[str]:
    messages = sorted({str(w.message) for w in caught if issubclass(w.category, HypothesisWarning)})
    for message in messages:
        console.print(f"[yellow]warning:[/yellow] {message}")
    return messages


# common options
MU = typer.Option(None, "--mu", help="Order mu of the associated Legendre functions")
GRID_X = typer.Option(None, "--grid-x", help="x grid min:max:count[:log]")
GRID_TAU = typer.Option(None, "--grid-tau", help="tau grid min:max:count[:log]")
FN = typer.Option(None, "--fn", help="Builtin function, e.g. 'exp_decay(a=1)'")
FN_FILE = typer.Option(None, "--fn-file", help="Two-column CSV (abscissa, value)")
TOL = typer.Option(None, "--tol", help="Pass/fail tolerance")
HEIGHT = typer.Option(None, "--contour-height", help="Contour half height")
NODES = typer.Option(None, "--contour-nodes", help="Contour nodes")
OUT = typer.Option(None, "--out", help="Output path (default: settings output_dir/<command>.<format>)")
FORMAT = typer.Option(None, "--format", help="csv or json")
CONFIG = typer.Option(None, "--config", help="YAML file with flag values")
DIRECTION = typer.Option(None, "--direction", help="F (functions of x) or G (functions of tau)")


@app.command()
def kernel(mu: Optional[float] = MU, grid_x: Optional[str] = GRID_X, grid_tau: Optional[str] = GRID_TAU,
           tol: Optional[float] = TOL, contour_height: Optional[float] = HEIGHT,
           contour_nodes: Optional[int] = NODES, out: Optional[Path] = OUT,
           format: Optional[OutputFormat] = FORMAT, config: Optional[Path] = CONFIG):
    """Kernel values by the direct, contour and Fourier-cosine routes with their pairwise differences"""
    def body() -> bool:
        cfg = build_config("kernel", config, mu=mu, grid_x=grid_x, grid_tau=grid_tau, tol=tol,
                           contour_height=contour_height, contour_nodes=contour_nodes, out=out, format=format)
        apply_contour_overrides(cfg)
        p = cfg.params
        rows = []
        points = list(itertools.product(cfg.grid_x.points(), cfg.grid_tau.points()))
        for x, tau in tqdm(points, desc="kernel"):
            direct = phi_direct(x, tau, p).value
            contour = phi_mellin_barnes(x, tau, p).value
            cosine = phi_fourier_cosine(x, tau, p).value
            diff = max(relative_difference(direct, contour), relative_difference(direct, cosine),
                       relative_difference(contour, cosine))
            rows.append({"x": x, "tau": tau, "phi_direct": direct, "phi_mb": contour, "phi_fc": cosine,
                         "max_rel_diff": diff})
        frame = pd.DataFrame(rows)
        write_table(frame, cfg.output_path(), cfg.format, "kernel", cfg.public())
        worst = float(frame["max_rel_diff"].max())
        _summary("kernel", [{"points": len(frame), "worst": worst, "tol": cfg.tol}], ["points", "worst", "tol"])
        return worst <= cfg.tol

    _execute(body)


@app.command()
def forward(direction: Optional[Direction] = DIRECTION, mu: Optional[float] = MU,
            nu: Optional[float] = typer.Option(None, "--nu", help="Weight index of the norm bound"),
            fn: Optional[str] = FN, fn_file: Optional[Path] = FN_FILE,
            grid_x: Optional[str] = GRID_X, grid_tau: Optional[str] = GRID_TAU,
            contour_height: Optional[float] = HEIGHT, contour_nodes: Optional[int] = NODES,
            out: Optional[Path] = OUT, format: Optional[OutputFormat] = FORMAT,
            config: Optional[Path] = CONFIG):
    """Forward transform F (f over x, result over tau) or G (g over tau, result over x)"""
    def body() -> bool:
        cfg = build_config("forward", config, direction=direction, mu=mu, nu=nu, fn=fn, fn_file=fn_file,
                           grid_x=grid_x, grid_tau=grid_tau, contour_height=contour_height,
                           contour_nodes=contour_nodes, out=out, format=format)
        apply_contour_overrides(cfg)
        p = cfg.params
        if cfg.direction is Direction.F:
            f = _function(cfg, Variable.X)
            result = forward_F_contour(f, p, cfg.grid_tau.points()) if f.has_image \
                else forward_F(f, p, cfg.grid_tau.points())
            frame = result.to_frame("tau", "F")
            bound = bound_check_F(f, p, cfg.nu, result) if cfg.nu is not None else None
        else:
            g = _function(cfg, Variable.TAU)
            result = forward_G(g, p, cfg.grid_x.points())
            frame = result.to_frame("x", "G")
            bound = bound_check_G(g, p, cfg.nu, result) if cfg.nu is not None else None
        extra = {"route": result.route.value}
        if bound is not None:
            extra["bound"] = {"lhs": bound.lhs, "rhs": bound.rhs, "holds": bound.holds}
            _summary("norm bound", [{"lhs": bound.lhs, "rhs": bound.rhs, "holds": bound.holds}],
                     ["lhs", "rhs", "holds"])
        write_table(frame, cfg.output_path(), cfg.format, "forward", cfg.public(), extra)
        return bound is None or bound.holds

    _execute(body)


@app.command()
def invert(samples: Path = typer.Option(..., "--samples", help="CSV of transform samples (abscissa, value)"),
           direction: Optional[Direction] = DIRECTION, mu: Optional[float] = MU,
           grid_x: Optional[str] = GRID_X, grid_tau: Optional[str] = GRID_TAU,
           epsilon: Optional[float] = typer.Option(None, "--epsilon", help="Regularization of the G inversion"),
           out: Optional[Path] = OUT, format: Optional[OutputFormat] = FORMAT, config: Optional[Path] = CONFIG):
    """Invert sampled F values (over tau from 0) at --grid-x, or sampled G values (over u) at --grid-tau"""
    def body() -> bool:
        cfg = build_config("invert", config, samples=samples, direction=direction, mu=mu, grid_x=grid_x,
                           grid_tau=grid_tau, epsilon=epsilon, out=out, format=format)
        p = cfg.params
        variable = Variable.TAU if cfg.direction is Direction.F else Variable.X
        table = SampledFunction.from_csv(cfg.samples, variable=variable)
        data = TransformResult(table.grid, table.values, np.zeros_like(table.values), p, Route.DIRECT,
                               {"samples": str(cfg.samples)})
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", HypothesisWarning)
            if cfg.direction is Direction.F:
                result = invert_F(data, p, cfg.grid_x.points())
                frame = result.to_frame("x", "f")
            else:
                result = invert_G(data, p, cfg.grid_tau.points(), cfg.epsilon)
                frame = result.to_frame("tau", "g")
        messages = _collect(caught)
        write_table(frame, cfg.output_path(), cfg.format, "invert", cfg.public(),
                    {"route": result.route.value, "warnings": messages})
        return True

    _execute(body)


@app.command()
def roundtrip(direction: Optional[Direction] = DIRECTION, mu: Optional[float] = MU,
              fn: Optional[str] = FN, fn_file: Optional[Path] = FN_FILE,
              grid_x: Optional[str] = GRID_X, grid_tau: Optional[str] = GRID_TAU,
              epsilon: Optional[float] = typer.Option(None, "--epsilon", help="Regularization of the G inversion"),
              tol: Optional[float] = TOL, out: Optional[Path] = OUT, format: Optional[OutputFormat] = FORMAT,
              config: Optional[Path] = CONFIG):
    """Forward transform followed by the inversion formula, compared point by point"""
    def body() -> bool:
        cfg = build_config("roundtrip", config, direction=direction, mu=mu, fn=fn, fn_file=fn_file,
                           grid_x=grid_x, grid_tau=grid_tau, epsilon=epsilon, tol=tol, out=out, format=format)
        p = cfg.params
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", HypothesisWarning)
            if cfg.direction is Direction.F:
                source = _function(cfg, Variable.X)
                recon, _ = roundtrip_F(source, p, cfg.grid_x.points())
            else:
                source = _function(cfg, Variable.TAU)
                recon, _ = roundtrip_G(source, p, cfg.grid_tau.points(), epsilon=cfg.epsilon)
        messages = _collect(caught)
        expected = np.asarray(source(recon.abscissas), dtype=float)
        # floor keeps points near a zero of the input from dominating
        scale = np.maximum(np.abs(expected), 1e-3 * float(np.max(np.abs(expected))) + np.finfo(float).tiny)
        errors = np.abs(recon.values - expected) / scale
        points = [{"abscissa": a, "input": e, "reconstruction": r, "relative_error": d}
                  for a, e, r, d in zip(recon.abscissas, expected, recon.values, errors)]
        max_error = float(np.max(errors))
        report = {"function": source.label, "points": points, "max_error": max_error,
                  "tail_ratio": recon.meta.get("tail_ratio"), "warnings": messages}
        if cfg.format is OutputFormat.JSON:
            write_report(report, cfg.output_path(), "roundtrip", cfg.public())
        else:
            write_table(pd.DataFrame(points), cfg.output_path(), cfg.format, "roundtrip", cfg.public())
        _summary(f"roundtrip {cfg.direction.value}: {source.label}", points,
                 ["abscissa", "input", "reconstruction", "relative_error"])
        return max_error <= cfg.tol

    _execute(body)


# --- verification suites ---------------------------------------------------------

def _suite_ode(cfg: RunConfig) -> List[Check]:
    p = cfg.params
    checks = []
    for x, tau in tqdm(list(itertools.product(cfg.grid_x.points(), cfg.grid_tau.points())), desc="ode"):
        terms = ode_terms(x, tau, p)
        checks.append(Check(f"ode x={x:g} tau={tau:g}", terms.relative, cfg.tol))
    return checks


def _suite_identities(cfg: RunConfig) -> List[Check]:
    checks = []
    for mu, tau, z in itertools.product((-0.7, -0.3, 0.2), (0.5, 1.0, 2.0), (1.2, 2.0, 5.0)):
        a = legendre_p(mu, complex(0.0, tau), z)
        b = legendre_p(mu, complex(-1.0, -tau), z)
        checks.append(Check(f"degree reflection mu={mu:g} tau={tau:g} z={z:g}",
                            abs(a - b) / max(abs(a), 1e-300), 1e-9))
    for s, tau in ((0.0, 0.0), (0.3, 1.0), (-0.5, 2.0)):
        lhs, rhs = gamma_cosine_pair_check(s, tau)
        checks.append(Check(f"gamma cosine pair s={s:g} tau={tau:g}", relative_difference(lhs, rhs), 1e-9))
    for tau, y in itertools.product((0.5, 1.0, 2.0, 4.0), (0.25, 1.0, 4.0)):
        k = abs(bessel_k_imag(tau, y))
        bound = lebedev_bound(tau, y)
        checks.append(Check(f"Lebedev inequality tau={tau:g} y={y:g}", k, bound, passed=k < bound))
    p = TransformParameters(mu=-0.3)
    for x, tau in ((0.5, 1.0), (1.0, 0.5), (2.0, 2.0)):
        lhs, rhs = legendre_square_identity(x, tau, p)
        checks.append(Check(f"Legendre square x={x:g} tau={tau:g}", relative_difference(lhs, rhs), 1e-8))
    for mu in (-0.5, -0.75):
        q = TransformParameters(mu=mu)
        for x in (0.5, 2.0):
            a = h_function(x, q, AuxRoute.CONTOUR)
            b = h_function(x, q, AuxRoute.CLOSED_FORM)
            checks.append(Check(f"h routes mu={mu:g} x={x:g}", relative_difference(a, b), 1e-8))
            a = u_mu(x, q, AuxRoute.CONTOUR)
            b = u_mu(x, q, AuxRoute.CLOSED_FORM)
            checks.append(Check(f"U routes mu={mu:g} y={x:g}", relative_difference(a, b), 1e-8))
    return checks


def _suite_bounds(cfg: RunConfig) -> List[Check]:
    p = cfg.params
    checks = []
    taus = np.linspace(0.0, 4.0, 17)
    for name in ("exp_decay(a=1)", "power_exp(a=1, b=1)", "centered_power_exp(a=1)"):
        f = SampledFunction.parse(name)
        bound = bound_check_F(f, p, cfg.nu, forward_F_contour(f, p, taus))
        checks.append(Check(f"F bound {f.label}", bound.lhs, bound.rhs, passed=bound.holds))
    xs = np.geomspace(1e-2, 1e2, 21)
    for name in ("gauss_even_tau(a=1)", "gauss_tau(a=1)"):
        g = SampledFunction.parse(name)
        bound = bound_check_G(g, p, cfg.nu, forward_G(g, p, xs))
        checks.append(Check(f"G bound {g.label}", bound.lhs, bound.rhs, passed=bound.holds))
    return checks


def _suite_wedge(cfg: RunConfig) -> List[Check]:
    prob = WedgeProblem(beta=cfg.beta, p=cfg.params, g=cfg.function(Variable.TAU))
    traces = boundary_traces(prob, cfg.grid_x.points())
    checks = [
        Check("u(r, 0) = 0", float(np.max(np.abs(traces.lower))), 0.0, passed=bool(np.all(traces.lower == 0.0))),
        Check("u(r, beta) = G g", traces.upper_deviation, 1e-8),
    ]
    for r, frac in tqdm(list(itertools.product((0.5, 1.0, 3.0), (0.25, 0.5, 0.75))), desc="wedge residual"):
        terms = pde_terms(prob, r, frac * prob.beta)
        checks.append(Check(f"residual r={r:g} theta={frac:g} beta", terms.relative, cfg.tol))
    falling = decay(prob, 0.5 * prob.beta)
    checks.append(Check("decay in r", falling.measured, math.inf, passed=falling.satisfied, detail=falling.detail))
    return checks


@app.command()
def verify(suite: str = typer.Argument("ode", help="ode, identities, bounds or wedge"),
           mu: Optional[float] = MU, nu: Optional[float] = typer.Option(None, "--nu"),
           beta: Optional[float] = typer.Option(None, "--beta"),
           fn: Optional[str] = FN, grid_x: Optional[str] = GRID_X, grid_tau: Optional[str] = GRID_TAU,
           tol: Optional[float] = TOL, out: Optional[Path] = OUT, format: Optional[OutputFormat] = FORMAT,
           config: Optional[Path] = CONFIG):
    """Verification suites with measured residuals per check"""
    def body() -> bool:
        if suite not in SUITES:
            raise ConfigError(f"unknown suite '{suite}'; choose from {', '.join(SUITES)}")
        cfg = build_config("verify", config, suite=suite, mu=mu, nu=nu, beta=beta, fn=fn, grid_x=grid_x,
                           grid_tau=grid_tau, tol=tol, out=out, format=format)
        runner = {"ode": _suite_ode, "identities": _suite_identities,
                  "bounds": _suite_bounds, "wedge": _suite_wedge}[suite]
        checks = runner(cfg)
        frame = pd.DataFrame([c.row() for c in checks])
        write_table(frame, cfg.output_path(), cfg.format, "verify", cfg.public())
        _summary(f"verify {suite}", [c.row() for c in checks], ["check", "measured", "limit", "passed"])
        return all(c.passed for c in checks)

    _execute(body)


@app.command()
def wedge(beta: Optional[float] = typer.Option(None, "--beta", help="Wedge opening in (0, 2 pi)"),
          mu: Optional[float] = MU, fn: Optional[str] = FN, fn_file: Optional[Path] = FN_FILE,
          grid_x: Optional[str] = typer.Option(None, "--grid-x", help="r grid min:max:count[:log]"),
          grid_theta: Optional[str] = typer.Option(None, "--grid-theta", help="theta grid (default 5 points on [0, beta])"),
          residuals: Optional[bool] = typer.Option(None, "--residuals/--no-residuals"),
          tol: Optional[float] = TOL, out: Optional[Path] = OUT, format: Optional[OutputFormat] = FORMAT,
          config: Optional[Path] = CONFIG):
    """Solution of the wedge boundary value problem on an (r, theta) grid"""
    def body() -> bool:
        cfg = build_config("wedge", config, beta=beta, mu=mu, fn=fn, fn_file=fn_file, grid_x=grid_x,
                           grid_theta=grid_theta, residuals=residuals, tol=tol, out=out, format=format)
        prob = WedgeProblem(beta=cfg.beta, p=cfg.params, g=cfg.function(Variable.TAU))
        grid = solve_wedge(prob, cfg.grid_x.points(), cfg.thetas(), with_residuals=cfg.residuals)
        rows = []
        for i, r in enumerate(grid.rs):
            for j, theta in enumerate(grid.thetas):
                row = {"r": r, "theta": theta, "u": grid.values[i, j], "err": grid.errors[i, j]}
                if grid.residuals is not None:
                    row["residual"] = grid.residuals[i, j]
                rows.append(row)
        frame = pd.DataFrame(rows)
        write_table(frame, cfg.output_path(), cfg.format, "wedge", cfg.public())
        if grid.residuals is None:
            return True
        worst = float(np.max(grid.residuals))
        _summary("wedge", [{"points": len(frame), "worst residual": worst, "tol": cfg.tol}],
                 ["points", "worst residual", "tol"])
        return worst <= cfg.tol

    _execute(body)


if __name__ == "__main__":
    app()
