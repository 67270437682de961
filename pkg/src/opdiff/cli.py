from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NoReturn

import numpy as np
import typer
from pydantic import ValidationError
from pydantic_core import to_json
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from opdiff.bounds import FAMILY_OF, uniform_grid, verify
from opdiff.config import OpdiffConfig
from opdiff.durrmeyer import moment_adjudication
from opdiff.exceptions import (
    ConvergenceError,
    DomainError,
    ExprSyntaxError,
    OpdiffError,
    ParameterError,
    UnknownIdentifierError,
)
from opdiff.expr import from_source
from opdiff.figures import build_figure
from opdiff.models import BoundReport, Family, JacobiParams, OperatorSpec, Theorem, Verdict
from opdiff.operators import derivative, difference
from opdiff.report import emit_figure, figure_summary, write_csv, write_json

app = typer.Typer(
    name="opdiff",
    help="Derivatives of positive linear operators on C[0,1] and their error bounds",
    no_args_is_help=True,
)
console = Console()
err_console = Console(stderr=True)

EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_VIOLATED = 4


@dataclass(frozen=True)
class _State:
    config: OpdiffConfig
    as_json: bool


def _handle_error(e: Exception) -> NoReturn:
    if isinstance(e, ExprSyntaxError):
        expected = ", ".join(sorted(e.expected))
        hint = f" (expected {expected})" if expected else ""
        err_console.print(f"[red]Syntax error: {escape(str(e))}{escape(hint)}[/red]")
        code = EXIT_USAGE
    elif isinstance(e, UnknownIdentifierError):
        err_console.print(f"[red]Error: {escape(str(e))}[/red]")
        code = EXIT_USAGE
    elif isinstance(e, ParameterError):
        err_console.print(f"[red]Invalid parameters: {escape(str(e))}[/red]")
        code = EXIT_USAGE
    elif isinstance(e, ValidationError):
        for err in e.errors():
            where = ".".join(str(part) for part in err["loc"]) or "input"
            err_console.print(f"[red]Invalid {escape(where)}: {escape(err['msg'])}[/red]")
        code = EXIT_USAGE
    elif isinstance(e, DomainError):
        err_console.print(f"[red]Domain error: {escape(str(e))}[/red]")
        code = EXIT_DOMAIN
    elif isinstance(e, ConvergenceError):
        err_console.print(f"[red]Internal error: {escape(str(e))}[/red]")
        code = 1
    elif isinstance(e, OpdiffError):
        err_console.print(f"[red]Error: {escape(str(e))}[/red]")
        code = 1
    else:
        err_console.print(f"[red]Unexpected error: {escape(str(e))}[/red]")
        code = 1
    raise typer.Exit(code=code)


def _setup_logging(debug: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def _state(ctx: typer.Context) -> _State:
    state = ctx.find_root().obj
    if isinstance(state, _State):
        return state
    return _State(config=OpdiffConfig(), as_json=False)


def _spec(op: Family, n: int, r: int, k: int, alpha: float, beta: float) -> OperatorSpec:
    return OperatorSpec(
        family=op,
        n=n,
        r=r,
        k=k if op is Family.Q_OP else 0,
        params=JacobiParams(alpha=alpha, beta=beta),
    )


def _echo_json(document: Any) -> None:
    typer.echo(to_json(document, indent=2).decode())


@app.callback()
def main(
    ctx: typer.Context,
    grid: int | None = typer.Option(None, "--grid", help="Points of the evaluation grid"),
    norm_grid: int | None = typer.Option(
        None, "--norm-grid", help="Points of the sup-norm and modulus grid"
    ),
    quad_extra: int | None = typer.Option(
        None, "--quad-extra", help="Quadrature nodes beyond the operator degree"
    ),
    out: Path | None = typer.Option(None, "--out", help="Output directory"),
    as_json: bool = typer.Option(False, "--json", help="Print JSON instead of tables"),
    debug: bool = typer.Option(False, "--debug", help="Verbose logging on stderr"),
) -> None:
    """Evaluate operators, measure derivative differences and check the bounds."""
    overrides: dict[str, Any] = {
        "grid_points": grid,
        "norm_grid_points": norm_grid,
        "quad_extra": quad_extra,
        "output_dir": out,
    }
    if debug:
        overrides["debug"] = True
    try:
        config = OpdiffConfig(**{k: v for k, v in overrides.items() if v is not None})
    except ValidationError as e:
        _handle_error(e)
    _setup_logging(config.debug)
    ctx.obj = _State(config=config, as_json=as_json)


@app.command("eval")
def eval_cmd(
    ctx: typer.Context,
    op: Family = typer.Option(..., "--op", help="Operator family"),
    n: int = typer.Option(..., "--n", help="Operator degree"),
    r: int = typer.Option(0, "--r", help="Derivative order"),
    k: int = typer.Option(1, "--k", help="Antiderivative order (q_op only)"),
    alpha: float = typer.Option(0.0, "--alpha", help="Jacobi exponent at 0 (durrmeyer only)"),
    beta: float = typer.Option(0.0, "--beta", help="Jacobi exponent at 1 (durrmeyer only)"),
    f: str = typer.Option(..., "--f", help="Expression in x"),
    grid: int | None = typer.Option(None, "--grid", help="Points of the evaluation grid"),
) -> None:
    """Write (L_n f)^(r) on a uniform grid as CSV."""
    state = _state(ctx)
    config = state.config
    try:
        spec = _spec(op, n, r, k, alpha, beta)
        fn = from_source(f, r)
        x = uniform_grid(grid or config.grid_points)
        values = derivative(
            spec, fn, x, quad_extra=config.quad_extra, panels=config.antiderivative_panels
        )
        path = write_csv(
            config.output_dir / f"eval_{op.value}_n{n}_r{r}.csv", x, {"value": values}
        )
    except Exception as e:
        _handle_error(e)

    if state.as_json:
        _echo_json({"file": str(path), "rows": int(x.size), "label": spec.label()})
        return
    console.print(f"[green]Wrote {x.size} rows of {spec.label()} to {path}[/green]")


@app.command()
def diff(
    ctx: typer.Context,
    op: Family = typer.Option(..., "--op", help="Operator family"),
    n: int = typer.Option(..., "--n", help="Operator degree"),
    r: int = typer.Option(..., "--r", help="Derivative order"),
    k: int = typer.Option(1, "--k", help="Antiderivative order (q_op only)"),
    alpha: float = typer.Option(0.0, "--alpha", help="Jacobi exponent at 0 (durrmeyer only)"),
    beta: float = typer.Option(0.0, "--beta", help="Jacobi exponent at 1 (durrmeyer only)"),
    f: str = typer.Option(..., "--f", help="Expression in x"),
    scaled: bool = typer.Option(False, "--scaled", help="Use the scaled derivative"),
    grid: int | None = typer.Option(None, "--grid", help="Points of the evaluation grid"),
) -> None:
    """Write E_{n,r}(f; x) = |(L_n f)^(r) - L_{n-r}(f^(r))| on a uniform grid as CSV."""
    state = _state(ctx)
    config = state.config
    try:
        spec = _spec(op, n, r, k, alpha, beta)
        fn = from_source(f, r)
        x = uniform_grid(grid or config.grid_points)
        errors = difference(
            spec,
            fn,
            x,
            scaled=scaled,
            quad_extra=config.quad_extra,
            panels=config.antiderivative_panels,
        )
        path = write_csv(
            config.output_dir / f"diff_{op.value}_n{n}_r{r}.csv", x, {"error": errors}
        )
    except Exception as e:
        _handle_error(e)

    sup = float(np.max(errors))
    at = float(x[int(np.argmax(errors))])
    if state.as_json:
        _echo_json({"file": str(path), "label": spec.label(), "sup_error": sup, "argmax": at})
        return
    table = Table(title=f"E_{{{n},{r}}} for {spec.label()}")
    table.add_column("sup error", style="cyan", justify="right")
    table.add_column("at x", justify="right")
    table.add_column("file", style="dim")
    table.add_row(f"{sup:.6e}", f"{at:.4f}", str(path))
    console.print(table)


def _print_report(report: BoundReport) -> None:
    colour = {
        Verdict.HOLDS: "green",
        Verdict.HOLDS_LOOSE: "yellow",
        Verdict.VIOLATED: "red",
    }[report.verdict]
    table = Table(title=f"{report.theorem.value} on {report.spec.label()}")
    table.add_column("Term")
    table.add_column("Value", style="cyan", justify="right")
    table.add_row("lhs sup", f"{report.lhs_sup:.6e}")
    table.add_row("sup-norm term", f"{report.rhs.supnorm_term:.6e}")
    table.add_row("modulus (grid)", f"{report.rhs.modulus_term_grid:.6e}")
    table.add_row("modulus (Lipschitz)", f"{report.rhs.modulus_term_lipschitz:.6e}")
    for term in report.rhs.extra_terms:
        table.add_row(term.name, f"{term.value:.6e}")
    table.add_row("rhs total (grid)", f"{report.rhs_total_grid:.6e}")
    table.add_row("rhs total (Lipschitz)", f"{report.rhs_total_lipschitz:.6e}")
    table.add_row("verdict", f"[{colour}]{report.verdict.value}[/{colour}]")
    err_console.print(table)


@app.command("verify")
def verify_cmd(
    ctx: typer.Context,
    theorem: Theorem = typer.Argument(..., help="Theorem or corollary to check"),
    op: Family | None = typer.Option(
        None, "--op", help="Operator family, defaults to the theorem's"
    ),
    n: int = typer.Option(..., "--n", help="Operator degree"),
    r: int = typer.Option(..., "--r", help="Derivative order"),
    k: int = typer.Option(1, "--k", help="Antiderivative order (q_op only)"),
    alpha: float = typer.Option(0.0, "--alpha", help="Jacobi exponent at 0 (durrmeyer only)"),
    beta: float = typer.Option(0.0, "--beta", help="Jacobi exponent at 1 (durrmeyer only)"),
    f: str = typer.Option(..., "--f", help="Expression in x"),
    check_refinement: bool = typer.Option(
        False, "--check-refinement", help="Repeat on doubled grids and compare"
    ),
) -> None:
    """Check a theorem's bound for one operator and function; exit 4 when violated."""
    state = _state(ctx)
    config = state.config
    family = op or FAMILY_OF[theorem]
    try:
        spec = _spec(family, n, r, k, alpha, beta)
        fn = from_source(f, r + 2)
        report = verify(
            theorem,
            spec,
            fn,
            config.grid_points,
            norm_grid_points=config.norm_grid_points,
            quad_extra=config.quad_extra,
            panels=config.antiderivative_panels,
            atol=config.verdict_atol,
            check_refinement=check_refinement or config.check_refinement,
        )
        document = report.to_document()
        write_json(
            config.output_dir / f"verify_{theorem.value}_{family.value}_n{n}_r{r}.json",
            document,
        )
    except Exception as e:
        _handle_error(e)

    _echo_json(document)
    if not state.as_json:
        _print_report(report)
    if report.verdict is Verdict.VIOLATED:
        raise typer.Exit(code=EXIT_VIOLATED)


@app.command()
def figure(
    ctx: typer.Context,
    example_id: int = typer.Argument(..., metavar="EXAMPLE", help="Worked example 1..4"),
    workers: int | None = typer.Option(None, "--workers", help="Threads for the per-n sweep"),
) -> None:
    """Regenerate the two figures of a worked example as CSV and SVG, plus a JSON summary."""
    state = _state(ctx)
    config = state.config
    if workers is not None:
        config = config.model_copy(update={"workers": max(1, workers)})
    try:
        data = build_figure(example_id, config)
        paths = emit_figure(data, config.output_dir)
    except Exception as e:
        _handle_error(e)

    summary = figure_summary(data)
    if state.as_json:
        _echo_json(summary.model_dump(mode="json"))
        return
    table = Table(title=f"Example {example_id}: sup errors ({summary.theorem.value})")
    table.add_column("n", style="cyan", justify="right")
    table.add_column("sup E", justify="right")
    for s in summary.sup_errors:
        table.add_row(str(s.n), f"{s.sup_error:.6e}")
    console.print(table)
    trend = "strictly decreasing" if summary.strictly_decreasing else "NOT decreasing"
    console.print(f"Sup errors: {trend}")
    console.print(
        f"Left curves at n={summary.left_n}: max gap {summary.max_left_gap:.6e}, "
        f"bound {summary.rhs_total_grid:.6e} ({summary.verdict.value})"
    )
    for path in paths:
        console.print(f"[dim]{path}[/dim]")


@app.command()
def moments(
    ctx: typer.Context,
    n: int = typer.Option(..., "--n", help="Operator degree"),
    r: int = typer.Option(..., "--r", help="Moment order"),
    alpha: float = typer.Option(0.0, "--alpha", help="Jacobi exponent at 0"),
    beta: float = typer.Option(0.0, "--beta", help="Jacobi exponent at 1"),
    x: float = typer.Option(0.5, "--x", help="Evaluation point"),
) -> None:
    """Compare both closed forms of the Durrmeyer moment M_n(e_r; x) with quadrature."""
    state = _state(ctx)
    try:
        params = JacobiParams(alpha=alpha, beta=beta)
        result = moment_adjudication(n, r, params, x, state.config.quad_extra)
    except Exception as e:
        _handle_error(e)

    if state.as_json:
        document = result.model_dump(mode="json")
        document["constant_ratio"] = result.constant_ratio
        _echo_json(document)
        return
    table = Table(title=f"M_{n}(e_{r}; {x:g}), alpha={alpha:g}, beta={beta:g}")
    table.add_column("Form")
    table.add_column("Value", style="cyan", justify="right")
    table.add_column("|Value - quadrature|", justify="right")
    table.add_row("quadrature", f"{result.quadrature:.17g}", "-")
    table.add_row("corrected", f"{result.corrected:.17g}", f"{result.corrected_error:.3e}")
    table.add_row("printed", f"{result.printed:.17g}", f"{result.printed_error:.3e}")
    console.print(table)
    console.print(f"Constant-term ratio printed/corrected: {result.constant_ratio:.6g}")


if __name__ == "__main__":
    app()
