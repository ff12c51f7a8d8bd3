import json
import platform
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import numpy as np
import pydantic
import scipy
import typer
from pydantic import TypeAdapter, ValidationError
from rich.markup import escape
from rich.table import Table
from typer import Context, Exit

import eigenstrata
from eigenstrata import __version__, asymptotics, exactdensity, figures, gaussdecomp, tracywidom, verify
from eigenstrata.exceptions import ConfigError, EigenstrataError
from eigenstrata.runconfig import RunConfig
from eigenstrata.utilities.io import format_csv, write_csv
from eigenstrata.utilities.rich import console, err_console

app = typer.Typer(no_args_is_help=True)

EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

ConfigOption = typer.Option(None, "--config", "-c", help="key=value run configuration file.")
EnsembleOption = typer.Option(None, "--ensemble", "-e", help="GUE, GOE or Wishart.")
NOption = typer.Option(None, "--n", help="Matrix size N.")
AlphaOption = typer.Option(None, "--alpha", help="Wishart alpha = M - N.")
LoOption = typer.Option(None, "--lo", help="Lower end of the abscissa grid.")
HiOption = typer.Option(None, "--hi", help="Upper end of the abscissa grid.")
PointsOption = typer.Option(None, "--points", help="Number of grid points.")
OutOption = typer.Option(None, "--out", "-o", help="Output directory.")


@contextmanager
def exit_codes():
    """Map configuration errors to exit 2 and numerical failures to exit 3."""
    try:
        yield
    except (ConfigError, ValidationError) as exc:
        err_console.print(f"[red]configuration error:[/red] {escape(str(exc))}")
        raise Exit(code=EXIT_CONFIG)
    except EigenstrataError as exc:
        err_console.print(f"[red]{type(exc).__name__}:[/red] {escape(str(exc))}")
        raise Exit(code=EXIT_NUMERICAL)


def _emit_csv(columns: dict[str, np.ndarray], out: Optional[Path]) -> None:
    if out is None:
        typer.echo(format_csv(columns), nl=False)
    else:
        write_csv(out, columns)
        err_console.print(f"wrote {out}")


@app.command()
def figure(
    figure_id: int = typer.Argument(..., help="Figure number, 1-14."),
    config: Optional[Path] = ConfigOption,
    ensemble: Optional[str] = EnsembleOption,
    n: Optional[int] = NOption,
    alpha: Optional[int] = AlphaOption,
    lo: Optional[float] = LoOption,
    hi: Optional[float] = HiOption,
    points: Optional[int] = PointsOption,
    samples: Optional[int] = typer.Option(None, "--samples", help="Monte Carlo matrices; 0 skips simulation."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Monte Carlo seed."),
    out: Optional[Path] = OutOption,
    svg: Optional[bool] = typer.Option(None, "--svg/--no-svg", help="Also render an SVG plot."),
    parent: Optional[str] = typer.Option(None, "--parent", help="Overlay parent density: exact or semicircle."),
):
    """Write the data behind a figure as fig<id>.csv (and fig<id>.svg)."""
    with exit_codes():
        run = RunConfig.load(
            config,
            dict(
                ensemble=ensemble, n=n, alpha=alpha, lo=lo, hi=hi, points=points,
                samples=samples, seed=seed, out=out, svg=svg, parent=parent,
            ),
        )
        data = figures.build_figure(figure_id, run)
        for path in figures.write_figure(data, run):
            console.print(f"wrote {path}")


@app.command()
def table(
    table_id: int = typer.Argument(..., help="Table number: 1 (unitary) or 2 (orthogonal)."),
    config: Optional[Path] = ConfigOption,
    n: Optional[int] = NOption,
):
    """Print Tracy-Widom and nearly-Gaussian edge cumulants beside the reference values."""
    with exit_codes():
        result = figures.build_table(table_id, RunConfig.load(config, dict(n=n)))

    g = Table(title=result.title)
    g.add_column("")
    g.add_column("source")
    for name in ("mean", "std dev", "skewness", "excess kurtosis"):
        g.add_column(name, justify="right")
    for source, rows in (("computed", result.computed), ("reference", result.reference)):
        for row in rows:
            c = row.cumulants
            g.add_row(
                row.label, source,
                f"{c.mean:.5f}", f"{c.std_dev:.4f}",
                f"{c.skewness:.3f}", f"{c.excess_kurtosis:.3f}",
            )
    console.print(g)


@app.command(name="verify")
def verify_command(
    full: bool = typer.Option(False, "--full", help="Include the Monte Carlo criteria."),
    samples: Optional[int] = typer.Option(None, "--samples", help="Monte Carlo matrices for --full."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Monte Carlo seed for --full."),
):
    """Run the acceptance suite and print a JSON report; exit 1 if any criterion fails."""
    report = verify.run_suite(
        "full" if full else "fast",
        samples=samples or eigenstrata.settings.samples,
        seed=eigenstrata.settings.seed if seed is None else seed,
    )
    payload = TypeAdapter(list[verify.Criterion]).dump_python(report, by_alias=True)
    # inf is not valid JSON
    for entry in payload:
        if not np.isfinite(entry["value"]):
            entry["value"] = None
    typer.echo(json.dumps(payload, indent=2))
    failed = [c.name for c in report if not c.passed]
    if failed:
        err_console.print(f"[red]failed:[/red] {', '.join(failed)}")
        raise Exit(code=EXIT_VERIFY_FAILED)


@app.command()
def density(
    config: Optional[Path] = ConfigOption,
    ensemble: Optional[str] = EnsembleOption,
    n: Optional[int] = NOption,
    alpha: Optional[int] = AlphaOption,
    lo: Optional[float] = LoOption,
    hi: Optional[float] = HiOption,
    points: Optional[int] = PointsOption,
    asymptotic: bool = typer.Option(False, "--asymptotic", help="Add the asymptotic density column."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="CSV file; stdout when omitted."),
):
    """Tabulate the exact one-point density."""
    with exit_codes():
        run = RunConfig.load(config, dict(ensemble=ensemble, n=n, alpha=alpha, lo=lo, hi=hi, points=points))
        spec = run.ensemble
        x = run.grid_or(*spec.support_band(), 801)
        columns = {"x": x, "density": exactdensity.density(spec, x)}
        if asymptotic:
            values = np.full_like(x, np.nan)
            mask = asymptotics.asymptotic_mask(spec, x)
            values[mask] = asymptotics.asymptotic_density(spec, x[mask])
            columns["asymptotic"] = values
        _emit_csv(columns, out)


@app.command()
def decompose(
    config: Optional[Path] = ConfigOption,
    ensemble: Optional[str] = EnsembleOption,
    n: Optional[int] = NOption,
    alpha: Optional[int] = AlphaOption,
    summary: bool = typer.Option(False, "--summary", help="Print per-component moments instead of the CSV."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="CSV file; stdout when omitted."),
):
    """Split the exact density into its per-eigenvalue components."""
    with exit_codes():
        run = RunConfig.load(config, dict(ensemble=ensemble, n=n, alpha=alpha))
        spec = run.ensemble
        result = gaussdecomp.decompose(spec)
        if summary:
            g = Table(title=f"{spec}: eigenvalue components")
            for name in ("k", "kind", "mass", "mean", "std dev", "skewness"):
                g.add_column(name, justify="right")
            for component in result.components:
                m = result.moments(component.k)
                g.add_row(
                    str(component.k), component.kind.value, f"{m.mass:.4f}",
                    f"{m.mean:.4f}", f"{m.variance ** 0.5:.4f}", f"{m.skewness:.3f}",
                )
            console.print(g)
            return
        columns = {"x": result.x, "density": result.table.rho}
        for k in range(1, spec.N + 1):
            columns[f"component_k{k:02d}"] = result.component_table(k)
        _emit_csv(columns, out)


@app.command()
def tw(
    beta: int = typer.Option(2, "--beta", help="1 (orthogonal) or 2 (unitary)."),
    lo: float = typer.Option(-7.0, "--lo"),
    hi: float = typer.Option(5.0, "--hi"),
    points: int = typer.Option(601, "--points"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="CSV file; stdout when omitted."),
):
    """Tabulate the Tracy-Widom distribution from the Painleve II solution."""
    with exit_codes():
        if points < 2 or not lo < hi:
            raise ConfigError("the grid needs lo < hi and at least two points")
        sol = tracywidom.default_solution()
        s = np.linspace(lo, hi, points)
        columns = {
            "s": s,
            "cdf": tracywidom.tw_cdf(sol, s, beta),
            "density": tracywidom.tw_density(sol, s, beta),
        }
        _emit_csv(columns, out)


@app.command()
def version(ctx: Context):
    if ctx.resilient_parsing:
        return

    info = {
        "eigenstrata version": __version__,
        "NumPy version": np.__version__,
        "SciPy version": scipy.__version__,
        "Pydantic version": pydantic.__version__,
        "Python version": platform.python_version(),
        "Platform": platform.platform(),
        "Path": Path(__file__).resolve().parents[3],
    }

    g = Table.grid(padding=(0, 1))
    g.add_column(justify="right")
    g.add_column()
    for k, v in info.items():
        g.add_row(k + ":", str(v).replace("\n", " "))
    console.print(g)

    raise Exit()


if __name__ == "__main__":
    app()
