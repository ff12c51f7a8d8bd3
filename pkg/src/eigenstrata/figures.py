"""
Data behind each reproduced figure, as named columns over a shared abscissa.

The CSV written for a figure is the ground truth; the SVG is a plain line plot
of the same columns.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from eigenstrata import asymptotics, exactdensity, gaussdecomp, montecarlo, orderstats, tracywidom
from eigenstrata.ensembles import EnsembleKind, EnsembleSpec
from eigenstrata.exceptions import ConfigError
from eigenstrata.runconfig import RunConfig
from eigenstrata.utilities.io import atomic_path, write_csv
from eigenstrata.utilities.logging import get_logger

logger = get_logger(__name__)

FIGURE_IDS = tuple(range(1, 15))

_GUMBEL_N = 100


@dataclass
class FigureData:
    figure_id: int
    title: str
    columns: dict[str, np.ndarray]

    @property
    def x_name(self) -> str:
        return next(iter(self.columns))

    @property
    def curves(self) -> list[str]:
        return list(self.columns)[1:]


def _label(prefix: str, k: int) -> str:
    return f"{prefix}_k{k:02d}"


def histogram_on_grid(values: np.ndarray, x: np.ndarray, bins="fd") -> np.ndarray:
    """Unit-area histogram density of `values`, read off at each abscissa."""
    counts, edges = np.histogram(values, bins=np.histogram_bin_edges(values, bins=bins))
    heights = counts / (counts.sum() * np.diff(edges))
    index = np.searchsorted(edges, x, side="right") - 1
    inside = (index >= 0) & (index < len(heights))
    return np.where(inside, heights[np.clip(index, 0, len(heights) - 1)], 0.0)


def _samples(config: RunConfig, spec: EnsembleSpec) -> Optional[montecarlo.SampleBatch]:
    if config.samples == 0:
        return None
    return montecarlo.sample_ensemble(spec, config.seed, config.samples)


def _parent_map(config: RunConfig, spec: EnsembleSpec) -> orderstats.DensityMap:
    if config.parent == "semicircle":
        return orderstats.DensityMap(
            density=lambda x: np.asarray(asymptotics.semicircle(spec.N, x), dtype=float),
            cumulative=lambda x: np.asarray(asymptotics.counting_xi(spec, x), dtype=float),
        )
    return exactdensity.exact_density_map(spec)


def _display_grid(config: RunConfig, decomposition: gaussdecomp.Decomposition, points: int = 801) -> np.ndarray:
    x = config.grid_or(decomposition.x[0], decomposition.x[-1], points)
    return np.clip(x, decomposition.x[0], decomposition.x[-1])


def _bulk_column(spec: EnsembleSpec, k: int, x: np.ndarray) -> np.ndarray:
    lo, hi = spec.edges
    inside = (x > lo) & (x < hi)
    values = np.full_like(x, np.nan)
    if np.any(inside):
        values[inside] = gaussdecomp.bulk_component_density(spec, k, x[inside])
    return values


# ------------ independent variables ------------


def iid_ranks(config: RunConfig) -> FigureData:
    N = config.N
    x = config.grid_or(-3.0, 3.0, 601)
    parent = orderstats.gaussian_map(N)
    columns = {"x": x, "density": parent.density(x)}
    for k in range(1, N + 1):
        spec = orderstats.OrderStatSpec(N=N, n=N - k)
        columns[_label("rank", k)] = orderstats.mapped_rank_density(parent, spec, x)
    return FigureData(1, f"Ranked values of {N} independent Gaussians", columns)


def gumbel_limit(config: RunConfig) -> FigureData:
    z = config.grid_or(-3.0, 8.0, 551)
    columns = {"z": z, "gumbel": orderstats.gumbel_density(z)}
    if config.samples:
        rng = montecarlo.generator(config.seed, 0)
        largest = (rng.standard_normal((config.samples, _GUMBEL_N)) / math.sqrt(2)).max(axis=1)
        scaled = np.asarray(orderstats.gumbel_variable(_GUMBEL_N, largest))
        columns["simulation"] = histogram_on_grid(scaled, z)
    return FigureData(2, f"Largest of {_GUMBEL_N} Gaussians against the Gumbel law", columns)


# ------------ N = 2 ------------


def _two_by_two(figure_id: int, kind: EnsembleKind, config: RunConfig) -> FigureData:
    x = config.grid_or(-4.0, 4.0, 801)
    extreme: Callable = exactdensity.gue_n2_extreme
    if kind is EnsembleKind.GOE:
        extreme = exactdensity.goe_n2_extreme
    columns = {
        "x": x,
        "density": exactdensity.density(EnsembleSpec.create(kind, 2), x),
        "eig_largest": extreme(x, "largest"),
        "eig_smallest": extreme(x, "smallest"),
        "uncorr_largest": exactdensity.uncorrelated_n2(kind, 0, x),
        "uncorr_smallest": exactdensity.uncorrelated_n2(kind, 1, x),
    }
    return FigureData(figure_id, f"{kind.value} N=2 density and its two eigenvalues", columns)


# ------------ asymptotic accuracy ------------


def _relative_difference(figure_id: int, spec: EnsembleSpec, config: RunConfig) -> FigureData:
    lo, hi = spec.edges
    x = config.grid_or(lo, hi, 2001)
    x = x[(x > lo) & (x < hi)]
    x = x[asymptotics.asymptotic_mask(spec, x)]
    exact = np.asarray(exactdensity.density(spec, x), dtype=float)
    approx = np.asarray(asymptotics.asymptotic_density(spec, x), dtype=float)
    columns = {
        "xi": np.asarray(asymptotics.counting_xi(spec, x), dtype=float),
        "relative_difference": (approx - exact) / exact,
    }
    return FigureData(figure_id, f"{spec}: (asymptotic - exact) / exact", columns)


# ------------ decompositions ------------


def _components(figure_id: int, spec: EnsembleSpec, config: RunConfig) -> FigureData:
    decomposition = gaussdecomp.decompose(spec)
    x = _display_grid(config, decomposition)
    columns = {"x": x, "density": exactdensity.density(spec, x)}
    for k in range(1, spec.N + 1):
        columns[_label("exact", k)] = decomposition.component(k, x)
    for k in range(1, spec.N + 1):
        columns[_label("asymptotic", k)] = _bulk_column(spec, k, x)
    batch = _samples(config, spec)
    if batch is not None:
        for k in range(1, spec.N + 1):
            columns[_label("simulation", k)] = histogram_on_grid(batch.rank(k), x)
    return FigureData(figure_id, f"{spec}: individual eigenvalue densities", columns)


def _components_with_overlay(figure_id: int, spec: EnsembleSpec, config: RunConfig) -> FigureData:
    decomposition = gaussdecomp.decompose(spec)
    x = _display_grid(config, decomposition)
    parent = _parent_map(config, spec)
    columns = {"x": x, "density": exactdensity.density(spec, x)}
    for k in range(1, spec.N + 1):
        columns[_label("eig", k)] = decomposition.component(k, x)
    for k in range(1, spec.N + 1):
        rank = orderstats.OrderStatSpec(N=spec.N, n=spec.N - k)
        columns[_label("uncorr", k)] = orderstats.mapped_rank_density(parent, rank, x)
    return FigureData(figure_id, f"{spec}: eigenvalues against uncorrelated variables", columns)


# ------------ extreme eigenvalues ------------


def _largest(figure_id: int, spec: EnsembleSpec, config: RunConfig, with_bulk: bool = False) -> FigureData:
    decomposition = gaussdecomp.decompose(spec)
    scaling = tracywidom.edge_scaling(spec)
    lo, hi = scaling.to_x(-7.0), scaling.to_x(5.0)
    x = np.clip(config.grid_or(lo, hi, 601), decomposition.x[0], decomposition.x[-1])
    columns = {"x": x}
    batch = _samples(config, spec)
    if batch is not None:
        columns["simulation"] = histogram_on_grid(batch.rank(spec.N), x)
    columns["nearly_gaussian"] = decomposition.component(spec.N, x)
    columns["tracy_widom"] = tracywidom.scaled_tw_density(spec, x)
    if with_bulk:
        columns["asymptotic"] = _bulk_column(spec, spec.N, x)
    return FigureData(figure_id, f"{spec}: largest eigenvalue", columns)


def _smallest(figure_id: int, spec: EnsembleSpec, config: RunConfig) -> FigureData:
    decomposition = gaussdecomp.decompose(spec)
    hi = asymptotics.inverse_xi(spec, min(3.0, spec.N))
    x = config.grid_or(decomposition.x[0], hi, 601)
    x = np.clip(x, decomposition.x[0], decomposition.x[-1])
    columns = {"x": x, "nearly_gaussian": decomposition.component(1, x)}
    batch = _samples(config, spec)
    if batch is not None:
        columns["simulation"] = histogram_on_grid(batch.rank(1), x)
    return FigureData(figure_id, f"{spec}: smallest eigenvalue", columns)


# ------------ dispatch ------------


def build_figure(figure_id: int, config: Optional[RunConfig] = None) -> FigureData:
    """
    Compute the columns of a figure.

    Raises:
        ConfigError: unknown figure id.
    """
    config = config or RunConfig()
    gue = config.spec_for(EnsembleKind.GUE)
    goe = config.spec_for(EnsembleKind.GOE)
    wishart = config.spec_for(EnsembleKind.WISHART)
    builders: dict[int, Callable[[], FigureData]] = {
        1: lambda: iid_ranks(config),
        2: lambda: gumbel_limit(config),
        3: lambda: _two_by_two(3, EnsembleKind.GUE, config),
        4: lambda: _relative_difference(4, gue, config),
        5: lambda: _components(5, gue, config),
        6: lambda: _components_with_overlay(6, gue, config),
        7: lambda: _largest(7, gue, config, with_bulk=True),
        8: lambda: _two_by_two(8, EnsembleKind.GOE, config),
        9: lambda: _components(9, goe, config),
        10: lambda: _largest(10, goe, config),
        11: lambda: _relative_difference(11, wishart, config),
        12: lambda: _components(12, wishart, config),
        13: lambda: _largest(13, wishart, config),
        14: lambda: _smallest(14, wishart, config),
    }
    if figure_id not in builders:
        raise ConfigError(f"figure id must be in 1..14, got {figure_id}")
    logger.info("building figure %d", figure_id)
    return builders[figure_id]()


def render_svg(data: FigureData, path: Path) -> Path:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise ConfigError("SVG output needs matplotlib: install eigenstrata[plot]") from exc

    fig, ax = plt.subplots(figsize=(7, 4.5))
    x = data.columns[data.x_name]
    for name in data.curves:
        ax.plot(x, data.columns[name], lw=0.8, label=name if len(data.curves) <= 8 else None)
    ax.set_xlabel(data.x_name)
    ax.set_title(data.title, fontsize=10)
    if len(data.curves) <= 8:
        ax.legend(fontsize=7)
    with atomic_path(path) as tmp:
        fig.savefig(tmp, format="svg")
    plt.close(fig)
    return path


def write_figure(data: FigureData, config: RunConfig) -> list[Path]:
    """Write fig<id>.csv (and fig<id>.svg when requested) under the output directory."""
    out = Path(config.outputs)
    paths = [write_csv(out / f"fig{data.figure_id}.csv", data.columns)]
    if config.svg:
        paths.append(render_svg(data, out / f"fig{data.figure_id}.svg"))
    return paths


# ------------ cumulant tables ------------

TABLE_KINDS = {1: EnsembleKind.GUE, 2: EnsembleKind.GOE}


@dataclass
class CumulantTable:
    table_id: int
    title: str
    computed: list[tracywidom.TableRow]
    reference: list[tracywidom.TableRow]


def build_table(table_id: int, config: Optional[RunConfig] = None) -> CumulantTable:
    """
    Tracy-Widom cumulants and those of the largest nearly-Gaussian component,
    next to the reference values.

    Raises:
        ConfigError: unknown table id.
    """
    if table_id not in TABLE_KINDS:
        raise ConfigError(f"table id must be 1 or 2, got {table_id}")
    config = config or RunConfig()
    spec = config.spec_for(TABLE_KINDS[table_id])
    computed = [
        tracywidom.TableRow(
            label="Tracy-Widom",
            cumulants=tracywidom.tw_cumulants(tracywidom.default_solution(), spec.beta),
        ),
        tracywidom.TableRow(
            label=f"nearly Gaussian (N={spec.N})",
            cumulants=tracywidom.edge_component_cumulants(spec),
        ),
    ]
    return CumulantTable(
        table_id=table_id,
        title=f"Cumulants of the largest eigenvalue, beta = {spec.beta}",
        computed=computed,
        reference=tracywidom.REFERENCE_TABLES[table_id],
    )
