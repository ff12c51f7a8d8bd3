"""
Monte Carlo eigenvalue samples.

Gaussian ensembles are drawn from the tridiagonal model

    H = (1/sqrt(2 beta)) tridiag(chi_{beta(N-1)}, ..., chi_beta; N(0,2) diagonal),

whose eigenvalues follow |Delta|^beta exp(-beta sum x^2 / 2). The unitary
Wishart ensemble is drawn as W = B B^T / 2 with B lower bidiagonal,
diagonal chi_{2M}, chi_{2M-2}, ..., chi_{2(M-N+1)} and subdiagonal chi_{2(N-1)}, ..., chi_2.

Samples are generated in chunks; chunk c of a run is keyed by (seed, c) through
a Philox generator, so a batch depends only on (spec, seed, count, chunk_size).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import linalg, stats

import eigenstrata
from eigenstrata.ensembles import EnsembleKind, EnsembleSpec
from eigenstrata.exceptions import InvalidSpec, RankOutOfRange
from eigenstrata.utilities.logging import get_logger

logger = get_logger(__name__)

Bins = Union[int, str, np.ndarray]

_ORACLE_STREAM = 2**32 - 1


@dataclass(frozen=True)
class SampleBatch:
    spec: EnsembleSpec
    seed: int
    count: int
    eigenvalues: np.ndarray

    def rank(self, k: int) -> np.ndarray:
        """Sorted values of the k-th smallest eigenvalue across the batch."""
        if not 1 <= k <= self.spec.N:
            raise RankOutOfRange(f"rank {k} outside [1, {self.spec.N}]")
        return np.sort(self.eigenvalues[:, k - 1])

    def pooled(self) -> np.ndarray:
        return self.eigenvalues.ravel()


@dataclass(frozen=True)
class RankHistogram:
    k: int
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def density(self) -> np.ndarray:
        """Counts normalised to unit area."""
        return self.counts / (self.total * np.diff(self.bin_edges))


# ------------ random variates ------------


def generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))


def chi(rng: np.random.Generator, dof: np.ndarray, size: int) -> np.ndarray:
    """chi_nu = sqrt(2 Gamma(nu/2)), one row of len(dof) values per sample."""
    return np.sqrt(2 * rng.gamma(np.asarray(dof, dtype=float) / 2, size=(size, len(dof))))


# ------------ eigenvalues ------------


def tridiag_eigenvalues(diag: np.ndarray, offdiag: np.ndarray) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix by Sturm bisection, ascending."""
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    if len(offdiag) != len(diag) - 1:
        raise ValueError("off-diagonal must be one shorter than the diagonal")
    if len(diag) == 1:
        return diag.copy()
    scale = max(np.abs(diag).max(), np.abs(offdiag).max(), 1.0)
    return linalg.eigvalsh_tridiagonal(
        diag, offdiag, lapack_driver="stebz", tol=1e-12 * scale
    )


def _tridiagonal_models(spec: EnsembleSpec, rng: np.random.Generator, size: int):
    N = spec.N
    if spec.is_gaussian:
        beta = spec.beta
        norm = 1 / math.sqrt(2 * beta)
        diag = norm * math.sqrt(2) * rng.standard_normal((size, N))
        off = norm * chi(rng, beta * np.arange(N - 1, 0, -1), size)
        return diag, off
    M = spec.M
    d = chi(rng, 2 * (M - np.arange(N)), size)
    e = chi(rng, 2 * np.arange(N - 1, 0, -1), size)
    diag = d**2
    diag[:, 1:] += e**2
    return diag / 2, d[:, :-1] * e / 2


def _sample_chunk(spec: EnsembleSpec, seed: int, chunk: int, size: int) -> np.ndarray:
    rng = generator(seed, chunk)
    diag, off = _tridiagonal_models(spec, rng, size)
    return np.array([tridiag_eigenvalues(d, o) for d, o in zip(diag, off)])


def sample_ensemble(
    spec: EnsembleSpec, seed: Optional[int] = None, count: Optional[int] = None
) -> SampleBatch:
    """
    Draw `count` eigenvalue sets, each sorted ascending.

    Raises:
        InvalidSpec: count < 1.
    """
    seed = eigenstrata.settings.seed if seed is None else seed
    count = eigenstrata.settings.samples if count is None else count
    if count < 1:
        raise InvalidSpec("count must be at least 1")
    chunk_size = eigenstrata.settings.chunk_size
    sizes = [min(chunk_size, count - start) for start in range(0, count, chunk_size)]
    workers = eigenstrata.settings.workers
    logger.debug(
        "sampling %d %s matrices in %d chunks on %d workers", count, spec, len(sizes), workers
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map keeps chunk order, so the merge is independent of scheduling
        parts = list(pool.map(lambda job: _sample_chunk(spec, seed, *job), enumerate(sizes)))
    return SampleBatch(spec=spec, seed=seed, count=count, eigenvalues=np.vstack(parts))


def dense_eigenvalues(spec: EnsembleSpec, seed: int, count: int) -> SampleBatch:
    """Small-N oracle: full matrices with the same eigenvalue law, dense solver."""
    rng = generator(seed, _ORACLE_STREAM)
    N = spec.N
    rows = []
    for _ in range(count):
        if spec.kind is EnsembleKind.GOE:
            g = rng.standard_normal((N, N))
            h = (g + g.T) / 2
        elif spec.kind is EnsembleKind.GUE:
            g = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2)
            h = (g + g.conj().T) / 2
        else:
            x = (rng.standard_normal((spec.M, N)) + 1j * rng.standard_normal((spec.M, N))) / math.sqrt(2)
            h = x.conj().T @ x
        rows.append(np.linalg.eigvalsh(h))
    return SampleBatch(spec=spec, seed=seed, count=count, eigenvalues=np.array(rows))


# ------------ histograms and goodness of fit ------------


def bin_edges(values: np.ndarray, bins: Bins = "fd") -> np.ndarray:
    """Freedman-Diaconis edges by default."""
    return np.histogram_bin_edges(values, bins=bins)


def rank_histogram(batch: SampleBatch, k: int, bins: Optional[Bins] = None) -> RankHistogram:
    """
    Histogram of the k-th smallest eigenvalue.

    Raises:
        RankOutOfRange: k outside [1, N].
    """
    values = batch.rank(k)
    if bins is None:
        edges = bin_edges(batch.pooled())
    else:
        edges = bin_edges(values, bins)
    counts, edges = np.histogram(values, bins=edges)
    return RankHistogram(k=k, bin_edges=edges, counts=counts)


def eigenvalue_histogram(batch: SampleBatch, bins: Bins = "fd") -> RankHistogram:
    """All eigenvalues pooled, normalised to unit area (multiply by N for the density)."""
    values = batch.pooled()
    counts, edges = np.histogram(values, bins=bin_edges(values, bins))
    return RankHistogram(k=0, bin_edges=edges, counts=counts)


def ks_statistic(empirical: np.ndarray, model_cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup |F_emp - F_model| over the sample points."""
    sample = np.asarray(empirical, dtype=float)
    if sample.size == 0:
        raise ValueError("KS statistic needs a nonempty sample")
    return float(stats.kstest(sample, lambda t: np.asarray(model_cdf(t), dtype=float)).statistic)
