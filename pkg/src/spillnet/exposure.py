"""Randomized treatment assignment and treated-neighbor exposure statistics.

The treated-neighbor *fraction* is undefined for nodes without neighbors, so
``ExposureProfile`` stores it only for the positive-degree subsample; the
zero-imputed variant used by the naive regression is a separate, full-length
array. Keeping the two apart is deliberate: conflating them is exactly the
practice this package exists to diagnose.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .graph import DegreeSummary, Network


@dataclass(frozen=True)
class TreatmentVector:
    """Binary treatment indicators plus the assignment probability."""

    d: np.ndarray
    p: float

    @property
    def n(self) -> int:
        return int(self.d.size)


def assign_bernoulli(n: int, p: float, seed: int) -> TreatmentVector:
    """Draw iid Bernoulli(p) treatments, deterministic given ``seed`` (PCG64).

    Assignment reads only (n, p, seed), never the network, so treatments are
    independent of the graph by construction.
    """
    if n < 1:
        raise ParameterError("need at least one unit")
    if not 0.0 < p < 1.0:
        raise ParameterError("treatment probability must lie strictly in (0, 1)")
    rng = np.random.default_rng(seed)
    d = (rng.random(n) < p).astype(np.int64)
    return TreatmentVector(d=d, p=p)


@dataclass(frozen=True)
class ExposureProfile:
    """Per-node exposure statistics for one (network, treatment) pair.

    ``dbar`` (fraction of treated neighbors) is aligned with ``positive``,
    the sorted indices of nodes that have neighbors; it simply does not exist
    for isolated nodes. ``dbar_star`` is the full-length zero-imputed version.
    """

    degree: np.ndarray
    treated_neighbors: np.ndarray
    positive: np.ndarray
    dbar: np.ndarray
    dbar_star: np.ndarray

    @property
    def n(self) -> int:
        return int(self.degree.size)

    @property
    def isolated(self) -> np.ndarray:
        return self.degree == 0


def compute_exposure(net: Network, tr: TreatmentVector) -> ExposureProfile:
    """Count treated neighbors and form the (imputed) treated fractions."""
    if tr.n != net.n:
        raise ParameterError(f"treatment length {tr.n} does not match n={net.n}")
    degree = net.degree
    d = tr.d
    u, v = net.edge_arrays
    t = np.zeros(net.n, dtype=np.int64)
    if u.size:
        t += np.bincount(u, weights=d[v].astype(float), minlength=net.n).astype(np.int64)
        t += np.bincount(v, weights=d[u].astype(float), minlength=net.n).astype(np.int64)
    positive = np.flatnonzero(degree > 0)
    dbar = t[positive] / degree[positive]
    dbar_star = np.zeros(net.n, dtype=float)
    dbar_star[positive] = dbar
    return ExposureProfile(
        degree=degree,
        treated_neighbors=t,
        positive=positive,
        dbar=dbar,
        dbar_star=dbar_star,
    )


def cov_dbar_star_degree_closed_form(summary: DegreeSummary, p: float) -> float:
    """Covariance between the zero-imputed treated fraction and degree.

    Evaluated on the empirical degree distribution:
    {E(degree | degree>0) - E(degree)} * p * Pr(degree>0). Strictly positive
    whenever the network mixes isolated and non-isolated nodes; exactly zero
    when it does not.
    """
    if summary.mean_degree_positive is None:
        return 0.0  # all nodes isolated
    gap = summary.mean_degree_positive - summary.mean_degree
    return gap * p * summary.positive_share


@dataclass(frozen=True)
class ExposureDiagnostics:
    """Sample covariances / r-squared between degree and treated fractions.

    Fields are None when undefined (empty subsample, or an r-squared whose
    underlying variance is zero).
    """

    cov_dbar_degree_on_positive: float | None
    cov_dbar_star_degree: float
    r2_dbar: float | None
    r2_dbar_star: float | None


def _cov(x: np.ndarray, y: np.ndarray) -> float:
    # population (1/n) convention, matching the linear-projection algebra
    return float(np.mean((x - x.mean()) * (y - y.mean())))


def _r2(x: np.ndarray, y: np.ndarray) -> float | None:
    vx = _cov(x, x)
    vy = _cov(y, y)
    if vx == 0.0 or vy == 0.0:
        return None
    return _cov(x, y) ** 2 / (vx * vy)


def empirical_exposure_diagnostics(profile: ExposureProfile) -> ExposureDiagnostics:
    """Sample covariance and squared-correlation diagnostics for one draw."""
    gamma = profile.degree.astype(float)
    pos = profile.positive
    if pos.size > 0:
        g_pos = gamma[pos]
        cov_pos = _cov(g_pos, profile.dbar)
        r2_pos = _r2(g_pos, profile.dbar)
    else:
        cov_pos = None
        r2_pos = None
    return ExposureDiagnostics(
        cov_dbar_degree_on_positive=cov_pos,
        cov_dbar_star_degree=_cov(gamma, profile.dbar_star),
        r2_dbar=r2_pos,
        r2_dbar_star=_r2(gamma, profile.dbar_star),
    )


def write_scatter_csv(profile: ExposureProfile, path: str | Path) -> None:
    """Write per-node scatter data; ``dbar`` is left empty for isolated nodes."""
    dbar_by_node = dict(zip(profile.positive.tolist(), profile.dbar.tolist()))
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "degree", "dbar", "dbar_star", "isolated"])
        for i in range(profile.n):
            writer.writerow(
                [
                    i,
                    int(profile.degree[i]),
                    dbar_by_node.get(i, ""),
                    float(profile.dbar_star[i]),
                    int(i not in dbar_by_node),
                ]
            )
