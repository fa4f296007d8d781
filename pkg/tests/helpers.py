"""Independent brute-force oracles used to verify library computations.

Everything here sticks to first principles (explicit enumeration, textbook
normal equations) so that agreement with the library is meaningful.
"""

from __future__ import annotations

import numpy as np


def enumerate_treatments(n: int, p: float):
    """Yield every treatment vector with its Bernoulli probability."""
    for code in range(2**n):
        d = np.array([(code >> i) & 1 for i in range(n)], dtype=np.int64)
        k = int(d.sum())
        yield d, p**k * (1.0 - p) ** (n - k)


def treated_neighbor_counts(adjacency, d: np.ndarray) -> np.ndarray:
    return np.array([int(d[list(nbrs)].sum()) for nbrs in adjacency], dtype=np.int64)


def exact_dbar_star_moments(net, p: float) -> tuple[float, float, float]:
    """(mean, variance, covariance-with-degree) of the zero-imputed fraction.

    Expectations run over all 2^n treatment vectors and a uniformly drawn
    node, entirely by enumeration.
    """
    degree = net.degree.astype(float)
    safe = np.maximum(degree, 1.0)
    e_x = e_xx = e_xg = 0.0
    for d, prob in enumerate_treatments(net.n, p):
        t = treated_neighbor_counts(net.adjacency, d)
        dbar_star = np.where(degree > 0, t / safe, 0.0)
        e_x += prob * float(dbar_star.mean())
        e_xx += prob * float((dbar_star**2).mean())
        e_xg += prob * float((dbar_star * degree).mean())
    mean_degree = float(degree.mean())
    return e_x, e_xx - e_x**2, e_xg - e_x * mean_degree


def normal_equation_ols(x: np.ndarray, y: np.ndarray):
    """Textbook normal-equation solve with homoskedastic standard errors."""
    xtx_inv = np.linalg.inv(x.T @ x)
    beta = xtx_inv @ (x.T @ y)
    resid = y - x @ beta
    sigma2 = float(resid @ resid) / (x.shape[0] - x.shape[1])
    se = np.sqrt(np.diag(sigma2 * xtx_inv))
    return beta, se
