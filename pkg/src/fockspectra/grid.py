"""Quadrature grids on the cube Omega = (-a, a)^d and on the symmetric pair space.

Two rules are supported: the composite midpoint rule (default, adequate for
merely bounded/measurable data) and tensor Gauss-Legendre (opt-in, for
analytic integrands).  Nodes always carry an explicit trailing coordinate
axis of length ``d``.

The pair grid enumerates unordered node pairs {i, j} with i <= j and weights
W_ij = (2 - delta_ij) * w_i * w_j, so that for a symmetric function f the
squared L2 norm over Omega^2 is  sum_{i<=j} W_ij |f(x_i, x_j)|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RULES = ("midpoint", "gauss-legendre")


@dataclass(frozen=True, eq=False)
class Grid:
    """Tensor-product quadrature grid on (-a, a)^d.

    nodes has shape (N, d) with N = n_per_dim**d; weights has shape (N,)
    and sums to (2a)^d.
    """

    d: int
    a: float
    rule: str
    n_per_dim: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.nodes.shape[0]


@dataclass(frozen=True, eq=False)
class PairGrid:
    """Unordered-pair grid over a base Grid.

    pairs has shape (P, 2) with index pairs i <= j in row-major upper
    triangular order, P = N(N+1)/2; pair_weights sums to (sum of base
    weights)^2.
    """

    base: Grid
    pairs: np.ndarray
    pair_weights: np.ndarray

    @property
    def p(self) -> int:
        return self.pairs.shape[0]


def _rule_1d(n: int, a: float, rule: str) -> tuple[np.ndarray, np.ndarray]:
    if rule == "midpoint":
        h = 2.0 * a / n
        x = -a + (np.arange(n) + 0.5) * h
        w = np.full(n, h)
    elif rule == "gauss-legendre":
        xi, wi = np.polynomial.legendre.leggauss(n)
        x, w = a * xi, a * wi
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}; expected one of {RULES}")
    return x, w


def make_grid(d: int, a: float, n_per_dim: int, rule: str = "midpoint") -> Grid:
    """Build a tensor-product grid with n_per_dim nodes per dimension."""
    if d < 1:
        raise ValueError("dimension d must be a positive integer")
    if a <= 0:
        raise ValueError("half-width a must be positive")
    if n_per_dim < 2:
        raise ValueError("n_per_dim must be at least 2")
    x1, w1 = _rule_1d(n_per_dim, a, rule)
    axes = np.meshgrid(*([x1] * d), indexing="ij")
    nodes = np.stack([ax.ravel() for ax in axes], axis=-1)
    weights = np.ones(1)
    for _ in range(d):
        weights = np.multiply.outer(weights, w1).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return Grid(d=d, a=float(a), rule=rule, n_per_dim=n_per_dim, nodes=nodes, weights=weights)


def make_pair_grid(grid: Grid) -> PairGrid:
    """Enumerate unordered node pairs with symmetric-subspace weights."""
    n = grid.n
    i, j = np.triu_indices(n)
    pairs = np.stack([i, j], axis=-1)
    w = grid.weights
    pair_weights = np.where(i == j, 1.0, 2.0) * w[i] * w[j]
    pairs.setflags(write=False)
    pair_weights.setflags(write=False)
    return PairGrid(base=grid, pairs=pairs, pair_weights=pair_weights)
