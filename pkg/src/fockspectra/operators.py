"""Dense Hermitian realizations of the block operator matrix.

Weight-normalized coordinates are used throughout: a one-boson function f is
represented by u_i = sqrt(w_i) f(x_i) and a symmetric two-boson function by
u_p = sqrt(W_p) f(x_i, x_j) over unordered pairs p = {i, j}.  In these
coordinates multiplication operators are exactly diagonal and the discrete
adjoint of the coupling block is literally the conjugate transpose, so the
assembled matrices are Hermitian by construction and eigenvalue counts are
those of honest Hermitian matrices.

The coupling block row i has nonzero entries only at pairs containing i:

    pair {i, j}, j != i :  sqrt(w_j / 2) * v1(x_i, x_j)
    pair {i, i}         :  sqrt(w_i)     * v1(x_i, x_i)

which reproduces the quadrature of  integral v1(x_i, s) f(x_i, s) ds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .grid import Grid, PairGrid
from .model import ModelSpec, mesh_samples

HERMITICITY_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class DiscreteBlocks:
    """Blocks of the discretized operator in weight-normalized coordinates."""

    h00: float
    h01: np.ndarray              # (N,) row coupling the vacuum to one boson
    h11: np.ndarray              # (N,) diagonal of the one-boson potential
    h12: sparse.csr_matrix       # (N, P) coupling block
    h22: np.ndarray              # (P,) diagonal of the two-boson potential
    n: int
    p: int

    @property
    def dtype(self):
        return self.h12.dtype


def _check_dims(grid: Grid, pair_grid: PairGrid) -> None:
    if pair_grid.base is not grid and pair_grid.base.n != grid.n:
        raise ValueError("grid and pair_grid dimensions do not match")
    if pair_grid.p != grid.n * (grid.n + 1) // 2:
        raise ValueError("pair grid is inconsistent with its base grid")


def assemble_blocks(spec: ModelSpec, grid: Grid, pair_grid: PairGrid) -> DiscreteBlocks:
    """Sample the parameter functions and build all five blocks."""
    _check_dims(grid, pair_grid)
    ms = mesh_samples(spec, grid)
    w = grid.weights
    i = pair_grid.pairs[:, 0]
    j = pair_grid.pairs[:, 1]
    cols = np.arange(pair_grid.p)

    complex_coupling = np.iscomplexobj(ms.V1) or np.iscomplexobj(ms.v0)
    dtype = np.complex128 if complex_coupling else np.float64

    off = i != j
    diag = ~off
    rows = np.concatenate([i[off], j[off], i[diag]])
    colidx = np.concatenate([cols[off], cols[off], cols[diag]])
    vals = np.concatenate([
        np.sqrt(w[j[off]] / 2.0) * ms.V1[i[off], j[off]],
        np.sqrt(w[i[off]] / 2.0) * ms.V1[j[off], i[off]],
        np.sqrt(w[i[diag]]) * ms.V1[i[diag], i[diag]],
    ]).astype(dtype)
    h12 = sparse.csr_matrix((vals, (rows, colidx)), shape=(grid.n, pair_grid.p))
    h12.eliminate_zeros()

    h01 = (np.sqrt(w) * ms.v0).astype(dtype)
    h22 = ms.W2[i, j]
    return DiscreteBlocks(
        h00=float(spec.w0), h01=h01, h11=ms.w1.copy(), h12=h12, h22=h22,
        n=grid.n, p=pair_grid.p,
    )


def assemble_A(blocks: DiscreteBlocks) -> np.ndarray:
    """Dense Hermitian matrix of the reduced 2x2 operator, dimension N + P."""
    n, p = blocks.n, blocks.p
    A = np.zeros((n + p, n + p), dtype=blocks.dtype)
    A[np.arange(n), np.arange(n)] = blocks.h11
    B = blocks.h12.toarray()
    A[:n, n:] = B
    A[n:, :n] = B.conj().T
    A[n + np.arange(p), n + np.arange(p)] = blocks.h22
    return A


def assemble_full(blocks: DiscreteBlocks) -> np.ndarray:
    """Dense Hermitian matrix of the full 3x3 operator, dimension 1 + N + P."""
    n, p = blocks.n, blocks.p
    H = np.zeros((1 + n + p, 1 + n + p), dtype=blocks.dtype)
    H[0, 0] = blocks.h00
    H[0, 1:1 + n] = blocks.h01
    H[1:1 + n, 0] = np.conj(blocks.h01)
    H[1:, 1:] = assemble_A(blocks)
    return H


def consistency_check_adjoint(blocks: DiscreteBlocks, spec: ModelSpec,
                              grid: Grid, pair_grid: PairGrid, seed: int = 0) -> float:
    """Max deviation between the matrix adjoint and the discretized adjoint formula.

    The continuous adjoint sends f to the symmetric function
    (1/2) v1(x, y)* f(x) + (1/2) v1(y, x)* f(y); in weight-normalized
    coordinates this coincides with the conjugate transpose of the coupling
    block, and the returned deviation should vanish to rounding.
    """
    _check_dims(grid, pair_grid)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
    lhs = blocks.h12.conj().T @ g

    ms = mesh_samples(spec, grid)
    f = g / np.sqrt(grid.weights)
    i = pair_grid.pairs[:, 0]
    j = pair_grid.pairs[:, 1]
    formula = 0.5 * np.conj(ms.V1[i, j]) * f[i] + 0.5 * np.conj(ms.V1[j, i]) * f[j]
    rhs = np.sqrt(pair_grid.pair_weights) * formula
    return float(np.max(np.abs(lhs - rhs)))


def dump_matrix_csv(matrix, path) -> None:
    """Write a dense or sparse matrix as (row, col, re, im) triplet rows."""
    mat = sparse.coo_matrix(matrix)
    with open(path, "w") as fh:
        fh.write("row,col,re,im\n")
        order = np.lexsort((mat.col, mat.row))
        for r, c, v in zip(mat.row[order], mat.col[order], mat.data[order]):
            fh.write(f"{int(r)},{int(c)},{float(v.real)!r},{float(v.imag)!r}\n")
