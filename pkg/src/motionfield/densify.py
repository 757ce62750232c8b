"""Sparse-to-dense motion interpolation.

The default densifier solves, per frame and per flow channel, the screened
Poisson problem on the pixel grid

    minimize  sum_edges (u_a - u_b)^2  +  lambda * sum_hints (u_p - h_p)^2

with zero-gradient (Neumann) boundary conditions. With lambda = 0 the data
term becomes a hard Dirichlet constraint at hint pixels and the solution is
the discrete harmonic interpolant, which reproduces hints exactly and obeys
the maximum principle. The solver sits behind a backend registry so a
learned sparse-to-dense model can be slotted in without touching callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ContractError, ConvergenceError, ParameterError
from .types import FlowField, ImageFrame, SparseHints

_MODULE = "densify"

SOLVERS = ("conjugate_gradient", "direct")


@dataclass(frozen=True)
class DensifyConfig:
    """Solver settings.

    ``max_iterations=None`` caps conjugate gradient at 10*H*W iterations.
    ``regularization`` is the screening weight lambda; 0 means hard
    constraints at hint pixels.
    """

    solver: str = "conjugate_gradient"
    max_iterations: int | None = None
    residual_tolerance: float = 1e-8
    regularization: float = 0.0

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ParameterError(f"solver must be one of {SOLVERS}, got {self.solver!r}", module=_MODULE)
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ParameterError("max_iterations must be >= 1", module=_MODULE)
        if not self.residual_tolerance > 0:
            raise ParameterError("residual_tolerance must be > 0", module=_MODULE)
        if self.regularization < 0:
            raise ParameterError("regularization must be >= 0", module=_MODULE)


@dataclass(frozen=True)
class DensifyStats:
    """Per-solve diagnostics, one entry per (frame, channel) system."""

    residuals: tuple
    iterations: tuple

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    @property
    def total_iterations(self) -> int:
        return int(sum(self.iterations))


def _grid_edges(height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    """All 4-neighbour pixel pairs (each edge listed once)."""
    idx = np.arange(height * width).reshape(height, width)
    a = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
    b = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
    return a, b


class _HarmonicSystem:
    """Assembled linear system for one hint mask, reused across frames/channels.

    lambda = 0: unknowns are the non-hint pixels, hints enter as Dirichlet
    data on the right-hand side. lambda > 0: unknowns are all pixels and the
    screening term lands on the diagonal.
    """

    def __init__(self, mask: np.ndarray, regularization: float):
        height, width = mask.shape
        n = height * width
        edge_a, edge_b = _grid_edges(height, width)
        degree = np.zeros(n)
        np.add.at(degree, edge_a, 1.0)
        np.add.at(degree, edge_b, 1.0)

        self.lam = regularization
        self.mask_flat = mask.ravel().astype(bool)
        self.shape = mask.shape

        if regularization > 0:
            rows = np.concatenate([edge_a, edge_b, np.arange(n)])
            cols = np.concatenate([edge_b, edge_a, np.arange(n)])
            vals = np.concatenate([-np.ones(edge_a.size * 2), degree + regularization * self.mask_flat])
            self.matrix = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
            self.unknown_of = None
        else:
            unknown = ~self.mask_flat
            unknown_of = np.full(n, -1, dtype=np.int64)
            unknown_of[unknown] = np.arange(unknown.sum())
            m = int(unknown.sum())

            both = unknown[edge_a] & unknown[edge_b]
            ua, ub = unknown_of[edge_a[both]], unknown_of[edge_b[both]]
            rows = np.concatenate([ua, ub, np.arange(m)])
            cols = np.concatenate([ub, ua, np.arange(m)])
            vals = np.concatenate([-np.ones(ua.size * 2), degree[unknown]])
            self.matrix = sp.csr_matrix((vals, (rows, cols)), shape=(m, m))
            self.unknown_of = unknown_of

            # Edges with exactly one unknown endpoint feed the Dirichlet
            # data into the right-hand side.
            a_unk = unknown[edge_a] & ~unknown[edge_b]
            b_unk = unknown[edge_b] & ~unknown[edge_a]
            self.rhs_rows = np.concatenate([unknown_of[edge_a[a_unk]], unknown_of[edge_b[b_unk]]])
            self.rhs_known = np.concatenate([edge_b[a_unk], edge_a[b_unk]])

        self._lu = None
        self._jacobi = None

    def rhs(self, values_flat: np.ndarray) -> np.ndarray:
        if self.lam > 0:
            return self.lam * (values_flat * self.mask_flat)
        rhs = np.zeros(self.matrix.shape[0])
        np.add.at(rhs, self.rhs_rows, values_flat[self.rhs_known])
        return rhs

    def embed(self, solution: np.ndarray, values_flat: np.ndarray) -> np.ndarray:
        """Scatter a solve result back onto the full grid."""
        if self.lam > 0:
            return solution.reshape(self.shape)
        out = values_flat.copy()
        out[~self.mask_flat] = solution
        return out.reshape(self.shape)

    def solve_direct(self, rhs: np.ndarray) -> tuple[np.ndarray, int]:
        if self._lu is None:
            self._lu = spla.splu(self.matrix.tocsc())
        return self._lu.solve(rhs), 0

    def solve_cg(self, rhs: np.ndarray, tol: float, maxiter: int) -> tuple[np.ndarray, int]:
        if self._jacobi is None:
            diag = self.matrix.diagonal()
            self._jacobi = sp.diags(np.where(diag > 0, 1.0 / np.maximum(diag, 1e-300), 1.0))
        iterations = 0

        def _count(_):
            nonlocal iterations
            iterations += 1

        solution, info = spla.cg(
            self.matrix, rhs, rtol=tol, atol=0.0, maxiter=maxiter, M=self._jacobi, callback=_count
        )
        # cg's stopping test watches its internal residual recurrence, which
        # collapses once the Krylov space is exhausted even when the true
        # residual has stalled at the float64 floor. Verify against the
        # actual system; crossing the threshold a hair early is tolerated,
        # an order of magnitude over the request is failure.
        norm = np.linalg.norm(rhs)
        residual = float(np.linalg.norm(rhs - self.matrix @ solution) / norm) if norm else 0.0
        if info > 0 or residual > 10.0 * tol:
            raise ConvergenceError(
                f"conjugate gradient failed to reach tolerance {tol:.1e} after "
                f"{iterations} iterations (relative residual {residual:.3e})",
                module=_MODULE,
                residual=residual,
                iterations=iterations,
            )
        return solution, iterations


def densify_with_stats(
    hints: SparseHints, config: DensifyConfig | None = None, *, strict: bool = False
) -> tuple[FlowField, DensifyStats]:
    """Densify sparse hints and report solver diagnostics alongside."""
    config = config or DensifyConfig()
    if hints.hint_count == 0:
        if strict:
            raise ParameterError("hints contain no marked pixels", module=_MODULE)
        zeros = FlowField.zeros(hints.frames, hints.height, hints.width)
        return zeros, DensifyStats(residuals=(), iterations=())

    system = _HarmonicSystem(hints.mask, config.regularization)
    maxiter = config.max_iterations or 10 * hints.height * hints.width
    out = np.empty_like(hints.vectors)
    residuals = []
    iteration_counts = []
    for frame in range(hints.frames):
        for channel in range(2):
            values_flat = hints.vectors[frame, :, :, channel].ravel()
            rhs = system.rhs(values_flat)
            if system.matrix.shape[0] == 0:
                solution, iters = np.zeros(0), 0
            elif config.solver == "direct":
                solution, iters = system.solve_direct(rhs)
            else:
                solution, iters = system.solve_cg(rhs, config.residual_tolerance, maxiter)
            norm = np.linalg.norm(rhs)
            residual = float(np.linalg.norm(rhs - system.matrix @ solution) / norm) if norm else 0.0
            residuals.append(residual)
            iteration_counts.append(iters)
            out[frame, :, :, channel] = system.embed(solution, values_flat)
    return FlowField(out), DensifyStats(residuals=tuple(residuals), iterations=tuple(iteration_counts))


def densify(hints: SparseHints, config: DensifyConfig | None = None, *, strict: bool = False) -> FlowField:
    """Dense per-frame motion fields from sparse hints (see module docstring)."""
    return densify_with_stats(hints, config, strict=strict)[0]


DensifierBackend = Callable[[SparseHints, DensifyConfig, Optional[ImageFrame]], FlowField]


def _harmonic_backend(hints, config, image):
    return densify(hints, config)


def _identity_backend(hints, config, image):
    return FlowField(hints.vectors)


def _constant_backend(hints, config, image):
    """Fill every frame with its first hint value (row-major scan)."""
    if hints.hint_count == 0:
        return FlowField.zeros(hints.frames, hints.height, hints.width)
    rows, cols = np.nonzero(hints.mask)
    first = hints.vectors[:, rows[0], cols[0], :]  # (frames, 2)
    data = np.broadcast_to(first[:, None, None, :], hints.vectors.shape)
    return FlowField(data)


_BACKENDS: dict[str, DensifierBackend] = {
    "harmonic": _harmonic_backend,
    "identity": _identity_backend,
    "constant": _constant_backend,
}

DEFAULT_BACKEND = "harmonic"


def register_backend(name: str, backend: DensifierBackend) -> None:
    """Add a densifier backend under ``name`` (replaces any existing entry)."""
    _BACKENDS[name] = backend


def densify_interface(
    hints: SparseHints,
    backend: str | DensifierBackend = DEFAULT_BACKEND,
    config: DensifyConfig | None = None,
    image: ImageFrame | None = None,
) -> FlowField:
    """Densify through a pluggable backend.

    ``backend`` is a registered name or a callable. ``image`` is forwarded
    to the backend; the default harmonic backend ignores it.
    """
    if isinstance(backend, str):
        if backend not in _BACKENDS:
            raise ParameterError(
                f"unknown densifier backend {backend!r}; registered: {sorted(_BACKENDS)}",
                module=_MODULE,
            )
        backend = _BACKENDS[backend]
    config = config or DensifyConfig()
    result = backend(hints, config, image)
    if result.data.shape != hints.vectors.shape:
        raise ContractError(
            f"backend returned shape {result.data.shape}, expected {hints.vectors.shape}",
            module=_MODULE,
        )
    return result
