"""The min-max fair PCA problem over grouped data.

Given samples split into n groups with per-group matrices X_i (columns are
samples), fair PCA seeks an orthonormal basis U maximizing the worst group
variance Phi(U) = min_i f_i(U), where f_i(U) = <X_i X_i^T, U U^T> is the
variance group i retains under projection.  Solvers work on the equivalent
minimax objective

    f(U, y) = sum_i y_i (-f_i(U)),    U on St(d, r),  y on the simplex,

which is linear in y; its y-gradient is the vector (-f_1(U), ..., -f_n(U)).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import DiagnosticUnavailableError, DimensionError
from .simplex import project_to_simplex, uniform_weights, validate_weights
from .stiefel import TOL_ORTH, project_to_tangent, validate_stiefel


@dataclass(frozen=True)
class GroupedDataset:
    """Samples arranged column-wise with one contiguous block per group.

    X has shape (d, N); group i owns group_sizes[i] consecutive columns.  The
    array is copied and frozen at construction, so datasets can be shared
    between concurrent solver runs without locking.
    """

    X: np.ndarray
    group_sizes: tuple[int, ...]
    labels: tuple[str, ...] | None = None
    name: str = "dataset"

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=float, order="C", copy=True)
        if X.ndim != 2:
            raise DimensionError(f"X must be a 2-d array, got shape {X.shape}")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise DimensionError(f"X must be non-empty, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("X must be finite")
        sizes = tuple(int(s) for s in self.group_sizes)
        if len(sizes) == 0:
            raise DimensionError("group_sizes must be non-empty")
        if any(s < 1 for s in sizes):
            raise DimensionError(f"group sizes must be positive, got {sizes}")
        if sum(sizes) != X.shape[1]:
            raise DimensionError(
                f"group sizes sum to {sum(sizes)} but X has {X.shape[1]} columns"
            )
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(sizes):
                raise DimensionError(
                    f"got {len(labels)} labels for {len(sizes)} groups"
                )
            object.__setattr__(self, "labels", labels)
        X.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "group_sizes", sizes)

    @property
    def d(self) -> int:
        return self.X.shape[0]

    @property
    def num_samples(self) -> int:
        return self.X.shape[1]

    @property
    def num_groups(self) -> int:
        return len(self.group_sizes)

    @cached_property
    def sizes_array(self) -> np.ndarray:
        a = np.asarray(self.group_sizes, dtype=np.intp)
        a.setflags(write=False)
        return a

    @cached_property
    def starts(self) -> np.ndarray:
        a = np.concatenate(([0], np.cumsum(self.sizes_array)[:-1]))
        a.setflags(write=False)
        return a

    def group_slice(self, i: int) -> slice:
        start = int(self.starts[i])
        return slice(start, start + self.group_sizes[i])

    def group(self, i: int) -> np.ndarray:
        """Read-only view of group i's columns."""
        return self.X[:, self.group_slice(i)]

    def sample_norms(self) -> np.ndarray:
        return np.linalg.norm(self.X, axis=0)


@dataclass(frozen=True)
class SmoothnessConstants:
    """Constants certifying the smoothness of f(., y) and the y-Lipschitz
    continuity of its Riemannian gradient."""

    L1: float
    L2: float


def _check_point(data: GroupedDataset, U: np.ndarray) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[0] != data.d:
        raise DimensionError(
            f"U must have shape ({data.d}, r), got {U.shape}"
        )
    if U.shape[1] < 1 or U.shape[1] > data.d:
        raise DimensionError(f"need 1 <= r <= d={data.d}, got r={U.shape[1]}")
    return U


def _check_weights_shape(data: GroupedDataset, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (data.num_groups,):
        raise DimensionError(
            f"y must have shape ({data.num_groups},), got {y.shape}"
        )
    return y


def projections(data: GroupedDataset, U: np.ndarray) -> np.ndarray:
    """Per-sample projections X^T U, shape (N, r).

    One evaluation feeds both the group objectives and the U-gradient, so
    solvers compute it once per iterate and pass it down.
    """
    U = _check_point(data, U)
    return data.X.T @ U


def group_objectives(
    data: GroupedDataset, U: np.ndarray, *, proj: np.ndarray | None = None
) -> np.ndarray:
    """Vector of group variances f_i(U) = ||X_i^T U||_F^2, shape (n,)."""
    P = projections(data, U) if proj is None else proj
    colsq = np.einsum("ij,ij->i", P, P)
    return np.add.reduceat(colsq, data.starts)


def min_objective(data: GroupedDataset, U: np.ndarray) -> float:
    """Worst group variance Phi(U) = min_i f_i(U)."""
    return float(group_objectives(data, U).min())


def minimax_objective(data: GroupedDataset, U: np.ndarray, y: np.ndarray) -> float:
    """f(U, y) = sum_i y_i (-f_i(U))."""
    y = _check_weights_shape(data, y)
    return float(-(y @ group_objectives(data, U)))


def y_gradient(
    data: GroupedDataset, U: np.ndarray, *, proj: np.ndarray | None = None
) -> np.ndarray:
    """Gradient of f(U, .), the constant vector (-f_1(U), ..., -f_n(U))."""
    return -group_objectives(data, U, proj=proj)


def euclidean_gradient_U(
    data: GroupedDataset,
    U: np.ndarray,
    y: np.ndarray,
    *,
    proj: np.ndarray | None = None,
) -> np.ndarray:
    """Ambient gradient of f(., y): -2 sum_i y_i X_i X_i^T U."""
    U = _check_point(data, U)
    y = _check_weights_shape(data, y)
    P = projections(data, U) if proj is None else proj
    w = np.repeat(y, data.sizes_array)
    return -2.0 * (data.X @ (w[:, None] * P))


def riemannian_gradient_U(
    data: GroupedDataset,
    U: np.ndarray,
    y: np.ndarray,
    *,
    proj: np.ndarray | None = None,
) -> np.ndarray:
    """Riemannian gradient of f(., y) at U: the tangent component of the
    ambient gradient under the embedded metric."""
    return project_to_tangent(U, euclidean_gradient_U(data, U, y, proj=proj))


def group_riemannian_gradient(
    data: GroupedDataset,
    i: int,
    U: np.ndarray,
    *,
    proj: np.ndarray | None = None,
) -> np.ndarray:
    """Riemannian gradient of the single group variance f_i at U."""
    U = _check_point(data, U)
    if not 0 <= i < data.num_groups:
        raise DimensionError(f"group index {i} out of range [0, {data.num_groups})")
    sl = data.group_slice(i)
    Pi = projections(data, U)[sl] if proj is None else proj[sl]
    return project_to_tangent(U, 2.0 * (data.X[:, sl] @ Pi))


def ky_fan_norm(M: np.ndarray, r: int, *, tol: float = 1e-8) -> float:
    """Sum of the r largest eigenvalues of a symmetric PSD matrix.

    Symmetry and positive semidefiniteness are validated within a residual of
    tol relative to max(1, ||M||_F).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"M must be square, got shape {M.shape}")
    if not isinstance(r, (int, np.integer)) or r < 1 or r > M.shape[0]:
        raise DimensionError(f"need 1 <= r <= {M.shape[0]}, got r={r!r}")
    scale = max(1.0, float(np.linalg.norm(M)))
    sym_residual = float(np.linalg.norm(M - M.T))
    if sym_residual > tol * scale:
        raise ValueError(f"M must be symmetric, residual {sym_residual:.3e}")
    w = np.linalg.eigvalsh((M + M.T) / 2.0)
    if w[0] < -tol * scale:
        raise ValueError(f"M must be positive semidefinite, min eigenvalue {w[0]:.3e}")
    return float(np.sum(w[-int(r):]))


def smoothness_constants(data: GroupedDataset, r: int) -> SmoothnessConstants:
    """Compute L1 = 2 max_i ||X_i X_i^T||_2 and
    L2 = 2 sqrt(kyfan_r(sum_i (X_i X_i^T)^2)).

    L1 bounds the smoothness of f(., y) through the polar retraction for any
    simplex y; L2 bounds ||grad_U f(U, y) - grad_U f(U, y')|| / ||y - y'||.
    """
    if not isinstance(r, (int, np.integer)) or r < 1 or r > data.d:
        raise DimensionError(f"need 1 <= r <= d={data.d}, got r={r!r}")
    top = 0.0
    M = np.zeros((data.d, data.d))
    for i in range(data.num_groups):
        Xi = data.group(i)
        sigma = float(np.linalg.norm(Xi, 2))
        top = max(top, sigma * sigma)
        # (X_i X_i^T)^2 accumulated as X_i (X_i^T X_i) X_i^T
        M += Xi @ ((Xi.T @ Xi) @ Xi.T)
    L2 = 2.0 * float(np.sqrt(max(ky_fan_norm(M, int(r)), 0.0))) if top > 0 else 0.0
    return SmoothnessConstants(L1=2.0 * top, L2=L2)


def stationarity_measure(
    data: GroupedDataset,
    U: np.ndarray,
    y: np.ndarray,
    *,
    tol_orth: float = TOL_ORTH,
) -> float:
    """Stationarity of a feasible pair (U, y):

        E(U, y) = max(||grad_U f(U, y)||_F,
                      max_{y' in simplex} <grad_y f(U, y), y' - y>).

    The inner maximum has the closed form sum_i y_i f_i(U) - min_i f_i(U).
    """
    U = validate_stiefel(_check_point(data, U), tol_orth)
    y = validate_weights(_check_weights_shape(data, y))
    P = projections(data, U)
    f_vals = group_objectives(data, U, proj=P)
    grad = riemannian_gradient_U(data, U, y, proj=P)
    gap = max(float(y @ f_vals - f_vals.min()), 0.0)
    return max(float(np.linalg.norm(grad)), gap)


def dist_to_subgradient(
    data: GroupedDataset,
    U: np.ndarray,
    *,
    rel_threshold: float = 0.1,
    tol: float = 1e-8,
    max_iters: int = 10_000,
) -> float:
    """Distance from zero to the span of near-active group gradients:

        min_y ||sum_{i in A} y_i grad f_i(U)||  over simplex weights y,

    with the active set A = {i : f_i(U) - min_j f_j(U) <= rel_threshold * min_j f_j(U)}.
    A small value certifies approximate stationarity of Phi = min_i f_i.

    The quadratic program is solved by projected gradient descent with the
    classical 1/L stepsize, L = 2 lambda_max(Gram), iterating until the
    update moves less than tol or max_iters inner steps.
    """
    U = validate_stiefel(_check_point(data, U))
    P = projections(data, U)
    f_vals = group_objectives(data, U, proj=P)
    f_min = float(f_vals.min())
    if f_min <= 0.0:
        raise DiagnosticUnavailableError(
            f"active set needs min_i f_i > 0, got {f_min:.3e}"
        )
    active = np.nonzero(f_vals - f_min <= rel_threshold * f_min)[0]
    grads = np.stack(
        [group_riemannian_gradient(data, int(i), U, proj=P).ravel() for i in active]
    )
    if len(active) == 1:
        return float(np.linalg.norm(grads[0]))
    H = grads @ grads.T
    lam_max = float(np.linalg.eigvalsh(H)[-1])
    if lam_max <= 0.0:
        return 0.0
    step = 1.0 / (2.0 * lam_max)
    y = uniform_weights(len(active))
    for _ in range(max_iters):
        y_next = project_to_simplex(y - step * 2.0 * (H @ y))
        moved = float(np.linalg.norm(y_next - y))
        y = y_next
        if moved <= tol:
            break
    # Norm of the actual combination rather than sqrt(y H y): the Gram form
    # squares the conditioning and floors the result near sqrt(eps) when the
    # gradients cancel.
    return float(np.linalg.norm(grads.T @ y))
