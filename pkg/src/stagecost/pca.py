"""Correlation-based principal components and schema grouping.

Given numeric observations, build the Pearson correlation matrix, factor it
with a cyclic Jacobi eigensolver (no LAPACK behind it, so every rotation is
inspectable), keep the leading components that explain a requested share of
the variance, and group variables into candidate schema dimensions by the
size of their loadings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConstantColumn, ConvergenceFailure, MissingData

JACOBI_TOL = 1e-12       # off-diagonal Frobenius norm, relative to the matrix
JACOBI_MAX_SWEEPS = 100
DEFAULT_VARIANCE_THRESHOLD = 0.8
DEFAULT_LOADING_CUTOFF = 0.5
_THRESHOLD_SLACK = 1e-12  # absorbs rounding when cumulative variance ~ threshold


@dataclass(frozen=True)
class CorrelationMatrix:
    names: tuple[str, ...]
    values: np.ndarray  # p x p, symmetric, unit diagonal


@dataclass(frozen=True)
class FactorModel:
    names: tuple[str, ...]
    eigenvalues: np.ndarray          # descending, >= 0
    loadings: np.ndarray             # column j = unit eigenvector of component j
    cumulative_variance: np.ndarray  # V(m) = sum of first m eigenvalues / p
    selected_components: int
    variance_threshold: float


@dataclass(frozen=True)
class CandidateDimension:
    name: str
    component: int                          # 1-based component index
    eigenvalue: float
    members: tuple[tuple[str, float], ...]  # (variable, loading), |loading| desc
    empty: bool


@dataclass(frozen=True)
class SchemaSuggestion:
    dimensions: tuple[CandidateDimension, ...]
    loading_cutoff: float


def correlation_matrix(
    data: Sequence[Sequence[float]], names: Optional[Sequence[str]] = None
) -> CorrelationMatrix:
    """Pearson correlations of the columns of ``data`` (n rows, p columns)."""
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise ValueError("data must be two-dimensional (rows x columns)")
    n, p = x.shape
    if names is None:
        names = tuple(f"v{j + 1}" for j in range(p))
    else:
        names = tuple(names)
        if len(names) != p:
            raise ValueError(f"{len(names)} names for {p} columns")
    if not np.isfinite(x).all():
        raise MissingData("input contains missing or non-finite cells")

    centred = x - x.mean(axis=0)
    ss = (centred * centred).sum(axis=0)
    for j in range(p):
        if ss[j] == 0.0:
            raise ConstantColumn(f"column {names[j]!r} has zero variance")

    r = np.eye(p)
    for i in range(p):
        for j in range(i + 1, p):
            rij = float(centred[:, i] @ centred[:, j]) / np.sqrt(ss[i] * ss[j])
            rij = min(1.0, max(-1.0, rij))
            r[i, j] = r[j, i] = rij
    return CorrelationMatrix(names=names, values=r)


def eigen_sym(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvectors of a symmetric matrix.

    Cyclic Jacobi: sweep all (i, j) pairs, rotating each off-diagonal entry
    to zero, until the off-diagonal norm falls under JACOBI_TOL relative to
    the matrix norm.  Each eigenvector is flipped, if needed, so its
    largest-magnitude entry is positive.
    """
    a = np.array(matrix, dtype=float)
    p = a.shape[0]
    if a.shape != (p, p):
        raise ValueError("matrix must be square")
    v = np.eye(p)
    scale = max(float(np.linalg.norm(a)), 1e-300)

    for _ in range(JACOBI_MAX_SWEEPS):
        off = a - np.diag(np.diag(a))
        if float(np.linalg.norm(off)) <= JACOBI_TOL * scale:
            break
        for i in range(p - 1):
            for j in range(i + 1, p):
                g = a[i, j]
                if g == 0.0:
                    continue
                theta = (a[j, j] - a[i, i]) / (2.0 * g)
                if theta >= 0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                row_i = c * a[i, :] - s * a[j, :]
                row_j = s * a[i, :] + c * a[j, :]
                a[i, :], a[j, :] = row_i, row_j
                col_i = c * a[:, i] - s * a[:, j]
                col_j = s * a[:, i] + c * a[:, j]
                a[:, i], a[:, j] = col_i, col_j
                a[i, j] = a[j, i] = 0.0
                vec_i = c * v[:, i] - s * v[:, j]
                vec_j = s * v[:, i] + c * v[:, j]
                v[:, i], v[:, j] = vec_i, vec_j
    else:
        raise ConvergenceFailure(
            f"Jacobi sweeps exhausted ({JACOBI_MAX_SWEEPS}) before convergence"
        )

    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = v[:, order]
    for j in range(p):
        lead = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[lead, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return eigenvalues, vectors


def extract_factors(
    corr: CorrelationMatrix, variance_threshold: float = DEFAULT_VARIANCE_THRESHOLD
) -> FactorModel:
    """Factor the correlation matrix and pick how many components to keep.

    The selected count is the smallest m whose cumulative explained variance
    V(m) = (sum of the m largest eigenvalues) / p reaches the threshold.
    """
    if not 0 < variance_threshold <= 1:
        raise ValueError("variance_threshold must be in (0, 1]")
    eigenvalues, vectors = eigen_sym(corr.values)
    eigenvalues = np.maximum(eigenvalues, 0.0)  # clip rounding-level negatives
    p = len(eigenvalues)
    cumulative = np.cumsum(eigenvalues) / p
    selected = p
    for m in range(1, p + 1):
        if cumulative[m - 1] >= variance_threshold - _THRESHOLD_SLACK:
            selected = m
            break
    return FactorModel(
        names=corr.names,
        eigenvalues=eigenvalues,
        loadings=vectors,
        cumulative_variance=cumulative,
        selected_components=selected,
        variance_threshold=variance_threshold,
    )


def suggest_schema(
    model: FactorModel, loading_cutoff: float = DEFAULT_LOADING_CUTOFF
) -> SchemaSuggestion:
    """Group variables into one candidate dimension per selected component.

    A variable joins a dimension when the magnitude of its loading on that
    component reaches the cutoff; it may appear in several dimensions, or in
    none.  Dimensions that attract no variable are kept and flagged empty.
    """
    if not 0 < loading_cutoff <= 1:
        raise ValueError("loading_cutoff must be in (0, 1]")
    dimensions = []
    for comp in range(model.selected_components):
        loadings = model.loadings[:, comp]
        members = sorted(
            (
                (model.names[j], float(loadings[j]))
                for j in range(len(model.names))
                if abs(loadings[j]) >= loading_cutoff
            ),
            key=lambda item: (-abs(item[1]), item[0]),
        )
        dimensions.append(
            CandidateDimension(
                name=f"dim{comp + 1}",
                component=comp + 1,
                eigenvalue=float(model.eigenvalues[comp]),
                members=tuple(members),
                empty=not members,
            )
        )
    return SchemaSuggestion(dimensions=tuple(dimensions), loading_cutoff=loading_cutoff)
