"""Positive definite kernels on balls, built as explicit Gram matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .embeddings import EmbeddingSpec
from .errors import NumericError, ParameterError
from .groups import Ball, FreeGroup, ball_enumerate


@dataclass(frozen=True, eq=False)
class Kernel:
    """Symmetric matrix of kernel values over ``ball``.

    ``support`` is the declared radius ``S``: entries vanish exactly whenever
    ``d(g, h) >= S``. Gaussian kernels carry ``math.inf``.
    """

    ball: Ball
    values: np.ndarray = field(repr=False)
    support: float
    provenance: str
    params: dict
    seed: Optional[int] = None
    counts: Optional[np.ndarray] = field(default=None, repr=False)
    denominator: Optional[int] = None

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Ascending eigenvalues and orthonormal eigenvectors of ``values``, computed once."""
        if not np.all(np.isfinite(self.values)):
            raise NumericError("kernel matrix has non-finite entries")
        try:
            return scipy.linalg.eigh(self.values)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"eigensolver failed: {exc}") from exc

    def closeness(self, radius: int = 1) -> float:
        """``max |1 - K(g, h)|`` over pairs with ``d(g, h) <= radius``."""
        mask = self.ball.distance_matrix <= radius
        return float(np.max(np.abs(1.0 - self.values[mask])))

    def support_violations(self, S: Optional[float] = None) -> np.ndarray:
        """Index pairs with ``d >= S`` and a non-zero entry."""
        S = self.support if S is None else S
        bad = (self.ball.distance_matrix >= S) & (self.values != 0.0)
        return np.argwhere(bad)

    def is_invariant(self) -> bool:
        """True when ``K(xg, xh) = K(g, h)`` for all translations inside the ball (exhaustive)."""
        ball, group = self.ball, self.ball.group
        idx = ball.index
        for x in ball.elements:
            perm = [idx.get(group.multiply(x, g), -1) for g in ball.elements]
            perm = np.asarray(perm)
            ok = perm >= 0
            sub = self.values[np.ix_(ok, ok)]
            moved = self.values[np.ix_(perm[ok], perm[ok])]
            if not np.allclose(sub, moved, rtol=0, atol=1e-12):
                return False
        return True


def _gram_from_rows(ball: Ball, rows: list[dict], exact: bool):
    """Assemble ``Xi`` (ball x support points) and return ``Xi Xi^T``."""
    columns: dict = {}
    data, ri, ci = [], [], []
    for i, row in enumerate(rows):
        for key, val in row.items():
            ci.append(columns.setdefault(key, len(columns)))
            ri.append(i)
            data.append(val)
    dtype = np.int64 if exact else float
    xi = sp.csr_matrix((np.asarray(data, dtype=dtype), (ri, ci)), shape=(len(rows), len(columns)))
    return (xi @ xi.T).toarray()


def _finalize(values: np.ndarray) -> np.ndarray:
    values = 0.5 * (values + values.T)
    np.clip(values, 0.0, 1.0, out=values)
    np.fill_diagonal(values, 1.0)
    return values


def ball_overlap_kernel(ball: Ball, R: int) -> Kernel:
    """``K(g, h) = |B(g,R) & B(h,R)| / sqrt(|B(g,R)| |B(h,R)|)``, with ``S = 2R + 1``.

    Balls ``B(g, R) = g B(e, R)`` are formed by translation, so points outside
    the enumerated ball are handled without truncation.
    """
    if R < 1:
        raise ParameterError("ball-overlap radius must be positive")
    group = ball.group
    base = ball_enumerate(group, R).elements
    rows = [{group.multiply(g, x): 1 for x in base} for g in ball.elements]
    counts = _gram_from_rows(ball, rows, exact=True)
    sizes = np.diag(counts).astype(float)
    values = counts / np.sqrt(sizes[:, None] * sizes[None, :])
    denom = len(base) if np.all(np.diag(counts) == len(base)) else None
    return Kernel(ball, _finalize(values), 2 * R + 1, "ball-overlap", {"R": R},
                  counts=counts, denominator=denom)


def tree_ray(group: FreeGroup, x: tuple, n: int) -> list[tuple]:
    """First ``n`` vertices of the geodesic ray from ``x`` to the end ``a^inf``."""
    w = list(x)
    out = []
    while len(out) < n and any(abs(c) != 1 or c != w[-1] for c in w):
        out.append(tuple(w))
        w.pop()
    # w is now a power of a (possibly negative or empty)
    while len(out) < n:
        out.append(tuple(w))
        w = list(group.multiply(tuple(w), (1,)))
    return out


def tree_ray_kernel(ball: Ball, n: int) -> Kernel:
    """``K(x, y) = |ray_n(x) & ray_n(y)| / n`` on a free group ball; ``S = 2n + 1``."""
    group = ball.group
    if not isinstance(group, FreeGroup):
        raise ParameterError("tree-ray kernel needs a free group")
    if n < 1:
        raise ParameterError("ray length must be positive")
    if ball.radius < 1:
        raise ParameterError("tree-ray kernel needs ball radius >= 1")
    rows = [{v: 1 for v in tree_ray(group, x, n)} for x in ball.elements]
    counts = _gram_from_rows(ball, rows, exact=True)
    values = counts / float(n)
    return Kernel(ball, _finalize(values), 2 * n + 1, "tree-ray", {"n": n},
                  counts=counts, denominator=n)


def gaussian_kernel(ball: Ball, emb: EmbeddingSpec, alpha: float) -> Kernel:
    """``K(g, h) = exp(-alpha ||f(g) - f(h)||^2)``; no finite support."""
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    sq = emb.sq_distance_matrix(ball.elements)
    values = np.exp(-alpha * sq)
    return Kernel(ball, _finalize(values), math.inf, "gaussian",
                  {"alpha": float(alpha), "embedding": emb.name})


def gram_random_kernel(ball: Ball, r: int, seed: int) -> Kernel:
    """Gram matrix of seeded positive unit vectors supported on ``B(g, r)``; ``S = 2r + 1``.

    The coefficients depend on ``g``, so the kernel is not translation invariant.
    """
    if r < 0:
        raise ParameterError("pattern radius must be non-negative")
    group = ball.group
    base = ball_enumerate(group, r).elements
    rng = np.random.default_rng(seed)
    rows = []
    for g in ball.elements:
        w = rng.uniform(0.1, 1.0, size=len(base))
        w /= np.linalg.norm(w)
        row: dict = {}
        for x, wx in zip(base, w):
            key = group.multiply(g, x)
            row[key] = row.get(key, 0.0) + wx
        norm = math.sqrt(sum(v * v for v in row.values()))
        rows.append({k: v / norm for k, v in row.items()})
    values = _gram_from_rows(ball, rows, exact=False)
    return Kernel(ball, _finalize(values), 2 * r + 1, "gram-random", {"r": r}, seed=seed)


@dataclass(frozen=True)
class PSDResult:
    min_eigenvalue: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.min_eigenvalue >= -self.tolerance


def psd_tolerance(values: np.ndarray, tol: float = 1e-8) -> float:
    scale = max(1.0, float(np.abs(values).sum(axis=1).max()))
    return tol * scale


def psd_check(kernel, tol: float = 1e-8) -> PSDResult:
    """Smallest eigenvalue of a kernel (or bare matrix) and the PSD verdict.

    The tolerance is ``tol`` scaled by ``max(1, max row sum)``.
    """
    if isinstance(kernel, Kernel):
        return PSDResult(float(kernel.spectrum[0][0]), psd_tolerance(kernel.values, tol))
    values = np.asarray(kernel, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NumericError("kernel matrix has non-finite entries")
    try:
        lo = scipy.linalg.eigh(values, eigvals_only=True, subset_by_index=[0, 0])[0]
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    return PSDResult(float(lo), psd_tolerance(values, tol))


def ray_bound_violations(kernel: Kernel) -> list[tuple[int, int]]:
    """Pairs breaking ``1 - K(x, y) <= d(x, y)/n``, compared in exact rationals."""
    n = kernel.params["n"]
    d = kernel.ball.distance_matrix
    bad = []
    for i, j in zip(*np.nonzero(n - kernel.counts > d)):
        # integer test above is the rational inequality times n; confirm with Fraction
        if 1 - Fraction(int(kernel.counts[i, j]), n) > Fraction(int(d[i, j]), n):
            bad.append((int(i), int(j)))
    return bad
