"""The Gaussian family ``T_alpha = K_alpha + m(alpha) I`` and its Schur row sums."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .embeddings import EmbeddingSpec
from .errors import ParameterError, SizeError
from .groups import DEFAULT_CAP, Ball, FreeGroup, GroupModel, Lattice, ball_enumerate, sphere_sizes
from .kernels import Kernel, gaussian_kernel
from .renorm import RenormedSpace, build_T
from .theorem import CoefficientMatrix, coefficients


def modulator(alpha: float) -> float:
    """``m(alpha) = 1 - exp(-alpha)``: zero at 0, increasing, tends to 1."""
    if alpha < 0 or math.isnan(alpha):
        raise ParameterError("alpha must be non-negative")
    if math.isinf(alpha):
        return 1.0
    return -math.expm1(-alpha)


@dataclass(frozen=True, eq=False)
class PathPoint:
    alpha: float
    m: float
    normalizer: float
    kernel: Kernel
    space: RenormedSpace
    coefficients: CoefficientMatrix

    def _off(self, lo: int, hi: float = math.inf):
        d = self.coefficients.distances
        return (d >= lo) & (d <= hi)

    @property
    def max_gap_near(self) -> float:
        """``max |1 - c_alpha|`` over distinct pairs at distance 1."""
        sel = self._off(1, 1)
        return float(np.abs(1.0 - self.coefficients.values[sel]).max()) if sel.any() else 0.0

    @property
    def max_offdiag(self) -> float:
        sel = self._off(1)
        return float(np.abs(self.coefficients.values[sel]).max()) if sel.any() else 0.0


def path_point(ball: Ball, emb: EmbeddingSpec, alpha: float, window: Optional[int] = None,
               tol_psd: float = 1e-8) -> PathPoint:
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    kernel = gaussian_kernel(ball, emb, alpha)
    m = modulator(alpha)
    # dividing K + mI by its diagonal 1 + m is exactly the eps = m renorming
    space = build_T(kernel, m, tol_psd)
    return PathPoint(float(alpha), m, 1.0 + m, kernel, space, coefficients(space, window))


def path_sweep(ball: Ball, emb: EmbeddingSpec, alphas, window: Optional[int] = None,
               tol_psd: float = 1e-8) -> list[PathPoint]:
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ParameterError("empty alpha list")
    if any(a <= 0 for a in alphas):
        raise ParameterError("alphas must be strictly positive")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ParameterError("alphas must be strictly increasing")
    return [path_point(ball, emb, a, window, tol_psd) for a in alphas]


@dataclass
class SchurReport:
    group: str
    embedding: str
    alpha: float
    radius: int
    partial_sums: list
    method: str
    enumerated_sums: Optional[list]
    closed_form: Optional[float]
    threshold: Optional[float]
    convergent: bool
    tail_bound: Optional[float]
    compression_hypothesis: Optional[bool]

    @property
    def truncated(self) -> float:
        return self.partial_sums[-1]


def _theta_partial(alpha: float, M: int) -> float:
    return 1.0 + 2.0 * sum(math.exp(-alpha * j * j) for j in range(1, M + 1))


def _gauss_tail(alpha: float, M: int) -> float:
    """Upper bound on ``sum_{|j| > M} exp(-alpha j^2)``."""
    ratio = math.exp(-alpha * (2 * M + 3))
    return 2.0 * math.exp(-alpha * (M + 1) ** 2) / (1.0 - ratio)


def _enumerated_partial_sums(group: GroupModel, emb: EmbeddingSpec, alpha: float, radius: int,
                             cap: int) -> list[float]:
    ball = ball_enumerate(group, radius, cap)
    e = [group.identity()]
    sq = emb.sq_distance_matrix(e, ball.elements)[0]
    vals = np.exp(-alpha * sq)
    per_layer = np.bincount(ball.distances, weights=vals, minlength=radius + 1)
    return np.cumsum(per_layer).tolist()


def schur_row_sums(group: GroupModel, emb: EmbeddingSpec, alpha: float, radius: int,
                   cap: int = DEFAULT_CAP) -> SchurReport:
    """Row sum ``sum_{|h| <= N} K_alpha(e, h)`` per truncation radius, plus closed forms.

    The kernel is invariant for the provided embeddings, so one row bounds every
    row and column, which is the Schur test. Free groups with the edge
    embedding sum ``s_n exp(-alpha n)`` over spheres and converge iff
    ``alpha > ln(2k - 1)``.
    """
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    radius = int(radius)
    enumerated = None
    try:
        enumerated = _enumerated_partial_sums(group, emb, alpha, radius, cap)
    except SizeError:
        if emb.radial is None:
            raise

    if emb.radial is not None:
        sizes = sphere_sizes(group, radius, cap)
        terms = [s * math.exp(-alpha * emb.radial(r)) for r, s in enumerate(sizes)]
        partial = np.cumsum(terms).tolist()
        method = "radial"
    else:
        partial = enumerated
        method = "enumerated"

    closed = threshold = tail = None
    convergent = True
    if isinstance(group, FreeGroup) and emb.name == "edge":
        threshold = math.log(2 * group.k - 1)
        convergent = alpha > threshold
        if convergent:
            q = (2 * group.k - 1) * math.exp(-alpha)
            closed = 1.0 + 2 * group.k * math.exp(-alpha) / (1.0 - q)
            tail = closed - partial[-1]
        else:
            closed = math.inf
    elif isinstance(group, Lattice) and emb.name == "identity":
        threshold = 0.0
        n = group.n
        full = _theta_partial(alpha, 0)
        j = 0
        while True:
            j += 1
            term = 2.0 * math.exp(-alpha * j * j)
            if term < 1e-18 * full:
                break
            full += term
        closed = full**n
        M = radius // n
        inner = _theta_partial(alpha, M)
        tail = (inner + _gauss_tail(alpha, M)) ** n - inner**n
    elif group.is_finite:
        total = _enumerated_partial_sums(group, emb, alpha, group.diameter, cap)[-1]
        closed = total
        tail = max(total - partial[-1], 0.0)

    return SchurReport(group.spec(), emb.name, float(alpha), radius, partial, method, enumerated,
                       closed, threshold, convergent, tail, emb.hypothesis_holds)
