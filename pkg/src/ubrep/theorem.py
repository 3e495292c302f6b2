"""Certificates for both directions of the kernel/representation correspondence.

Forward: a renormed space with ``v = delta_e`` yields coefficients
``c(g, h) = <pi_g v, pi_h v>_T = T(g, h)`` which must be unit on the
diagonal, close to 1 on neighbours and exactly zero beyond ``S``. Converse:
any such coefficient matrix is itself a kernel with those properties.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NumericIntegrityError, WindowError
from .groups import GroupModel
from .kernels import psd_check
from .renorm import EXACT, RenormedSpace

UNIT_TOL = 1e-12
MAX_WITNESSES = 10


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    group: GroupModel
    elements: tuple
    values: np.ndarray = field(repr=False)
    distances: np.ndarray = field(repr=False)
    window: int
    space: Optional[RenormedSpace] = None
    indices: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.elements)


def coefficients(space: RenormedSpace, window: Optional[int] = None) -> CoefficientMatrix:
    """Coefficient matrix of ``pi`` and ``v = delta_e`` on the window ``B(e, window)``.

    Kernel entries are computed from the group itself rather than from a
    truncated ball, so every pair inside the enumerated ball is usable; the
    window just has to fit inside it.
    """
    ball = space.ball
    if window is None:
        window = ball.group.diameter if space.mode == EXACT else ball.radius
    if window > ball.radius and not (space.mode == EXACT and window >= ball.group.diameter):
        raise WindowError(window, ball.radius)
    idx = ball.window(window)
    values = space.T[np.ix_(idx, idx)].copy()
    return CoefficientMatrix(
        group=ball.group,
        elements=tuple(ball.elements[i] for i in idx),
        values=values,
        distances=ball.distance_matrix[np.ix_(idx, idx)],
        window=int(window),
        space=space,
        indices=idx,
    )


@dataclass
class Certificate:
    direction: str
    group: str
    window: int
    epsilon_target: float
    epsilon_measured: float
    S_declared: float
    S_measured: int
    verdicts: dict
    witnesses: list
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


def _witness(matrix: CoefficientMatrix, i: int, j: int, condition: str) -> dict:
    fmt = matrix.group.format_element
    return {"condition": condition, "g": fmt(matrix.elements[i]), "h": fmt(matrix.elements[j]),
            "value": float(matrix.values[i, j])}


def _conditions(matrix: CoefficientMatrix, epsilon: float, S: float):
    c, d = matrix.values, matrix.distances
    witnesses = []

    diag_gap = np.abs(np.diag(c) - 1.0)
    unit_ok = bool(np.all(diag_gap <= UNIT_TOL))
    for i in np.flatnonzero(diag_gap > UNIT_TOL)[:MAX_WITNESSES]:
        witnesses.append(_witness(matrix, i, i, "unit_norm"))

    near = d <= 1
    gaps = np.where(near, np.abs(1.0 - c), 0.0)
    eps_measured = float(gaps.max()) if near.any() else 0.0
    neighbor_ok = eps_measured <= epsilon + UNIT_TOL
    for i, j in np.argwhere(gaps > epsilon + UNIT_TOL)[:MAX_WITNESSES]:
        witnesses.append(_witness(matrix, i, j, "neighbor"))

    far = (d >= S) & (c != 0.0)
    support_ok = not far.any()
    for i, j in np.argwhere(far)[:MAX_WITNESSES]:
        witnesses.append(_witness(matrix, i, j, "support"))

    nonzero = c != 0.0
    S_measured = int(d[nonzero].max()) + 1 if nonzero.any() else 0
    verdicts = {"unit_norm": unit_ok, "neighbor": neighbor_ok, "support": support_ok}
    return verdicts, eps_measured, S_measured, witnesses


def lemma_bound(epsilon: float) -> float:
    """``eps + eps/(1+eps)``, the neighbour closeness promised by the construction."""
    return epsilon + epsilon / (1.0 + epsilon)


def verify_forward(matrix: CoefficientMatrix, epsilon: float, S: float) -> Certificate:
    """Check unit norm, closeness ``|1 - c| <= epsilon`` at distance <= 1, and support at ``S``."""
    verdicts, eps_m, S_m, witnesses = _conditions(matrix, epsilon, S)
    details = {}
    space = matrix.space
    if space is not None:
        kernel = space.kernel
        sub = kernel.values[np.ix_(matrix.indices, matrix.indices)]
        near = matrix.distances <= 1
        k_eps = float(np.max(np.abs(1.0 - sub[near])))
        off = ~np.eye(len(sub), dtype=bool)
        identity_gap = float(np.max(np.abs((1.0 + space.epsilon) * matrix.values[off] - sub[off]))) \
            if off.any() else 0.0
        bound = lemma_bound(space.epsilon)
        details = {
            "renorm_epsilon": space.epsilon,
            "kernel_epsilon": k_eps,
            "kernel_meets_epsilon": k_eps <= space.epsilon + UNIT_TOL,
            "lemma_bound": bound,
            "lemma_bound_holds": eps_m <= bound + UNIT_TOL,
            "coefficient_identity_max_gap": identity_gap,
            "kernel_provenance": kernel.provenance,
            "mode": space.mode,
        }
    return Certificate("forward", matrix.group.spec(), matrix.window, float(epsilon), eps_m,
                       float(S), S_m, verdicts, witnesses, details)


@dataclass(frozen=True)
class Displacement:
    max_displacement: float
    pair: Optional[tuple]
    per_pair: np.ndarray


def almost_invariance_check(matrix: CoefficientMatrix, epsilon: Optional[float] = None) -> Displacement:
    """``max ||pi_g v - pi_h v||_T = sqrt(2 - 2 c(g, h))`` over neighbour pairs."""
    c, d = matrix.values, matrix.distances
    if np.any(c > 1.0 + UNIT_TOL):
        i, j = np.argwhere(c > 1.0 + UNIT_TOL)[0]
        raise NumericIntegrityError(f"coefficient {c[i, j]!r} exceeds 1 at pair ({i}, {j})")
    near = d <= 1
    disp = np.where(near, np.sqrt(np.maximum(2.0 - 2.0 * c, 0.0)), 0.0)
    if not near.any():
        return Displacement(0.0, None, disp)
    i, j = np.unravel_index(np.argmax(disp), disp.shape)
    return Displacement(float(disp[i, j]), (int(i), int(j)), disp)


def verify_converse(matrix: CoefficientMatrix, epsilon: float, S: float, tol_psd: float = 1e-8) -> Certificate:
    """Treat ``c`` as a kernel: positive semidefinite plus the three kernel conditions."""
    verdicts, eps_m, S_m, witnesses = _conditions(matrix, epsilon, S)
    psd = psd_check(matrix.values, tol_psd)
    verdicts["positive_definite"] = psd.passed
    if not psd.passed:
        witnesses.append({"condition": "positive_definite", "g": None, "h": None,
                          "value": psd.min_eigenvalue})
    details = {"min_eigenvalue": psd.min_eigenvalue, "psd_tolerance": psd.tolerance}
    return Certificate("converse", matrix.group.spec(), matrix.window, float(epsilon), eps_m,
                       float(S), S_m, verdicts, witnesses, details)


def matrix_from_values(group: GroupModel, elements, values, window: Optional[int] = None) -> CoefficientMatrix:
    """Wrap an externally supplied coefficient matrix."""
    elements = tuple(elements)
    values = np.asarray(values, dtype=float).reshape(len(elements), len(elements))
    distances = group.pairwise_distances(list(elements))
    if window is None:
        window = max((group.length(g) for g in elements), default=0)
    return CoefficientMatrix(group, elements, values, distances, int(window))


def S_as_json(S: float):
    return None if math.isinf(S) else S
