"""The renormed space ``H_T`` and the left regular representation acting on it."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import ModeError, NumericError, ParameterError
from .kernels import Kernel, psd_check

EXACT = "exact"
WINDOWED = "windowed"


@dataclass(frozen=True, eq=False)
class RenormedSpace:
    """``T = (K + eps I) / (1 + eps)`` with its cached eigendecomposition."""

    kernel: Kernel
    epsilon: float
    T: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    mode: str

    @property
    def ball(self):
        return self.kernel.ball

    @property
    def lam(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def opnorm(self) -> float:
        return float(self.eigenvalues[-1])

    def _power(self, p: float) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues**p) @ v.T

    @cached_property
    def sqrt(self) -> np.ndarray:
        return self._power(0.5)

    @cached_property
    def inv_sqrt(self) -> np.ndarray:
        self._guard()
        return self._power(-0.5)

    @cached_property
    def inv(self) -> np.ndarray:
        self._guard()
        return self._power(-1.0)

    def _guard(self):
        if self.lam < 1e-12:
            raise NumericError(f"T is too close to singular (lambda = {self.lam:.3e})")

    def norm(self, v: np.ndarray) -> float:
        return float(np.sqrt(max(renormed_inner(self, v, v), 0.0)))


def build_T(kernel: Kernel, epsilon: float, tol_psd: float = 1e-8) -> RenormedSpace:
    if not epsilon > 0:
        raise ParameterError("epsilon must be positive")
    check = psd_check(kernel, tol_psd)
    if not check.passed:
        raise NumericError(
            f"kernel is not positive semidefinite (min eigenvalue {check.min_eigenvalue:.3e})")
    K = kernel.values
    T = (K + epsilon * np.eye(len(K))) / (1.0 + epsilon)
    # T shares eigenvectors with K; its eigenvalues are shifted and rescaled
    kw, v = kernel.spectrum
    w = (kw + epsilon) / (1.0 + epsilon)
    mode = EXACT if kernel.ball.is_full_group else WINDOWED
    return RenormedSpace(kernel, float(epsilon), T, w, v, mode)


def spectral_data(space: RenormedSpace) -> tuple[float, float]:
    """``(lambda, ||T||)``; asserts the gap ``lambda >= eps/(1+eps)``."""
    lam, top = space.lam, space.opnorm
    floor = space.epsilon / (1.0 + space.epsilon)
    if lam < floor - 1e-10:
        raise NumericError(f"spectral gap {lam} below guaranteed {floor}")
    return lam, top


def norm_bounds(space: RenormedSpace) -> tuple[float, float]:
    """A priori bounds on every ``||pi_g||``: ``sqrt(||T||/lambda)`` and the cruder ``||T||/lambda``."""
    ratio = space.opnorm / space.lam
    return math.sqrt(ratio), ratio


def renormed_inner(space: RenormedSpace, u: np.ndarray, v: np.ndarray) -> float:
    """``<u, v>_T = <u, T v>_0``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    n = len(space.T)
    if u.shape[0] != n or v.shape[0] != n:
        raise ParameterError(f"vectors must have length {n}")
    return float(u @ (space.T @ v))


@dataclass(frozen=True, eq=False)
class TranslationAction:
    """Left translation ``delta_h -> delta_{gh}`` on the ball basis.

    ``target[h]`` is the index of ``gh`` or -1 when it leaves the ball; the
    matching columns of ``matrix`` are zero and ``mask`` is False there.
    """

    g: tuple
    target: np.ndarray
    mask: np.ndarray

    @cached_property
    def matrix(self) -> np.ndarray:
        n = len(self.target)
        out = np.zeros((n, n))
        cols = np.flatnonzero(self.mask)
        out[self.target[cols], cols] = 1.0
        return out

    @property
    def is_permutation(self) -> bool:
        return bool(self.mask.all())


def translation_action(space_or_ball, g: tuple) -> TranslationAction:
    ball = getattr(space_or_ball, "ball", space_or_ball)
    group = ball.group
    index = ball.index
    target = np.array([index.get(group.multiply(g, h), -1) for h in ball.elements])
    return TranslationAction(g, target, target >= 0)


def _require_exact(space: RenormedSpace, what: str):
    if space.mode != EXACT:
        raise ModeError(f"{what} is only certified in exact mode (finite, fully enumerated group)")


def rep_norm(space: RenormedSpace, g: tuple, estimate: bool = False) -> float:
    """``||pi_g||`` on ``H_T``, the largest singular value of ``T^1/2 L_g T^-1/2``.

    In windowed mode pass ``estimate=True`` to get a lower bound: the sup of
    ``||L_g v||_T / ||v||_T`` over ``v`` supported where ``gh`` stays in the ball.
    """
    action = translation_action(space, g)
    if space.mode == EXACT:
        m = space.sqrt[:, action.target] @ space.inv_sqrt
        return float(np.linalg.norm(m, 2))
    if not estimate:
        raise ModeError("rep_norm in windowed mode is only a lower-bound estimate; pass estimate=True")
    cols = np.flatnonzero(action.mask)
    if len(cols) == 0:
        return float("nan")
    moved = action.target[cols]
    a = space.T[np.ix_(moved, moved)]
    b = space.T[np.ix_(cols, cols)]
    top = scipy.linalg.eigh(a, b, eigvals_only=True, driver="gvd")[-1]
    return float(np.sqrt(max(top, 0.0)))


def infimum_constant(space: RenormedSpace, g: tuple) -> float:
    """Smallest ``c >= 1`` with ``c^2 T - L_{g^-1} T L_g`` positive, via the generalized eigenproblem."""
    _require_exact(space, "rep_norm_infimum")
    group = space.ball.group
    back = translation_action(space, group.inverse(g)).matrix
    fwd = translation_action(space, g).matrix
    a = back @ space.T @ fwd
    a = 0.5 * (a + a.T)
    top = scipy.linalg.eigh(a, space.T, eigvals_only=True, driver="gvd")[-1]
    return float(max(1.0, np.sqrt(max(top, 0.0))))


def rep_norm_infimum(space: RenormedSpace) -> float:
    _require_exact(space, "rep_norm_infimum")
    return max(infimum_constant(space, g) for g in space.ball.elements)


def sup_rep_norm(space: RenormedSpace) -> float:
    _require_exact(space, "sup rep_norm")
    return max(rep_norm(space, g) for g in space.ball.elements)


def adjoint_residual(space: RenormedSpace, g: tuple, pairs: int = 20, seed: int = 0) -> float:
    """Worst relative gap between ``<L_g u, v>_T`` and ``<u, T^-1 L_{g^-1} T v>_T``."""
    _require_exact(space, "adjoint_residual")
    rng = np.random.default_rng(seed)
    n = len(space.T)
    fwd = translation_action(space, g).matrix
    back = translation_action(space, space.ball.group.inverse(g)).matrix
    adj = space.inv @ back @ space.T
    worst = 0.0
    for _ in range(pairs):
        u = rng.standard_normal(n)
        v = rng.standard_normal(n)
        lhs = renormed_inner(space, fwd @ u, v)
        rhs = renormed_inner(space, u, adj @ v)
        worst = max(worst, abs(lhs - rhs) / (space.norm(u) * space.norm(v)))
    return worst
