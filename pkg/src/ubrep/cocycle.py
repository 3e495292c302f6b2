"""Direct sums of renormed representations and the cocycle ``b_g = (+)_k (pi_k)_g v_k - v_k``."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CompositionError, ModeError, ParameterError
from .renorm import EXACT, RenormedSpace, rep_norm_infimum, sup_rep_norm, translation_action


@dataclass(frozen=True, eq=False)
class CocycleModel:
    """Summands share one ball; ``v_k = delta_e`` in every summand."""

    epsilons: tuple
    spaces: tuple
    norm_sq: np.ndarray = field(repr=False)
    rep_norm_sup: tuple
    rep_norm_inf: tuple

    @property
    def ball(self):
        return self.spaces[0].ball

    @property
    def C_measured(self) -> Optional[float]:
        if any(c is None for c in self.rep_norm_inf):
            return None
        return max(self.rep_norm_inf)

    def vector(self, g: tuple) -> list[np.ndarray]:
        """``b_g`` summand by summand, by direct translation of ``delta_e``."""
        ball = self.ball
        e = ball.index[ball.group.identity()]
        out = []
        for space in self.spaces:
            delta = np.zeros(len(ball))
            delta[e] = 1.0
            out.append(translation_action(space, g).matrix @ delta - delta)
        return out

    def direct_norm_sq(self, g: tuple) -> float:
        return float(sum(b @ (s.T @ b) for b, s in zip(self.vector(g), self.spaces)))


def displacement_norm_sq(rows) -> np.ndarray:
    """``sum_k (2 - 2 c_k(e, g))`` from the rows ``c_k(e, .)``."""
    return sum(2.0 - 2.0 * np.asarray(r, dtype=float) for r in rows)


def cocycle_build(summands, exact_norms: bool = True) -> CocycleModel:
    """Build from ``[(eps_k, space_k), ...]`` with strictly decreasing ``eps_k``.

    ``||b_g||^2 = sum_k (2 - 2 c_k(e, g))``. In exact mode the uniform bound
    ``C = max_k ||pi_k||`` is measured by the infimum formula and cross-checked
    against the singular value route.
    """
    summands = list(summands)
    if not summands:
        raise ParameterError("need at least one summand")
    eps = tuple(float(e) for e, _ in summands)
    spaces = tuple(s for _, s in summands)
    if any(b >= a for a, b in zip(eps, eps[1:])) or eps[-1] <= 0:
        raise ParameterError("epsilon sequence must be positive and strictly decreasing")
    ball = spaces[0].ball
    for s in spaces[1:]:
        if s.ball.group != ball.group or s.ball.elements != ball.elements:
            raise CompositionError("summands must share the group and the ball")
    e = ball.index[ball.group.identity()]
    norm_sq = displacement_norm_sq([s.T[e, :] for s in spaces])
    sups, infs = [], []
    for s in spaces:
        if exact_norms and s.mode == EXACT:
            sups.append(sup_rep_norm(s))
            infs.append(rep_norm_infimum(s))
        else:
            sups.append(None)
            infs.append(None)
    return CocycleModel(eps, spaces, np.asarray(norm_sq), tuple(sups), tuple(infs))


def cocycle_identity_check(model: CocycleModel, pairs: int = 100, seed: int = 0) -> float:
    """Max over sampled ``(g, h)`` of ``||b_gh - rho_g b_h - b_g|| / (1 + ||b_gh||)``."""
    if any(s.mode != EXACT for s in model.spaces):
        raise ModeError("cocycle identity needs exact-mode summands")
    ball = model.ball
    group = ball.group
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        i, j = rng.integers(len(ball), size=2)
        g, h = ball.elements[i], ball.elements[j]
        b_gh = model.vector(group.multiply(g, h))
        b_h = model.vector(h)
        b_g = model.vector(g)
        res_sq = 0.0
        norm_sq = 0.0
        for k, space in enumerate(model.spaces):
            rho_g = translation_action(space, g).matrix
            r = b_gh[k] - (rho_g @ b_h[k] + b_g[k])
            res_sq += r @ (space.T @ r)
            norm_sq += b_gh[k] @ (space.T @ b_gh[k])
        worst = max(worst, np.sqrt(max(res_sq, 0.0)) / (1.0 + np.sqrt(max(norm_sq, 0.0))))
    return float(worst)


def norm_growth_profile(model: CocycleModel) -> list[dict]:
    """Min/mean/max of ``||b_g||`` per word length."""
    ball = model.ball
    norms = np.sqrt(np.maximum(model.norm_sq, 0.0))
    rows = []
    for t in np.unique(ball.distances):
        sel = norms[ball.distances == t]
        rows.append({"length": int(t), "min": float(sel.min()), "mean": float(sel.mean()),
                     "max": float(sel.max())})
    return rows


def min_is_monotone(profile: list[dict]) -> bool:
    mins = [r["min"] for r in profile]
    return all(b >= a - 1e-12 for a, b in zip(mins, mins[1:]))


def default_epsilons(count: int = 8) -> list[float]:
    return [2.0**-k for k in range(1, count + 1)]
