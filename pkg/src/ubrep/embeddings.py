"""Coarse embeddings of the supported groups into finite-dimensional Euclidean space."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from .errors import ParameterError
from .groups import Ball, FreeGroup, GroupModel, Lattice, SymmetricGroup, Torus


@dataclass(frozen=True, eq=False)
class EmbeddingSpec:
    """A map ``f: G -> R^D`` with ``f(e) = 0`` and declared distortion moduli.

    ``rho_minus``/``rho_plus`` bound ``||f(g) - f(h)||`` from below/above as
    functions of ``d(g, h)``. ``theta`` is the declared compression excess
    over 1/2 (``rho_minus(t) >= C t^(1/2 + theta) + D`` for ``t >= E``) or
    None when the group is finite and the notion is void. ``radial``, when
    set, gives ``||f(g)||^2`` as a function of ``|g|`` alone.
    """

    name: str
    group: GroupModel
    coords: Callable[[list], np.ndarray]
    rho_minus: Callable[[float], float]
    rho_plus: Callable[[float], float]
    rho_minus_desc: str
    rho_plus_desc: str
    C: Optional[float] = None
    D: Optional[float] = None
    E: Optional[float] = None
    theta: Optional[float] = None
    radial: Optional[Callable[[int], float]] = None

    def sq_distance_matrix(self, elements, others=None) -> np.ndarray:
        """Squared Euclidean distances ``||f(g) - f(h)||^2``."""
        elements = list(elements)
        same = others is None
        others = elements if same else list(others)
        x = self.coords(elements if same else elements + others)
        a, b = (x, x) if same else (x[: len(elements)], x[len(elements):])
        if sp.issparse(x):
            gram = (a @ b.T).toarray()
            sa = np.asarray(a.multiply(a).sum(axis=1)).ravel()
            sb = np.asarray(b.multiply(b).sum(axis=1)).ravel()
            out = np.maximum(sa[:, None] + sb[None, :] - 2.0 * gram, 0.0)
            if same:
                np.fill_diagonal(out, 0.0)
            return out
        return cdist(a, b, "sqeuclidean")

    @property
    def hypothesis_holds(self) -> Optional[bool]:
        """Whether the declared compression exceeds 1/2 strictly."""
        if self.theta is None:
            return None
        return self.theta > 0


def identity_embedding(group: Lattice) -> EmbeddingSpec:
    if not isinstance(group, Lattice):
        raise ParameterError("identity embedding needs a lattice Z^n")
    n = group.n
    return EmbeddingSpec(
        name="identity",
        group=group,
        coords=lambda els: np.asarray(els, dtype=float).reshape(len(els), n),
        rho_minus=lambda t: t / math.sqrt(n),
        rho_plus=lambda t: float(t),
        rho_minus_desc=f"t/sqrt({n})",
        rho_plus_desc="t",
        C=1 / math.sqrt(n),
        D=0.0,
        E=0.0,
        theta=0.5,
        radial=(lambda t: float(t * t)) if n == 1 else None,
    )


def _edge_coords(elements):
    # one coordinate per tree edge, keyed by its endpoint farther from e
    prefixes = {}
    for w in elements:
        for p in range(1, len(w) + 1):
            prefixes.setdefault(w[:p], len(prefixes))
    rows, cols = [], []
    for i, w in enumerate(elements):
        for p in range(1, len(w) + 1):
            rows.append(i)
            cols.append(prefixes[w[:p]])
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)),
                         shape=(len(elements), max(len(prefixes), 1)))


def edge_embedding(group: FreeGroup) -> EmbeddingSpec:
    """Indicator of the geodesic edge set from ``e``; squared distance equals word distance."""
    if not isinstance(group, FreeGroup):
        raise ParameterError("edge embedding needs a free group")
    return EmbeddingSpec(
        name="edge",
        group=group,
        coords=_edge_coords,
        rho_minus=math.sqrt,
        rho_plus=math.sqrt,
        rho_minus_desc="sqrt(t)",
        rho_plus_desc="sqrt(t)",
        C=1.0,
        D=0.0,
        E=0.0,
        theta=0.0,
        radial=float,
    )


def circle_embedding(group: Torus) -> EmbeddingSpec:
    """Each coordinate of ``(Z/m)^n`` on a circle of circumference ``m``."""
    if not isinstance(group, Torus):
        raise ParameterError("circle embedding needs a torus or cyclic group")
    m, n = group.m, group.n
    scale = m / (2 * math.pi)

    def coords(els):
        x = np.asarray(els, dtype=float).reshape(len(els), n) * (2 * math.pi / m)
        return np.concatenate([scale * (np.cos(x) - 1.0), scale * np.sin(x)], axis=1)

    return EmbeddingSpec(
        name="circle",
        group=group,
        coords=coords,
        rho_minus=lambda t: 2 * t / (math.pi * math.sqrt(n)),
        rho_plus=lambda t: float(t),
        rho_minus_desc=f"2t/(pi*sqrt({n}))",
        rho_plus_desc="t",
    )


def permutation_embedding(group: SymmetricGroup) -> EmbeddingSpec:
    """``g -> P_g - I`` flattened; squared distance is twice the number of moved points."""
    if not isinstance(group, SymmetricGroup):
        raise ParameterError("permutation embedding needs a symmetric group")
    n = group.n

    def coords(els):
        x = np.zeros((len(els), n, n))
        for i, p in enumerate(els):
            x[i, list(p), range(n)] = 1.0
        x -= np.eye(n)
        return x.reshape(len(els), n * n)

    return EmbeddingSpec(
        name="permutation",
        group=group,
        coords=coords,
        rho_minus=lambda t: 2.0 * min(t, 1),
        rho_plus=lambda t: 2.0 * math.sqrt(t),
        rho_minus_desc="2*min(t,1)",
        rho_plus_desc="2*sqrt(t)",
    )


EMBEDDINGS = {
    "identity": identity_embedding,
    "edge": edge_embedding,
    "circle": circle_embedding,
    "permutation": permutation_embedding,
}


def default_embedding(group: GroupModel) -> EmbeddingSpec:
    if isinstance(group, Lattice):
        return identity_embedding(group)
    if isinstance(group, FreeGroup):
        return edge_embedding(group)
    if isinstance(group, Torus):
        return circle_embedding(group)
    if isinstance(group, SymmetricGroup):
        return permutation_embedding(group)
    raise ParameterError(f"no embedding for {group.spec()}")


def make_embedding(name: str, group: GroupModel) -> EmbeddingSpec:
    try:
        factory = EMBEDDINGS[name]
    except KeyError:
        raise ParameterError(f"unknown embedding {name!r}") from None
    return factory(group)


@dataclass
class CompressionReport:
    distances: np.ndarray
    min_envelope: np.ndarray
    max_envelope: np.ndarray
    fitted_exponent: Optional[float]
    violations: list
    declared_theta: Optional[float]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def exceeds_half(self) -> Optional[bool]:
        """True when the lower envelope grows strictly faster than ``t^(1/2)``."""
        if self.fitted_exponent is None:
            return None
        return self.fitted_exponent > 0.5 + 1e-6


def compression_probe(ball: Ball, emb: EmbeddingSpec, tol: float = 1e-9) -> CompressionReport:
    """Per-distance min/max of ``||f(g) - f(h)||`` over all pairs of the ball."""
    d = ball.distance_matrix
    emb_d = np.sqrt(emb.sq_distance_matrix(ball.elements))
    ts = np.unique(d)
    mins = np.array([emb_d[d == t].min() for t in ts])
    maxs = np.array([emb_d[d == t].max() for t in ts])

    violations = []
    lo = np.vectorize(emb.rho_minus, otypes=[float])(d)
    hi = np.vectorize(emb.rho_plus, otypes=[float])(d)
    for bound, bad in (("rho_minus", emb_d < lo - tol), ("rho_plus", emb_d > hi + tol)):
        idx = np.argwhere(bad)
        if len(idx):
            i, j = idx[0]
            violations.append({
                "modulus": bound,
                "g": ball.group.format_element(ball.elements[i]),
                "h": ball.group.format_element(ball.elements[j]),
                "distance": int(d[i, j]),
                "embedded": float(emb_d[i, j]),
            })

    pos = ts >= 1
    exponent = None
    if pos.sum() >= 2 and np.all(mins[pos] > 0):
        exponent = float(np.polyfit(np.log(ts[pos]), np.log(mins[pos]), 1)[0])
    return CompressionReport(ts, mins, maxs, exponent, violations, emb.theta)
