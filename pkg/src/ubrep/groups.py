"""Finitely generated groups with word metrics and canonical ball enumeration.

Elements are plain tuples of ints, so they hash, sort and serialize cheaply:

* lattice ``Z^n`` and torus ``(Z/m)^n``: coordinate vectors,
* free group ``F_k``: reduced words, letter ``i`` is generator ``i`` and
  ``-i`` its inverse (``a = 1``, ``A = -1``, ``b = 2`` ...),
* symmetric group ``Sym(n)``: the image array of the permutation.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ParameterError, ParseError, SizeError

DEFAULT_CAP = 50_000

Element = tuple


class GroupModel:
    """Base class; subclasses define the multiplication and the word length."""

    family: str = ""
    is_finite: bool = False

    def identity(self) -> Element:
        raise NotImplementedError

    def generators(self) -> list[Element]:
        raise NotImplementedError

    def multiply(self, g: Element, h: Element) -> Element:
        raise NotImplementedError

    def inverse(self, g: Element) -> Element:
        raise NotImplementedError

    def length(self, g: Element) -> int:
        raise NotImplementedError

    def predicted_ball_size(self, radius: int) -> int:
        raise NotImplementedError

    def sphere_sizes_closed_form(self, radius: int) -> list[int] | None:
        """Sphere counts without enumeration, when a formula is known."""
        return None

    @property
    def order(self) -> int | None:
        return None

    @property
    def diameter(self) -> int | None:
        return None

    def spec(self) -> str:
        raise NotImplementedError

    def format_element(self, g: Element) -> str:
        return "(" + ",".join(str(x) for x in g) + ")"

    def parse_element(self, text: str) -> Element:
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")):
            raise ParseError(f"cannot parse element {text!r}")
        body = text[1:-1].strip()
        g = tuple(int(x) for x in body.split(",")) if body else ()
        self.validate(g)
        return g

    def validate(self, g: Element) -> None:
        pass

    def distance(self, g: Element, h: Element) -> int:
        """Word metric ``d(g, h) = |g^{-1} h|``."""
        return self.length(self.multiply(self.inverse(g), h))

    def pairwise_distances(self, elements: list[Element]) -> np.ndarray:
        n = len(elements)
        out = np.zeros((n, n), dtype=np.int64)
        for i, g in enumerate(elements):
            gi = self.inverse(g)
            for j in range(i + 1, n):
                out[i, j] = out[j, i] = self.length(self.multiply(gi, elements[j]))
        return out

    def __eq__(self, other):
        return isinstance(other, GroupModel) and self.spec() == other.spec()

    def __hash__(self):
        return hash(self.spec())

    def __repr__(self):
        return f"GroupModel({self.spec()!r})"


def _lattice_ball_size(n: int, radius: int) -> int:
    return sum(2**k * math.comb(n, k) * math.comb(radius, k) for k in range(min(n, radius) + 1))


def _lattice_sphere_size(n: int, r: int) -> int:
    if r == 0:
        return 1
    return _lattice_ball_size(n, r) - _lattice_ball_size(n, r - 1)


class Lattice(GroupModel):
    family = "z"

    def __init__(self, n: int):
        if n < 1:
            raise ParameterError("lattice rank must be positive")
        self.n = n

    def identity(self):
        return (0,) * self.n

    def generators(self):
        gens = []
        for i in range(self.n):
            for s in (1, -1):
                e = [0] * self.n
                e[i] = s
                gens.append(tuple(e))
        return gens

    def multiply(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g):
        return tuple(-a for a in g)

    def length(self, g):
        return sum(abs(a) for a in g)

    def predicted_ball_size(self, radius):
        return _lattice_ball_size(self.n, radius)

    def sphere_sizes_closed_form(self, radius):
        return [_lattice_sphere_size(self.n, r) for r in range(radius + 1)]

    def pairwise_distances(self, elements):
        x = np.asarray(elements, dtype=np.int64).reshape(len(elements), self.n)
        return np.abs(x[:, None, :] - x[None, :, :]).sum(axis=2)

    def validate(self, g):
        if len(g) != self.n:
            raise ParseError(f"expected {self.n} coordinates, got {len(g)}")

    def spec(self):
        return f"z:{self.n}"


class Torus(GroupModel):
    family = "torus"
    is_finite = True

    def __init__(self, m: int, n: int = 1, cyclic: bool = False):
        if m < 2 or n < 1:
            raise ParameterError("torus needs modulus >= 2 and rank >= 1")
        if cyclic and n != 1:
            raise ParameterError("cyclic group has rank 1")
        self.m = m
        self.n = n
        self.cyclic = cyclic
        if cyclic:
            self.family = "cyclic"

    def identity(self):
        return (0,) * self.n

    def generators(self):
        gens = []
        for i in range(self.n):
            for s in (1, self.m - 1):
                e = [0] * self.n
                e[i] = s
                if tuple(e) not in gens:
                    gens.append(tuple(e))
        return gens

    def multiply(self, g, h):
        return tuple((a + b) % self.m for a, b in zip(g, h))

    def inverse(self, g):
        return tuple((-a) % self.m for a in g)

    def length(self, g):
        return sum(min(a, self.m - a) for a in g)

    @property
    def order(self):
        return self.m**self.n

    @property
    def diameter(self):
        return self.n * (self.m // 2)

    def predicted_ball_size(self, radius):
        return min(self.order, _lattice_ball_size(self.n, radius))

    def pairwise_distances(self, elements):
        x = np.asarray(elements, dtype=np.int64).reshape(len(elements), self.n)
        d = np.abs(x[:, None, :] - x[None, :, :])
        return np.minimum(d, self.m - d).sum(axis=2)

    def validate(self, g):
        if len(g) != self.n or any(not 0 <= a < self.m for a in g):
            raise ParseError(f"torus coordinates must lie in [0,{self.m})")

    def spec(self):
        return f"cyclic:{self.m}" if self.cyclic else f"torus:{self.m},{self.n}"


def _free_reduce(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class FreeGroup(GroupModel):
    family = "free"

    def __init__(self, k: int):
        if not 1 <= k <= 26:
            raise ParameterError("free group rank must be in 1..26")
        self.k = k

    def identity(self):
        return ()

    def generators(self):
        return [(s * i,) for i in range(1, self.k + 1) for s in (1, -1)]

    def multiply(self, g, h):
        # cancel at the seam only; both inputs are reduced
        i = 0
        while i < min(len(g), len(h)) and g[len(g) - 1 - i] == -h[i]:
            i += 1
        return g[: len(g) - i] + h[i:]

    def inverse(self, g):
        return tuple(-x for x in reversed(g))

    def length(self, g):
        return len(g)

    def predicted_ball_size(self, radius):
        return sum(self.sphere_sizes_closed_form(radius))

    def sphere_sizes_closed_form(self, radius):
        return [1] + [2 * self.k * (2 * self.k - 1) ** (r - 1) for r in range(1, radius + 1)]

    def pairwise_distances(self, elements):
        n = len(elements)
        width = max((len(w) for w in elements), default=0)
        words = np.zeros((n, max(width, 1)), dtype=np.int64)
        for i, w in enumerate(elements):
            words[i, : len(w)] = w
        lengths = np.array([len(w) for w in elements], dtype=np.int64)
        # d(g, h) = |g| + |h| - 2 * (common prefix length)
        prefix = np.zeros((n, n), dtype=np.int64)
        alive = np.ones((n, n), dtype=bool)
        for p in range(width):
            col = words[:, p]
            alive &= (col[:, None] == col[None, :]) & (col[:, None] != 0)
            prefix += alive
        return lengths[:, None] + lengths[None, :] - 2 * prefix

    def format_element(self, g):
        if not g:
            return "e"
        return "".join(chr(ord("a") + x - 1) if x > 0 else chr(ord("A") - x - 1) for x in g)

    def parse_element(self, text):
        text = text.strip()
        if text in ("e", ""):
            return ()
        word = []
        for ch in text:
            if "a" <= ch <= "z":
                word.append(ord(ch) - ord("a") + 1)
            elif "A" <= ch <= "Z":
                word.append(-(ord(ch) - ord("A") + 1))
            else:
                raise ParseError(f"bad letter {ch!r} in word {text!r}")
        if any(abs(x) > self.k for x in word):
            raise ParseError(f"word {text!r} uses a letter outside F_{self.k}")
        return _free_reduce(word)

    def spec(self):
        return f"free:{self.k}"


def _inversions(p) -> int:
    return sum(1 for i, j in itertools.combinations(range(len(p)), 2) if p[i] > p[j])


class SymmetricGroup(GroupModel):
    """Sym(n) generated by adjacent transpositions; length is the inversion count."""

    family = "sym"
    is_finite = True

    def __init__(self, n: int):
        if not 2 <= n <= 6:
            raise ParameterError("symmetric group supported for 2 <= n <= 6")
        self.n = n

    def identity(self):
        return tuple(range(self.n))

    def generators(self):
        gens = []
        for i in range(self.n - 1):
            p = list(range(self.n))
            p[i], p[i + 1] = p[i + 1], p[i]
            gens.append(tuple(p))
        return gens

    def multiply(self, g, h):
        return tuple(g[i] for i in h)

    def inverse(self, g):
        out = [0] * self.n
        for i, x in enumerate(g):
            out[x] = i
        return tuple(out)

    def length(self, g):
        return _inversions(g)

    @property
    def order(self):
        return math.factorial(self.n)

    @property
    def diameter(self):
        return self.n * (self.n - 1) // 2

    def predicted_ball_size(self, radius):
        return self.order

    def pairwise_distances(self, elements):
        p = np.asarray(elements, dtype=np.int64).reshape(len(elements), self.n)
        pinv = np.argsort(p, axis=1)
        rows = np.arange(len(elements))[:, None, None]
        q = pinv[rows, p[None, :, :]]  # q[i, j] = g_i^{-1} h_j
        out = np.zeros(q.shape[:2], dtype=np.int64)
        for a, b in itertools.combinations(range(self.n), 2):
            out += q[:, :, a] > q[:, :, b]
        return out

    def format_element(self, g):
        return "[" + ",".join(str(x) for x in g) + "]"

    def parse_element(self, text):
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ParseError(f"cannot parse permutation {text!r}")
        g = tuple(int(x) for x in text[1:-1].split(","))
        if sorted(g) != list(range(self.n)):
            raise ParseError(f"{text!r} is not a permutation of 0..{self.n - 1}")
        return g

    def spec(self):
        return f"sym:{self.n}"


_SPEC_RE = re.compile(r"^\s*([a-z]+)\s*:\s*([0-9]+(?:\s*,\s*[0-9]+)*)\s*$")


def parse_group(text: str) -> GroupModel:
    """Parse ``z:n``, ``free:k``, ``torus:m,n``, ``cyclic:m`` or ``sym:n``."""
    match = _SPEC_RE.match(text or "")
    if not match:
        raise ParseError(f"malformed group spec {text!r}")
    family = match.group(1)
    args = [int(x) for x in match.group(2).split(",")]
    arity = {"z": 1, "free": 1, "torus": 2, "cyclic": 1, "sym": 1}
    if family not in arity:
        raise ParseError(f"unknown group family {family!r}")
    if len(args) != arity[family]:
        raise ParseError(f"group family {family!r} takes {arity[family]} parameter(s)")
    if family == "z":
        return Lattice(args[0])
    if family == "free":
        return FreeGroup(args[0])
    if family == "torus":
        return Torus(args[0], args[1])
    if family == "cyclic":
        return Torus(args[0], 1, cyclic=True)
    return SymmetricGroup(args[0])


@dataclass(frozen=True, eq=False)
class Ball:
    """Ball of radius ``radius`` around the identity, in canonical order."""

    group: GroupModel
    radius: int
    elements: tuple
    distances: np.ndarray = field(repr=False)

    @cached_property
    def index(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        return self.group.pairwise_distances(list(self.elements))

    @property
    def is_full_group(self) -> bool:
        return self.group.is_finite and len(self.elements) == self.group.order

    def __len__(self):
        return len(self.elements)

    def window(self, radius: int) -> np.ndarray:
        """Indices of elements with word length at most ``radius``."""
        return np.flatnonzero(self.distances <= radius)


def ball_enumerate(group: GroupModel, radius: int, cap: int = DEFAULT_CAP) -> Ball:
    """BFS enumeration, layers sorted lexicographically on canonical forms."""
    if radius < 0:
        raise ParameterError("radius must be non-negative")
    predicted = group.predicted_ball_size(radius)
    if predicted > cap:
        raise SizeError(predicted, cap)
    gens = group.generators()
    e = group.identity()
    elements = [e]
    distances = [0]
    seen = {e}
    frontier = [e]
    for r in range(1, radius + 1):
        layer = set()
        for g in frontier:
            for s in gens:
                x = group.multiply(g, s)
                if x not in seen:
                    layer.add(x)
        if not layer:
            break
        frontier = sorted(layer)
        seen.update(frontier)
        elements.extend(frontier)
        distances.extend([r] * len(frontier))
    return Ball(group, radius, tuple(elements), np.asarray(distances, dtype=np.int64))


def full_ball(group: GroupModel, cap: int = DEFAULT_CAP) -> Ball:
    """The whole group as a ball of radius equal to its diameter."""
    if not group.is_finite:
        raise ParameterError(f"{group.spec()} is infinite")
    return ball_enumerate(group, group.diameter, cap)


def sphere_sizes(group: GroupModel, radius: int, cap: int = DEFAULT_CAP) -> list[int]:
    """``[s_0, ..., s_radius]`` with ``s_r = #{g : |g| = r}``.

    Free groups and lattices use their counting formulas; finite groups are
    enumerated, subject to ``cap``.
    """
    if radius < 0:
        raise ParameterError("radius must be non-negative")
    closed = group.sphere_sizes_closed_form(radius)
    if closed is not None:
        return closed
    ball = ball_enumerate(group, radius, cap)
    return np.bincount(ball.distances, minlength=radius + 1).tolist()
