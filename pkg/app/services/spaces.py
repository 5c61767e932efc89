"""
Ground spaces and config samplers.

A space knows how to draw a random element, nudge an element for hill
climbing, and whether its arithmetic is exact. Randomness always comes from a
stream keyed by ``(seed, *keys)``. Random configs are drawn in fixed blocks of
indices, one stream per block, so config ``i`` of a run never depends on the
budget or on the order in which samples are evaluated.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.models.domain import Config
from app.services.errors import ArgumentError

_SEED_MASK = (1 << 64) - 1

# stream namespaces
SAMPLE_STREAM = 0
PERMUTATION_STREAM = 1
REFINE_STREAM = 2
PROPERTY_STREAM = 3
SEC_STREAM = 4

# random configs come from one stream per block of this many indices
SAMPLE_BLOCK = 256


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator for one (seed, keys...) cell."""
    entropy = [int(seed) & _SEED_MASK] + [int(k) & _SEED_MASK for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


class Space:
    """Base class for ground spaces."""

    tag: str = "abstract"
    exact: bool = False

    def sample(self, rng: np.random.Generator) -> Any:
        raise NotImplementedError

    def perturb(self, value: Any, rng: np.random.Generator, step: float) -> Any:
        raise NotImplementedError

    def dilate(self, value: Any, t: float) -> Any:
        raise ArgumentError(f"space {self.tag} does not support dilation")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Space) and self.tag == other.tag

    def __hash__(self) -> int:
        return hash(self.tag)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.tag})"


class LabelSpace(Space):
    """Abstract labels 0..count-1; equality is exact."""

    exact = True

    def __init__(self, count: int = None):
        self.count = int(count or settings.label_count)
        if self.count < 2:
            raise ArgumentError("a label space needs at least 2 labels")
        self.tag = "labels"

    def sample(self, rng):
        return int(rng.integers(0, self.count))

    def perturb(self, value, rng, step):
        other = int(rng.integers(0, self.count - 1))
        return other if other < value else other + 1


class RealLine(Space):
    """Reals drawn uniformly from [low, high]."""

    exact = False

    def __init__(self, low: float = None, high: float = None):
        self.low = settings.real_low if low is None else float(low)
        self.high = settings.real_high if high is None else float(high)
        if not self.high > self.low:
            raise ArgumentError("real line needs low < high")
        self.tag = "reals"

    def sample(self, rng):
        return float(rng.uniform(self.low, self.high))

    def perturb(self, value, rng, step):
        return float(value) + float(rng.normal(0.0, step * (self.high - self.low)))

    def dilate(self, value, t):
        return value * t


class IntegerLine(Space):
    """Integers in [low, high], used where progression membership must be exact."""

    exact = True

    def __init__(self, low: int = None, high: int = None):
        self.low = settings.progression_low if low is None else int(low)
        self.high = settings.progression_high if high is None else int(high)
        if not self.high > self.low:
            raise ArgumentError("integer line needs low < high")
        self.tag = "reals"

    def sample(self, rng):
        return int(rng.integers(self.low, self.high + 1))

    def perturb(self, value, rng, step):
        return value + _integer_offset(rng, step, self.high - self.low)

    def dilate(self, value, t):
        return value * Fraction(t) if isinstance(t, (int, Fraction)) else value * t


class Plane(Space):
    """Points of the square [low, high]^2 with float coordinates."""

    exact = False

    def __init__(self, low: float = None, high: float = None):
        self.low = settings.plane_low if low is None else float(low)
        self.high = settings.plane_high if high is None else float(high)
        if not self.high > self.low:
            raise ArgumentError("plane needs low < high")
        self.tag = "plane"

    def sample(self, rng):
        x, y = rng.uniform(self.low, self.high, size=2)
        return (float(x), float(y))

    def perturb(self, value, rng, step):
        coords = list(value)
        axis = int(rng.integers(0, 2))
        coords[axis] = float(coords[axis]) + float(rng.normal(0.0, step * (self.high - self.low)))
        return tuple(coords)

    def dilate(self, value, t):
        return tuple(c * t for c in value)


class IntegerPlane(Space):
    """Lattice points of [0, coord_max]^2; the exact input for direction counting."""

    exact = True

    def __init__(self, coord_max: int = None):
        self.coord_max = int(coord_max if coord_max is not None else settings.integer_coord_max)
        if self.coord_max < 1:
            raise ArgumentError("integer plane needs coord_max >= 1")
        self.tag = "plane"

    def sample(self, rng):
        x, y = rng.integers(0, self.coord_max + 1, size=2)
        return (int(x), int(y))

    def perturb(self, value, rng, step):
        coords = list(value)
        axis = int(rng.integers(0, 2))
        coords[axis] = coords[axis] + _integer_offset(rng, step, self.coord_max)
        return tuple(coords)

    def dilate(self, value, t):
        return tuple(c * t for c in value)


class EuclideanSpace(Space):
    """Points of the cube [low, high]^k with float coordinates."""

    exact = False

    def __init__(self, dimension: int, low: float = None, high: float = None):
        if dimension < 1:
            raise ArgumentError("dimension must be >= 1")
        self.dimension = int(dimension)
        self.low = settings.plane_low if low is None else float(low)
        self.high = settings.plane_high if high is None else float(high)
        self.tag = "plane" if self.dimension == 2 else f"R^{self.dimension}"

    def sample(self, rng):
        return tuple(float(c) for c in rng.uniform(self.low, self.high, size=self.dimension))

    def perturb(self, value, rng, step):
        coords = list(value)
        axis = int(rng.integers(0, self.dimension))
        coords[axis] = float(coords[axis]) + float(rng.normal(0.0, step * (self.high - self.low)))
        return tuple(coords)

    def dilate(self, value, t):
        return tuple(c * t for c in value)


class GraphVertices(Space):
    """Vertices 0..V-1 of a connected graph; perturbation walks one edge."""

    exact = True

    def __init__(self, adjacency: Dict[int, Sequence[int]], name: str = "graph"):
        if not adjacency:
            raise ArgumentError("graph has no vertices")
        self.adjacency = {int(v): sorted(int(u) for u in nbrs) for v, nbrs in adjacency.items()}
        self.vertex_count = len(self.adjacency)
        self.tag = f"vertices:{name}"

    def sample(self, rng):
        return int(rng.integers(0, self.vertex_count))

    def perturb(self, value, rng, step):
        nbrs = self.adjacency.get(value) or []
        if not nbrs:
            return value
        return nbrs[int(rng.integers(0, len(nbrs)))]


def _integer_offset(rng: np.random.Generator, step: float, span: int) -> int:
    offset = int(round(float(rng.normal(0.0, max(1.0, step * span)))))
    if offset == 0:
        offset = 1 if rng.random() < 0.5 else -1
    return offset


@dataclass
class ConfigSampler:
    """
    Draws configs for an n-ary distance.

    Each entry copies an earlier entry with probability ``tie_rate`` (and the
    pivot copies a point with the same probability), so the degenerate shapes
    that attain the best constants show up often.
    """

    space: Space
    arity: int
    tie_rate: float = None
    _block: Optional[Tuple[Tuple[int, int], Tuple[Config, ...]]] = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.arity < 1:
            raise ArgumentError("arity must be >= 1")
        if self.tie_rate is None:
            self.tie_rate = settings.tie_rate
        if not 0.0 <= self.tie_rate < 1.0:
            raise ArgumentError("tie_rate must lie in [0, 1)")

    def sample_points(self, rng: np.random.Generator) -> Tuple[Any, ...]:
        points: List[Any] = []
        for i in range(self.arity):
            if i > 0 and rng.random() < self.tie_rate:
                points.append(points[int(rng.integers(0, i))])
            else:
                points.append(self.space.sample(rng))
        return tuple(points)

    def sample(self, rng: np.random.Generator) -> Config:
        points = self.sample_points(rng)
        if rng.random() < self.tie_rate:
            pivot = points[int(rng.integers(0, self.arity))]
        else:
            pivot = self.space.sample(rng)
        return Config(points=points, pivot=pivot)

    def sample_block(self, seed: int, block: int) -> Tuple[Config, ...]:
        """The SAMPLE_BLOCK configs with indices block * SAMPLE_BLOCK onwards."""
        cached = self._block
        if cached is not None and cached[0] == (seed, block):
            return cached[1]
        rng = stream(seed, SAMPLE_STREAM, block)
        configs = tuple(self.sample(rng) for _ in range(SAMPLE_BLOCK))
        self._block = ((seed, block), configs)
        return configs

    def sample_at(self, seed: int, index: int) -> Config:
        """Config number ``index`` of the run keyed by ``seed``."""
        if index < 0:
            raise ArgumentError("sample index must be >= 0")
        block, offset = divmod(index, SAMPLE_BLOCK)
        return self.sample_block(seed, block)[offset]

    def sample_range(self, seed: int, count: int) -> List[Config]:
        """Configs 0..count-1; the same prefix for every count."""
        configs: List[Config] = []
        for block in range(-(-count // SAMPLE_BLOCK)):
            configs.extend(self.sample_block(seed, block))
        return configs[:count]

    def perturb(self, config: Config, rng: np.random.Generator, step: float) -> Config:
        """Nudge one entry (a point or the pivot)."""
        slot = int(rng.integers(0, self.arity + 1))
        if slot == self.arity:
            return Config(points=config.points, pivot=self.space.perturb(config.pivot, rng, step))
        points = list(config.points)
        points[slot] = self.space.perturb(points[slot], rng, step)
        return Config(points=tuple(points), pivot=config.pivot)
