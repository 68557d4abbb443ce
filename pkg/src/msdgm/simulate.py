"""Synthetic multi-type marked patterns with known pairwise couplings.

Random stream layout (version 1, PCG64): type ``k`` draws its base sample
from ``SeedSequence(seed, spawn_key=(k, 0))`` in the order x (n), y (n),
marks (n). A coupled type ``b`` additionally uses ``spawn_key=(b, 1)`` for
choosing partner points and drawing the jitter. Base draws never depend on
the coupling design, so a coupling with rho = 0 reproduces the independent
sample exactly and adding types leaves earlier types untouched.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .pattern import MarkedPointPattern, Window

STREAM_LAYOUT_VERSION = 1


@dataclass(frozen=True)
class Coupling:
    a: int
    b: int
    rho: float
    sigma: float

    def __post_init__(self):
        if not 0 <= self.rho <= 1:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.a == self.b:
            raise ValueError("a coupling needs two distinct types")


@dataclass(frozen=True)
class SimulationSpec:
    d: int
    n: int
    seed: int = 0
    couplings: tuple[Coupling, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(
            c if isinstance(c, Coupling) else Coupling(**c) for c in self.couplings))
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        seen_b = set()
        for c in self.couplings:
            if not (0 <= c.a < self.d and 0 <= c.b < self.d):
                raise ValueError(f"coupling ({c.a}, {c.b}) references a type outside 0..{self.d - 1}")
            if c.b in seen_b:
                raise ValueError(f"type {c.b} is the dependent side of more than one coupling")
            seen_b.add(c.b)

    @property
    def type_names(self) -> tuple[str, ...]:
        return tuple(f"T{k}" for k in range(self.d))

    def truth(self) -> set[frozenset[int]]:
        """Pairs that are coupled with positive strength."""
        return {frozenset((c.a, c.b)) for c in self.couplings if c.rho > 0}

    def with_seed(self, seed: int) -> "SimulationSpec":
        return SimulationSpec(self.d, self.n, seed, self.couplings)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SimulationSpec":
        doc = json.loads(text)
        return cls(int(doc["d"]), int(doc["n"]), int(doc.get("seed", 0)),
                   tuple(Coupling(**c) for c in doc.get("couplings", ())))


def _rng(seed: int, k: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k, stream))))


def reflect_unit(v: np.ndarray) -> np.ndarray:
    """Fold values back into [0, 1] by reflection at the edges."""
    v = np.mod(np.abs(v), 2.0)
    return np.where(v > 1.0, 2.0 - v, v)


def _base(spec: SimulationSpec) -> tuple[list[np.ndarray], list[np.ndarray], list[np.ndarray]]:
    xs, ys, ms = [], [], []
    for k in range(spec.d):
        rng = _rng(spec.seed, k, 0)
        xs.append(rng.random(spec.n))
        ys.append(rng.random(spec.n))
        ms.append(rng.standard_normal(spec.n))
    return xs, ys, ms


def _assemble(spec, xs, ys, ms) -> MarkedPointPattern:
    ids = np.repeat(np.arange(spec.d), spec.n)
    return MarkedPointPattern(np.concatenate(xs), np.concatenate(ys), ids, np.concatenate(ms),
                              Window.unit(), spec.type_names, rescaled=True)


def simulate_independent(spec: SimulationSpec) -> MarkedPointPattern:
    """d independent uniform (fixed-n) patterns with standard normal marks."""
    if spec.couplings:
        raise ValueError("spec has couplings; use simulate()")
    return _assemble(spec, *_base(spec))


def simulate(spec: SimulationSpec) -> MarkedPointPattern:
    """Sample the pattern, then apply the couplings in listed order.

    For a coupling (a, b, rho, sigma), round(rho n) points of type b are
    replaced by jittered copies of distinct type-a points and their marks
    become rho * (a's mark) + sqrt(1 - rho^2) * (b's own normal draw).
    """
    xs, ys, ms = _base(spec)
    for c in spec.couplings:
        m = int(round(c.rho * spec.n))
        if m == 0:
            continue
        rng = _rng(spec.seed, c.b, 1)
        partners = rng.choice(spec.n, size=m, replace=False)
        jitter = rng.standard_normal((2, m))
        x, y, mk = xs[c.b].copy(), ys[c.b].copy(), ms[c.b].copy()
        x[:m] = reflect_unit(xs[c.a][partners] + c.sigma * jitter[0])
        y[:m] = reflect_unit(ys[c.a][partners] + c.sigma * jitter[1])
        mk[:m] = c.rho * ms[c.a][partners] + np.sqrt(1.0 - c.rho**2) * mk[:m]
        xs[c.b], ys[c.b], ms[c.b] = x, y, mk
    return _assemble(spec, xs, ys, ms)


def simulate_coupled_pair(spec: SimulationSpec) -> MarkedPointPattern:
    if len(spec.couplings) != 1:
        raise ValueError("simulate_coupled_pair expects exactly one coupling")
    return simulate(spec)
