"""Seeded random instances: spaces, self-maps and multimaps.

Uniformly random maps are rarely contractive, so the samplers here lean
toward a hub point.  Every function is deterministic in its seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qcfix.classify import GENERALIZED, minimal_q
from qcfix.metric import FiniteMetricSpace, MultiMap, SelfMap, generate_space
from qcfix.multivalued import mv_minimal_q


def random_self_map(s: FiniteMetricSpace, rng: np.random.Generator, hub_bias: float = 0.0) -> SelfMap:
    """Each point maps to a random point; with prob ``hub_bias`` to a point strictly closer to a hub."""
    n = len(s)
    hub = int(rng.integers(n))
    images = []
    for x in range(n):
        closer = [u for u in range(n) if s.d(u, hub) < s.d(x, hub)]
        if x == hub:
            images.append(hub if rng.random() < hub_bias else int(rng.integers(n)))
        elif closer and rng.random() < hub_bias:
            images.append(int(rng.choice(closer)))
        else:
            images.append(int(rng.integers(n)))
    return SelfMap(images)


def hub_biased_multimap(s: FiniteMetricSpace, rng: np.random.Generator) -> MultiMap:
    """Images are drawn from points at most half as far from a hub as ``x``.

    The hub maps to itself, and the largest allowed image shrinks as ``x``
    moves away from the hub.
    """
    n = len(s)
    hub = int(rng.integers(n))
    to_hub = [s.d(x, hub) for x in range(n)]
    far = max(to_hub) or 1.0
    images = []
    for x in range(n):
        if x == hub:
            images.append([hub])
            continue
        pool = sorted((u for u in range(n) if to_hub[u] <= to_hub[x] / 2), key=lambda u: (to_hub[u], u))
        cap = max(1, int(np.ceil((1 - to_hub[x] / (2 * far)) * len(pool))))
        size = int(rng.integers(1, cap + 1))
        images.append(rng.choice(pool, size=size, replace=False).tolist())
    return MultiMap(images)


@dataclass(frozen=True)
class Instance:
    seed: int
    space: FiniteMetricSpace
    map: SelfMap | MultiMap
    q: float


def _space_for(seed: int, n_range=(3, 10)) -> tuple[FiniteMetricSpace, np.random.Generator]:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    density = float(rng.uniform(0.2, 1.0))
    space = generate_space(n, density, int(rng.integers(2**31)))
    return space, rng


def random_instance(seed: int, hub_bias: float = 0.5, n_range=(3, 10)) -> Instance:
    """A seeded space with a random self-map, contractive or not."""
    space, rng = _space_for(seed, n_range)
    T = random_self_map(space, rng, hub_bias)
    return Instance(seed, space, T, minimal_q(space, T, GENERALIZED).minimal_q)


def contractive_instances(count: int, start_seed: int = 0, hub_bias: float = 0.8, n_range=(3, 10)):
    """Yield ``count`` instances whose GENERALIZED modulus is below 1."""
    seed = start_seed
    found = 0
    while found < count:
        inst = random_instance(seed, hub_bias, n_range)
        seed += 1
        if inst.q < 1:
            found += 1
            yield inst


def contractive_multimaps(count: int, start_seed: int = 0, n_range=(3, 10)):
    """Yield ``count`` hub-biased multimaps whose multi-valued modulus is below 1."""
    seed = start_seed
    found = 0
    while found < count:
        space, rng = _space_for(seed, n_range)
        F = hub_biased_multimap(space, rng)
        q = mv_minimal_q(space, F).minimal_q
        if q < 1:
            found += 1
            yield Instance(seed, space, F, q)
        seed += 1


def find_power_instance(max_seeds: int = 10_000, start_seed: int = 0, powers=(2, 3), hub_bias: float = 0.5):
    """First seed whose map is not contractive but some power ``T^k`` is.

    Returns ``(instance, k, q_k)`` or None when the window is exhausted.
    """
    for seed in range(start_seed, start_seed + max_seeds):
        inst = random_instance(seed, hub_bias)
        if inst.q < 1:
            continue
        for k in powers:
            qk = minimal_q(inst.space, inst.map, GENERALIZED, k).minimal_q
            if qk < 1:
                return inst, k, qk
    return None
