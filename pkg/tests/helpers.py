"""Shared test utilities: independent brute-force oracles and instance generators.

The oracles here deliberately avoid the library's entropy-combination
identities: everything is a direct log-sum over table cells, so agreement
with the library is a two-route check.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict

import numpy as np

from rdeq.info import CondPmf, DistortionMatrix, JointTable, Pmf
from rdeq.regions import (
    AuxChannelSystem,
    AuxSourceSystem,
    BroadcastChannel,
    OptimizerConfig,
    SourceModel,
    best_reconstruction,
)


def oracle_entropy(values) -> float:
    """Direct -sum p log2 p over any iterable of masses."""
    return -sum(p * math.log2(p) for p in np.asarray(values).ravel() if p > 0)


def _key(idx, axes):
    return tuple(idx[a] for a in axes)


def _cells(shape):
    return itertools.product(*(range(s) for s in shape))


def oracle_conditional_entropy(probs: np.ndarray, target, given) -> float:
    """H(target|given) = sum p log2(p(given)/p(target,given)), cell by cell."""
    target, given = tuple(target), tuple(given)
    ptg: dict = defaultdict(float)
    pg: dict = defaultdict(float)
    for idx in _cells(probs.shape):
        p = float(probs[idx])
        ptg[_key(idx, target + given)] += p
        pg[_key(idx, given)] += p
    total = 0.0
    for idx in _cells(probs.shape):
        p = float(probs[idx])
        if p > 0:
            total += p * math.log2(pg[_key(idx, given)] / ptg[_key(idx, target + given)])
    return total


def oracle_cmi(probs: np.ndarray, ax, ay, az) -> float:
    """I(X;Y|Z) as the direct sum of p log2( p(xyz) p(z) / (p(xz) p(yz)) )."""
    ax, ay, az = tuple(ax), tuple(ay), tuple(az)
    pxz: dict = defaultdict(float)
    pyz: dict = defaultdict(float)
    pz: dict = defaultdict(float)
    pxyz: dict = defaultdict(float)
    for idx in _cells(probs.shape):
        p = float(probs[idx])
        pxz[_key(idx, ax + az)] += p
        pyz[_key(idx, ay + az)] += p
        pz[_key(idx, az)] += p
        pxyz[_key(idx, ax + ay + az)] += p
    total = 0.0
    for idx in _cells(probs.shape):
        p = float(probs[idx])
        if p > 0:
            num = pxyz[_key(idx, ax + ay + az)] * pz[_key(idx, az)]
            den = pxz[_key(idx, ax + az)] * pyz[_key(idx, ay + az)]
            total += p * math.log2(num / den)
    return total


def oracle_mi(probs: np.ndarray, ax, ay) -> float:
    return oracle_cmi(probs, ax, ay, ())


def random_joint(rng: np.random.Generator, max_cells: int = 64) -> JointTable:
    """Random dense joint with 2 to 4 axes and at most max_cells cells."""
    while True:
        ndim = int(rng.integers(2, 5))
        dims = [int(rng.integers(2, 5)) for _ in range(ndim)]
        if int(np.prod(dims)) <= max_cells:
            break
    probs = rng.dirichlet(np.ones(int(np.prod(dims)))).reshape(dims)
    return JointTable(probs)


def channel_mi_uniform(cond: CondPmf) -> float:
    """I(input; output) for a uniform input, by direct summation."""
    n = cond.input_size
    joint = cond.rows / n
    return oracle_mi(joint, (0,), (1,))


# ---------------------------------------------------------------------------
# Random region instances (alphabets <= 3, auxiliary cardinalities <= 4)
# ---------------------------------------------------------------------------


def random_region_instance(seed: int, tight_distortion: bool = True):
    """A random source/channel pair with a reachable operating point.

    Returns (source, channel, k, d_target, config).  The distortion target
    sits between the best achievable (full description) and the silent
    corner, so instances are mostly feasible but rate-bound ones remain.
    """
    rng = np.random.default_rng((20250809, seed))
    na, nb, ne = (int(v) for v in rng.integers(2, 4, size=3))
    nx, ny, nz = (int(v) for v in rng.integers(2, 4, size=3))
    p_abe = rng.dirichlet(np.ones(na * nb * ne)).reshape(na, nb, ne)
    source = SourceModel(JointTable(p_abe, ("a", "b", "e")), DistortionMatrix.hamming(na))
    pyz = rng.dirichlet(np.full(ny * nz, 0.4), size=nx)
    channel = BroadcastChannel(CondPmf(pyz), ny=ny, nz=nz)
    k = float(rng.uniform(0.5, 2.5))
    _, d_min = best_reconstruction(source, CondPmf.identity(na))
    _, d_const = best_reconstruction(source, CondPmf.constant(na, 1))
    low = 0.55 if tight_distortion else 0.85
    frac = rng.uniform(low, 1.0)
    d_target = float(d_min + frac * (d_const - d_min))
    config = OptimizerConfig(
        card_u=2,
        card_v=na,
        card_q=2,
        card_t=nx,
        restarts=2,
        grid_resolution=3,
        max_iterations=8,
        seed=seed,
        tolerance=1e-2,
        pair_polish=False,
    )
    return source, channel, k, d_target, config


def bec_bsc_inner_system(u: float, q: float):
    """The pinned decomposition behind the closed-form binary bound.

    Full description (V = A), symmetric binary U from A and Q from T = X,
    uniform channel input, reconstruction ignoring the side information.
    """
    from rdeq.models import bsc

    rec = np.array([[0, 0, 0], [1, 1, 1]])
    aux_s = AuxSourceSystem.chain(CondPmf(np.eye(2)), bsc(u), rec)
    aux_c = AuxChannelSystem(Pmf.uniform(2), CondPmf.identity(2), bsc(q))
    return aux_s, aux_c
