"""Desk-scale Monte Carlo simulation of the layered binning scheme.

Binary uniform source throughout.  Side information: erasures with
probability ``beta`` at the legitimate decoder, crossovers with probability
``eps`` at the eavesdropper; the communication channel is noiseless to the
decoder and a BSC(``zeta``) to the eavesdropper.

Source compression is random linear binning: the description of a block is
the syndrome of a uniformly random full-row-rank binary matrix, and the
decoder picks the most likely bin member given its side information.  The
eavesdropper's equivocation is computed exactly per trial by enumerating
the posterior (bin members for the binning simulator, all source blocks for
the layered scheme), never estimated from samples; blocklengths are capped
accordingly.

Per-trial seeds are spawned from the config seed, so parallel and serial
runs produce bit-identical reports.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .info import ValidationError, _entropy_bits, h2

__all__ = [
    "EnumerationLimitError",
    "SchemeFeasibilityError",
    "SchemeRates",
    "SimConfig",
    "SimReport",
    "uncoded_equivocation",
    "sim_uncoded",
    "sim_binning_lossless",
    "sim_separation_scheme",
]

# Exact posterior enumeration caps.
MAX_BLOCKLENGTH = 20
MAX_SEPARATION_BLOCKLENGTH = 16
MAX_FREE_BITS = 16

# Normal quantile for the reported halfwidth: 99% two-sided band on the
# difference against an independent rerun (hence the sqrt(2)).
_Z99 = 2.5758293035489004

WORKERS_ENV = "RDEQ_WORKERS"


class EnumerationLimitError(RuntimeError):
    """Exact posterior enumeration would exceed the desk-scale caps."""


class SchemeFeasibilityError(ValueError):
    """Scheme rates violate their invariants at this blocklength."""


@dataclass(frozen=True)
class SchemeRates:
    """Layered-scheme rates in bits per source symbol.

    r1/r2 are the two description layers, rc/rp the recombined common and
    private channel messages, rf the fictitious randomization message, and
    k the channel uses per source symbol.  Recombination conserves bits
    (r1 + r2 = rc + rp) and the common message carries at least the first
    layer (r1 <= rc).
    """

    r1: float
    r2: float
    rc: float
    rp: float
    rf: float
    k: float = 1.0

    def __post_init__(self) -> None:
        for name in ("r1", "r2", "rc", "rp", "rf"):
            if getattr(self, name) < 0:
                raise SchemeFeasibilityError(f"{name} must be nonnegative")
        if self.k <= 0:
            raise SchemeFeasibilityError("k must be positive")
        if abs((self.r1 + self.r2) - (self.rc + self.rp)) > 1e-9:
            raise SchemeFeasibilityError("bits recombination must conserve rate (r1+r2 = rc+rp)")
        if self.r1 > self.rc + 1e-9:
            raise SchemeFeasibilityError("the common message must cover the first layer (r1 <= rc)")


@dataclass(frozen=True)
class SimConfig:
    """Blocklength, trial budget, seed, and the model parameters."""

    n: int
    trials: int
    seed: int
    beta: float = 1.0
    eps: float = 0.1
    zeta: float = 0.1

    def __post_init__(self) -> None:
        if self.n < 1 or self.n > MAX_BLOCKLENGTH:
            raise ValidationError(f"n must be in 1..{MAX_BLOCKLENGTH} (exact enumeration cap)")
        if self.trials < 1:
            raise ValidationError("trials must be positive")
        if not 0.0 <= self.beta <= 1.0:
            raise ValidationError("beta must lie in [0, 1]")
        for name in ("eps", "zeta"):
            if not 0.0 <= getattr(self, name) <= 0.5:
                raise ValidationError(f"{name} must lie in [0, 1/2]")


@dataclass(frozen=True)
class SimReport:
    mean_distortion: float
    decode_error_rate: float
    equivocation_per_symbol: float
    confidence_halfwidth: float


# ---------------------------------------------------------------------------
# Closed-form baseline
# ---------------------------------------------------------------------------


def uncoded_equivocation(eps: float, zeta: float) -> float:
    """Exact per-symbol H(A | E, Z) when the source is sent uncoded.

    A uniform binary, E and Z independent BSC(eps)/BSC(zeta) observations
    of A; direct summation over the four observation pairs.
    """
    for name, val in (("eps", eps), ("zeta", zeta)):
        if not 0.0 <= val <= 0.5:
            raise ValidationError(f"{name} must lie in [0, 1/2]")
    total = 0.0
    for e_flip in (False, True):
        for z_flip in (False, True):
            w0 = 0.5 * (eps if e_flip else 1.0 - eps) * (zeta if z_flip else 1.0 - zeta)
            w1 = 0.5 * (1.0 - eps if e_flip else eps) * (1.0 - zeta if z_flip else zeta)
            pair = w0 + w1
            if pair > 0.0:
                total += pair * h2(w0 / pair)
    return total


# ---------------------------------------------------------------------------
# GF(2) helpers
# ---------------------------------------------------------------------------


def _gf2_reduce(basis: dict[int, np.ndarray], vec: np.ndarray) -> bool:
    """Insert vec into the echelon basis; False if it was dependent."""
    v = vec.copy()
    for piv in sorted(basis):
        if v[piv]:
            v ^= basis[piv]
    nz = np.flatnonzero(v)
    if nz.size == 0:
        return False
    basis[int(nz[0])] = v
    return True


def _random_full_row_rank(rng: np.random.Generator, rows: int, n: int) -> np.ndarray:
    """Uniformly random rows, rejected until the matrix has full row rank."""
    if rows > n:
        raise SchemeFeasibilityError(f"cannot draw {rows} independent rows of length {n}")
    out = np.zeros((rows, n), dtype=np.uint8)
    basis: dict[int, np.ndarray] = {}
    got = 0
    while got < rows:
        cand = rng.integers(0, 2, size=n, dtype=np.uint8)
        if _gf2_reduce(basis, cand):
            out[got] = cand
            got += 1
    return out


def _bit_patterns(m: int) -> np.ndarray:
    """All 2^m bit rows; bit j of pattern i is (i >> j) & 1."""
    count = 1 << m
    return ((np.arange(count, dtype=np.int64)[:, None] >> np.arange(m)[None, :]) & 1).astype(
        np.uint8
    )


def _coset_members(h: np.ndarray, syndrome: np.ndarray) -> np.ndarray:
    """All solutions of H x = s over GF(2); H must have full row rank."""
    r, n = h.shape
    a = h.astype(np.uint8).copy()
    b = syndrome.astype(np.uint8).copy()
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == r:
            break
        hit = row + int(np.argmax(a[row:, col]))
        if a[hit, col] == 0:
            continue
        if hit != row:
            a[[row, hit]] = a[[hit, row]]
            b[[row, hit]] = b[[hit, row]]
        for other in range(r):
            if other != row and a[other, col]:
                a[other] ^= a[row]
                b[other] ^= b[row]
        pivots.append(col)
        row += 1
    free = [c for c in range(n) if c not in pivots]
    particular = np.zeros(n, dtype=np.uint8)
    for i, col in enumerate(pivots):
        particular[col] = b[i]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for j, col in enumerate(free):
        basis[j, col] = 1
        for i, piv in enumerate(pivots):
            basis[j, piv] = a[i, col]
    combos = _bit_patterns(len(free))
    return (combos @ basis + particular) % 2


def _bsc_weights(dist: np.ndarray, flips: int | np.ndarray, p: float) -> np.ndarray:
    """Unnormalized likelihoods p^d (1-p)^(len-d); exact at p = 0 (0^0 = 1)."""
    return np.power(p, dist) * np.power(1.0 - p, flips - dist)


# ---------------------------------------------------------------------------
# Trial runner (serial or process pool; identical results either way)
# ---------------------------------------------------------------------------


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, workers)


def _run_chunk(trial_fn, args, seeds) -> list[tuple[float, float, float]]:
    return [trial_fn(args, s) for s in seeds]


def _run_trials(trial_fn, args, trials: int, seed: int, workers: int | None) -> np.ndarray:
    seeds = np.random.SeedSequence(seed).spawn(trials)
    workers = _resolve_workers(workers)
    if workers == 1 or trials < 2 * workers:
        rows = _run_chunk(trial_fn, args, seeds)
    else:
        chunks = np.array_split(np.arange(trials), workers)
        rows = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_chunk, trial_fn, args, [seeds[i] for i in chunk])
                for chunk in chunks
                if chunk.size
            ]
            for fut in futures:
                rows.extend(fut.result())
    return np.asarray(rows, dtype=np.float64)


def _report_from_rows(rows: np.ndarray) -> SimReport:
    eqv = rows[:, 2]
    if eqv.size > 1:
        hw = _Z99 * math.sqrt(2.0) * float(eqv.std(ddof=1)) / math.sqrt(eqv.size)
    else:
        hw = 0.0
    return SimReport(
        mean_distortion=float(rows[:, 0].mean()),
        decode_error_rate=float(rows[:, 1].mean()),
        equivocation_per_symbol=float(eqv.mean()),
        confidence_halfwidth=hw,
    )


def _draw_source(rng: np.random.Generator, config: SimConfig):
    a = rng.integers(0, 2, size=config.n, dtype=np.uint8)
    erased = rng.random(config.n) < config.beta
    b = np.where(erased, np.uint8(2), a)
    e = a ^ (rng.random(config.n) < config.eps).astype(np.uint8)
    return a, b, erased, e


def _decode_in_bin(members: np.ndarray, a: np.ndarray, erased: np.ndarray):
    """Most likely bin member given the erasure side information.

    With erasures every consistent member is equally likely, so the decoder
    picks the first consistent member in enumeration order.
    """
    consistent = np.all(members[:, ~erased] == a[~erased], axis=1)
    decoded = members[int(np.argmax(consistent))]
    dist = float(np.mean(decoded != a))
    err = float(np.any(decoded != a))
    return dist, err


# ---------------------------------------------------------------------------
# Simulators
# ---------------------------------------------------------------------------


def _uncoded_trial(args, seed_seq) -> tuple[float, float, float]:
    (config, eqv) = args
    rng = np.random.default_rng(seed_seq)
    a, _, _, _ = _draw_source(rng, config)
    rng.random(config.n)  # eavesdropper channel noise (unused: exact equivocation)
    decoded = a  # noiseless channel, reconstruction is the received block
    dist = float(np.mean(decoded != a))
    return dist, 0.0, eqv


def sim_uncoded(config: SimConfig, workers: int | None = None) -> SimReport:
    """The analogue baseline: plug the source straight into the channel.

    The decoder receives the source exactly (zero distortion, zero decode
    errors); the per-symbol equivocation is memoryless and computed by the
    closed form, so every trial reports the identical exact value.
    """
    eqv = uncoded_equivocation(config.eps, config.zeta)
    rows = _run_trials(_uncoded_trial, (config, eqv), config.trials, config.seed, workers)
    return _report_from_rows(rows)


def _binning_bits(n: int, rate: float) -> int:
    if rate < 0.0 or rate > 1.0:
        raise SchemeFeasibilityError("binning rate must lie in [0, 1]")
    return int(math.ceil(n * rate - 1e-9))


def _binning_trial(args, seed_seq) -> tuple[float, float, float]:
    (config, r_bits) = args
    rng = np.random.default_rng(seed_seq)
    a, _, erased, e = _draw_source(rng, config)
    h = _random_full_row_rank(rng, r_bits, config.n)
    syndrome = (h @ a) % 2
    members = _coset_members(h, syndrome)
    dist, err = _decode_in_bin(members, a, erased)
    d_e = (members ^ e).sum(axis=1)
    w = _bsc_weights(d_e, config.n, config.eps)
    posterior = w / w.sum()
    eqv = _entropy_bits(posterior) / config.n
    return dist, err, eqv


def sim_binning_lossless(
    config: SimConfig, rate: float, workers: int | None = None
) -> SimReport:
    """Lossless random binning at ``rate`` bits per symbol over a clean link.

    Per trial: bin the block by the syndrome of a fresh random full-row-rank
    matrix with ceil(n * rate) rows; the decoder picks the most likely bin
    member given its side information; the eavesdropper's equivocation is
    the exact entropy of her posterior over the bin given her observation
    and the bin index.
    """
    r_bits = _binning_bits(config.n, rate)
    if config.n - r_bits > MAX_FREE_BITS:
        raise EnumerationLimitError(
            f"bin enumeration needs 2^{config.n - r_bits} members; "
            f"reduce n - ceil(n*rate) to at most {MAX_FREE_BITS}"
        )
    rows = _run_trials(_binning_trial, (config, r_bits), config.trials, config.seed, workers)
    return _report_from_rows(rows)


class _SeparationDesign:
    """Integer bit counts for one blocklength of the layered scheme."""

    def __init__(self, config: SimConfig, rates: SchemeRates):
        n = config.n
        self.r1b = int(math.ceil(n * rates.r1 - 1e-9))
        self.r2b = int(math.ceil(n * rates.r2 - 1e-9))
        self.rcb = int(math.ceil(n * rates.rc - 1e-9))
        self.rpb = self.r1b + self.r2b - self.rcb
        self.rfb = int(math.ceil(n * rates.rf - 1e-9))
        self.m = int(math.ceil(n * rates.k - 1e-9))
        self.mc = self.rcb
        self.mp = self.m - self.mc
        if self.rcb < self.r1b or self.rpb < 0:
            raise SchemeFeasibilityError(
                "bits recombination is inconsistent at this blocklength"
            )
        if self.r1b + self.r2b > n:
            raise SchemeFeasibilityError("description rate exceeds one bit per symbol")
        if self.rpb + self.rfb > self.mp:
            raise SchemeFeasibilityError(
                f"private block needs {self.rpb + self.rfb} bits but only "
                f"{self.mp} channel uses remain after the common message"
            )


def _separation_trial(args, seed_seq) -> tuple[float, float, float]:
    (config, des) = args
    rng = np.random.default_rng(seed_seq)
    a, _, erased, e = _draw_source(rng, config)
    h = _random_full_row_rank(rng, des.r1b + des.r2b, config.n)
    mix = _random_full_row_rank(rng, des.mp, des.mp)  # invertible private mixer
    rf_full = rng.integers(0, 2, size=max(des.mp - des.rpb, 0), dtype=np.uint8)
    z_flips = (rng.random(des.m) < config.zeta).astype(np.uint8)

    syndrome = (h @ a) % 2
    rc_vec = syndrome[: des.rcb]
    rp_vec = syndrome[des.rcb :]
    g1 = mix[:, : des.rpb]
    g2 = mix[:, des.rpb : des.rpb + des.rfb]
    wp = (g1 @ rp_vec + g2 @ rf_full[: des.rfb]) % 2
    x = np.concatenate([rc_vec, wp]).astype(np.uint8)
    z = x ^ z_flips

    # decoder: noiseless channel reveals the full syndrome, then in-bin pick
    members = _coset_members(h, syndrome)
    dist, err = _decode_in_bin(members, a, erased)

    # eavesdropper: exact posterior over all source blocks
    blocks = _bit_patterns(config.n)
    synd_all = (blocks @ h.T) % 2
    rc_all = synd_all[:, : des.rcb]
    rp_all = synd_all[:, des.rcb :]
    d_common = (rc_all ^ z[: des.mc]).sum(axis=1)
    wp_all = (rp_all @ g1.T) % 2
    u = wp_all ^ z[des.mc :]
    f = (_bit_patterns(des.rfb) @ g2.T) % 2
    cross = u.astype(np.float64) @ f.T.astype(np.float64)
    d_priv = u.sum(axis=1, dtype=np.int64)[:, None] + f.sum(axis=1, dtype=np.int64)[None, :]
    d_priv = d_priv - 2.0 * cross
    p_priv = _bsc_weights(d_priv, des.mp, config.zeta).sum(axis=1)
    d_e = (blocks ^ e).sum(axis=1)
    w = (
        _bsc_weights(d_e, config.n, config.eps)
        * _bsc_weights(d_common, des.mc, config.zeta)
        * p_priv
    )
    posterior = w / w.sum()
    eqv = _entropy_bits(posterior) / config.n
    return dist, err, eqv


def sim_separation_scheme(
    config: SimConfig, rates: SchemeRates, workers: int | None = None
) -> SimReport:
    """End-to-end layered scheme over the noiseless/BSC broadcast channel.

    Pipeline per trial: syndrome binning of the block at rate r1 + r2, bit
    recombination into a common message (sent in the clear) and a private
    message, and a private block that mixes the private message with a
    fresh fictitious message through a random invertible map, so the
    decoder recovers everything over the noiseless channel while the
    fictitious bits dilute what the eavesdropper's noisy view reveals.
    Equivocation is the exact entropy of her posterior over all 2^n source
    blocks given her side information and channel output.
    """
    if config.n > MAX_SEPARATION_BLOCKLENGTH:
        raise EnumerationLimitError(
            f"separation simulation enumerates 2^n blocks; n must be at most "
            f"{MAX_SEPARATION_BLOCKLENGTH}"
        )
    des = _SeparationDesign(config, rates)
    if des.rfb > MAX_FREE_BITS:
        raise EnumerationLimitError(
            f"fictitious message enumeration needs 2^{des.rfb} patterns; "
            f"keep ceil(n*rf) at most {MAX_FREE_BITS}"
        )
    rows = _run_trials(_separation_trial, (config, des), config.trials, config.seed, workers)
    return _report_from_rows(rows)
