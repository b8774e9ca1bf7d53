"""Inner/outer bounds on the rate-distortion-equivocation region.

An operating point is a triple (k, D, Delta): channel uses per source
symbol, distortion at the legitimate decoder, and equivocation (residual
uncertainty, bits per source symbol) at the eavesdropper.

The achievable (inner) bound is a union over auxiliary decompositions: a
two-layer source description U, V with a chain U - V - A - (B, E), and a
two-layer channel code Q, T with a chain Q - T - X - (Y, Z).  For a fixed
decomposition the evaluators below compute the rate feasibility checks,
the induced distortion, and the equivocation bound

    inner:  H(A|UE) - [ I(V;A|UB) - k (I(T;Y|Q) - I(T;Z|Q)) ]+
    outer:  H(A|UE) - [ I(V;A|B) - I(U;A|B) - k (I(T;Y|Q) - I(T;Z|Q)) ]+

where the outer form quantifies over the looser class (U,V) - A - (B, E).
The optimizers maximize these bounds by multi-start projected coordinate
ascent over simplex-parameterized conditionals; restarts are seeded
deterministically, so every result is reproducible from the config.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.special import xlogy

from .info import (
    CondPmf,
    DistortionMatrix,
    JointTable,
    Pmf,
    ValidationError,
    _entropy_bits,
    h2,
    star,
)

__all__ = [
    "SourceModel",
    "BroadcastChannel",
    "AuxMode",
    "AuxSourceSystem",
    "AuxChannelSystem",
    "RegionPoint",
    "OptimizerConfig",
    "InnerEvaluation",
    "OuterEvaluation",
    "OptimizeResult",
    "FrontierPoint",
    "InfeasibleError",
    "best_reconstruction",
    "evaluate_inner",
    "evaluate_outer",
    "optimize_inner",
    "optimize_outer",
    "optimize_no_common_layer",
    "optimize_plain_channel",
    "bec_bsc_delta",
    "bec_bsc_max_delta",
    "frontier_sweep",
]

# Rate and distortion inequalities are non-strict with this slack.
RATE_TOL = 1e-9

_LN2 = math.log(2.0)
_PENALTY = 1000.0


class InfeasibleError(RuntimeError):
    """No auxiliary decomposition satisfies the constraints at this point."""


# ---------------------------------------------------------------------------
# Model and auxiliary-system types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SourceModel:
    """Joint source p(a, b, e) plus the per-letter distortion on A."""

    p_abe: JointTable
    distortion: DistortionMatrix

    def __post_init__(self) -> None:
        if self.p_abe.ndim != 3:
            raise ValidationError("p_abe must have exactly three axes (a, b, e)")
        if self.p_abe.names != ("a", "b", "e"):
            object.__setattr__(self, "p_abe", JointTable(self.p_abe.probs, ("a", "b", "e")))
        na = self.p_abe.dims[0]
        if self.distortion.values.shape != (na, na):
            raise ValidationError(
                f"distortion must be {na}x{na} (reconstruction alphabet equals A)"
            )

    @property
    def na(self) -> int:
        return self.p_abe.dims[0]

    @property
    def nb(self) -> int:
        return self.p_abe.dims[1]

    @property
    def ne(self) -> int:
        return self.p_abe.dims[2]


@dataclass(frozen=True)
class BroadcastChannel:
    """Memoryless broadcast channel p(y, z | x); rows ravel (y, z) y-major."""

    p_yz_given_x: CondPmf
    ny: int
    nz: int

    def __post_init__(self) -> None:
        if self.ny < 1 or self.nz < 1:
            raise ValidationError("output alphabets must be non-empty")
        if self.ny * self.nz != self.p_yz_given_x.output_size:
            raise ValidationError(
                f"ny*nz = {self.ny * self.nz} does not match output size "
                f"{self.p_yz_given_x.output_size}"
            )

    @property
    def nx(self) -> int:
        return self.p_yz_given_x.input_size


class AuxMode(enum.Enum):
    CHAIN = "chain"  # U - V - A - (B, E)
    JOINT = "joint"  # (U, V) - A - (B, E)


@dataclass(frozen=True)
class AuxSourceSystem:
    """Source-side auxiliary decomposition plus the reconstruction map.

    ``reconstruction[v, b]`` is the decoder's output symbol in A.  In chain
    mode the decomposition is p(v|a) and p(u|v); in joint mode a single
    p(u,v|a) whose output index ravels (u, v) u-major.
    """

    mode: AuxMode
    nu: int
    nv: int
    reconstruction: np.ndarray
    p_v_given_a: Optional[CondPmf] = None
    p_u_given_v: Optional[CondPmf] = None
    p_uv_given_a: Optional[CondPmf] = None

    def __post_init__(self) -> None:
        rec = np.asarray(self.reconstruction, dtype=np.int64)
        if rec.ndim != 2 or rec.shape[0] != self.nv:
            raise ValidationError("reconstruction must be an (nv, nb) integer map")
        if rec.min(initial=0) < 0:
            raise ValidationError("reconstruction symbols must be >= 0")
        rec.setflags(write=False)
        object.__setattr__(self, "reconstruction", rec)
        if self.mode is AuxMode.CHAIN:
            if self.p_v_given_a is None or self.p_u_given_v is None:
                raise ValidationError("chain mode needs p_v_given_a and p_u_given_v")
            if self.p_v_given_a.output_size != self.nv:
                raise ValidationError("p_v_given_a output size must be nv")
            if self.p_u_given_v.input_size != self.nv or self.p_u_given_v.output_size != self.nu:
                raise ValidationError("p_u_given_v must map V to U")
        else:
            if self.p_uv_given_a is None:
                raise ValidationError("joint mode needs p_uv_given_a")
            if self.p_uv_given_a.output_size != self.nu * self.nv:
                raise ValidationError("p_uv_given_a output size must be nu*nv")

    @classmethod
    def chain(
        cls, p_v_given_a: CondPmf, p_u_given_v: CondPmf, reconstruction: np.ndarray
    ) -> "AuxSourceSystem":
        return cls(
            mode=AuxMode.CHAIN,
            nu=p_u_given_v.output_size,
            nv=p_v_given_a.output_size,
            reconstruction=reconstruction,
            p_v_given_a=p_v_given_a,
            p_u_given_v=p_u_given_v,
        )

    @classmethod
    def joint(
        cls, p_uv_given_a: CondPmf, nu: int, nv: int, reconstruction: np.ndarray
    ) -> "AuxSourceSystem":
        return cls(
            mode=AuxMode.JOINT,
            nu=nu,
            nv=nv,
            reconstruction=reconstruction,
            p_uv_given_a=p_uv_given_a,
        )

    def v_marginal(self) -> CondPmf:
        """p(v|a) in either mode."""
        if self.mode is AuxMode.CHAIN:
            return self.p_v_given_a
        puv = self.p_uv_given_a.rows.reshape(-1, self.nu, self.nv)
        return CondPmf(puv.sum(axis=1))

    def to_joint(self) -> "AuxSourceSystem":
        """Chain decomposition rewritten as the equivalent joint p(u,v|a)."""
        if self.mode is AuxMode.JOINT:
            return self
        puv = np.einsum("av,vu->auv", self.p_v_given_a.rows, self.p_u_given_v.rows)
        return AuxSourceSystem.joint(
            CondPmf(puv.reshape(puv.shape[0], -1)), self.nu, self.nv, self.reconstruction
        )


@dataclass(frozen=True)
class AuxChannelSystem:
    """Channel-side decomposition: input law p(x), then T from X, then Q from T."""

    p_x: Pmf
    p_t_given_x: CondPmf
    p_q_given_t: CondPmf

    def __post_init__(self) -> None:
        if self.p_t_given_x.input_size != self.p_x.size:
            raise ValidationError("p_t_given_x input size must match |X|")
        if self.p_q_given_t.input_size != self.p_t_given_x.output_size:
            raise ValidationError("p_q_given_t input size must match |T|")

    @property
    def nt(self) -> int:
        return self.p_t_given_x.output_size

    @property
    def nq(self) -> int:
        return self.p_q_given_t.output_size


@dataclass(frozen=True)
class RegionPoint:
    """An operating point: channel uses per source symbol, distortion, equivocation."""

    k: float
    distortion: float
    equivocation: float

    def __post_init__(self) -> None:
        if self.k < 0 or self.distortion < 0:
            raise ValidationError("k and distortion must be nonnegative")


@dataclass(frozen=True)
class OptimizerConfig:
    """Search budget and auxiliary cardinalities.

    ``None`` cardinalities default to alphabet size + 2.  ``qt_identity``
    pins T = X and Q = X (plain single-layer channel use); ``tolerance`` is
    the step floor of the halving schedule.
    """

    card_u: Optional[int] = None
    card_v: Optional[int] = None
    card_q: Optional[int] = None
    card_t: Optional[int] = None
    restarts: int = 32
    grid_resolution: int = 6
    max_iterations: int = 60
    seed: int = 0
    tolerance: float = 1e-4
    qt_identity: bool = False
    pair_polish: bool = True

    def __post_init__(self) -> None:
        for name in ("card_u", "card_v", "card_q", "card_t"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValidationError(f"{name} must be positive")
        if self.restarts < 1 or self.grid_resolution < 2 or self.max_iterations < 1:
            raise ValidationError("restarts, grid_resolution, max_iterations must be positive")
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be positive")


class InnerEvaluation(NamedTuple):
    rate1_ok: bool
    rate2_ok: bool
    distortion: float
    delta: float
    rate1_slack: float  # k I(Q;Y) - I(U;A|B)
    rate2_slack: float  # k I(T;Y) - I(V;A|B)


class OuterEvaluation(NamedTuple):
    rate_ok: bool
    distortion: float
    delta: float
    rate_slack: float  # k I(T;Y) - I(V;A|B)


@dataclass(frozen=True)
class OptimizeResult:
    delta: float
    aux_source: AuxSourceSystem
    aux_channel: AuxChannelSystem
    evaluation: Union[InnerEvaluation, OuterEvaluation]


# ---------------------------------------------------------------------------
# Reconstruction and evaluators
# ---------------------------------------------------------------------------


def _reconstruction_costs(source: SourceModel, pv_rows: np.ndarray) -> np.ndarray:
    """cost[v, b, a_hat] = sum_a p(a, v, b) d(a, a_hat)."""
    p_ab = source.p_abe.probs.sum(axis=2)
    return np.einsum("ab,av,ah->vbh", p_ab, pv_rows, source.distortion.values)


def best_reconstruction(
    source: SourceModel, p_v_given_a: CondPmf
) -> tuple[np.ndarray, float]:
    """Optimal deterministic decoder map V x B -> A and its mean distortion.

    Per cell the argmin of the posterior-weighted distortion; ties break to
    the lowest symbol, and zero-probability (v, b) cells get symbol 0.
    """
    if p_v_given_a.input_size != source.na:
        raise ValidationError("p_v_given_a input size must be |A|")
    costs = _reconstruction_costs(source, p_v_given_a.rows)
    rec = np.argmin(costs, axis=2)
    dist = float(np.take_along_axis(costs, rec[:, :, None], axis=2).sum())
    return rec, dist


def _expected_distortion(source: SourceModel, pv_rows: np.ndarray, rec: np.ndarray) -> float:
    costs = _reconstruction_costs(source, pv_rows)
    if rec.shape != costs.shape[:2]:
        raise ValidationError(
            f"reconstruction map has shape {rec.shape}, expected {costs.shape[:2]}"
        )
    if rec.max(initial=0) >= source.na:
        raise ValidationError("reconstruction symbol outside the source alphabet")
    return float(np.take_along_axis(costs, rec[:, :, None], axis=2).sum())


class _SourceTerms(NamedTuple):
    i_uab: float
    i_vab: float
    i_vaub: float
    h_aue: float


class _ChannelTerms(NamedTuple):
    i_qy: float
    i_ty: float
    i_tyq: float
    i_tzq: float


def _source_terms_from_product(joint_uvabe: np.ndarray) -> _SourceTerms:
    """Information terms off the (u, v, a, b, e) product table.

    Same H-combination identities as the info-module operations, computed
    directly on shared marginals (this is the optimizer's hot path).
    """
    m_uvab = joint_uvabe.sum(axis=4)
    m_uvb = m_uvab.sum(axis=2)
    m_uab = m_uvab.sum(axis=1)
    m_vab = m_uvab.sum(axis=0)
    m_ub = m_uab.sum(axis=1)
    m_vb = m_vab.sum(axis=1)
    m_ab = m_vab.sum(axis=0)
    m_b = m_ab.sum(axis=0)
    m_uae = joint_uvabe.sum(axis=(1, 3))
    m_ue = m_uae.sum(axis=1)
    h_uvab, h_uvb, h_uab, h_vab = map(_entropy_bits, (m_uvab, m_uvb, m_uab, m_vab))
    h_ub, h_vb, h_ab, h_b = map(_entropy_bits, (m_ub, m_vb, m_ab, m_b))
    h_uae, h_ue = _entropy_bits(m_uae), _entropy_bits(m_ue)
    return _SourceTerms(
        i_uab=max(0.0, h_ub + h_ab - h_b - h_uab),
        i_vab=max(0.0, h_vb + h_ab - h_b - h_vab),
        i_vaub=max(0.0, h_uvb + h_uab - h_ub - h_uvab),
        h_aue=max(0.0, h_uae - h_ue),
    )


def _chain_source_terms(source: SourceModel, pv_rows, pu_rows) -> _SourceTerms:
    joint = np.einsum("abe,av,vu->uvabe", source.p_abe.probs, pv_rows, pu_rows)
    return _source_terms_from_product(joint)


def _joint_source_terms(source: SourceModel, puv_rows, nu: int, nv: int) -> _SourceTerms:
    puv3 = np.asarray(puv_rows).reshape(-1, nu, nv)
    joint = np.einsum("abe,auv->uvabe", source.p_abe.probs, puv3)
    return _source_terms_from_product(joint)


def _channel_terms(channel: BroadcastChannel, px, pt_rows, pq_rows) -> _ChannelTerms:
    pyz3 = channel.p_yz_given_x.rows.reshape(channel.nx, channel.ny, channel.nz)
    joint = np.einsum("x,xt,tq,xyz->qtxyz", px, pt_rows, pq_rows, pyz3)
    m_qty = joint.sum(axis=(2, 4))
    m_qtz = joint.sum(axis=(2, 3))
    m_qt = m_qty.sum(axis=2)
    m_qy = m_qty.sum(axis=1)
    m_ty = m_qty.sum(axis=0)
    m_qz = m_qtz.sum(axis=1)
    m_q = m_qt.sum(axis=1)
    m_t = m_qt.sum(axis=0)
    m_y = m_qy.sum(axis=0)
    h_qty, h_qtz, h_qt, h_qy = map(_entropy_bits, (m_qty, m_qtz, m_qt, m_qy))
    h_ty, h_qz, h_q, h_t, h_y = map(_entropy_bits, (m_ty, m_qz, m_q, m_t, m_y))
    return _ChannelTerms(
        i_qy=max(0.0, h_q + h_y - h_qy),
        i_ty=max(0.0, h_t + h_y - h_ty),
        i_tyq=max(0.0, h_qt + h_qy - h_q - h_qty),
        i_tzq=max(0.0, h_qt + h_qz - h_q - h_qtz),
    )


def _check_point(source: SourceModel, k: float, d_target: float | None) -> None:
    if k < 0:
        raise ValidationError("k must be nonnegative")
    if d_target is not None:
        if d_target < 0:
            raise ValidationError("distortion target must be nonnegative")
        if d_target > source.distortion.d_max + RATE_TOL:
            raise ValidationError("distortion target exceeds d_max")


def evaluate_inner(
    source: SourceModel,
    channel: BroadcastChannel,
    aux_source: AuxSourceSystem,
    aux_channel: AuxChannelSystem,
    k: float,
) -> InnerEvaluation:
    """Rate checks, distortion, and achievable equivocation for one chain system."""
    _check_point(source, k, None)
    if aux_source.mode is not AuxMode.CHAIN:
        raise ValidationError("evaluate_inner needs a chain-mode source system")
    if aux_source.p_v_given_a.input_size != source.na:
        raise ValidationError("source system input alphabet mismatch")
    if aux_channel.p_x.size != channel.nx:
        raise ValidationError("channel system input alphabet mismatch")
    st = _chain_source_terms(source, aux_source.p_v_given_a.rows, aux_source.p_u_given_v.rows)
    ct = _channel_terms(
        channel, aux_channel.p_x.probs, aux_channel.p_t_given_x.rows, aux_channel.p_q_given_t.rows
    )
    dist = _expected_distortion(source, aux_source.p_v_given_a.rows, aux_source.reconstruction)
    delta = st.h_aue - max(0.0, st.i_vaub - k * (ct.i_tyq - ct.i_tzq))
    s1 = k * ct.i_qy - st.i_uab
    s2 = k * ct.i_ty - st.i_vab
    return InnerEvaluation(
        rate1_ok=s1 >= -RATE_TOL,
        rate2_ok=s2 >= -RATE_TOL,
        distortion=dist,
        delta=delta,
        rate1_slack=s1,
        rate2_slack=s2,
    )


def evaluate_outer(
    source: SourceModel,
    channel: BroadcastChannel,
    aux_source: AuxSourceSystem,
    aux_channel: AuxChannelSystem,
    k: float,
) -> OuterEvaluation:
    """Converse-side bound for one joint-mode system (chain systems are upcast)."""
    _check_point(source, k, None)
    sys_j = aux_source.to_joint()
    if sys_j.p_uv_given_a.input_size != source.na:
        raise ValidationError("source system input alphabet mismatch")
    if aux_channel.p_x.size != channel.nx:
        raise ValidationError("channel system input alphabet mismatch")
    st = _joint_source_terms(source, sys_j.p_uv_given_a.rows, sys_j.nu, sys_j.nv)
    ct = _channel_terms(
        channel, aux_channel.p_x.probs, aux_channel.p_t_given_x.rows, aux_channel.p_q_given_t.rows
    )
    dist = _expected_distortion(source, sys_j.v_marginal().rows, sys_j.reconstruction)
    delta = st.h_aue - max(0.0, st.i_vab - st.i_uab - k * (ct.i_tyq - ct.i_tzq))
    s2 = k * ct.i_ty - st.i_vab
    return OuterEvaluation(
        rate_ok=s2 >= -RATE_TOL,
        distortion=dist,
        delta=delta,
        rate_slack=s2,
    )


# ---------------------------------------------------------------------------
# Search machinery
# ---------------------------------------------------------------------------


class _Dims(NamedTuple):
    na: int
    nb: int
    ne: int
    nx: int
    nu: int
    nv: int
    nt: int
    nq: int
    qt_identity: bool


def _resolve_dims(source: SourceModel, channel: BroadcastChannel, config: OptimizerConfig) -> _Dims:
    na, nb, ne = source.p_abe.dims
    nx = channel.nx
    if config.qt_identity:
        nt = nq = nx
    else:
        nt = config.card_t if config.card_t is not None else nx + 2
        nq = config.card_q if config.card_q is not None else nx + 2
    return _Dims(
        na=na,
        nb=nb,
        ne=ne,
        nx=nx,
        nu=config.card_u if config.card_u is not None else na + 2,
        nv=config.card_v if config.card_v is not None else na + 2,
        nt=nt,
        nq=nq,
        qt_identity=config.qt_identity,
    )


class _Score(NamedTuple):
    score: float
    feasible: bool
    delta: float
    dist: float
    viol_rate1: float
    viol_rate2: float
    viol_dist: float
    rec: np.ndarray


class _Search:
    """Coordinate-ascent state shared by the inner and outer optimizers."""

    def __init__(self, source, channel, k, d_target, dims: _Dims, mode: str):
        self.source = source
        self.channel = channel
        self.k = k
        self.d_target = d_target
        self.dims = dims
        self.mode = mode  # "inner" | "outer"
        blocks: list[tuple[str, int]] = []
        if mode == "inner":
            if dims.nv > 1:
                blocks += [("pv", i) for i in range(dims.na)]
            if dims.nu > 1:
                blocks += [("pu", i) for i in range(dims.nv)]
        else:
            if dims.nu * dims.nv > 1:
                blocks += [("puv", i) for i in range(dims.na)]
        if dims.nx > 1:
            blocks.append(("px", 0))
        if not dims.qt_identity:
            if dims.nt > 1:
                blocks += [("pt", i) for i in range(dims.nx)]
            if dims.nq > 1:
                blocks += [("pq", i) for i in range(dims.nt)]
        self.blocks = blocks
        self._source_keys = {"pv", "pu", "puv"}

    def source_terms(self, params) -> tuple[_SourceTerms, np.ndarray, float]:
        if self.mode == "inner":
            st = _chain_source_terms(self.source, params["pv"], params["pu"])
            rec, dist = best_reconstruction(self.source, CondPmf(params["pv"]))
        else:
            st = _joint_source_terms(self.source, params["puv"], self.dims.nu, self.dims.nv)
            pv = params["puv"].reshape(self.dims.na, self.dims.nu, self.dims.nv).sum(axis=1)
            rec, dist = best_reconstruction(self.source, CondPmf(pv))
        return st, rec, dist

    def channel_terms(self, params) -> _ChannelTerms:
        return _channel_terms(self.channel, params["px"][0], params["pt"], params["pq"])

    def combine(self, st: _SourceTerms, rec, dist, ct: _ChannelTerms) -> _Score:
        k = self.k
        if self.mode == "inner":
            delta = st.h_aue - max(0.0, st.i_vaub - k * (ct.i_tyq - ct.i_tzq))
            v1 = max(0.0, st.i_uab - k * ct.i_qy - RATE_TOL)
        else:
            delta = st.h_aue - max(0.0, st.i_vab - st.i_uab - k * (ct.i_tyq - ct.i_tzq))
            v1 = 0.0
        v2 = max(0.0, st.i_vab - k * ct.i_ty - RATE_TOL)
        vd = max(0.0, dist - self.d_target - RATE_TOL)
        feasible = v1 == 0.0 and v2 == 0.0 and vd == 0.0
        score = delta - _PENALTY * (v1 + v2 + vd)
        return _Score(score, feasible, delta, dist, v1, v2, vd, rec)

    def evaluate(self, params):
        st, rec, dist = self.source_terms(params)
        ct = self.channel_terms(params)
        return self.combine(st, rec, dist, ct), (st, rec, dist), ct


def _copy_params(params) -> dict[str, np.ndarray]:
    return {k: v.copy() for k, v in params.items()}


class _BestTracker:
    """Best feasible candidate seen anywhere, plus the least-violating one."""

    def __init__(self) -> None:
        self.best: tuple[float, dict, _Score] | None = None
        self.least_viol: tuple[float, _Score] | None = None

    def offer(self, ev: _Score, params) -> None:
        if ev.feasible:
            if self.best is None or ev.delta > self.best[0]:
                self.best = (ev.delta, _copy_params(params), ev)
        else:
            total = ev.viol_rate1 + ev.viol_rate2 + ev.viol_dist
            if self.least_viol is None or total < self.least_viol[0]:
                self.least_viol = (total, ev)


def _ascend(search: _Search, params, config: OptimizerConfig, tracker: _BestTracker) -> None:
    ev, st_pack, ct = search.evaluate(params)
    tracker.offer(ev, params)
    step = 0.5
    for _ in range(config.max_iterations):
        improved = False
        for key, row in search.blocks:
            mat = params[key]
            base = mat[row].copy()
            best_move = None
            for j in range(base.size):
                cand = base * (1.0 - step)
                cand[j] += step
                cand /= cand.sum()
                mat[row] = cand
                if key in search._source_keys:
                    st_pack2 = search.source_terms(params)
                    ct2 = ct
                else:
                    st_pack2 = st_pack
                    ct2 = search.channel_terms(params)
                ev2 = search.combine(st_pack2[0], st_pack2[1], st_pack2[2], ct2)
                tracker.offer(ev2, params)
                ref = best_move[0] if best_move is not None else ev.score
                if ev2.score > ref + 1e-12:
                    best_move = (ev2.score, cand.copy(), st_pack2, ct2, ev2)
            if best_move is not None:
                mat[row] = best_move[1]
                st_pack, ct, ev = best_move[2], best_move[3], best_move[4]
                improved = True
            else:
                mat[row] = base
        if not improved:
            step *= 0.5
            if step < config.tolerance:
                break


_POLISH_STEPS = (0.06, 0.025, 0.01, 0.004)


def _pair_polish(search: _Search, params, tracker: _BestTracker) -> None:
    """Joint source-row/channel-row moves along an active rate constraint.

    Single-row ascent stalls where improving the source description requires
    simultaneously buying channel rate (an active coupling constraint); this
    phase walks that ridge with paired moves at a shrinking step.
    """
    src_blocks = [b for b in search.blocks if b[0] in search._source_keys]
    chan_blocks = [b for b in search.blocks if b[0] not in search._source_keys]
    if not src_blocks or not chan_blocks:
        return
    ev, st_pack, ct = search.evaluate(params)
    tracker.offer(ev, params)
    for step in _POLISH_STEPS:
        for _ in range(60):  # walk length guard per step level
            best_combo = None
            for k1, r1 in src_blocks:
                base1 = params[k1][r1].copy()
                for j1 in range(base1.size):
                    cand1 = base1 * (1.0 - step)
                    cand1[j1] += step
                    cand1 /= cand1.sum()
                    params[k1][r1] = cand1
                    st2 = search.source_terms(params)
                    for k2, r2 in chan_blocks:
                        base2 = params[k2][r2].copy()
                        for j2 in range(base2.size):
                            cand2 = base2 * (1.0 - step)
                            cand2[j2] += step
                            cand2 /= cand2.sum()
                            params[k2][r2] = cand2
                            ct2 = search.channel_terms(params)
                            ev2 = search.combine(st2[0], st2[1], st2[2], ct2)
                            tracker.offer(ev2, params)
                            ref = best_combo[0].score if best_combo else ev.score
                            if ev2.score > ref + 1e-12:
                                best_combo = (ev2, (k1, r1, cand1.copy()), (k2, r2, cand2.copy()))
                        params[k2][r2] = base2
                params[k1][r1] = base1
            if best_combo is None:
                break
            ev = best_combo[0]
            for key, row, cand in best_combo[1:]:
                params[key][row] = cand


# -- starting points --------------------------------------------------------


def _identityish(n_in: int, n_out: int) -> np.ndarray:
    m = np.zeros((n_in, n_out))
    for i in range(n_in):
        m[i, min(i, n_out - 1)] = 1.0
    return m


def _constant_rows(n_in: int, n_out: int) -> np.ndarray:
    m = np.zeros((n_in, n_out))
    m[:, 0] = 1.0
    return m


def _bsc_rows(p: float) -> np.ndarray:
    return np.array([[1.0 - p, p], [p, 1.0 - p]])


def _channel_defaults(dims: _Dims):
    px = np.full((1, dims.nx), 1.0 / dims.nx)
    if dims.qt_identity:
        pt = np.eye(dims.nx)
        pq = np.eye(dims.nx)
    else:
        pt = _identityish(dims.nx, dims.nt)
        pq = _constant_rows(dims.nt, dims.nq)
    return px, pt, pq


def _canonical_chain_starts(dims: _Dims) -> list[dict]:
    px, pt, pq = _channel_defaults(dims)
    starts = []
    informative = {
        "pv": _identityish(dims.na, dims.nv),
        "pu": _constant_rows(dims.nv, dims.nu),
        "px": px,
        "pt": pt,
        "pq": pq,
    }
    starts.append(_copy_params(informative))
    if not dims.qt_identity:
        qt_copy = _copy_params(informative)
        qt_copy["pq"] = _identityish(dims.nt, dims.nq)
        starts.append(qt_copy)
    silent = _copy_params(informative)
    silent["pv"] = _constant_rows(dims.na, dims.nv)
    starts.append(silent)
    return starts


def _grid_chain_starts(dims: _Dims, grid_resolution: int) -> list[dict]:
    """Symmetric-crossover grid starts for binary source/channel sides."""
    src_binary = dims.na == 2 and dims.nv == 2 and dims.nu == 2
    chan_binary = (not dims.qt_identity) and dims.nx == 2 and dims.nt == 2 and dims.nq == 2
    if not (src_binary or chan_binary):
        return []
    grid = np.linspace(0.0, 0.5, grid_resolution)
    px, pt_def, pq_def = _channel_defaults(dims)
    starts = []

    def _mk(u: float | None, q: float | None) -> dict:
        return {
            "pv": np.eye(2) if src_binary else _identityish(dims.na, dims.nv),
            "pu": _bsc_rows(u) if u is not None else _constant_rows(dims.nv, dims.nu),
            "px": px.copy(),
            "pt": np.eye(2) if chan_binary else pt_def.copy(),
            "pq": _bsc_rows(q) if q is not None else pq_def.copy(),
        }

    if src_binary and chan_binary:
        for u in grid:
            for q in grid:
                starts.append(_mk(float(u), float(q)))
    elif src_binary:
        for u in grid:
            starts.append(_mk(float(u), None))
    else:
        for q in grid:
            starts.append(_mk(None, float(q)))
    return starts


def _random_chain_start(dims: _Dims, rng: np.random.Generator) -> dict:
    params = {
        "pv": rng.dirichlet(np.ones(dims.nv), size=dims.na),
        "pu": rng.dirichlet(np.ones(dims.nu), size=dims.nv),
        "px": rng.dirichlet(np.ones(dims.nx), size=1),
    }
    if dims.qt_identity:
        params["pt"] = np.eye(dims.nx)
        params["pq"] = np.eye(dims.nx)
    else:
        params["pt"] = rng.dirichlet(np.ones(dims.nt), size=dims.nx)
        params["pq"] = rng.dirichlet(np.ones(dims.nq), size=dims.nt)
    return params


def _chain_to_joint_params(params: dict, dims: _Dims) -> dict:
    puv = np.einsum("av,vu->auv", params["pv"], params["pu"])
    out = {
        "puv": puv.reshape(dims.na, dims.nu * dims.nv),
        "px": params["px"].copy(),
        "pt": params["pt"].copy(),
        "pq": params["pq"].copy(),
    }
    return out


def _random_joint_start(dims: _Dims, rng: np.random.Generator) -> dict:
    params = {
        "puv": rng.dirichlet(np.ones(dims.nu * dims.nv), size=dims.na),
        "px": rng.dirichlet(np.ones(dims.nx), size=1),
    }
    if dims.qt_identity:
        params["pt"] = np.eye(dims.nx)
        params["pq"] = np.eye(dims.nx)
    else:
        params["pt"] = rng.dirichlet(np.ones(dims.nt), size=dims.nx)
        params["pq"] = rng.dirichlet(np.ones(dims.nq), size=dims.nt)
    return params


def _collapse_q_to_t(params: dict, dims: _Dims) -> dict:
    out = _copy_params(params)
    out["pq"] = _identityish(dims.nt, dims.nq)
    return out


def _raise_infeasible(tracker: _BestTracker, k: float, d_target: float) -> None:
    names = {
        "viol_rate1": "common-layer rate (I(U;A|B) <= k I(Q;Y))",
        "viol_rate2": "description rate (I(V;A|B) <= k I(T;Y))",
        "viol_dist": "distortion target",
    }
    detail = ""
    if tracker.least_viol is not None:
        ev = tracker.least_viol[1]
        worst = max(names, key=lambda f: getattr(ev, f))
        detail = f"; closest candidate violates the {names[worst]} by {getattr(ev, worst):.6f}"
    raise InfeasibleError(
        f"no auxiliary system satisfies the constraints at k={k}, D={d_target}{detail}"
    )


def _finalize_inner(source, channel, k, tracker: _BestTracker, dims: _Dims) -> OptimizeResult:
    _, params, ev = tracker.best
    aux_s = AuxSourceSystem.chain(CondPmf(params["pv"]), CondPmf(params["pu"]), ev.rec)
    aux_c = AuxChannelSystem(Pmf(params["px"][0]), CondPmf(params["pt"]), CondPmf(params["pq"]))
    evaluation = evaluate_inner(source, channel, aux_s, aux_c, k)
    return OptimizeResult(evaluation.delta, aux_s, aux_c, evaluation)


def _finalize_outer(source, channel, k, tracker: _BestTracker, dims: _Dims) -> OptimizeResult:
    _, params, ev = tracker.best
    aux_s = AuxSourceSystem.joint(CondPmf(params["puv"]), dims.nu, dims.nv, ev.rec)
    aux_c = AuxChannelSystem(Pmf(params["px"][0]), CondPmf(params["pt"]), CondPmf(params["pq"]))
    evaluation = evaluate_outer(source, channel, aux_s, aux_c, k)
    return OptimizeResult(evaluation.delta, aux_s, aux_c, evaluation)


def optimize_inner(
    source: SourceModel,
    channel: BroadcastChannel,
    k: float,
    d_target: float,
    config: Optional[OptimizerConfig] = None,
    *,
    _extra_starts: Sequence[dict] = (),
) -> OptimizeResult:
    """Largest achievable-side equivocation bound found at (k, D <= d_target).

    Multi-start coordinate ascent over the chain-mode decompositions; the
    best reconstruction map is recomputed at every candidate.  The result is
    a lower estimate of the true bound (the objective is nonconcave) and is
    deterministic given ``config.seed``.  Raises InfeasibleError when no
    candidate satisfies both rate constraints and the distortion target.
    """
    config = config if config is not None else OptimizerConfig()
    _check_point(source, k, d_target)
    dims = _resolve_dims(source, channel, config)
    search = _Search(source, channel, k, d_target, dims, "inner")
    starts = _canonical_chain_starts(dims)
    starts += _grid_chain_starts(dims, config.grid_resolution)
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    starts += [_random_chain_start(dims, np.random.default_rng(c)) for c in children]
    starts += [_copy_params(p) for p in _extra_starts]
    tracker = _BestTracker()
    for start in starts:
        _ascend(search, start, config, tracker)
    if tracker.best is not None and config.pair_polish:
        _pair_polish(search, _copy_params(tracker.best[1]), tracker)
    if tracker.best is None:
        _raise_infeasible(tracker, k, d_target)
    return _finalize_inner(source, channel, k, tracker, dims)


def optimize_outer(
    source: SourceModel,
    channel: BroadcastChannel,
    k: float,
    d_target: float,
    config: Optional[OptimizerConfig] = None,
    *,
    _extra_starts: Sequence[dict] = (),
) -> OptimizeResult:
    """Largest converse-side equivocation bound found at (k, D <= d_target).

    Searches the wider joint-mode class, seeding it with the achievable-side
    argmax rewritten in joint form (so the reported outer value is never
    below the inner one).  A heuristic maximum: reported as an upper bound
    on achievable equivocation with the usual multi-start caveat.
    """
    config = config if config is not None else OptimizerConfig()
    _check_point(source, k, d_target)
    dims = _resolve_dims(source, channel, config)
    search = _Search(source, channel, k, d_target, dims, "outer")

    starts: list[dict] = []
    try:
        inner_res = optimize_inner(source, channel, k, d_target, config)
        starts.append(_chain_to_joint_params(_params_of_inner(inner_res), dims))
    except InfeasibleError:
        pass
    starts += [
        _chain_to_joint_params(p, dims)
        for p in _canonical_chain_starts(dims) + _grid_chain_starts(dims, config.grid_resolution)
    ]
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    starts += [_random_joint_start(dims, np.random.default_rng(c)) for c in children]
    starts += [_copy_params(p) for p in _extra_starts]
    tracker = _BestTracker()
    for start in starts:
        _ascend(search, start, config, tracker)
    if tracker.best is not None and config.pair_polish:
        _pair_polish(search, _copy_params(tracker.best[1]), tracker)
    if tracker.best is None:
        _raise_infeasible(tracker, k, d_target)
    return _finalize_outer(source, channel, k, tracker, dims)


def _params_of_inner(res: OptimizeResult) -> dict:
    return {
        "pv": res.aux_source.p_v_given_a.rows.copy(),
        "pu": res.aux_source.p_u_given_v.rows.copy(),
        "px": res.aux_channel.p_x.probs.reshape(1, -1).copy(),
        "pt": res.aux_channel.p_t_given_x.rows.copy(),
        "pq": res.aux_channel.p_q_given_t.rows.copy(),
    }


def _params_of_outer(res: OptimizeResult) -> dict:
    return {
        "puv": res.aux_source.p_uv_given_a.rows.copy(),
        "px": res.aux_channel.p_x.probs.reshape(1, -1).copy(),
        "pt": res.aux_channel.p_t_given_x.rows.copy(),
        "pq": res.aux_channel.p_q_given_t.rows.copy(),
    }


def optimize_no_common_layer(
    source: SourceModel,
    channel: BroadcastChannel,
    k: float,
    d_target: float,
    config: Optional[OptimizerConfig] = None,
) -> OptimizeResult:
    """Achievable bound with the common description layer removed (U constant).

    This single-layer form (plain binned description plus a layered channel
    code) is the whole region when the legitimate decoder's side information
    is less noisy than the eavesdropper's; the caller asserts that premise.
    Identical to ``optimize_inner`` with ``card_u = 1``.
    """
    config = config if config is not None else OptimizerConfig()
    return optimize_inner(source, channel, k, d_target, dataclasses.replace(config, card_u=1))


def optimize_plain_channel(
    source: SourceModel,
    channel: BroadcastChannel,
    k: float,
    d_target: float,
    config: Optional[OptimizerConfig] = None,
) -> OptimizeResult:
    """Achievable bound with an unlayered channel code (T = X, Q = X).

    The channel then contributes only its plain rate k I(X;Y), maximized
    over the input law.  This form is the whole region when the
    eavesdropper's channel output is less noisy than the decoder's; the
    caller asserts that premise.  Identical to ``optimize_inner`` with
    ``qt_identity = True``.
    """
    config = config if config is not None else OptimizerConfig()
    return optimize_inner(
        source, channel, k, d_target, dataclasses.replace(config, qt_identity=True)
    )


# ---------------------------------------------------------------------------
# Binary erasure/symmetric example, closed form
# ---------------------------------------------------------------------------


def bec_bsc_delta(
    beta: float, eps: float, zeta: float, u: float, q: float
) -> tuple[bool, float]:
    """Closed-form achievable bound for the built-in binary model at k=1, D=0.

    The decomposition is pinned to V = A with symmetric binary U and Q of
    crossovers ``u`` and ``q``; returns (rate constraint satisfied, bound):

        constraint:  beta (1 - h2(u)) <= 1 - h2(q)
        bound:       h2(eps) + h2(u) - h2(eps * u)
                     - [ beta h2(u) - (h2(zeta) + h2(q) - h2(zeta * q)) ]+
    """
    for name, val, hi in (("u", u, 0.5), ("q", q, 0.5), ("beta", beta, 1.0),
                          ("eps", eps, 0.5), ("zeta", zeta, 0.5)):
        if not 0.0 <= val <= hi:
            raise ValidationError(f"{name}={val!r} outside [0, {hi}]")
    ok = beta * (1.0 - h2(u)) <= 1.0 - h2(q) + RATE_TOL
    bracket = beta * h2(u) - (h2(zeta) + h2(q) - h2(star(zeta, q)))
    delta = h2(eps) + h2(u) - h2(star(eps, u)) - max(0.0, bracket)
    return ok, delta


def _h2_arr(x: np.ndarray) -> np.ndarray:
    return -(xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)) / _LN2


def bec_bsc_max_delta(
    beta: float, eps: float, zeta: float, resolution: int = 200
) -> tuple[float, float, float]:
    """Constrained maximum of ``bec_bsc_delta`` over (u, q) in [0, 1/2]^2.

    Grid search at ``resolution`` points per axis, then local grid
    refinement around the best cell.  Returns (delta_max, u_star, q_star).
    """
    if resolution < 100:
        raise ValidationError("resolution must be at least 100")

    def _batch(us: np.ndarray, qs: np.ndarray):
        uu, qq = np.meshgrid(us, qs, indexing="ij")
        h2u, h2q, h2z = _h2_arr(uu), _h2_arr(qq), h2(zeta)
        ok = beta * (1.0 - h2u) <= 1.0 - h2q + RATE_TOL
        bracket = beta * h2u - (h2z + h2q - _h2_arr(zeta * (1.0 - qq) + (1.0 - zeta) * qq))
        delta = h2(eps) + h2u - _h2_arr(eps * (1.0 - uu) + (1.0 - eps) * uu)
        delta = delta - np.maximum(0.0, bracket)
        delta = np.where(ok, delta, -np.inf)
        flat = int(np.argmax(delta))
        i, j = np.unravel_index(flat, delta.shape)
        return float(delta[i, j]), float(uu[i, j]), float(qq[i, j])

    axis = np.linspace(0.0, 0.5, resolution)
    best, u_star, q_star = _batch(axis, axis)
    span = 0.5 / (resolution - 1)
    for _ in range(40):
        us = np.clip(np.linspace(u_star - span, u_star + span, 9), 0.0, 0.5)
        qs = np.clip(np.linspace(q_star - span, q_star + span, 9), 0.0, 0.5)
        cand, cu, cq = _batch(us, qs)
        if cand > best:
            best, u_star, q_star = cand, cu, cq
        span *= 0.5
    if not math.isfinite(best):
        raise InfeasibleError("no (u, q) satisfies the rate constraint")
    return best, u_star, q_star


# ---------------------------------------------------------------------------
# Frontier tabulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrontierPoint:
    k: float
    d_target: float
    delta_inner: Optional[float]
    delta_outer: Optional[float]
    status: str  # "ok" or "infeasible"


def frontier_sweep(
    source: SourceModel,
    channel: BroadcastChannel,
    k_list: Sequence[float],
    d_list: Sequence[float],
    config: Optional[OptimizerConfig] = None,
) -> list[FrontierPoint]:
    """Inner and outer bound values over the (k, D) grid, ascending order.

    Each grid point warm-starts from the argmax of its predecessors in k and
    in D (plus their Q->T collapsed variants), which makes the tabulated
    inner frontier monotone in both coordinates by construction.  Infeasible
    points are reported as markers, never as an abort.
    """
    if not len(k_list) or not len(d_list):
        raise ValidationError("k_list and d_list must be non-empty")
    config = config if config is not None else OptimizerConfig()
    ks = sorted(set(float(k) for k in k_list))
    ds = sorted(set(float(d) for d in d_list))
    dims = _resolve_dims(source, channel, config)

    inner_params: dict[tuple[int, int], dict] = {}
    outer_params: dict[tuple[int, int], dict] = {}
    points: list[FrontierPoint] = []

    for i, k in enumerate(ks):
        for j, d in enumerate(ds):
            warm_inner: list[dict] = []
            warm_outer: list[dict] = []
            for key in ((i - 1, j), (i, j - 1)):
                if key in inner_params:
                    warm_inner.append(inner_params[key])
                    warm_inner.append(_collapse_q_to_t(inner_params[key], dims))
                if key in outer_params:
                    warm_outer.append(outer_params[key])
                    warm_outer.append(_collapse_q_to_t(outer_params[key], dims))
            try:
                res_in = optimize_inner(source, channel, k, d, config, _extra_starts=warm_inner)
            except InfeasibleError:
                points.append(FrontierPoint(k, d, None, None, "infeasible"))
                continue
            inner_params[(i, j)] = _params_of_inner(res_in)
            warm_outer.insert(0, _chain_to_joint_params(inner_params[(i, j)], dims))
            res_out = optimize_outer(source, channel, k, d, config, _extra_starts=warm_outer)
            outer_params[(i, j)] = _params_of_outer(res_out)
            points.append(FrontierPoint(k, d, res_in.delta, res_out.delta, "ok"))
    return points
