"""Exact probability and information-measure primitives on finite alphabets.

Everything here is dense and double precision; all information quantities are
in bits.  Zero-probability cells follow the usual continuous extensions
(0 log 0 = 0, and 0/0 terms inside conditional quantities are skipped).

All container types are immutable after construction and all operations are
pure functions, so they are safe to use from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.special import xlogy

__all__ = [
    "ValidationError",
    "Pmf",
    "CondPmf",
    "JointTable",
    "DistortionMatrix",
    "entropy",
    "conditional_entropy",
    "mutual_information",
    "conditional_mutual_information",
    "h2",
    "star",
    "assemble_joint",
]

# Construction tolerance for probability mass; computed quantities are clamped
# to their theoretical ranges with a looser slack (float accumulation over
# product tables).
PROB_TOL = 1e-12
CLAMP_TOL = 1e-10

# Dense tables only; refuse anything beyond desk scale.
MAX_JOINT_CELLS = 10_000_000

_LN2 = math.log(2.0)

Axes = Union[int, Sequence[int]]


class ValidationError(ValueError):
    """A probability object violates its invariants."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


def _check_mass(arr: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} contains non-finite entries")
    if arr.min(initial=0.0) < -PROB_TOL:
        raise ValidationError(f"{what} has a negative entry: {arr.min()}")
    total = float(arr.sum())
    if abs(total - 1.0) > PROB_TOL:
        raise ValidationError(f"{what} sums to {total!r}, not 1 within {PROB_TOL}")
    # tiny negatives from upstream float noise are clipped, not rejected
    return np.clip(arr, 0.0, None)


@dataclass(frozen=True)
class Pmf:
    """Probability vector over a finite alphabet."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("Pmf needs a non-empty 1-D vector")
        arr = _check_mass(arr, "Pmf")
        object.__setattr__(self, "probs", _freeze(arr))

    @property
    def size(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, n: int) -> "Pmf":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, symbol: int) -> "Pmf":
        v = np.zeros(n)
        v[symbol] = 1.0
        return cls(v)


@dataclass(frozen=True)
class CondPmf:
    """Stochastic matrix: one output distribution per input symbol.

    ``rows[i]`` is the distribution of the output given input symbol ``i``.
    """

    rows: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.rows, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError("CondPmf needs a non-empty 2-D matrix")
        for i in range(arr.shape[0]):
            try:
                arr[i] = _check_mass(arr[i], f"CondPmf row {i}")
            except ValidationError as exc:
                raise ValidationError(str(exc)) from None
        object.__setattr__(self, "rows", _freeze(arr))

    @property
    def input_size(self) -> int:
        return self.rows.shape[0]

    @property
    def output_size(self) -> int:
        return self.rows.shape[1]

    def row(self, i: int) -> Pmf:
        return Pmf(self.rows[i])

    def then(self, other: "CondPmf") -> "CondPmf":
        """Cascade: feed this channel's output into ``other``."""
        if other.input_size != self.output_size:
            raise ValidationError(
                f"cannot cascade {self.output_size}-ary output into "
                f"{other.input_size}-ary input"
            )
        return CondPmf(self.rows @ other.rows)

    @classmethod
    def identity(cls, n: int) -> "CondPmf":
        return cls(np.eye(n))

    @classmethod
    def constant(cls, input_size: int, output_size: int, symbol: int = 0) -> "CondPmf":
        rows = np.zeros((input_size, output_size))
        rows[:, symbol] = 1.0
        return cls(rows)


@dataclass(frozen=True)
class JointTable:
    """Dense joint distribution over a tuple of finite alphabets.

    ``names`` optionally labels the axes (used by the assembly helper so
    downstream code can address axes by variable name).
    """

    probs: np.ndarray
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=np.float64)
        if arr.size == 0:
            raise ValidationError("JointTable is empty")
        if arr.size > MAX_JOINT_CELLS:
            raise ValidationError(
                f"joint table has {arr.size} cells, above the "
                f"{MAX_JOINT_CELLS}-cell cap"
            )
        arr = _check_mass(arr, "JointTable")
        object.__setattr__(self, "probs", _freeze(arr))
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != arr.ndim or len(set(names)) != len(names):
                raise ValidationError("axis names must be distinct, one per axis")
            object.__setattr__(self, "names", names)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.probs.shape

    @property
    def ndim(self) -> int:
        return self.probs.ndim

    def axis(self, name: str) -> int:
        if self.names is None:
            raise ValidationError("this table has no axis names")
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"no axis named {name!r}") from None

    def axes_of(self, *names: str) -> tuple[int, ...]:
        return tuple(self.axis(n) for n in names)

    def marginal(self, axes: Axes) -> "JointTable":
        """Marginal over the listed axes (all others summed out)."""
        keep = _normalize_axes(axes, self.ndim)
        drop = tuple(i for i in range(self.ndim) if i not in keep)
        arr = self.probs.sum(axis=drop) if drop else self.probs
        # preserve the requested axis order
        order = tuple(sorted(keep))
        perm = tuple(order.index(a) for a in keep)
        arr = np.transpose(arr, perm)
        names = tuple(self.names[a] for a in keep) if self.names else None
        return JointTable(arr, names)


@dataclass(frozen=True)
class DistortionMatrix:
    """Per-letter distortion d(source symbol, reconstruction symbol)."""

    values: np.ndarray
    d_max: float = field(default=math.nan)

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError("distortion matrix must be 2-D")
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0:
            raise ValidationError("distortion entries must be finite and >= 0")
        d_max = float(self.d_max)
        if math.isnan(d_max):
            d_max = float(arr.max())
        if not math.isfinite(d_max) or d_max < float(arr.max()):
            raise ValidationError("d_max must be finite and >= every entry")
        object.__setattr__(self, "values", _freeze(arr))
        object.__setattr__(self, "d_max", d_max)

    @classmethod
    def hamming(cls, n: int) -> "DistortionMatrix":
        return cls(1.0 - np.eye(n), d_max=1.0)


# ---------------------------------------------------------------------------
# Information measures
# ---------------------------------------------------------------------------


def _entropy_bits(arr: np.ndarray) -> float:
    """Shannon entropy in bits of an (unnormalized-safe) mass array."""
    # every summand -x log x is >= 0 for x in [0, 1], so the max only
    # normalizes -0.0 away
    return max(0.0, float(-xlogy(arr, arr).sum() / _LN2))


def _normalize_axes(axes: Axes, ndim: int) -> tuple[int, ...]:
    if isinstance(axes, (int, np.integer)):
        axes = (int(axes),)
    out = tuple(int(a) for a in axes)
    for a in out:
        if not 0 <= a < ndim:
            raise ValidationError(f"axis {a} out of range for a {ndim}-D table")
    if len(set(out)) != len(out):
        raise ValidationError("repeated axis")
    return out


def _marg(joint: JointTable, axes: tuple[int, ...]) -> np.ndarray:
    drop = tuple(i for i in range(joint.ndim) if i not in axes)
    return joint.probs.sum(axis=drop) if drop else joint.probs


def entropy(p: Pmf) -> float:
    """H(p) in bits; lies in [0, log2 |alphabet|]."""
    return _entropy_bits(p.probs)


def conditional_entropy(joint: JointTable, target_axes: Axes, given_axes: Axes = ()) -> float:
    """H(target | given) = H(target, given) - H(given), clamped to >= 0."""
    t = _normalize_axes(target_axes, joint.ndim)
    g = _normalize_axes(given_axes, joint.ndim)
    if set(t) & set(g):
        raise ValidationError("target and given axes overlap")
    h_tg = _entropy_bits(_marg(joint, t + g))
    h_g = _entropy_bits(_marg(joint, g)) if g else 0.0
    return max(0.0, h_tg - h_g)


def mutual_information(joint: JointTable, axes_x: Axes, axes_y: Axes) -> float:
    """I(X;Y) = H(X) + H(Y) - H(X,Y), clamped to >= 0."""
    x = _normalize_axes(axes_x, joint.ndim)
    y = _normalize_axes(axes_y, joint.ndim)
    if set(x) & set(y):
        raise ValidationError("axes_x and axes_y overlap")
    h_x = _entropy_bits(_marg(joint, x))
    h_y = _entropy_bits(_marg(joint, y))
    h_xy = _entropy_bits(_marg(joint, x + y))
    return max(0.0, h_x + h_y - h_xy)


def conditional_mutual_information(
    joint: JointTable, axes_x: Axes, axes_y: Axes, axes_z: Axes
) -> float:
    """I(X;Y|Z) = H(X,Z) + H(Y,Z) - H(Z) - H(X,Y,Z), clamped to >= 0."""
    x = _normalize_axes(axes_x, joint.ndim)
    y = _normalize_axes(axes_y, joint.ndim)
    z = _normalize_axes(axes_z, joint.ndim)
    if (set(x) & set(y)) or (set(x) & set(z)) or (set(y) & set(z)):
        raise ValidationError("axis groups must be pairwise disjoint")
    h_xz = _entropy_bits(_marg(joint, x + z))
    h_yz = _entropy_bits(_marg(joint, y + z))
    h_z = _entropy_bits(_marg(joint, z)) if z else 0.0
    h_xyz = _entropy_bits(_marg(joint, x + y + z))
    return max(0.0, h_xz + h_yz - h_z - h_xyz)


def h2(x: float) -> float:
    """Binary entropy -x log2 x - (1-x) log2 (1-x), in bits."""
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"h2 argument {x!r} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x))


def star(a: float, b: float) -> float:
    """Binary convolution a(1-b) + (1-a)b: crossover of two cascaded BSCs."""
    if not 0.0 <= a <= 1.0 or not 0.0 <= b <= 1.0:
        raise ValidationError("star arguments must lie in [0, 1]")
    return a * (1.0 - b) + (1.0 - a) * b


# ---------------------------------------------------------------------------
# Product-form assembly
# ---------------------------------------------------------------------------

_EINSUM_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def assemble_joint(factors: Sequence[tuple]) -> JointTable:
    """Multiply a directed factorization into one dense joint table.

    Each factor introduces one or more new variables, conditioned only on
    variables already introduced.  Accepted factor forms::

        (name, Pmf)                        root marginal
        ((n1, n2, ...), JointTable)        root joint (axis per name)
        (name, CondPmf, given)             conditional, single output variable
        ((n1, ...), CondPmf, given, shape) conditional with product output;
                                           `shape` splits output_size, row-major

    `given` is a tuple of previously introduced names; a CondPmf row is
    indexed by the row-major ravel of the given variables in that order.

    The result's axes follow introduction order and carry the variable names,
    so information measures can be taken by name afterwards.
    """
    names: list[str] = []
    sizes: dict[str, int] = {}
    letter: dict[str, str] = {}
    result: np.ndarray | None = None

    def _take_letter(name: str) -> str:
        if len(letter) >= len(_EINSUM_LETTERS):
            raise ValidationError("too many variables")
        letter[name] = _EINSUM_LETTERS[len(letter)]
        return letter[name]

    for spec in factors:
        new_names, arr, given, shape = _parse_factor(spec)
        for n in new_names:
            if n in sizes:
                raise ValidationError(f"variable {n!r} introduced twice")
        for g in given:
            if g not in sizes:
                raise ValidationError(
                    f"factor for {new_names} conditions on {g!r}, which is not "
                    "introduced yet (wiring must be acyclic and ordered)"
                )
        given_shape = tuple(sizes[g] for g in given)
        expected_rows = int(np.prod(given_shape)) if given else 1
        if given and arr.shape[0] != expected_rows:
            raise ValidationError(
                f"factor for {new_names} has {arr.shape[0]} rows, expected "
                f"{expected_rows} for given {given}"
            )
        if shape is None:
            shape = (arr.shape[-1],)
        elif int(np.prod(shape)) != arr.shape[-1]:
            raise ValidationError(
                f"output shape {shape} does not match output size {arr.shape[-1]}"
            )
        factor_nd = arr.reshape(given_shape + tuple(shape))

        for n, s in zip(new_names, shape):
            sizes[n] = int(s)
            _take_letter(n)
        cells = int(np.prod([sizes[n] for n in names + list(new_names)]))
        if cells > MAX_JOINT_CELLS:
            raise ValidationError("assembled joint exceeds the dense-cell cap")

        fac_subs = "".join(letter[g] for g in given) + "".join(letter[n] for n in new_names)
        if result is None:
            res_subs = ""
            result = np.asarray(1.0)
        else:
            res_subs = "".join(letter[n] for n in names)
        out_subs = "".join(letter[n] for n in names) + "".join(letter[n] for n in new_names)
        result = np.einsum(f"{res_subs},{fac_subs}->{out_subs}", result, factor_nd)
        names.extend(new_names)

    if result is None:
        raise ValidationError("no factors given")
    return JointTable(result, tuple(names))


def _parse_factor(spec: tuple):
    if not isinstance(spec, (tuple, list)) or not 2 <= len(spec) <= 4:
        raise ValidationError(f"bad factor spec: {spec!r}")
    raw_names, table = spec[0], spec[1]
    given = tuple(spec[2]) if len(spec) >= 3 else ()
    shape = tuple(int(s) for s in spec[3]) if len(spec) == 4 else None
    if isinstance(raw_names, str):
        new_names = (raw_names,)
    else:
        new_names = tuple(raw_names)
    if not new_names or not all(isinstance(n, str) for n in new_names):
        raise ValidationError("factor variable names must be strings")

    if isinstance(table, Pmf):
        if given or len(new_names) != 1:
            raise ValidationError("a Pmf factor is a root marginal of one variable")
        return new_names, table.probs.reshape(1, -1), (), shape
    if isinstance(table, JointTable):
        if given:
            raise ValidationError("a JointTable factor cannot be conditioned")
        if len(new_names) != table.ndim:
            raise ValidationError("need one name per JointTable axis")
        return new_names, table.probs.reshape(1, -1), (), table.dims
    if isinstance(table, CondPmf):
        if not given:
            raise ValidationError("a CondPmf factor needs given variables")
        if len(new_names) > 1 and shape is None:
            raise ValidationError("multi-variable CondPmf output needs an explicit shape")
        if len(new_names) == 1 and shape is None:
            shape = (table.output_size,)
        if len(new_names) != len(shape):
            raise ValidationError("need one name per output dimension")
        return new_names, table.rows, given, shape
    raise ValidationError(f"unsupported factor table type: {type(table).__name__}")
