"""Built-in models and the hand-editable model file format.

The built-in ``bec-bsc`` family: a uniform binary source observed by the
legitimate receiver through a binary erasure channel with erasure
probability ``beta`` and by the eavesdropper through a binary symmetric
channel with crossover ``eps``; the communication channel is noiseless to
the legitimate receiver and a BSC with crossover ``zeta`` to the
eavesdropper.  Hamming distortion.
"""

from __future__ import annotations

import numpy as np

from .info import CondPmf, DistortionMatrix, JointTable, Pmf, ValidationError
from .regions import BroadcastChannel, SourceModel

__all__ = [
    "bsc",
    "bec",
    "bec_bsc_source",
    "bec_bsc_channel",
    "bec_bsc_model",
    "load_model_file",
    "ModelFileError",
]


class ModelFileError(ValidationError):
    """A model file is malformed or fails probability validation."""


def bsc(eps: float) -> CondPmf:
    """Binary symmetric channel with crossover probability ``eps``."""
    if not 0.0 <= eps <= 1.0:
        raise ValidationError(f"BSC crossover {eps!r} outside [0, 1]")
    return CondPmf([[1.0 - eps, eps], [eps, 1.0 - eps]])


def bec(beta: float) -> CondPmf:
    """Binary erasure channel; outputs are (0, erasure, 1)."""
    if not 0.0 <= beta <= 1.0:
        raise ValidationError(f"BEC erasure probability {beta!r} outside [0, 1]")
    return CondPmf([[1.0 - beta, beta, 0.0], [0.0, beta, 1.0 - beta]])


def bec_bsc_source(beta: float, eps: float) -> SourceModel:
    """Uniform binary source, BEC(beta) to the decoder, BSC(eps) to the eavesdropper."""
    p_a = Pmf.uniform(2)
    joint = np.einsum("a,ab,ae->abe", p_a.probs, bec(beta).rows, bsc(eps).rows)
    return SourceModel(JointTable(joint, ("a", "b", "e")), DistortionMatrix.hamming(2))


def bec_bsc_channel(zeta: float) -> BroadcastChannel:
    """Noiseless binary channel to the decoder, BSC(zeta) to the eavesdropper."""
    rows = np.einsum("xy,xz->xyz", np.eye(2), bsc(zeta).rows).reshape(2, 4)
    return BroadcastChannel(CondPmf(rows), ny=2, nz=2)


def bec_bsc_model(beta: float, eps: float, zeta: float) -> tuple[SourceModel, BroadcastChannel]:
    return bec_bsc_source(beta, eps), bec_bsc_channel(zeta)


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------
#
# Plain text, hand-editable.  `#` starts a comment.  Layout:
#
#   alphabet A 2          } sizes for A B E X Y Z, any order
#   ...
#   p_abe                 } |A|*|B|*|E| probabilities, row-major (a slowest)
#   0.25 0.25 ...
#   p_yz_given_x          } |X| rows of |Y|*|Z| probabilities (y slower than z)
#   ...
#   distortion            } |A| rows of |A| nonnegative reals
#   ...

_ALPHABETS = ("A", "B", "E", "X", "Y", "Z")
_SECTIONS = ("p_abe", "p_yz_given_x", "distortion")


def load_model_file(path: str) -> tuple[SourceModel, BroadcastChannel]:
    """Parse a model file; raises ModelFileError on any defect."""
    sizes: dict[str, int] = {}
    numbers: dict[str, list[float]] = {}
    current: str | None = None

    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw_lines = fh.readlines()
    except OSError as exc:
        raise ModelFileError(f"cannot read model file: {exc}") from None

    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "alphabet":
            if len(tokens) != 3 or tokens[1] not in _ALPHABETS:
                raise ModelFileError(f"line {lineno}: expected 'alphabet <A|B|E|X|Y|Z> <size>'")
            try:
                size = int(tokens[2])
            except ValueError:
                raise ModelFileError(f"line {lineno}: alphabet size must be an integer") from None
            if size < 1:
                raise ModelFileError(f"line {lineno}: alphabet size must be positive")
            sizes[tokens[1]] = size
            continue
        if tokens[0] in _SECTIONS:
            if len(tokens) != 1:
                raise ModelFileError(f"line {lineno}: section header takes no arguments")
            current = tokens[0]
            numbers.setdefault(current, [])
            continue
        if current is None:
            raise ModelFileError(f"line {lineno}: numbers before any section header")
        try:
            numbers[current].extend(float(t) for t in tokens)
        except ValueError:
            raise ModelFileError(f"line {lineno}: expected decimal numbers") from None

    missing = [a for a in _ALPHABETS if a not in sizes]
    if missing:
        raise ModelFileError(f"missing alphabet sizes for {', '.join(missing)}")
    for sec in _SECTIONS:
        if sec not in numbers:
            raise ModelFileError(f"missing section {sec!r}")

    na, nb, ne = sizes["A"], sizes["B"], sizes["E"]
    nx, ny, nz = sizes["X"], sizes["Y"], sizes["Z"]

    def _shaped(sec: str, shape: tuple[int, ...]) -> np.ndarray:
        vals = numbers[sec]
        want = int(np.prod(shape))
        if len(vals) != want:
            raise ModelFileError(f"section {sec!r} has {len(vals)} values, expected {want}")
        return np.asarray(vals, dtype=np.float64).reshape(shape)

    try:
        p_abe = JointTable(_shaped("p_abe", (na, nb, ne)), ("a", "b", "e"))
        pyz = CondPmf(_shaped("p_yz_given_x", (nx, ny * nz)))
        dist = DistortionMatrix(_shaped("distortion", (na, na)))
        source = SourceModel(p_abe, dist)
        channel = BroadcastChannel(pyz, ny=ny, nz=nz)
    except ModelFileError:
        raise
    except ValidationError as exc:
        raise ModelFileError(f"model validation failed: {exc}") from None
    return source, channel
