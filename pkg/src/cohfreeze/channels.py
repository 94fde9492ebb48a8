"""Kraus channels, the standard qubit noise library, and the incoherence
classifier.

A Kraus operator maps diagonal states to diagonal states iff each of its
columns has at most one nonzero entry; the adjoint condition adds the same
constraint per row. The classifier applies exactly that row/column scan to
the supplied representation (Kraus representations are not unique; no search
over alternative representations is attempted).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    OutOfRangeError,
    ValidationError,
)
from .linalg import as_complex_matrix, max_abs
from .states import DensityMatrix

COMPLETENESS_TOL = 1e-10
ZERO_TOL = 1e-12

_I = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map given by an explicit list of Kraus operators.

    Construction verifies completeness: sum K^dag K = I within
    COMPLETENESS_TOL. Operators are stored immutably.
    """

    operators: tuple[np.ndarray, ...]
    label: str = ""

    def __post_init__(self):
        if not self.operators:
            raise ValidationError("channel needs at least one Kraus operator")
        ops = tuple(as_complex_matrix(op).copy() for op in self.operators)
        dim = ops[0].shape[0]
        if any(op.shape[0] != dim for op in ops):
            raise DimensionMismatchError("Kraus operators differ in dimension")
        total = sum(op.conj().T @ op for op in ops)
        defect = max_abs(total - np.eye(dim))
        if defect > COMPLETENESS_TOL:
            raise ValidationError(
                f"completeness fails: max |sum K^dag K - I| = {defect:.3e}"
            )
        for op in ops:
            op.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def stacked(self) -> np.ndarray:
        return np.stack(self.operators)


class ChannelClass(enum.Enum):
    NOT_INCOHERENT = "NotIncoherent"
    INCOHERENT_ONLY = "IncoherentOnly"
    STRICTLY_INCOHERENT = "StrictlyIncoherent"


@dataclass(frozen=True)
class ClassificationWitness:
    """Entry positions proving a row or column has more than one nonzero."""

    operator_index: int
    axis: str  # "row" or "column"
    index: int
    positions: tuple[int, ...]

    def describe(self) -> str:
        where = "rows" if self.axis == "column" else "columns"
        return (
            f"operator {self.operator_index}, {self.axis} {self.index}, "
            f"{where} {self.positions}"
        )


@dataclass(frozen=True)
class ChannelClassification:
    channel_class: ChannelClass
    witness: ClassificationWitness | None


def classify(channel: KrausChannel, zero_tol: float = ZERO_TOL) -> ChannelClassification:
    """Row/column scan of the given Kraus representation.

    At most one nonzero per column in every operator makes the channel
    incoherent; at most one per row as well makes it strictly incoherent.
    The witness points at the first violating column (NotIncoherent) or
    row (IncoherentOnly).
    """
    row_witness = None
    for n, op in enumerate(channel.operators):
        mask = np.abs(op) > zero_tol
        col_counts = mask.sum(axis=0)
        bad_cols = np.nonzero(col_counts > 1)[0]
        if bad_cols.size:
            col = int(bad_cols[0])
            rows = tuple(int(r) for r in np.nonzero(mask[:, col])[0])
            return ChannelClassification(
                ChannelClass.NOT_INCOHERENT,
                ClassificationWitness(n, "column", col, rows),
            )
        if row_witness is None:
            row_counts = mask.sum(axis=1)
            bad_rows = np.nonzero(row_counts > 1)[0]
            if bad_rows.size:
                row = int(bad_rows[0])
                cols = tuple(int(c) for c in np.nonzero(mask[row, :])[0])
                row_witness = ClassificationWitness(n, "row", row, cols)
    if row_witness is not None:
        return ChannelClassification(ChannelClass.INCOHERENT_ONLY, row_witness)
    return ChannelClassification(ChannelClass.STRICTLY_INCOHERENT, None)


def apply_channel(channel: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """sum_n K_n rho K_n^dag as a validated density matrix."""
    if channel.dim != rho.dim:
        raise DimensionMismatchError(
            f"channel dim {channel.dim} does not match state dim {rho.dim}"
        )
    ops = channel.stacked()
    out = (ops @ rho.matrix @ ops.conj().transpose(0, 2, 1)).sum(axis=0)
    return DensityMatrix(out)


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """The channel applying `first` then `second`."""
    if second.dim != first.dim:
        raise DimensionMismatchError(
            f"cannot compose dims {second.dim} and {first.dim}"
        )
    ops = tuple(
        b @ a for b in second.operators for a in first.operators
    )
    return KrausChannel(ops, label=f"compose({second.label},{first.label})")


def tensor(channels: Sequence[KrausChannel]) -> KrausChannel:
    """Tensor product channel; operators are all Kronecker products."""
    if not channels:
        raise ValidationError("tensor needs at least one channel")
    ops = tuple(
        reduce(np.kron, combo)
        for combo in itertools.product(*(c.operators for c in channels))
    )
    label = " x ".join(c.label or "?" for c in channels)
    return KrausChannel(ops, label=label)


def _check_unit_interval(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise OutOfRangeError(f"{name} must be in [0, 1], got {value}")
    return float(value)


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=np.complex128),), label="identity")


def bit_flip(q: float) -> KrausChannel:
    """Kraus operators sqrt(1-q) I and sqrt(q) X."""
    q = _check_unit_interval("q", q)
    ops = (np.sqrt(1 - q) * _I, np.sqrt(q) * _X)
    return KrausChannel(ops, label=f"bitflip(q={q:g})")


def phase_flip(q: float) -> KrausChannel:
    """Kraus operators sqrt(1-q) I and sqrt(q) Z."""
    q = _check_unit_interval("q", q)
    ops = (np.sqrt(1 - q) * _I, np.sqrt(q) * _Z)
    return KrausChannel(ops, label=f"phaseflip(q={q:g})")


def bit_phase_flip(q: float) -> KrausChannel:
    """Kraus operators sqrt(1-q) I and sqrt(q) Y."""
    q = _check_unit_interval("q", q)
    ops = (np.sqrt(1 - q) * _I, np.sqrt(q) * _Y)
    return KrausChannel(ops, label=f"bitphaseflip(q={q:g})")


def depolarizing(q: float) -> KrausChannel:
    """Kraus operators sqrt(1-3q/4) I and sqrt(q/4) X, Y, Z."""
    q = _check_unit_interval("q", q)
    ops = (
        np.sqrt(1 - 3 * q / 4) * _I,
        np.sqrt(q / 4) * _X,
        np.sqrt(q / 4) * _Y,
        np.sqrt(q / 4) * _Z,
    )
    return KrausChannel(ops, label=f"depolarizing(q={q:g})")


def phase_damping(lam: float) -> KrausChannel:
    """Kraus operators sqrt(1-lam) I, sqrt(lam) |0><0|, sqrt(lam) |1><1|."""
    lam = _check_unit_interval("lambda", lam)
    p0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
    p1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)
    ops = (np.sqrt(1 - lam) * _I, np.sqrt(lam) * p0, np.sqrt(lam) * p1)
    return KrausChannel(ops, label=f"phasedamping(l={lam:g})")


def amplitude_damping(gamma: float) -> KrausChannel:
    """Kraus operators [[1,0],[0,sqrt(1-g)]] and [[0,sqrt(g)],[0,0]]."""
    gamma = _check_unit_interval("gamma", gamma)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=np.complex128)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=np.complex128)
    return KrausChannel((k0, k1), label=f"amplitudedamping(g={gamma:g})")


# Per-qubit factory registry; each constructor takes one probability-like
# parameter in [0, 1].
CHANNEL_FACTORIES = {
    "bitflip": bit_flip,
    "phaseflip": phase_flip,
    "bitphaseflip": bit_phase_flip,
    "depolarizing": depolarizing,
    "phasedamping": phase_damping,
    "amplitudedamping": amplitude_damping,
}


def local_channel(factors) -> KrausChannel:
    """Tensor product of per-qubit channels.

    Factors may be KrausChannel instances or (kind, parameter) pairs using
    the CHANNEL_FACTORIES names; the factors need not be identical.
    """
    built = []
    for factor in factors:
        if isinstance(factor, KrausChannel):
            built.append(factor)
            continue
        kind, param = factor
        try:
            factory = CHANNEL_FACTORIES[kind]
        except KeyError:
            raise ValidationError(f"unknown channel kind {kind!r}") from None
        built.append(factory(param))
    return tensor(built)


def random_sio_channel(dim: int, num_operators: int, seed: int) -> KrausChannel:
    """Random strictly incoherent channel from permutation-pattern operators.

    Each operator places one complex gain per column along a random
    permutation; gains are normalized so that sum K^dag K = I exactly.
    """
    return _random_patterned_channel(dim, num_operators, seed, strict=True)


def random_incoherent_channel(dim: int, num_operators: int, seed: int) -> KrausChannel:
    """Random incoherent (generally not strictly incoherent) channel.

    Each operator is |t_n><v_n| with {v_n} the rows of a random isometry, so
    every column has at most one nonzero while rows are dense. At least dim
    operators are produced.
    """
    if num_operators < 1:
        raise ValidationError("need at least one operator")
    rng = np.random.default_rng(seed)
    m = max(num_operators, dim)
    g = rng.standard_normal((m, dim)) + 1j * rng.standard_normal((m, dim))
    q, _ = np.linalg.qr(g)  # m x dim, orthonormal columns
    targets = rng.integers(0, dim, size=m)
    ops = []
    for n in range(m):
        op = np.zeros((dim, dim), dtype=np.complex128)
        op[targets[n], :] = q[n, :]
        ops.append(op)
    return KrausChannel(tuple(ops), label=f"random-io(dim={dim},seed={seed})")


def _random_patterned_channel(
    dim: int, num_operators: int, seed: int, *, strict: bool
) -> KrausChannel:
    if num_operators < 1:
        raise ValidationError("need at least one operator")
    if not strict:
        return random_incoherent_channel(dim, num_operators, seed)
    rng = np.random.default_rng(seed)
    targets = np.stack([rng.permutation(dim) for _ in range(num_operators)])
    gains = rng.standard_normal((num_operators, dim)) + 1j * rng.standard_normal(
        (num_operators, dim)
    )
    gains /= np.sqrt(np.sum(np.abs(gains) ** 2, axis=0, keepdims=True))
    ops = []
    for n in range(num_operators):
        op = np.zeros((dim, dim), dtype=np.complex128)
        op[targets[n], np.arange(dim)] = gains[n]
        ops.append(op)
    return KrausChannel(tuple(ops), label=f"random-sio(dim={dim},seed={seed})")
