"""Parameter sweeps, freezing detection, and the closed-form reproductions.

Channels are swept over parameter grids instead of an explicit time axis:
every reachable channel corresponds to some grid point, and "frozen forever"
becomes "frozen at every grid point".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .channels import CHANNEL_FACTORIES, KrausChannel, apply_channel, local_channel
from .coherence import c_l1, c_rel_ent
from .errors import (
    DimensionTooLargeError,
    NumericalInconsistencyError,
    OutOfRangeError,
    ValidationError,
)
from .linalg import binary_entropy, max_abs
from .recovery import CERTIFICATE_TOL, certify_freezing
from .states import (
    DensityMatrix,
    MixedFamilySpec,
    bit_index,
    bromley_spec,
    canonical_bitstrings,
    complement,
    mixed_family,
    phi_state,
)

MAX_DIM = 64
MAX_GRID_POINTS = 10_000
DEFAULT_GRID_POINTS = 11
FREEZING_TOL = 1e-8
MEASURE_NAMES = ("c_l1", "c_rel_ent")


def default_heterogeneous_grids(
    num_qubits: int, points: int = 6
) -> tuple[tuple[float, ...], ...]:
    """Per-qubit grids in [0, 1], deliberately distinct between qubits."""
    if points < 2:
        raise ValidationError("need at least two grid points")
    return tuple(
        tuple(np.linspace(0.03 * i, 1.0 - 0.02 * i, points))
        for i in range(num_qubits)
    )


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: an initial state and a per-qubit channel family with grids.

    factors are CHANNEL_FACTORIES kind names, one per qubit. With
    tie_parameters=True a single grid drives all factors with a shared
    parameter; otherwise each factor gets its own grid and the sweep runs
    over the cartesian product.
    """

    state: DensityMatrix
    factors: tuple[str, ...]
    grids: tuple[tuple[float, ...], ...]
    tie_parameters: bool = False
    measures: tuple[str, ...] = MEASURE_NAMES
    freezing_tol: float = FREEZING_TOL
    certificate_tol: float = CERTIFICATE_TOL
    state_label: str = ""
    seed: int | None = None

    def __post_init__(self):
        if not self.factors:
            raise ValidationError("need at least one channel factor")
        for kind in self.factors:
            if kind not in CHANNEL_FACTORIES:
                raise ValidationError(f"unknown channel kind {kind!r}")
        dim = 2 ** len(self.factors)
        if dim > MAX_DIM:
            raise DimensionTooLargeError(
                f"dimension {dim} exceeds the supported maximum {MAX_DIM}"
            )
        if self.state.dim != dim:
            raise ValidationError(
                f"state dim {self.state.dim} does not match "
                f"{len(self.factors)} qubit factors"
            )
        expected = 1 if self.tie_parameters else len(self.factors)
        if len(self.grids) != expected:
            raise ValidationError(
                f"expected {expected} grid(s), got {len(self.grids)}"
            )
        total = 1
        for grid in self.grids:
            if not grid:
                raise ValidationError("grids must not be empty")
            for value in grid:
                if not 0.0 <= value <= 1.0:
                    raise OutOfRangeError(f"grid value {value} outside [0, 1]")
            total *= len(grid)
        if total > MAX_GRID_POINTS:
            raise ValidationError(
                f"grid has {total} points, maximum is {MAX_GRID_POINTS}"
            )
        if not self.measures:
            raise ValidationError("need at least one measure to record")
        for name in self.measures:
            if name not in MEASURE_NAMES:
                raise ValidationError(f"unknown measure {name!r}")
        object.__setattr__(self, "grids", tuple(tuple(g) for g in self.grids))
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "measures", tuple(self.measures))

    @property
    def parameter_names(self) -> tuple[str, ...]:
        if self.tie_parameters:
            return ("q",)
        return tuple(f"q{i + 1}" for i in range(len(self.factors)))

    def grid_points(self):
        yield from itertools.product(*self.grids)

    def channel_at(self, point: tuple[float, ...]) -> KrausChannel:
        params = point * len(self.factors) if self.tie_parameters else point
        return local_channel(list(zip(self.factors, params)))


@dataclass(frozen=True)
class TrajectoryRow:
    params: tuple[float, ...]
    c_l1: float
    c_rel_ent: float
    verdict: str
    cr_deviation: float
    recovery_residual_state: float
    recovery_residual_diag: float

    def measure(self, name: str) -> float:
        if name == "c_l1":
            return self.c_l1
        if name == "c_rel_ent":
            return self.c_rel_ent
        raise ValidationError(f"unknown measure {name!r}")


@dataclass(frozen=True)
class TrajectoryTable:
    parameter_names: tuple[str, ...]
    measures: tuple[str, ...]
    rows: tuple[TrajectoryRow, ...]
    metadata: tuple[tuple[str, str], ...] = ()

    def to_csv(self) -> str:
        """Metadata as leading # comments, then header and one row per point."""
        lines = [f"# {key} = {value}" for key, value in self.metadata]
        header = list(self.parameter_names) + list(self.measures) + [
            "verdict",
            "cr_deviation",
            "recovery_residual_state",
            "recovery_residual_diag",
        ]
        lines.append(",".join(header))
        for row in self.rows:
            cells = [_fmt(v) for v in row.params]
            cells += [_fmt(row.measure(name)) for name in self.measures]
            cells.append(row.verdict)
            cells += [
                _fmt(row.cr_deviation),
                _fmt(row.recovery_residual_state),
                _fmt(row.recovery_residual_diag),
            ]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _evaluate_grid(spec: SweepSpec):
    """Yield (point, evolved state, certificate, table row) per grid point."""
    for point in spec.grid_points():
        channel = spec.channel_at(point)
        rho_t = apply_channel(channel, spec.state)
        certificate = certify_freezing(
            channel, spec.state, tol=spec.certificate_tol
        )
        row = TrajectoryRow(
            params=tuple(float(v) for v in point),
            c_l1=c_l1(rho_t),
            c_rel_ent=c_rel_ent(rho_t),
            verdict=certificate.verdict,
            cr_deviation=certificate.cr_deviation,
            recovery_residual_state=certificate.recovery_residual_state,
            recovery_residual_diag=certificate.recovery_residual_diag,
        )
        yield point, rho_t, certificate, row


def _metadata(spec: SweepSpec, freezing_tol: float | None = None):
    return (
        ("state", spec.state_label or f"dim={spec.state.dim}"),
        ("channel", " x ".join(spec.factors)),
        ("tie_parameters", "true" if spec.tie_parameters else "false"),
        ("freezing_tol", _fmt(spec.freezing_tol if freezing_tol is None else freezing_tol)),
        ("certificate_tol", _fmt(spec.certificate_tol)),
        ("seed", "none" if spec.seed is None else str(spec.seed)),
    )


def _table(spec: SweepSpec, rows, freezing_tol: float | None = None) -> TrajectoryTable:
    return TrajectoryTable(
        parameter_names=spec.parameter_names,
        measures=spec.measures,
        rows=tuple(rows),
        metadata=_metadata(spec, freezing_tol),
    )


def run_sweep(spec: SweepSpec) -> TrajectoryTable:
    """Evaluate measures and the freezing certificate at every grid point."""
    return _table(spec, (row for _, _, _, row in _evaluate_grid(spec)))


@dataclass(frozen=True)
class FreezingSummary:
    frozen: bool
    max_deviation: float


def detect_freezing(
    table: TrajectoryTable, tol: float = FREEZING_TOL
) -> dict[str, FreezingSummary]:
    """Per-measure max deviation from the first grid point."""
    if not table.rows:
        raise ValidationError("table has no rows")
    result = {}
    for name in table.measures:
        first = table.rows[0].measure(name)
        deviation = max(abs(row.measure(name) - first) for row in table.rows)
        result[name] = FreezingSummary(frozen=deviation <= tol, max_deviation=deviation)
    return result


def bitflip_transfer_weights(bits: str, qs) -> dict[str, float]:
    """Mixture weights over canonical bit strings after local bit flips.

    For each canonical target string m, the weight is the probability that
    the flip pattern maps |bits> to |m> or to its complement:
    prod_i(q_i + (1-2 q_i) [m_i == bits_i]) plus the complementary product.
    """
    n = len(bits)
    if len(qs) != n:
        raise ValidationError("need one flip probability per qubit")
    weights = {}
    for target in canonical_bitstrings(n):
        keep = 1.0
        flip = 1.0
        for ti, bi, q in zip(target, bits, qs):
            same = 1.0 if ti == bi else 0.0
            keep *= q + (1.0 - 2.0 * q) * same
            flip *= 1.0 - q - (1.0 - 2.0 * q) * same
        weights[target] = keep + flip
    return weights


def _phi_mixture_matrix(weights: dict[str, float], sign: int, dim: int) -> np.ndarray:
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for bits, w in weights.items():
        i, j = bit_index(bits), bit_index(complement(bits))
        mat[i, i] += 0.5 * w
        mat[j, j] += 0.5 * w
        mat[i, j] += 0.5 * w * sign
        mat[j, i] += 0.5 * w * sign
    return mat


@dataclass(frozen=True)
class FamilyReport:
    """Summary of one family reproduction run."""

    name: str
    expected_c_rel_ent: float
    max_cr_deviation: float
    max_cl1_deviation: float
    max_transfer_residual: float
    all_frozen: bool
    table: TrajectoryTable

    @property
    def passed(self) -> bool:
        return self.all_frozen


def _check_family_point(label, point, certificate, cr_error, tol):
    if cr_error > tol:
        raise NumericalInconsistencyError(
            f"{label}: c_rel_ent off by {cr_error:.3e} at grid point {point}"
        )
    if not certificate.frozen:
        raise NumericalInconsistencyError(
            f"{label}: certificate NotFrozen at grid point {point} "
            f"({','.join(certificate.failed_checks)})"
        )


def reproduce_pure_family(
    num_qubits: int,
    bits: str,
    sign,
    grids: tuple[tuple[float, ...], ...] | None = None,
    *,
    tol: float = 1e-9,
    certificate_tol: float = CERTIFICATE_TOL,
    transfer_tol: float = 1e-10,
) -> FamilyReport:
    """Check that both panel measures stay at 1 for (|l> +/- |l~>)/sqrt(2)
    under heterogeneous local bit flips, with Frozen certificates throughout,
    and cross-check the evolved state against its analytic mixture form.
    """
    if num_qubits > 6:
        raise DimensionTooLargeError("at most 6 qubits supported")
    if len(bits) != num_qubits:
        raise ValidationError("bit string length must match the qubit count")
    sign_value = 1 if str(sign) in ("1", "+", "+1") else -1
    state = phi_state(bits, sign_value)
    if grids is None:
        grids = default_heterogeneous_grids(num_qubits)
    label = f"phi N={num_qubits} l={bits} sign={'+' if sign_value > 0 else '-'}"
    spec = SweepSpec(
        state=state,
        factors=("bitflip",) * num_qubits,
        grids=grids,
        certificate_tol=certificate_tol,
        state_label=label,
    )
    rows = []
    max_cr = 0.0
    max_l1 = 0.0
    max_transfer = 0.0
    all_frozen = True
    for point, rho_t, certificate, row in _evaluate_grid(spec):
        max_cr = max(max_cr, abs(row.c_rel_ent - 1.0))
        max_l1 = max(max_l1, abs(row.c_l1 - 1.0))
        all_frozen = all_frozen and certificate.frozen
        _check_family_point(label, point, certificate, abs(row.c_rel_ent - 1.0), tol)
        if abs(row.c_l1 - 1.0) > tol:
            raise NumericalInconsistencyError(
                f"{label}: c_l1 off by {abs(row.c_l1 - 1.0):.3e} "
                f"at grid point {point}"
            )
        analytic = _phi_mixture_matrix(
            bitflip_transfer_weights(bits, point), sign_value, state.dim
        )
        transfer_residual = max_abs(rho_t.matrix - analytic)
        max_transfer = max(max_transfer, transfer_residual)
        if transfer_residual > transfer_tol:
            raise NumericalInconsistencyError(
                f"{label}: analytic mixture residual {transfer_residual:.3e} "
                f"at grid point {point}"
            )
        rows.append(row)
    return FamilyReport(
        name=label,
        expected_c_rel_ent=1.0,
        max_cr_deviation=max_cr,
        max_cl1_deviation=max_l1,
        max_transfer_residual=max_transfer,
        all_frozen=all_frozen,
        table=_table(spec, rows, tol),
    )


def reproduce_mixed_family(
    num_qubits: int,
    p: float,
    weights: dict[str, float],
    grids: tuple[tuple[float, ...], ...] | None = None,
    *,
    tol: float = 1e-9,
    certificate_tol: float = CERTIFICATE_TOL,
    seed: int | None = None,
) -> FamilyReport:
    """Check that c_rel_ent stays at 1 - H(p) for the +/- mixture family
    under heterogeneous local bit flips, with Frozen certificates."""
    if num_qubits > 6:
        raise DimensionTooLargeError("at most 6 qubits supported")
    spec_state = MixedFamilySpec(p=p, weights=weights)
    if spec_state.num_qubits != num_qubits:
        raise ValidationError("weights do not match the qubit count")
    state = mixed_family(spec_state)
    expected = 1.0 - binary_entropy(p)
    if grids is None:
        grids = default_heterogeneous_grids(num_qubits)
    label = f"mixed N={num_qubits} p={p:g}"
    spec = SweepSpec(
        state=state,
        factors=("bitflip",) * num_qubits,
        grids=grids,
        certificate_tol=certificate_tol,
        state_label=label,
        seed=seed,
    )
    return _reproduce_constant(spec, label, expected, tol)


def bromley_report(
    c1: float,
    c3: float,
    *,
    num_qubits: int = 2,
    grid_points: int = DEFAULT_GRID_POINTS,
    tol: float = 1e-9,
    certificate_tol: float = CERTIFICATE_TOL,
) -> FamilyReport:
    """The even-N special case under identical local bit flips (tied q)."""
    spec_state = bromley_spec(num_qubits, c1, c3)
    state = mixed_family(spec_state)
    expected = 1.0 - binary_entropy(spec_state.p)
    label = f"bromley N={num_qubits} c1={c1:g} c3={c3:g}"
    spec = SweepSpec(
        state=state,
        factors=("bitflip",) * num_qubits,
        grids=(tuple(np.linspace(0.0, 1.0, grid_points)),),
        tie_parameters=True,
        certificate_tol=certificate_tol,
        state_label=label,
    )
    return _reproduce_constant(spec, label, expected, tol)


def _reproduce_constant(
    spec: SweepSpec, label: str, expected: float, tol: float
) -> FamilyReport:
    """Run a sweep asserting c_rel_ent == expected and Frozen everywhere."""
    base_l1 = c_l1(spec.state)
    rows = []
    max_cr = 0.0
    max_l1 = 0.0
    all_frozen = True
    for point, _, certificate, row in _evaluate_grid(spec):
        max_cr = max(max_cr, abs(row.c_rel_ent - expected))
        max_l1 = max(max_l1, abs(row.c_l1 - base_l1))
        all_frozen = all_frozen and certificate.frozen
        _check_family_point(
            label, point, certificate, abs(row.c_rel_ent - expected), tol
        )
        rows.append(row)
    return FamilyReport(
        name=label,
        expected_c_rel_ent=expected,
        max_cr_deviation=max_cr,
        max_cl1_deviation=max_l1,
        max_transfer_residual=0.0,
        all_frozen=all_frozen,
        table=_table(spec, rows, tol),
    )
