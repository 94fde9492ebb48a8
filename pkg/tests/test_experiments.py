import numpy as np
import pytest

from cohfreeze import (
    DimensionTooLargeError,
    MixedFamilySpec,
    NumericalInconsistencyError,
    OutOfRangeError,
    SweepSpec,
    TrajectoryRow,
    TrajectoryTable,
    ValidationError,
    apply_channel,
    basis_state,
    bitflip_transfer_weights,
    bromley_report,
    c_l1,
    c_rel_ent,
    canonical_bitstrings,
    default_heterogeneous_grids,
    detect_freezing,
    from_pure,
    local_channel,
    mixed_family,
    phi_state,
    reproduce_mixed_family,
    reproduce_pure_family,
    run_sweep,
)

from oracles import bitflip_weight, brute_apply, phi_vector, shannon_bits


def bell():
    return phi_state("00", "+")


def make_spec(**overrides):
    defaults = dict(
        state=bell(),
        factors=("bitflip", "bitflip"),
        grids=((0.0, 0.1, 0.2, 0.3, 0.4, 0.5), (0.0, 0.25, 0.5)),
        state_label="phi N=2 l=00 sign=+",
    )
    defaults.update(overrides)
    return SweepSpec(**defaults)


class TestSweepSpec:
    def test_rejects_empty_grid(self):
        with pytest.raises(ValidationError):
            make_spec(grids=((), (0.1,)))

    def test_rejects_out_of_range_values(self):
        with pytest.raises(OutOfRangeError):
            make_spec(grids=((0.0, 1.5), (0.1,)))

    def test_rejects_oversized_product(self):
        grid = tuple(np.linspace(0, 1, 101))
        with pytest.raises(ValidationError, match="points"):
            make_spec(grids=(grid, grid))

    def test_rejects_dimension_above_max(self):
        with pytest.raises(DimensionTooLargeError):
            SweepSpec(
                state=basis_state(128, 0),
                factors=("bitflip",) * 7,
                grids=((0.0,),) * 7,
            )

    def test_rejects_state_channel_mismatch(self):
        with pytest.raises(ValidationError):
            make_spec(state=phi_state("000", "+"))

    def test_tied_parameters_use_single_grid(self):
        spec = make_spec(grids=((0.0, 0.5),), tie_parameters=True)
        assert spec.parameter_names == ("q",)
        points = list(spec.grid_points())
        assert points == [(0.0,), (0.5,)]
        channel = spec.channel_at((0.5,))
        assert channel.dim == 4


class TestRunSweep:
    def test_bell_bit_flip_sweep_is_constant_one(self):
        table = run_sweep(make_spec())
        assert len(table.rows) == 18
        for row in table.rows:
            assert row.c_rel_ent == pytest.approx(1.0, abs=1e-12)
            assert row.c_l1 == pytest.approx(1.0, abs=1e-12)
            assert row.verdict == "Frozen"

    def test_mixed_family_sweep_constant(self):
        spec_state = MixedFamilySpec(p=0.75, weights={"00": 0.5, "01": 0.5})
        state = mixed_family(spec_state)
        table = run_sweep(
            SweepSpec(
                state=state,
                factors=("bitflip", "bitflip"),
                grids=((0.0, 0.4, 0.9), (0.2, 0.6)),
            )
        )
        expected = 1.0 - shannon_bits([0.75, 0.25])
        assert expected == pytest.approx(0.18872187554086717, abs=1e-15)
        for row in table.rows:
            assert row.c_rel_ent == pytest.approx(expected, abs=1e-12)

    def test_phase_damping_decreases_coherence(self):
        plus = from_pure(np.array([1.0, 1.0]) / np.sqrt(2))
        grid = (0.0, 0.2, 0.4, 0.6, 0.8)
        table = run_sweep(
            SweepSpec(state=plus, factors=("phasedamping",), grids=(grid,))
        )
        values = [row.c_rel_ent for row in table.rows]
        assert all(b < a - 1e-6 for a, b in zip(values, values[1:]))
        for row in table.rows[1:]:
            assert row.verdict == "NotFrozen"

    def test_rows_follow_grid_order(self):
        table = run_sweep(make_spec())
        points = [row.params for row in table.rows]
        assert points == sorted(points)

    def test_certificate_panel_consistency(self):
        spec = make_spec()
        base_l1 = c_l1(spec.state)
        table = run_sweep(spec)
        for row in table.rows:
            if row.verdict == "Frozen":
                assert abs(row.c_l1 - base_l1) <= 1e-8
                assert row.cr_deviation <= 1e-8


class TestDetectFreezing:
    def test_constant_column(self):
        table = run_sweep(make_spec())
        summary = detect_freezing(table, tol=1e-8)
        assert summary["c_rel_ent"].frozen
        assert summary["c_rel_ent"].max_deviation <= 1e-10

    def test_single_excursion(self):
        rows = [
            TrajectoryRow((0.0,), 1.0, 1.0, "Frozen", 0.0, 0.0, 0.0),
            TrajectoryRow((0.5,), 1.0, 1.0 + 1e-3, "Frozen", 0.0, 0.0, 0.0),
        ]
        table = TrajectoryTable(("q",), ("c_l1", "c_rel_ent"), tuple(rows))
        summary = detect_freezing(table, tol=1e-8)
        assert not summary["c_rel_ent"].frozen
        assert summary["c_rel_ent"].max_deviation == pytest.approx(1e-3)
        assert summary["c_l1"].frozen

    def test_empty_table_rejected(self):
        table = TrajectoryTable(("q",), ("c_l1",), ())
        with pytest.raises(ValidationError):
            detect_freezing(table)


class TestTransferWeights:
    def test_matches_oracle(self):
        qs = (0.2, 0.7, 0.4)
        weights = bitflip_transfer_weights("010", qs)
        for target in canonical_bitstrings(3):
            assert weights[target] == pytest.approx(
                bitflip_weight(target, "010", qs), abs=1e-15
            )

    def test_normalized(self):
        weights = bitflip_transfer_weights("00", (0.3, 0.8))
        assert sum(weights.values()) == pytest.approx(1.0, abs=1e-12)

    def test_analytic_state_matches_brute_force(self):
        qs = (0.15, 0.6)
        weights = bitflip_transfer_weights("01", qs)
        analytic = np.zeros((4, 4), dtype=complex)
        for bits, w in weights.items():
            psi = phi_vector(bits, -1)
            analytic += w * np.outer(psi, psi.conj())
        channel = local_channel([("bitflip", qs[0]), ("bitflip", qs[1])])
        brute = apply_channel(channel, phi_state("01", "-")).matrix
        np.testing.assert_allclose(brute, analytic, atol=1e-10)


class TestReproducePureFamily:
    @pytest.mark.parametrize("bits", ["00", "01"])
    @pytest.mark.parametrize("sign", ["+", "-"])
    def test_all_bell_states(self, bits, sign):
        report = reproduce_pure_family(2, bits, sign)
        assert report.passed
        assert report.max_cr_deviation <= 1e-9
        assert report.max_cl1_deviation <= 1e-9
        assert report.max_transfer_residual <= 1e-10

    def test_ghz(self):
        report = reproduce_pure_family(3, "000", "+")
        assert report.passed
        assert report.max_cr_deviation <= 1e-9

    def test_four_qubit_case(self):
        grids = default_heterogeneous_grids(4, points=3)
        report = reproduce_pure_family(4, "0101", "-", grids)
        assert report.passed

    def test_assertion_failures_name_grid_point(self):
        with pytest.raises(NumericalInconsistencyError, match="grid point"):
            reproduce_pure_family(2, "00", "+", tol=1e-18)

    def test_rejects_mismatched_bits(self):
        with pytest.raises(ValidationError):
            reproduce_pure_family(3, "00", "+")


class TestReproduceMixedFamily:
    def test_half_p_trivially_frozen(self):
        report = reproduce_mixed_family(2, 0.5, {"00": 0.4, "01": 0.6})
        assert report.passed
        assert report.expected_c_rel_ent == 0.0
        assert report.max_cr_deviation <= 1e-12

    def test_random_weights_seed_11(self):
        rng = np.random.default_rng(11)
        raw = rng.random(2)
        raw /= raw.sum()
        weights = dict(zip(canonical_bitstrings(2), raw.tolist()))
        report = reproduce_mixed_family(2, 0.9, weights, seed=11)
        assert report.passed
        assert report.expected_c_rel_ent == pytest.approx(
            0.5310044064107189, abs=1e-12
        )

    def test_three_qubits(self):
        weights = {"000": 0.1, "001": 0.2, "010": 0.3, "011": 0.4}
        report = reproduce_mixed_family(3, 0.67, weights)
        assert report.passed
        expected = 1.0 - shannon_bits([0.67, 0.33])
        assert report.expected_c_rel_ent == pytest.approx(expected, abs=1e-12)


class TestBromleyPreset:
    @pytest.mark.parametrize("c1", [-0.8, 0.0, 0.6])
    @pytest.mark.parametrize("c3", [-0.5, 0.0, 0.9])
    def test_grid_of_presets(self, c1, c3):
        report = bromley_report(c1, c3)
        assert report.passed
        assert len(report.table.rows) == 11
        assert report.max_cr_deviation <= 1e-9
        assert report.max_cl1_deviation <= 1e-8

    def test_tied_parameter_column(self):
        report = bromley_report(0.6, 0.2, grid_points=5)
        assert report.table.parameter_names == ("q",)
        assert [row.params for row in report.table.rows] == [
            (0.0,), (0.25,), (0.5,), (0.75,), (1.0,)
        ]


class TestNegativeControls:
    def test_amplitude_damping_on_plus_strictly_decreases(self):
        plus = from_pure(np.array([1.0, 1.0]) / np.sqrt(2))
        grid = tuple(np.round(np.arange(0.1, 1.0, 0.1), 10))
        table = run_sweep(
            SweepSpec(state=plus, factors=("amplitudedamping",), grids=(grid,))
        )
        values = [row.c_rel_ent for row in table.rows]
        for earlier, later in zip(values, values[1:]):
            assert later <= earlier - 1e-6
        summary = detect_freezing(table, tol=1e-8)
        assert not summary["c_rel_ent"].frozen

    def test_phase_rotated_superposition_decays_under_bit_flips(self):
        # (|00> + i|10>)/sqrt(2): the first-qubit coherence sits on the
        # imaginary axis, which local bit flips wash out
        psi = np.zeros(4, dtype=complex)
        psi[0] = 1.0 / np.sqrt(2)
        psi[2] = 1j / np.sqrt(2)
        state = from_pure(psi)
        table = run_sweep(
            SweepSpec(
                state=state,
                factors=("bitflip", "bitflip"),
                grids=((0.0, 0.1, 0.25, 0.4, 0.5), (0.0, 0.3)),
            )
        )
        summary = detect_freezing(table, tol=1e-8)
        assert not summary["c_rel_ent"].frozen
        assert summary["c_rel_ent"].max_deviation > 0.1
        channel = local_channel([("bitflip", 0.25), ("bitflip", 0.3)])
        evolved = apply_channel(channel, state)
        brute = brute_apply(channel.operators, state.matrix)
        np.testing.assert_allclose(evolved.matrix, brute, atol=1e-14)
        assert c_rel_ent(evolved) < 1.0 - 1e-3

    def test_real_plus_embedding_is_actually_frozen(self):
        # (|00> + |10>)/sqrt(2) is a bit-flip fixed point on the first qubit,
        # so the whole trajectory keeps c_rel_ent = 1
        psi = np.zeros(4, dtype=complex)
        psi[0] = psi[2] = 1.0 / np.sqrt(2)
        state = from_pure(psi)
        table = run_sweep(
            SweepSpec(
                state=state,
                factors=("bitflip", "bitflip"),
                grids=((0.0, 0.2, 0.5), (0.1, 0.9)),
            )
        )
        for row in table.rows:
            assert row.c_rel_ent == pytest.approx(1.0, abs=1e-12)
            assert row.verdict == "Frozen"


class TestCsvOutput:
    def test_metadata_header_and_precision(self):
        table = run_sweep(make_spec(seed=123))
        csv = table.to_csv()
        lines = csv.strip().splitlines()
        comments = [line for line in lines if line.startswith("#")]
        assert "# state = phi N=2 l=00 sign=+" in comments
        assert "# seed = 123" in comments
        header = next(line for line in lines if not line.startswith("#"))
        assert header.split(",")[:4] == ["q1", "q2", "c_l1", "c_rel_ent"]
        # 12 significant digits
        assert "0.33333333333" not in csv  # no truncated thirds in this grid
        row = lines[len(comments) + 1]
        assert len(row.split(",")) == len(header.split(","))

    def test_deterministic_serialization(self):
        a = run_sweep(make_spec()).to_csv()
        b = run_sweep(make_spec()).to_csv()
        assert a == b

    def test_twelve_digit_formatting(self):
        row = TrajectoryRow((1 / 3,), 1 / 7, 2 / 3, "Frozen", 0.0, 0.0, 0.0)
        table = TrajectoryTable(("q",), ("c_l1", "c_rel_ent"), (row,))
        body = table.to_csv().strip().splitlines()[-1]
        assert body.startswith("0.333333333333,0.142857142857,0.666666666667")
