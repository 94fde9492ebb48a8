import numpy as np
import pytest

from cohfreeze import (
    ChannelClass,
    DensityMatrix,
    KrausChannel,
    NotDiagonalError,
    NotIncoherentChannelError,
    NotStrictlyIncoherentError,
    amplitude_damping,
    apply_channel,
    bit_flip,
    certify_freezing,
    classify,
    dephase,
    from_pure,
    identity_channel,
    local_channel,
    petz_recovery,
    phase_flip,
    phi_state,
    random_density,
    random_incoherent_channel,
    random_sio_channel,
    tensor,
)
from cohfreeze.linalg import max_abs

from oracles import brute_apply


def plus_state():
    return from_pure(np.array([1.0, 1.0]) / np.sqrt(2))


def diagonal_state(probs):
    return DensityMatrix(np.diag(np.asarray(probs, dtype=complex)))


class TestPetzRecovery:
    def test_identity_channel_gives_identity_action(self):
        delta0 = diagonal_state([0.3, 0.2, 0.4, 0.1])
        recovery = petz_recovery(identity_channel(4), delta0)
        for seed in range(20):
            rho = random_density(4, 4, seed=seed)
            out = apply_channel(recovery, rho)
            assert max_abs(out.matrix - rho.matrix) <= 1e-9

    def test_bell_round_trip(self):
        bell = phi_state("00", "+")
        channel = local_channel([("bitflip", 0.3), ("bitflip", 0.5)])
        delta0 = dephase(bell)
        recovery = petz_recovery(channel, delta0)
        rho_t = apply_channel(channel, bell)
        recovered = apply_channel(recovery, rho_t)
        assert max_abs(recovered.matrix - bell.matrix) <= 1e-9

    def test_singular_case_by_hand(self):
        delta0 = diagonal_state([1.0, 0.0])
        recovery = petz_recovery(phase_flip(0.2), delta0)
        # two scaled projectors onto |0>, plus the kernel projector |1><1|
        assert len(recovery.operators) == 3
        np.testing.assert_allclose(
            recovery.operators[0], np.sqrt(0.8) * np.diag([1.0, 0.0]), atol=1e-15
        )
        np.testing.assert_allclose(
            recovery.operators[1], np.sqrt(0.2) * np.diag([1.0, 0.0]), atol=1e-15
        )
        np.testing.assert_allclose(
            recovery.operators[2], np.diag([0.0, 1.0]), atol=1e-15
        )
        total = sum(op.conj().T @ op for op in recovery.operators)
        assert max_abs(total - np.eye(2)) <= 1e-12

    def test_requires_diagonal_reference(self):
        with pytest.raises(NotDiagonalError):
            petz_recovery(bit_flip(0.1), plus_state())

    def test_rejects_non_incoherent_channel(self):
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        with pytest.raises(NotIncoherentChannelError):
            petz_recovery(KrausChannel((h,)), diagonal_state([0.5, 0.5]))

    def test_diagonal_recovery_for_random_incoherent_channels(self):
        # this half of the reversal works for any incoherent channel
        for seed in range(25):
            rng = np.random.default_rng(seed)
            dim = int(rng.choice([2, 3, 4]))
            probs = rng.random(dim)
            probs /= probs.sum()
            delta0 = diagonal_state(probs)
            channel = random_incoherent_channel(dim, dim, seed=seed + 1000)
            recovery = petz_recovery(channel, delta0)
            delta_t = apply_channel(channel, delta0)
            recovered = apply_channel(recovery, delta_t)
            assert max_abs(recovered.matrix - delta0.matrix) <= 1e-9

    def test_completeness_with_kernel_projector(self):
        # amplitude damping at full strength empties the excited level
        delta0 = diagonal_state([0.6, 0.4])
        channel = amplitude_damping(1.0)
        recovery = petz_recovery(channel, delta0)
        total = sum(op.conj().T @ op for op in recovery.operators)
        assert max_abs(total - np.eye(2)) <= 1e-12
        delta_t = apply_channel(channel, delta0)
        recovered = apply_channel(recovery, delta_t)
        assert max_abs(recovered.matrix - delta0.matrix) <= 1e-9

    def test_recovery_of_sio_channel_is_sio(self):
        for seed in range(10):
            channel = random_sio_channel(4, 3, seed=seed)
            delta0 = dephase(random_density(4, 4, seed=seed + 77))
            recovery = petz_recovery(channel, delta0)
            assert (
                classify(recovery).channel_class is ChannelClass.STRICTLY_INCOHERENT
            )

    def test_matches_brute_force_application(self):
        bell = phi_state("01", "+")
        channel = tensor([bit_flip(0.2), bit_flip(0.6)])
        delta0 = dephase(bell)
        recovery = petz_recovery(channel, delta0)
        rho_t = apply_channel(channel, bell)
        via_loop = brute_apply(recovery.operators, rho_t.matrix)
        np.testing.assert_allclose(
            apply_channel(recovery, rho_t).matrix, via_loop, atol=1e-13
        )


class TestCertifyFreezing:
    def test_bell_under_bit_flips_is_frozen(self):
        certificate = certify_freezing(
            local_channel([("bitflip", 0.2), ("bitflip", 0.7)]),
            phi_state("00", "+"),
        )
        assert certificate.verdict == "Frozen"
        assert certificate.failed_checks == ()
        assert certificate.cr_deviation <= 1e-10
        assert certificate.recovery_residual_state <= 1e-10
        assert certificate.recovery_incoherent

    def test_amplitude_damping_on_plus_not_frozen(self):
        certificate = certify_freezing(amplitude_damping(0.5), plus_state())
        assert certificate.verdict == "NotFrozen"
        assert "cr_deviation" in certificate.failed_checks
        assert certificate.cr_final < certificate.cr_initial - 1e-3

    def test_incoherent_initial_state_trivially_frozen(self):
        rho = diagonal_state([0.1, 0.2, 0.3, 0.4])
        channel = random_sio_channel(4, 3, seed=5)
        certificate = certify_freezing(channel, rho)
        assert certificate.verdict == "Frozen"
        assert certificate.cr_initial == 0.0
        assert certificate.cr_final <= 1e-9

    def test_refuses_non_sio_channel(self):
        k1 = np.array([[1, 1], [0, 0]], dtype=complex) / np.sqrt(2)
        k2 = np.array([[1, -1], [0, 0]], dtype=complex) / np.sqrt(2)
        io_only = KrausChannel((k1, k2))
        with pytest.raises(NotStrictlyIncoherentError):
            certify_freezing(io_only, plus_state())

    def test_override_reports_instead_of_refusing(self):
        k1 = np.array([[1, 1], [0, 0]], dtype=complex) / np.sqrt(2)
        k2 = np.array([[1, -1], [0, 0]], dtype=complex) / np.sqrt(2)
        io_only = KrausChannel((k1, k2))
        certificate = certify_freezing(
            io_only, plus_state(), enforce_hypothesis=False
        )
        assert certificate.verdict in ("Frozen", "NotFrozen")

    def test_certificate_serialization_round_trip_keys(self):
        certificate = certify_freezing(bit_flip(0.4), plus_state())
        text = certificate.to_text()
        lines = dict(
            line.split(" = ", 1) for line in text.strip().splitlines()
        )
        assert lines["verdict"] == certificate.verdict
        assert float(lines["cr_deviation"]) == pytest.approx(
            certificate.cr_deviation, abs=1e-15
        )
        assert lines["recovery_incoherent"] == "true"

    def test_trace_preservation_of_recovery(self):
        for seed in range(15):
            channel = random_sio_channel(4, 3, seed=seed + 400)
            delta0 = dephase(random_density(4, 4, seed=seed + 500))
            recovery = petz_recovery(channel, delta0)
            total = sum(op.conj().T @ op for op in recovery.operators)
            assert max_abs(total - np.eye(4)) <= 1e-9

    def test_forward_direction(self):
        # essentially zero relative-entropy drift forces a working recovery
        cases = [
            (phi_state("00", "+"), local_channel([("bitflip", 0.15), ("bitflip", 0.4)])),
            (phi_state("01", "-"), local_channel([("bitflip", 0.8), ("bitflip", 0.33)])),
        ]
        for rho0, channel in cases:
            certificate = certify_freezing(channel, rho0)
            assert certificate.cr_deviation <= 1e-10
            assert certificate.recovery_residual_state <= 1e-8

    def test_full_decay_exercises_singular_path(self):
        # both qubits relax completely; the evolved reference is rank one
        bell = phi_state("00", "+")
        channel = tensor([amplitude_damping(1.0), amplitude_damping(1.0)])
        certificate = certify_freezing(channel, bell)
        assert certificate.verdict == "NotFrozen"
        assert certificate.cr_final == 0.0
        # diagonal recovery still works exactly on the evolved reference
        assert certificate.recovery_residual_diag <= 1e-9

    def test_converse_direction(self):
        # a successful round trip pins both panel measures
        for seed in (3, 7):
            rho0 = phi_state("00", "-")
            channel = local_channel(
                [("bitflip", 0.1 * (seed + 1)), ("bitflip", 0.05 * seed)]
            )
            certificate = certify_freezing(channel, rho0)
            if certificate.recovery_residual_state <= 1e-10:
                assert certificate.cr_deviation <= 1e-8
                assert certificate.c_l1_deviation <= 1e-8
