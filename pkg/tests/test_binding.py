import numpy as np

from qbcommit import linalg
from qbcommit.binding import (
    alice_cheat_prob,
    min_over_states,
    minimax_cheat,
    payoff_matrix_sample,
)
from qbcommit.families import (
    concealing_pair,
    dephasing_protocol,
    identity_protocol,
    phase_flip_pair,
    random_protocol,
)
from qbcommit.protocol import KrausFamily, ProtocolSpec


def loop_payoff(committed_ops, claimed_ops, cheat, phi, zero_tol=1e-14):
    """Plain-python reference: sum over kept branches of |<V E0 phi, E1 phi>|^2 / |E1 phi|^2."""
    m = len(committed_ops)
    total = 0.0
    for j in range(m):
        eff = sum(cheat[j, l] * committed_ops[l] for l in range(m))
        u = eff @ phi
        w = claimed_ops[j] @ phi
        d = float(np.real(np.vdot(w, w)))
        if d <= zero_tol:
            continue
        total += abs(np.vdot(u, w)) ** 2 / d
    return total


def test_alice_identity_protocol_always_wins():
    spec = identity_protocol(2)
    v = np.eye(1, dtype=complex)
    for i in range(5):
        phi = linalg.random_state(2, linalg.spawn_rng(40, i))
        assert abs(alice_cheat_prob(spec, v, phi) - 1.0) < 1e-12


def test_alice_dephasing_hand_values():
    spec = dephasing_protocol()
    eye = np.eye(2, dtype=complex)
    zero = np.array([1.0, 0.0])
    plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert abs(alice_cheat_prob(spec, eye, zero) - 0.5) < 1e-12
    assert abs(alice_cheat_prob(spec, eye, plus) - 0.25) < 1e-12
    # Committing to the measured bit and claiming the plain one: the kept
    # branch contributes |<+|0>/sqrt(2)|^2 = 1/4.
    assert abs(alice_cheat_prob(spec, eye, zero, direction="10") - 0.25) < 1e-12


def test_alice_matches_loop_reference():
    count = 0
    for i in range(40):
        rng = linalg.spawn_rng(41, i)
        din = int(rng.integers(2, 4))
        dout = int(rng.integers(2, 4))
        m = int(rng.integers(2, 4))
        spec = random_protocol(din, dout, m, seed=rng)
        v = linalg.random_unitary(spec.cardinality, rng)
        phi = linalg.random_state(din, rng)
        got = alice_cheat_prob(spec, v, phi)
        want = loop_payoff(spec.bit0.ops, spec.bit1.ops, v, phi)
        assert abs(got - want) < 1e-12
        count += 1
    assert count == 40


def test_alice_payoff_within_unit_interval():
    for i in range(20):
        rng = linalg.spawn_rng(42, i)
        spec = random_protocol(2, 3, 2, seed=rng)
        v = linalg.random_unitary(2, rng)
        phi = linalg.random_state(2, rng)
        p = alice_cheat_prob(spec, v, phi)
        assert -1e-12 <= p <= 1.0 + 1e-9


def test_alice_rejects_nonunitary_cheat():
    spec = dephasing_protocol()
    try:
        alice_cheat_prob(spec, np.ones((2, 2)), np.array([1.0, 0.0]))
    except ValueError:
        pass
    else:
        raise AssertionError("non-unitary cheat should be rejected")


def test_permutation_reindexing_equivariance():
    # Relabeling committed outcomes by P while compensating the cheat with
    # P^T leaves every payoff unchanged.
    for i in range(6):
        rng = linalg.spawn_rng(43, i)
        m = int(rng.integers(2, 5))
        spec = random_protocol(2, 2, m, seed=rng)
        perm = rng.permutation(m)
        pmat = np.zeros((m, m), dtype=complex)
        for row, col in enumerate(perm):
            pmat[row, col] = 1.0
        permuted = ProtocolSpec(
            label="permuted",
            bit0=KrausFamily.from_ops([spec.bit0.ops[k] for k in perm]),
            bit1=spec.bit1,
        )
        v = linalg.random_unitary(m, rng)
        phi = linalg.random_state(2, rng)
        base = alice_cheat_prob(spec, v, phi)
        moved = alice_cheat_prob(permuted, v @ pmat.T, phi)
        assert abs(base - moved) < 1e-12


def test_min_over_states_dephasing_quarter():
    spec = dephasing_protocol()
    res = min_over_states(spec, np.eye(2, dtype=complex), restarts=8, seed=0)
    assert abs(res.value - 0.25) < 1e-6


def test_min_over_states_matches_bloch_grid():
    spec = dephasing_protocol()
    eye = np.eye(2, dtype=complex)
    thetas = np.linspace(0.0, np.pi, 181)
    lams = np.linspace(0.0, 2.0 * np.pi, 361)
    grid_min = np.inf
    for theta in thetas:
        c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
        for lam in lams:
            phi = np.array([c, np.exp(1j * lam) * s])
            grid_min = min(grid_min, alice_cheat_prob(spec, eye, phi))
    res = min_over_states(spec, eye, restarts=8, seed=0)
    assert abs(grid_min - 0.25) < 1e-12
    assert abs(res.value - grid_min) < 1e-6


def test_minimax_identity_protocol():
    rep = minimax_cheat(identity_protocol(2), include_swapped=False)
    assert abs(rep.minimax_estimate - 1.0) < 1e-12
    assert abs(rep.payoff_at_saddle - 1.0) < 1e-12


def test_minimax_phase_flip_unbindable_commitment_fails():
    # Committing with {I} and claiming {Z}: any fixed phase cheat loses on
    # some state, and the optimum is flat zero.
    rep = minimax_cheat(
        phase_flip_pair(),
        outer_restarts=4,
        outer_iters=80,
        inner_restarts=8,
        include_swapped=False,
    )
    assert rep.minimax_estimate <= 1e-9
    assert rep.payoff_at_saddle <= 1e-9


def test_minimax_dephasing_quarter():
    rep = minimax_cheat(
        dephasing_protocol(),
        outer_restarts=4,
        outer_iters=60,
        inner_restarts=8,
        include_swapped=False,
    )
    assert abs(rep.minimax_estimate - 0.25) < 1e-4
    assert abs(rep.payoff_at_saddle - rep.minimax_estimate) < 1e-6
    assert rep.direction == "01"
    assert rep.swapped is None


def test_minimax_concealing_pair_near_one():
    spec, relating = concealing_pair(seed=11, dim=2, cardinality=3)
    rep = minimax_cheat(spec, include_swapped=False, seed=0)
    assert rep.minimax_estimate >= 0.999
    assert abs(rep.minimax_estimate - rep.payoff_at_saddle) < 1e-9
    # Procrustes start plus the cap check should have ended the scan early.
    assert any("payoff within" in note for note in rep.solver_trace.notes)
    assert rep.best_cheat_unitary.shape == (3, 3)


def test_minimax_swapped_report():
    rep = minimax_cheat(
        dephasing_protocol(),
        outer_restarts=2,
        outer_iters=40,
        inner_restarts=4,
        include_swapped=True,
    )
    assert rep.swapped is not None
    assert rep.swapped.direction == "10"
    assert rep.swapped.swapped is None
    assert 0.0 <= rep.swapped.minimax_estimate <= 1.0 + 1e-9


def test_payoff_matrix_sample_shape_and_values():
    spec = dephasing_protocol()
    eye = np.eye(2, dtype=complex)
    other = linalg.random_unitary(2, linalg.spawn_rng(44))
    zero = np.array([1.0, 0.0])
    plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
    mat = payoff_matrix_sample(spec, [eye, other], [zero, plus])
    assert mat.shape == (2, 2)
    assert abs(mat[0, 0] - 0.5) < 1e-12
    assert abs(mat[0, 1] - 0.25) < 1e-12
    assert abs(mat[1, 0] - alice_cheat_prob(spec, other, zero)) < 1e-15
