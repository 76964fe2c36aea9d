import json
from fractions import Fraction

import numpy as np
import pytest

from invforge import (
    DensityMatrix,
    KrausChannel,
    PurificationError,
    ResourceLimitError,
    ShapeMismatchError,
    StateVector,
    SystemShape,
    apply_local_factors,
    apply_local_unitary,
    channel_from_dict,
    channel_to_dict,
    choi_state,
    density_from_dict,
    density_to_dict,
    partial_trace,
    purify,
    random_local_unitary,
    random_state,
    standard_state,
    state_from_dict,
    state_to_dict,
    tensor_power,
)
from invforge.scalar import QQi

from oracles import numpy_reduced_density


PAULIS = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def exact_entries(state):
    return {i: a for i, a in enumerate(state.amplitudes) if a}


# --- standard states ---------------------------------------------------------


def test_standard_states():
    ghz = standard_state("ghz", (2, 2, 2))
    assert exact_entries(ghz) == {0: QQi(1), 7: QQi(1)}
    w = standard_state("w", (2, 2, 2))
    assert exact_entries(w) == {1: QQi(1), 2: QQi(1), 4: QQi(1)}
    prod = standard_state("product", (2, 2))
    assert exact_entries(prod) == {0: QQi(1)}
    basis = standard_state("basis", (2, 3), index=4)
    assert exact_entries(basis) == {4: QQi(1)}
    assert standard_state("bell", (2, 2)).norm_sq() == QQi(2)
    with pytest.raises(ValueError):
        standard_state("w", (2, 3))
    with pytest.raises(ValueError):
        standard_state("ghz", (2,))


# --- tensor powers -----------------------------------------------------------


def test_tensor_power_identity():
    bell = standard_state("bell", (2, 2))
    assert tensor_power(bell, 1) is bell


def test_tensor_power_bell_pair():
    bell = standard_state("bell", (2, 2))
    doubled = tensor_power(bell, 2)
    assert doubled.shape.dims == (4, 4)
    assert exact_entries(doubled) == {0: QQi(1), 5: QQi(1), 10: QQi(1), 15: QQi(1)}


def test_tensor_power_norm_multiplicativity():
    rng = np.random.default_rng(0)
    shape = SystemShape((2, 2))
    amps = [QQi(Fraction(int(a), 3), Fraction(int(b), 2)) for a, b in rng.integers(-4, 5, (4, 2))]
    psi = StateVector(shape, amps)
    n1 = psi.norm_sq()
    for r in (2, 3):
        assert tensor_power(psi, r).norm_sq() == _qqi_pow(n1, r)


def _qqi_pow(x, r):
    out = QQi(1)
    for _ in range(r):
        out = out * x
    return out


def test_tensor_power_float_matches_exact():
    psi = standard_state("w", (2, 2, 2))
    exact = tensor_power(psi, 2)
    flt = tensor_power(psi.to_float(), 2)
    assert np.allclose(exact.float_array(), flt.amplitudes)


def test_tensor_power_resource_guard(monkeypatch):
    monkeypatch.setenv("INVFORGE_MAX_AMBIENT", "10")
    with pytest.raises(ResourceLimitError):
        tensor_power(standard_state("bell", (2, 2)), 2)


# --- partial trace -----------------------------------------------------------


def test_partial_trace_ghz():
    rho = partial_trace(standard_state("ghz", (2, 2, 2)), (0,))
    assert rho.entries[0][0] == QQi(1)
    assert rho.entries[1][1] == QQi(1)
    assert rho.entries[0][1] == QQi(0)


def test_partial_trace_w_matches_index_oracle():
    w = standard_state("w", (2, 2, 2))
    rho = partial_trace(w, (0,))
    assert rho.entries[0][0] == QQi(2)
    assert rho.entries[1][1] == QQi(1)
    oracle = numpy_reduced_density(w.float_array(), (2, 2, 2), (0,))
    assert np.allclose(rho.to_float_array(), oracle)


def test_partial_trace_keep_everything():
    bell = standard_state("bell", (2, 2))
    rho = partial_trace(bell, (0, 1))
    for a in range(4):
        for b in range(4):
            expected = bell.amplitudes[a] * bell.amplitudes[b].conjugate()
            assert rho.entries[a][b] == expected


def test_partial_trace_trace_equals_norm():
    for name, dims in (("ghz", (2, 2, 2)), ("w", (2, 2, 2)), ("bell", (2, 2))):
        psi = standard_state(name, dims)
        for keep in ((0,), (1,), (0, 1)):
            rho = partial_trace(psi, keep)
            assert rho.trace() == psi.norm_sq()


def test_partial_trace_of_density_matrix():
    bell = standard_state("bell", (2, 2))
    full = partial_trace(bell, (0, 1))
    reduced = partial_trace(full, (0,))
    direct = partial_trace(bell, (0,))
    assert reduced.entries == direct.entries
    # float route
    reduced_f = partial_trace(
        DensityMatrix(full.shape, full.to_float_array()), (0,)
    )
    assert np.allclose(reduced_f.entries, direct.to_float_array())


# --- purification ------------------------------------------------------------


def test_purify_pure_state():
    rho = DensityMatrix(SystemShape((2,)), [[QQi(1), QQi(0)], [QQi(0), QQi(0)]])
    psi = purify(rho, 2)  # minimal valid ancilla; output is a product state
    assert psi.shape.dims == (2, 2)
    back = partial_trace(psi, (0,))
    assert np.allclose(back.to_float_array(), rho.to_float_array(), atol=1e-12)
    moved = np.abs(psi.amplitudes.reshape(2, 2))
    assert moved[:, 1].max() < 1e-12  # the ancilla stays in its first level


def test_purify_maximally_mixed_qubit():
    rho = DensityMatrix(
        SystemShape((2,)),
        [[QQi(Fraction(1, 2)), QQi(0)], [QQi(0), QQi(Fraction(1, 2))]],
    )
    psi = purify(rho, 2)
    back = partial_trace(psi, (0,))
    assert np.allclose(back.to_float_array(), np.eye(2) / 2, atol=1e-12)
    # a maximally mixed qutrit has rank 3, too big for a 2-level ancilla
    mixed3 = DensityMatrix(
        SystemShape((3,)),
        [[QQi(Fraction(1, 3)) if a == b else QQi(0) for b in range(3)] for a in range(3)],
    )
    with pytest.raises(PurificationError):
        purify(mixed3, 2)


def test_purify_random_rational_psd():
    rng = np.random.default_rng(4)
    M = [[QQi(Fraction(int(a), 3), Fraction(int(b), 5)) for a, b in row] for row in rng.integers(-6, 7, (3, 3, 2))]
    shape = SystemShape((3,))
    rows = []
    for a in range(3):
        rows.append(
            [
                sum((M[a][k] * M[b][k].conjugate() for k in range(3)), QQi(0))
                for b in range(3)
            ]
        )
    rho = DensityMatrix(shape, rows)
    psi = purify(rho, 3)
    back = partial_trace(psi, (0,))
    assert np.abs(back.to_float_array() - rho.to_float_array()).max() < 1e-9
    # exact route with the known factor
    psi_exact = purify(rho, 3, exact_factor=M)
    back_exact = partial_trace(psi_exact, (0,))
    assert back_exact.entries == rho.entries


def test_purify_rejects_non_psd():
    rho = DensityMatrix(SystemShape((2,)), [[QQi(1), QQi(0)], [QQi(0), QQi(-1)]])
    with pytest.raises(PurificationError):
        purify(rho, 2)


def test_purify_exact_factor_mismatch():
    rho = DensityMatrix(SystemShape((2,)), [[QQi(1), QQi(0)], [QQi(0), QQi(1)]])
    bad = [[QQi(1), QQi(0)], [QQi(1), QQi(0)]]
    with pytest.raises(PurificationError):
        purify(rho, 2, exact_factor=bad)


# --- Choi states -------------------------------------------------------------


def test_choi_identity_channel():
    chan = KrausChannel(2, 2, [np.eye(2)])
    rho = choi_state(chan)
    assert rho.shape.dims == (2, 2)
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1.0
    assert np.allclose(rho.entries, np.outer(psi, psi.conj()))
    assert abs(rho.trace() - 2.0) < 1e-12


def test_choi_depolarizing_is_maximally_mixed():
    chan = KrausChannel(2, 2, [p / 2 for p in PAULIS])
    rho = choi_state(chan)
    # direct summation oracle
    direct = np.zeros((4, 4), dtype=complex)
    for E in chan.kraus_ops:
        for i in range(2):
            for j in range(2):
                ket = np.zeros(2)
                bra = np.zeros(2)
                ket[i] = 1.0
                bra[j] = 1.0
                block = E @ np.outer(ket, bra) @ E.conj().T
                direct[i * 2 : i * 2 + 2, j * 2 : j * 2 + 2] += block
    # direct is indexed (i, a), matching the package convention
    assert np.allclose(rho.entries, direct)
    assert np.allclose(rho.entries, np.eye(4) / 2)


def test_choi_unitary_channel_is_rank_one():
    U = random_local_unitary(SystemShape((2,)), 7).factors[0]
    rho = choi_state(KrausChannel(2, 2, [U]))
    assert abs(rho.purity() - 1.0) < 1e-10


def test_kraus_trace_preserving_check():
    with pytest.raises(ValueError):
        KrausChannel(2, 2, [np.eye(2) * 0.5])


# --- random transformations ---------------------------------------------------


def test_random_local_unitary_properties():
    shape = SystemShape((2, 3, 2))
    g = random_local_unitary(shape, 42)
    for U, d in zip(g.factors, shape.dims):
        assert np.abs(U.conj().T @ U - np.eye(d)).max() <= 1e-10
    h = random_local_unitary(shape, 42)
    for a, b in zip(g.factors, h.factors):
        assert np.array_equal(a, b)
    psi = random_state(shape, 1)
    moved = apply_local_unitary(g, psi)
    assert abs(np.linalg.norm(moved.amplitudes) - np.linalg.norm(psi.amplitudes)) < 1e-10


def test_apply_local_unitary_identity_and_inverse():
    shape = SystemShape((2, 2, 2))
    psi = random_state(shape, 9)
    eye = [np.eye(2)] * 3
    same = apply_local_factors(eye, psi)
    assert np.abs(same.amplitudes - psi.amplitudes).max() < 1e-14
    g = random_local_unitary(shape, 3)
    forth = apply_local_unitary(g, psi)
    back = apply_local_factors([U.conj().T for U in g.factors], forth)
    assert np.abs(back.amplitudes - psi.amplitudes).max() < 1e-10


def test_apply_local_unitary_covariance_of_reductions():
    shape = SystemShape((2, 2))
    psi = random_state(shape, 12)
    g = random_local_unitary(shape, 13)
    moved = apply_local_unitary(g, psi)
    lhs = numpy_reduced_density(moved.amplitudes, shape.dims, (0,))
    rho = numpy_reduced_density(psi.amplitudes, shape.dims, (0,))
    rhs = g.factors[0] @ rho @ g.factors[0].conj().T
    assert np.abs(lhs - rhs).max() < 1e-9


def test_apply_shape_mismatch():
    g = random_local_unitary(SystemShape((2, 2)), 0)
    with pytest.raises(ShapeMismatchError):
        apply_local_unitary(g, random_state(SystemShape((2, 3)), 0))


# --- serialization -------------------------------------------------------------


def test_state_json_round_trip_exact_and_float():
    psi = standard_state("w", (2, 2, 2))
    d = state_to_dict(psi)
    assert d["mode"] == "exact"
    back = state_from_dict(json.loads(json.dumps(d)))
    assert back.amplitudes == psi.amplitudes

    flt = random_state(SystemShape((2, 2)), 5)
    d = state_to_dict(flt)
    back = state_from_dict(json.loads(json.dumps(d)))
    assert np.allclose(back.amplitudes, flt.amplitudes)


def test_density_and_channel_json_round_trip():
    rho = partial_trace(standard_state("w", (2, 2, 2)), (0, 1))
    back = density_from_dict(json.loads(json.dumps(density_to_dict(rho))))
    assert back.entries == rho.entries

    chan = KrausChannel(2, 2, [p / 2 for p in PAULIS])
    back = channel_from_dict(json.loads(json.dumps(channel_to_dict(chan))))
    for a, b in zip(back.kraus_ops, chan.kraus_ops):
        assert np.allclose(a, b)
