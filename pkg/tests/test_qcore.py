import itertools

import numpy as np
import pytest

from wignerlab import qcore
from wignerlab.errors import (
    ContextIncompatibleError,
    LabelClashError,
    LayoutMismatchError,
    NotHermitianError,
    NotInvolutoryError,
    NotUnitaryError,
    UnknownLabelError,
)
from wignerlab.qcore import (
    BornTable,
    DensityMatrix,
    Operator,
    QState,
    RegisterLayout,
    apply,
    basis_state,
    born_table,
    commutes,
    embed,
    expectation,
    partial_trace,
    pure_density,
    qubits,
    spectral_projectors,
    tensor,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
I2 = np.eye(2, dtype=complex)


def kron(*mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def test_layout_basics():
    lay = RegisterLayout((("a", 2), ("b", 4), ("c", 2)))
    assert lay.labels == ("a", "b", "c")
    assert lay.shape == (2, 4, 2)
    assert lay.total_dim == 16
    assert lay.axis("b") == 1
    assert lay.dim("b") == 4
    assert lay.subset(["c", "a"]).labels == ("a", "c")


def test_layout_label_clash():
    with pytest.raises(LabelClashError):
        RegisterLayout((("a", 2), ("a", 2)))
    with pytest.raises(LabelClashError):
        qubits("a", "b").concat(qubits("b"))


def test_layout_unknown_label():
    lay = qubits("a", "b")
    with pytest.raises(UnknownLabelError):
        lay.axis("z")
    with pytest.raises(UnknownLabelError):
        lay.subset(["a", "z"])


def test_state_norm_guard():
    lay = qubits("a")
    with pytest.raises(ValueError):
        QState(lay, [1.0, 1.0])
    QState(lay, [1.0, 1.0] / np.sqrt(2) * np.ones(2))


def test_state_is_immutable():
    s = basis_state(qubits("a"), 0)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0.0


def test_apply_hadamards_uniform():
    # Oracle: dense kron matrix times the basis vector.
    lay = qubits("q1", "q2", "q3")
    s = basis_state(lay, 0)
    h3 = Operator(lay, kron(H, H, H))
    got = apply(h3, s).amplitudes
    expected = kron(H, H, H) @ np.eye(8)[:, 0]
    assert np.max(np.abs(got - expected)) <= 1e-12
    assert np.max(np.abs(np.abs(got) - 1 / np.sqrt(8))) <= 1e-12


def test_apply_on_sublayout():
    # X on the middle register only; oracle is the explicitly embedded kron.
    lay = qubits("a", "b", "c")
    rng = np.random.default_rng(7)
    raw = rng.normal(size=8) + 1j * rng.normal(size=8)
    s = QState(lay, raw / np.linalg.norm(raw))
    op = Operator(qubits("b"), X)
    got = apply(op, s).amplitudes
    expected = kron(I2, X, I2) @ s.amplitudes
    assert np.max(np.abs(got - expected)) <= 1e-12


def test_apply_rejects_nonunitary():
    lay = qubits("a")
    with pytest.raises(NotUnitaryError):
        apply(Operator(lay, [[1, 0], [0, 0]]), basis_state(lay, 0))


def test_apply_rejects_unknown_register():
    op = Operator(qubits("z"), X)
    with pytest.raises(LayoutMismatchError):
        apply(op, basis_state(qubits("a"), 0))


def test_apply_rejects_dimension_clash():
    op = Operator(RegisterLayout((("a", 4),)), np.eye(4))
    with pytest.raises(LayoutMismatchError):
        apply(op, basis_state(qubits("a"), 0))


def bell_state():
    lay = qubits("q1", "q2")
    return QState(lay, np.array([1, 0, 0, 1]) / np.sqrt(2))


def test_expectation_bell_zz():
    s = bell_state()
    zz = Operator(s.layout, kron(Z, Z))
    assert abs(expectation(zz, s) - 1.0) <= 1e-12


def test_expectation_rejects_nonhermitian():
    lay = qubits("a")
    with pytest.raises(NotHermitianError):
        expectation(Operator(lay, [[0, 1], [0, 0]]), basis_state(lay, 0))


def test_expectation_on_density_matrix():
    s = bell_state()
    rho = pure_density(s)
    zz = Operator(s.layout, kron(Z, Z))
    assert abs(expectation(zz, rho) - 1.0) <= 1e-12
    x1 = Operator(qubits("q1"), X)
    assert abs(expectation(x1, rho) - expectation(x1, s)) <= 1e-12


def test_partial_trace_ghz_single_qubit():
    # Oracle: explicit outer product and axis sum.
    lay = qubits("q1", "q2", "q3")
    amp = np.zeros(8)
    amp[0] = amp[7] = 1 / np.sqrt(2)
    s = QState(lay, amp)
    red = partial_trace(s, ["q1"])
    full = np.outer(amp, amp.conj()).reshape(2, 2, 2, 2, 2, 2)
    expected = np.einsum("iabjab->ij", full)
    assert np.max(np.abs(red.matrix - expected)) <= 1e-12
    assert np.max(np.abs(red.matrix - I2 / 2)) <= 1e-12


def test_partial_trace_of_density_matrix_matches_vector_path():
    lay = qubits("a", "b", "c")
    rng = np.random.default_rng(3)
    raw = rng.normal(size=8) + 1j * rng.normal(size=8)
    s = QState(lay, raw / np.linalg.norm(raw))
    via_state = partial_trace(s, ["a", "c"])
    via_rho = partial_trace(pure_density(s), ["a", "c"])
    assert via_state.layout.labels == ("a", "c")
    assert np.max(np.abs(via_state.matrix - via_rho.matrix)) <= 1e-12


def test_partial_trace_preserves_trace():
    lay = qubits("a", "b")
    rng = np.random.default_rng(11)
    raw = rng.normal(size=4) + 1j * rng.normal(size=4)
    s = QState(lay, raw / np.linalg.norm(raw))
    red = partial_trace(s, ["b"])
    assert abs(np.trace(red.matrix) - 1.0) <= 1e-12


def test_density_matrix_guards():
    lay = qubits("a")
    with pytest.raises(NotHermitianError):
        DensityMatrix(lay, [[0.5, 0.5], [-0.5, 0.5]])
    with pytest.raises(ValueError):
        DensityMatrix(lay, [[0.9, 0], [0, 0.9]])
    with pytest.raises(ValueError):
        DensityMatrix(lay, [[1.5, 0], [0, -0.5]])


def test_commutes_basic():
    a = Operator(qubits("q1"), X)
    b = Operator(qubits("q2"), Z)
    assert commutes(a, b)
    c = Operator(qubits("q1"), Z)
    assert not commutes(a, c)


def test_commutes_overlapping_supports():
    # X on (a,b) block vs Z on b alone: embedded oracle on the union.
    ab = qubits("a", "b")
    xa_xb = Operator(ab, kron(X, X))
    zb = Operator(qubits("b"), Z)
    assert not commutes(xa_xb, zb)
    za_zb = Operator(ab, kron(Z, Z))
    assert commutes(za_zb, zb)


def test_embed_matches_kron_oracle():
    lay = qubits("a", "b")
    op = Operator(qubits("b"), X)
    assert np.max(np.abs(embed(op, lay).matrix - kron(I2, X))) <= 1e-12
    op2 = Operator(qubits("a"), Y)
    assert np.max(np.abs(embed(op2, lay).matrix - kron(Y, I2))) <= 1e-12


def test_embed_permuted_two_site_operator():
    # Operator given on (c, a) of an (a, b, c) layout.
    lay = qubits("a", "b", "c")
    cz = np.diag([1, 1, 1, -1]).astype(complex)
    op = Operator(qubits("c", "a"), cz)
    got = embed(op, lay).matrix
    # Oracle: diagonal with -1 exactly when a=1 and c=1.
    diag = np.ones(8, dtype=complex)
    for idx in range(8):
        a_bit, _, c_bit = (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        if a_bit and c_bit:
            diag[idx] = -1
    assert np.max(np.abs(got - np.diag(diag))) <= 1e-12


def test_spectral_projectors_sigma_z():
    op = Operator(qubits("a"), Z)
    plus, minus = spectral_projectors(op)
    assert np.max(np.abs(plus.matrix - np.diag([1, 0]))) <= 1e-12
    assert np.max(np.abs(minus.matrix - np.diag([0, 1]))) <= 1e-12


def test_spectral_projectors_completeness_random_involutory():
    rng = np.random.default_rng(5)
    for _ in range(20):
        # Random involutory hermitian: U diag(+-1) U+.
        raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        u, _ = np.linalg.qr(raw)
        signs = np.diag(rng.choice([1.0, -1.0], size=4))
        op = Operator(qubits("a", "b"), u @ signs @ u.conj().T)
        plus, minus = spectral_projectors(op)
        eye = np.eye(4)
        assert np.max(np.abs(plus.matrix + minus.matrix - eye)) <= 1e-10
        assert np.max(np.abs(plus.matrix @ minus.matrix)) <= 1e-10
        assert np.max(np.abs(plus.matrix @ plus.matrix - plus.matrix)) <= 1e-10


def test_spectral_projectors_rejects_noninvolutory():
    op = Operator(qubits("a"), [[2, 0], [0, -2]])
    with pytest.raises(NotInvolutoryError):
        spectral_projectors(op)


def test_born_table_single_z_on_plus():
    lay = qubits("a")
    s = QState(lay, np.array([1, 1]) / np.sqrt(2))
    t = born_table([Operator(lay, Z)], s)
    assert abs(t.rows[(1,)] - 0.5) <= 1e-12
    assert abs(t.rows[(-1,)] - 0.5) <= 1e-12


def test_born_table_zero_rows_retained():
    lay = qubits("a", "b")
    s = basis_state(lay, 0)
    t = born_table([Operator(qubits("a"), Z), Operator(qubits("b"), Z)], s)
    assert set(t.rows) == set(itertools.product((1, -1), repeat=2))
    assert abs(t.rows[(1, 1)] - 1.0) <= 1e-12
    assert t.rows[(1, -1)] == pytest.approx(0.0, abs=1e-12)
    assert t.rows[(-1, 1)] == pytest.approx(0.0, abs=1e-12)
    assert t.rows[(-1, -1)] == pytest.approx(0.0, abs=1e-12)


def test_born_table_rejects_noncommuting():
    lay = qubits("a")
    with pytest.raises(ContextIncompatibleError):
        born_table([Operator(lay, X), Operator(lay, Z)], basis_state(lay, 0))


def test_born_table_rejects_noninvolutory():
    lay = qubits("a")
    with pytest.raises(NotInvolutoryError):
        born_table([Operator(lay, [[2, 0], [0, -2]])], basis_state(lay, 0))


def test_born_table_matches_projector_oracle():
    # Independent oracle: explicit projector products on the full space.
    lay = qubits("q1", "q2")
    rng = np.random.default_rng(21)
    raw = rng.normal(size=4) + 1j * rng.normal(size=4)
    s = QState(lay, raw / np.linalg.norm(raw))
    obs = [Operator(qubits("q1"), Z), Operator(qubits("q2"), X)]
    t = born_table(obs, s)
    mats = [kron(Z, I2), kron(I2, X)]
    for outcome, p in t.rows.items():
        proj = np.eye(4, dtype=complex)
        for m, sign in zip(mats, outcome):
            proj = proj @ (np.eye(4) + sign * m) / 2
        expected = np.real(s.amplitudes.conj() @ proj @ s.amplitudes)
        assert abs(p - expected) <= 1e-12


def test_born_table_on_density_matrix_matches_pure_path():
    lay = qubits("q1", "q2")
    rng = np.random.default_rng(22)
    raw = rng.normal(size=4) + 1j * rng.normal(size=4)
    s = QState(lay, raw / np.linalg.norm(raw))
    obs = [Operator(qubits("q1"), Z), Operator(qubits("q2"), Z)]
    t_pure = born_table(obs, s)
    t_rho = born_table(obs, pure_density(s))
    for outcome in t_pure.rows:
        assert abs(t_pure.rows[outcome] - t_rho.rows[outcome]) <= 1e-12


def test_born_table_normalization_and_marginal():
    lay = qubits("q1", "q2", "q3")
    rng = np.random.default_rng(23)
    raw = rng.normal(size=8) + 1j * rng.normal(size=8)
    s = QState(lay, raw / np.linalg.norm(raw))
    obs = [Operator(qubits(q), Z) for q in ("q1", "q2", "q3")]
    t = born_table(obs, s, names=("a", "b", "c"))
    assert abs(sum(t.rows.values()) - 1.0) <= 1e-12
    m = t.marginal(["a", "c"])
    t_direct = born_table([obs[0], obs[2]], s, names=("a", "c"))
    for outcome in m.rows:
        assert abs(m.rows[outcome] - t_direct.rows[outcome]) <= 1e-12


def test_born_table_sampling_is_seeded():
    lay = qubits("a")
    s = QState(lay, np.array([1, 1]) / np.sqrt(2))
    t = born_table([Operator(lay, Z)], s)
    draws1 = [t.sample(np.random.default_rng(42)) for _ in range(5)]
    draws2 = [t.sample(np.random.default_rng(42)) for _ in range(5)]
    assert draws1 == draws2


def test_tensor_states_and_operators():
    a = basis_state(qubits("a"), 1)
    b = basis_state(qubits("b"), 0)
    ab = tensor(a, b)
    assert ab.layout.labels == ("a", "b")
    assert abs(ab.amplitudes[2] - 1.0) <= 1e-12
    xa = Operator(qubits("a"), X)
    zb = Operator(qubits("b"), Z)
    exp = kron(X, Z)
    assert np.max(np.abs(tensor(xa, zb).matrix - exp)) <= 1e-12
    with pytest.raises(TypeError):
        tensor(a, xa)


def test_operator_flags():
    op = Operator(qubits("a"), X)
    assert op.is_hermitian and op.is_unitary and op.is_involutory
    rot = Operator(qubits("a"), [[np.cos(0.3), -np.sin(0.3)], [np.sin(0.3), np.cos(0.3)]])
    assert rot.is_unitary and not rot.is_hermitian and not rot.is_involutory
