import numpy as np
import pytest

from wignerlab import qcore, stabilizer
from wignerlab.errors import (
    LengthMismatchError,
    NoncommutingGeneratorsError,
    NotHermitianError,
    RankNotOneError,
)
from wignerlab.stabilizer import (
    SCENARIO_GENERATORS,
    PauliString,
    ghz_scenario_state,
    joint_eigenstate,
    parse_pauli,
    pauli_commutes,
    pauli_multiply,
    to_operator,
)


def test_parse_and_str_round_trip():
    for text in ("+XZZ", "-XXX", "+iZY", "-iYIX", "+I", "-Z"):
        assert str(parse_pauli(text)) == text
    assert str(parse_pauli("XZZ")) == "+XZZ"


def test_parse_round_trip_random():
    rng = np.random.default_rng(17)
    letters = np.array(list("IXYZ"))
    for _ in range(200):
        n = int(rng.integers(1, 7))
        word = "".join(rng.choice(letters, size=n))
        p = PauliString(int(rng.integers(0, 4)), word)
        assert parse_pauli(str(p)) == p


def test_parse_rejects_bad_letters():
    with pytest.raises(ValueError):
        parse_pauli("+XQZ")
    with pytest.raises(ValueError):
        parse_pauli("+")


def test_multiply_mixed_generators():
    got = pauli_multiply(parse_pauli("+XZZ"), parse_pauli("+ZXZ"))
    assert str(got) == "+YYI"


def test_multiply_chain_gives_minus_xxx():
    a, b, c = SCENARIO_GENERATORS
    assert str(pauli_multiply(pauli_multiply(a, b), c)) == "-XXX"


def test_multiply_matches_dense_oracle():
    rng = np.random.default_rng(29)
    letters = np.array(list("IXYZ"))
    for _ in range(150):
        n = int(rng.integers(1, 4))
        p = PauliString(int(rng.integers(0, 4)), "".join(rng.choice(letters, size=n)))
        q = PauliString(int(rng.integers(0, 4)), "".join(rng.choice(letters, size=n)))
        prod = pauli_multiply(p, q)
        dense = to_operator(p).matrix @ to_operator(q).matrix
        assert np.max(np.abs(dense - to_operator(prod).matrix)) <= 1e-12


def test_multiply_rejects_length_mismatch():
    with pytest.raises(LengthMismatchError):
        pauli_multiply(parse_pauli("+XZ"), parse_pauli("+X"))


def test_commutes_examples():
    assert pauli_commutes(parse_pauli("+XZZ"), parse_pauli("+ZXZ"))
    assert not pauli_commutes(parse_pauli("+X"), parse_pauli("+Z"))
    assert pauli_commutes(parse_pauli("+XX"), parse_pauli("+ZZ"))


def test_commutes_matches_dense_commutator():
    rng = np.random.default_rng(31)
    letters = np.array(list("IXYZ"))
    for _ in range(200):
        n = int(rng.integers(1, 5))
        p = PauliString(0, "".join(rng.choice(letters, size=n)))
        q = PauliString(0, "".join(rng.choice(letters, size=n)))
        a, b = to_operator(p).matrix, to_operator(q).matrix
        dense = np.max(np.abs(a @ b - b @ a)) <= 1e-12
        assert pauli_commutes(p, q) == dense


def test_to_operator_phase_and_letters():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    m = to_operator(parse_pauli("-XXX")).matrix
    assert np.max(np.abs(m + np.kron(x, np.kron(x, x)))) <= 1e-12
    iy = to_operator(parse_pauli("+iY")).matrix
    assert np.max(np.abs(iy - 1j * np.array([[0, -1j], [1j, 0]]))) <= 1e-12


def test_to_operator_custom_labels():
    op = to_operator(parse_pauli("+XZ"), labels=("a2", "a3"))
    assert op.layout.labels == ("a2", "a3")
    with pytest.raises(LengthMismatchError):
        to_operator(parse_pauli("+XZ"), labels=("a1",))


def test_joint_eigenstate_single_z():
    s = joint_eigenstate([parse_pauli("+Z")])
    assert np.max(np.abs(s.amplitudes - np.array([1, 0]))) <= 1e-12


def test_joint_eigenstate_bell():
    s = joint_eigenstate([parse_pauli("+XX"), parse_pauli("+ZZ")])
    expected = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.max(np.abs(s.amplitudes - expected)) <= 1e-12


def test_joint_eigenstate_rejects_noncommuting():
    with pytest.raises(NoncommutingGeneratorsError):
        joint_eigenstate([parse_pauli("+X"), parse_pauli("+Z")])


def test_joint_eigenstate_rejects_contradictory():
    with pytest.raises(RankNotOneError):
        joint_eigenstate([parse_pauli("+Z"), parse_pauli("-Z")])


def test_joint_eigenstate_rejects_dependent():
    with pytest.raises(RankNotOneError):
        joint_eigenstate([parse_pauli("+ZZ")])


def test_joint_eigenstate_rejects_imaginary_phase():
    with pytest.raises(NotHermitianError):
        joint_eigenstate([parse_pauli("+iZ")])


GHZ_SIGNS = np.array([1, 1, 1, -1, 1, -1, -1, -1], dtype=float)


def test_scenario_state_frozen_amplitudes():
    # Derived and frozen: all eight amplitudes have modulus 1/sqrt(8) and
    # this exact sign pattern once the global phase is fixed.
    s = ghz_scenario_state()
    expected = GHZ_SIGNS / np.sqrt(8)
    assert np.max(np.abs(s.amplitudes - expected)) <= 1e-12


def test_scenario_state_matches_eigenvector_oracle():
    # Independent oracle: dense projector, eigendecomposition, top vector.
    mats = [to_operator(g).matrix for g in SCENARIO_GENERATORS]
    proj = np.eye(8, dtype=complex)
    for m in mats:
        proj = proj @ (np.eye(8) + m) / 2
    vals, vecs = np.linalg.eigh(proj)
    assert abs(vals[-1] - 1.0) <= 1e-12
    assert abs(vals[-2]) <= 1e-12
    vec = vecs[:, -1]
    first = np.flatnonzero(np.abs(vec) > 1e-12)[0]
    vec = vec * (vec[first].conjugate() / abs(vec[first]))
    assert np.max(np.abs(ghz_scenario_state().amplitudes - vec)) <= 1e-12


@pytest.mark.parametrize(
    "text,value",
    [("+XZZ", 1.0), ("+ZXZ", 1.0), ("+ZZX", 1.0), ("+XXX", -1.0),
     ("+YYI", 1.0), ("+YIY", 1.0), ("+IYY", 1.0), ("+ZZZ", 0.0)],
)
def test_scenario_state_expectations(text, value):
    s = ghz_scenario_state()
    op = to_operator(parse_pauli(text))
    assert abs(qcore.expectation(op, s) - value) <= 1e-12


def test_scenario_state_custom_labels():
    s = ghz_scenario_state(labels=("a1", "a2", "a3"))
    assert s.layout.labels == ("a1", "a2", "a3")
    assert np.max(np.abs(s.amplitudes - GHZ_SIGNS / np.sqrt(8))) <= 1e-12
