"""Dense linear algebra over small labeled quantum registers.

States, operators and density matrices all carry a ``RegisterLayout`` naming
their subsystems.  Everything is dense complex128.  An operator may be
supported on a subset of a state's registers; ``apply``, ``expectation`` and
``born_table`` embed it by tensor contraction instead of materializing a
full-space matrix, so wide scenarios stay cheap as long as each operator's
own support is small.

All value types are immutable: arrays are copied on construction and marked
read-only, and every operation returns a fresh object.  Instances are safe
to share across threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContextIncompatibleError,
    LabelClashError,
    LayoutMismatchError,
    NonrealResultError,
    NotHermitianError,
    NotInvolutoryError,
    NotUnitaryError,
    UnknownLabelError,
)

# Structural checks (hermitian / unitary / involutory flags, norm checks).
STRUCTURAL_TOL = 1e-10
# Numeric assertions (commutators, expectation residues, probability sums).
NUMERIC_TOL = 1e-12


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered sequence of (label, dimension) register sites."""

    sites: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        labels = [s[0] for s in self.sites]
        if len(set(labels)) != len(labels):
            dup = sorted({l for l in labels if labels.count(l) > 1})
            raise LabelClashError(f"duplicate register labels: {dup}")
        for label, dim in self.sites:
            if not isinstance(dim, int) or dim < 1:
                raise ValueError(f"register {label!r} has invalid dimension {dim!r}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s[0] for s in self.sites)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(s[1] for s in self.sites)

    @property
    def total_dim(self) -> int:
        out = 1
        for _, d in self.sites:
            out *= d
        return out

    def axis(self, label: str) -> int:
        for i, (l, _) in enumerate(self.sites):
            if l == label:
                return i
        raise UnknownLabelError(f"no register labeled {label!r}")

    def dim(self, label: str) -> int:
        return self.sites[self.axis(label)][1]

    def subset(self, labels) -> "RegisterLayout":
        """Sub-layout of the given labels, in this layout's order."""
        want = set(labels)
        missing = want - set(self.labels)
        if missing:
            raise UnknownLabelError(f"no register labeled {sorted(missing)}")
        return RegisterLayout(tuple(s for s in self.sites if s[0] in want))

    def concat(self, other: "RegisterLayout") -> "RegisterLayout":
        return RegisterLayout(self.sites + other.sites)


def qubits(*labels: str) -> RegisterLayout:
    """Layout of dimension-2 sites."""
    return RegisterLayout(tuple((l, 2) for l in labels))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class QState:
    """Normalized pure state over a layout."""

    def __init__(self, layout: RegisterLayout, amplitudes, tol: float = STRUCTURAL_TOL):
        arr = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if arr.size != layout.total_dim:
            raise LayoutMismatchError(
                f"amplitude vector of size {arr.size} does not fit layout of dimension "
                f"{layout.total_dim}"
            )
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > tol:
            raise ValueError(f"state norm {norm} deviates from 1 beyond tol={tol}")
        self.layout = layout
        self.amplitudes = _frozen(arr)
        self.tol = tol

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.shape)

    def __repr__(self) -> str:
        return f"QState(dim={self.layout.total_dim}, labels={self.layout.labels})"


def basis_state(layout: RegisterLayout, index: int = 0) -> QState:
    amp = np.zeros(layout.total_dim, dtype=np.complex128)
    amp[index] = 1.0
    return QState(layout, amp)


class Operator:
    """Linear operator over a layout, with lazily cached structural flags."""

    def __init__(self, layout: RegisterLayout, matrix, tol: float = STRUCTURAL_TOL):
        mat = np.array(matrix, dtype=np.complex128)
        d = layout.total_dim
        if mat.shape != (d, d):
            raise LayoutMismatchError(
                f"matrix of shape {mat.shape} does not fit layout of dimension {d}"
            )
        self.layout = layout
        self.matrix = _frozen(mat)
        self.tol = tol
        self._flags: dict[str, bool] = {}

    def _flag(self, name: str, test) -> bool:
        if name not in self._flags:
            self._flags[name] = bool(test())
        return self._flags[name]

    @property
    def is_hermitian(self) -> bool:
        return self._flag(
            "hermitian",
            lambda: np.max(np.abs(self.matrix - self.matrix.conj().T)) <= self.tol,
        )

    @property
    def is_unitary(self) -> bool:
        def test():
            d = self.matrix.shape[0]
            return np.max(np.abs(self.matrix @ self.matrix.conj().T - np.eye(d))) <= self.tol

        return self._flag("unitary", test)

    @property
    def is_involutory(self) -> bool:
        def test():
            d = self.matrix.shape[0]
            return np.max(np.abs(self.matrix @ self.matrix - np.eye(d))) <= self.tol

        return self._flag("involutory", test)

    def dagger(self) -> "Operator":
        return Operator(self.layout, self.matrix.conj().T, self.tol)

    def __repr__(self) -> str:
        return f"Operator(dim={self.layout.total_dim}, labels={self.layout.labels})"


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix over a layout."""

    def __init__(self, layout: RegisterLayout, matrix, tol: float = STRUCTURAL_TOL):
        mat = np.array(matrix, dtype=np.complex128)
        d = layout.total_dim
        if mat.shape != (d, d):
            raise LayoutMismatchError(
                f"matrix of shape {mat.shape} does not fit layout of dimension {d}"
            )
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > tol:
            raise NotHermitianError(f"density matrix asymmetry {herm} exceeds tol={tol}")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > tol:
            raise ValueError(f"density matrix trace {tr} deviates from 1 beyond tol={tol}")
        lo = float(np.min(np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)))
        if lo < -tol:
            raise ValueError(f"density matrix has eigenvalue {lo} below -tol={-tol}")
        self.layout = layout
        self.matrix = _frozen(mat)
        self.tol = tol

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.layout.total_dim}, labels={self.layout.labels})"


def pure_density(state: QState) -> DensityMatrix:
    v = state.amplitudes
    return DensityMatrix(state.layout, np.outer(v, v.conj()), state.tol)


def tensor(a, b):
    """Kronecker product of two states or two operators (left factor first)."""
    if isinstance(a, QState) and isinstance(b, QState):
        return QState(a.layout.concat(b.layout), np.kron(a.amplitudes, b.amplitudes),
                      max(a.tol, b.tol))
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(a.layout.concat(b.layout), np.kron(a.matrix, b.matrix),
                        max(a.tol, b.tol))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(a.layout.concat(b.layout), np.kron(a.matrix, b.matrix),
                             max(a.tol, b.tol))
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def _check_sublayout(op_layout: RegisterLayout, layout: RegisterLayout) -> list[int]:
    """Axes of ``layout`` the operator acts on; dims must agree."""
    axes = []
    for label, dim in op_layout.sites:
        try:
            ax = layout.axis(label)
        except UnknownLabelError:
            raise LayoutMismatchError(
                f"operator register {label!r} is absent from the state layout"
            ) from None
        if layout.shape[ax] != dim:
            raise LayoutMismatchError(
                f"register {label!r}: operator dimension {dim} vs state dimension "
                f"{layout.shape[ax]}"
            )
        axes.append(ax)
    return axes


def _contract(matrix: np.ndarray, arr: np.ndarray, layout: RegisterLayout,
              axes: list[int]) -> np.ndarray:
    """Apply ``matrix`` to the given axes of ``arr`` (any trailing shape)."""
    k = len(axes)
    dims = [layout.shape[a] for a in axes]
    tens = matrix.reshape(dims + dims)
    out = np.tensordot(tens, arr, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def _apply_to_vector(matrix: np.ndarray, op_layout: RegisterLayout,
                     state: QState) -> np.ndarray:
    axes = _check_sublayout(op_layout, state.layout)
    tens = state.tensor_view()
    return _contract(matrix, tens, state.layout, axes).reshape(-1)


def _apply_to_rows(matrix: np.ndarray, op_layout: RegisterLayout,
                   rho: DensityMatrix) -> np.ndarray:
    """Left-multiply the embedded operator onto a density matrix."""
    axes = _check_sublayout(op_layout, rho.layout)
    d = rho.layout.total_dim
    tens = rho.matrix.reshape(rho.layout.shape + (d,))
    return _contract(matrix, tens, rho.layout, axes).reshape(d, d)


def apply(op: Operator, state: QState) -> QState:
    """Apply a unitary supported on a subset of the state's registers."""
    if not op.is_unitary:
        raise NotUnitaryError("apply() requires a unitary operator")
    amp = _apply_to_vector(op.matrix, op.layout, state)
    return QState(state.layout, amp, state.tol)


def embed(op: Operator, layout: RegisterLayout) -> Operator:
    """Dense embedding of ``op`` into a larger layout (identity elsewhere)."""
    axes = _check_sublayout(op.layout, layout)
    rest = [i for i in range(len(layout.sites)) if i not in axes]
    d_rest = 1
    for i in rest:
        d_rest *= layout.shape[i]
    big = np.kron(op.matrix, np.eye(d_rest, dtype=np.complex128))
    # big is ordered (op registers..., rest registers...); permute to layout order.
    order = axes + rest
    perm = [order.index(i) for i in range(len(layout.sites))]
    n = len(layout.sites)
    tens = big.reshape(tuple(layout.shape[i] for i in order) * 2)
    tens = np.transpose(tens, perm + [n + p for p in perm])
    d = layout.total_dim
    return Operator(layout, tens.reshape(d, d), op.tol)


def expectation(op: Operator, state, tol: float = NUMERIC_TOL) -> float:
    """Real expectation value of a hermitian operator on a state or density matrix."""
    if not op.is_hermitian:
        raise NotHermitianError("expectation() requires a hermitian operator")
    if isinstance(state, QState):
        val = complex(np.vdot(state.amplitudes, _apply_to_vector(op.matrix, op.layout, state)))
    elif isinstance(state, DensityMatrix):
        val = complex(np.trace(_apply_to_rows(op.matrix, op.layout, state)))
    else:
        raise TypeError(f"expectation() got {type(state).__name__}")
    if abs(val.imag) > tol:
        raise NonrealResultError(f"imaginary residue {val.imag} exceeds tol={tol}")
    return float(val.real)


def partial_trace(state, keep) -> DensityMatrix:
    """Reduced density matrix over ``keep`` labels, in layout order."""
    if isinstance(state, QState):
        layout = state.layout
        sub = layout.subset(keep)
        keep_axes = [layout.axis(l) for l in sub.labels]
        rest_axes = [i for i in range(len(layout.sites)) if i not in keep_axes]
        tens = state.tensor_view().transpose(keep_axes + rest_axes)
        dk = sub.total_dim
        a = tens.reshape(dk, -1)
        return DensityMatrix(sub, a @ a.conj().T, state.tol)
    if isinstance(state, DensityMatrix):
        layout = state.layout
        sub = layout.subset(keep)
        keep_axes = [layout.axis(l) for l in sub.labels]
        rest_axes = [i for i in range(len(layout.sites)) if i not in keep_axes]
        n = len(layout.sites)
        tens = state.matrix.reshape(layout.shape * 2)
        perm = keep_axes + rest_axes + [n + a for a in keep_axes] + [n + a for a in rest_axes]
        tens = tens.transpose(perm)
        dk = sub.total_dim
        dr = layout.total_dim // dk
        tens = tens.reshape(dk, dr, dk, dr)
        return DensityMatrix(sub, np.einsum("iaja->ij", tens), state.tol)
    raise TypeError(f"partial_trace() got {type(state).__name__}")


def _union_layout(a: RegisterLayout, b: RegisterLayout) -> RegisterLayout:
    sites = list(a.sites)
    have = dict(a.sites)
    for label, dim in b.sites:
        if label in have:
            if have[label] != dim:
                raise LayoutMismatchError(
                    f"register {label!r}: dimension {have[label]} vs {dim}"
                )
        else:
            sites.append((label, dim))
    return RegisterLayout(tuple(sites))


def commutes(a: Operator, b: Operator, tol: float = NUMERIC_TOL) -> bool:
    """Whether [a, b] vanishes on the union of their supports (max-norm <= tol)."""
    common = _union_layout(a.layout, b.layout)
    am = embed(a, common).matrix
    bm = embed(b, common).matrix
    return bool(np.max(np.abs(am @ bm - bm @ am)) <= tol)


def spectral_projectors(op: Operator) -> tuple[Operator, Operator]:
    """(P_plus, P_minus) for an involutory hermitian operator."""
    if not op.is_hermitian:
        raise NotHermitianError("spectral_projectors() requires a hermitian operator")
    if not op.is_involutory:
        raise NotInvolutoryError("spectral_projectors() requires an involutory operator")
    d = op.layout.total_dim
    eye = np.eye(d, dtype=np.complex128)
    plus = Operator(op.layout, (eye + op.matrix) / 2.0, op.tol)
    minus = Operator(op.layout, (eye - op.matrix) / 2.0, op.tol)
    return plus, minus


@dataclass(frozen=True)
class BornTable:
    """Joint outcome distribution of commuting involutory observables.

    ``rows`` maps each outcome tuple in ``{+1, -1}**k`` (lexicographic, +1
    first) to its probability.  Zero rows are retained.  ``names`` labels the
    outcome slots; the observables themselves ride along for marginal checks.
    """

    names: tuple[str, ...]
    rows: dict[tuple[int, ...], float]
    observables: tuple[Operator, ...] = field(repr=False, default=())
    tol: float = NUMERIC_TOL

    def __post_init__(self) -> None:
        total = 0.0
        for outcome, p in self.rows.items():
            if len(outcome) != len(self.names):
                raise ValueError(f"outcome {outcome} does not match {self.names}")
            if p < -self.tol:
                raise ValueError(f"negative probability {p} for outcome {outcome}")
            total += p
        if abs(total - 1.0) > max(self.tol, 1e-9):
            raise ValueError(f"probabilities sum to {total}, not 1")

    def probability(self, outcome: tuple[int, ...]) -> float:
        return self.rows[outcome]

    def expectation_product(self) -> float:
        """Expectation of the product of all outcomes."""
        out = 0.0
        for outcome, p in self.rows.items():
            sign = 1
            for s in outcome:
                sign *= s
            out += sign * p
        return out

    def support(self, zero_tol: float = 1e-10) -> tuple[tuple[int, ...], ...]:
        return tuple(o for o, p in self.rows.items() if p > zero_tol)

    def marginal(self, names) -> "BornTable":
        """Marginal table over a subset of outcome slots, keeping their order here."""
        idx = [self.names.index(n) for n in names]
        rows: dict[tuple[int, ...], float] = {}
        for outcome in itertools.product((1, -1), repeat=len(idx)):
            rows[outcome] = 0.0
        for outcome, p in self.rows.items():
            key = tuple(outcome[i] for i in idx)
            rows[key] += p
        obs = tuple(self.observables[i] for i in idx) if self.observables else ()
        return BornTable(tuple(self.names[i] for i in idx), rows, obs, self.tol)

    def with_names(self, names: tuple[str, ...]) -> "BornTable":
        if len(names) != len(self.names):
            raise ValueError("name tuple length mismatch")
        return BornTable(tuple(names), dict(self.rows), self.observables, self.tol)

    def sample(self, rng: np.random.Generator) -> tuple[int, ...]:
        """Draw one outcome tuple; row order is fixed, so draws are reproducible."""
        outcomes = list(self.rows)
        probs = np.array([max(self.rows[o], 0.0) for o in outcomes])
        probs = probs / probs.sum()
        u = rng.random()
        acc = 0.0
        for o, p in zip(outcomes, probs):
            acc += p
            if u < acc:
                return o
        return outcomes[-1]


def born_table(observables, state, names=None, tol: float = NUMERIC_TOL) -> BornTable:
    """Joint Born distribution of pairwise-commuting involutory observables.

    Probabilities are ||P_s1 ... P_sk |psi>||^2 with P_s = (I + s O)/2, or the
    corresponding trace for a density matrix.  Works for observables supported
    on arbitrary (possibly overlapping) subsets of the state's registers.
    """
    obs = tuple(observables)
    if not obs:
        raise ValueError("born_table() needs at least one observable")
    for o in obs:
        if not o.is_hermitian:
            raise NotHermitianError("born_table() observables must be hermitian")
        if not o.is_involutory:
            raise NotInvolutoryError("born_table() observables must be involutory")
    for i in range(len(obs)):
        for j in range(i + 1, len(obs)):
            if not commutes(obs[i], obs[j], tol=max(tol, 1e-12)):
                raise ContextIncompatibleError(
                    f"observables {i} and {j} do not commute; no joint table exists"
                )
    if names is None:
        names = tuple(f"O{i + 1}" for i in range(len(obs)))
    names = tuple(names)
    if len(names) != len(obs):
        raise ValueError("names length does not match observables")

    projectors = []
    for o in obs:
        d = o.layout.total_dim
        eye = np.eye(d, dtype=np.complex128)
        projectors.append({1: (eye + o.matrix) / 2.0, -1: (eye - o.matrix) / 2.0})

    rows: dict[tuple[int, ...], float] = {}
    if isinstance(state, QState):
        for outcome in itertools.product((1, -1), repeat=len(obs)):
            vec = state.amplitudes
            for o, proj, s in zip(obs, projectors, outcome):
                tens = vec.reshape(state.layout.shape)
                axes = _check_sublayout(o.layout, state.layout)
                vec = _contract(proj[s], tens, state.layout, axes).reshape(-1)
            rows[outcome] = float(np.real(np.vdot(vec, vec)))
    elif isinstance(state, DensityMatrix):
        d = state.layout.total_dim
        for outcome in itertools.product((1, -1), repeat=len(obs)):
            mat = state.matrix
            for o, proj, s in zip(obs, projectors, outcome):
                axes = _check_sublayout(o.layout, state.layout)
                tens = mat.reshape(state.layout.shape + (d,))
                mat = _contract(proj[s], tens, state.layout, axes).reshape(d, d)
                tens = mat.conj().T.reshape(state.layout.shape + (d,))
                mat = _contract(proj[s], tens, state.layout, axes).reshape(d, d).conj().T
            rows[outcome] = float(np.real(np.trace(mat)))
    else:
        raise TypeError(f"born_table() got {type(state).__name__}")
    return BornTable(names, rows, obs, tol)
