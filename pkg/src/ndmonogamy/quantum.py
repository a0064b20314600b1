"""Qutrit-qubit operators for the pentagon and Bell witnesses.

Conventions
-----------
- Alice's system is a qutrit with basis {|0>,|1>,|2>}, Bob's a qubit with
  {|0>,|1>}.  Product basis ordering is qutrit-major: |00>,|01>,|10>,
  |11>,|20>,|21> (index 2*t + q).
- Alice's observables are reflections 2|v_i><v_i| - 1 about the pentagon
  vectors v_i; adjacent reflections commute because <v_i|v_{i+1}> = 0.
- Bob measures the Pauli operators Z and X.
- Eigensystems come from a dependency-free cyclic Jacobi iteration;
  eigenvector phases are fixed by making the largest-magnitude component
  real and positive.
"""

from __future__ import annotations

import itertools
import json
from functools import lru_cache
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .classical import LinearExpression
from .errors import BlockStructureViolated, NotHermitian, NotNormalized
from .scenario import CANONICAL, OUTCOMES, Behavior, Scenario

HERMITICITY_TOL = 1e-12
EIG_TOL = 1e-14
MAX_SWEEPS = 100

PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

#: product-basis index of qutrit level t and qubit level q
PLUS_BLOCK = (1, 2, 5)    # |01>, |10>, |21>
MINUS_BLOCK = (0, 3, 4)   # |00>, |11>, |20>


def require_hermitian(matrix: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    gap = float(np.max(np.abs(matrix - matrix.conj().T)))
    if gap > tol:
        raise NotHermitian(f"matrix deviates from Hermiticity by {gap:.3e}")
    return matrix


def require_normalized(ket: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    norm = float(np.linalg.norm(ket))
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f"state has norm {norm}, expected 1")
    return ket


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _pentagon_vectors() -> tuple[np.ndarray, ...]:
    vectors = []
    for i in range(1, 6):
        v = np.array(
            [
                np.cos(4 * np.pi * i / 5),
                np.sin(4 * np.pi * i / 5),
                np.sqrt(np.cos(np.pi / 5)),
            ]
        )
        v = v / np.linalg.norm(v)
        v.setflags(write=False)
        vectors.append(v)
    return tuple(vectors)


def kcbs_vectors() -> list[np.ndarray]:
    """The five pentagon rays, normalized; v_i is orthogonal to v_{i+1}.

    Ray i is proportional to (cos(4 pi i/5), sin(4 pi i/5), sqrt(cos(pi/5)))
    for i = 1..5; the common normalization is 1/sqrt(1 + cos(pi/5)).
    """
    return [v.copy() for v in _pentagon_vectors()]


@lru_cache(maxsize=None)
def _observables() -> tuple[np.ndarray, ...]:
    obs = []
    for v in _pentagon_vectors():
        a = (2.0 * np.outer(v, v) - np.eye(3)).astype(complex)
        a.setflags(write=False)
        obs.append(a)
    return tuple(obs)


def kcbs_observables() -> list[np.ndarray]:
    """Alice's five reflections A_i = 2|v_i><v_i| - 1 (qutrit, Hermitian).

    Each is involutory with spectrum {+1, -1, -1}; A_i commutes with
    A_{i+1} and with no other A_j.
    """
    return [a.copy() for a in _observables()]


def alice_observable(i: int) -> np.ndarray:
    """A_i on the qutrit, index mod 5."""
    return _observables()[(i - 1) % 5].copy()


def bob_observable(j: int) -> np.ndarray:
    """B_1 = Z, B_2 = X on the qubit."""
    if j == 1:
        return PAULI_Z.copy()
    if j == 2:
        return PAULI_X.copy()
    raise ValueError(f"Bob has observables 1 and 2, got {j}")


def observable_6d(measurement_id: str) -> np.ndarray:
    """A measurement's observable on the full qutrit (x) qubit space."""
    kind, index = measurement_id[0], int(measurement_id[1:])
    if kind == "A":
        return np.kron(alice_observable(index), np.eye(2, dtype=complex))
    if kind == "B":
        return np.kron(np.eye(3, dtype=complex), bob_observable(index))
    raise ValueError(f"unknown measurement id {measurement_id!r}")


def kcbs_operator() -> np.ndarray:
    """Sum of the five products A_i A_{i+1}, lifted to the 6-dim space.

    Diagonal in the computational basis with eigenvalues -5+2*sqrt(5)
    (multiplicity 4, on |00>,|01>,|10>,|11>) and 5-4*sqrt(5)
    (multiplicity 2, on |20>,|21>).
    """
    a = _observables()
    qutrit = sum(a[i] @ a[(i + 1) % 5] for i in range(5))
    return np.kron(qutrit, np.eye(2, dtype=complex))


def chsh_operator() -> np.ndarray:
    """A1 B1 + A1 B2 + A4 B1 - A4 B2 on the 6-dim space (traceless)."""
    a1 = alice_observable(1)
    a4 = alice_observable(4)
    return (
        np.kron(a1, PAULI_Z)
        + np.kron(a1, PAULI_X)
        + np.kron(a4, PAULI_Z)
        - np.kron(a4, PAULI_X)
    )


def expression_operator(
    expr: LinearExpression, scenario: Scenario = CANONICAL
) -> np.ndarray:
    """The 6-dim observable whose expectation equals the expression value.

    Every term's subset must be jointly measurable, so the per-term
    operator products commute and the result is Hermitian.
    """
    total = np.zeros((6, 6), dtype=complex)
    for coeff, subset in expr.terms:
        scenario.canonical_context(subset)  # raises SubsetNotMeasurable
        op = np.eye(6, dtype=complex)
        for m in subset:
            op = op @ observable_6d(m)
        total += coeff * op
    return require_hermitian(total)


# ---------------------------------------------------------------------------
# eigensystems
# ---------------------------------------------------------------------------


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude component real and positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        j = int(np.argmax(np.abs(col)))
        if abs(col[j]) > 0:
            out[:, k] = col * (np.conj(col[j]) / abs(col[j]))
    return out


def eigensystem(
    matrix: np.ndarray,
    tol: float = EIG_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian.

    Cyclic Jacobi iteration: each rotation folds the phase of one
    off-diagonal entry into a plane rotation that zeroes it; sweeps stop
    once the off-diagonal Frobenius norm falls below ``tol`` relative to
    the matrix norm.  Returns (w, V) with matrix @ V = V @ diag(w).
    """
    a = require_hermitian(matrix).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if float(np.linalg.norm(a[off_mask])) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r <= 1e-18 * scale:
                    continue
                phase = a[p, q] / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if abs(tau) > 1e8:
                    t = 1.0 / (2.0 * tau)
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (
                        abs(tau) + np.sqrt(1.0 + tau * tau)
                    )
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # unitary columns u_p = (c, -s*conj(phase)), u_q = (s*phase, c)
                col_p = c * a[:, p] - s * np.conj(phase) * a[:, q]
                col_q = s * phase * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = col_p, col_q
                row_p = c * a[p, :] - s * phase * a[q, :]
                row_q = s * np.conj(phase) * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = row_p, row_q
                vec_p = c * v[:, p] - s * np.conj(phase) * v[:, q]
                vec_q = s * phase * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = vec_p, vec_q
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], _fix_phases(v[:, order])


def eigvals_characteristic_3x3(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real symmetric 3x3 by solving the cubic directly.

    Trigonometric solution of the characteristic polynomial; independent
    of the Jacobi iteration, used as a cross-check oracle.
    """
    a = np.asarray(matrix, dtype=float)
    if a.shape != (3, 3) or np.max(np.abs(a - a.T)) > 1e-10:
        raise NotHermitian("characteristic oracle needs a real symmetric 3x3")
    shift = np.trace(a) / 3.0
    b = a - shift * np.eye(3)
    p2 = float(np.sum(b * b)) / 6.0
    if p2 <= 0.0:
        return np.array([shift, shift, shift])
    p = np.sqrt(p2)
    r = float(np.linalg.det(b)) / (2.0 * p ** 3)
    r = min(1.0, max(-1.0, r))
    angle = np.arccos(r) / 3.0
    eigs = shift + 2.0 * p * np.cos(angle + 2.0 * np.pi * np.arange(3) / 3.0)
    return np.sort(eigs)


class BlockDecomposition(NamedTuple):
    """The Bell operator split into two 3-dim invariant blocks.

    ``m`` is the restriction to span{|01>,|10>,|21>}; the restriction to
    the complementary block equals ``-m`` entrywise in the returned
    ``basis_minus``, whose middle vector carries a sign flip (-|11>), a
    pure phase convention.  Columns of the basis matrices are the kets.
    """

    m: np.ndarray
    basis_plus: np.ndarray
    basis_minus: np.ndarray


def block_decompose(
    chsh: np.ndarray, cross_tol: float = 1e-10
) -> BlockDecomposition:
    """Split the Bell operator into its two odd/even invariant blocks."""
    chsh = require_hermitian(chsh)
    basis_plus = np.zeros((6, 3), dtype=complex)
    basis_minus = np.zeros((6, 3), dtype=complex)
    for k, idx in enumerate(PLUS_BLOCK):
        basis_plus[idx, k] = 1.0
    signs = (1.0, -1.0, 1.0)
    for k, idx in enumerate(MINUS_BLOCK):
        basis_minus[idx, k] = signs[k]
    cross = basis_plus.conj().T @ chsh @ basis_minus
    worst = float(np.max(np.abs(cross)))
    if worst > cross_tol:
        raise BlockStructureViolated(
            f"cross-block entries reach {worst:.3e} (tolerance {cross_tol:.1e})"
        )
    m = basis_plus.conj().T @ chsh @ basis_plus
    return BlockDecomposition(m, basis_plus, basis_minus)


# ---------------------------------------------------------------------------
# states and behaviors
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _context_projectors(scenario: Scenario = CANONICAL) -> tuple[np.ndarray, ...]:
    """For each context, the 8 commuting projectors, outcome order matching
    the behavior tables."""
    rank1 = [np.outer(v, v).astype(complex) for v in _pentagon_vectors()]
    eye3 = np.eye(3, dtype=complex)
    eye2 = np.eye(2, dtype=complex)
    all_ops = []
    for context in scenario.contexts:
        ids = context.members
        i = int(ids[0][1:])
        j = int(ids[2][1:])
        proj_first = {+1: rank1[i - 1], -1: eye3 - rank1[i - 1]}
        nxt = i % 5 + 1
        proj_second = {+1: rank1[nxt - 1], -1: eye3 - rank1[nxt - 1]}
        b = bob_observable(j)
        proj_bob = {+1: (eye2 + b) / 2, -1: (eye2 - b) / 2}
        ops = np.stack(
            [
                np.kron(proj_first[a] @ proj_second[a2], proj_bob[o])
                for a, a2, o in itertools.product(OUTCOMES, repeat=3)
            ]
        )
        ops.setflags(write=False)
        all_ops.append(ops)
    return tuple(all_ops)


def behavior_from_state(
    state: np.ndarray, scenario: Scenario = CANONICAL
) -> Behavior:
    """Born-rule behavior of a pure qutrit-qubit state.

    Each context's eight probabilities are expectation values of products
    of the commuting spectral projectors.  The result always satisfies
    no-disturbance (up to roundoff).
    """
    psi = require_normalized(state)
    if psi.shape != (6,):
        raise NotNormalized(f"expected a 6-dim state, got shape {psi.shape}")
    probs = np.empty((len(scenario.contexts), 8))
    for c_idx, ops in enumerate(_context_projectors(scenario)):
        probs[c_idx] = np.real(np.einsum("i,kij,j->k", psi.conj(), ops, psi))
    return Behavior(scenario, probs)


def behavior_from_mixture(
    states: Sequence[np.ndarray],
    weights: Sequence[float] | None = None,
    scenario: Scenario = CANONICAL,
) -> Behavior:
    """Behavior of a convex mixture of pure states."""
    if weights is None:
        weights = [1.0 / len(states)] * len(states)
    probs = sum(
        w * behavior_from_state(s, scenario).probs
        for w, s in zip(weights, states)
    )
    return Behavior(scenario, probs)


def maximally_mixed_behavior(scenario: Scenario = CANONICAL) -> Behavior:
    """Uniform mixture of the six computational basis states."""
    return behavior_from_mixture(list(np.eye(6, dtype=complex)), scenario=scenario)


def random_states(
    count: int, seed: int | np.random.Generator = 0
) -> np.ndarray:
    """Haar-like random pure states: normalized complex Gaussian rows."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    raw = rng.normal(size=(count, 6)) + 1j * rng.normal(size=(count, 6))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def expectation(operator: np.ndarray, states: np.ndarray) -> np.ndarray:
    """<psi|O|psi> for one state (1-dim) or a stack of states (2-dim)."""
    states = np.asarray(states, dtype=complex)
    if states.ndim == 1:
        return np.real(states.conj() @ operator @ states)
    return np.real(np.einsum("ni,ij,nj->n", states.conj(), operator, states))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def matrix_to_json(matrix: np.ndarray) -> str:
    matrix = np.asarray(matrix, dtype=complex)
    return json.dumps(
        {
            "dim": matrix.shape[0],
            "re": matrix.real.tolist(),
            "im": matrix.imag.tolist(),
        }
    )


def matrix_from_json(text: str) -> np.ndarray:
    data = json.loads(text)
    return np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)


def ket_to_json(ket: np.ndarray) -> str:
    ket = np.asarray(ket, dtype=complex)
    return json.dumps(
        {"dim": ket.shape[0], "re": ket.real.tolist(), "im": ket.imag.tolist()}
    )


def ket_from_json(text: str) -> np.ndarray:
    data = json.loads(text)
    return np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)


def spectra_csv_rows(operators: Mapping[str, np.ndarray]) -> list[str]:
    """CSV rows 'operator,index,eigenvalue' for each named operator."""
    rows = ["operator,index,eigenvalue"]
    for name, op in operators.items():
        w, _ = eigensystem(op)
        rows.extend(f"{name},{k},{val:.17g}" for k, val in enumerate(w))
    return rows
