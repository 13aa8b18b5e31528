"""Floating-point checks for Frobenius structures on finite-dimensional Hilbert spaces.

A structure on ``C^d`` is given by its multiplication ``d × d²`` and unit
``d × 1`` matrices; the carrier of ``C^d ⊗ C^d`` is indexed ``i * d + j``
(``numpy.kron`` order).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


class NotCommutative(ValueError):
    pass


@dataclass(frozen=True)
class NumericFrobenius:
    dim: int
    mult: np.ndarray
    unit: np.ndarray

    @property
    def comult(self) -> np.ndarray:
        return self.mult.conj().T

    @property
    def counit(self) -> np.ndarray:
        return self.unit.conj().T


def swap_matrix(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1
    return s


def diagonal_structure(n: int) -> NumericFrobenius:
    """Pointwise multiplication on the standard basis; copies basis vectors."""
    if n < 1:
        raise ValueError("dimension must be positive")
    mult = np.zeros((n, n * n), dtype=complex)
    for i in range(n):
        mult[i, i * n + i] = 1
    return NumericFrobenius(n, mult, np.ones((n, 1), dtype=complex))


def matrix_algebra_structure(n: int, scaled: bool = True) -> NumericFrobenius:
    """Matrix product on ``M_n`` (basis ``e_ij`` at index ``i * n + j``).

    With ``scaled`` the product carries a factor ``n**-0.5`` and the unit is
    ``sqrt(n)`` times the identity matrix, which makes the structure special.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    d = n * n
    c = n ** -0.5 if scaled else 1.0
    mult = np.zeros((d, d * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                mult[i * n + l, (i * n + j) * d + (j * n + l)] = c
    unit = np.zeros((d, 1), dtype=complex)
    for i in range(n):
        unit[i * n + i, 0] = 1 / c
    return NumericFrobenius(d, mult, unit)


def permuted(s: NumericFrobenius, perm) -> NumericFrobenius:
    """Conjugate the structure by a permutation of the carrier basis."""
    p = np.eye(s.dim)[list(perm)]
    return NumericFrobenius(s.dim, p @ s.mult @ np.kron(p, p).T, p @ s.unit)


def _res(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def verify_frobenius_axioms(s: NumericFrobenius) -> dict[str, float]:
    """Max-norm residual of each axiom (plus commutativity, for information)."""
    d = s.dim
    one = np.eye(d)
    m, u, dm, e = s.mult, s.unit, s.comult, s.counit
    out = {}
    out["associativity"] = _res(m @ np.kron(m, one), m @ np.kron(one, m))
    out["unit"] = max(_res(m @ np.kron(u, one), one), _res(m @ np.kron(one, u), one))
    middle = dm @ m
    out["frobenius"] = max(
        _res(np.kron(one, m) @ np.kron(dm, one), middle),
        _res(np.kron(m, one) @ np.kron(one, dm), middle),
    )
    pairing = e @ m
    out["symmetry"] = _res(pairing @ swap_matrix(d), pairing)
    out["speciality"] = _res(m @ dm, one)
    return out


def commutativity_residual(s: NumericFrobenius) -> float:
    return _res(s.mult @ swap_matrix(s.dim), s.mult)


def random_density_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def algebra_state(s: NumericFrobenius, rho: np.ndarray) -> np.ndarray:
    """The element of the carrier seen by the algebra: multiply out ``vec(rho)``."""
    return s.mult @ rho.reshape(-1)


def marginals(s: NumericFrobenius, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``Tr_1`` and ``Tr_2`` of the broadcast ``comult @ v``; the trace is the counit."""
    one = np.eye(s.dim)
    b = s.comult @ v
    return np.kron(s.counit, one) @ b, np.kron(one, s.counit) @ b


def broadcast_deviation(s: NumericFrobenius, trials: int = 20, seed: int = 0, tol: float = DEFAULT_TOL) -> float:
    """Largest marginal deviation over basis states and ``trials`` random densities."""
    if commutativity_residual(s) > tol:
        raise NotCommutative("broadcasting by the comultiplication needs a commutative structure")
    n = s.dim
    rng = np.random.default_rng(seed)
    states = [np.outer(np.eye(n)[i], np.eye(n)[i]) for i in range(n)]
    states += [random_density_matrix(n, rng) for _ in range(trials)]
    worst = 0.0
    for rho in states:
        v = algebra_state(s, rho)
        t1, t2 = marginals(s, v)
        worst = max(worst, _res(t1, v), _res(t2, v))
    return worst


def verify_commutative_broadcast(s: NumericFrobenius, trials: int = 20, tol: float = DEFAULT_TOL, seed: int = 0) -> bool:
    return broadcast_deviation(s, trials, seed, tol) < tol
