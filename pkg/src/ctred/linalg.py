"""Dense linear-algebra kernels.

Eigenvalues, ordered real Schur decomposition, Lyapunov/Sylvester solvers
(Bartels-Stewart, via LAPACK) and a continuous algebraic Riccati solver
built on the ordered Schur form of the Hamiltonian.  All functions accept
and return plain ``numpy`` arrays of float64 and validate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import (
    ConvergenceError,
    DimensionError,
    NoStabilizingSolutionError,
    NonFiniteError,
    ReorderingError,
    SeparationError,
    StabilityError,
)
from .tolerances import (
    CARE_RESID,
    LYAP_RESID,
    SCHUR_RESID,
    SEP_REL,
    SYLV_RESID,
    inf_norm,
    stab_tol,
)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a 2-D float64 array with finite entries."""
    m = np.atleast_2d(np.asarray(a, dtype=float))
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{name} contains NaN or infinite entries")
    return m


def _require_square(a: np.ndarray, name: str) -> None:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")


def eigenvalues(a) -> np.ndarray:
    """All eigenvalues of a square matrix, sorted by (real, imag) parts.

    Complex eigenvalues of a real matrix appear in conjugate pairs.
    """
    m = as_matrix(a, "A")
    _require_square(m, "A")
    if m.shape[0] == 0:
        return np.array([], dtype=complex)
    ev = np.linalg.eigvals(m)
    order = np.lexsort((ev.imag, ev.real))
    return ev[order]


def spectral_abscissa(a) -> float:
    """Largest real part over the spectrum; -inf for an empty matrix."""
    ev = eigenvalues(a)
    if ev.size == 0:
        return -np.inf
    return float(ev.real.max())


@dataclass(frozen=True)
class SchurForm:
    """Real Schur decomposition ``A = Z T Z^T`` with selected eigenvalues leading.

    ``eigenvalues`` lists the spectrum in diagonal-block order and
    ``n_selected`` is the size of the leading invariant subspace.
    """

    T: np.ndarray
    Z: np.ndarray
    eigenvalues: np.ndarray
    n_selected: int


def _block_eigenvalues(t: np.ndarray) -> np.ndarray:
    """Eigenvalues of a quasi-triangular matrix in diagonal-block order."""
    n = t.shape[0]
    ev = []
    i = 0
    while i < n:
        if i + 1 < n and t[i + 1, i] != 0.0:
            ev.extend(np.linalg.eigvals(t[i : i + 2, i : i + 2]))
            i += 2
        else:
            ev.append(complex(t[i, i]))
            i += 1
    return np.array(ev, dtype=complex)


def ordered_real_schur(a, select: Callable[[complex], bool]) -> SchurForm:
    """Real Schur form with eigenvalues satisfying ``select`` moved to the front.

    ``select`` takes a complex eigenvalue and returns True when it belongs
    to the leading block.  Conjugate pairs are kept together, so ``select``
    must be conjugation-symmetric (half-plane predicates are).
    """
    m = as_matrix(a, "A")
    _require_square(m, "A")
    n = m.shape[0]
    if n == 0:
        return SchurForm(m.copy(), np.eye(0), np.array([], dtype=complex), 0)

    def gees_select(re, im):
        return bool(select(complex(re, im)))

    try:
        t, z, sdim = sla.schur(m, output="real", sort=gees_select)
    except sla.LinAlgError as exc:  # reordering breakdown inside gees
        raise ReorderingError(f"Schur reordering failed: {exc}") from exc

    resid = np.linalg.norm(z @ t @ z.T - m)
    if resid > SCHUR_RESID * max(1.0, np.linalg.norm(m)):
        raise ReorderingError(
            f"Schur reconstruction residual {resid:.2e} exceeds tolerance"
        )
    ev = _block_eigenvalues(t)
    # The partition must be clean: selected eigenvalues lead, others trail.
    flags = [bool(select(v)) for v in ev]
    if sum(flags) != sdim or not all(flags[:sdim]) or any(flags[sdim:]):
        raise ReorderingError(
            "eigenvalue partition is inconsistent after reordering "
            "(nearly identical eigenvalues across the split?)"
        )
    return SchurForm(t, z, ev, int(sdim))


def solve_lyapunov(a, q) -> np.ndarray:
    """Solve ``A X + X A^T + Q = 0`` for stable ``A`` and symmetric ``Q``."""
    am = as_matrix(a, "A")
    qm = as_matrix(q, "Q")
    _require_square(am, "A")
    _require_square(qm, "Q")
    if am.shape != qm.shape:
        raise DimensionError(f"A {am.shape} and Q {qm.shape} must match")
    if qm.size and np.linalg.norm(qm - qm.T) > 1e-8 * max(1.0, np.linalg.norm(qm)):
        raise DimensionError("Q must be symmetric")
    if am.shape[0] == 0:
        return np.zeros((0, 0))
    if spectral_abscissa(am) >= -stab_tol(inf_norm(am)):
        raise StabilityError("A must have all eigenvalues strictly in the left half-plane")
    qm = 0.5 * (qm + qm.T)
    x = sla.solve_continuous_lyapunov(am, -qm)
    x = 0.5 * (x + x.T)
    resid = np.linalg.norm(am @ x + x @ am.T + qm)
    if resid > LYAP_RESID * max(1.0, np.linalg.norm(qm)):
        raise ConvergenceError(f"Lyapunov residual {resid:.2e} exceeds tolerance")
    return x


def solve_sylvester(a, b, c) -> np.ndarray:
    """Solve ``A X + X B + C = 0``; spectra of A and -B must be separated."""
    am = as_matrix(a, "A")
    bm = as_matrix(b, "B")
    cm = as_matrix(c, "C")
    _require_square(am, "A")
    _require_square(bm, "B")
    if cm.shape != (am.shape[0], bm.shape[0]):
        raise DimensionError(
            f"C must be {am.shape[0]}x{bm.shape[0]}, got {cm.shape}"
        )
    if am.shape[0] == 0 or bm.shape[0] == 0:
        return np.zeros(cm.shape)
    ea = eigenvalues(am)
    eb = eigenvalues(bm)
    gap = np.abs(ea[:, None] + eb[None, :]).min()
    tol_sep = SEP_REL * max(inf_norm(am), inf_norm(bm))
    if gap <= tol_sep:
        raise SeparationError(
            f"spectral gap {gap:.2e} between A and -B is below tolerance {tol_sep:.2e}"
        )
    x = sla.solve_sylvester(am, bm, -cm)
    resid = np.linalg.norm(am @ x + x @ bm + cm)
    if resid > SYLV_RESID * max(1.0, np.linalg.norm(cm)):
        raise ConvergenceError(f"Sylvester residual {resid:.2e} exceeds tolerance")
    return x


def solve_care(a, b, q, r) -> np.ndarray:
    """Stabilizing solution of ``A^T P + P A - P B R^{-1} B^T P + Q = 0``.

    Computed from the ordered real Schur form of the 2n x 2n Hamiltonian,
    selecting its stable invariant subspace.  The closed loop
    ``A - B R^{-1} B^T P`` is verified stable before returning.
    """
    am = as_matrix(a, "A")
    bm = as_matrix(b, "B")
    qm = as_matrix(q, "Q")
    rm = as_matrix(r, "R")
    _require_square(am, "A")
    _require_square(qm, "Q")
    _require_square(rm, "R")
    n = am.shape[0]
    if bm.shape[0] != n:
        raise DimensionError(f"B must have {n} rows, got {bm.shape[0]}")
    if qm.shape[0] != n:
        raise DimensionError(f"Q must be {n}x{n}")
    if rm.shape[0] != bm.shape[1]:
        raise DimensionError("R must match the number of columns of B")
    try:
        rinv_bt = sla.solve(rm, bm.T, assume_a="pos")
    except sla.LinAlgError as exc:
        raise DimensionError("R must be symmetric positive definite") from exc

    ham = np.block([[am, -bm @ rinv_bt], [-qm, -am.T]])
    tol = stab_tol(inf_norm(ham))
    ev = eigenvalues(ham)
    if np.any(np.abs(ev.real) <= tol):
        raise NoStabilizingSolutionError(
            "Hamiltonian has eigenvalues on the imaginary axis"
        )
    form = ordered_real_schur(ham, lambda lam: lam.real < 0.0)
    if form.n_selected != n:
        raise NoStabilizingSolutionError(
            f"stable invariant subspace has dimension {form.n_selected}, expected {n}"
        )
    u1 = form.Z[:n, :n]
    u2 = form.Z[n:, :n]
    try:
        p = sla.solve(u1.T, u2.T).T
    except sla.LinAlgError as exc:
        raise NoStabilizingSolutionError("stable subspace is not a graph") from exc
    p = 0.5 * (p + p.T)
    resid = np.linalg.norm(am.T @ p + p @ am - p @ bm @ rinv_bt @ p + qm)
    if resid > CARE_RESID * max(1.0, np.linalg.norm(qm)):
        raise ConvergenceError(f"Riccati residual {resid:.2e} exceeds tolerance")
    if spectral_abscissa(am - bm @ rinv_bt @ p) >= 0.0:
        raise NoStabilizingSolutionError("computed solution is not stabilizing")
    return p


def companion_matrix(coeffs: Sequence[float]) -> np.ndarray:
    """Companion matrix of a polynomial given by ascending coefficients.

    The leading (highest-degree) coefficient must be nonzero.
    """
    c = np.asarray(coeffs, dtype=complex if np.iscomplexobj(coeffs) else float)
    if c.ndim != 1 or c.size < 2:
        raise DimensionError("need a polynomial of degree >= 1")
    if c[-1] == 0:
        raise DimensionError("leading coefficient must be nonzero")
    monic = c / c[-1]
    n = c.size - 1
    m = np.zeros((n, n), dtype=monic.dtype)
    m[1:, :-1] = np.eye(n - 1)
    m[:, -1] = -monic[:-1]
    return m


def poly_roots(coeffs: Sequence[float]) -> np.ndarray:
    """Roots of a polynomial (ascending coefficients) via its companion matrix."""
    c = np.asarray(coeffs, dtype=complex)
    # strip trailing (highest-degree) zeros
    nz = np.nonzero(np.abs(c) > 0)[0]
    if nz.size == 0:
        raise DimensionError("zero polynomial has no defined roots")
    c = c[: nz[-1] + 1]
    if c.size == 1:
        return np.array([], dtype=complex)
    comp = companion_matrix(c.real if np.allclose(c.imag, 0) else c)
    ev = np.linalg.eigvals(comp)
    order = np.lexsort((ev.imag, ev.real))
    return ev[order]
