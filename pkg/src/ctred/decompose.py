"""Additive decompositions of a state-space system.

Stable/antistable splitting and modal (per-eigenvalue-block) decomposition
are both computed with an orthogonal Schur reduction followed by a
Sylvester decoupling of the off-diagonal coupling block; only similarity
transforms touch the realization, so the transfer function is preserved
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import AxisPoleError, SeparationError, ZeroModeError
from .statespace import StateSpaceSystem
from .tolerances import CLUSTER_TOL, SEP_REL, inf_norm, stab_tol


def _decouple_leading(sys_abc, select):
    """Split (A,B,C) into the invariant part selected by ``select`` and the rest.

    Returns ``((A1,B1,C1), (A2,B2,C2))`` where the first triple carries the
    selected eigenvalues.  Off-diagonal coupling is removed by a Sylvester
    solve, so the two parts sum to the original transfer function.
    """
    a, b, c = sys_abc
    form = linalg.ordered_real_schur(a, select)
    k = form.n_selected
    n = a.shape[0]
    t = form.T
    bt = form.Z.T @ b
    ct = c @ form.Z
    if k == 0 or k == n:
        parts = ((t, bt, ct), None) if k == n else (None, (t, bt, ct))
        return parts
    t11, t12, t22 = t[:k, :k], t[:k, k:], t[k:, k:]
    x = linalg.solve_sylvester(t11, -t22, t12)
    # similarity [[I, X],[0, I]] zeroes the coupling; transform B and C along
    b1 = bt[:k] - x @ bt[k:]
    b2 = bt[k:]
    c1 = ct[:, :k]
    c2 = ct[:, k:] + c1 @ x
    return (t11, b1, c1), (t22, b2, c2)


@dataclass(frozen=True)
class StableUnstableSplit:
    """Additive split ``K = stable_part + unstable_part``."""

    stable_part: StateSpaceSystem
    unstable_part: StateSpaceSystem


def split_stable_unstable(k: StateSpaceSystem) -> StableUnstableSplit:
    """Split a system into stable and antistable additive parts.

    Every eigenvalue must be bounded away from the imaginary axis; the
    feedthrough (if any) stays with the stable part.
    """
    tol = stab_tol(inf_norm(k.A))
    ev = linalg.eigenvalues(k.A)
    if np.any(np.abs(ev.real) <= tol):
        raise AxisPoleError(
            "stable/antistable split is ill-posed: eigenvalue within "
            f"{tol:.1e} of the imaginary axis"
        )
    try:
        part1, part2 = _decouple_leading(
            (k.A, k.B, k.C), lambda lam: lam.real < 0.0
        )
    except SeparationError as exc:
        raise SeparationError(f"ill-conditioned stable/antistable split: {exc}") from exc
    zero_d = np.zeros_like(k.D)
    if part1 is None:
        stable = StateSpaceSystem(np.zeros((0, 0)), np.zeros((0, k.m)),
                                  np.zeros((k.p, 0)), k.D)
        unstable = StateSpaceSystem(part2[0], part2[1], part2[2], zero_d)
    elif part2 is None:
        stable = StateSpaceSystem(part1[0], part1[1], part1[2], k.D)
        unstable = StateSpaceSystem(np.zeros((0, 0)), np.zeros((0, k.m)),
                                    np.zeros((k.p, 0)), zero_d)
    else:
        stable = StateSpaceSystem(part1[0], part1[1], part1[2], k.D)
        unstable = StateSpaceSystem(part2[0], part2[1], part2[2], zero_d)
    return StableUnstableSplit(stable, unstable)


@dataclass(frozen=True)
class ModalBlock:
    """One decoupled eigenvalue block ``C_i (sI - A_i)^{-1} B_i``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    eigenvalue: complex
    importance: float  # NaN when the eigenvalue sits on the imaginary axis

    @property
    def order(self) -> int:
        return self.A.shape[0]

    def system(self) -> StateSpaceSystem:
        d = np.zeros((self.C.shape[0], self.B.shape[1]))
        return StateSpaceSystem(self.A, self.B, self.C, d)


@dataclass(frozen=True)
class ModalDecomposition:
    """Ordered list of decoupled modal blocks summing to the original system."""

    blocks: tuple[ModalBlock, ...]
    m: int
    p: int

    def rebuild(self, keep=None) -> StateSpaceSystem:
        """Block-diagonal parallel sum of the kept blocks (all by default)."""
        idx = range(len(self.blocks)) if keep is None else keep
        blocks = [self.blocks[i] for i in idx]
        if not blocks:
            return StateSpaceSystem(
                np.zeros((0, 0)), np.zeros((0, self.m)),
                np.zeros((self.p, 0)), np.zeros((self.p, self.m)),
            )
        import scipy.linalg as sla

        a = sla.block_diag(*[b.A for b in blocks])
        bmat = np.vstack([b.B for b in blocks])
        c = np.hstack([b.C for b in blocks])
        return StateSpaceSystem(a, bmat, c, np.zeros((self.p, self.m)))


def mode_importance(block: ModalBlock) -> float:
    """Ranking index of a modal block.

    Stable blocks are ranked by the peak gain of their transfer function;
    antistable blocks by the spectral norm of the dc-coupling matrix
    ``C_i A_i^{-1} B_i``.  Blocks on the imaginary axis cannot be ranked.
    """
    lam = block.eigenvalue
    tol = 1e-8 * max(1.0, abs(lam))
    if abs(lam) <= tol:
        raise ZeroModeError("mode with zero eigenvalue cannot be ranked")
    if abs(lam.real) <= tol:
        raise AxisPoleError("mode on the imaginary axis cannot be ranked")
    if lam.real < 0.0:
        from .norms import hinf_norm  # local import to avoid a module cycle

        return hinf_norm(block.system())
    coupling = block.C @ np.linalg.solve(block.A, block.B)
    return float(np.linalg.svd(coupling, compute_uv=False)[0])


def _cluster_eigenvalues(ev: np.ndarray, cluster_tol: float):
    """Group eigenvalues (conjugate pairs canonicalized) by relative closeness."""
    canon = np.unique(np.round(ev.real, 14) + 1j * np.round(np.abs(ev.imag), 14))
    k = canon.size
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            d = abs(canon[i] - canon[j])
            if d <= cluster_tol * (1.0 + abs(canon[i])) or d <= cluster_tol * (
                1.0 + abs(canon[j])
            ):
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(canon[i])
    clusters = [tuple(sorted(g, key=lambda z: (z.real, z.imag))) for g in groups.values()]
    clusters.sort(key=lambda g: (np.mean([z.real for z in g]), np.mean([abs(z.imag) for z in g])))
    return clusters


def _full_cluster_values(cluster) -> np.ndarray:
    """Cluster members together with their conjugates."""
    vals = []
    for z in cluster:
        vals.append(z)
        if z.imag != 0:
            vals.append(z.conjugate())
    return np.array(vals)


def modal_form(k: StateSpaceSystem, cluster_tol: float = CLUSTER_TOL) -> ModalDecomposition:
    """Decompose a system into decoupled eigenvalue blocks.

    Eigenvalues closer than ``cluster_tol`` (relative) are kept in one
    block; distinct clusters must be separated well enough for the
    Sylvester decoupling.  Blocks are sorted by ascending real part.
    """
    ev = linalg.eigenvalues(k.A)
    clusters = _cluster_eigenvalues(ev, cluster_tol)
    # pairwise separation between clusters, over conjugate-closed value sets
    sep_tol = SEP_REL * inf_norm(k.A)
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            vi = _full_cluster_values(clusters[i])
            vj = _full_cluster_values(clusters[j])
            gap = np.abs(vi[:, None] - vj[None, :]).min()
            if gap <= sep_tol:
                raise SeparationError(
                    f"eigenvalue clusters around {clusters[i][0]:.6g} and "
                    f"{clusters[j][0]:.6g} are inseparable (gap {gap:.2e})"
                )

    blocks: list[ModalBlock] = []
    remaining = (k.A, k.B, k.C)
    for idx, cluster in enumerate(clusters):
        if idx == len(clusters) - 1:
            part = remaining
        else:
            centers = _full_cluster_values(cluster)
            part, rest = _decouple_leading(remaining, _membership(centers, clusters))
            if part is None or rest is None:
                raise SeparationError(
                    "modal decoupling selected an empty or full block; "
                    "cluster membership is ambiguous"
                )
            remaining = rest
        a_i, b_i, c_i = part
        lam_block = _representative(linalg.eigenvalues(a_i))
        blk = ModalBlock(a_i, b_i, c_i, lam_block, np.nan)
        try:
            imp = mode_importance(blk)
        except (ZeroModeError, AxisPoleError):
            imp = float("nan")
        blocks.append(ModalBlock(a_i, b_i, c_i, lam_block, imp))
    blocks.sort(key=lambda b: (b.eigenvalue.real, abs(b.eigenvalue.imag)))
    return ModalDecomposition(tuple(blocks), m=k.m, p=k.p)


def _membership(centers: np.ndarray, clusters):
    """Predicate selecting eigenvalues whose nearest cluster is ``centers``."""
    all_vals = [_full_cluster_values(c) for c in clusters]

    def select(lam: complex) -> bool:
        d_own = np.abs(centers - lam).min()
        d_all = min(np.abs(v - lam).min() for v in all_vals)
        return d_own <= d_all
    return select


def _representative(ev: np.ndarray) -> complex:
    """Canonical eigenvalue of a block: mean real part, +|mean imag| part."""
    re = float(np.mean(ev.real))
    im = float(np.mean(np.abs(ev.imag)))
    return complex(re, im)
