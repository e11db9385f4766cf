"""Machine-checkable certificates for reduced-order controllers.

Each check returns a :class:`ReductionCertificate` holding every norm it
evaluated, the verdict of the sufficient condition, an optional bound on
the closed-loop quadratic cost of the reduced controller, and an
independent eigenvalue-based stability verdict (so the conservatism of a
sufficient condition stays visible).

Undefined norms (e.g. the peak gain of an unstable error system) are
recorded as ``inf`` and fail the condition instead of raising, so batch
sweeps can proceed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    AxisPoleError,
    NotStabilizingError,
    SeparationError,
    UnsupportedError,
    WrongCertificateError,
    ZeroModeError,
)
from .norms import h2_norm, hinf_norm, l2_norm, linf_norm
from .reduce import TruncationResult, minimal_realization
from .statespace import (
    StateSpaceSystem,
    add,
    four_block,
    is_internally_stable,
    negate,
    series,
)
from .tolerances import inf_norm, stab_tol

THEOREMS = ("lemma3", "thm1", "thm2", "cor1", "cor2", "thm3")

BOUNDED_THEOREMS = ("thm2", "cor1", "cor2", "thm3")


@dataclass(frozen=True)
class ReductionCertificate:
    theorem: str
    quantities: dict
    condition_satisfied: bool
    cost_bound: float | None
    verified_stable: bool
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ValueError(f"unknown certificate kind {self.theorem!r}")
        if self.cost_bound is not None and (
            not self.condition_satisfied or self.theorem not in BOUNDED_THEOREMS
        ):
            raise ValueError("cost_bound is only recorded for passing bound certificates")

    def to_dict(self) -> dict:
        def enc(v):
            if v is None:
                return None
            f = float(v)
            if math.isfinite(f):
                return f
            return "inf" if f > 0 else "-inf"

        return {
            "theorem": self.theorem,
            "quantities": {k: enc(v) for k, v in sorted(self.quantities.items())},
            "condition_satisfied": bool(self.condition_satisfied),
            "cost_bound": enc(self.cost_bound),
            "verified_stable": bool(self.verified_stable),
            "notes": list(self.notes),
        }


def lqg_cost(g: StateSpaceSystem, k: StateSpaceSystem) -> float:
    """Quadratic regulation cost of the loop under unit-intensity white noise.

    Equals the squared H2 norm of the joint closed-loop map from the two
    noise channels to the performance output and the control input.
    """
    stable, alpha = is_internally_stable(g, k)
    if not stable:
        raise NotStabilizingError(
            f"cost is infinite: controller does not stabilize the plant "
            f"(closed-loop abscissa {alpha:.3e})"
        )
    return h2_norm(four_block(g, k).system) ** 2


def lqg_cost_blocks(g: StateSpaceSystem, k: StateSpaceSystem):
    """Total cost and the four per-block squared-H2 contributions."""
    stable, alpha = is_internally_stable(g, k)
    if not stable:
        raise NotStabilizingError(
            f"cost is infinite: controller does not stabilize the plant "
            f"(closed-loop abscissa {alpha:.3e})"
        )
    fb = four_block(g, k)
    parts = [h2_norm(fb.block(i, j)) ** 2 for i in (0, 1) for j in (0, 1)]
    return h2_norm(fb.system) ** 2, parts


def _verified_stable(g: StateSpaceSystem, k_r: StateSpaceSystem):
    try:
        stable, alpha = is_internally_stable(g, k_r)
    except Exception:
        return False, math.inf
    return stable, alpha


def _minreal_safe(s: StateSpaceSystem, notes: list):
    from .errors import ConvergenceError

    try:
        return minimal_realization(s)
    except (AxisPoleError, SeparationError, ConvergenceError) as exc:
        notes.append(f"minimal realization unavailable: {exc}")
        return None


def _stable_system(s: StateSpaceSystem) -> bool:
    if s.n == 0:
        return True
    return linalg.spectral_abscissa(s.A) < -stab_tol(inf_norm(s.A))


def _stable_form(s: StateSpaceSystem, notes: list, label: str):
    """Stability of a transfer function with a usable realization.

    A raw-stable realization is used as is; otherwise the unstable part is
    inspected: when its transfer contribution sits at the rounding floor
    (exactly cancelling modes in a difference of systems) the stable part
    stands in, so hidden cancellations never fail the test spuriously.
    Returns ``(stable, realization_or_None)``.
    """
    from .reduce import drop_negligible_antistable

    if _stable_system(s):
        return True, s
    try:
        form = drop_negligible_antistable(s)
    except (AxisPoleError, SeparationError) as exc:
        notes.append(f"{label}: stability undecidable ({exc})")
        return False, None
    if form is None:
        notes.append(f"{label} is not stable")
        return False, None
    return True, form


def _loop_quantities(g: StateSpaceSystem, k: StateSpaceSystem):
    """Norms of the stable closed-loop blocks of the (G, K) loop.

    The entries for Y use its identity feedthrough for the peak gain and
    its strictly proper part for the H2 entry (the raw H2 integral of a
    biproper function diverges).
    """
    fb = four_block(g, k)
    x = fb.x
    xk = fb.xk
    kx = fb.kx
    ky = fb.ky
    y = StateSpaceSystem(xk.A, xk.B, xk.C, np.eye(g.p))
    xk_h2 = h2_norm(xk)
    q = {
        "x_h2": h2_norm(x),
        "x_hinf": hinf_norm(x),
        "xk_h2": xk_h2,
        "kx_h2": h2_norm(kx),
        "kx_hinf": hinf_norm(kx),
        "ky_h2": h2_norm(ky),
        "y_hinf": hinf_norm(y),
        "y_h2": xk_h2,  # strictly proper part of Y = I + XK
        "cost_original": h2_norm(fb.system) ** 2,
    }
    return q, fb


def _require_stabilizing(g, k):
    stable, alpha = is_internally_stable(g, k)
    if not stable:
        raise NotStabilizingError(
            f"the nominal controller must stabilize the plant "
            f"(closed-loop abscissa {alpha:.3e})"
        )


def _unstable_pole_count(s_min: StateSpaceSystem, tol: float):
    """(count of poles with Re > tol, True when any pole is within tol of the axis)."""
    ev = linalg.eigenvalues(s_min.A)
    on_axis = bool(np.any(np.abs(ev.real) <= tol))
    return int(np.sum(ev.real > tol)), on_axis


def check_lemma3(g: StateSpaceSystem, k: StateSpaceSystem,
                 k_r: StateSpaceSystem) -> ReductionCertificate:
    """Classical reduced-controller test: matched unstable pole counts plus
    a small-gain condition on the truncation error, in the peak gain over
    the axis (poles of the error system need not be stable)."""
    _require_stabilizing(g, k)
    notes: list[str] = []
    quantities: dict = {}
    fbx = four_block(g, k).x

    counts_ok = False
    k_min = _minreal_safe(k, notes)
    kr_min = _minreal_safe(k_r, notes)
    if k_min is not None and kr_min is not None:
        tol = stab_tol(max(inf_norm(k.A), inf_norm(k_r.A)))
        n_k, axis_k = _unstable_pole_count(k_min, tol)
        n_kr, axis_kr = _unstable_pole_count(kr_min, tol)
        quantities["unstable_poles_original"] = float(n_k)
        quantities["unstable_poles_reduced"] = float(n_kr)
        if axis_k or axis_kr:
            notes.append("imaginary-axis poles make the unstable pole count ill-defined")
        else:
            counts_ok = n_k == n_kr

    delta = add(k_r, negate(k))
    gains = {}
    for name, sys_ in (
        ("x_delta_linf", series(fbx, delta)),
        ("delta_x_linf", series(delta, fbx)),
    ):
        try:
            gains[name] = linf_norm(sys_)
        except AxisPoleError as exc:
            gains[name] = math.inf
            notes.append(f"{name} undefined: {exc}")
    quantities.update(gains)

    condition = counts_ok and min(gains.values()) < 1.0
    stable, alpha = _verified_stable(g, k_r)
    quantities["closed_loop_abscissa"] = alpha
    return ReductionCertificate("lemma3", quantities, condition, None, stable,
                                tuple(notes))


def check_thm1(g: StateSpaceSystem, k: StateSpaceSystem,
               k_r: StateSpaceSystem) -> ReductionCertificate:
    """Small-gain stability test without matching unstable pole counts.

    Requires the error system times the output sensitivity to be stable
    and both sensitivity-weighted error gains to be below one.  Stability
    verdicts are taken on cancellation-cleaned realizations so exactly
    cancelling hidden modes cannot fail the test spuriously.
    """
    _require_stabilizing(g, k)
    notes: list[str] = []
    quantities: dict = {}
    fb = four_block(g, k)
    x = fb.x
    y = StateSpaceSystem(fb.xk.A, fb.xk.B, fb.xk.C, np.eye(g.p))
    delta = add(k_r, negate(k))

    dy_stable, _ = _stable_form(series(delta, y), notes, "delta*Y")
    xd_stable, xd_min = _stable_form(series(x, delta), notes, "X*delta")
    dx_stable, dx_min = _stable_form(series(delta, x), notes, "delta*X")

    quantities["x_delta_hinf"] = hinf_norm(xd_min) if xd_stable else math.inf
    quantities["delta_x_hinf"] = hinf_norm(dx_min) if dx_stable else math.inf
    if not dy_stable:
        notes.append("delta*(I-GK)^{-1} is not stable")
    condition = (
        dy_stable
        and xd_stable
        and dx_stable
        and max(quantities["x_delta_hinf"], quantities["delta_x_hinf"]) < 1.0
    )
    stable, alpha = _verified_stable(g, k_r)
    quantities["closed_loop_abscissa"] = alpha
    return ReductionCertificate("thm1", quantities, condition, None, stable,
                                tuple(notes))


def _delta_h_norms(delta: StateSpaceSystem, notes: list):
    """(hinf, h2) of a stable error system, or infinities when unstable."""
    stable, form = _stable_form(delta, notes, "error system")
    if not stable:
        notes.append("error system is not stable; its H norms are undefined")
        return math.inf, math.inf
    return hinf_norm(form), h2_norm(form)


def _bound_terms(q: dict, d_hinf: float, d_h2: float, s1_coeff_h2: float):
    """S1/S2 penalty terms entering the cost bound.

    ``s1_coeff_h2`` scales the H2-error chunk of S1 (the two bound
    variants in use differ exactly there).
    """
    s1 = (
        2.0 * d_hinf * q["x_h2"] * q["xk_h2"]
        + s1_coeff_h2
        * d_h2
        * (q["ky_h2"] * q["y_hinf"] + q["kx_h2"] * q["x_hinf"])
        * (1.0 + q["kx_hinf"])
    )
    s2 = d_hinf**2 * q["x_h2"] ** 2 + d_h2**2 * (
        q["y_hinf"] ** 2 + q["x_hinf"] ** 2
    ) * (1.0 + q["kx_hinf"]) ** 2
    return s1, s2


def _smallgain_bound(q: dict, d_hinf: float, d_h2: float, s1_coeff_h2: float,
                     notes: list):
    s1, s2 = _bound_terms(q, d_hinf, d_h2, s1_coeff_h2)
    denom = 1.0 - q["x_hinf"] * d_hinf
    if denom <= 0.0:
        notes.append("small-gain margin is non-positive; bound is infinite")
        return s1, s2, math.inf
    return s1, s2, (q["cost_original"] + s1 + s2) / denom**2


def check_thm2_bound(g: StateSpaceSystem, k: StateSpaceSystem,
                     k_r: StateSpaceSystem) -> ReductionCertificate:
    """Small-gain certificate with a closed-loop cost bound, for stable errors."""
    _require_stabilizing(g, k)
    notes: list[str] = []
    quantities, _ = _loop_quantities(g, k)
    d_hinf, d_h2 = _delta_h_norms(add(k_r, negate(k)), notes)
    quantities["delta_hinf"] = d_hinf
    quantities["delta_h2"] = d_h2
    condition = math.isfinite(d_hinf) and d_hinf * quantities["x_hinf"] < 1.0
    cost_bound = None
    if condition:
        s1, s2, bound = _smallgain_bound(quantities, d_hinf, d_h2, 2.0, notes)
        quantities["s1"] = s1
        quantities["s2"] = s2
        cost_bound = bound
    stable, alpha = _verified_stable(g, k_r)
    quantities["closed_loop_abscissa"] = alpha
    return ReductionCertificate("thm2", quantities, condition, cost_bound,
                                stable, tuple(notes))


def check_cor1(g: StateSpaceSystem, k: StateSpaceSystem,
               reduction: TruncationResult) -> ReductionCertificate:
    """Certificate for balanced truncation: the discarded Hankel tail must
    be below half the reciprocal peak gain of the input sensitivity."""
    if reduction.method != "balanced":
        raise WrongCertificateError("this certificate applies to balanced truncation")
    _require_stabilizing(g, k)
    notes: list[str] = []
    quantities, _ = _loop_quantities(g, k)
    tail = float(sum(reduction.truncated_tail))
    quantities["sigma_tail_sum"] = tail
    condition = tail < 1.0 / (2.0 * quantities["x_hinf"])
    d_hinf, d_h2 = _delta_h_norms(reduction.delta, notes)
    quantities["delta_hinf"] = d_hinf
    quantities["delta_h2"] = d_h2
    cost_bound = None
    if condition and math.isfinite(d_hinf):
        s1, s2, bound = _smallgain_bound(quantities, d_hinf, d_h2, 2.0, notes)
        quantities["s1"] = s1
        quantities["s2"] = s2
        cost_bound = bound
    elif condition:
        condition = False
        notes.append("tail condition held but the error system is not stable")
    k_r = reduction.reduced
    stable, alpha = _verified_stable(g, k_r)
    quantities["closed_loop_abscissa"] = alpha
    return ReductionCertificate("cor1", quantities, condition, cost_bound,
                                stable, tuple(notes))


def check_cor2(g: StateSpaceSystem, k: StateSpaceSystem,
               k_r: StateSpaceSystem) -> ReductionCertificate:
    """Small-gain certificate for modal truncation of the stable part.

    Two variants of the first penalty term are in circulation, with
    coefficients one and two on the H2-error chunk.  Only the
    coefficient-two variant is provably an upper bound (the
    coefficient-one variant is violated on roughly a quarter of random
    instances), so the bound uses it; the single-coefficient variant is
    recorded alongside for comparison.
    """
    _require_stabilizing(g, k)
    notes: list[str] = []
    quantities, _ = _loop_quantities(g, k)
    delta_stable, delta_form = _stable_form(add(k_r, negate(k)), notes,
                                            "error system")
    if not delta_stable:
        raise WrongCertificateError(
            "error system is unstable; use the unstable-truncation certificate (thm3)"
        )
    d_hinf, d_h2 = hinf_norm(delta_form), h2_norm(delta_form)
    quantities["delta_hinf"] = d_hinf
    quantities["delta_h2"] = d_h2
    condition = d_hinf * quantities["x_hinf"] < 1.0
    cost_bound = None
    if condition:
        s1, s2, bound = _smallgain_bound(quantities, d_hinf, d_h2, 2.0, notes)
        s1_single, _, _ = _smallgain_bound(quantities, d_hinf, d_h2, 1.0, [])
        quantities["s1"] = s1
        quantities["s1_single_h2_term"] = s1_single
        quantities["s2"] = s2
        cost_bound = bound
    stable, alpha = _verified_stable(g, k_r)
    quantities["closed_loop_abscissa"] = alpha
    return ReductionCertificate("cor2", quantities, condition, cost_bound,
                                stable, tuple(notes))


def check_thm3(g: StateSpaceSystem, k: StateSpaceSystem,
               k_r: StateSpaceSystem) -> ReductionCertificate:
    """Certificate for SISO truncation that may drop unstable modes.

    Verifies that the error system has no pole at the origin and that
    ``1 - X*delta`` has no right-half-plane zeros beyond the structural
    ones pinned at the unstable poles of the error system (those always
    cancel inside the closed-loop expressions, never in the scalar
    function itself).  The cost bound multiplies the printed penalty
    terms by the squared peak gain of ``(1 - X*delta)^{-1}`` over the
    imaginary axis, which is finite although that inverse keeps the
    structural unstable poles.
    """
    if not (g.is_siso and k.is_siso and k_r.is_siso):
        raise UnsupportedError("this certificate is defined for SISO systems only")
    _require_stabilizing(g, k)
    notes: list[str] = []
    quantities, fb = _loop_quantities(g, k)
    x = fb.x

    delta_raw = add(k_r, negate(k))
    raw_ev = linalg.eigenvalues(delta_raw.A)
    if raw_ev.size and np.min(np.abs(raw_ev)) <= stab_tol(max(1.0, inf_norm(delta_raw.A))):
        raise ZeroModeError("error system has a pole at the origin")
    if _stable_system(delta_raw):
        delta_min = delta_raw
    else:
        # keep genuine unstable modes, drop the exactly cancelled copies
        from .reduce import split_cancelled_unstable

        try:
            delta_min = split_cancelled_unstable(delta_raw)
        except (AxisPoleError, SeparationError) as exc:
            raise AxisPoleError(f"error system has imaginary-axis poles: {exc}")
    delta_poles = linalg.eigenvalues(delta_min.A)

    # norms of the (possibly unstable) error system over the axis
    try:
        quantities["delta_linf"] = linf_norm(delta_min)
        quantities["delta_l2"] = l2_norm(delta_min)
    except AxisPoleError as exc:
        raise AxisPoleError(f"error system norms undefined: {exc}") from exc

    # 1 - X*delta; unstable modes of the raw product must cancel through
    # the structural zeros of X, leaving only rounding-level content
    # (hidden stable modes are harmless to the zero test below)
    prod = series(x, delta_min)
    if _stable_system(prod):
        prod_min = prod
    else:
        from .reduce import drop_negligible_antistable

        try:
            prod_min = drop_negligible_antistable(prod)
        except (AxisPoleError, SeparationError) as exc:
            prod_min = None
            notes.append(f"product stability undecidable: {exc}")
        if prod_min is None:
            notes.append("X*delta keeps genuine unstable content")
    condition = prod_min is not None
    prefactor = math.inf
    if condition:
        a_inv = prod_min.A + prod_min.B @ prod_min.C
        inverse = StateSpaceSystem(a_inv, prod_min.B, prod_min.C, np.eye(1))
        inv_poles = list(linalg.eigenvalues(a_inv))
        tol = stab_tol(inf_norm(a_inv))
        unstable_delta_poles = [p for p in delta_poles if p.real > tol]
        for p in unstable_delta_poles:
            match = min(
                range(len(inv_poles)),
                key=lambda i: abs(inv_poles[i] - p),
                default=None,
            )
            if match is None or abs(inv_poles[match] - p) > 1e-6 * (1.0 + abs(p)):
                condition = False
                notes.append(
                    f"no structural zero found at the unstable error pole {p:.6g}"
                )
                break
            inv_poles.pop(match)
        if condition and any(z.real >= -tol for z in inv_poles):
            condition = False
            notes.append("1 - X*delta has right-half-plane zeros beyond the structural set")
        if condition:
            try:
                prefactor = linf_norm(inverse)
            except AxisPoleError as exc:
                condition = False
                notes.append(f"inverse peak gain undefined: {exc}")
    quantities["inv_one_minus_xdelta_linf"] = prefactor

    cost_bound = None
    if condition:
        q = quantities
        d_linf = q["delta_linf"]
        d_l2 = q["delta_l2"]
        s1 = (
            2.0 * d_linf * q["x_h2"] * q["xk_h2"]
            + 2.0 * q["ky_h2"] * d_l2 * q["y_hinf"]
            + 2.0 * q["ky_h2"] * d_linf
            * (q["y_h2"] + q["kx_h2"] * q["y_hinf"] + q["kx_hinf"] * q["x_h2"])
        )
        s2 = (
            d_linf**2 * q["x_h2"] ** 2
            + (q["y_hinf"] * (d_linf * q["kx_h2"] + d_l2)) ** 2
            + q["x_h2"] ** 2 * (d_linf * q["kx_hinf"] + d_linf) ** 2
        )
        q["s1"] = s1
        q["s2"] = s2
        cost_bound = prefactor**2 * (q["cost_original"] + s1 + s2)
    stable, alpha = _verified_stable(g, k_r)
    quantities["closed_loop_abscissa"] = alpha
    return ReductionCertificate("thm3", quantities, condition, cost_bound,
                                stable, tuple(notes))
