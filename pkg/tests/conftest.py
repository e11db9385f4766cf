import numpy as np
import pytest

from ctred.statespace import StateSpaceSystem, frequency_response


def grid_peak_oracle(s: StateSpaceSystem, n: int = 200000,
                     lo: float = -5, hi: float = 5) -> float:
    """Independent peak-gain oracle: dense log sweep refined at the argmax.

    Vectorized through the eigendecomposition for SISO systems.
    """
    ws = np.concatenate([[0.0], np.logspace(lo, hi, n)])
    if s.is_siso and s.n:
        lam, v = np.linalg.eig(s.A)
        bt = np.linalg.solve(v, s.B).ravel()
        ct = (s.C @ v).ravel()
        resid = ct * bt

        def gains(wv):
            return np.abs(
                (resid[None, :] / (1j * wv[:, None] - lam[None, :])).sum(axis=1)
                + s.D[0, 0]
            )

        g = gains(ws)
        best = float(g.max())
        w0 = ws[int(g.argmax())]
        span = max(w0, 1e-6)
        for _ in range(8):
            local = np.linspace(max(w0 - span, 0.0), w0 + span, 2001)
            gl = gains(local)
            best = max(best, float(gl.max()))
            w0 = local[int(gl.argmax())]
            span /= 20.0
        return best
    vals = [
        np.linalg.svd(s.eval(1j * w), compute_uv=False)[0] for w in ws[:2000]
    ]
    return float(np.max(vals))


def transfer_close(s1: StateSpaceSystem, s2: StateSpaceSystem,
                   rel_tol: float = 1e-8, n_points: int = 1000) -> bool:
    """Relative transfer-function agreement on a logarithmic frequency grid."""
    ws = np.concatenate([[0.0], np.logspace(-3, 3, n_points - 1)])
    r1 = frequency_response(s1, ws)
    r2 = frequency_response(s2, ws)
    scale = max(np.max(np.abs(r1)), np.max(np.abs(r2)), 1e-12)
    return bool(np.max(np.abs(r1 - r2)) <= rel_tol * scale)


def max_transfer_diff(s1: StateSpaceSystem, s2: StateSpaceSystem,
                      n_points: int = 1000) -> float:
    ws = np.concatenate([[0.0], np.logspace(-3, 3, n_points - 1)])
    r1 = frequency_response(s1, ws)
    r2 = frequency_response(s2, ws)
    return float(np.max(np.abs(r1 - r2)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)
