"""Independent reference implementations used only to check the package.

Each oracle deliberately avoids the code path it verifies: matrix algebra
is spelled out with index loops (no shared helpers), the innovation
covariance is inverted with the general numpy solver instead of the
closed-form 2x2, the per-axis filter is a hand-derived scalar recursion,
and the Bayesian grid filter discretizes the posterior directly.
"""

from __future__ import annotations

import math

import numpy as np


# --- dense textbook filter (loop-based linear algebra) ------------------------


def mat_mul(A, B):
    n, k = len(A), len(A[0])
    k2, m = len(B), len(B[0])
    assert k == k2
    out = [[0.0] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            s = 0.0
            for p in range(k):
                s += A[i][p] * B[p][j]
            out[i][j] = s
    return out


def mat_T(A):
    return [list(col) for col in zip(*A)]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def dense_predict(mean, cov, F, Q):
    """mean' = F mean; cov' = F cov F^T + Q, evaluated with index loops."""
    F_l = [list(r) for r in F]
    P_l = [list(r) for r in cov]
    Q_l = [list(r) for r in Q]
    mean_out = mat_vec(F_l, list(mean))
    cov_out = mat_add(mat_mul(mat_mul(F_l, P_l), mat_T(F_l)), Q_l)
    return np.array(mean_out), np.array(cov_out)


def dense_update(mean, cov, z, H, R):
    """Textbook gain/update with the general matrix inverse."""
    H_l = [list(r) for r in H]
    P_l = [list(r) for r in cov]
    S = mat_add(mat_mul(mat_mul(H_l, P_l), mat_T(H_l)), [list(r) for r in R])
    S_inv = np.linalg.inv(np.array(S)).tolist()
    K = mat_mul(mat_mul(P_l, mat_T(H_l)), S_inv)
    innov = [zi - hx for zi, hx in zip(z, mat_vec(H_l, list(mean)))]
    mean_out = [m + kv for m, kv in zip(mean, mat_vec(K, innov))]
    KH = mat_mul(K, H_l)
    I_KH = [[(1.0 if i == j else 0.0) - KH[i][j] for j in range(4)] for i in range(4)]
    cov_out = mat_mul(I_KH, P_l)
    return np.array(mean_out), np.array(cov_out)


# --- per-axis two-state scalar recursion --------------------------------------


class AxisFilter:
    """Position-velocity filter for one axis, written as scalar formulas."""

    def __init__(self, p, v, pp, pv, vv):
        self.p, self.v = p, v
        self.pp, self.pv, self.vv = pp, pv, vv

    def predict(self, dt, sigma_p):
        p = self.p + dt * self.v
        v = self.v
        pp = self.pp + 2 * dt * self.pv + dt * dt * self.vv
        pv = self.pv + dt * self.vv
        vv = self.vv
        q = sigma_p * sigma_p
        pp += q * dt**4 / 4
        pv += q * dt**3 / 2
        vv += q * dt**2
        return AxisFilter(p, v, pp, pv, vv)

    def update(self, z, sigma_m):
        s = self.pp + sigma_m * sigma_m
        kp = self.pp / s
        kv = self.pv / s
        innov = z - self.p
        p = self.p + kp * innov
        v = self.v + kv * innov
        pp = (1 - kp) * self.pp
        pv = (1 - kp) * self.pv
        vv = self.vv - kv * self.pv
        return AxisFilter(p, v, pp, pv, vv)


# --- brute-force Bayesian grid filter -----------------------------------------


class GridFilter1D:
    """Discretized Bayes for one position-velocity axis.

    The density lives on a (position x velocity) grid of cell midpoints.
    Prediction integrates the exact Gaussian transition kernel (shear by
    velocity plus independent position/velocity noise); the update
    multiplies in the Gaussian measurement likelihood. All integrals are
    midpoint sums, which for grid-resolved Gaussians converge far below
    the comparison tolerance.
    """

    def __init__(self, p_lo, p_hi, v_lo, v_hi, n=400):
        self.p_axis = p_lo + (np.arange(n) + 0.5) * (p_hi - p_lo) / n
        self.v_axis = v_lo + (np.arange(n) + 0.5) * (v_hi - v_lo) / n
        self.dp = self.p_axis[1] - self.p_axis[0]
        self.dv = self.v_axis[1] - self.v_axis[0]
        self.density = np.zeros((n, n))  # [position, velocity]

    def set_gaussian_prior(self, p_mean, p_std, v_mean, v_std):
        gp = np.exp(-0.5 * ((self.p_axis - p_mean) / p_std) ** 2)
        gv = np.exp(-0.5 * ((self.v_axis - v_mean) / v_std) ** 2)
        self.density = np.outer(gp, gv)
        self._normalize()

    def _normalize(self):
        total = self.density.sum() * self.dp * self.dv
        self.density /= total

    def predict(self, dt, q_p, q_v):
        """p' = p + dt v + w_p, v' = v + w_v with independent noises."""
        n = len(self.p_axis)
        sp, sv = math.sqrt(q_p), math.sqrt(q_v)
        # Position stage: for each source velocity column, convolve the
        # position marginal with a Gaussian centred at p + dt*v.
        shifted = np.zeros_like(self.density)
        for vi, v in enumerate(self.v_axis):
            centers = self.p_axis + dt * v  # (n,)
            kernel = np.exp(
                -0.5 * ((self.p_axis[:, None] - centers[None, :]) / sp) ** 2
            ) / (sp * math.sqrt(2 * math.pi))
            shifted[:, vi] = kernel @ self.density[:, vi] * self.dp
        # Velocity stage: plain convolution along the velocity axis.
        kv = np.exp(
            -0.5 * ((self.v_axis[:, None] - self.v_axis[None, :]) / sv) ** 2
        ) / (sv * math.sqrt(2 * math.pi))
        self.density = shifted @ kv.T * self.dv
        self._normalize()

    def update(self, z, sigma_m):
        lik = np.exp(-0.5 * ((self.p_axis - z) / sigma_m) ** 2)
        self.density *= lik[:, None]
        self._normalize()

    def mean(self):
        w = self.density * self.dp * self.dv
        return float((self.p_axis[:, None] * w).sum()), float((self.v_axis[None, :] * w).sum())


# --- metric recounts -----------------------------------------------------------


def pck_bruteforce(pred, gt, threshold, visibility):
    """Per-pair loop recount of the PCK fraction."""
    hits = 0
    total = 0
    T, P = visibility.shape
    for t in range(T):
        for i in range(P):
            if not visibility[t, i]:
                continue
            total += 1
            dx = pred[t, i, 0] - gt[t, i, 0]
            dy = pred[t, i, 1] - gt[t, i, 1]
            if math.hypot(dx, dy) <= threshold:
                hits += 1
    return hits / total


def random_psd(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(4, 4)) * scale
    return A @ A.T + 1e-6 * np.eye(4)
