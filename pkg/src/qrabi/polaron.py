"""Two-polaron variational ansatz: Gaussian matrix elements, energy
minimization, continuation sweeps and parameter derivatives.

The spin-up component is psi_+(x) = alpha*phi_a(x) + beta*phi_b(x) with
Gaussian polarons phi_i = (xi_i/pi)^(1/4) exp[-xi_i (x + x_i)^2 / 2],
x_i = zeta_i * g_tilde, and psi_-(x) = -psi_+(-x) (parity -1). Weights obey
alpha^2 + beta^2 + 2 alpha beta <phi_a|phi_b> = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .errors import DerivativeInvalidError, ParameterDomainError
from .model import ModelParams

NORMALIZATION_TOL = 1e-8
ZETA_BOUND = 1.4
LOG_XI_BOUNDS = (math.log(0.02), math.log(8.0))


class Polaron(NamedTuple):
    """A single Gaussian polaron: frequency renormalization xi, displacement x."""

    xi: float
    x: float


@dataclass(frozen=True)
class PolaronAnsatz:
    """Variational parameters; label convention zeta_alpha >= 0 >= zeta_beta."""

    alpha: float
    beta: float
    zeta_alpha: float
    zeta_beta: float
    xi_alpha: float
    xi_beta: float
    energy: float | None = None

    def polarons(self, params: ModelParams) -> tuple[Polaron, Polaron]:
        gt = params.g_tilde
        return (
            Polaron(self.xi_alpha, self.zeta_alpha * gt),
            Polaron(self.xi_beta, self.zeta_beta * gt),
        )

    def weights(self) -> np.ndarray:
        return np.array([self.alpha, self.beta])

    def normalization_defect(self, params: ModelParams) -> float:
        pa, pb = self.polarons(params)
        s = overlap(pa, pb)
        return abs(
            self.alpha ** 2 + self.beta ** 2 + 2.0 * self.alpha * self.beta * s - 1.0
        )


@dataclass(frozen=True)
class OverlapTable:
    """All 2x2 inner products entering the polaron-picture QFI assembly.

    Index order is (alpha, beta). ``dx_phi[i, j]`` is <d phi_i/d x_i | phi_j>,
    ``dx_dxi[i, j]`` is <d phi_i/d x_i | d phi_j/d xi_j>, and so on.
    """

    s: np.ndarray
    dx_phi: np.ndarray
    dxi_phi: np.ndarray
    dx_dx: np.ndarray
    dx_dxi: np.ndarray
    dxi_dx: np.ndarray
    dxi_dxi: np.ndarray


def _check_xi(*xis):
    for xi in xis:
        if not (xi > 0) or not math.isfinite(xi):
            raise ParameterDomainError(f"xi must be positive and finite, got {xi}")


def overlap(p_i: Polaron, p_j: Polaron) -> float:
    """<phi_i|phi_j> in closed form."""
    _check_xi(p_i.xi, p_j.xi)
    s = p_i.xi + p_j.xi
    d2 = (p_i.x - p_j.x) ** 2
    return (
        math.sqrt(2.0)
        * (p_i.xi * p_j.xi) ** 0.25
        / math.sqrt(s)
        * math.exp(-p_i.xi * p_j.xi * d2 / (2.0 * s))
    )


def _pair_entries(xi_i, x_i, xi_j, x_j):
    """Closed-form inner products for one ordered pair (i, j)."""
    s = xi_i + xi_j
    d = x_i - x_j
    d2 = d * d
    f_e = math.exp(d2 * xi_i * xi_j / (2.0 * s))
    root2 = math.sqrt(2.0)
    s_ij = root2 * (xi_i * xi_j) ** 0.25 / (math.sqrt(s) * f_e)
    dx_phi = root2 * xi_i ** 1.25 * xi_j ** 1.25 * (x_j - x_i) / (s ** 1.5 * f_e)
    dxi_phi = (
        root2
        * xi_j ** 0.25
        * (xi_j ** 2 - xi_i ** 2 - 2.0 * xi_i * xi_j ** 2 * d2)
        / (4.0 * xi_i ** 0.75 * s ** 2.5 * f_e)
    )
    dx_dx = root2 * xi_i ** 1.25 * xi_j ** 1.25 * (s - xi_i * xi_j * d2) / (s ** 2.5 * f_e)
    dx_dxi = (
        xi_i ** 1.25
        * xi_j ** 0.25
        * d
        * (xi_j ** 2 + xi_i ** 2 * (2.0 * xi_j * d2 - 5.0) - 4.0 * xi_i * xi_j)
        / (2.0 * root2 * s ** 3.5 * f_e)
    )
    dxi_dx = (
        xi_j ** 1.25
        * xi_i ** 0.25
        * (-d)
        * (xi_i ** 2 + xi_j ** 2 * (2.0 * xi_i * d2 - 5.0) - 4.0 * xi_i * xi_j)
        / (2.0 * root2 * s ** 3.5 * f_e)
    )
    dxi_dxi = (
        (
            4.0 * xi_i ** 3 * xi_j ** 3 * d2 * d2
            + s * (2.0 * xi_i * xi_j * d2 - s) * (xi_i ** 2 + xi_j ** 2 - 10.0 * xi_i * xi_j)
        )
        / (8.0 * root2 * s ** 4.5 * xi_i ** 0.75 * xi_j ** 0.75 * f_e)
    )
    return s_ij, dx_phi, dxi_phi, dx_dx, dx_dxi, dxi_dx, dxi_dxi


def derivative_overlaps(ansatz: PolaronAnsatz, params: ModelParams) -> OverlapTable:
    """Evaluate every closed-form overlap/derivative inner product."""
    pols = ansatz.polarons(params)
    _check_xi(pols[0].xi, pols[1].xi)
    mats = [np.zeros((2, 2)) for _ in range(7)]
    for i in range(2):
        for j in range(2):
            entries = _pair_entries(pols[i].xi, pols[i].x, pols[j].xi, pols[j].x)
            for m, e in zip(mats, entries):
                m[i, j] = e
    return OverlapTable(*mats)


def energy(ansatz: PolaronAnsatz, params: ModelParams) -> float:
    """Variational energy <psi|H|psi> from closed-form Gaussian matrix elements."""
    defect = ansatz.normalization_defect(params)
    if defect > NORMALIZATION_TOL:
        raise ParameterDomainError(
            f"ansatz not normalized (defect {defect:.3e} > {NORMALIZATION_TOL})"
        )
    pa, pb = ansatz.polarons(params)
    return kernels.pp_energy(
        ansatz.alpha, ansatz.beta, pa.x, pb.x, pa.xi, pb.xi,
        params.omega, params.Omega, params.g_tilde,
    )


# --- normalization-manifold parameterization ------------------------------
#
# (alpha, beta) = (cos psi, sin psi) / sqrt(1 + S sin(2 psi)) with the mixing
# angle psi in [0, pi/2], so the constraint holds identically, both weights
# stay non-negative and bounded, and the optimizer runs unconstrained in psi.


def weights_from_angle(psi: float, s: float) -> np.ndarray:
    norm = math.sqrt(1.0 + s * math.sin(2.0 * psi))
    return np.array([math.cos(psi), math.sin(psi)]) / norm


def angle_from_weights(alpha: float, beta: float) -> float:
    return math.atan2(beta, alpha)


def weight_derivatives(psi: float, s: float) -> tuple[np.ndarray, np.ndarray]:
    """(d(alpha,beta)/dpsi, d(alpha,beta)/dS) of the manifold map."""
    c, sn = math.cos(psi), math.sin(psi)
    n2 = 1.0 + s * math.sin(2.0 * psi)
    n = math.sqrt(n2)
    u = np.array([c, sn])
    d_psi = np.array([-sn, c]) / n - u * (s * math.cos(2.0 * psi)) / (n2 * n)
    d_s = -u * math.sin(2.0 * psi) / (2.0 * n2 * n)
    return d_psi, d_s


def _vector_to_ansatz(p: np.ndarray, params: ModelParams) -> PolaronAnsatz:
    psi, za, zb, lxa, lxb = p
    gt = params.g_tilde
    xi_a, xi_b = math.exp(lxa), math.exp(lxb)
    s = overlap(Polaron(xi_a, za * gt), Polaron(xi_b, zb * gt))
    alpha, beta = weights_from_angle(psi, s)
    return PolaronAnsatz(alpha, beta, za, zb, xi_a, xi_b)


def _ansatz_to_vector(ansatz: PolaronAnsatz, params: ModelParams) -> np.ndarray:
    return np.array([
        angle_from_weights(ansatz.alpha, ansatz.beta),
        ansatz.zeta_alpha,
        ansatz.zeta_beta,
        math.log(ansatz.xi_alpha),
        math.log(ansatz.xi_beta),
    ])


def _objective(p: np.ndarray, params: ModelParams) -> float:
    psi, za, zb, lxa, lxb = p
    gt = params.g_tilde
    xi_a, xi_b = math.exp(lxa), math.exp(lxb)
    xa, xb = za * gt, zb * gt
    s = overlap(Polaron(xi_a, xa), Polaron(xi_b, xb))
    w_a, w_b = weights_from_angle(psi, s)
    return kernels.pp_energy(w_a, w_b, xa, xb, xi_a, xi_b,
                             params.omega, params.Omega, params.g_tilde)


def semiclassical_zeta(g_bar: float) -> float:
    """Low-frequency displacement renormalization sqrt(1 - 1/g_bar^4)."""
    if g_bar <= 1.0:
        return 0.0
    return math.sqrt(1.0 - g_bar ** -4)


def _seed_vectors(params: ModelParams, warm_start: PolaronAnsatz | None) -> list[np.ndarray]:
    z_sc = semiclassical_zeta(params.g_bar) if params.Omega > 0 else 1.0
    xi_sc = max(z_sc, 0.5)
    lx = math.log(xi_sc)
    quarter = math.pi / 4.0
    seeds = [
        np.array([0.15, 0.05, -0.05, 0.0, 0.0]),            # near-merged polarons
        np.array([quarter, z_sc, -z_sc, lx, lx]),           # split, equal weights
        np.array([0.6, z_sc, -z_sc, lx, lx]),               # split, tilted weights
        np.array([0.05, max(z_sc, 0.3), -0.02, lx, 0.0]),   # dominant single polaron
        np.array([quarter, 0.5 * z_sc, -0.5 * z_sc, 0.0, 0.0]),
    ]
    if warm_start is not None:
        seeds.insert(0, _ansatz_to_vector(warm_start, params))
    return seeds


# opposite-well convention: polaron a sits at zeta >= 0, polaron b at zeta <= 0
_BOUNDS = [
    (0.0, math.pi / 2.0),
    (0.0, ZETA_BOUND),
    (-ZETA_BOUND, 0.0),
    LOG_XI_BOUNDS,
    LOG_XI_BOUNDS,
]


def _minimize_from(p0: np.ndarray, params: ModelParams):
    res = minimize(
        _objective, p0, args=(params,), method="Nelder-Mead", bounds=_BOUNDS,
        options={"xatol": 1e-11, "fatol": 1e-13, "maxiter": 8000, "maxfev": 8000},
    )
    # restart with a fresh simplex to escape premature simplex collapse
    res2 = minimize(
        _objective, res.x, args=(params,), method="Nelder-Mead", bounds=_BOUNDS,
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 8000, "maxfev": 8000},
    )
    return res2 if res2.fun <= res.fun else res


def canonicalize(ansatz: PolaronAnsatz) -> PolaronAnsatz:
    """Apply the label convention: zeta_alpha >= zeta_beta, both weights >= 0."""
    a = ansatz
    if a.zeta_alpha < a.zeta_beta:
        a = replace(
            a,
            alpha=a.beta, beta=a.alpha,
            zeta_alpha=a.zeta_beta, zeta_beta=a.zeta_alpha,
            xi_alpha=a.xi_beta, xi_beta=a.xi_alpha,
        )
    if a.alpha < 0 and a.beta <= 0:
        a = replace(a, alpha=-a.alpha, beta=-a.beta)
    return a


def optimize(params: ModelParams, warm_start: PolaronAnsatz | None = None,
             multi_start: bool = True) -> PolaronAnsatz:
    """Minimize the variational energy; returns the best local minimum found."""
    seeds = _seed_vectors(params, warm_start)
    if not multi_start:
        seeds = seeds[:1]
    best = None
    for p0 in seeds:
        res = _minimize_from(p0, params)
        if best is None or res.fun < best.fun:
            best = res
    ansatz = canonicalize(_vector_to_ansatz(best.x, params))
    return replace(ansatz, energy=float(best.fun))


@dataclass
class PolaronSweep:
    """Continuation sweep of optimized ansaetze over an ascending g_bar grid."""

    omega: float
    Omega: float
    gbar: np.ndarray
    ansatz: list[PolaronAnsatz]
    discontinuities: tuple[int, ...] = ()

    def params_at(self, index: int) -> ModelParams:
        base = ModelParams(self.omega, self.Omega, 0.0)
        return base.with_g(float(self.gbar[index]) * base.gc0)


def _parameter_jumps(vectors: np.ndarray) -> np.ndarray:
    return np.linalg.norm(np.diff(vectors, axis=0), axis=1)


def continuation_sweep(omega: float, Omega: float, gbar_grid) -> PolaronSweep:
    """Sequential warm-started optimization along the grid.

    Branch discontinuities (parameter jump > 10x the local scale) trigger a
    multi-start re-run at the offending points; surviving jumps are recorded.
    """
    gbar = np.asarray(gbar_grid, dtype=float)
    if gbar.size == 0:
        raise ParameterDomainError("empty grid")
    if np.any(np.diff(gbar) < 0):
        raise ParameterDomainError("g_bar grid must be ascending")
    base = ModelParams(omega, Omega, 0.0)
    results: list[PolaronAnsatz] = []
    warm = None
    for gb in gbar:
        params = base.with_g(float(gb) * base.gc0)
        ans = optimize(params, warm_start=warm, multi_start=warm is None)
        results.append(ans)
        warm = ans
    if gbar.size >= 4:
        vectors = np.array([
            _ansatz_to_vector(a, PolaronSweep(omega, Omega, gbar, results).params_at(k))
            for k, a in enumerate(results)
        ])
        jumps = _parameter_jumps(vectors)
        scale = np.median(jumps) + 1e-9
        flagged = np.flatnonzero(jumps > 10.0 * scale)
        for k in flagged:
            for idx in (k, k + 1):
                params = PolaronSweep(omega, Omega, gbar, results).params_at(int(idx))
                ans = optimize(params, warm_start=results[idx], multi_start=True)
                if ans.energy < results[idx].energy:
                    results[idx] = ans
        vectors = np.array([
            _ansatz_to_vector(a, PolaronSweep(omega, Omega, gbar, results).params_at(k))
            for k, a in enumerate(results)
        ])
        jumps = _parameter_jumps(vectors)
        flagged = tuple(int(k) for k in np.flatnonzero(jumps > 10.0 * (np.median(jumps) + 1e-9)))
    else:
        flagged = ()
    return PolaronSweep(omega, Omega, gbar, results, discontinuities=flagged)


def _central_derivative(x, y):
    """First and second derivative at the middle of three (possibly nonuniform) points."""
    x0, x1, x2 = x
    y0, y1, y2 = y
    h1, h2 = x1 - x0, x2 - x1
    d1 = (y2 * h1 ** 2 + y1 * (h2 ** 2 - h1 ** 2) - y0 * h2 ** 2) / (h1 * h2 * (h1 + h2))
    d2 = 2.0 * (y2 * h1 - y1 * (h1 + h2) + y0 * h2) / (h1 * h2 * (h1 + h2))
    return d1, d2


def parameter_derivatives(sweep: PolaronSweep, index: int) -> dict:
    """Central finite-difference flows of the variational parameters at a grid point.

    The weight derivatives are propagated through the normalization manifold
    (chain rule in the mixing angle and the overlap S), which keeps the assembled
    <psi'|psi> at machine zero.
    """
    if index <= 0 or index >= len(sweep.ansatz) - 1:
        raise DerivativeInvalidError(f"index {index} has no two-sided neighbors")
    if index in sweep.discontinuities or (index - 1) in sweep.discontinuities:
        raise DerivativeInvalidError(f"branch discontinuity flagged at index {index}")
    idx = (index - 1, index, index + 1)
    gb = [float(sweep.gbar[k]) for k in idx]
    ans = [sweep.ansatz[k] for k in idx]
    params = sweep.params_at(index)
    a1 = ans[1]

    dzeta = np.empty(2)
    dxi = np.empty(2)
    d2zeta = np.empty(2)
    for comp, (zsel, xsel) in enumerate(
        [(lambda a: a.zeta_alpha, lambda a: a.xi_alpha),
         (lambda a: a.zeta_beta, lambda a: a.xi_beta)]
    ):
        dzeta[comp], d2zeta[comp] = _central_derivative(gb, [zsel(a) for a in ans])
        dxi[comp], _ = _central_derivative(gb, [xsel(a) for a in ans])

    # dx_i/dg_bar = (dzeta_i/dg_bar * g_bar + zeta_i) * sqrt(Omega/(2*omega))
    scale = math.sqrt(sweep.Omega / (2.0 * sweep.omega))
    zeta = np.array([a1.zeta_alpha, a1.zeta_beta])
    dx = (dzeta * gb[1] + zeta) * scale

    # mixing-angle flow along the sweep
    psis = [angle_from_weights(a.alpha, a.beta) for a in ans]
    dpsi, _ = _central_derivative(gb, psis)

    # dS/dg_bar assembled from the same closed forms used in the QFI
    table = derivative_overlaps(a1, params)
    ds = (
        table.dx_phi[0, 1] * dx[0] + table.dxi_phi[0, 1] * dxi[0]
        + table.dx_phi[1, 0] * dx[1] + table.dxi_phi[1, 0] * dxi[1]
    )
    pa, pb = a1.polarons(params)
    s = overlap(pa, pb)
    d_w_psi, d_w_s = weight_derivatives(psis[1], s)
    dweights = d_w_psi * dpsi + d_w_s * ds

    return {
        "dzeta": dzeta,
        "dxi": dxi,
        "d2zeta": d2zeta,
        "dx": dx,
        "dweights": dweights,
        "dpsi": dpsi,
        "ds": ds,
        "overlap_table": table,
    }


def sweep_energy_check(sweep: PolaronSweep, ed_energies) -> np.ndarray:
    """Variational-gap diagnostics E_PP - E_ED per grid point (must be >= 0)."""
    pp = np.array([a.energy for a in sweep.ansatz])
    return pp - np.asarray(ed_energies, dtype=float)


def smoothness_warning(sweep: PolaronSweep, threshold: float = 0.05):
    dz = np.abs(np.diff([a.zeta_alpha for a in sweep.ansatz]))
    if np.any(dz > threshold):
        warnings.warn("zeta branch shows jumps above smoothness threshold")
