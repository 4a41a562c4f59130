"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Set the environment variable ``QRABI_DISABLE_NUMBA=1`` to force the numpy
path (also used automatically when numba is unavailable). The flag is read
once at import time. ``benchmarks/bench_kernels.py`` compares the two paths.
"""

from __future__ import annotations

import math
import os

import numpy as np

_FLAG = os.environ.get("QRABI_DISABLE_NUMBA", "")
NUMBA_DISABLED = _FLAG not in ("", "0", "false", "False")

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled by QRABI_DISABLE_NUMBA")
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def _njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


def using_numba() -> bool:
    """True when the compiled kernel path is active."""
    return NUMBA_ENABLED


def _oscillator_table_impl(n_max, x):
    # Normalized recurrence: overflow-free up to n ~ 1e4. h_0 underflows for
    # |x| beyond ~38, in which case the column is exactly zero.
    out = np.zeros((n_max + 1, x.size))
    h0 = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    out[0] = h0
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * h0
    for n in range(1, n_max):
        out[n + 1] = (
            math.sqrt(2.0 / (n + 1.0)) * x * out[n]
            - math.sqrt(n / (n + 1.0)) * out[n - 1]
        )
    return out


def _pp_energy_impl(w_a, w_b, x_a, x_b, xi_a, xi_b, omega, Omega, g_tilde):
    # <psi|H|psi> for psi_+ = w_a phi_a + w_b phi_b, psi_-(x) = -psi_+(-x),
    # assembled from closed-form Gaussian matrix elements of the
    # spin-up single-particle Hamiltonian plus the spin-flip cross term.
    eps0 = -0.5 * (g_tilde * g_tilde + 1.0) * omega
    w = (w_a, w_b)
    xc = (x_a, x_b)
    xi = (xi_a, xi_b)
    energy = 0.0
    for i in range(2):
        for j in range(2):
            A = xi[i]
            B = xi[j]
            a = -xc[i]
            b = -xc[j]
            s = A + B
            S = math.sqrt(2.0) * (A * B) ** 0.25 / math.sqrt(s) * math.exp(
                -A * B * (a - b) ** 2 / (2.0 * s)
            )
            xbar = (A * a + B * b) / s
            var = 1.0 / s
            kin = 0.5 * omega * A * B * S * ((xbar - a) * (xbar - b) + var)
            pot = 0.5 * omega * S * ((xbar + g_tilde) ** 2 + var) + eps0 * S
            # overlap of phi_i(x) with the mirrored phi_j(-x)
            T = math.sqrt(2.0) * (A * B) ** 0.25 / math.sqrt(s) * math.exp(
                -A * B * (xc[i] + xc[j]) ** 2 / (2.0 * s)
            )
            energy += w[i] * w[j] * (kin + pot - 0.5 * Omega * T)
    return energy


if NUMBA_ENABLED:
    oscillator_table = _njit(cache=True)(_oscillator_table_impl)
    pp_energy = _njit(cache=True)(_pp_energy_impl)
else:
    oscillator_table = _oscillator_table_impl
    pp_energy = _pp_energy_impl

# Uncompiled references, kept for benchmarking both paths side by side.
oscillator_table_numpy = _oscillator_table_impl
pp_energy_numpy = _pp_energy_impl
