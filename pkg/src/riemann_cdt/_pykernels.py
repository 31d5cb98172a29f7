"""NumPy implementation of the propagation kernels.

Same contract as the compiled ``_kernels`` module. The ordered product is
reduced pairwise so the Python-level loop runs only ``log2(N)`` times.
"""
from __future__ import annotations

import numpy as np


def step_product(phases, J, dt):
    phases = np.ascontiguousarray(phases, dtype=float)
    c = np.cos(J * dt)
    s = np.sin(J * dt)
    alpha = np.full(phases.shape, c, dtype=complex)
    beta = 1j * s * np.exp(1j * phases)
    if alpha.size == 0:
        return complex(1.0), complex(0.0)
    while alpha.size > 1:
        if alpha.size % 2:
            alpha = np.append(alpha, 1.0)
            beta = np.append(beta, 0.0)
        # later step (odd index) multiplies from the left
        a1, b1 = alpha[0::2], beta[0::2]
        a2, b2 = alpha[1::2], beta[1::2]
        alpha = a2 * a1 - b2 * np.conj(b1)
        beta = a2 * b1 + b2 * np.conj(a1)
    return complex(alpha[0]), complex(beta[0])


def apply_steps(phases, J, dt, psi):
    phases = np.asarray(phases, dtype=float)
    c = np.cos(J * dt)
    s = np.sin(J * dt)
    up = 1j * s * np.exp(1j * phases)
    dn = 1j * s * np.exp(-1j * phases)
    a0 = complex(psi[0])
    a1 = complex(psi[1])
    for u, d in zip(up.tolist(), dn.tolist()):
        a0, a1 = c * a0 + u * a1, d * a0 + c * a1
    return np.array([a0, a1], dtype=complex)
