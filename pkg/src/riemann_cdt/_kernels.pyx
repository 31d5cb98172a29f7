# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernels.

Every step propagator of the rotated-frame Hamiltonian
``H = -J (cos F sx - sin F sy)`` is an SU(2) matrix
``[[c, i s e^{iF}], [i s e^{-iF}, c]]`` with ``c = cos(J dt)`` and
``s = sin(J dt)``, so a product is carried as the pair (alpha, beta) of
``[[alpha, beta], [-conj(beta), conj(alpha)]]``.
"""
import numpy as np

from libc.math cimport cos, sin


def step_product(const double[::1] phases, double J, double dt):
    """Ordered product ``M_{N-1} ... M_1 M_0``; returns (alpha, beta)."""
    cdef Py_ssize_t k, n = phases.shape[0]
    cdef double c = cos(J * dt)
    cdef double s = sin(J * dt)
    cdef double ar = 1.0, ai = 0.0, br = 0.0, bi = 0.0
    cdef double mbr, mbi, nar, nai, nbr, nbi, f
    for k in range(n):
        f = phases[k]
        # beta_M = i s e^{iF}
        mbr = -s * sin(f)
        mbi = s * cos(f)
        # alpha' = c alpha - beta_M conj(beta)
        nar = c * ar - (mbr * br + mbi * bi)
        nai = c * ai - (mbi * br - mbr * bi)
        # beta' = c beta + beta_M conj(alpha)
        nbr = c * br + (mbr * ar + mbi * ai)
        nbi = c * bi + (mbi * ar - mbr * ai)
        ar = nar
        ai = nai
        br = nbr
        bi = nbi
    return complex(ar, ai), complex(br, bi)


def apply_steps(const double[::1] phases, double J, double dt, psi):
    """Propagate a state through the step sequence one step at a time."""
    cdef Py_ssize_t k, n = phases.shape[0]
    cdef double c = cos(J * dt)
    cdef double s = sin(J * dt)
    cdef double complex a0 = psi[0]
    cdef double complex a1 = psi[1]
    cdef double complex n0, n1, up, dn
    cdef double f
    for k in range(n):
        f = phases[k]
        up = 1j * s * (cos(f) + 1j * sin(f))
        dn = 1j * s * (cos(f) - 1j * sin(f))
        n0 = c * a0 + up * a1
        n1 = dn * a0 + c * a1
        a0 = n0
        a1 = n1
    return np.array([a0, a1], dtype=np.complex128)
