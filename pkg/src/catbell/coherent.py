"""Coherent-state amplitudes in the Fock and quadrature representations.

Quadratures follow X_theta = a exp(-i theta) + a^dag exp(i theta), so the
vacuum has unit variance in every direction.  The quadrature wavefunction
phase is fixed to agree with the Hermite-function expansion

    <x_theta|n> = exp(-i n theta) (2 pi)^(-1/4) H_n(x / sqrt 2) exp(-x^2 / 4) / sqrt(2^n n!)

so amplitudes (not just densities) from the two representations agree.
"""

import numpy as np
from scipy.stats import poisson

# |gamma|^2 above which exp(-|gamma|^2 / 2) underflows and the recurrence
# has to run in log space.
_LOG_SPACE_THRESHOLD = 700.0

QUADRATURE_VACUUM_VARIANCE = 1.0


def fock_amplitudes(gamma, cutoff):
    """Fock amplitudes <n|gamma> for n = 0..cutoff.

    ``gamma`` may be a scalar or an array; the result has shape
    ``gamma.shape + (cutoff + 1,)``.  Uses A(n+1) = A(n) gamma / sqrt(n+1),
    switching to log-magnitudes when exp(-|gamma|^2/2) would underflow.
    """
    gamma = np.asarray(gamma, dtype=complex)
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    n = np.arange(cutoff + 1)
    mean = np.abs(gamma) ** 2
    if np.all(mean <= _LOG_SPACE_THRESHOLD):
        out = np.empty(gamma.shape + (cutoff + 1,), dtype=complex)
        out[..., 0] = np.exp(-mean / 2)
        for j in range(cutoff):
            out[..., j + 1] = out[..., j] * gamma / np.sqrt(j + 1)
        return out
    # log|A(n)| = -|g|^2/2 + n log|g| - log(n!)/2, phase = n arg(g)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(n[1:]))))
    mag = np.abs(gamma)[..., None]
    with np.errstate(divide="ignore"):
        log_mag = np.where(mag > 0, np.log(mag), -np.inf)
    log_abs = -mean[..., None] / 2 + n * log_mag - log_fact / 2
    log_abs[..., 0] = -mean / 2
    phase = n * np.angle(gamma)[..., None]
    return np.exp(log_abs) * np.exp(1j * phase)


def coherent_fock_amplitude(gamma, n):
    """Single amplitude exp(-|gamma|^2/2) gamma^n / sqrt(n!)."""
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    return complex(fock_amplitudes(complex(gamma), int(n))[-1])


def coherent_overlap(g1, g2):
    """<g1|g2> = exp(-|g1|^2/2 - |g2|^2/2 + conj(g1) g2)."""
    g1 = np.asarray(g1, dtype=complex)
    g2 = np.asarray(g2, dtype=complex)
    return np.exp(-np.abs(g1) ** 2 / 2 - np.abs(g2) ** 2 / 2 + np.conj(g1) * g2)


def quadrature_wavefunction(gamma, theta, x):
    """Amplitude <x_theta|gamma>; broadcasts over all arguments.

    The density is Gaussian with mean 2 Re(gamma exp(-i theta)) and unit
    variance.
    """
    b = np.asarray(gamma, dtype=complex) * np.exp(-1j * np.asarray(theta))
    x = np.asarray(x, dtype=float)
    re, im = b.real, b.imag
    return (2 * np.pi) ** -0.25 * np.exp(-((x - 2 * re) ** 2) / 4 + 1j * (im * x - re * im))


def poisson_tail(mean, cutoff):
    """P(n > cutoff) for a Poisson count with the given mean."""
    return poisson.sf(cutoff, mean)
