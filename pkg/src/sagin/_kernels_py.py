"""Pure-Python implementations of the numerical kernels.

Used when the compiled ``_kernels`` extension is unavailable, or when
``SAGIN_PURE_PYTHON=1`` is set. Signatures and results match the extension.
"""

import math

import numpy as np


def mie_sums(x: float, m: complex, nstop: int) -> tuple[float, float]:
    """Extinction and scattering efficiencies from the Lorenz-Mie series.

    Riccati-Bessel functions of the real argument are run upward; the
    logarithmic derivative D_n(mx) is run downward, which stays stable for
    absorbing spheres.
    """
    mx = m * x
    nmx = max(nstop, int(abs(mx))) + 16
    d = [0j] * (nmx + 1)
    for n in range(nmx, 0, -1):
        rn = n / mx
        d[n - 1] = rn - 1.0 / (d[n] + rn)

    psi0, psi1 = math.cos(x), math.sin(x)
    chi0, chi1 = -math.sin(x), math.cos(x)
    xi1 = complex(psi1, -chi1)
    qext = 0.0
    qsca = 0.0
    for n in range(1, nstop + 1):
        fn = (2.0 * n - 1.0) / x
        psi = fn * psi1 - psi0
        chi = fn * chi1 - chi0
        xi = complex(psi, -chi)
        da = d[n] / m + n / x
        db = d[n] * m + n / x
        an = (da * psi - psi1) / (da * xi - xi1)
        bn = (db * psi - psi1) / (db * xi - xi1)
        w = 2.0 * n + 1.0
        qext += w * (an.real + bn.real)
        qsca += w * (an.real * an.real + an.imag * an.imag + bn.real * bn.real + bn.imag * bn.imag)
        psi0, psi1 = psi1, psi
        chi0, chi1 = chi1, chi
        xi1 = complex(psi1, -chi1)
    scale = 2.0 / (x * x)
    return qext * scale, qsca * scale


def vvw_line_sum(f: float, f0, strength, width):
    """Sum of Van Vleck-Weisskopf lines at one frequency.

    ``f0`` has shape (L,); ``strength`` (number density times intensity, Hz/m)
    and ``width`` (half width, Hz) have shape (L, P). Returns shape (P,) in 1/m.
    """
    f0 = np.asarray(f0, dtype=float)[:, None]
    strength = np.asarray(strength, dtype=float)
    width = np.asarray(width, dtype=float)
    shape = (f / f0) ** 2 / math.pi * (
        width / ((f0 - f) ** 2 + width**2) + width / ((f0 + f) ** 2 + width**2)
    )
    return np.sum(strength * shape, axis=0)
