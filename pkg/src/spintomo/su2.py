"""SU(2) rotations for spin 1/2 and Wigner rotation matrices up to spin 2.

Spin labels are half-integers; internally they are carried as doubled
integers (2j, 2m) so index arithmetic is exact. The small-d function is
evaluated from its Jacobi-polynomial form

    d_{m',m}(beta) = sqrt[(j+m')!(j-m')! / ((j+m)!(j-m)!)]
                     * cos(beta/2)^(m'+m) * sin(beta/2)^(m'-m)
                     * P_{j-m'}^{(m'-m, m'+m)}(cos beta)

wherever both trigonometric exponents are nonnegative (m' >= |m|), and is
extended to the remaining index pairs through the symmetries

    d_{m',m} = (-1)^(m-m') d_{m,m'} = d_{-m,-m'}.

The resulting convention is self-consistent (orthogonal, homomorphic in
beta); relative to the most common textbook table it is the transpose.
All downstream sign-sensitive anchors (Werner tomogram values, frame
completeness) are pinned against this convention by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, factorial, pi, sin, sqrt

import numpy as np

#: Phase placement used by :func:`wigner_D`:
#: D_{m',m}(angles) = exp(i m' third) * d_{m',m}(polar) * exp(i m azimuth).
#: The column phase carries the column index m; with both phases on the row
#: index the family would not multiply like a representation. Under this
#: choice ``qubit_rotation(EulerAngles(a, b, c))`` equals
#: ``wigner_D(1/2, EulerAngles(azimuth=c, polar=b, third=a))`` exactly.
PHASE_CONVENTION = "D[m',m] = exp(i*m'*third) * d[m',m](polar) * exp(i*m*azimuth)"

#: Largest supported spin, as a doubled integer (j = 2). Factorial
#: arithmetic below this cap stays in exact small integers.
MAX_TWICE_J = 4


@dataclass(frozen=True)
class EulerAngles:
    """Rotation angles (azimuth, polar, third) in radians.

    ``azimuth`` and ``third`` are 2*pi-periodic; ``polar`` is clamped into
    [0, pi] on construction. For the single-qubit rotation the triple reads
    (phi, theta, psi); for the spin-3/2 rotation it reads (alpha, beta,
    gamma).
    """

    azimuth: float
    polar: float
    third: float = 0.0

    def __post_init__(self):
        for name in ("azimuth", "polar", "third"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"angle {name} must be finite, got {v}")
        object.__setattr__(self, "polar", min(max(float(self.polar), 0.0), pi))
        object.__setattr__(self, "azimuth", float(self.azimuth))
        object.__setattr__(self, "third", float(self.third))


def as_direction(k, tol: float = 1e-9) -> np.ndarray:
    """Validate a unit 3-vector (measurement direction) and return it."""
    v = np.asarray(k, dtype=float)
    if v.shape != (3,):
        raise ValueError("direction must be a 3-vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("direction components must be finite")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"direction must be a unit vector, |k| = {norm}")
    return v


def twice(value) -> int:
    """Convert a (half-)integer spin label to its exact doubled integer."""
    t = 2.0 * float(value)
    r = round(t)
    if abs(t - r) > 1e-9:
        raise ValueError(f"{value} is not a half-integer")
    return int(r)


def jacobi_poly(n: int, a: float, b: float, x: float) -> float:
    """Jacobi polynomial P_n^{(a,b)}(x) by the three-term recurrence.

    Degenerate parameter combinations that would zero a recurrence
    denominator (possible for negative non-classical a, b) fall back to the
    explicit finite sum; neither path raises for finite inputs.
    """
    if n < 0:
        raise ValueError("polynomial degree must be nonnegative")
    if n == 0:
        return 1.0
    p_prev = 1.0
    p_cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0
    for k in range(2, n + 1):
        c0 = 2.0 * k * (k + a + b) * (2.0 * k + a + b - 2.0)
        if abs(c0) < 1e-12:
            return _jacobi_sum(n, a, b, x)
        c1 = (2.0 * k + a + b - 1.0) * ((2.0 * k + a + b) * (2.0 * k + a + b - 2.0) * x + a * a - b * b)
        c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + a + b)
        p_prev, p_cur = p_cur, (c1 * p_cur - c2 * p_prev) / c0
    return p_cur


def _jacobi_sum(n: int, a: float, b: float, x: float) -> float:
    # hypergeometric finite sum; only used when the recurrence degenerates
    total = 0.0
    for s in range(n + 1):
        c = _binom_real(n + a, n - s) * _binom_real(n + b, s)
        total += c * ((x - 1.0) / 2.0) ** s * ((x + 1.0) / 2.0) ** (n - s)
    return total


def _binom_real(top: float, k: int) -> float:
    out = 1.0
    for i in range(1, k + 1):
        out *= (top - i + 1) / i
    return out


def _check_spin_indices(j2: int, mp2: int, m2: int) -> None:
    if j2 <= 0 or j2 > MAX_TWICE_J:
        raise ValueError(f"unsupported spin 2j={j2}; supported up to 2j={MAX_TWICE_J}")
    for label, v2 in (("m'", mp2), ("m", m2)):
        if abs(v2) > j2:
            raise IndexError(f"|{label}| exceeds j")
        if (j2 - v2) % 2 != 0:
            raise ValueError(f"{label} is not compatible with j (must differ by integers)")


def wigner_d(j, mp, m, beta: float) -> float:
    """Small rotation matrix element d^j_{m',m}(beta).

    Spins may be given as floats (3/2 -> 1.5) or exact integers. Raises
    IndexError when |m'| or |m| exceeds j.
    """
    j2, mp2, m2 = twice(j), twice(mp), twice(m)
    _check_spin_indices(j2, mp2, m2)
    return _wigner_d_twice(j2, mp2, m2, beta)


def _wigner_d_twice(j2: int, mp2: int, m2: int, beta: float) -> float:
    if mp2 >= abs(m2):
        n = (j2 - mp2) // 2
        a = (mp2 - m2) // 2
        b = (mp2 + m2) // 2
        pref = sqrt(
            factorial((j2 + mp2) // 2) * factorial((j2 - mp2) // 2)
            / (factorial((j2 + m2) // 2) * factorial((j2 - m2) // 2))
        )
        return pref * cos(beta / 2.0) ** b * sin(beta / 2.0) ** a * jacobi_poly(n, a, b, cos(beta))
    if -m2 >= abs(mp2):
        # d_{m',m} = d_{-m,-m'}
        return _wigner_d_twice(j2, -m2, -mp2, beta)
    # d_{m',m} = (-1)^(m-m') d_{m,m'}; the swapped pair is directly evaluable
    sign = -1.0 if ((m2 - mp2) // 2) % 2 else 1.0
    return sign * _wigner_d_twice(j2, m2, mp2, beta)


def spin_projections(j) -> np.ndarray:
    """Projections m = j, j-1, ..., -j in descending order."""
    j2 = twice(j)
    return np.arange(j2, -j2 - 1, -2) / 2.0


def wigner_d_matrix(j, beta: float) -> np.ndarray:
    """Full (2j+1)x(2j+1) small-d matrix, rows and columns by descending m."""
    j2 = twice(j)
    _check_spin_indices(j2, j2, j2)
    ms = range(j2, -j2 - 1, -2)
    return np.array([[_wigner_d_twice(j2, r, c, beta) for c in ms] for r in ms])


def wigner_D(j, angles: EulerAngles) -> np.ndarray:
    """Rotation matrix D^j(angles) under :data:`PHASE_CONVENTION`.

    Unitary for any angles; supported for j in {1/2, 3/2} (and the other
    spins below the cap, which share the same construction).
    """
    j2 = twice(j)
    _check_spin_indices(j2, j2, j2)
    d = wigner_d_matrix(j, angles.polar)
    m = np.arange(j2, -j2 - 1, -2) / 2.0
    row_phase = np.exp(1j * m * angles.third)
    col_phase = np.exp(1j * m * angles.azimuth)
    return row_phase[:, None] * d * col_phase[None, :]


def qubit_rotation(angles: EulerAngles) -> np.ndarray:
    """Spin-1/2 rotation u(phi, theta, psi) with unit determinant.

    Entries: cos(theta/2) e^{i(phi+psi)/2}, sin(theta/2) e^{i(phi-psi)/2},
    -sin(theta/2) e^{i(psi-phi)/2}, cos(theta/2) e^{-i(phi+psi)/2}; equal to
    ``wigner_D(1/2, ...)`` under the identification in
    :data:`PHASE_CONVENTION`.
    """
    phi, theta, psi = angles.azimuth, angles.polar, angles.third
    c, s = cos(theta / 2.0), sin(theta / 2.0)
    return np.array(
        [
            [c * np.exp(1j * (phi + psi) / 2.0), s * np.exp(1j * (phi - psi) / 2.0)],
            [-s * np.exp(1j * (psi - phi) / 2.0), c * np.exp(-1j * (phi + psi) / 2.0)],
        ]
    )
