"""Correlation functions, Bell/CHSH bounds and the steering inequality.

The correlation function of a 4x4 state along unit directions k1, k2 is
E(k1, k2) = Tr[(k1.sigma (x) k2.sigma) rho]. It is computed four ways:
directly by that trace, through the two-qubit frame in both symbol/dual
orders, and through the spin-3/2 frame; all four agree to quadrature
accuracy, which is the computational content of treating the two pictures
as equivalent.

E is bilinear in the directions through the 3x3 correlation tensor
T_ij = Tr(rho sigma_i (x) sigma_j): E = k1^T T k2. The largest value of E
over direction pairs is the top singular value of T; the CHSH maximum is
2*sqrt(s1^2 + s2^2) over the two largest singular values. Both closed
forms are cross-validated by a deterministic direction-lattice search with
local refinement.

The steering inequality evaluated here reads

    max_{k1,k2} E(k1, k2) >= (2/3) * sum_{ij} T_ij   (non-steerable states)

and the report exposes the numbers under both readings of the sum (all
nine entries, and the diagonal only), never just a boolean: for the Werner
family the inequality holds over the whole parameter range, so it cannot
by itself single out a steerable subdomain.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .matcore import PAULI, IDENTITY_2, pauli_dot, state_matrix, werner
from .su2 import EulerAngles, as_direction
from .frames import (
    FramePoint2Q,
    FramePointQudit,
    QuadratureGrid,
    frame_pairing_qudit,
    frame_pairing_two_qubit,
    make_grid,
    tomogram,
    werner_qudit_tomogram_closed,
    werner_two_qubit_tomogram_closed,
)
from .kernel import map_state_qudit_to_two_qubit, map_state_two_qubit_to_qudit

X_AXIS = np.array([1.0, 0.0, 0.0])
Y_AXIS = np.array([0.0, 1.0, 0.0])
Z_AXIS = np.array([0.0, 0.0, 1.0])

VARIANT_SYMBOL_DUAL = "symbol_dual"    # symbol of the observable, dual symbol of the state
VARIANT_DUAL_SYMBOL = "dual_symbol"    # symbol of the state, dual symbol of the observable

NOTE_SUM_READINGS = (
    "rhs_all_entries sums all nine correlation-tensor entries and drives "
    "inequality_holds; rhs_diagonal sums the diagonal only. Both are reported "
    "because the two readings differ for generic states."
)
NOTE_WERNER_DOMAIN = (
    "For the Werner family lhs = |p| and both rhs readings equal (2/3)p, so the "
    "inequality lhs >= rhs holds for every p in [-1/3, 1]; it does not by itself "
    "certify steering in any subdomain (in particular not in 1/3 < p < 1/2). "
    "Verdicts are raw numbers; apply your preferred reading."
)
NOTE_ZZ_RESTRICTION = (
    "correlation_zz is E along the z axes only; the Werner correlation tensor "
    "diag(p, -p, p) carries equal-magnitude x and y contributions, so the zz "
    "value alone understates the correlation structure."
)


@dataclass(frozen=True)
class ObservableTriple:
    """Commuting pair of single-side spin observables and their product."""

    first: np.ndarray
    second: np.ndarray
    product: np.ndarray
    k1: np.ndarray
    k2: np.ndarray

    def __post_init__(self):
        comm = self.first @ self.second - self.second @ self.first
        if np.abs(comm).max() > 1e-12:
            raise ValueError("observables do not commute")
        if np.abs(self.product - self.first @ self.second).max() > 1e-12:
            raise ValueError("product observable does not factor")
        for op in (self.first, self.second, self.product):
            if np.abs(op - op.conj().T).max() > 1e-12:
                raise ValueError("observable not Hermitian")


def observable_first(k1) -> np.ndarray:
    """Spin of the first side along k1: (k1 . sigma) (x) I."""
    return np.kron(pauli_dot(as_direction(k1)), IDENTITY_2)


def observable_second(k2) -> np.ndarray:
    """Spin of the second side along k2: I (x) (k2 . sigma)."""
    return np.kron(IDENTITY_2, pauli_dot(as_direction(k2)))


def product_observable(k1, k2) -> ObservableTriple:
    """The product observable (k1 . sigma) (x) (k2 . sigma).

    Squares to the identity for unit directions, so its eigenvalues are
    +-1 (each twice) and |E| <= 1 for any state.
    """
    k1 = as_direction(k1)
    k2 = as_direction(k2)
    return ObservableTriple(
        first=observable_first(k1),
        second=observable_second(k2),
        product=np.kron(pauli_dot(k1), pauli_dot(k2)),
        k1=k1,
        k2=k2,
    )


def correlation_direct(state, k1, k2) -> float:
    """E(k1, k2) as a plain operator trace."""
    rho = state_matrix(state)
    value = np.trace(rho @ product_observable(k1, k2).product)
    if abs(value.imag) > 1e-12:
        raise ArithmeticError(f"correlation has imaginary part {value.imag:.3e}")
    return float(value.real)


def correlation_tomographic_two_qubit(state, k1, k2, grid: QuadratureGrid,
                                      variant: str = VARIANT_SYMBOL_DUAL) -> float:
    """E(k1, k2) through the two-qubit frame pairing, either symbol order."""
    rho = state_matrix(state)
    b = product_observable(k1, k2).product
    if variant == VARIANT_SYMBOL_DUAL:
        value = frame_pairing_two_qubit(b, rho, grid)
    elif variant == VARIANT_DUAL_SYMBOL:
        value = frame_pairing_two_qubit(rho, b, grid)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return float(value.real)


def correlation_tomographic_qudit(state, k1, k2, grid: QuadratureGrid) -> float:
    """E(k1, k2) through the spin-3/2 frame pairing.

    The state and the product observable are read in the spin-3/2 basis;
    the numerical value coincides with :func:`correlation_direct`.
    """
    rho = state_matrix(state)
    b = product_observable(k1, k2).product
    return float(frame_pairing_qudit(b, rho, grid).real)


def correlation_tensor(state) -> np.ndarray:
    """T_ij = Tr(rho sigma_i (x) sigma_j), a real 3x3 matrix."""
    rho = state_matrix(state)
    t = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            value = np.trace(rho @ np.kron(PAULI[i], PAULI[j]))
            if abs(value.imag) > 1e-12:
                raise ArithmeticError("correlation tensor entry not real")
            t[i, j] = value.real
    return t


# --------------------------------------------------------------------------
# direction maximization

def _lexicographic_unit(subspace: np.ndarray) -> np.ndarray:
    """Lexicographically largest unit vector in the span of the columns."""
    projector = subspace @ subspace.T
    for axis in range(3):
        candidate = projector @ np.eye(3)[axis]
        norm = np.linalg.norm(candidate)
        if norm > 1e-12:
            return candidate / norm
    raise ValueError("empty subspace")


def max_correlation(t) -> tuple[float, np.ndarray, np.ndarray]:
    """Largest E over direction pairs: top singular value of T.

    Returns (value, k1, k2) with value >= 0. Degenerate top singular
    spaces are tie-broken deterministically by picking the
    lexicographically largest maximizing direction.
    """
    t = np.asarray(t, dtype=float)
    if t.shape != (3, 3):
        raise ValueError("correlation tensor must be 3x3")
    u, s, _ = np.linalg.svd(t)
    if s[0] <= 1e-300:
        k1 = X_AXIS.copy()
        return 0.0, k1, k1.copy()
    degenerate = s >= s[0] * (1.0 - 1e-9)
    if degenerate.sum() == 1:
        k1 = u[:, 0]
        if tuple(-k1) > tuple(k1):
            k1 = -k1
    else:
        k1 = _lexicographic_unit(u[:, degenerate])
    k2 = t.T @ k1
    k2 /= np.linalg.norm(k2)
    return float(k1 @ t @ k2), k1, k2


def sphere_directions(n_polar: int = 9, n_azimuth: int = 8) -> np.ndarray:
    """Deterministic direction lattice, antipodally closed.

    theta runs over n_polar values from 0 to pi inclusive, phi over
    n_azimuth uniform values; the lattice contains the coordinate axes and
    the diagonal directions, which are exact maximizers for tensors that
    are diagonal in the coordinate frame. Default size is 58 directions.
    """
    theta = np.linspace(0.0, pi, n_polar)
    phi = 2.0 * pi * np.arange(n_azimuth) / n_azimuth
    dirs = [np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])]
    for th in theta[1:-1]:
        for ph in phi:
            dirs.append(np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]))
    return np.array(dirs)


def max_correlation_grid(t, n_polar: int = 9, n_azimuth: int = 8,
                         refine_steps: int = 60) -> float:
    """Grid-search confirmation of :func:`max_correlation`.

    Searches the direction lattice and then refines by alternating the
    closed-form best response (k1 -> T k2 / |..|, k2 -> T^T k1 / |..|),
    which increases the value monotonically.
    """
    t = np.asarray(t, dtype=float)
    dirs = sphere_directions(n_polar, n_azimuth)
    values = dirs @ t @ dirs.T
    i, j = np.unravel_index(np.argmax(values), values.shape)
    k1, k2 = dirs[i], dirs[j]
    best = float(values[i, j])
    for _ in range(refine_steps):
        v = t @ k2
        if np.linalg.norm(v) > 1e-15:
            k1 = v / np.linalg.norm(v)
        v = t.T @ k1
        if np.linalg.norm(v) > 1e-15:
            k2 = v / np.linalg.norm(v)
        best = max(best, float(k1 @ t @ k2))
    return best


# --------------------------------------------------------------------------
# CHSH

def chsh_value(state, a, b, c, d) -> float:
    """The four-direction combination E(a,b) + E(a,c) + E(d,b) - E(d,c)."""
    return (
        correlation_direct(state, a, b)
        + correlation_direct(state, a, c)
        + correlation_direct(state, d, b)
        - correlation_direct(state, d, c)
    )


@dataclass(frozen=True)
class ChshResult:
    value: float
    directions: dict
    candidate_value: float
    grid_value: float


def chsh_max(state_or_tensor, n_polar: int = 9, n_azimuth: int = 8,
             refine_steps: int = 80) -> ChshResult:
    """Maximum |CHSH| over four directions.

    The closed-form candidate 2*sqrt(s1^2 + s2^2) (top two singular values
    of T, directions from the corresponding singular vectors) is checked
    against a direction-lattice search refined by alternating best
    responses; the returned value is the larger of the two and the two
    always agree to the refinement tolerance.
    """
    if isinstance(state_or_tensor, np.ndarray) and state_or_tensor.shape == (3, 3) \
            and not np.iscomplexobj(state_or_tensor):
        t = np.asarray(state_or_tensor, dtype=float)
    else:
        t = correlation_tensor(state_or_tensor)
    u, s, vt = np.linalg.svd(t)
    candidate = 2.0 * sqrt(s[0] ** 2 + s[1] ** 2)
    if candidate > 0:
        chi = np.arctan2(s[1], s[0])
        b = np.cos(chi) * vt[0] + np.sin(chi) * vt[1]
        c = np.cos(chi) * vt[0] - np.sin(chi) * vt[1]
        a, d = u[:, 0], u[:, 1]
        directions = (a, b, c, d)
    else:
        directions = (X_AXIS, X_AXIS, X_AXIS, X_AXIS)

    lattice = sphere_directions(n_polar, n_azimuth)
    m = lattice @ t @ lattice.T  # m[i, j] = e(dir_i, dir_j)
    plus = m[:, :, None] + m[:, None, :]    # over (a, b, c)
    minus = m[:, :, None] - m[:, None, :]   # over (d, b, c)
    s1 = plus.max(axis=0)
    s2 = minus.max(axis=0)
    total = s1 + s2
    bi, ci = np.unravel_index(np.argmax(total), total.shape)
    ai = int(np.argmax(plus[:, bi, ci]))
    di = int(np.argmax(minus[:, bi, ci]))
    ga, gb, gc, gd = lattice[ai], lattice[bi], lattice[ci], lattice[di]
    grid_value = float(total[bi, ci])

    def refine(a, b, c, d):
        value = 0.0
        for _ in range(refine_steps):
            v = t @ (b + c)
            if np.linalg.norm(v) > 1e-15:
                a = v / np.linalg.norm(v)
            v = t @ (b - c)
            if np.linalg.norm(v) > 1e-15:
                d = v / np.linalg.norm(v)
            v = t.T @ (a + d)
            if np.linalg.norm(v) > 1e-15:
                b = v / np.linalg.norm(v)
            v = t.T @ (a - d)
            if np.linalg.norm(v) > 1e-15:
                c = v / np.linalg.norm(v)
            value = float(a @ t @ b + a @ t @ c + d @ t @ b - d @ t @ c)
        return value, (a, b, c, d)

    refined_value, refined_dirs = refine(ga, gb, gc, gd)
    if refined_value >= candidate:
        value, best_dirs = refined_value, refined_dirs
    else:
        value, best_dirs = candidate, directions
    return ChshResult(
        value=float(value),
        directions={name: list(map(float, vec)) for name, vec in zip("abcd", best_dirs)},
        candidate_value=float(candidate),
        grid_value=grid_value,
    )


# --------------------------------------------------------------------------
# steering report

@dataclass(frozen=True)
class SteeringReport:
    """Numbers behind the steering inequality and the CHSH diagnostics."""

    p: float | None
    tensor: np.ndarray
    lhs: float
    rhs_all_entries: float
    rhs_diagonal: float
    inequality_holds: bool
    chsh_max: float
    bell_violated: bool
    correlation_forms: dict
    max_directions: dict
    notes: tuple

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "tensor": [[float(x) for x in row] for row in self.tensor],
            "lhs": self.lhs,
            "rhs_all_entries": self.rhs_all_entries,
            "rhs_diagonal": self.rhs_diagonal,
            "inequality_holds": self.inequality_holds,
            "chsh_max": self.chsh_max,
            "bell_violated": self.bell_violated,
            "correlation_forms": self.correlation_forms,
            "max_directions": self.max_directions,
            "notes": list(self.notes),
        }


def correlation_forms(state, k1, k2, grid_pair: QuadratureGrid,
                      grid_single: QuadratureGrid) -> dict:
    """All four correlation-function forms at one direction pair."""
    forms = {
        "direct": correlation_direct(state, k1, k2),
        "tomo_2q_a": correlation_tomographic_two_qubit(state, k1, k2, grid_pair,
                                                       VARIANT_SYMBOL_DUAL),
        "tomo_2q_b": correlation_tomographic_two_qubit(state, k1, k2, grid_pair,
                                                       VARIANT_DUAL_SYMBOL),
        "tomo_qudit": correlation_tomographic_qudit(state, k1, k2, grid_single),
    }
    return forms


def _form_spread(forms: dict) -> float:
    values = list(forms.values())
    return max(abs(x - y) for x in values for y in values)


def steering_check(state, k1=Z_AXIS, k2=Z_AXIS,
                   grid_pair: QuadratureGrid | None = None,
                   grid_single: QuadratureGrid | None = None,
                   p: float | None = None) -> SteeringReport:
    """Evaluate the steering inequality and CHSH diagnostics for a state.

    ``k1``/``k2`` pick the direction pair at which the four correlation
    forms are reported (default: both along z).
    """
    grid_pair = grid_pair if grid_pair is not None else make_grid(spheres=2)
    grid_single = grid_single if grid_single is not None else make_grid(spheres=1)
    t = correlation_tensor(state)
    lhs, d1, d2 = max_correlation(t)
    chsh = chsh_max(t)
    forms = correlation_forms(state, k1, k2, grid_pair, grid_single)
    notes = [NOTE_SUM_READINGS]
    if p is not None:
        notes.append(NOTE_WERNER_DOMAIN)
    return SteeringReport(
        p=p,
        tensor=t,
        lhs=float(lhs),
        rhs_all_entries=float(2.0 / 3.0 * t.sum()),
        rhs_diagonal=float(2.0 / 3.0 * np.trace(t)),
        inequality_holds=bool(lhs >= 2.0 / 3.0 * t.sum()),
        chsh_max=chsh.value,
        bell_violated=bool(chsh.value > 2.0),
        correlation_forms=forms,
        max_directions={"k1": [float(x) for x in d1], "k2": [float(x) for x in d2]},
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class WernerReport:
    """Aggregated Werner-family diagnostics around one parameter value."""

    p: float
    correlation_zz: float
    steering: SteeringReport
    correlation_form_spread: float
    tomogram_spot_checks: dict
    kernel_mapping_residual: dict
    notes: tuple

    def as_dict(self) -> dict:
        out = self.steering.as_dict()
        out["correlation_zz"] = self.correlation_zz
        out["correlation_form_spread"] = self.correlation_form_spread
        out["tomogram_spot_checks"] = self.tomogram_spot_checks
        out["kernel_mapping_residual"] = self.kernel_mapping_residual
        out["notes"] = list(self.notes)
        return out


def werner_report(p: float, grid_pair: QuadratureGrid | None = None,
                  grid_single: QuadratureGrid | None = None,
                  n_spot_points: int = 12, seed: int = 97) -> WernerReport:
    """Full Werner-state analysis at parameter ``p``.

    Aggregates E(z, z), the correlation tensor and steering/CHSH numbers,
    the four correlation-function forms with their spread, spot checks of
    both tomograms against their closed forms, and the kernel-mapping
    residual in both directions.
    """
    grid_pair = grid_pair if grid_pair is not None else make_grid(spheres=2)
    grid_single = grid_single if grid_single is not None else make_grid(spheres=1)
    state = werner(p)
    report = steering_check(state, Z_AXIS, Z_AXIS, grid_pair, grid_single, p=p)
    rng = np.random.default_rng(seed)

    qudit_dev = 0.0
    pair_dev = 0.0
    map_dev_q2p = 0.0
    map_dev_p2q = 0.0
    for _ in range(n_spot_points):
        alpha, beta = rng.uniform(0, 2 * pi), rng.uniform(0, pi)
        for m in (1.5, 0.5, -0.5, -1.5):
            point = FramePointQudit(m, EulerAngles(alpha, beta))
            direct = tomogram(state, point)
            qudit_dev = max(qudit_dev, abs(direct - werner_qudit_tomogram_closed(m, p, alpha, beta)))
            map_dev_p2q = max(map_dev_p2q,
                              abs(map_state_two_qubit_to_qudit(state, grid_pair, point) - direct))
        th1, th2 = rng.uniform(0, pi, 2)
        ph1, ph2 = rng.uniform(0, 2 * pi, 2)
        for m1 in (0.5, -0.5):
            for m2 in (0.5, -0.5):
                point = FramePoint2Q(m1, m2, EulerAngles(ph1, th1), EulerAngles(ph2, th2))
                direct = tomogram(state, point)
                closed = werner_two_qubit_tomogram_closed(p, m1, m2, th1, th2, ph1, ph2)
                pair_dev = max(pair_dev, abs(direct - closed))
                map_dev_q2p = max(map_dev_q2p,
                                  abs(map_state_qudit_to_two_qubit(state, grid_single, point) - direct))

    return WernerReport(
        p=float(p),
        correlation_zz=correlation_direct(state, Z_AXIS, Z_AXIS),
        steering=report,
        correlation_form_spread=_form_spread(report.correlation_forms),
        tomogram_spot_checks={
            "qudit_closed_form_max_dev": float(qudit_dev),
            "two_qubit_closed_form_max_dev": float(pair_dev),
            "n_points": n_spot_points,
        },
        kernel_mapping_residual={
            "qudit_to_two_qubit": float(map_dev_q2p),
            "two_qubit_to_qudit": float(map_dev_p2q),
        },
        notes=tuple(list(report.notes) + [NOTE_ZZ_RESTRICTION]),
    )
