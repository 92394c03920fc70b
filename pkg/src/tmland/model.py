"""Hilbert space, Hamiltonians, and dissipation operators.

Two anharmonic transmon ladders coupled to a driven cavity mode, in the
frame rotating at ``omega_r`` and within the rotating wave approximation:

    H = sum_q [delta_q b_q'b_q + (alpha_q/2) b_q'b_q'b_q b_q
               + g (b_q'a + b_q a')] + delta_c a'a
        + Re(eps) * (a + a')/2 + Im(eps) * i(a - a')/2

with delta_j = omega_j - omega_r.  Basis states |ijn> are ordered row-major
as i*(n_transmon*n_cavity) + j*n_cavity + n (transmon1, transmon2, cavity).
All operators are dense numpy arrays; all frequencies are angular (rad/s).
"""

import json
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .units import GHZ, MHZ, freq_to_rad_per_s, rad_per_s_to

__all__ = [
    "SystemParams",
    "OperatorSet",
    "ScanRangeWarning",
    "DEFAULT_BLOCK_RATE",
    "POINT_XTILDE",
    "table_params",
    "build_operators",
    "build_effective_hamiltonian",
    "landscape_point",
    "params_to_dict",
    "params_from_dict",
    "load_params",
    "save_params",
]

#: Stand-in for an "infinite" decay rate on the highest transmon/cavity level
#: (equals 100*g at the reference coupling g/2pi = 70 MHz).
DEFAULT_BLOCK_RATE = 7.0 * GHZ  # 2*pi * 7e9 rad/s

#: Reference working point (Delta_2/alpha, Delta_c/g) used throughout the
#: repository for single-point runs.  The cavity detuning is a documented
#: stand-in inside the quasi-dispersive window 1 < Delta_c/g < 10; it is a
#: repository choice, not a published device value.
POINT_XTILDE = (-0.45, 3.0)

#: Scan ranges for omega_2 and omega_c (rad/s); values outside trigger a
#: ScanRangeWarning in `landscape_point`.
OMEGA2_SCAN_RANGE = (5.0 * GHZ, 7.0 * GHZ)
OMEGAC_SCAN_RANGE = (4.5 * GHZ, 9.0 * GHZ)
_SCAN_RTOL = 1e-3


class ScanRangeWarning(UserWarning):
    """A landscape point falls outside the documented scan window."""


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the two-transmon/cavity system.

    All frequencies and rates are angular (rad/s).  Anharmonicities are
    negative.  ``n_transmon``/``n_cavity`` are the truncation levels of each
    transmon ladder and of the cavity.
    """

    omega1: float
    omega2: float
    omega_c: float
    alpha1: float
    alpha2: float
    g: float
    gamma: float
    kappa: float
    omega_r: float
    n_transmon: int = 5
    n_cavity: int = 6

    def __post_init__(self):
        if self.n_transmon < 3:
            raise ValueError(
                "n_transmon must be >= 3 (qutrit physics requires three "
                "transmon levels), got %d" % self.n_transmon
            )
        if self.n_cavity < 2:
            raise ValueError("n_cavity must be >= 2, got %d" % self.n_cavity)
        if self.alpha <= 0:
            raise ValueError("|alpha1 + alpha2|/2 must be positive")
        if self.g <= 0:
            raise ValueError("coupling g must be positive")
        if self.gamma < 0 or self.kappa < 0:
            raise ValueError("decay rates must be non-negative")

    @property
    def alpha(self) -> float:
        """Mean anharmonicity |alpha1 + alpha2|/2 > 0."""
        return abs(self.alpha1 + self.alpha2) / 2.0

    @property
    def delta2(self) -> float:
        """Qubit-qubit detuning omega2 - omega1."""
        return self.omega2 - self.omega1

    @property
    def delta_c(self) -> float:
        """Cavity-qubit detuning omega_c - omega1."""
        return self.omega_c - self.omega1

    @property
    def delta2_over_alpha(self) -> float:
        return self.delta2 / self.alpha

    @property
    def deltac_over_g(self) -> float:
        return self.delta_c / self.g

    @property
    def dim(self) -> int:
        """Total Hilbert-space dimension n_transmon^2 * n_cavity."""
        return self.n_transmon * self.n_transmon * self.n_cavity


def table_params(
    delta2_over_alpha: float = POINT_XTILDE[0],
    deltac_over_g: float = POINT_XTILDE[1],
    *,
    n_transmon: int = 5,
    n_cavity: int = 6,
    omega_r: float | None = None,
) -> SystemParams:
    """Reference system parameters at a given landscape point.

    Fixed values: omega1/2pi = 6 GHz, alpha1/2pi = -290 MHz,
    alpha2/2pi = -310 MHz, g/2pi = 70 MHz, gamma/2pi = 0.012 MHz,
    kappa/2pi = 0.05 MHz.  The default rotating frame is centered between
    the two qubit frequencies.
    """
    omega1 = 6.0 * GHZ
    alpha = 300.0 * MHZ
    g = 70.0 * MHZ
    omega2 = omega1 + delta2_over_alpha * alpha
    omega_c = omega1 + deltac_over_g * g
    if omega_r is None:
        omega_r = 0.5 * (omega1 + omega2)
    return SystemParams(
        omega1=omega1,
        omega2=omega2,
        omega_c=omega_c,
        alpha1=-290.0 * MHZ,
        alpha2=-310.0 * MHZ,
        g=g,
        gamma=0.012 * MHZ,
        kappa=0.05 * MHZ,
        omega_r=omega_r,
        n_transmon=n_transmon,
        n_cavity=n_cavity,
    )


def landscape_point(
    delta2_over_alpha: float, deltac_over_g: float, base: SystemParams
) -> SystemParams:
    """Move ``base`` to the landscape point (Delta_2/alpha, Delta_c/g).

    Only omega2 and omega_c change; omega1, g, alpha1, alpha2 and all other
    fields are copied.  Points outside the documented scan window
    (omega2/2pi in [5, 7] GHz, omega_c/2pi in [4.5, 9] GHz, 0.1% slack)
    emit a `ScanRangeWarning` but are still returned.
    """
    omega2 = base.omega1 + delta2_over_alpha * base.alpha
    omega_c = base.omega1 + deltac_over_g * base.g
    lo2, hi2 = OMEGA2_SCAN_RANGE
    loc, hic = OMEGAC_SCAN_RANGE
    if not lo2 * (1 - _SCAN_RTOL) <= omega2 <= hi2 * (1 + _SCAN_RTOL):
        warnings.warn(
            "omega2/2pi = %.4f GHz outside scan range [5, 7] GHz"
            % rad_per_s_to(omega2, "GHz_2pi"),
            ScanRangeWarning,
            stacklevel=2,
        )
    if not loc * (1 - _SCAN_RTOL) <= omega_c <= hic * (1 + _SCAN_RTOL):
        warnings.warn(
            "omega_c/2pi = %.4f GHz outside scan range [4.5, 9] GHz"
            % rad_per_s_to(omega_c, "GHz_2pi"),
            ScanRangeWarning,
            stacklevel=2,
        )
    return replace(base, omega2=omega2, omega_c=omega_c)


def _lowering(n: int) -> np.ndarray:
    """Truncated ladder lowering operator, <n-1|b|n> = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1.0, n)), k=1).astype(complex)


@dataclass(frozen=True)
class OperatorSet:
    """Dense operators of the model on the full Hilbert space.

    ``lindblad_ops`` is a list of (operator, rate) pairs; the Lindblad jump
    operators of the master equation are sqrt(rate) * operator.  All arrays
    are read-only.
    """

    params: SystemParams
    b1: np.ndarray
    b2: np.ndarray
    a: np.ndarray
    h_drift: np.ndarray
    h_ctrl_re: np.ndarray
    h_ctrl_im: np.ndarray
    lindblad_ops: tuple = field(repr=False, default=())

    @property
    def dim(self) -> int:
        return self.h_drift.shape[0]

    def hamiltonian(self, eps: complex) -> np.ndarray:
        """Full Hamiltonian at control amplitude eps (rad/s)."""
        return (
            self.h_drift
            + eps.real * self.h_ctrl_re
            + eps.imag * self.h_ctrl_im
        )

    def excitation_number(self) -> np.ndarray:
        """Total excitation number N = b1'b1 + b2'b2 + a'a (conserved at eps=0)."""
        return (
            self.b1.conj().T @ self.b1
            + self.b2.conj().T @ self.b2
            + self.a.conj().T @ self.a
        )

    def bare_index(self, i: int, j: int, n: int) -> int:
        """Index of the bare state |ijn>."""
        p = self.params
        if not (0 <= i < p.n_transmon and 0 <= j < p.n_transmon and 0 <= n < p.n_cavity):
            raise IndexError("bare label (%d,%d,%d) outside truncation" % (i, j, n))
        return (i * p.n_transmon + j) * p.n_cavity + n

    def top_level_projector(self) -> np.ndarray:
        """Projector onto basis states with any maximal transmon/cavity index."""
        p = self.params
        diag = np.zeros(self.dim)
        for i in range(p.n_transmon):
            for j in range(p.n_transmon):
                for n in range(p.n_cavity):
                    if (
                        i == p.n_transmon - 1
                        or j == p.n_transmon - 1
                        or n == p.n_cavity - 1
                    ):
                        diag[self.bare_index(i, j, n)] = 1.0
        return np.diag(diag).astype(complex)


def build_operators(params: SystemParams, dim_cap: int = 4096) -> OperatorSet:
    """Construct all model operators for the given parameters.

    Raises ValueError if the total dimension exceeds ``dim_cap``.
    """
    if params.dim > dim_cap:
        raise ValueError(
            "Hilbert space dimension %d exceeds cap %d" % (params.dim, dim_cap)
        )
    nt, nc = params.n_transmon, params.n_cavity
    id_t = np.eye(nt, dtype=complex)
    id_c = np.eye(nc, dtype=complex)
    bt = _lowering(nt)
    ac = _lowering(nc)
    b1 = np.kron(np.kron(bt, id_t), id_c)
    b2 = np.kron(np.kron(id_t, bt), id_c)
    a = np.kron(np.kron(id_t, id_t), ac)

    delta1 = params.omega1 - params.omega_r
    delta2 = params.omega2 - params.omega_r
    delta_c = params.omega_c - params.omega_r

    h = delta_c * (a.conj().T @ a)
    for (bq, dq, aq) in ((b1, delta1, params.alpha1), (b2, delta2, params.alpha2)):
        nq = bq.conj().T @ bq
        h = h + dq * nq + 0.5 * aq * (nq @ nq - nq)
        h = h + params.g * (bq.conj().T @ a + bq @ a.conj().T)
    # b'b'bb = n(n-1) for a truncated ladder, used above

    h_ctrl_re = 0.5 * (a + a.conj().T)
    h_ctrl_im = 0.5j * (a - a.conj().T)
    lindblad = (
        (b1, params.gamma),
        (b2, params.gamma),
        (a, params.kappa),
    )
    for arr in (b1, b2, a, h, h_ctrl_re, h_ctrl_im):
        arr.setflags(write=False)
    return OperatorSet(
        params=params,
        b1=b1,
        b2=b2,
        a=a,
        h_drift=h,
        h_ctrl_re=h_ctrl_re,
        h_ctrl_im=h_ctrl_im,
        lindblad_ops=lindblad,
    )


def build_effective_hamiltonian(
    ops: OperatorSet, block_rate: float = DEFAULT_BLOCK_RATE
) -> np.ndarray:
    """Non-Hermitian effective Hamiltonian mimicking population loss.

    H_eff = H_drift - (i/2) sum_i rate_i A_i'A_i - (i/2) block_rate P_top,
    where P_top projects onto states with a maximal transmon or cavity
    index.  ``block_rate`` is the large-but-finite stand-in for an infinite
    decay rate of the highest levels.
    """
    if block_rate < 0:
        raise ValueError("block_rate must be >= 0")
    h = ops.h_drift.astype(complex).copy()
    for (op, rate) in ops.lindblad_ops:
        if rate != 0.0:
            h = h - 0.5j * rate * (op.conj().T @ op)
    if block_rate != 0.0:
        h = h - 0.5j * block_rate * ops.top_level_projector()
    return h


_FREQ_FIELDS = (
    "omega1",
    "omega2",
    "omega_c",
    "alpha1",
    "alpha2",
    "g",
    "gamma",
    "kappa",
    "omega_r",
)


def params_to_dict(params: SystemParams, unit: str = "GHz_2pi") -> dict:
    """Flat JSON-ready dict; frequencies as {value, unit} objects."""
    out = {}
    for name in _FREQ_FIELDS:
        out[name] = {"value": rad_per_s_to(getattr(params, name), unit), "unit": unit}
    out["n_transmon"] = params.n_transmon
    out["n_cavity"] = params.n_cavity
    return out


def params_from_dict(data: dict) -> SystemParams:
    kwargs = {}
    for name in _FREQ_FIELDS:
        entry = data[name]
        kwargs[name] = freq_to_rad_per_s(float(entry["value"]), str(entry["unit"]))
    kwargs["n_transmon"] = int(data.get("n_transmon", 5))
    kwargs["n_cavity"] = int(data.get("n_cavity", 6))
    return SystemParams(**kwargs)


def load_params(path) -> SystemParams:
    with open(path) as fh:
        return params_from_dict(json.load(fh))


def save_params(params: SystemParams, path, unit: str = "GHz_2pi") -> None:
    with open(path, "w") as fh:
        json.dump(params_to_dict(params, unit), fh, indent=2, sort_keys=True)
        fh.write("\n")
