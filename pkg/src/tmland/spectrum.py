"""Field-free spectral analysis: dressed logical states and derived observables.

The logical subspace is encoded in the dressed eigenstates of the drift
Hamiltonian that have the largest overlap with the bare states |000>,
|010>, |100>, |110>.  From the dressed energies follow the static
qubit-qubit interaction zeta, the field-free entangling time T_pi = pi/zeta,
the dressed level shifts, and the dressed-to-bare decay-rate ratio.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import OperatorSet, SystemParams
from .units import MHZ, NS, fmt

__all__ = [
    "DressedFrame",
    "FieldFreeMapRow",
    "DegenerateAssignmentError",
    "LOGICAL_LABELS",
    "diagonalize_and_assign",
    "static_interaction",
    "field_free_concurrence",
    "t_pi",
    "dressed_decay_ratio",
    "lifetime_error_bound",
    "lifetime_error_linearized",
    "dressed_shifts",
    "map_row",
    "write_map_csv",
    "MAP_CSV_HEADER",
]

#: Logical labels in gate-matrix order: index = 2*i + j for |ij>.
LOGICAL_LABELS = ("00", "01", "10", "11")

#: Auxiliary bare labels assigned alongside the logical ones.
DEFAULT_AUX_LABELS = ("001",)


class DegenerateAssignmentError(RuntimeError):
    """Dressed-state assignment could not be made injective.

    Carries the overlap matrix (labels x eigenvectors) as ``overlaps``.
    """

    def __init__(self, message, overlaps):
        super().__init__(message)
        self.overlaps = overlaps


def _bare_state_index(ops: OperatorSet, label: str) -> int:
    if len(label) == 2:
        i, j, n = int(label[0]), int(label[1]), 0
    elif len(label) == 3:
        i, j, n = int(label[0]), int(label[1]), int(label[2])
    else:
        raise ValueError("bad bare label %r" % (label,))
    return ops.bare_index(i, j, n)


@dataclass(frozen=True)
class DressedFrame:
    """Eigendecomposition of the drift Hamiltonian with logical assignment.

    ``eigenvalues`` are sorted ascending (rad/s); ``eigenvectors[:, k]`` is
    the k-th eigenstate with its largest-magnitude component made real
    positive.  ``logical_index`` maps '00', '01', '10', '11' to eigenvector
    columns; ``aux_index`` does the same for auxiliary bare labels.
    ``ambiguous`` collects labels whose best available overlap was < 0.5.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    logical_index: dict
    aux_index: dict
    ambiguous: frozenset
    zeta: float
    decay_ratio: float

    @property
    def logical_energies(self) -> np.ndarray:
        """Dressed energies (E00, E01, E10, E11) in gate-matrix order."""
        return np.array(
            [self.eigenvalues[self.logical_index[lbl]] for lbl in LOGICAL_LABELS]
        )

    def logical_states(self) -> np.ndarray:
        """(dim, 4) array of dressed logical eigenvectors, gate-matrix order."""
        cols = [self.logical_index[lbl] for lbl in LOGICAL_LABELS]
        return self.eigenvectors[:, cols]

    def logical_reference_energies(self) -> np.ndarray:
        """Reference energies of the local interaction picture.

        (E00, E01, E10, E01 + E10 - E00): the additive single-qubit part of
        the dressed spectrum.  Gauging the projected gate with these phases
        removes single-qubit rotations but keeps the non-local zeta*T phase,
        so the field-free gate carries concurrence |sin(zeta T/2)|.
        """
        e00, e01, e10, _ = self.logical_energies
        return np.array([e00, e01, e10, e01 + e10 - e00])


def diagonalize_and_assign(
    ops: OperatorSet, aux_labels=DEFAULT_AUX_LABELS
) -> DressedFrame:
    """Diagonalize the drift Hamiltonian and assign dressed logical states.

    Each logical/auxiliary bare label is assigned to the eigenvector that
    maximizes the bare-dressed overlap, greedily in order of descending
    overlap so the assignment is injective and deterministic.  A label whose
    best available overlap is below 0.5 is flagged ambiguous.
    """
    evals, evecs = np.linalg.eigh(ops.h_drift)
    # fix eigenvector phases: largest-|component| entry real positive
    idx = np.argmax(np.abs(evecs), axis=0)
    phases = evecs[idx, np.arange(evecs.shape[1])]
    phases = phases / np.abs(phases)
    evecs = evecs / phases[np.newaxis, :]

    labels = list(LOGICAL_LABELS) + [l for l in aux_labels if l not in LOGICAL_LABELS]
    rows = [_bare_state_index(ops, lbl) for lbl in labels]
    overlaps = np.abs(evecs[rows, :]) ** 2  # (n_labels, dim)

    if len(labels) > evecs.shape[1]:
        raise DegenerateAssignmentError(
            "more labels than eigenvectors", overlaps
        )
    assignment: dict = {}
    taken: set = set()
    ambiguous = set()
    order = np.dstack(
        np.unravel_index(np.argsort(overlaps, axis=None)[::-1], overlaps.shape)
    )[0]
    for (li, ei) in order:
        lbl = labels[li]
        if lbl in assignment or ei in taken:
            continue
        assignment[lbl] = int(ei)
        taken.add(int(ei))
        if overlaps[li, ei] < 0.5:
            ambiguous.add(lbl)
        if len(assignment) == len(labels):
            break
    if len(assignment) < len(labels):
        raise DegenerateAssignmentError(
            "could not assign all labels injectively", overlaps
        )

    logical_index = {lbl: assignment[lbl] for lbl in LOGICAL_LABELS}
    aux_index = {lbl: assignment[lbl] for lbl in labels[4:]}
    energies = [evals[logical_index[lbl]] for lbl in LOGICAL_LABELS]
    zeta = energies[0] - energies[1] - energies[2] + energies[3]

    ratio = math.nan
    gamma = ops.params.gamma
    if gamma > 0:
        jump = np.zeros((ops.dim, ops.dim), dtype=complex)
        for (op, rate) in ops.lindblad_ops:
            jump = jump + rate * (op.conj().T @ op)
        rates = []
        for lbl in ("01", "10"):
            vec = evecs[:, logical_index[lbl]]
            rates.append(float(np.real(vec.conj() @ jump @ vec)))
        ratio = max(rates) / gamma

    evals.setflags(write=False)
    evecs.setflags(write=False)
    return DressedFrame(
        eigenvalues=evals,
        eigenvectors=evecs,
        logical_index=logical_index,
        aux_index=aux_index,
        ambiguous=frozenset(ambiguous),
        zeta=float(zeta),
        decay_ratio=float(ratio),
    )


def static_interaction(frame: DressedFrame) -> float:
    """Static qubit-qubit interaction zeta = E00 - E01 - E10 + E11 (rad/s)."""
    e = frame.logical_energies
    return float(e[0] - e[1] - e[2] + e[3])


def field_free_concurrence(zeta: float, duration: float) -> float:
    """Concurrence |sin(zeta T / 2)| of the field-free evolution over T."""
    if duration < 0:
        raise ValueError("duration must be >= 0")
    return abs(math.sin(0.5 * zeta * duration))


def t_pi(zeta: float) -> float:
    """First time at which the field-free gate is perfectly entangling.

    Returns pi/|zeta|, or +inf when zeta == 0.
    """
    if zeta == 0.0:
        return math.inf
    return math.pi / abs(zeta)


def dressed_decay_ratio(frame: DressedFrame, ops: OperatorSet) -> float:
    """Dressed-to-bare qubit decay-rate ratio.

    For each single-excitation logical state, the effective rate is the
    expectation value of the total jump-rate operator sum_i rate_i A_i'A_i;
    the ratio reported is the worse of |01> and |10>, over gamma.
    """
    if ops.params.gamma <= 0:
        raise ValueError("dressed decay ratio requires gamma > 0")
    jump = np.zeros((ops.dim, ops.dim), dtype=complex)
    for (op, rate) in ops.lindblad_ops:
        jump = jump + rate * (op.conj().T @ op)
    rates = []
    for lbl in ("01", "10"):
        vec = frame.eigenvectors[:, frame.logical_index[lbl]]
        rates.append(float(np.real(vec.conj() @ jump @ vec)))
    return max(rates) / ops.params.gamma


def lifetime_error_bound(gamma: float, duration: float) -> float:
    """Lifetime-limited average gate error for two decoupled decaying qubits.

    Closed form for identity-target evolution under amplitude damping at
    rate gamma on each qubit over duration T:

        3/4 - (3/10) e^{-gT} - (1/20) e^{-2gT} - (1/5) e^{-gT/2}
            - (1/5) e^{-3gT/2}
    """
    x = gamma * duration
    if x < 0:
        raise ValueError("gamma*T must be >= 0")
    return (
        0.75
        - 0.3 * math.exp(-x)
        - 0.05 * math.exp(-2.0 * x)
        - 0.2 * math.exp(-0.5 * x)
        - 0.2 * math.exp(-1.5 * x)
    )


def lifetime_error_linearized(gamma: float, duration: float) -> float:
    """Small-gamma*T linearization (8/10) gamma T of the lifetime bound."""
    return 0.8 * gamma * duration


def dressed_shifts(frame: DressedFrame, params: SystemParams) -> tuple:
    """Dressed level shifts (dE01, dE10, dE11, dEcav) in rad/s.

    dE01 = E01 - omega2, dE10 = E10 - omega1, dE11 = E11 - omega1 - omega2,
    dEcav = E001 - omega_c, with all dressed energies in the E00 = 0 gauge
    and converted to the lab frame (the rotating-frame energies are shifted
    by omega_r per excitation).
    """
    if "001" not in frame.aux_index:
        raise KeyError("auxiliary state '001' was not assigned")
    e = frame.logical_energies
    e00 = e[0]
    e001 = frame.eigenvalues[frame.aux_index["001"]]
    wr = params.omega_r
    d_e01 = (e[1] - e00) + wr - params.omega2
    d_e10 = (e[2] - e00) + wr - params.omega1
    d_e11 = (e[3] - e00) + 2 * wr - params.omega1 - params.omega2
    d_cav = (e001 - e00) + wr - params.omega_c
    return (float(d_e01), float(d_e10), float(d_e11), float(d_cav))


@dataclass(frozen=True)
class FieldFreeMapRow:
    """One grid point of the field-free map (Fig.-1-style observables)."""

    delta2_over_alpha: float
    deltac_over_g: float
    zeta: float  # rad/s
    t_pi: float  # s (inf when zeta == 0)
    decay_ratio: float
    d_e01: float
    d_e10: float
    d_e11: float
    d_cav: float
    ambiguous: bool = False


MAP_CSV_HEADER = (
    "delta2_over_alpha,deltac_over_g,zeta_MHz_2pi,t_pi_ns,decay_ratio,"
    "dE01,dE10,dE11,dEcav"
)


def map_row(
    delta2_over_alpha: float,
    deltac_over_g: float,
    frame: DressedFrame,
    ops: OperatorSet,
) -> FieldFreeMapRow:
    """Assemble the field-free observables of one grid point."""
    shifts = dressed_shifts(frame, ops.params)
    return FieldFreeMapRow(
        delta2_over_alpha=delta2_over_alpha,
        deltac_over_g=deltac_over_g,
        zeta=frame.zeta,
        t_pi=t_pi(frame.zeta),
        decay_ratio=frame.decay_ratio,
        d_e01=shifts[0],
        d_e10=shifts[1],
        d_e11=shifts[2],
        d_cav=shifts[3],
        ambiguous=bool(frame.ambiguous),
    )


def write_map_csv(rows, path) -> None:
    """Write field-free map rows as CSV, sorted by (Delta2/alpha, Deltac/g).

    Frequencies are exported in MHz (nu = omega/2pi), times in ns; zeta == 0
    is exported with t_pi_ns = inf.
    """
    rows = sorted(rows, key=lambda r: (r.delta2_over_alpha, r.deltac_over_g))
    with open(path, "w") as fh:
        fh.write(MAP_CSV_HEADER + "\n")
        for r in rows:
            fields = (
                r.delta2_over_alpha,
                r.deltac_over_g,
                r.zeta / MHZ,
                r.t_pi / NS,
                r.decay_ratio,
                r.d_e01 / MHZ,
                r.d_e10 / MHZ,
                r.d_e11 / MHZ,
                r.d_cav / MHZ,
            )
            fh.write(",".join(fmt(x) for x in fields) + "\n")
