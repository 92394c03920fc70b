"""Two-qubit gate geometry and fidelity measures.

Cartan/Weyl-chamber coordinates, Makhlin local invariants, gate
concurrence, the perfect-entangler polyhedron, the optimization
functionals J_sm / J_LI / J_PE (with analytic gradients in the entries of
the projected gate), local-operation fitting, and average gate error for
both unitary (possibly leaky) gates and logical dynamical maps.

Conventions: logical basis order (|00>, |01>, |10>, |11>); Weyl
coordinates (c1, c2, c3) in radians, canonical region c1 in [0, pi],
0 <= c3 <= c2 <= min(c1, pi - c1).  A gate functional gradient is
reported as a complex matrix T with dJ = Re sum_ab T[a,b] dU[a,b].
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import expm, svd
from scipy.optimize import least_squares

__all__ = [
    "WeylCoords",
    "LocalInvariants",
    "GateReport",
    "DegenerateProjectionError",
    "closest_unitary",
    "weyl_coordinates",
    "canonicalize_weyl",
    "local_invariants",
    "invariants_from_coords",
    "gate_concurrence",
    "point_in_pe",
    "pe_distance",
    "project_to_pe",
    "weyl_region",
    "canonical_gate",
    "functional_J_sm",
    "functional_J_sm_grad",
    "functional_J_LI",
    "functional_J_LI_grad",
    "functional_J_PE",
    "functional_J_PE_grad",
    "pop_loss_min",
    "fit_local_operations",
    "closest_local_equivalent",
    "LogicalMap",
    "avg_gate_error",
    "single_qubit_gate",
    "NAMED_GATES",
    "gate_by_name",
]

PI = math.pi

# Magic (Bell) basis transformation
QMAGIC = np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=complex,
) / math.sqrt(2.0)

SXSX = np.array(
    [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=complex
)
SYSY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex
)
SZSZ = np.diag([1, -1, -1, 1]).astype(complex)


class DegenerateProjectionError(RuntimeError):
    """The projected gate is (numerically) rank deficient."""


@dataclass(frozen=True)
class WeylCoords:
    """Canonical Weyl-chamber coordinates, in radians."""

    c1: float
    c2: float
    c3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])


@dataclass(frozen=True)
class LocalInvariants:
    """Makhlin local invariants (g1, g2, g3)."""

    g1: float
    g2: float
    g3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.g1, self.g2, self.g3])


def _to_magic(u: np.ndarray) -> np.ndarray:
    return QMAGIC.conj().T @ u @ QMAGIC


def _check_unitary(u: np.ndarray, tol: float = 1e-8) -> None:
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > tol:
        raise ValueError("matrix is not unitary (deviation %.2e)" % dev)


def closest_unitary(u_tilde: np.ndarray):
    """Closest unitary V W' (in Frobenius norm) to the projected gate.

    Uses the singular value decomposition U~ = V S W'; raises
    `DegenerateProjectionError` if any singular value is below 1e-12.
    """
    u_tilde = np.asarray(u_tilde, dtype=complex)
    v, s, wh = svd(u_tilde)
    if np.min(s) < 1e-12:
        raise DegenerateProjectionError(
            "projected gate has singular value %.2e < 1e-12" % np.min(s)
        )
    return v @ wh


def canonicalize_weyl(c1: float, c2: float, c3: float) -> WeylCoords:
    """Map coordinates into the canonical Weyl chamber.

    Fixed reduction order: (i) reduce each coordinate mod pi, (ii) sort
    descending, (iii) mirror the two largest coordinates about pi/2 while
    c1 + c2 > pi.  Idempotent.
    """
    c = np.array([c1, c2, c3], dtype=float) % PI
    for _ in range(8):
        c = np.sort(c)[::-1]
        if c[0] + c[1] > PI + 1e-12:
            c = np.array([PI - c[1], PI - c[0], c[2]])
            continue
        break
    c[np.abs(c) < 1e-12] = 0.0
    return WeylCoords(float(c[0]), float(c[1]), float(c[2]))


def weyl_coordinates(u: np.ndarray) -> WeylCoords:
    """Weyl chamber coordinates (c1, c2, c3) of a two-qubit gate.

    Spectrum-based algorithm (Childs et al., PRA 68, 052311): the
    eigenphases of U (SySy U^T SySy) / sqrt(det U) determine the
    coordinates up to Weyl-group operations; branch choices are resolved
    deterministically (phases folded into (-pi/2, 3pi/2], sorted
    descending) and the result is canonicalized.
    """
    u = np.asarray(u, dtype=complex)
    _check_unitary(u)
    u_t = SYSY @ u.T @ SYSY
    ev = np.linalg.eigvals((u @ u_t) / np.sqrt(complex(np.linalg.det(u))))
    two_s = np.angle(ev) / PI
    two_s[two_s <= -0.5] += 2.0
    s = np.sort(two_s / 2.0)[::-1]
    n = int(round(np.sum(s)))
    s -= np.r_[np.ones(n), np.zeros(4 - n)]
    s = np.roll(s, -n)
    mat = np.array([[1, 1, 0], [1, 0, 1], [0, 1, 1]], dtype=float)
    c1, c2, c3 = PI * (mat @ s[:3])
    if c3 < 0:
        c1, c3 = PI - c1, -c3
    return canonicalize_weyl(c1, c2, c3)


def local_invariants(u: np.ndarray) -> LocalInvariants:
    """Makhlin local invariants (g1, g2, g3) of a (unitary) two-qubit gate."""
    u = np.asarray(u, dtype=complex)
    _check_unitary(u)
    g1, g2, g3 = _invariants(u)
    return LocalInvariants(g1, g2, g3)


def invariants_from_coords(w: WeylCoords) -> LocalInvariants:
    """Local invariants evaluated from Weyl coordinates.

    g1 = cos^2 c1 cos^2 c2 cos^2 c3 - sin^2 c1 sin^2 c2 sin^2 c3,
    g2 = (1/4) sin 2c1 sin 2c2 sin 2c3,
    g3 = 4 g1 - cos 2c1 cos 2c2 cos 2c3.
    """
    c1, c2, c3 = w.c1, w.c2, w.c3
    cos2 = np.cos([c1, c2, c3]) ** 2
    sin2 = np.sin([c1, c2, c3]) ** 2
    g1 = float(np.prod(cos2) - np.prod(sin2))
    g2 = 0.25 * math.sin(2 * c1) * math.sin(2 * c2) * math.sin(2 * c3)
    g3 = 4 * g1 - math.cos(2 * c1) * math.cos(2 * c2) * math.cos(2 * c3)
    return LocalInvariants(g1, g2, g3)


def gate_concurrence(w: WeylCoords) -> float:
    """Gate concurrence from canonical Weyl coordinates.

    Inside the perfect-entangler polyhedron the concurrence is 1; outside
    it is max |sin(c_i +- c_j)| over the three coordinate pairs.  For a
    diagonal gate (c1 = zeta T / 2, c2 = c3 = 0) this reduces to
    |sin(zeta T / 2)|.
    """
    if point_in_pe(w):
        return 1.0
    c = w.as_array()
    rolled = np.roll(c, 1)
    vals = np.concatenate((c - rolled, c + rolled))
    return float(np.max(np.abs(np.sin(vals))))


def point_in_pe(w: WeylCoords, tol: float = 1e-12) -> bool:
    """Membership in the (closed) perfect-entangler polyhedron L-M-A2-Q-P-N."""
    return bool(
        w.c1 + w.c2 >= PI / 2 - tol
        and w.c1 - w.c2 <= PI / 2 + tol
        and w.c2 + w.c3 <= PI / 2 + tol
    )


# H-representation of the PE polyhedron (rows: a.c <= b), comprising the
# three PE faces and the Weyl-chamber facets it inherits.
_PE_A = np.array(
    [
        [-1.0, -1.0, 0.0],
        [1.0, -1.0, 0.0],
        [0.0, 1.0, 1.0],
        [0.0, 0.0, -1.0],
        [0.0, -1.0, 1.0],
        [-1.0, 1.0, 0.0],
        [1.0, 1.0, 0.0],
    ]
)
_PE_B = np.array([-PI / 2, PI / 2, PI / 2, 0.0, 0.0, 0.0, PI])


def _project_to_polytope(p: np.ndarray):
    """Euclidean projection of a point onto the PE polytope.

    Exact active-set enumeration: the projection is the closest feasible
    candidate among the equality-constrained minimizers over all subsets
    of at most three facets.
    """
    if np.all(_PE_A @ p <= _PE_B + 1e-12):
        return p.copy(), 0.0
    best = None
    best_d = math.inf
    for k in (1, 2, 3):
        for subset in combinations(range(len(_PE_B)), k):
            a = _PE_A[list(subset)]
            b = _PE_B[list(subset)]
            gram = a @ a.T
            try:
                lam = np.linalg.solve(gram, a @ p - b)
            except np.linalg.LinAlgError:
                continue
            x = p - a.T @ lam
            if np.all(_PE_A @ x <= _PE_B + 1e-9):
                d = float(np.linalg.norm(x - p))
                if d < best_d - 1e-15:
                    best_d = d
                    best = x
    assert best is not None, "polytope projection failed"
    return best, best_d


def pe_distance(w: WeylCoords) -> float:
    """Euclidean distance from canonical coordinates to the PE polyhedron."""
    return _project_to_polytope(w.as_array())[1]


def project_to_pe(w: WeylCoords) -> WeylCoords:
    """Closest point of the PE polyhedron (w itself if already inside)."""
    x, _ = _project_to_polytope(w.as_array())
    return WeylCoords(float(x[0]), float(x[1]), float(x[2]))


def weyl_region(w: WeylCoords) -> str:
    """Region of the Weyl chamber: 'PE', 'W0' (origin side), 'W0*' (A1 side),
    or 'W1' (SWAP side)."""
    if point_in_pe(w):
        return "PE"
    if w.c1 + w.c2 < PI / 2:
        return "W0"
    if w.c1 - w.c2 > PI / 2:
        return "W0*"
    return "W1"


def canonical_gate(w: WeylCoords) -> np.ndarray:
    """Canonical gate A = exp[(i/2)(c1 XX + c2 YY + c3 ZZ)]."""
    return expm(0.5j * (w.c1 * SXSX + w.c2 * SYSY + w.c3 * SZSZ))


# ---------------------------------------------------------------------------
# invariants with gradients
# ---------------------------------------------------------------------------


def _invariants(u: np.ndarray):
    ub = _to_magic(u)
    det = np.linalg.det(ub)
    m = ub.T @ ub
    t1 = np.trace(m)
    h1 = t1 * t1 / (16.0 * det)
    h3 = (t1 * t1 - np.trace(m @ m)) / (4.0 * det)
    return float(h1.real), float(h1.imag), float(h3.real)


def _invariants_and_grads(u: np.ndarray):
    """Invariants (g1, g2, g3) and gradient matrices (W1, W2, W3).

    Each W_i satisfies dg_i = Re sum_ab W_i[a,b] dU[a,b]; derived from the
    holomorphic quantities h1 = tr(m)^2 / (16 det U), h3 = (tr(m)^2 -
    tr(m^2)) / (4 det U) with m = U_B^T U_B in the magic basis.
    """
    ub = _to_magic(u)
    det = np.linalg.det(ub)
    ub_invt = np.linalg.inv(ub).T
    m = ub.T @ ub
    t1 = np.trace(m)
    h1 = t1 * t1 / (16.0 * det)
    h3 = (t1 * t1 - np.trace(m @ m)) / (4.0 * det)
    # d t1 = sum 2 B_ab dB_ab;  d tr(m^2) = sum 4 (B m)_ab dB_ab;
    # d det = det * sum (B^-T)_ab dB_ab
    gb_h1 = (t1 / (4.0 * det)) * ub - h1 * ub_invt
    gb_h3 = (t1 * ub - ub @ m) / det - h3 * ub_invt
    gu_h1 = QMAGIC.conj() @ gb_h1 @ QMAGIC.T
    gu_h3 = QMAGIC.conj() @ gb_h3 @ QMAGIC.T
    g = (float(h1.real), float(h1.imag), float(h3.real))
    return g, (gu_h1, -1j * gu_h1, gu_h3)


_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def _pe_geom_and_grad(u: np.ndarray, with_grad: bool):
    """Normalized geometric PE functional on a unitary gate, and gradient.

    Region-wise smooth form of the perfect-entangler distance measure
    D = g3 sqrt(g1^2 + g2^2) - g1, which vanishes exactly on the
    polyhedron faces adjacent to each region: evaluated on U in the W0 and
    W0* regions, and on U SWAP in the W1 region (which maps the
    c2 + c3 = pi/2 face onto a c1 + c2 = pi/2 face).  Zero inside the
    polyhedron; normalized by its maximal value 2.
    """
    region = weyl_region(weyl_coordinates(u))
    zero = np.zeros((4, 4), dtype=complex)
    if region == "PE":
        return 0.0, zero
    if region == "W1":
        u_eff = u @ _SWAP
    else:
        u_eff = u
    if with_grad:
        (g1, g2, g3), (w1, w2, w3) = _invariants_and_grads(u_eff)
    else:
        g1, g2, g3 = _invariants(u_eff)
    r = math.hypot(g1, g2)
    d = g3 * r - g1
    val = max(0.0, d) / 2.0
    if not with_grad:
        return val, None
    if d <= 0.0 or r < 1e-14:
        return val, zero
    f1 = g3 * g1 / r - 1.0
    f2 = g3 * g2 / r
    f3 = r
    grad = 0.5 * (f1 * w1 + f2 * w2 + f3 * w3)
    if region == "W1":
        grad = grad @ _SWAP.T
    return val, grad


# weights normalizing each invariant's range to [0, 1]
_LI_WEIGHTS = np.array([1.0 / 2.0, 2.0, 1.0 / 6.0])


def _li_geom_and_grad(u: np.ndarray, g_target: np.ndarray, with_grad: bool):
    """Normalized squared g-space distance to a target local class."""
    if with_grad:
        g, (w1, w2, w3) = _invariants_and_grads(u)
    else:
        g = _invariants(u)
    delta = (np.array(g) - g_target) * _LI_WEIGHTS
    val = float(np.dot(delta, delta)) / 3.0
    if not with_grad:
        return val, None
    coef = 2.0 * delta * _LI_WEIGHTS / 3.0
    return val, coef[0] * w1 + coef[1] * w2 + coef[2] * w3


def _svd_chain(u_tilde: np.ndarray, grad_u: np.ndarray):
    """Pull a gradient on the closest unitary back to the projected gate.

    Given dJ = Re sum W[a,b] dU[a,b] at U = V W' (unitary polar factor of
    U~), returns T with dJ = Re sum T[a,b] dU~[a,b].  Exact first-order
    perturbation of the polar decomposition via a Sylvester solve in the
    right singular basis.
    """
    v, s, wh = svd(u_tilde)
    u = v @ wh
    w = wh.conj().T
    g = w.conj().T @ grad_u.T @ u @ w
    g_tilde = g / (s[:, None] + s[None, :])
    return (w @ (g_tilde - g_tilde.conj().T) @ v.conj().T).T, u


def _loss_factor(u_tilde: np.ndarray) -> float:
    """Logical-subspace population retention tr(U~' U~)/4."""
    return float(np.real(np.trace(u_tilde.conj().T @ u_tilde))) / 4.0


def _combined(u_tilde, geom_fn, with_grad):
    """1 - loss_factor * (1 - J_geom(closest unitary)), optionally with grad."""
    u_tilde = np.asarray(u_tilde, dtype=complex)
    lam = _loss_factor(u_tilde)
    if not with_grad:
        u = closest_unitary(u_tilde)
        val, _ = geom_fn(u, False)
        return 1.0 - lam * (1.0 - val)
    v, s, wh = svd(u_tilde)
    if np.min(s) < 1e-12:
        raise DegenerateProjectionError(
            "projected gate has singular value %.2e < 1e-12" % np.min(s)
        )
    u = v @ wh
    val, grad_u = geom_fn(u, True)
    t_geom, _ = _svd_chain(u_tilde, grad_u)
    t = -(1.0 - val) * 0.5 * u_tilde.conj() + lam * t_geom
    return 1.0 - lam * (1.0 - val), t


def functional_J_PE(u_tilde: np.ndarray) -> float:
    """Perfect-entangler functional with loss penalty.

    J = 1 - (tr[U~'U~]/4) (1 - J_PE_geom(closest unitary)); zero exactly
    for a lossless perfect entangler.
    """
    return _combined(u_tilde, _pe_geom_and_grad, False)


def functional_J_PE_grad(u_tilde: np.ndarray):
    """J_PE value and gradient matrix T (dJ = Re sum T[a,b] dU~[a,b])."""
    return _combined(u_tilde, _pe_geom_and_grad, True)


def functional_J_LI(u_tilde: np.ndarray, target: WeylCoords) -> float:
    """Local-invariants functional toward a target local class, with loss
    penalty: J = 1 - (tr[U~'U~]/4) (1 - |g(U) - g(target)|^2_norm)."""
    g_t = invariants_from_coords(target).as_array()
    return _combined(u_tilde, lambda u, wg: _li_geom_and_grad(u, g_t, wg), False)


def functional_J_LI_grad(u_tilde: np.ndarray, target: WeylCoords):
    g_t = invariants_from_coords(target).as_array()
    return _combined(u_tilde, lambda u, wg: _li_geom_and_grad(u, g_t, wg), True)


def functional_J_sm(u_tilde: np.ndarray, target: np.ndarray) -> float:
    """Gate-overlap functional J_sm = 1 - |tr(O' U~)|^2 / 16."""
    tau = np.trace(np.asarray(target).conj().T @ u_tilde)
    return 1.0 - float(abs(tau) ** 2) / 16.0


def functional_J_sm_grad(u_tilde: np.ndarray, target: np.ndarray):
    target = np.asarray(target, dtype=complex)
    tau = np.trace(target.conj().T @ u_tilde)
    t = -(np.conj(tau) / 8.0) * target.conj()
    return 1.0 - float(abs(tau) ** 2) / 16.0, t


def pop_loss_min(u_tilde: np.ndarray) -> float:
    """Worst-case population loss eps_pop = 1 - min_i ||U~ |i>||."""
    norms = np.linalg.norm(np.asarray(u_tilde), axis=0)
    return float(1.0 - np.min(norms))


# ---------------------------------------------------------------------------
# local operations
# ---------------------------------------------------------------------------


def single_qubit_gate(phi: float, theta: float, phi1: float, phi2: float) -> np.ndarray:
    """General single-qubit gate e^{i phi} [[cos(th) e^{i phi1},
    sin(th) e^{i phi2}], [-sin(th) e^{-i phi2}, cos(th) e^{-i phi1}]]."""
    ct, st = math.cos(theta), math.sin(theta)
    return np.exp(1j * phi) * np.array(
        [
            [ct * np.exp(1j * phi1), st * np.exp(1j * phi2)],
            [-st * np.exp(-1j * phi2), ct * np.exp(-1j * phi1)],
        ]
    )


def _local_pair(p8: np.ndarray) -> np.ndarray:
    return np.kron(single_qubit_gate(*p8[:4]), single_qubit_gate(*p8[4:]))


def fit_local_operations(
    u: np.ndarray,
    w: WeylCoords,
    *,
    restarts: int = 32,
    seed: int = 0,
    tol: float = 1e-6,
):
    """Fit local operations k1, k2 with U ~ k1 A(w) k2.

    Minimizes ||U - k1 A(w) k2||_F over the 16 real parameters of the two
    local-gate pairs by multi-start Levenberg-Marquardt (first start at
    the identity, remaining starts seeded).  Returns (k1, k2, residual).

    Raises RuntimeError if no restart reaches ``tol``.
    """
    u = np.asarray(u, dtype=complex)
    a_gate = canonical_gate(w)

    def residuals(p):
        diff = _local_pair(p[:8]) @ a_gate @ _local_pair(p[8:]) - u
        return np.concatenate([diff.real.ravel(), diff.imag.ravel()])

    rng = np.random.default_rng(seed)
    best = None
    best_res = math.inf
    for trial in range(restarts):
        if trial == 0:
            x0 = np.zeros(16)
        else:
            x0 = rng.uniform(0.0, 2 * PI, size=16)
        sol = least_squares(residuals, x0, method="lm", xtol=1e-14, ftol=1e-14)
        res = float(np.linalg.norm(residuals(sol.x)))
        if res < best_res:
            best_res = res
            best = sol.x
        if best_res < 1e-8:
            break
    if best_res > tol:
        raise RuntimeError(
            "local-operation fit did not converge: residual %.2e > %.2e "
            "after %d restarts" % (best_res, tol, restarts)
        )
    return _local_pair(best[:8]), _local_pair(best[8:]), best_res


def closest_local_equivalent(u: np.ndarray, w_target: WeylCoords, **kwargs):
    """Gate of local class ``w_target`` closest to U: k1 A(w_target) k2.

    Used to turn an up-to-local-operations target into a concrete unitary
    for average-gate-error evaluation.
    """
    k1, k2, res = fit_local_operations(u, w_target, **kwargs)
    return k1 @ canonical_gate(w_target) @ k2, res


# ---------------------------------------------------------------------------
# average gate error
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogicalMap:
    """Dynamical map projected onto the logical subspace.

    ``blocks[i, j]`` is the 4x4 logical block of E(|i><j|); arbitrary
    logical inputs evolve by linearity.
    """

    blocks: np.ndarray  # shape (4, 4, 4, 4)

    def __post_init__(self):
        blocks = np.asarray(self.blocks, dtype=complex)
        if blocks.shape != (4, 4, 4, 4):
            raise ValueError("blocks must have shape (4, 4, 4, 4)")
        object.__setattr__(self, "blocks", blocks)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Evolve a 4x4 logical density matrix."""
        return np.einsum("ij,ijkl->kl", np.asarray(rho, dtype=complex), self.blocks)


def avg_gate_error(gate_or_map, target: np.ndarray) -> float:
    """Average gate error 1 - F_avg with respect to a unitary target.

    For a (possibly non-unitary) projected gate U~, F_avg =
    [tr(M M') + |tr M|^2] / 20 with M = O' U~.  For a `LogicalMap` E,
    F_avg = (1/20) [sum_j tr E(|j><j|) + sum_ij <i|O' E(|i><j|) O |j>],
    which reduces to the former for E(rho) = U~ rho U~'.
    """
    target = np.asarray(target, dtype=complex)
    if isinstance(gate_or_map, LogicalMap):
        blocks = gate_or_map.blocks
        term1 = sum(np.trace(blocks[j, j]) for j in range(4))
        rotated = np.einsum("ab,ijbc,cd->ijad", target.conj().T, blocks, target)
        term2 = sum(rotated[i, j][i, j] for i in range(4) for j in range(4))
        f_avg = float(np.real(term1 + term2)) / 20.0
    else:
        m = target.conj().T @ np.asarray(gate_or_map, dtype=complex)
        f_avg = (
            float(np.real(np.trace(m @ m.conj().T))) + abs(np.trace(m)) ** 2
        ) / 20.0
    return float(min(1.0, max(0.0, 1.0 - f_avg)))


# ---------------------------------------------------------------------------
# named gates
# ---------------------------------------------------------------------------

_ID2 = np.eye(2, dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
S_PI8 = np.diag([1.0, np.exp(-1j * PI / 4)]).astype(complex)

_C8, _S8 = math.cos(PI / 8), math.sin(PI / 8)
_C38, _S38 = math.cos(3 * PI / 8), math.sin(3 * PI / 8)

NAMED_GATES = {
    "identity": np.eye(4, dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CPHASE": np.diag([1, 1, 1, -1]).astype(complex),
    "iSWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
    "sqrtiSWAP": np.array(
        [
            [1, 0, 0, 0],
            [0, 1 / math.sqrt(2), 1j / math.sqrt(2), 0],
            [0, 1j / math.sqrt(2), 1 / math.sqrt(2), 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    ),
    "SWAP": _SWAP.copy(),
    "BGATE": np.array(
        [
            [_C8, 0, 0, 1j * _S8],
            [0, _C38, 1j * _S38, 0],
            [0, 1j * _S38, _C38, 0],
            [1j * _S8, 0, 0, _C8],
        ],
        dtype=complex,
    ),
    "H1": np.kron(HADAMARD, _ID2),
    "H2": np.kron(_ID2, HADAMARD),
    "S1": np.kron(S_PI8, _ID2),
    "S2": np.kron(_ID2, S_PI8),
}

_GATE_ALIASES = {
    "id": "identity",
    "1": "identity",
    "cphase": "CPHASE",
    "cnot": "CNOT",
    "iswap": "iSWAP",
    "sqrt_iswap": "sqrtiSWAP",
    "sqrtiswap": "sqrtiSWAP",
    "swap": "SWAP",
    "bgate": "BGATE",
    "hx1": "H1",
    "hx2": "H2",
    "h1": "H1",
    "h2": "H2",
    "s1": "S1",
    "s2": "S2",
}


def gate_by_name(name: str) -> np.ndarray:
    """Look up a named two-qubit gate (case-insensitive, common aliases)."""
    key = name if name in NAMED_GATES else _GATE_ALIASES.get(name.lower())
    if key is None or key not in NAMED_GATES:
        raise KeyError(
            "unknown gate %r (known: %s)" % (name, ", ".join(sorted(NAMED_GATES)))
        )
    return NAMED_GATES[key].copy()


# ---------------------------------------------------------------------------
# gate report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GateReport:
    """Summary of a projected logical gate and its quality measures."""

    u_tilde: np.ndarray
    u_closest: np.ndarray
    weyl: WeylCoords
    concurrence: float
    pop_loss: float
    j_pe: float
    j_li: float | None
    j_sm: float | None
    eps_avg: float | None
    eps_avg_nodiss: float | None = None
    target_name: str | None = None

    def to_json_dict(self) -> dict:
        def cmat(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in m]

        return {
            "u_tilde": cmat(self.u_tilde),
            "u_closest": cmat(self.u_closest),
            "weyl": [self.weyl.c1, self.weyl.c2, self.weyl.c3],
            "concurrence": self.concurrence,
            "pop_loss": self.pop_loss,
            "j_pe": self.j_pe,
            "j_li": self.j_li,
            "j_sm": self.j_sm,
            "eps_avg": self.eps_avg,
            "eps_avg_nodiss": self.eps_avg_nodiss,
            "target_name": self.target_name,
        }


def make_gate_report(
    u_tilde: np.ndarray,
    *,
    target: np.ndarray | None = None,
    target_coords: WeylCoords | None = None,
    logical_map: LogicalMap | None = None,
    eps_avg_nodiss: float | None = None,
    target_name: str | None = None,
) -> GateReport:
    """Assemble a GateReport for a projected gate.

    ``target`` (a unitary) enables J_sm and the average gate error;
    ``target_coords`` enables J_LI.  If ``logical_map`` is given, eps_avg
    is evaluated from the open-system map instead of from U~.
    """
    u_tilde = np.asarray(u_tilde, dtype=complex)
    u = closest_unitary(u_tilde)
    w = weyl_coordinates(u)
    j_li = None if target_coords is None else functional_J_LI(u_tilde, target_coords)
    j_sm = None if target is None else functional_J_sm(u_tilde, target)
    eps = None
    if target is not None:
        eps = avg_gate_error(
            logical_map if logical_map is not None else u_tilde, target
        )
    return GateReport(
        u_tilde=u_tilde,
        u_closest=u,
        weyl=w,
        concurrence=gate_concurrence(w),
        pop_loss=pop_loss_min(u_tilde),
        j_pe=functional_J_PE(u_tilde),
        j_li=j_li,
        j_sm=j_sm,
        eps_avg=eps,
        eps_avg_nodiss=eps_avg_nodiss,
        target_name=target_name,
    )
