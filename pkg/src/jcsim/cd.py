"""Counter-diabatic Hamiltonians and ramp schedules.

Covers the exact spectral construction for any model plus the closed forms
for the small lattices covered by the scenarios: two sites / one excitation (hopping and
coupling ramps, full and local-only variants), three sites / one excitation,
and the two-site / two-excitation subset form with a calibrated gap scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFormulaError,
    DegenerateTransitionError,
    InvalidArgumentError,
    StructureError,
)
from .model import (
    Basis,
    HermitianOperator,
    LatticeParams,
    build_hamiltonian,
    enumerate_basis,
    hopping_vj,
    operator_matrix,
    swap_permutation,
)
from .spectra import (
    ParityLabel,
    Spectrum,
    chi_factors,
    classify_parity,
    eigendecompose,
    symmetry_adapted,
)

GAP_TOLERANCE = 1e-9
NUMERATOR_TOLERANCE = 1e-9
FIT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class RampSchedule:
    """Time-dependent parameter trajectory with analytic derivative."""

    parameter: str  # 'J' or 'g'
    shape: str  # 'linear' or 'quadratic'
    start_value: float
    target_value: float
    total_time: float

    def __post_init__(self):
        if self.parameter not in ("J", "g"):
            raise InvalidArgumentError(f"unknown ramp parameter {self.parameter!r}")
        if self.shape not in ("linear", "quadratic"):
            raise InvalidArgumentError(f"unknown ramp shape {self.shape!r}")
        if self.total_time <= 0:
            raise InvalidArgumentError("total_time must be positive")

    def value(self, t):
        x = np.asarray(t) / self.total_time
        span = self.target_value - self.start_value
        if self.shape == "linear":
            return self.start_value + span * x
        return self.start_value + span * x**2

    def derivative(self, t):
        span = self.target_value - self.start_value
        if self.shape == "linear":
            return np.broadcast_to(span / self.total_time, np.shape(t)).astype(float) \
                if np.ndim(t) else span / self.total_time
        return 2 * span * np.asarray(t) / self.total_time**2


@dataclass(frozen=True)
class CdSpec:
    mode: str = "none"  # none | exact | full_analytic | simplified
    dedupe_tolerance: float = GAP_TOLERANCE

    def __post_init__(self):
        if self.mode not in ("none", "exact", "full_analytic", "simplified"):
            raise InvalidArgumentError(f"unknown CD mode {self.mode!r}")


# ---------------------------------------------------------------------------
# exact spectral construction


def cd_from_eigensystem(
    energies,
    vectors,
    dh_dt,
    gap_tolerance: float = GAP_TOLERANCE,
    numerator_tolerance: float = NUMERATOR_TOLERANCE,
) -> np.ndarray:
    """Exact CD matrix from an eigensystem; accepts stacked leading axes.

    Degenerate pairs (gap below tolerance) are skipped; a skipped pair with a
    non-negligible transition element is a genuine singularity and raises.
    """
    w = np.asarray(energies, dtype=float)
    V = np.asarray(vectors, dtype=complex)
    dh = np.asarray(dh_dt, dtype=complex)
    Vh = np.swapaxes(V.conj(), -1, -2)
    M = Vh @ dh @ V
    gaps = w[..., None, :] - w[..., :, None]  # [m, n] = E_n - E_m
    offdiag = ~np.eye(w.shape[-1], dtype=bool)
    small = (np.abs(gaps) <= gap_tolerance) & offdiag
    if np.any(small & (np.abs(M) > numerator_tolerance)):
        raise DegenerateTransitionError(
            "degenerate pair with nonzero transition element; CD formula is singular"
        )
    coeff = np.zeros_like(M)
    ok = offdiag & ~small
    coeff[ok] = 1j * M[ok] / gaps[ok]
    return V @ coeff @ Vh


def exact_cd(spectrum: Spectrum, dh_dt, gap_tolerance: float = GAP_TOLERANCE):
    """Exact CD operator for an instantaneous spectrum and Hamiltonian velocity."""
    dh = dh_dt.matrix if isinstance(dh_dt, HermitianOperator) else np.asarray(dh_dt)
    mat = cd_from_eigensystem(spectrum.energies, spectrum.states, dh, gap_tolerance)
    if spectrum.basis is not None:
        return HermitianOperator(spectrum.basis, mat)
    return mat


def transition_elements(spectrum: Spectrum, V) -> np.ndarray:
    """Magnitude table |<v_m|V|v_n>| over all eigenpairs."""
    mat = V.matrix if isinstance(V, HermitianOperator) else np.asarray(V)
    return np.abs(spectrum.states.conj().T @ mat @ spectrum.states)


# ---------------------------------------------------------------------------
# operator-form generators

_DAGGER = {
    "a": "a_dagger",
    "a_dagger": "a",
    "sigma_minus": "sigma_plus",
    "sigma_plus": "sigma_minus",
}


def _dagger_ops(ops):
    return [( _DAGGER[kind], site) for kind, site in reversed(ops)]


def _antihermitian_terms(ops_list, prefactor):
    """Terms for i*prefactor*(X - X^dagger) with X = sum of the op strings."""
    terms = []
    for coeff, ops in ops_list:
        terms.append((1j * prefactor * coeff, ops))
        terms.append((-1j * prefactor * np.conj(coeff), _dagger_ops(ops)))
    return terms


def _collective_generator(basis: Basis, sign: int) -> np.ndarray:
    """i*(S_pm^dag A_pm - h.c.)/1 with A = a1 + sign*a2, S = s1- + sign*s2-."""
    ops_list = []
    for qi, qs in ((0, 1.0), (1, float(sign))):
        for ci, cs in ((0, 1.0), (1, float(sign))):
            ops_list.append((qs * cs, [("sigma_plus", qi), ("a", ci)]))
    return operator_matrix(_antihermitian_terms(ops_list, 1.0), basis)


def local_cd_generator(basis: Basis) -> np.ndarray:
    """i*sum_j (a_j sigma_j^+ - a_j^dag sigma_j^-): the local-only CD skeleton."""
    ops_list = [(1.0, [("sigma_plus", j), ("a", j)]) for j in range(basis.n_sites)]
    return operator_matrix(_antihermitian_terms(ops_list, 1.0), basis)


def _basis_2s1e(basis: Basis | None) -> Basis:
    return basis if basis is not None else enumerate_basis(2, 1)


def full_cd_2s1e_Jramp(g, J, delta, dJ_dt, basis: Basis | None = None) -> HermitianOperator:
    """Full CD operator for the hopping ramp on two sites, one excitation."""
    basis = _basis_2s1e(basis)
    dm, dp, chim, chip = chi_factors(g, J, delta)
    if chim == 0 or chip == 0:
        raise DegenerateFormulaError("chi1 vanishes; CD closed form is singular")
    mat = (g / (2 * chim**2)) * dJ_dt * _collective_generator(basis, +1) \
        - (g / (2 * chip**2)) * dJ_dt * _collective_generator(basis, -1)
    return HermitianOperator(basis, mat)


def simplified_cd_2s1e_Jramp(g, J, delta, dJ_dt, basis: Basis | None = None) -> HermitianOperator:
    """Local-only CD for the hopping ramp; coupling g' = g/chi-^2 * dJ/dt."""
    basis = _basis_2s1e(basis)
    _, _, chim, _ = chi_factors(g, J, delta)
    if chim == 0:
        raise DegenerateFormulaError("chi1- vanishes; CD closed form is singular")
    gprime = (g / chim**2) * dJ_dt
    return HermitianOperator(basis, gprime * local_cd_generator(basis))


def full_cd_2s1e_gramp(g, J, delta, dg_dt, basis: Basis | None = None) -> HermitianOperator:
    """Full CD operator for the coupling ramp on two sites, one excitation."""
    basis = _basis_2s1e(basis)
    dm, dp, chim, chip = chi_factors(g, J, delta)
    if chim == 0 or chip == 0:
        raise DegenerateFormulaError("chi1 vanishes; CD closed form is singular")
    # the antisymmetric-block term enters with a plus sign: in the fixed gauge
    # the signed elements <v3|V_g|v4> and <v3|V_J|v4> have opposite signs
    mat = (dm / (2 * chim**2)) * dg_dt * _collective_generator(basis, +1) \
        + (dp / (2 * chip**2)) * dg_dt * _collective_generator(basis, -1)
    return HermitianOperator(basis, mat)


def simplified_cd_2s1e_gramp(g, J, delta, dg_dt, basis: Basis | None = None) -> HermitianOperator:
    """Local-only CD for the coupling ramp; g' = (delta-J)/chi-^2 * dg/dt.

    Vanishes identically on the delta = J trajectory (self-protected path).
    """
    basis = _basis_2s1e(basis)
    dm, _, chim, _ = chi_factors(g, J, delta)
    if chim == 0:
        raise DegenerateFormulaError("chi1- vanishes; CD closed form is singular")
    gprime = (dm / chim**2) * dg_dt
    return HermitianOperator(basis, gprime * local_cd_generator(basis))


# ---------------------------------------------------------------------------
# three sites, one excitation

def _qubit_cavity_generators(basis: Basis) -> np.ndarray:
    """Stack of generators i*(a_i^dag sigma_j^- - h.c.) for all site pairs."""
    n = basis.n_sites
    gens = np.empty((n, n, len(basis), len(basis)), dtype=complex)
    for i in range(n):
        for j in range(n):
            terms = _antihermitian_terms([(1.0, [("a_dagger", i), ("sigma_minus", j)])], 1.0)
            gens[i, j] = operator_matrix(terms, basis)
    return gens


def _fit_generator_coefficients(mat: np.ndarray, gens: np.ndarray):
    """Project a Hermitian matrix on the (orthogonal) generator stack."""
    norms = np.einsum("ijkl,ijkl->ij", gens.conj(), gens).real
    coeffs = np.einsum("ijkl,kl->ij", gens.conj(), mat).real / norms
    resid = mat - np.einsum("ij,ijkl->kl", coeffs, gens)
    return coeffs, np.max(np.abs(resid))


_CROSS_PAIRS_3S = [(0, 1), (1, 0), (1, 2), (2, 1)]
_KEPT_PAIRS_3S = [(0, 0), (1, 1), (2, 2), (0, 2), (2, 0)]


def simplified_3s1e_coefficients(h_sector_stack: np.ndarray, dlam) -> np.ndarray:
    """Qubit-cavity coupling strengths of the simplified three-site CD.

    The exact CD operator lives on the (v1, v4) and (v3, v6) eigen-blocks
    (ascending order).  The protective (v1, v4) block is kept as is and the
    free (v3, v6) amplitude is retuned so the couplings between site 2 and
    sites 1/3 cancel; what remains is local (1, 2, 1)-weighted plus a 1<->3
    pair, all sharing one strength.  Returns the fitted (t, 3, 3) coefficient
    array on the i*(a_i^dag sigma_j^- - h.c.) generators.
    """
    basis = enumerate_basis(3, 1)
    w, V = np.linalg.eigh(h_sector_stack)
    dh = np.asarray(dlam, dtype=float)[:, None, None] * hopping_vj(basis)[None, :, :]
    full = cd_from_eigensystem(w, V, dh)
    Vh = np.swapaxes(V.conj(), -1, -2)
    E = Vh @ full @ V
    M14 = np.zeros_like(E)
    M36 = np.zeros_like(E)
    M14[:, 0, 3], M14[:, 3, 0] = E[:, 0, 3], E[:, 3, 0]
    M36[:, 2, 5], M36[:, 5, 2] = E[:, 2, 5], E[:, 5, 2]
    scale = max(float(np.max(np.abs(E))), 1e-30)
    # eigensolver noise in the CD elements grows like eps*|H|*|dH|/gap^2 when
    # levels nearly cross (e.g. the J -> 0 clusters), so pad the tolerance
    gaps = np.abs(w[:, :, None] - w[:, None, :])
    min_gap = np.min(np.where(gaps > GAP_TOLERANCE, gaps, np.inf))
    noise = 0.0
    if np.isfinite(min_gap):
        noise = (
            100 * np.finfo(float).eps
            * float(np.max(np.abs(h_sector_stack))) * float(np.max(np.abs(dh)))
            / min_gap**2
        )
    tol = FIT_TOLERANCE * max(1.0, scale) + noise
    if np.max(np.abs(E - M14 - M36)) > tol:
        raise StructureError("exact CD has support outside the (v1,v4)/(v3,v6) blocks")
    h14 = V @ M14 @ Vh
    h36 = V @ M36 @ Vh
    gens = _qubit_cavity_generators(basis)
    norms = np.einsum("ijkl,ijkl->ij", gens.conj(), gens).real
    a = np.einsum("ijkl,tkl->tij", gens.conj(), h14).real / norms
    b = np.einsum("ijkl,tkl->tij", gens.conj(), h36).real / norms
    b12 = b[:, 0, 1]
    safe = np.abs(b12) > 1e-14
    c = np.where(safe, -a[:, 0, 1] / np.where(safe, b12, 1.0), 0.0)
    coeffs = a + c[:, None, None] * b
    mixed = h14 + c[:, None, None] * h36
    recon = np.einsum("tij,ijkl->tkl", coeffs, gens)
    if np.max(np.abs(mixed - recon)) > tol:
        raise StructureError("remixed CD does not fit the qubit-cavity couplings")
    cross = max(np.max(np.abs(coeffs[:, i, j])) for i, j in _CROSS_PAIRS_3S)
    if cross > tol:
        raise StructureError("site-2 cross couplings did not cancel")
    g_local = coeffs[:, 0, 0]
    pattern = np.array([[1.0, 0, 1.0], [0, 2.0, 0], [1.0, 0, 1.0]])
    mism = np.max(np.abs(coeffs * (pattern > 0) - g_local[:, None, None] * pattern))
    if mism > tol:
        raise StructureError("simplified couplings do not share one strength")
    return coeffs


def cd_3s1e(g, J, delta, dJ_dt, simplified: bool = False) -> HermitianOperator:
    """CD operator for the hopping ramp on an open three-site chain.

    The full form is computed spectrally (the nonlocal/local strengths have
    no closed form); the simplified form keeps the protective eigen-block and
    retunes the free one so only local and 1<->3 couplings survive.
    """
    basis = enumerate_basis(3, 1)
    H = build_hamiltonian(LatticeParams(3, g, J, delta), basis)
    if not simplified:
        spec = eigendecompose(H)
        return HermitianOperator(
            basis, cd_from_eigensystem(spec.energies, spec.states, dJ_dt * hopping_vj(basis))
        )
    coeffs = simplified_3s1e_coefficients(H.matrix[None, :, :], np.array([dJ_dt]))
    gens = _qubit_cavity_generators(basis)
    return HermitianOperator(basis, np.einsum("ij,ijkl->kl", coeffs[0], gens))


# ---------------------------------------------------------------------------
# two sites, two excitations


def _four_operator_generator(basis: Basis) -> np.ndarray:
    """i*(A2^dag C2 - C2^dag A2), A2 = a1^2 - a2^2, C2 = a2 s1- - a1 s2-.

    The overall sign is fixed against the exact spectral construction (the
    block fit comes out positive with this choice).
    """
    ops_list = [
        (+1.0, [("a_dagger", 0), ("a_dagger", 0), ("a", 1), ("sigma_minus", 0)]),
        (-1.0, [("a_dagger", 0), ("a_dagger", 0), ("a", 0), ("sigma_minus", 1)]),
        (-1.0, [("a_dagger", 1), ("a_dagger", 1), ("a", 1), ("sigma_minus", 0)]),
        (+1.0, [("a_dagger", 1), ("a_dagger", 1), ("a", 0), ("sigma_minus", 1)]),
    ]
    return operator_matrix(_antihermitian_terms(ops_list, 1.0), basis)


def subset_states_2s2e(g, J, basis: Basis | None = None) -> np.ndarray:
    """Columns (v2, v3, v4) of the hopping-decoupled three-state subset at delta = 0.

    v3 and v4 are the swap-antisymmetric states at -/+ sqrt(2g^2 + J^2) (the
    whole subset is antisymmetric under site exchange, which resolves the
    degeneracy these levels hit at J = 0); v2 is the zero-energy combination
    that the hopping operator connects to them.
    """
    if basis is None:
        basis = enumerate_basis(2, 2)
    H = build_hamiltonian(LatticeParams(2, g, J, 0.0), basis)
    perm = swap_permutation(basis)
    spec = symmetry_adapted(eigendecompose(H), perm)
    e34 = np.sqrt(2 * g**2 + J**2)
    def pick(target):
        close = np.nonzero(np.abs(spec.energies - target) < 1e-8)[0]
        if len(close) == 0:
            raise StructureError("expected eigenvalue not found")
        for idx in close:
            if classify_parity(spec.states[:, idx], perm) is ParityLabel.ANTISYMMETRIC:
                return spec.states[:, idx]
        raise StructureError("no swap-antisymmetric state at the expected eigenvalue")
    v3 = pick(-e34)
    v4 = pick(+e34)
    zero_cols = np.nonzero(np.abs(spec.energies) < 1e-8)[0]
    if len(zero_cols) != 2:
        raise StructureError("expected a two-fold zero-energy subspace")
    zero_block = spec.states[:, zero_cols]
    vj = hopping_vj(basis)
    w = zero_block @ (zero_block.conj().T @ (vj @ v3))
    nw = np.linalg.norm(w)
    if nw < 1e-10:
        raise StructureError("zero-energy subset member is not hopping-connected")
    v2 = w / nw
    return np.column_stack([v2, v3, v4])


def calibrate_chi2(g, J) -> float:
    """Least-squares gap scale chi2^2 for the two-excitation subset CD form.

    Matches the four-operator generator to the exact CD operator restricted to
    the (v2, v3, v4) block at delta = 0 and unit ramp speed.  The fitted value
    coincides with 2g^2 + J^2, the squared gap of the subset doublet (checked
    in the test suite across a parameter grid).
    """
    basis = enumerate_basis(2, 2)
    H = build_hamiltonian(LatticeParams(2, g, J, 0.0), basis)
    spec = eigendecompose(H)
    full = cd_from_eigensystem(spec.energies, spec.states, hopping_vj(basis))
    S = subset_states_2s2e(g, J, basis)
    target = S.conj().T @ full @ S
    K0 = (g / 2.0) * (S.conj().T @ _four_operator_generator(basis) @ S)
    denom = np.vdot(K0, K0).real
    if denom < 1e-30:
        raise StructureError("subset generator vanishes; cannot calibrate")
    s = np.vdot(K0, target).real / denom
    resid = np.max(np.abs(s * K0 - target))
    if resid > FIT_TOLERANCE * max(1.0, np.max(np.abs(target))):
        raise StructureError(f"subset CD form does not fit the exact block (residual {resid:.2e})")
    if s <= 0:
        raise StructureError("calibration produced a non-positive scale")
    return 1.0 / s


def simplified_cd_2s2e_Jramp(g, J, dJ_dt, chi2_squared, basis: Basis | None = None) -> HermitianOperator:
    """Subset CD operator (g / 2 chi2^2) dJ/dt * i*(A2^dag C2 - h.c.) at delta = 0."""
    if chi2_squared <= 0:
        raise InvalidArgumentError("chi2_squared must be positive")
    if basis is None:
        basis = enumerate_basis(2, 2)
    pref = (g / (2 * chi2_squared)) * dJ_dt
    return HermitianOperator(basis, pref * _four_operator_generator(basis))
