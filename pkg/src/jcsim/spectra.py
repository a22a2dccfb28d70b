"""Eigendecomposition, parity classification, and eigenstate tracking.

Includes the closed-form spectra for the two-site lattice: the one-excitation
eigensystem (valid for any detuning) and the two-excitation eigenvalues
(valid at zero detuning).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateFormulaError, InvalidArgumentError
from .model import Basis, HermitianOperator

GAUGE_THRESHOLD = 1e-9
PARITY_THRESHOLD = 1e-9
TIE_THRESHOLD = 1e-6


class ParityLabel(Enum):
    SYMMETRIC = 1
    ANTISYMMETRIC = -1
    NONE = 0


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues and gauge-fixed unit eigenvectors (as columns)."""

    energies: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    basis: Basis | None = None
    ambiguous_tracking: bool = False


def gauge_fix(vectors: np.ndarray, threshold: float = GAUGE_THRESHOLD) -> np.ndarray:
    """Rotate each column so its first non-negligible amplitude is real positive."""
    out = np.array(vectors, dtype=complex)
    for i in range(out.shape[1]):
        col = out[:, i]
        nz = np.nonzero(np.abs(col) > threshold)[0]
        if len(nz):
            pivot = col[nz[0]]
            out[:, i] = col * (np.abs(pivot) / pivot)
    return out


def _as_matrix(H) -> np.ndarray:
    if isinstance(H, HermitianOperator):
        return H.matrix
    return np.asarray(H, dtype=complex)


def _basis_of(H) -> Basis | None:
    return H.basis if isinstance(H, HermitianOperator) else None


def eigendecompose(H) -> Spectrum:
    """Dense Hermitian eigensolve with ascending energies and fixed gauge."""
    mat = _as_matrix(H)
    if np.max(np.abs(mat - mat.conj().T)) >= 1e-10:
        raise InvalidArgumentError("matrix is not Hermitian")
    energies, vectors = np.linalg.eigh(mat)
    return Spectrum(energies, gauge_fix(vectors), _basis_of(H))


def chi_factors(g: float, J: float, delta: float):
    """(delta-J, delta+J, chi1_minus, chi1_plus) from the two-site doublet formulas."""
    dm, dp = delta - J, delta + J
    return dm, dp, np.sqrt(dm**2 + 4 * g**2), np.sqrt(dp**2 + 4 * g**2)


def analytic_spectrum_2s1e(g: float, J: float, delta: float):
    """Closed-form (E_1..E_4, v_1..v_4) for two sites, one excitation.

    Energies come in the formula order E_1,2 = (delta-J -/+ chi-)/2,
    E_3,4 = (delta+J -/+ chi+)/2; vectors are returned as the columns of a
    4x4 array in the same index order and in the standard basis order.
    """
    dm, dp, chim, chip = chi_factors(g, J, delta)
    if chim == 0 or chip == 0:
        raise DegenerateFormulaError("chi1 vanishes; closed form is singular here")
    energies = np.array([(dm - chim) / 2, (dm + chim) / 2, (dp - chip) / 2, (dp + chip) / 2])
    sm_m = np.sqrt((chim - dm) / chim)  # photon-like weight of the minus doublet
    sp_m = np.sqrt((chim + dm) / chim)
    sm_p = np.sqrt((chip - dp) / chip)
    sp_p = np.sqrt((chip + dp) / chip)
    vectors = 0.5 * np.array(
        [
            [-sm_m, sp_m, sm_p, -sp_p],
            [sp_m, sm_m, -sp_p, -sm_p],
            [-sm_m, sp_m, -sm_p, sp_p],
            [sp_m, sm_m, sp_p, sm_p],
        ],
        dtype=complex,
    )
    return energies, vectors


def analytic_spectrum_2s2e(g: float, J: float) -> np.ndarray:
    """Closed-form eigenvalues E_1..E_8 for two sites, two excitations, delta = 0."""
    root = np.sqrt(4 * g**4 + 60 * g**2 * J**2 + 9 * J**4)
    e34 = np.sqrt(2 * g**2 + J**2)
    e56 = np.sqrt((6 * g**2 + 5 * J**2 - root) / 2)
    e78 = np.sqrt((6 * g**2 + 5 * J**2 + root) / 2)
    return np.array([0.0, 0.0, -e34, e34, -e56, e56, -e78, e78])


def classify_parity(state: np.ndarray, permutation: np.ndarray) -> ParityLabel:
    """Label a unit vector as symmetric/antisymmetric under a site permutation."""
    v = np.asarray(state, dtype=complex)
    pv = permutation @ v
    if np.linalg.norm(pv - v) < PARITY_THRESHOLD:
        return ParityLabel.SYMMETRIC
    if np.linalg.norm(pv + v) < PARITY_THRESHOLD:
        return ParityLabel.ANTISYMMETRIC
    return ParityLabel.NONE


def symmetry_adapted(spectrum: Spectrum, permutation: np.ndarray, tol: float = 1e-9) -> Spectrum:
    """Re-diagonalize the permutation inside each degenerate subspace.

    Returns a spectrum whose eigenvectors carry definite parity even where
    the plain eigensolver returned an arbitrary degenerate mixture.
    """
    energies = spectrum.energies
    vectors = np.array(spectrum.states)
    start = 0
    for end in range(1, len(energies) + 1):
        if end == len(energies) or energies[end] - energies[end - 1] > tol:
            if end - start > 1:
                block = vectors[:, start:end]
                p_block = block.conj().T @ permutation @ block
                _, rot = np.linalg.eigh(p_block)
                vectors[:, start:end] = block @ rot
            start = end
    return Spectrum(energies, gauge_fix(vectors), spectrum.basis)


def track_states(previous: Spectrum, current: Spectrum) -> Spectrum:
    """Match current eigenvectors to the previous ones by maximal overlap.

    Columns are reordered greedily by descending |<prev_i|cur_j>| and each
    match is re-phased so the overlap is real positive.  An assignment with
    two candidate overlaps within 1e-6 of each other sets the
    ``ambiguous_tracking`` flag (tie broken toward the lower index).
    """
    prev_v = previous.states
    cur_v = current.states
    if prev_v.shape != cur_v.shape:
        raise InvalidArgumentError("spectra have mismatched dimensions")
    n = prev_v.shape[1]
    overlaps = prev_v.conj().T @ cur_v  # overlaps[i, j] = <prev_i|cur_j>
    mags = np.abs(overlaps)
    assignment = np.full(n, -1)
    ambiguous = False
    taken = np.zeros(n, dtype=bool)
    # greedy: resolve the globally largest overlaps first
    order = np.argsort(mags, axis=None)[::-1]
    for flat in order:
        i, j = divmod(int(flat), n)
        if assignment[i] >= 0 or taken[j]:
            continue
        free = ~taken
        free[j] = False
        if free.any() and mags[i, free].size and mags[i, free].max() > mags[i, j] - TIE_THRESHOLD:
            ambiguous = True
            candidates = np.nonzero(~taken & (mags[i] > mags[i, j] - TIE_THRESHOLD))[0]
            j = int(candidates.min())
        assignment[i] = j
        taken[j] = True
    new_vectors = np.empty_like(cur_v)
    new_energies = np.empty_like(current.energies)
    for i in range(n):
        j = assignment[i]
        ov = overlaps[i, j]
        phase = np.abs(ov) / ov if np.abs(ov) > 0 else 1.0
        new_vectors[:, i] = cur_v[:, j] * phase
        new_energies[i] = current.energies[j]
    return Spectrum(new_energies, new_vectors, current.basis, ambiguous)


def track_reference(reference: np.ndarray, H) -> np.ndarray:
    """Continue a single reference eigenstate through an eigensolve of H.

    Picks the eigenvector of H with maximal overlap against ``reference`` and
    re-phases it so the overlap is real positive.
    """
    spec = eigendecompose(H)
    overlaps = spec.states.conj().T @ np.asarray(reference, dtype=complex)
    j = int(np.argmax(np.abs(overlaps)))
    ov = overlaps[j]
    phase = ov / np.abs(ov) if np.abs(ov) > 0 else 1.0
    return spec.states[:, j] * phase
