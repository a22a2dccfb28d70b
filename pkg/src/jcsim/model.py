"""Fixed-excitation bases and Hamiltonians for 1D Jaynes-Cummings lattices.

Each lattice site holds one cavity mode and one qubit.  All couplings are
dimensionless (hbar = 1, reference coupling g = 1).  The rotating-frame
Hamiltonian is

    H_r = delta * sum_j n_j  +  g * V_g  +  J * V_J

with V_g the on-site qubit-cavity exchange and V_J the (negative) photon
hopping between nearest-neighbour cavities.  Everything here is a pure
function over immutable values; matrices are dense complex arrays.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidArgumentError

HERMITICITY_TOL = 1e-12


class SiteState(NamedTuple):
    photons: int
    qubit: str  # 'g' or 'e'

    @property
    def excitations(self) -> int:
        return self.photons + (1 if self.qubit == "e" else 0)

    def label(self) -> str:
        return f"|{self.photons},{self.qubit}>"


ProductState = tuple  # tuple[SiteState, ...]


def total_excitations(state: ProductState) -> int:
    return sum(s.excitations for s in state)


def state_label(state: ProductState) -> str:
    return "".join(s.label() for s in state)


@dataclass(frozen=True)
class Basis:
    """Ordered list of product states spanning one (or several) excitation sectors."""

    n_sites: int
    n_excitations: int | None  # None for a direct sum of sectors
    states: tuple

    def __len__(self) -> int:
        return len(self.states)

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def labels(self) -> list[str]:
        return [state_label(s) for s in self.states]


@dataclass(frozen=True)
class LatticeParams:
    n_sites: int
    g: float
    J: float
    delta: float
    boundary: str = "open"  # 'open' or 'periodic'

    def __post_init__(self):
        if self.n_sites < 1:
            raise InvalidArgumentError("n_sites must be >= 1")
        if self.boundary not in ("open", "periodic"):
            raise InvalidArgumentError(f"unknown boundary {self.boundary!r}")


@dataclass(frozen=True)
class HermitianOperator:
    basis: Basis
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (len(self.basis), len(self.basis)):
            raise InvalidArgumentError("matrix dimension does not match basis size")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise InvalidArgumentError("matrix is not Hermitian to 1e-12")
        object.__setattr__(self, "matrix", m)


def _distribution_key(dist):
    # heavy-occupancy groups first, then excitation on the earliest sites first
    return (tuple(sorted(dist, reverse=True)), dist)


def _site_options(k: int) -> list:
    if k == 0:
        return [SiteState(0, "g")]
    return [SiteState(k, "g"), SiteState(k - 1, "e")]


def enumerate_basis(n_sites: int, n_excitations: int) -> Basis:
    """All product states with the given total excitation number.

    The ordering is fixed: excitation distributions over sites are listed with
    heavily-occupied sites first (and, among equals, excitation on earlier
    sites first); within a distribution the photon-heavy state |n,g> precedes
    |n-1,e> at every site, with site 1 varying fastest.
    """
    if n_sites < 1:
        raise InvalidArgumentError("n_sites must be >= 1")
    if n_excitations < 0:
        raise InvalidArgumentError("n_excitations must be >= 0")
    dists = [
        d
        for d in itertools.product(range(n_excitations + 1), repeat=n_sites)
        if sum(d) == n_excitations
    ]
    dists.sort(key=_distribution_key, reverse=True)
    states = []
    for dist in dists:
        options = [_site_options(k) for k in dist]
        for combo in itertools.product(*reversed(options)):
            states.append(tuple(reversed(combo)))
    return Basis(n_sites, n_excitations, tuple(states))


def direct_sum_basis(n_sites: int, max_excitations: int) -> Basis:
    """Concatenation of the sector bases k = 0 .. max_excitations."""
    states = []
    for k in range(max_excitations + 1):
        states.extend(enumerate_basis(n_sites, k).states)
    return Basis(n_sites, None, tuple(states))


# ---------------------------------------------------------------------------
# operator assembly

_LOWERING = {"a", "sigma_minus"}
_RAISING = {"a_dagger", "sigma_plus"}
_DIAGONAL = {"number", "sigma_z"}
OPERATOR_KINDS = _LOWERING | _RAISING | _DIAGONAL | {"sigma_x"}


def apply_site_op(kind: str, site: int, state: ProductState):
    """Apply a single-site primitive; returns a list of (coeff, new_state)."""
    s = state[site]
    out = []
    if kind == "a":
        if s.photons > 0:
            out.append((np.sqrt(s.photons), SiteState(s.photons - 1, s.qubit)))
    elif kind == "a_dagger":
        out.append((np.sqrt(s.photons + 1), SiteState(s.photons + 1, s.qubit)))
    elif kind == "sigma_minus":
        if s.qubit == "e":
            out.append((1.0, SiteState(s.photons, "g")))
    elif kind == "sigma_plus":
        if s.qubit == "g":
            out.append((1.0, SiteState(s.photons, "e")))
    elif kind == "sigma_x":
        out.append((1.0, SiteState(s.photons, "e" if s.qubit == "g" else "g")))
    elif kind == "sigma_z":
        out.append((1.0 if s.qubit == "e" else -1.0, s))
    elif kind == "number":
        if s.photons > 0:
            out.append((float(s.photons), s))
    else:
        raise InvalidArgumentError(f"unknown operator kind {kind!r}")
    return [(c, state[:site] + (ns,) + state[site + 1 :]) for c, ns in out]


def _apply_term(ops: Sequence, state: ProductState):
    # ops are written in operator-product order: the rightmost acts first
    results = [(1.0, state)]
    for kind, site in reversed(ops):
        nxt = []
        for coeff, st in results:
            for c, ns in apply_site_op(kind, site, st):
                nxt.append((coeff * c, ns))
        results = nxt
    return results


def operator_matrix(terms: Iterable, basis: Basis, basis_out: Basis | None = None) -> np.ndarray:
    """Dense matrix of sum_k coeff_k * op_string_k between two bases.

    ``terms`` is an iterable of (coeff, ops) with ops a sequence of
    (kind, site) pairs in operator-product order.  Amplitudes landing outside
    ``basis_out`` are dropped, i.e. the result is the restriction to the
    listed states.
    """
    if basis_out is None:
        basis_out = basis
    mat = np.zeros((len(basis_out), len(basis)), dtype=complex)
    index = basis_out.index
    for coeff, ops in terms:
        for col, state in enumerate(basis.states):
            for amp, out_state in _apply_term(ops, state):
                row = index.get(out_state)
                if row is not None:
                    mat[row, col] += coeff * amp
    return mat


def _sector_shift(kind: str) -> int:
    if kind in _LOWERING:
        return -1
    if kind in _RAISING:
        return +1
    return 0


def build_operator(
    kind: str, site: int, basis: Basis, basis_out: Basis | None = None
) -> np.ndarray:
    """Matrix of a single primitive operator on (or out of) a basis.

    On a fixed-excitation basis, sector-changing primitives (a, sigma_minus,
    and their daggers) return rectangular maps into the neighbouring sector;
    sigma_x has no single-sector target and requires an explicit ``basis_out``
    or a direct-sum basis.  Sector-preserving composites should be assembled
    with :func:`operator_matrix`.
    """
    if kind not in OPERATOR_KINDS:
        raise InvalidArgumentError(f"unknown operator kind {kind!r}")
    if not 0 <= site < basis.n_sites:
        raise InvalidArgumentError(f"site {site} out of range for {basis.n_sites} sites")
    if basis_out is None:
        if basis.n_excitations is None:
            basis_out = basis
        else:
            shift = _sector_shift(kind)
            if kind == "sigma_x":
                raise InvalidArgumentError(
                    "sigma_x mixes sectors; pass basis_out or a direct-sum basis"
                )
            target_k = basis.n_excitations + shift
            if shift == 0:
                basis_out = basis
            elif target_k < 0:
                basis_out = Basis(basis.n_sites, None, ())  # annihilated sector
            else:
                basis_out = enumerate_basis(basis.n_sites, target_k)
    return operator_matrix([(1.0, [(kind, site)])], basis, basis_out)


def hopping_links(n_sites: int, boundary: str) -> list:
    links = [(i, i + 1) for i in range(n_sites - 1)]
    # periodic N=2 keeps the single link; doubling it would double the -J entry
    if boundary == "periodic" and n_sites > 2:
        links.append((n_sites - 1, 0))
    return links


def coupling_vg(basis: Basis) -> np.ndarray:
    """V_g = sum_j (a_j^dag sigma_j^- + sigma_j^+ a_j)."""
    terms = []
    for j in range(basis.n_sites):
        terms.append((1.0, [("a_dagger", j), ("sigma_minus", j)]))
        terms.append((1.0, [("sigma_plus", j), ("a", j)]))
    return operator_matrix(terms, basis)


def hopping_vj(basis: Basis, boundary: str = "open") -> np.ndarray:
    """V_J = -sum_<ij> (a_i^dag a_j + a_j^dag a_i) over nearest neighbours."""
    terms = []
    for i, j in hopping_links(basis.n_sites, boundary):
        terms.append((-1.0, [("a_dagger", i), ("a", j)]))
        terms.append((-1.0, [("a_dagger", j), ("a", i)]))
    return operator_matrix(terms, basis)


def photon_number_total(basis: Basis) -> np.ndarray:
    return operator_matrix([(1.0, [("number", j)]) for j in range(basis.n_sites)], basis)


def excitation_number(basis: Basis) -> np.ndarray:
    terms = [(1.0, [("number", j)]) for j in range(basis.n_sites)]
    terms += [(1.0, [("sigma_plus", j), ("sigma_minus", j)]) for j in range(basis.n_sites)]
    return operator_matrix(terms, basis)


def build_hamiltonian(params: LatticeParams, basis: Basis) -> HermitianOperator:
    """Rotating-frame lattice Hamiltonian delta*N_ph + g*V_g + J*V_J."""
    if params.n_sites != basis.n_sites:
        raise InvalidArgumentError(
            f"params are for {params.n_sites} sites, basis for {basis.n_sites}"
        )
    mat = (
        params.delta * photon_number_total(basis)
        + params.g * coupling_vg(basis)
        + params.J * hopping_vj(basis, params.boundary)
    )
    return HermitianOperator(basis, mat)


def site_permutation_matrix(basis: Basis, perm: Sequence[int]) -> np.ndarray:
    """Matrix permuting the lattice sites (perm[i] = source site of new site i)."""
    if sorted(perm) != list(range(basis.n_sites)):
        raise InvalidArgumentError("perm must be a permutation of the sites")
    mat = np.zeros((len(basis), len(basis)))
    for col, state in enumerate(basis.states):
        new_state = tuple(state[p] for p in perm)
        mat[basis.index[new_state], col] = 1.0
    return mat


def swap_permutation(basis: Basis) -> np.ndarray:
    """Site-exchange permutation for a two-site lattice."""
    if basis.n_sites != 2:
        raise InvalidArgumentError("swap_permutation needs a two-site basis")
    return site_permutation_matrix(basis, [1, 0])


def mirror_permutation(basis: Basis) -> np.ndarray:
    """1 <-> N reflection for an open chain."""
    return site_permutation_matrix(basis, list(range(basis.n_sites - 1, -1, -1)))


def sigma_x_pair(basis: Basis, site_a: int = 0, site_b: int = 1) -> np.ndarray:
    """sigma_x(a) * sigma_x(b) restricted to the listed states.

    On a direct-sum basis this is the full truncated operator; on a single
    fixed-excitation basis only the sector-preserving part survives, which is
    exactly what a pure sector state's expectation value sees.
    """
    return operator_matrix([(1.0, [("sigma_x", site_a), ("sigma_x", site_b)])], basis)
