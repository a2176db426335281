"""Hyperfine spin algebra for three identical bosons.

Product and total-spin coupled bases for three spin-f atoms, Clebsch-Gordan
coefficients, cyclic permutation matrices, pairwise scattering-length
matrices, total-spin projectors, and the pairwise spin-exchange operator.
Integer f only; exercised at f = 1 and 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "SpinorSpecies",
    "ProductSpinBlock",
    "CoupledSpinState",
    "PairCoupledState",
    "ProjectorMatrix",
    "SymmetrizedPartition",
    "clebsch_gordan",
    "two_body_coupled_states",
    "three_body_coupled_states",
    "symmetrize_states",
    "product_block",
    "permutation_matrices",
    "pair_scattering_matrix",
    "projector_matrix",
    "exchange_operator_matrix",
]


def _twice(x, name: str) -> int:
    # angular momentum arguments must be integer or half-integer
    t = 2 * float(x)
    ti = round(t)
    if abs(t - ti) > 1e-9:
        raise ValueError(f"{name} must be integer or half-integer, got {x!r}")
    return int(ti)


def _hfact(n2: int) -> int:
    # factorial of n2/2 where n2 is an even doubled integer
    return math.factorial(n2 // 2)


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>, Condon-Shortley phase.

    Exact rational internals (Racah sum over Fractions), so the returned
    double is accurate to rounding. Incompatible quantum numbers are valid
    input and give 0.0; negative or non-(half-)integer j raise ValueError.
    """
    jj1 = _twice(j1, "j1")
    jj2 = _twice(j2, "j2")
    JJ = _twice(J, "J")
    mm1 = _twice(m1, "m1")
    mm2 = _twice(m2, "m2")
    MM = _twice(M, "M")
    if jj1 < 0 or jj2 < 0 or JJ < 0:
        raise ValueError("angular momenta must be nonnegative")

    if abs(mm1) > jj1 or abs(mm2) > jj2 or abs(MM) > JJ:
        return 0.0
    # projection must differ from j by an integer
    if (jj1 + mm1) % 2 or (jj2 + mm2) % 2 or (JJ + MM) % 2:
        return 0.0
    if mm1 + mm2 != MM:
        return 0.0
    if not abs(jj1 - jj2) <= JJ <= jj1 + jj2:
        return 0.0
    if (jj1 + jj2 + JJ) % 2:
        return 0.0

    kmin = max(0, (jj1 + mm2 - JJ) // 2, (jj2 - mm1 - JJ) // 2)
    kmax = min((jj1 + jj2 - JJ) // 2, (jj1 - mm1) // 2, (jj2 + mm2) // 2)
    s = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (
            math.factorial(k)
            * _hfact(jj1 + jj2 - JJ - 2 * k)
            * _hfact(jj1 - mm1 - 2 * k)
            * _hfact(jj2 + mm2 - 2 * k)
            * _hfact(JJ - jj1 - mm2 + 2 * k)
            * _hfact(JJ - jj2 + mm1 + 2 * k)
        )
        s += Fraction(-1 if k % 2 else 1, den)
    if s == 0:
        return 0.0
    pre = Fraction(
        (JJ + 1)
        * _hfact(jj1 + mm1) * _hfact(jj1 - mm1)
        * _hfact(jj2 + mm2) * _hfact(jj2 - mm2)
        * _hfact(JJ + MM) * _hfact(JJ - MM)
        * _hfact(jj1 + jj2 - JJ) * _hfact(jj1 - jj2 + JJ) * _hfact(jj2 + JJ - jj1),
        _hfact(jj1 + jj2 + JJ + 2),
    )
    mag = math.sqrt(float(pre * s * s))
    return mag if s > 0 else -mag


@dataclass(frozen=True)
class SpinorSpecies:
    """Spin-f boson with even-channel scattering lengths (units of r_vdW)."""

    f: int
    scattering_lengths: dict
    mass: float = 1.0

    def __post_init__(self):
        if not isinstance(self.f, int) or self.f < 1:
            raise ValueError("f must be an integer >= 1")
        allowed = range(0, 2 * self.f + 1, 2)
        extra = set(self.scattering_lengths) - set(allowed)
        if extra:
            raise ValueError(f"scattering lengths only for even F2b <= 2f, got {sorted(extra)}")
        # absent channels are noninteracting
        filled = {F: float(self.scattering_lengths.get(F, 0.0)) for F in allowed}
        object.__setattr__(self, "scattering_lengths", filled)

    def a(self, F2b: int) -> float:
        return self.scattering_lengths[F2b]


@dataclass(frozen=True, eq=False)
class ProductSpinBlock:
    """Basis {|m1 m2 m3>} at fixed total projection, lexicographically descending."""

    f: int
    M_total: int
    states: tuple
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {m: i for i, m in enumerate(self.states)})

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, triple) -> int:
        return self._index[tuple(triple)]


def product_block(f: int, MF3b: int) -> ProductSpinBlock:
    """Enumerate all |m1 m2 m3> with m1+m2+m3 = MF3b and |mi| <= f."""
    if abs(MF3b) > 3 * f:
        raise ValueError("total projection exceeds 3f")
    states = []
    for m1 in range(f, -f - 1, -1):
        for m2 in range(f, -f - 1, -1):
            m3 = MF3b - m1 - m2
            if abs(m3) <= f:
                states.append((m1, m2, m3))
    return ProductSpinBlock(f=f, M_total=MF3b, states=tuple(states))


def permutation_matrices(block: ProductSpinBlock):
    """Cyclic permutation matrices (P_plus, P_minus) on the block.

    P_plus sends the amplitude on |m1 m2 m3> to |m2 m3 m1>; P_minus is its
    inverse and transpose.
    """
    n = block.dim
    p = np.zeros((n, n))
    for i, (m1, m2, m3) in enumerate(block.states):
        p[block.index((m2, m3, m1)), i] = 1.0
    return p, p.T.copy()


def _transposition(block: ProductSpinBlock, i: int, j: int) -> np.ndarray:
    n = block.dim
    t = np.zeros((n, n))
    for a, m in enumerate(block.states):
        s = list(m)
        s[i], s[j] = s[j], s[i]
        t[block.index(tuple(s)), a] = 1.0
    return t


# interacting pair slots (zero based) for each spectator label
_PAIR_OF_SPECTATOR = {1: (1, 2), 2: (2, 0), 3: (0, 1)}


def pair_scattering_matrix(block: ProductSpinBlock, spectator: int,
                           species: SpinorSpecies) -> np.ndarray:
    """Scattering-length matrix A^(k) of the pair not containing spectator k.

    Block diagonal over the spectator projection; eigenvalues are the even
    channel lengths plus zeros from the odd (noninteracting) channels.
    """
    if spectator not in (1, 2, 3):
        raise ValueError("spectator must be 1, 2 or 3")
    if block.f != species.f:
        raise ValueError("block and species disagree on f")
    i, j = _PAIR_OF_SPECTATOR[spectator]
    k = 3 - i - j
    f = block.f
    out = np.zeros((block.dim, block.dim))
    for F2b, a in species.scattering_lengths.items():
        if a == 0.0:
            continue
        for M2b in range(-F2b, F2b + 1):
            mk = block.M_total - M2b
            if abs(mk) > f:
                continue
            w = np.zeros(block.dim)
            for idx, m in enumerate(block.states):
                if m[k] != mk or m[i] + m[j] != M2b:
                    continue
                w[idx] = clebsch_gordan(f, m[i], f, m[j], F2b, M2b)
            out += a * np.outer(w, w)
    return out


@dataclass(frozen=True, eq=False)
class PairCoupledState:
    """Two-body state |F2b MF2b> as a coefficient table over {(m1, m2)}."""

    F2b: int
    MF2b: int
    coefficients: dict
    antisymmetric: bool


def two_body_coupled_states(f: int):
    """All two-body coupled states for a pair of spin-f atoms.

    Odd F2b states are antisymmetric under exchange of the pair and carry
    no interaction in the even-channel model.
    """
    if not isinstance(f, int) or f < 1:
        raise ValueError("f must be an integer >= 1")
    states = []
    for F2b in range(0, 2 * f + 1):
        for M2b in range(F2b, -F2b - 1, -1):
            table = {}
            for m1 in range(f, -f - 1, -1):
                m2 = M2b - m1
                if abs(m2) <= f:
                    table[(m1, m2)] = clebsch_gordan(f, m1, f, m2, F2b, M2b)
            states.append(PairCoupledState(F2b=F2b, MF2b=M2b, coefficients=table,
                                           antisymmetric=bool(F2b % 2)))
    return states


def _allowed_F2b(f: int, F3b: int):
    return [F2b for F2b in range(0, 2 * f + 1) if abs(F2b - f) <= F3b <= F2b + f]


@dataclass(frozen=True, eq=False)
class CoupledSpinState:
    """Three-body state |F3b MF3b (F2b)>, pair (1,2) coupled first."""

    F3b: int
    MF3b: int
    F2b: int
    coefficients: np.ndarray
    symmetry: str
    block: ProductSpinBlock = field(repr=False, default=None)


def _symmetry_projectors(block: ProductSpinBlock):
    p_plus, p_minus = permutation_matrices(block)
    t12 = _transposition(block, 0, 1)
    t13 = _transposition(block, 0, 2)
    t23 = _transposition(block, 1, 2)
    ident = np.eye(block.dim)
    cyc = ident + p_plus + p_minus
    swaps = t12 + t13 + t23
    return (cyc + swaps) / 6.0, (cyc - swaps) / 6.0


def _classify_symmetry(block: ProductSpinBlock, vec: np.ndarray) -> str:
    p_sym, p_ant = _symmetry_projectors(block)
    if np.linalg.norm(p_sym @ vec) > 1.0 - 1e-9:
        return "symmetric"
    if np.linalg.norm(p_ant @ vec) > 1.0 - 1e-9:
        return "antisymmetric"
    return "mixed"


def three_body_coupled_states(f: int, F3b: int, MF3b: int):
    """States |F3b MF3b (F2b)> for every F2b allowed by the triangle rule.

    Coefficients are over product_block(f, MF3b): the pair (1,2) is coupled
    to F2b, then the third spin to total F3b.
    """
    if not isinstance(f, int) or f < 1:
        raise ValueError("f must be an integer >= 1")
    if not 0 <= F3b <= 3 * f:
        raise ValueError("F3b out of range")
    if abs(MF3b) > F3b:
        raise ValueError("|MF3b| must not exceed F3b")
    block = product_block(f, MF3b)
    out = []
    for F2b in _allowed_F2b(f, F3b):
        vec = np.zeros(block.dim)
        for idx, (m1, m2, m3) in enumerate(block.states):
            c_pair = clebsch_gordan(f, m1, f, m2, F2b, m1 + m2)
            if c_pair == 0.0:
                continue
            vec[idx] = c_pair * clebsch_gordan(F2b, m1 + m2, f, m3, F3b, MF3b)
        out.append(CoupledSpinState(F3b=F3b, MF3b=MF3b, F2b=F2b, coefficients=vec,
                                    symmetry=_classify_symmetry(block, vec),
                                    block=block))
    return out


@dataclass(frozen=True, eq=False)
class ProjectorMatrix:
    """Orthonormal row matrix S spanning one (F3b, MF3b) subspace."""

    F3b: int
    MF3b: int
    rows: tuple
    matrix: np.ndarray
    block: ProductSpinBlock = field(repr=False, default=None)


def projector_matrix(block: ProductSpinBlock, F3b: int) -> ProjectorMatrix:
    """Rectangular S whose rows are the coupled states of one F3b subspace."""
    states = three_body_coupled_states(block.f, F3b, block.M_total)
    mat = np.vstack([s.coefficients for s in states])
    return ProjectorMatrix(F3b=F3b, MF3b=block.M_total, rows=tuple(states),
                           matrix=mat, block=block)


@dataclass(frozen=True, eq=False)
class SymmetrizedPartition:
    """S3-adapted combinations of one F3b subspace, in coupled coordinates.

    Vectors are coefficients over the coupled states ordered by ascending
    F2b (the `F2b_order` tuple). Mixed entries come in degenerate pairs
    (even-swap-parity partner first).
    """

    F3b: int
    MF3b: int
    F2b_order: tuple
    symmetric: tuple
    mixed: tuple
    antisymmetric: tuple


def symmetrize_states(f: int, F3b: int, MF3b: int) -> SymmetrizedPartition:
    """Partition the (F3b, MF3b) subspace into S3 symmetry types."""
    states = three_body_coupled_states(f, F3b, MF3b)
    block = states[0].block
    coeff = np.vstack([s.coefficients for s in states])
    p_sym, p_ant = _symmetry_projectors(block)
    p_plus, p_minus = permutation_matrices(block)
    # the subspace is permutation invariant, so these are projectors in coords
    m_sym = coeff @ p_sym @ coeff.T
    m_ant = coeff @ p_ant @ coeff.T

    def _range_basis(proj):
        vals, vecs = np.linalg.eigh(proj)
        cols = [vecs[:, i] for i in range(len(vals)) if vals[i] > 0.5]
        return [_canonical_sign(v) for v in cols]

    sym_vecs = _range_basis(m_sym)
    ant_vecs = _range_basis(m_ant)
    m_mix = np.eye(len(states)) - m_sym - m_ant
    pairs = []
    if np.trace(m_mix) > 0.5:
        # T12 is diagonal over F2b parity, so even rows of the mixed space
        # give one partner and P+ - P- rotates onto the other
        t12_coords = np.diag([(-1.0) ** s.F2b for s in states])
        restricted = m_mix @ t12_coords @ m_mix
        vals, vecs = np.linalg.eigh(restricted)
        rot = coeff @ (p_plus - p_minus) @ coeff.T
        for i in range(len(vals)):
            if vals[i] > 0.5:
                even = _canonical_sign(vecs[:, i])
                odd = rot @ even / math.sqrt(3.0)
                pairs.append((even, _canonical_sign(odd)))
    return SymmetrizedPartition(
        F3b=F3b, MF3b=MF3b,
        F2b_order=tuple(s.F2b for s in states),
        symmetric=tuple(sym_vecs), mixed=tuple(pairs),
        antisymmetric=tuple(ant_vecs),
    )


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    for x in v:
        if abs(x) > 1e-10:
            return v if x > 0 else -v
    return v


def exchange_operator_matrix(block: ProductSpinBlock) -> np.ndarray:
    """Matrix of sum_{i<j} f_i . f_j on the product block."""
    f = block.f
    n = block.dim
    out = np.zeros((n, n))

    def up(m):
        return math.sqrt(f * (f + 1) - m * (m + 1))

    def down(m):
        return math.sqrt(f * (f + 1) - m * (m - 1))

    for a, m in enumerate(block.states):
        for i, j in ((0, 1), (0, 2), (1, 2)):
            out[a, a] += m[i] * m[j]
            for raise_i, lower_j in ((i, j), (j, i)):
                t = list(m)
                t[raise_i] += 1
                t[lower_j] -= 1
                if abs(t[raise_i]) <= f and abs(t[lower_j]) <= f:
                    b = block.index(tuple(t))
                    out[b, a] += 0.5 * up(m[raise_i]) * down(m[lower_j])
    return out
