"""Log-periodic scaling functions and observable scaling laws.

Evaluates the universal interference/resonance line shapes M, P, T, O and
the per-regime scaling-law cells for three-body recombination, three-body
and atom-dimer elastic lengths, and atom-dimer decay rates, together with
the direct/exchange decomposition of the two- and three-body interaction
operators and their coupling constants.

Conventions:
  - Lengths in r_vdW, energies in 1/(m r_vdW^2).
  - The universal prefactors alpha, beta, gamma default to 1; every cell
    value therefore carries the correct shape and scattering-length
    dependence but an arbitrary overall magnitude.
  - Rates are raw per-channel values; no spin-degeneracy prefactors for
    total rates are applied.
  - Dissociation rates use proportionality constant 1: D3 = K3 * k^4 * a.
  - A magnitude ratio >= 100 between scales counts as "well separated"
    when classifying the regime of a (a0, a2) pair.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .spins import clebsch_gordan, product_block, exchange_operator_matrix, \
    projector_matrix, symmetrize_states
from .spectrum import ShortRangeSpec, three_body_parameter

UNDEFINED = "undefined"
SUPPRESSED = "suppressed"

REGIME_RATIO = 100.0

# suppression exponents per regime family, at the precision they are
# quoted; each one equals an intermediate-region channel root of the
# adiabatic solver (cross-checked there to 5e-4)
S1_LARGE_A2 = 0.7429
S1_LARGE_A0 = 0.4097
S1_SECTOR_2 = 2.1662

THREE_BODY_IDS = ("K3_0", "K3_2", "K3_d", "a3b", "D3_0", "D3_2")
ATOM_DIMER_IDS = ("Kad_0d", "Kad_2d", "Kad_20", "Kad_02", "aad_0", "aad_2")
OBSERVABLE_IDS = THREE_BODY_IDS + ATOM_DIMER_IDS


class RegimeError(ValueError):
    """Supplied lengths do not realize the requested regime."""

    def __init__(self, message: str, detected: str = ""):
        super().__init__(message)
        self.detected = detected


class ResonancePoleError(ArithmeticError):
    """Resonance denominator vanished exactly with eta = 0."""


@dataclass(frozen=True)
class ScalingParams:
    """Universal constants and short-range inputs of the scaling laws.

    s1 defaults to None, meaning the evaluator picks the canonical
    exponent of the active regime; an explicit value overrides it.
    """

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    eta: float = 0.0
    phi: float = 0.0
    s0_mag: float = 1.006238
    s1: float | None = None
    r_vdw: float = 1.0

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        if self.s0_mag <= 0:
            raise ValueError("s0_mag must be positive")
        if self.s1 is not None and self.s1 <= 0:
            raise ValueError("s1 must be positive when given")
        if self.r_vdw <= 0:
            raise ValueError("r_vdw must be positive")

    @property
    def r_phi(self) -> float:
        return three_body_parameter(ShortRangeSpec(
            phi=self.phi, s0_mag=self.s0_mag, r_vdw=self.r_vdw))


def _theta(a_mag: float, params: ScalingParams) -> float:
    return params.s0_mag * math.log(a_mag / params.r_phi)


def interference_M(a: float, params: ScalingParams) -> float:
    """alpha e^{-2 eta} [sin^2(|s0| ln(a/r_phi)) + sinh^2 eta], a > 0."""
    if a <= 0:
        raise ValueError("interference form requires a positive length")
    th = _theta(a, params)
    return params.alpha * math.exp(-2.0 * params.eta) * (
        math.sin(th) ** 2 + math.sinh(params.eta) ** 2)


def resonance_P(a: float, params: ScalingParams) -> float:
    """beta sinh(2 eta) / [sin^2(|s0| ln(|a|/r_phi)) + sinh^2 eta].

    Raises ResonancePoleError when eta = 0 and the sine vanishes exactly
    (|a| on a resonance position to the last bit).
    """
    if a == 0:
        raise ValueError("length must be nonzero")
    s2 = math.sin(_theta(abs(a), params)) ** 2
    denom = s2 + math.sinh(params.eta) ** 2
    if denom == 0.0:
        raise ResonancePoleError("resonance denominator vanished")
    return params.beta * math.sinh(2.0 * params.eta) / denom


def tangent_T(a: float, params: ScalingParams) -> float:
    """alpha + beta 2 sin cos / [sin^2 + sinh^2 eta] at |s0| ln(|a|/r_phi).

    Crosses alpha where the cosine vanishes. Raises ResonancePoleError at
    exact eta = 0 resonances; the table evaluators convert that into a
    signed-infinity marker instead (sign of beta, upper-side limit).
    """
    if a == 0:
        raise ValueError("length must be nonzero")
    th = _theta(abs(a), params)
    denom = math.sin(th) ** 2 + math.sinh(params.eta) ** 2
    if denom == 0.0:
        raise ResonancePoleError("resonance denominator vanished")
    return params.alpha + params.beta * 2.0 * math.sin(th) * math.cos(th) / denom


def oscillation_O(a: float, params: ScalingParams) -> float:
    """alpha + beta e^{-2 eta} [sin^2(|s0| ln(|a|/r_phi)) + sinh^2 eta]."""
    if a == 0:
        raise ValueError("length must be nonzero")
    th = _theta(abs(a), params)
    return params.alpha + params.beta * math.exp(-2.0 * params.eta) * (
        math.sin(th) ** 2 + math.sinh(params.eta) ** 2)


def _guarded(func, a, params):
    # table-evaluator variant: exact eta = 0 poles become signed infinity
    try:
        return func(a, params)
    except ResonancePoleError:
        return math.copysign(math.inf, params.beta)


# --- regime taxonomy ---------------------------------------------------

_SIGN_TOKENS = {
    1: ("a2>>a0", "a2>>|a0|", "|a2|>>a0", "|a2|>>|a0|",
        "a0>>a2", "a0>>|a2|", "|a0|>>a2", "|a0|>>|a2|"),
    2: ("a2>>rvdw", "|a2|>>rvdw"),
    3: ("a2>>rvdw", "|a2|>>rvdw"),
}


def _canon_regime(text: str) -> str:
    t = text.replace("≫", ">>").replace(" ", "").replace("$", "")
    t = t.replace("\\gg", ">>").replace("_", "").lower()
    t = t.replace("r0", "rvdw")
    return t


def _canon_observable(text: str) -> str:
    t = text.replace("^", "").replace("{", "").replace("}", "")
    t = t.replace("(", "").replace(")", "").replace("/", "").replace("_", "")
    t = t.replace(" ", "").lower()
    table = {
        "k30": "K3_0", "k32": "K3_2", "k3d": "K3_d", "a3b": "a3b",
        "a3b1": "a3b", "a3b2": "a3b", "a3b3": "a3b",
        "d30": "D3_0", "d32": "D3_2",
        "kad0d": "Kad_0d", "kad2d": "Kad_2d", "kad2": "Kad_2d",
        "kad20": "Kad_20", "kad02": "Kad_02",
        "aad0": "aad_0", "aad2": "aad_2",
    }
    if t not in table:
        raise ValueError(f"unknown observable id: {text!r}")
    return table[t]


@dataclass(frozen=True)
class RegimeDescriptor:
    """One cell address: sector F3b, length ordering/signs, observable."""

    F3b: int
    regime: str
    observable: str

    def __post_init__(self):
        if self.F3b not in (1, 2, 3):
            raise ValueError("F3b must be 1, 2 or 3")
        object.__setattr__(self, "regime", _canon_regime(self.regime))
        object.__setattr__(self, "observable",
                           _canon_observable(self.observable))
        if self.regime not in _SIGN_TOKENS[self.F3b]:
            raise ValueError(f"unknown regime {self.regime!r} for "
                             f"F3b={self.F3b}")


def classify_regime(F3b: int, a0: float, a2: float,
                    params: ScalingParams,
                    threshold: float = REGIME_RATIO) -> str:
    """Canonical regime token realized by (a0, a2), or RegimeError."""
    if F3b in (2, 3):
        if abs(a2) >= threshold * params.r_vdw:
            return "a2>>rvdw" if a2 > 0 else "|a2|>>rvdw"
        raise RegimeError("a2 is not well separated from r_vdw",
                          detected="|a2| ~ rvdw")
    if F3b != 1:
        raise ValueError("F3b must be 1, 2 or 3")
    m0, m2 = abs(a0), abs(a2)
    if m2 >= threshold * m0 and m2 > 0:
        big, small = ("a2", a2 > 0), ("a0", a0 >= 0)
    elif m0 >= threshold * m2 and m0 > 0:
        big, small = ("a0", a0 > 0), ("a2", a2 >= 0)
    else:
        raise RegimeError(
            f"|a2|/|a0| = {m2 / m0 if m0 else math.inf:.3g} separates "
            f"neither scale", detected="|a0| ~ |a2|")
    b = big[0] if big[1] else f"|{big[0]}|"
    s = small[0] if small[1] else f"|{small[0]}|"
    return f"{b}>>{s}"


def regime_s1(F3b: int, regime: str) -> float | None:
    """Canonical suppression exponent of a regime; None where unused."""
    regime = _canon_regime(regime)
    if F3b == 1:
        return S1_LARGE_A2 if regime.lstrip("|")[1] == "2" else S1_LARGE_A0
    if F3b == 2:
        return S1_SECTOR_2
    return None


def _resolve_s1(descriptor: RegimeDescriptor, params: ScalingParams) -> float:
    if params.s1 is not None:
        return params.s1
    s1 = regime_s1(descriptor.F3b, descriptor.regime)
    return 1.0 if s1 is None else s1


def _split_lengths(regime: str, a0: float, a2: float):
    # returns (large, small, small_name) with signed values
    if regime.lstrip("|")[1] == "2":
        return a2, a0, "a0"
    return a0, a2, "a2"


def _check_regime(descriptor, a0, a2, params, override):
    if override:
        return
    found = classify_regime(descriptor.F3b, a0, a2, params)
    if found != descriptor.regime:
        raise RegimeError(
            f"lengths realize regime {found!r}, not {descriptor.regime!r}",
            detected=found)


def rate_scaling(descriptor: RegimeDescriptor, a0: float, a2: float,
                 params: ScalingParams, k: float = 0.0,
                 override: bool = False):
    """Evaluate one three-body scaling-law cell.

    Returns the cell value with its leading power of the large length
    included, the string "undefined" for cells with no universal form,
    or "suppressed" when the observable's product channel does not couple
    to the requested F3b sector. k is the entrance-channel wavenumber
    (k^2 = 2 mu E) used by the threshold-law cells.

    With override=True the descriptor's regime is evaluated as stated
    without checking that (a0, a2) actually realize it.
    """
    if descriptor.observable not in THREE_BODY_IDS:
        raise ValueError(f"{descriptor.observable} is not a three-body "
                         "observable")
    _check_regime(descriptor, a0, a2, params, override)
    obs = descriptor.observable
    if obs in ("D3_0", "D3_2"):
        base = rate_scaling(
            RegimeDescriptor(descriptor.F3b, descriptor.regime,
                             "K3_" + obs[-1]),
            a0, a2, params, k, override=True)
        if isinstance(base, str):
            return base
        a = a0 if obs == "D3_0" else a2
        return base * k ** 4 * a

    if descriptor.F3b == 1:
        return _rate_cell_f3b1(obs, descriptor.regime, a0, a2, params,
                               _resolve_s1(descriptor, params))
    return _rate_cell_sector23(descriptor.F3b, obs, a0, a2, params, k,
                               _resolve_s1(descriptor, params))


def _rate_cell_f3b1(obs, regime, a0, a2, params, s1):
    large, small, small_name = _split_lengths(regime, a0, a2)
    ratio = abs(small / large)
    lead = large ** 4
    small_dimer = "K3_0" if small_name == "a0" else "K3_2"
    large_dimer = "K3_2" if small_name == "a0" else "K3_0"
    if obs == small_dimer:
        # recombination into the weakly bound dimer of the small length
        if small <= 0:
            return UNDEFINED
        return lead * _guarded(interference_M, small, params) * ratio ** (2 * s1)
    if obs == large_dimer:
        # recombination into the weakly bound dimer of the large length
        if large <= 0:
            return UNDEFINED
        func = interference_M if small > 0 else resonance_P
        return lead * (params.gamma
                       + _guarded(func, abs(small), params) * ratio ** (4 * s1))
    if obs == "K3_d":
        if small > 0:
            return lead * params.gamma * ratio ** (2 * s1)
        return lead * _guarded(resonance_P, small, params) * ratio ** (2 * s1)
    # a3b: elastic three-body length, always defined in this sector
    func = oscillation_O if small > 0 else tangent_T
    return lead * (params.gamma
                   + _guarded(func, abs(small), params) * ratio ** (4 * s1))


def _rate_cell_sector23(F3b, obs, a0, a2, params, k, s1):
    if obs in ("K3_0",):
        return SUPPRESSED  # no weakly bound F2b=0 product in this sector
    if F3b == 2:
        lead = params.gamma * k ** 4 * a2 ** 8
        if obs == "K3_2":
            return lead if a2 > 0 else UNDEFINED
        if obs == "K3_d":
            if a2 > 0:
                return lead
            return lead * (params.r_vdw / abs(a2)) ** (2 * s1)
        return UNDEFINED  # a3b carries no universal form in this sector
    # F3b == 3
    if obs == "K3_2":
        if a2 <= 0:
            return UNDEFINED
        return _guarded(interference_M, a2, params) * a2 ** 4
    if obs == "K3_d":
        if a2 > 0:
            return params.gamma * a2 ** 4
        return _guarded(resonance_P, a2, params) * a2 ** 4
    func = oscillation_O if a2 > 0 else tangent_T
    return _guarded(func, abs(a2), params) * a2 ** 4


def dissociation_rate(which: int, K3_value: float, k: float,
                      a: float) -> float:
    """Dissociation of freshly made dimers: K3 * k^4 * a (convention 1)."""
    if which not in (0, 2):
        raise ValueError("which must be 0 or 2")
    if k < 0:
        raise ValueError("k must be >= 0")
    return K3_value * k ** 4 * a


def atom_dimer_scaling(descriptor: RegimeDescriptor, a0: float, a2: float,
                       params: ScalingParams, k_ad: float = 0.0,
                       override: bool = False):
    """Evaluate one atom-dimer scaling-law cell.

    Same return conventions as rate_scaling. k_ad is the atom-dimer
    collision wavenumber entering the chained dimer-exchange cells
    (Kad_02 = Kad_20 * (a0/a2) * k_ad and its mirror).
    """
    if descriptor.observable not in ATOM_DIMER_IDS:
        raise ValueError(f"{descriptor.observable} is not an atom-dimer "
                         "observable")
    _check_regime(descriptor, a0, a2, params, override)
    obs = descriptor.observable
    regime = descriptor.regime
    if descriptor.F3b in (2, 3):
        if regime != "a2>>rvdw":
            raise RegimeError("atom-dimer cells in this sector need a "
                              "positive well-separated a2", detected=regime)
        if obs not in ("Kad_2d", "aad_2"):
            return SUPPRESSED  # no F2b=0 dimer couples to this sector
        s1 = _resolve_s1(descriptor, params)
        if descriptor.F3b == 2:
            if obs == "Kad_2d":
                return a2 * (params.r_vdw / a2) ** (2 * s1)
            return a2 * (1.0 + (params.r_vdw / a2) ** (4 * s1))
        if obs == "Kad_2d":
            return a2 * _guarded(resonance_P, a2, params)
        return a2 * _guarded(tangent_T, a2, params)

    if regime == "|a2|>>|a0|" or regime == "|a0|>>|a2|":
        raise RegimeError("no weakly bound dimer exists with both lengths "
                          "negative", detected=regime)
    return _ad_cell_f3b1(obs, regime, a0, a2, params,
                         _resolve_s1(descriptor, params), k_ad)


def _ad_cell_f3b1(obs, regime, a0, a2, params, s1, k_ad):
    large, small, small_name = _split_lengths(regime, a0, a2)
    ratio = abs(small / large)
    both_positive = small > 0 and large > 0
    # observables tied to the F2b=0 dimer (length a0) and to the F2b=2
    # dimer (length a2); "deep" rows exist whenever that dimer exists
    small_deep = "Kad_0d" if small_name == "a0" else "Kad_2d"
    large_deep = "Kad_2d" if small_name == "a0" else "Kad_0d"
    small_elastic = "aad_0" if small_name == "a0" else "aad_2"
    large_elastic = "aad_2" if small_name == "a0" else "aad_0"
    into_small = "Kad_20" if small_name == "a0" else "Kad_02"
    into_large = "Kad_02" if small_name == "a0" else "Kad_20"

    if obs == small_deep:
        if small <= 0:
            return UNDEFINED
        return small * _guarded(resonance_P, small, params)
    if obs == large_deep:
        if large <= 0:
            return UNDEFINED
        if small > 0:
            return large * ratio ** (2 * s1)
        return large * _guarded(resonance_P, small, params) * ratio ** (2 * s1)
    if obs == into_small:
        # exchange decay of the large-length dimer into the small-length one
        if not both_positive:
            return UNDEFINED
        return large * _guarded(interference_M, small, params) * ratio ** (2 * s1)
    if obs == into_large:
        # phase-space-suppressed reverse process, chained off the forward one
        if not both_positive:
            return UNDEFINED
        forward = _ad_cell_f3b1(into_small, regime, a0, a2, params, s1, k_ad)
        return forward * (small / large) * k_ad
    if obs == small_elastic:
        if small <= 0:
            return UNDEFINED
        return small * _guarded(tangent_T, small, params)
    # large_elastic
    if large <= 0:
        return UNDEFINED
    func = oscillation_O if small > 0 else tangent_T
    return large * (1.0 + _guarded(func, abs(small), params) * ratio ** (4 * s1))


def table_cells(which: str = "all"):
    """Descriptors for every printed scaling-law cell, one per cell."""
    out = []
    if which in ("all", "three-body"):
        for regime in _SIGN_TOKENS[1]:
            for obs in ("K3_0", "K3_2", "K3_d", "a3b"):
                out.append(RegimeDescriptor(1, regime, obs))
        for F3b in (2, 3):
            for regime in _SIGN_TOKENS[F3b]:
                for obs in ("K3_2", "K3_d", "a3b"):
                    out.append(RegimeDescriptor(F3b, regime, obs))
    if which in ("all", "atom-dimer"):
        for regime in ("a2>>a0", "a2>>|a0|", "|a2|>>a0",
                       "a0>>a2", "a0>>|a2|", "|a0|>>a2"):
            for obs in ATOM_DIMER_IDS:
                out.append(RegimeDescriptor(1, regime, obs))
        for F3b in (2, 3):
            for obs in ("Kad_2d", "aad_2"):
                out.append(RegimeDescriptor(F3b, "a2>>rvdw", obs))
    if not out:
        raise ValueError("which must be 'all', 'three-body' or 'atom-dimer'")
    return tuple(out)


# --- direct/exchange decomposition -------------------------------------

def three_body_direct_exchange(a3b_1: float, a3b_3: float):
    """Direct and exchange parts of the three-body length operator.

    Defined so that a3b_1 P1 + a3b_3 P3 = alpha_3b + alpha_3b_ex
    sum_{i<j} f_i.f_j on the fully symmetric f=1 sector.
    """
    return (3.0 * a3b_1 + 2.0 * a3b_3) / 5.0, (a3b_3 - a3b_1) / 5.0


def two_body_direct_exchange(a0: float, a2: float):
    """Direct and exchange parts of the pair interaction for f=1.

    Defined so that a0 P0 + a2 P2 = alpha_2b + alpha_2b_ex f1.f2 on the
    even-F2b (bosonic) sector; the exchange eigenvalues of f1.f2 there
    are -2 (F2b=0) and +1 (F2b=2).
    """
    return (a0 + 2.0 * a2) / 3.0, (a2 - a0) / 3.0


@dataclass(frozen=True)
class ThreeBodyLengthSet:
    """Pair of sector lengths with their direct/exchange decomposition."""

    a3b_1: float
    a3b_3: float
    alpha_3b: float = field(init=False)
    alpha_3b_ex: float = field(init=False)

    def __post_init__(self):
        direct, exchange = three_body_direct_exchange(self.a3b_1, self.a3b_3)
        object.__setattr__(self, "alpha_3b", direct)
        object.__setattr__(self, "alpha_3b_ex", exchange)


def coupling_constants(m: float, alpha_2b: float, alpha_2b_ex: float,
                       alpha_3b: float, alpha_3b_ex: float):
    """(g_2b, g_2b_ex, g_3b, g_3b_ex) mean-field coupling constants."""
    if m <= 0:
        raise ValueError("mass must be positive")
    two = 4.0 * math.pi / m
    three = math.sqrt(3.0) * 12.0 * math.pi / m
    return (two * alpha_2b, two * alpha_2b_ex,
            three * alpha_3b, three * alpha_3b_ex)


# --- operator identity checks ------------------------------------------

def _symmetric_sector_vectors(block):
    # fully symmetric product-space vectors, grouped per F3b in {1, 3}
    vectors = {}
    for F3b in (1, 3):
        if F3b < abs(block.M_total):
            continue
        smat = projector_matrix(block, F3b).matrix
        part = symmetrize_states(block.f, F3b, block.M_total)
        vectors[F3b] = [smat.T @ v for v in part.symmetric]
    return vectors


def a3b_operator_consistency(block, a3b_1: float, a3b_3: float) -> float:
    """Max entry difference between the two three-body operator forms.

    Builds the operator on the fully symmetric sector of an f=1 product
    block both as the projector sum over F3b in {1, 3} and as
    alpha_3b I + alpha_3b_ex sum f_i.f_j restricted to the same sector.
    """
    if block.f != 1:
        raise ValueError("identity check is defined for f = 1 blocks")
    vectors = _symmetric_sector_vectors(block)
    lengths = {1: a3b_1, 3: a3b_3}
    n = block.dim
    route_proj = np.zeros((n, n))
    basis = []
    for F3b, vecs in vectors.items():
        for v in vecs:
            route_proj += lengths[F3b] * np.outer(v, v)
            basis.append(v)
    sector = sum(np.outer(v, v) for v in basis)
    direct, exchange = three_body_direct_exchange(a3b_1, a3b_3)
    full = direct * np.eye(n) + exchange * exchange_operator_matrix(block)
    route_exchange = sector @ full @ sector
    return float(np.max(np.abs(route_proj - route_exchange)))


def _pair_states(f: int):
    return [(m1, m2) for m1 in range(f, -f - 1, -1)
            for m2 in range(f, -f - 1, -1)]


def _pair_projector(f: int, F2b: int) -> np.ndarray:
    states = _pair_states(f)
    n = len(states)
    out = np.zeros((n, n))
    for M in range(-F2b, F2b + 1):
        vec = np.array([clebsch_gordan(f, m1, f, m2, F2b, M)
                        if m1 + m2 == M else 0.0 for m1, m2 in states])
        out += np.outer(vec, vec)
    return out


def _pair_exchange(f: int) -> np.ndarray:
    # f1.f2 on the two-atom product space via ladder operators
    states = _pair_states(f)
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    out = np.zeros((n, n))

    def up(m):
        return math.sqrt(f * (f + 1) - m * (m + 1))

    for i, (m1, m2) in enumerate(states):
        out[i, i] += m1 * m2
        if m1 + 1 <= f and m2 - 1 >= -f:
            j = index[(m1 + 1, m2 - 1)]
            out[j, i] += 0.5 * up(m1) * up(m2 - 1)
        if m2 + 1 <= f and m1 - 1 >= -f:
            j = index[(m1 - 1, m2 + 1)]
            out[j, i] += 0.5 * up(m2) * up(m1 - 1)
    return out


def a2b_operator_consistency(a0: float, a2: float) -> float:
    """Max entry difference between the two pair-operator forms for f=1.

    Compares a0 P0 + a2 P2 with alpha_2b I + alpha_2b_ex f1.f2 restricted
    to the even-F2b sector of the two-atom product space.
    """
    p0 = _pair_projector(1, 0)
    p2 = _pair_projector(1, 2)
    route_proj = a0 * p0 + a2 * p2
    sector = p0 + p2
    direct, exchange = two_body_direct_exchange(a0, a2)
    full = direct * np.eye(9) + exchange * _pair_exchange(1)
    route_exchange = sector @ full @ sector
    return float(np.max(np.abs(route_proj - route_exchange)))
