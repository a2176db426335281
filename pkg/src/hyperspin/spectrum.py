"""Bound states of adiabatic channel potentials and geometric-scaling checks.

Solves the hyperradial equation -(1/2mu) phi'' + U(R) phi = E phi between a
hard inner wall and an outer grid edge, in the log variable y = ln R where
the equation becomes chi'' + [2 mu e^{2y}(E - U(e^y)) - 1/4] chi = 0. The
wall radius r_phi = r_vdW e^{-phi/|s0|} carries the short-range physics;
for an attractive 1/R^2 channel the spectrum is geometric with ratio
e^{2 pi/|s0|} between neighbors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adiabatic import PotentialCurve

__all__ = [
    "ShortRangeSpec",
    "BoundSpectrum",
    "three_body_parameter",
    "power_law_potential",
    "curve_potential",
    "bound_states",
    "geometric_ratio_check",
]

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class ShortRangeSpec:
    """Short-range boundary data: unit radius, phase, and |s0| of the channel."""

    phi: float
    s0_mag: float = 1.006238
    r_vdw: float = 1.0

    def __post_init__(self):
        if self.s0_mag <= 0:
            raise ValueError("s0_mag must be positive")
        if self.r_vdw <= 0:
            raise ValueError("r_vdw must be positive")


def three_body_parameter(spec: ShortRangeSpec) -> float:
    """r_phi = r_vdw * exp(-phi/|s0|)."""
    return spec.r_vdw * math.exp(-spec.phi / spec.s0_mag)


@dataclass(frozen=True)
class BoundSpectrum:
    """Negative energies ordered deepest first, with per-state node counts."""

    energies: tuple
    boundary: float
    channel: str
    nodes: tuple = ()
    truncated: bool = False

    def __post_init__(self):
        if any(e >= 0 for e in self.energies):
            raise ValueError("bound energies must be negative")
        if any(a >= b for a, b in zip(self.energies, self.energies[1:])):
            raise ValueError("energies must be strictly increasing (deepest first)")


def power_law_potential(x: float, mass: float = 1.0):
    """U(R) = (x - 1/4)/(2 mu R^2) for a fixed channel exponent x = s^2."""
    if mass <= 0:
        raise ValueError("mass must be positive")
    c = (x - 0.25) * _SQRT3 / (2.0 * mass)

    def U(R):
        return c / (R * R)

    return U


def curve_potential(curve: PotentialCurve, index: int):
    """U(R) interpolating one tracked channel of a PotentialCurve.

    Log-linear interpolation of x(R) over the channel's finite span; x is
    held at the end values outside the span (plateau/dimer tails continue
    their 1/R^2 form through the x parameterization).
    """
    chan = curve.channels[index]
    fin = np.isfinite(chan.x)
    if fin.sum() < 2:
        raise ValueError("channel has fewer than two tracked points")
    logR = np.log(curve.R_grid[fin])
    xv = chan.x[fin]
    mass = curve.species.mass

    def U(R):
        x = np.interp(math.log(R), logR, xv)
        return (x - 0.25) * _SQRT3 / (2.0 * mass * R * R)

    return U


def _numerov_nodes(w: np.ndarray, h: float) -> int:
    """Interior node count of the shooting solution chi for weights w.

    chi(0) = 0, chi(1) = h; fourth-order recurrence with renormalization
    against overflow. Counts strict sign changes. The sweep stops once the
    discretization factor 1 + h^2 w/12 leaves its stable range, which only
    happens deep in the classically forbidden tail where w is negative and
    monotonically diverging: no physical node can occur there and the
    remaining recurrence would alternate signs spuriously.
    """
    c = h * h / 12.0
    g = 1.0 + c * w
    chi0, chi1 = 0.0, h
    nodes = 0
    for j in range(1, len(w) - 1):
        if g[j + 1] < 0.4:
            break
        chi2 = ((12.0 - 10.0 * g[j]) * chi1 - g[j - 1] * chi0) / g[j + 1]
        if (chi2 < 0.0 < chi1) or (chi1 < 0.0 < chi2):
            nodes += 1
        a = abs(chi2)
        if a > 1e250:
            chi2 /= a
            chi1 /= a
        chi0, chi1 = chi1, chi2
    return nodes


def bound_states(potential, inner_wall: float, n_max: int,
                 outer_radius: float | None = None,
                 points_per_decade: int = 200, mass: float = 1.0,
                 channel: str = "") -> BoundSpectrum:
    """Lowest n_max radial bound states between a hard wall and the grid edge.

    `potential` is a callable U(R) (see power_law_potential and
    curve_potential). Eigenvalues are located by node counting on a
    fourth-order log-grid propagation, refined by bisection in ln|E| to a
    relative width of 1e-10. When the grid supports fewer than n_max
    states the result is truncated and flagged.
    """
    if callable(potential):
        U = potential
    elif isinstance(potential, tuple) and len(potential) == 2:
        U = curve_potential(*potential)
    else:
        raise TypeError("potential must be callable or (PotentialCurve, index)")
    if inner_wall <= 0:
        raise ValueError("inner_wall must be positive")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if outer_radius is None:
        outer_radius = 1e4 * inner_wall
    if outer_radius <= inner_wall:
        raise ValueError("outer_radius must exceed inner_wall")
    if points_per_decade < 200:
        raise ValueError("points_per_decade must be at least 200")

    mu = mass / _SQRT3
    decades = math.log10(outer_radius / inner_wall)
    n_pts = int(math.ceil(points_per_decade * decades)) + 1
    y = np.linspace(math.log(inner_wall), math.log(outer_radius), n_pts)
    h = y[1] - y[0]
    e2y = np.exp(2.0 * y)
    Ug = np.array([U(R) for R in np.exp(y)])
    # weight w(E) = aE + b
    a_w = 2.0 * mu * e2y
    b_w = -2.0 * mu * e2y * Ug - 0.25

    def nodes_at(E: float) -> int:
        return _numerov_nodes(a_w * E + b_w, h)

    E_floor = float(np.min(Ug))
    if E_floor >= 0.0:
        # nonnegative potential holds no bound states; the empty result is
        # complete, not grid-limited
        return BoundSpectrum(energies=(), boundary=inner_wall, channel=channel,
                             nodes=(), truncated=False)
    # deepest search energy sits below the potential minimum
    tau_deep = math.log(-2.0 * E_floor)
    # shallowest resolvable scale on this grid
    tau_shallow = math.log(1.0 / (2.0 * mu * outer_radius ** 2) * 1e-8)
    n_top = nodes_at(-math.exp(tau_shallow))
    n_found = min(n_max, n_top)

    energies = []
    nodes = []
    for n in range(n_found):
        lo, hi = tau_shallow, tau_deep      # nodes_at(-e^lo) > n, nodes_at(-e^hi) == 0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if nodes_at(-math.exp(mid)) >= n + 1:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-10:
                break
        tau = 0.5 * (lo + hi)
        # n=0 converges at the largest tau, so energies come out deepest first
        energies.append(-math.exp(tau))
        nodes.append(nodes_at(-math.exp(tau + 1e-9)))
    return BoundSpectrum(energies=tuple(energies), boundary=inner_wall,
                         channel=channel, nodes=tuple(nodes),
                         truncated=n_found < n_max)


def geometric_ratio_check(spectrum: BoundSpectrum, s0_mag: float):
    """Consecutive energy ratios against the geometric factor e^{2 pi/|s0|}.

    Returns [(ratio, deviation), ...] with ratio = E_n/E_{n+1} (deepest
    first) and deviation = |ratio/e^{2 pi/|s0|} - 1|.
    """
    if s0_mag <= 0:
        raise ValueError("s0_mag must be positive")
    if len(spectrum.energies) < 2:
        raise ValueError("need at least two states")
    target = math.exp(2.0 * math.pi / s0_mag)
    out = []
    for e0, e1 in zip(spectrum.energies, spectrum.energies[1:]):
        ratio = e0 / e1
        out.append((ratio, abs(ratio / target - 1.0)))
    return out
