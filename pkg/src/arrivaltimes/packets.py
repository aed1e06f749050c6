"""Incident wave packets and the momentum quadrature grid.

The spectral engine works entirely in the momentum representation: a
packet is its amplitude psi(k) on a positive-k quadrature grid.  Planar
Gaussians are the only packet family; superpositions of several
Gaussians (with complex weights) cover the interference scenarios.

Conventions.  A packet with focus time t_f and focus position x0 has

    psi(k) = (2 pi sigma^2)^{-1/4} exp(-(k - k0)^2 / (4 sigma^2))
             * exp(-i k x0) * exp(+i hbar k^2 t_f / (2 m))

so that under free evolution exp(-i hbar k^2 t / 2m) it is narrowest,
and centred at x0, exactly at t = t_f.  With x0 = 0 the packet peak
crosses the detector plane at t_f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class GaussianPacket:
    """Minimum-uncertainty Gaussian in momentum space.

    k_mean, sigma_k in rad/m; x0 in m; t_focus in s; weight may be
    complex for interference between components.
    """

    k_mean: float
    sigma_k: float
    x0: float = 0.0
    t_focus: float = 0.0
    weight: complex = 1.0

    def __post_init__(self) -> None:
        if not (self.k_mean > 0.0 and math.isfinite(self.k_mean)):
            raise ValidationError(f"k_mean must be positive, got {self.k_mean}")
        if not (self.sigma_k > 0.0 and math.isfinite(self.sigma_k)):
            raise ValidationError(f"sigma_k must be positive, got {self.sigma_k}")
        if self.weight == 0.0:
            raise ValidationError("packet weight must be nonzero")

    def amplitude(self, k: np.ndarray, mass: float, hbar: float) -> np.ndarray:
        """psi(k) including the focus phase, without the overall weight."""
        k = np.asarray(k, dtype=float)
        norm = (2.0 * math.pi * self.sigma_k**2) ** (-0.25)
        envelope = np.exp(-((k - self.k_mean) ** 2) / (4.0 * self.sigma_k**2))
        phase = np.exp(-1j * k * self.x0 + 0.5j * hbar * k * k * self.t_focus / mass)
        return norm * envelope * phase

    @property
    def negative_momentum_mass(self) -> float:
        """Exact probability the continuum packet carries at k < 0.

        The model only makes sense for right-movers; this is the part we
        drop when restricting to k > 0.  For the slow, narrow packets of
        interest it is ~1e-5 and handled by renormalization.
        """
        return 0.5 * math.erfc(self.k_mean / (math.sqrt(2.0) * self.sigma_k))


@dataclass(frozen=True)
class MomentumGrid:
    """Composite 16-point Gauss-Legendre grid on [k_lo, k_hi]."""

    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def for_packets(
        cls,
        packets: Sequence[GaussianPacket],
        n_nodes: int = 768,
        support_sigmas: float = 8.0,
        k_floor_rel: float = 1e-6,
    ) -> "MomentumGrid":
        """Grid spanning every component out to support_sigmas widths.

        The lower edge never goes below k_floor_rel times the largest
        mean momentum (and never to k <= 0): the kernels are written for
        strictly positive k and the sqrt(k) factors are singular at 0.
        """
        if not packets:
            raise ValidationError("need at least one packet")
        lo = min(p.k_mean - support_sigmas * p.sigma_k for p in packets)
        hi = max(p.k_mean + support_sigmas * p.sigma_k for p in packets)
        lo = max(lo, k_floor_rel * max(p.k_mean for p in packets))
        if not hi > lo:
            raise ValidationError("empty momentum support")
        return cls.on_interval(lo, hi, n_nodes)

    @classmethod
    def on_interval(cls, k_lo: float, k_hi: float, n_nodes: int) -> "MomentumGrid":
        if not (0.0 < k_lo < k_hi):
            raise ValidationError(f"need 0 < k_lo < k_hi, got [{k_lo}, {k_hi}]")
        panel = 16
        n_panels = max(1, -(-int(n_nodes) // panel))
        x, w = np.polynomial.legendre.leggauss(panel)
        edges = np.linspace(k_lo, k_hi, n_panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        return cls(nodes=nodes, weights=weights)

    @property
    def n(self) -> int:
        return self.nodes.size


def suggest_node_count(
    packets: Sequence[GaussianPacket],
    t_max: float,
    mass: float,
    hbar: float,
    support_sigmas: float = 8.0,
    nodes_per_cycle: float = 4.0,
    minimum: int = 128,
) -> int:
    """Node count that resolves the free phase exp(-i hbar k^2 t / 2m).

    The fastest variation across the grid at the end of the run is
    hbar (k_hi^2 - k_lo^2) t_max / 2m radians; sample each 2 pi cycle
    of it nodes_per_cycle times, rounded up to whole 16-point panels.
    """
    lo = min(p.k_mean - support_sigmas * p.sigma_k for p in packets)
    hi = max(p.k_mean + support_sigmas * p.sigma_k for p in packets)
    lo = max(lo, 0.0)
    cycles = hbar * (hi * hi - lo * lo) * t_max / (4.0 * math.pi * mass)
    n = max(minimum, int(nodes_per_cycle * cycles))
    return -(-n // 16) * 16


@dataclass(frozen=True)
class DiscretizedPacket:
    """A packet superposition sampled on a momentum grid.

    psi is rescaled so the discrete norm sum(w |psi|^2) is exactly 1;
    raw_norm records the pre-rescaling value (continuum norm minus the
    k < 0 tail, truncation, and quadrature error) as a quality figure.
    """

    k: np.ndarray
    w: np.ndarray
    psi: np.ndarray
    raw_norm: float
    negative_mass: float

    @property
    def n(self) -> int:
        return self.k.size


def discretize(
    packets: Sequence[GaussianPacket],
    grid: MomentumGrid,
    mass: float,
    hbar: float,
    renormalize: bool = True,
    norm_tol: float = 1e-3,
) -> DiscretizedPacket:
    """Sample the (possibly multi-component) packet on the grid.

    Raises if the discrete norm is further from 1 than norm_tol, which
    catches grids that miss the packet support entirely.
    """
    psi = np.zeros(grid.n, dtype=complex)
    for p in packets:
        psi += p.weight * p.amplitude(grid.nodes, mass, hbar)
    raw = float(np.sum(grid.weights * np.abs(psi) ** 2))
    if abs(raw - 1.0) > norm_tol:
        raise ValidationError(
            f"discrete packet norm {raw:.6g} deviates from 1 by more than "
            f"{norm_tol:g}; the momentum grid misses too much of the packet"
        )
    if renormalize:
        psi /= math.sqrt(raw)
    neg = sum(abs(p.weight) ** 2 * p.negative_momentum_mass for p in packets)
    return DiscretizedPacket(
        k=grid.nodes, w=grid.weights, psi=psi, raw_norm=raw, negative_mass=float(neg)
    )


def position_amplitude(
    packet: DiscretizedPacket, x: np.ndarray, mass: float, hbar: float, t: float = 0.0
) -> np.ndarray:
    """Real-space free packet psi(x, t) from the momentum samples.

    Plain quadrature of the Fourier integral on the packet's own grid.
    Used to seed grid solvers with exactly the state the spectral
    engine propagates.
    """
    x = np.asarray(x, dtype=float)
    phase = packet.psi * np.exp(-0.5j * hbar * packet.k**2 * t / mass)
    # (n_x, n_k) @ (n_k,) fourier sum
    return (np.exp(1j * np.outer(x, packet.k)) @ (packet.w * phase)) / math.sqrt(2.0 * math.pi)
