"""Beamforming gains: exact ULA channel model and the cone-plus-circle approximation."""
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from models import BeamPattern

TWO_PI = 2 * math.pi
# Offsets within this of the half beamwidth count as mainlobe
BOUNDARY_TOL = 1e-12

# Unit-norm complex vector of length M (transmit) or N (receive)
BeamVector = np.ndarray


def wrap_angle(angle):
    """Wrap an angle (or array of angles) to [-pi, pi)."""
    return (np.asarray(angle) + math.pi) % TWO_PI - math.pi


def omni_pattern(gain: float = 1.0) -> BeamPattern:
    return BeamPattern(mainlobe_beamwidth=TWO_PI, mainlobe_gain=gain, sidelobe_gain=gain)


def cone_gain(pattern: BeamPattern, direction: float) -> float:
    """Gain of a cone-plus-circle pattern towards `direction` (radians)."""
    if pattern.is_omni:
        return pattern.mainlobe_gain
    offset = abs(float(wrap_angle(direction - pattern.boresight)))
    if offset <= pattern.mainlobe_beamwidth / 2 + BOUNDARY_TOL:
        return pattern.mainlobe_gain
    return pattern.sidelobe_gain


def cone_gains(boresights: np.ndarray, directions: np.ndarray, beamwidth: float,
               mainlobe_gain: float, sidelobe_gain: float) -> np.ndarray:
    """Vectorised cone_gain; `boresights` broadcasts against `directions`."""
    if beamwidth >= TWO_PI:
        return np.full(np.broadcast(boresights, directions).shape, mainlobe_gain, dtype=float)
    offset = np.abs(wrap_angle(directions - boresights))
    return np.where(offset <= beamwidth / 2 + BOUNDARY_TOL, mainlobe_gain, sidelobe_gain)


def total_gain_cone(tx: BeamPattern, rx: BeamPattern, tx_to_rx_direction: float,
                    rx_to_tx_direction: float, los_gain_sq: float = 1.0) -> float:
    """G = |beta_1|^2 * G_tx(towards rx) * G_rx(towards tx)."""
    if los_gain_sq < 0:
        raise ValueError('los_gain_sq must be non-negative')
    return los_gain_sq * cone_gain(tx, tx_to_rx_direction) * cone_gain(rx, rx_to_tx_direction)


@dataclass(frozen=True)
class Path:
    complex_gain: complex
    aod: float  # radians
    aoa: float  # radians


@dataclass(frozen=True)
class PathSet:
    """Multipath description of one BS-MT channel; paths[0] is the LOS path."""
    paths: List[Path]
    num_tx: int  # M
    num_rx: int  # N

    def __post_init__(self):
        if not self.paths:
            raise ValueError('PathSet needs at least one path')
        if self.num_tx < 1 or self.num_rx < 1:
            raise ValueError('num_tx and num_rx must be at least 1')

    @property
    def num_paths(self) -> int:
        return len(self.paths)

    @property
    def los(self) -> Path:
        return self.paths[0]


def ula_response(num_elements: int, angle: float) -> BeamVector:
    """Half-wavelength ULA response: exp(-i*pi*m*sin(angle)) / sqrt(num_elements)."""
    if num_elements < 1:
        raise ValueError(f'num_elements must be >= 1, got {num_elements}')
    m = np.arange(num_elements)
    return np.exp(-1j * math.pi * m * math.sin(angle)) / math.sqrt(num_elements)


def channel_matrix(paths: PathSet) -> np.ndarray:
    """N x M channel: sqrt(MN/L) * sum_l beta_l e_rx(aoa_l) e_tx(aod_l)^H."""
    m, n = paths.num_tx, paths.num_rx
    h = np.zeros((n, m), dtype=complex)
    for path in paths.paths:
        e_rx = ula_response(n, path.aoa)
        e_tx = ula_response(m, path.aod)
        h += path.complex_gain * np.outer(e_rx, e_tx.conj())
    return math.sqrt(m * n / paths.num_paths) * h


def total_gain_exact(r: BeamVector, h: np.ndarray, w: BeamVector) -> float:
    """|r^H H w|^2."""
    r = np.asarray(r)
    w = np.asarray(w)
    h = np.atleast_2d(h)
    if h.shape != (r.shape[0], w.shape[0]):
        raise ValueError(
            f'dimension mismatch: H is {h.shape}, r has {r.shape[0]} and w has {w.shape[0]} elements')
    return float(abs(np.vdot(r, h @ w)) ** 2)


def steered_gain(paths: PathSet, omni_rx: bool = False) -> float:
    """Exact gain with both beams steered to the LOS angles.

    With ``omni_rx`` the receiver uses r_omni, modelled as a single element.
    """
    w = ula_response(paths.num_tx, paths.los.aod)
    if omni_rx:
        paths = PathSet(paths=paths.paths, num_tx=paths.num_tx, num_rx=1)
        r = np.ones(1, dtype=complex)
    else:
        r = ula_response(paths.num_rx, paths.los.aoa)
    return total_gain_exact(r, channel_matrix(paths), w)
