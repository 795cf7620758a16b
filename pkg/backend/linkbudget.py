"""Pathloss, received power, interference and Shannon rate."""
import math
from typing import Iterable, List, Optional

import numpy as np

from antenna import cone_gains
from deployment import node_arrays
from models import LinkPower, RateResult, Scenario, SenseMode

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def dbm_to_watts(dbm: float) -> float:
    return 10 ** ((dbm - 30) / 10)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError('dBm is undefined for non-positive power')
    return 10 * math.log10(watts) + 30


def db_to_linear(db: float) -> float:
    return 10 ** (db / 10)


def linear_to_db(value: float) -> float:
    if value <= 0:
        raise ValueError('dB is undefined for non-positive values')
    return 10 * math.log10(value)


def noise_power(noise_psd_dbm_hz: float, bandwidth_hz: float) -> float:
    """N_o * W in watts."""
    return dbm_to_watts(noise_psd_dbm_hz) * bandwidth_hz


def pathloss(d, fc: float, alpha: float):
    """Linear attenuation (c / (4 pi fc))^2 / d^alpha; accepts scalars or arrays."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError('distance must be positive (co-located nodes are invalid)')
    if fc <= 0:
        raise ValueError('carrier frequency must be positive')
    result = (SPEED_OF_LIGHT / (4 * math.pi * fc)) ** 2 / d ** alpha
    return float(result) if result.ndim == 0 else result


def received_power(tx_power: float, total_gain: float, attenuation: float) -> LinkPower:
    """P_{k,j} = P_j * G_{k,j} * L_{k,j}."""
    return LinkPower(watts=tx_power * total_gain * attenuation)


def rate(signal: LinkPower, interference: LinkPower, bandwidth: float, noise_psd: float) -> RateResult:
    """W log2(1 + S / (N_o W + I)); noise_psd in W/Hz."""
    if bandwidth <= 0 or noise_psd <= 0:
        raise ValueError('bandwidth and noise_psd must be positive')
    sinr = signal.watts / (noise_psd * bandwidth + interference.watts)
    return RateResult(bits_per_second=bandwidth * math.log2(1 + sinr), sinr_linear=sinr,
                      interference_watts=interference.watts, signal_watts=signal.watts)


class LinkTable:
    """Per-scenario power matrices behind every sensing and interference query.

    Row index is the transmitting BS, column index the listening node.
    """

    def __init__(self, scenario: Scenario):
        params = scenario.params
        ant = params.antenna
        self.scenario = scenario
        self.num_pairs = scenario.num_pairs
        self.tx_power = dbm_to_watts(params.tx_power_dbm)
        self.bandwidth = params.bandwidth_hz
        self.noise_psd = dbm_to_watts(params.noise_psd_dbm_hz)

        bs_xy, mt_xy, bs_bore, mt_bore = node_arrays(scenario)
        theta_tx = math.radians(ant.theta_tx_deg)
        theta_rx = math.radians(ant.theta_rx_deg)
        g_tx = db_to_linear(ant.tx_mainlobe_gain_db)
        g_rx = db_to_linear(ant.rx_mainlobe_gain_db)

        # BS_j -> MT_k geometry, indexed [j, k]
        delta = mt_xy[None, :, :] - bs_xy[:, None, :]
        dist_bs_mt = np.hypot(delta[..., 0], delta[..., 1])
        to_mt = np.arctan2(delta[..., 1], delta[..., 0])
        tx_to_mt = cone_gains(bs_bore[:, None], to_mt, theta_tx, g_tx, ant.tx_sidelobe_gain)
        # MT_k's directional Rx gain towards BS_j, stored [j, k]
        rx_dir = cone_gains(mt_bore[None, :], to_mt + math.pi, theta_rx, g_rx, ant.rx_sidelobe_gain)
        if ant.mt_rx_mode == SenseMode.OMNI:
            rx_data = np.ones_like(rx_dir)
        else:
            rx_data = rx_dir
        at_mt = self.tx_power * tx_to_mt * pathloss(dist_bs_mt, params.carrier_freq_hz,
                                                    params.pathloss_exponent)
        self.mt_sense_omni = at_mt
        self.mt_sense_dir = at_mt * rx_dir
        self.data_power = at_mt * rx_data

        # BS_i -> BS_j geometry, indexed [i, j]
        delta = bs_xy[None, :, :] - bs_xy[:, None, :]
        dist_bs_bs = np.hypot(delta[..., 0], delta[..., 1])
        np.fill_diagonal(dist_bs_bs, 1.0)
        to_bs = np.arctan2(delta[..., 1], delta[..., 0])
        tx_to_bs = cone_gains(bs_bore[:, None], to_bs, theta_tx, g_tx, ant.tx_sidelobe_gain)
        at_bs = self.tx_power * tx_to_bs * pathloss(dist_bs_bs, params.carrier_freq_hz,
                                                    params.pathloss_exponent)
        np.fill_diagonal(at_bs, 0.0)
        self.bs_sense_omni = at_bs
        # BS_j listens with its own Tx beam: gain of BS_j towards BS_i is tx_to_bs[j, i]
        self.bs_sense_dir = at_bs * tx_to_bs.T

    @staticmethod
    def _others(active: Iterable[int], exclude: int) -> np.ndarray:
        return np.array(sorted(i for i in active if i != exclude), dtype=int)

    def sensed_at_bs(self, active: Iterable[int], j: int, mode: SenseMode) -> float:
        matrix = self.bs_sense_omni if mode == SenseMode.OMNI else self.bs_sense_dir
        return float(matrix[self._others(active, j), j].sum())

    def sensed_at_mt(self, active: Iterable[int], k: int, mode: SenseMode) -> float:
        matrix = self.mt_sense_omni if mode == SenseMode.OMNI else self.mt_sense_dir
        return float(matrix[self._others(active, k), k].sum())

    def interference(self, active: Iterable[int], k: int, mode: Optional[SenseMode] = None) -> float:
        """Interference at MT_k; mode None means the MT's data Rx beam."""
        if mode is None:
            matrix = self.data_power
        elif mode == SenseMode.OMNI:
            matrix = self.mt_sense_omni
        else:
            matrix = self.mt_sense_dir
        return float(matrix[self._others(active, k), k].sum())

    def signal(self, k: int) -> float:
        return float(self.data_power[k, k])

    def snapshot_rates(self, active: Iterable[int]) -> List[RateResult]:
        """Rate of every pair given the final active set; silent pairs get 0."""
        active = sorted(active)
        active_set = set(active)
        rates = []
        for k in range(self.num_pairs):
            if k not in active_set:
                rates.append(RateResult())
                continue
            rates.append(rate(LinkPower(watts=self.signal(k)),
                              LinkPower(watts=self.interference(active, k)),
                              self.bandwidth, self.noise_psd))
        return rates


def interference_at(scenario: Scenario, active_set: Iterable[int], k: int,
                    antenna_mode: SenseMode = SenseMode.DIRECTIONAL,
                    table: Optional[LinkTable] = None) -> LinkPower:
    """I_k = sum over active j != k of P_{k,j}, seen through MT_k's Rx pattern."""
    if not 0 <= k < scenario.num_pairs:
        raise IndexError(f'k={k} out of range for {scenario.num_pairs} pairs')
    table = table or LinkTable(scenario)
    mode = SenseMode.OMNI if antenna_mode == SenseMode.OMNI else SenseMode.DIRECTIONAL
    return LinkPower(watts=table.interference(active_set, k, mode))
