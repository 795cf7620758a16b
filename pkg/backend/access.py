"""Channel access: omniLBT, dirLBT and the four LBT x LBR combinations."""
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from linkbudget import LinkTable, dbm_to_watts
from models import AccessScheme, ChannelState, LinkPower, Scenario, SenseMode, SnapshotResult

logger = logging.getLogger(__name__)

OMNI_THRESHOLD_DBM = -74.0
DIR_THRESHOLD_DBM = -64.0

# Spawn key of the access-order substream, kept apart from deployment draws
ORDER_STREAM = 1

_SCHEME_MODES: Dict[str, Tuple[SenseMode, SenseMode]] = {
    'omni-lbt': (SenseMode.OMNI, SenseMode.NONE),
    'dir-lbt': (SenseMode.DIRECTIONAL, SenseMode.NONE),
    'omni-lbt-omni-lbr': (SenseMode.OMNI, SenseMode.OMNI),
    'omni-lbt-dir-lbr': (SenseMode.OMNI, SenseMode.DIRECTIONAL),
    'dir-lbt-omni-lbr': (SenseMode.DIRECTIONAL, SenseMode.OMNI),
    'dir-lbt-dir-lbr': (SenseMode.DIRECTIONAL, SenseMode.DIRECTIONAL),
}
SCHEME_NAMES: List[str] = list(_SCHEME_MODES)


def normalized_thresholds(threshold_dbm: float = OMNI_THRESHOLD_DBM,
                          sense_gain_db: float = 10.0) -> Tuple[float, float]:
    """(omni, directional) ED thresholds for a threshold normalized by the sensing gain."""
    return threshold_dbm, threshold_dbm + sense_gain_db


def scheme_from_name(name: str, threshold_omni_dbm: float = OMNI_THRESHOLD_DBM,
                     threshold_dir_dbm: float = DIR_THRESHOLD_DBM) -> AccessScheme:
    if name not in _SCHEME_MODES:
        raise ValueError(f'unknown scheme {name!r}; expected one of {", ".join(SCHEME_NAMES)}')
    bs_sense, mt_sense = _SCHEME_MODES[name]
    return AccessScheme(name=name, bs_sense=bs_sense, mt_sense=mt_sense,
                        ed_threshold_omni_dbm=threshold_omni_dbm,
                        ed_threshold_dir_dbm=threshold_dir_dbm)


def sense_at_bs(scenario: Scenario, active_set: Iterable[int], j: int, mode: SenseMode,
                table: Optional[LinkTable] = None) -> LinkPower:
    """Energy BS_j detects from the active BSs, omnidirectionally or with its Tx beam."""
    table = table or LinkTable(scenario)
    return LinkPower(watts=table.sensed_at_bs(active_set, j, mode))


def sense_at_mt(scenario: Scenario, active_set: Iterable[int], k: int, mode: SenseMode,
                table: Optional[LinkTable] = None) -> LinkPower:
    """Energy MT_k detects from the active BSs while its own BS awaits RtoRx."""
    table = table or LinkTable(scenario)
    return LinkPower(watts=table.sensed_at_mt(active_set, k, mode))


def idle_decision(sensed: LinkPower, threshold_dbm: float,
                  mode: SenseMode = SenseMode.OMNI) -> ChannelState:
    """Energy detection: idle iff the sensed power does not exceed the threshold.

    A stage that does not sense (mode NONE) never holds the pair back.
    """
    if mode == SenseMode.NONE or sensed.watts <= dbm_to_watts(threshold_dbm):
        return ChannelState.IDLE
    return ChannelState.BUSY


def access_order(scenario: Scenario) -> List[int]:
    """Random start order of the pairs, drawn from the scenario's own seed."""
    seq = np.random.SeedSequence(scenario.seed, spawn_key=(ORDER_STREAM,))
    return np.random.default_rng(seq).permutation(scenario.num_pairs).tolist()


def run_snapshot(scenario: Scenario, scheme: AccessScheme, order: Optional[Sequence[int]] = None,
                 table: Optional[LinkTable] = None) -> SnapshotResult:
    """Admit pairs one by one in `order`; silenced pairs stay silent for the snapshot."""
    table = table or LinkTable(scenario)
    k_pairs = scenario.num_pairs
    order = access_order(scenario) if order is None else list(order)
    if sorted(order) != list(range(k_pairs)):
        raise ValueError(f'order must be a permutation of 0..{k_pairs - 1}')

    bs_threshold_dbm = scheme.threshold_dbm(scheme.bs_sense)
    mt_threshold_dbm = scheme.threshold_dbm(scheme.mt_sense)

    active: List[int] = []
    transmitting = [False] * k_pairs
    sensed_bs = [0.0] * k_pairs
    sensed_mt: List[Optional[float]] = [None] * k_pairs

    for k in order:
        sensed_bs[k] = table.sensed_at_bs(active, k, scheme.bs_sense)
        lbt = idle_decision(LinkPower(watts=sensed_bs[k]), bs_threshold_dbm, scheme.bs_sense)
        if lbt is ChannelState.BUSY:
            logger.debug('%s: pair %d silenced by LBT (%.3g W)', scheme.name, k, sensed_bs[k])
            continue
        if scheme.has_lbr:
            sensed_mt[k] = table.sensed_at_mt(active, k, scheme.mt_sense)
            lbr = idle_decision(LinkPower(watts=sensed_mt[k]), mt_threshold_dbm, scheme.mt_sense)
            if lbr is ChannelState.BUSY:
                logger.debug('%s: pair %d deferred by LBR (%.3g W)', scheme.name, k, sensed_mt[k])
                continue
        active.append(k)
        transmitting[k] = True

    return SnapshotResult(
        scheme=scheme.name,
        transmitting=transmitting,
        sensed_at_bs=sensed_bs,
        sensed_at_mt=sensed_mt if scheme.has_lbr else None,
        rates=table.snapshot_rates(active),
        access_order=order,
    )
