"""NR numerologies, self-contained slot layouts and the LBR call flow."""
import logging
from typing import Callable, Iterable, List, Optional, Tuple

from models import (
    CallFlowEvent, CallFlowEventKind, CallFlowTrace, NumerologyConfig,
    SlotDirection, SlotLayout, SlotRegion,
)

logger = logging.getLogger(__name__)

MCOT_60GHZ_MS = 9.0
DEFAULT_HORIZON_SLOTS = 10_000

# Table values, not the exact 3GPP cyclic prefix durations
CP_LENGTH_US = {0: 4.8, 1: 2.4, 2: 1.2, 3: 0.6, 4: 0.3}

SlotPredicate = Callable[[int], bool]


def numerology(mu: int) -> NumerologyConfig:
    """Row of the NR numerology table for mu in 0..4."""
    if mu not in CP_LENGTH_US:
        raise ValueError(f'mu must be in 0..4, got {mu}')
    scs_khz = 15 * 2 ** mu
    return NumerologyConfig(
        mu=mu,
        scs_khz=scs_khz,
        symbol_length_us=1000 / scs_khz,
        cp_length_us=CP_LENGTH_US[mu],
        slots_per_subframe=2 ** mu,
        slot_length_us=1000 / 2 ** mu,
        prb_width_mhz=12 * scs_khz / 1000,
    )


def unoccupied_fraction(mu: int, mcot_ms: float = MCOT_60GHZ_MS, has_headers: bool = False) -> float:
    """Percentage of an MCOT left empty while the gNB waits for RtoRx in DL.

    Without headers one slot per MCOT is lost; with headers the handshake fits in
    the preparation stage of the data slot.
    """
    if mcot_ms <= 0:
        raise ValueError(f'mcot_ms must be positive, got {mcot_ms}')
    if has_headers:
        return 0.0
    return 100 * numerology(mu).slot_length_us / (mcot_ms * 1000)


def build_slot_layout(direction: SlotDirection, has_headers: bool, dl_control_symbols: int = 2,
                      guard_symbols: int = 1, ul_control_symbols: int = 1,
                      header_symbols: int = 1) -> SlotLayout:
    direction = SlotDirection(direction)
    data_symbols = 14 - dl_control_symbols - guard_symbols - ul_control_symbols
    if data_symbols < 1:
        raise ValueError('control and guard symbols leave no room for data')

    regions: List[SlotRegion] = []
    if has_headers:
        regions += [SlotRegion(name='dl_header', symbols=header_symbols, preparation=True),
                    SlotRegion(name='ul_header', symbols=header_symbols, preparation=True)]
    if direction == SlotDirection.DL:
        regions += [SlotRegion(name='dl_control', symbols=dl_control_symbols),
                    SlotRegion(name='dl_data', symbols=data_symbols),
                    SlotRegion(name='guard', symbols=guard_symbols),
                    SlotRegion(name='ul_control', symbols=ul_control_symbols)]
    else:
        regions += [SlotRegion(name='dl_control', symbols=dl_control_symbols),
                    SlotRegion(name='guard', symbols=guard_symbols),
                    SlotRegion(name='ul_data', symbols=data_symbols),
                    SlotRegion(name='ul_control', symbols=ul_control_symbols)]

    if direction == SlotDirection.UL:
        # RtoTx rides on the SR, RtoRx on the UL grant of the next slot
        return SlotLayout(direction=direction, has_headers=has_headers, regions=regions,
                          rtotx_region='ul_control', rtorx_region='dl_control',
                          rtorx_offset_slots=1, data_offset_slots=0, baseline_latency_slots=1)
    if has_headers:
        return SlotLayout(direction=direction, has_headers=True, regions=regions,
                          rtotx_region='dl_header', rtorx_region='ul_header',
                          rtorx_offset_slots=0, data_offset_slots=0)
    return SlotLayout(direction=direction, has_headers=False, regions=regions,
                      rtotx_region='dl_control', rtorx_region='ul_control',
                      rtorx_offset_slots=0, data_offset_slots=1)


def busy_slots(slots: Iterable[int]) -> SlotPredicate:
    busy = frozenset(slots)
    return lambda slot: slot in busy


def simulate_call_flow(arrivals: List[int], channel_busy_at_mt: SlotPredicate,
                       channel_busy_at_bs: SlotPredicate, layout: SlotLayout,
                       horizon_slots: int = DEFAULT_HORIZON_SLOTS) -> CallFlowTrace:
    """Slot-quantized RtoTx/RtoRx handshake for each data arrival.

    In DL the BS runs LBT and the MT runs LBR; UL swaps the roles. A busy LBR
    postpones RtoRx slot by slot; data needs a second successful LBT. Arrivals
    queue behind the previous data start.
    """
    if list(arrivals) != sorted(arrivals):
        raise ValueError('arrivals must be sorted')
    if layout.direction == SlotDirection.DL:
        busy_at_tx, busy_at_rx = channel_busy_at_bs, channel_busy_at_mt
    else:
        busy_at_tx, busy_at_rx = channel_busy_at_mt, channel_busy_at_bs

    events: List[CallFlowEvent] = []

    def emit(slot: int, kind: CallFlowEventKind, index: int):
        events.append(CallFlowEvent(slot=slot, event=kind, arrival=index))

    def wait_idle(slot: int, busy: SlotPredicate, index: int, limit: int,
                  busy_kinds: Tuple[CallFlowEventKind, ...]) -> Optional[int]:
        while busy(slot):
            for kind in busy_kinds:
                emit(slot, kind, index)
            slot += 1
            if slot > limit:
                return None
        return slot

    lbt_busy = (CallFlowEventKind.LBT_BUSY,)
    lbr_busy = (CallFlowEventKind.LBR_BUSY, CallFlowEventKind.DEFERRED)
    free_from = None
    for index, arrival in enumerate(arrivals):
        emit(arrival, CallFlowEventKind.DATA_ARRIVAL, index)
        limit = arrival + horizon_slots
        slot = arrival if free_from is None else max(arrival, free_from)

        slot = wait_idle(slot, busy_at_tx, index, limit, lbt_busy)
        if slot is None:
            break
        emit(slot, CallFlowEventKind.LBT_IDLE, index)
        emit(slot, CallFlowEventKind.RTOTX_SENT, index)

        slot = wait_idle(slot, busy_at_rx, index, limit, lbr_busy)
        if slot is None:
            break
        emit(slot, CallFlowEventKind.LBR_IDLE, index)
        slot += layout.rtorx_offset_slots
        emit(slot, CallFlowEventKind.RTORX_SENT, index)

        slot = wait_idle(slot + layout.data_offset_slots, busy_at_tx, index, limit, lbt_busy)
        if slot is None:
            break
        emit(slot, CallFlowEventKind.LBT_IDLE, index)
        emit(slot, CallFlowEventKind.DATA_TX_START, index)
        free_from = slot + 1
    else:
        return CallFlowTrace(events=events)

    logger.warning('call flow truncated: channel not idle within %d slots of arrival %d',
                   horizon_slots, index)
    return CallFlowTrace(events=events, truncated=True)


def trace_to_text(trace: CallFlowTrace) -> str:
    return ''.join(f'slot={e.slot} event={e.event.value}\n' for e in trace.events)
