"""Pydantic models for the coexistence simulator and its API."""
import math
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SenseMode(str, Enum):
    NONE = 'none'
    OMNI = 'omni'
    DIRECTIONAL = 'directional'


class ChannelState(str, Enum):
    IDLE = 'idle'
    BUSY = 'busy'


class AntennaParams(BaseModel):
    """Cone-plus-circle beam parameters shared by every BS and every MT."""
    model_config = ConfigDict(frozen=True)

    theta_tx_deg: float = Field(60.0, gt=0, le=360)
    theta_rx_deg: float = Field(90.0, gt=0, le=360)
    tx_mainlobe_gain_db: float = 10.0
    rx_mainlobe_gain_db: float = 10.0
    tx_sidelobe_gain: float = Field(0.0, ge=0)  # linear
    rx_sidelobe_gain: float = Field(0.0, ge=0)  # linear
    # omni = r_omni (0 dB everywhere) for data reception
    mt_rx_mode: SenseMode = SenseMode.DIRECTIONAL

    @model_validator(mode='after')
    def _sidelobes_below_mainlobes(self):
        if self.tx_sidelobe_gain > 10 ** (self.tx_mainlobe_gain_db / 10):
            raise ValueError('tx_sidelobe_gain exceeds the tx mainlobe gain')
        if self.rx_sidelobe_gain > 10 ** (self.rx_mainlobe_gain_db / 10):
            raise ValueError('rx_sidelobe_gain exceeds the rx mainlobe gain')
        if self.mt_rx_mode == SenseMode.NONE:
            raise ValueError('mt_rx_mode must be directional or omni')
        return self


class ScenarioParams(BaseModel):
    """Global radio and deployment parameters of one scenario."""
    model_config = ConfigDict(frozen=True)

    area_width_m: float = Field(10.0, gt=0)
    area_height_m: float = Field(10.0, gt=0)
    pair_distance_m: float = Field(4.0, gt=0)
    carrier_freq_hz: float = Field(60e9, gt=0)
    bandwidth_hz: float = Field(1e9, gt=0)
    tx_power_dbm: float = 10.0
    noise_psd_dbm_hz: float = -174.0
    pathloss_exponent: float = Field(2.0, ge=1)
    num_pairs: int = Field(40, ge=1)
    antenna: AntennaParams = AntennaParams()


class NodePlacement(BaseModel):
    model_config = ConfigDict(frozen=True)

    position: Tuple[float, float]
    boresight: float = Field(ge=0, lt=2 * math.pi)  # radians


class Scenario(BaseModel):
    """K BS-MT pairs plus the parameters they were generated with."""
    model_config = ConfigDict(frozen=True)

    params: ScenarioParams
    bs: List[NodePlacement]
    mt: List[NodePlacement]
    seed: int = Field(0, ge=0)

    @model_validator(mode='after')
    def _pair_counts_match(self):
        if len(self.bs) != self.params.num_pairs or len(self.mt) != self.params.num_pairs:
            raise ValueError(
                f'expected {self.params.num_pairs} BS and MT placements, '
                f'got {len(self.bs)} BS and {len(self.mt)} MT')
        return self

    @property
    def num_pairs(self) -> int:
        return self.params.num_pairs


class BeamPattern(BaseModel):
    """Cone-plus-circle pattern of one node."""
    model_config = ConfigDict(frozen=True)

    mainlobe_beamwidth: float = Field(gt=0, le=2 * math.pi)  # radians
    mainlobe_gain: float = Field(ge=0)  # linear
    sidelobe_gain: float = Field(0.0, ge=0)  # linear
    boresight: float = 0.0  # radians

    @model_validator(mode='after')
    def _mainlobe_dominates(self):
        if self.sidelobe_gain > self.mainlobe_gain:
            raise ValueError('sidelobe_gain must not exceed mainlobe_gain')
        return self

    @property
    def is_omni(self) -> bool:
        return self.mainlobe_beamwidth >= 2 * math.pi


class LinkPower(BaseModel):
    model_config = ConfigDict(frozen=True)

    watts: float = Field(ge=0)

    @property
    def dbm(self) -> float:
        if self.watts <= 0:
            raise ValueError('dBm is undefined for zero power')
        return 10 * math.log10(self.watts) + 30


class RateResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    bits_per_second: float = Field(0.0, ge=0)
    sinr_linear: float = Field(0.0, ge=0)
    interference_watts: float = Field(0.0, ge=0)
    signal_watts: float = Field(0.0, ge=0)


class AccessScheme(BaseModel):
    """One channel-access procedure: an LBT stage and an optional LBR stage."""
    model_config = ConfigDict(frozen=True)

    name: str
    bs_sense: SenseMode
    mt_sense: SenseMode = SenseMode.NONE
    ed_threshold_omni_dbm: float = -74.0
    ed_threshold_dir_dbm: float = -64.0

    @field_validator('bs_sense')
    @classmethod
    def _lbt_is_mandatory(cls, value: SenseMode) -> SenseMode:
        if value == SenseMode.NONE:
            raise ValueError('LBT is mandatory: bs_sense must be omni or directional')
        return value

    @property
    def has_lbr(self) -> bool:
        return self.mt_sense != SenseMode.NONE

    def threshold_dbm(self, mode: SenseMode) -> float:
        return self.ed_threshold_omni_dbm if mode == SenseMode.OMNI else self.ed_threshold_dir_dbm


class SnapshotResult(BaseModel):
    scheme: str
    transmitting: List[bool]
    sensed_at_bs: List[float]
    # None for pure-LBT schemes; per-pair None when the pair never reached LBR
    sensed_at_mt: Optional[List[Optional[float]]] = None
    rates: List[RateResult]
    access_order: List[int]

    @property
    def active_count(self) -> int:
        return sum(self.transmitting)


class NumerologyConfig(BaseModel):
    """One column of the NR numerology table."""
    model_config = ConfigDict(frozen=True)

    mu: int = Field(ge=0, le=4)
    scs_khz: float
    symbol_length_us: float
    cp_length_us: float
    frame_length_ms: float = 10.0
    subframes_per_frame: int = 10
    slots_per_subframe: int
    slot_length_us: float
    symbols_per_slot: int = 14
    subcarriers_per_prb: int = 12
    prb_width_mhz: float


class SlotDirection(str, Enum):
    DL = 'DL'
    UL = 'UL'


class SlotRegion(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    symbols: int = Field(ge=0)
    preparation: bool = False  # headers precede the 14 slot symbols


class SlotLayout(BaseModel):
    model_config = ConfigDict(frozen=True)

    direction: SlotDirection
    has_headers: bool
    regions: List[SlotRegion]
    rtotx_region: str
    rtorx_region: str
    rtorx_offset_slots: int = Field(ge=0)
    data_offset_slots: int = Field(ge=0)
    baseline_latency_slots: int = Field(0, ge=0)

    @property
    def handshake_latency_slots(self) -> int:
        return self.rtorx_offset_slots + self.data_offset_slots

    @property
    def extra_latency_slots(self) -> int:
        return self.handshake_latency_slots - self.baseline_latency_slots

    @property
    def slot_symbols(self) -> int:
        return sum(r.symbols for r in self.regions if not r.preparation)


class CallFlowEventKind(str, Enum):
    DATA_ARRIVAL = 'data_arrival'
    LBT_IDLE = 'lbt_idle'
    LBT_BUSY = 'lbt_busy'
    RTOTX_SENT = 'rtotx_sent'
    LBR_IDLE = 'lbr_idle'
    LBR_BUSY = 'lbr_busy'
    DEFERRED = 'deferred'
    RTORX_SENT = 'rtorx_sent'
    DATA_TX_START = 'data_tx_start'


class CallFlowEvent(BaseModel):
    model_config = ConfigDict(frozen=True)

    slot: int
    event: CallFlowEventKind
    arrival: int = 0  # index of the data arrival this event belongs to


class CallFlowTrace(BaseModel):
    events: List[CallFlowEvent] = []
    truncated: bool = False


class SweepVariable(str, Enum):
    K = 'K'
    THETA_TX_DEG = 'theta_tx_deg'
    THETA_RX_DEG = 'theta_rx_deg'


class SweepConfig(BaseModel):
    base: ScenarioParams = ScenarioParams()
    schemes: List[str] = Field(default_factory=lambda: [
        'omni-lbt', 'dir-lbt', 'omni-lbt-omni-lbr',
        'omni-lbt-dir-lbr', 'dir-lbt-omni-lbr', 'dir-lbt-dir-lbr'])
    trials: int = Field(1000, ge=1)
    sweep_variable: SweepVariable = SweepVariable.K
    sweep_values: List[float] = Field(min_length=1)
    threshold_omni_dbm: float = -74.0
    threshold_dir_dbm: float = -64.0
    master_seed: int = Field(1, ge=0)

    @model_validator(mode='after')
    def _check_sweep_values(self):
        if not self.schemes:
            raise ValueError('schemes must not be empty')
        for value in self.sweep_values:
            if self.sweep_variable == SweepVariable.K:
                if value < 1 or value != int(value):
                    raise ValueError(f'sweep_values: K must be a positive integer, got {value}')
            elif not 0 < value <= 360:
                raise ValueError(f'sweep_values: beamwidth must be in (0, 360] degrees, got {value}')
        return self


class MetricsRecord(BaseModel):
    scheme: str
    sweep_value: float
    mean_sum_rate_bps: float = Field(ge=0)
    mean_rate_active_bps: float = Field(ge=0)
    mean_active_count: float = Field(ge=0)
    trials: int
    std_err_sum_rate: float = Field(ge=0)
    std_err_mean_rate: float = Field(0.0, ge=0)


class SnapshotRequest(BaseModel):
    params: ScenarioParams = ScenarioParams()
    scheme: str = 'dir-lbt-dir-lbr'
    seed: int = Field(1, ge=0)
    threshold_omni_dbm: float = -74.0
    threshold_dir_dbm: float = -64.0


class SnapshotResponse(BaseModel):
    scenario_text: str
    result: SnapshotResult
    sum_rate_bps: float
    mean_rate_active_bps: float


class CallFlowRequest(BaseModel):
    arrivals: List[int] = []
    busy_at_mt: List[int] = []  # slot indices where the MT senses a busy channel
    busy_at_bs: List[int] = []
    direction: SlotDirection = SlotDirection.DL
    has_headers: bool = False


class SweepResponse(BaseModel):
    run_id: str
    sweep_variable: SweepVariable
    records: List[MetricsRecord]
