"""Command-line front end: sum-rate sweeps, slot timing and the call-flow demo.

    python cli.py --experiment fig4_sumrate_vs_k --trials 200 --out fig4.csv
    python cli.py --config run.conf --k 60
"""
import argparse
import csv
import difflib
import io
import logging
import sys
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from access import SCHEME_NAMES, normalized_thresholds
from models import (
    AntennaParams, MetricsRecord, ScenarioParams, SenseMode, SlotDirection,
    SweepConfig, SweepVariable,
)
from montecarlo import records_to_csv, run_sweep
from slots import (
    MCOT_60GHZ_MS, build_slot_layout, busy_slots, numerology, simulate_call_flow,
    trace_to_text, unoccupied_fraction,
)

logger = logging.getLogger(__name__)

DEFAULT_GRIDS: Dict[SweepVariable, List[float]] = {
    SweepVariable.K: [5, 10, 20, 30, 40, 60, 80, 100],
    SweepVariable.THETA_TX_DEG: [15, 30, 45, 60, 90, 120, 180, 360],
    SweepVariable.THETA_RX_DEG: [30, 60, 90, 120, 180, 270, 360],
}
OVERHEAD_MUS = [3, 4]
OVERHEAD_HEADER = ['mu', 'scs_khz', 'slot_length_us', 'mcot_ms', 'unoccupied_percent']

# Demo: two DL arrivals, the second one blocked at the MT for three slots
DEMO_ARRIVALS = [0, 3]
DEMO_BUSY_AT_MT = [3, 4, 5]
LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR']


class ConfigError(ValueError):
    pass


class Experiment(str, Enum):
    FIG4_SUMRATE_VS_K = 'fig4_sumrate_vs_k'
    FIG5_MEANRATE_VS_K = 'fig5_meanrate_vs_k'
    FIG6_SUMRATE_VS_TXBW = 'fig6_sumrate_vs_txbw'
    FIG7_SUMRATE_VS_RXBW = 'fig7_sumrate_vs_rxbw'
    SLOTS_OVERHEAD = 'slots_overhead'
    CALLFLOW_DEMO = 'callflow_demo'
    CUSTOM = 'custom'


SWEEP_EXPERIMENTS = {
    Experiment.FIG4_SUMRATE_VS_K: SweepVariable.K,
    Experiment.FIG5_MEANRATE_VS_K: SweepVariable.K,
    Experiment.FIG6_SUMRATE_VS_TXBW: SweepVariable.THETA_TX_DEG,
    Experiment.FIG7_SUMRATE_VS_RXBW: SweepVariable.THETA_RX_DEG,
}


class RunConfig(BaseModel):
    """Fully resolved run settings; field names double as config file keys."""
    model_config = ConfigDict(extra='forbid')

    experiment: Experiment = Experiment.FIG4_SUMRATE_VS_K
    out: Optional[str] = None
    seed: int = Field(1, ge=0)
    trials: int = Field(1000, ge=1)
    workers: Optional[int] = Field(None, ge=1)
    log_level: str = 'WARNING'

    schemes: List[str] = Field(default_factory=lambda: list(SCHEME_NAMES))
    sweep_var: Optional[SweepVariable] = None
    sweep_values: Optional[List[float]] = None

    # normalized ED threshold; explicit omni/dir values take precedence
    threshold: float = -74.0
    threshold_omni_dbm: Optional[float] = None
    threshold_dir_dbm: Optional[float] = None

    k: int = Field(40, ge=1)
    area_width_m: float = Field(10.0, gt=0)
    area_height_m: float = Field(10.0, gt=0)
    pair_distance_m: float = Field(4.0, gt=0)
    carrier_freq_hz: float = Field(60e9, gt=0)
    bandwidth_hz: float = Field(1e9, gt=0)
    tx_power_dbm: float = 10.0
    noise_psd_dbm_hz: float = -174.0
    pathloss_exponent: float = Field(2.0, ge=1)
    theta_tx_deg: float = Field(60.0, gt=0, le=360)
    theta_rx_deg: float = Field(90.0, gt=0, le=360)
    tx_mainlobe_gain_db: float = 10.0
    rx_mainlobe_gain_db: float = 10.0
    tx_sidelobe_gain: float = Field(0.0, ge=0)
    rx_sidelobe_gain: float = Field(0.0, ge=0)
    mt_rx_mode: SenseMode = SenseMode.DIRECTIONAL

    mu: Optional[int] = Field(None, ge=0, le=4)
    mcot_ms: float = Field(MCOT_60GHZ_MS, gt=0)

    @field_validator('log_level')
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f'expected one of {", ".join(LOG_LEVELS)}')
        return level

    def thresholds(self) -> Tuple[float, float]:
        omni, directional = normalized_thresholds(self.threshold, self.tx_mainlobe_gain_db)
        if self.threshold_omni_dbm is not None:
            omni = self.threshold_omni_dbm
        if self.threshold_dir_dbm is not None:
            directional = self.threshold_dir_dbm
        return omni, directional

    def scenario_params(self) -> ScenarioParams:
        antenna = AntennaParams(
            theta_tx_deg=self.theta_tx_deg, theta_rx_deg=self.theta_rx_deg,
            tx_mainlobe_gain_db=self.tx_mainlobe_gain_db, rx_mainlobe_gain_db=self.rx_mainlobe_gain_db,
            tx_sidelobe_gain=self.tx_sidelobe_gain, rx_sidelobe_gain=self.rx_sidelobe_gain,
            mt_rx_mode=self.mt_rx_mode,
        )
        return ScenarioParams(
            area_width_m=self.area_width_m, area_height_m=self.area_height_m,
            pair_distance_m=self.pair_distance_m, carrier_freq_hz=self.carrier_freq_hz,
            bandwidth_hz=self.bandwidth_hz, tx_power_dbm=self.tx_power_dbm,
            noise_psd_dbm_hz=self.noise_psd_dbm_hz, pathloss_exponent=self.pathloss_exponent,
            num_pairs=self.k, antenna=antenna,
        )


KNOWN_KEYS = list(RunConfig.model_fields)
LIST_KEYS = {'schemes', 'sweep_values'}

# flag dest -> config key
FLAG_KEYS = {
    'experiment': 'experiment', 'out': 'out', 'seed': 'seed', 'trials': 'trials',
    'k': 'k', 'theta_tx_deg': 'theta_tx_deg', 'theta_rx_deg': 'theta_rx_deg',
    'scheme': 'schemes', 'threshold': 'threshold',
    'threshold_omni_dbm': 'threshold_omni_dbm', 'threshold_dir_dbm': 'threshold_dir_dbm',
    'mu': 'mu', 'mcot_ms': 'mcot_ms', 'workers': 'workers', 'log_level': 'log_level',
    'sweep_var': 'sweep_var', 'sweep_values': 'sweep_values',
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='cli.py', description='mmWave directional LBT/LBR coexistence simulator')
    parser.add_argument('--experiment', choices=[e.value for e in Experiment])
    parser.add_argument('--config', help='flat key=value config file; flags override it')
    parser.add_argument('--out', help='output file (stdout when omitted)')
    parser.add_argument('--seed', type=int)
    parser.add_argument('--trials', type=int)
    parser.add_argument('--k', type=int, help='number of BS-MT pairs')
    parser.add_argument('--theta-tx-deg', type=float)
    parser.add_argument('--theta-rx-deg', type=float)
    parser.add_argument('--scheme', action='append', choices=SCHEME_NAMES)
    parser.add_argument('--threshold', type=float, help='normalized ED threshold in dBm')
    parser.add_argument('--threshold-omni-dbm', type=float)
    parser.add_argument('--threshold-dir-dbm', type=float)
    parser.add_argument('--sweep-var', choices=[v.value for v in SweepVariable])
    parser.add_argument('--sweep-values', help='comma-separated sweep points')
    parser.add_argument('--mu', type=int)
    parser.add_argument('--mcot-ms', type=float)
    parser.add_argument('--workers', type=int, help='Monte Carlo threads (default: MMCOEXIST_THREADS or CPU count)')
    parser.add_argument('--log-level', choices=LOG_LEVELS)
    return parser


def _suggest(key: str) -> str:
    match = difflib.get_close_matches(key, KNOWN_KEYS, n=1)
    return f" (did you mean '{match[0]}'?)" if match else ''


def read_config_file(path: str) -> Dict[str, str]:
    """Parse `key = value` lines; blank lines and `#` comments are skipped."""
    try:
        with open(path, encoding='utf-8') as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ConfigError(f'cannot read config file {path}: {e.strerror or e}') from e

    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f'{path}:{lineno}: expected key=value, got {raw.strip()!r}')
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f'{path}:{lineno}: unknown key {key!r}{_suggest(key)}')
        values[key] = value
    return values


def _split_list(value) -> List[str]:
    if isinstance(value, str):
        return [item.strip() for item in value.split(',') if item.strip()]
    return list(value)


def resolve_config(values: Dict[str, object]) -> RunConfig:
    """Validate raw key/values into a RunConfig, naming the offending key on failure."""
    for key in values:
        if key not in KNOWN_KEYS:
            raise ConfigError(f'unknown key {key!r}{_suggest(key)}')
    data = {key: _split_list(v) if key in LIST_KEYS else v for key, v in values.items()}
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        details = '; '.join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
        raise ConfigError(f'invalid configuration: {details}') from e
    for name in config.schemes:
        if name not in SCHEME_NAMES:
            raise ConfigError(f'schemes: unknown scheme {name!r}; expected one of {", ".join(SCHEME_NAMES)}')
    return config


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    args = build_parser().parse_args(argv)
    values: Dict[str, object] = read_config_file(args.config) if args.config else {}
    for dest, key in FLAG_KEYS.items():
        flag_value = getattr(args, dest)
        if flag_value is not None:
            values[key] = flag_value
    return resolve_config(values)


def sweep_config(config: RunConfig) -> SweepConfig:
    variable = SWEEP_EXPERIMENTS.get(config.experiment) or config.sweep_var or SweepVariable.K
    if config.sweep_var is not None and config.sweep_var != variable:
        raise ConfigError(f'sweep_var: {config.experiment.value} sweeps {variable.value}, '
                          f'not {config.sweep_var.value}')
    omni, directional = config.thresholds()
    try:
        return SweepConfig(
            base=config.scenario_params(),
            schemes=config.schemes,
            trials=config.trials,
            sweep_variable=variable,
            sweep_values=config.sweep_values or DEFAULT_GRIDS[variable],
            threshold_omni_dbm=omni,
            threshold_dir_dbm=directional,
            master_seed=config.seed,
        )
    except ValidationError as e:
        raise ConfigError(f'invalid configuration: {e.errors()[0]["msg"]}') from e


def summarize(records: List[MetricsRecord], sweep_var: SweepVariable, use_mean_rate: bool) -> str:
    """Best and worst sweep point per scheme."""
    metric = 'mean rate of active pairs' if use_mean_rate else 'sum rate'

    def value(r: MetricsRecord) -> float:
        return r.mean_rate_active_bps if use_mean_rate else r.mean_sum_rate_bps

    by_scheme: Dict[str, List[MetricsRecord]] = {}
    for record in records:
        by_scheme.setdefault(record.scheme, []).append(record)
    lines = [f'{metric} (Gbit/s) over {sweep_var.value}:']
    for scheme, rows in by_scheme.items():
        best, worst = max(rows, key=value), min(rows, key=value)
        lines.append(f'  {scheme:18s} best {sweep_var.value}={best.sweep_value:g} ({value(best) / 1e9:.3f})'
                     f'  worst {sweep_var.value}={worst.sweep_value:g} ({value(worst) / 1e9:.3f})')
    return '\n'.join(lines)


def overhead_table(config: RunConfig) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(OVERHEAD_HEADER)
    for mu in ([config.mu] if config.mu is not None else OVERHEAD_MUS):
        row = numerology(mu)
        writer.writerow([mu, f'{row.scs_khz:g}', f'{row.slot_length_us:g}', f'{config.mcot_ms:g}',
                         f'{unoccupied_fraction(mu, config.mcot_ms):.3f}'])
    return buf.getvalue()


def callflow_demo() -> str:
    layout = build_slot_layout(SlotDirection.DL, has_headers=False)
    trace = simulate_call_flow(DEMO_ARRIVALS, busy_slots(DEMO_BUSY_AT_MT), busy_slots([]), layout)
    return trace_to_text(trace)


def write_output(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    logger.info('wrote %s', path)


def run(config: RunConfig) -> int:
    if config.experiment == Experiment.SLOTS_OVERHEAD:
        write_output(overhead_table(config), config.out)
        return 0
    if config.experiment == Experiment.CALLFLOW_DEMO:
        write_output(callflow_demo(), config.out)
        return 0

    sweep = sweep_config(config)
    records = run_sweep(sweep, config.workers)
    write_output(records_to_csv(records, sweep.sweep_variable), config.out)
    # stdout carries the CSV when no output file is given
    print(summarize(records, sweep.sweep_variable,
                    use_mean_rate=config.experiment == Experiment.FIG5_MEANRATE_VS_K),
          file=sys.stderr if config.out is None else sys.stdout)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as e:
        print(f'error: {e}', file=sys.stderr)
        return 2
    logging.basicConfig(level=config.log_level,
                        format='%(asctime)s %(name)s %(levelname)s %(message)s')
    try:
        return run(config)
    except ConfigError as e:
        print(f'error: {e}', file=sys.stderr)
        return 2
    except OSError as e:
        print(f'error: cannot write output: {e}', file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
