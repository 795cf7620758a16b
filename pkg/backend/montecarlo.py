"""Monte Carlo driver: repeated snapshots, sum-rate / mean-rate metrics, sweeps."""
import csv
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from access import run_snapshot, scheme_from_name
from deployment import generate_deployment
from linkbudget import LinkTable
from models import MetricsRecord, RateResult, ScenarioParams, SweepConfig, SweepVariable

logger = logging.getLogger(__name__)

THREADS_ENV = 'MMCOEXIST_THREADS'
CSV_HEADER = ['scheme', 'sweep_var', 'sweep_value', 'trials', 'mean_sum_rate_gbps',
              'mean_rate_active_gbps', 'mean_active_count', 'stderr_sum_rate_gbps']

# (sum rate, mean rate over active pairs, active count) of one snapshot
TrialMetrics = Tuple[float, float, int]


def sum_rate(rates: Sequence) -> float:
    """Sum of R_k; accepts RateResult objects or plain bit rates."""
    return float(sum(_bps(r) for r in rates))


def mean_rate_active(rates: Sequence) -> float:
    """Mean of the strictly positive R_k, 0 when no pair transmits."""
    positive = [_bps(r) for r in rates if _bps(r) > 0]
    return float(sum(positive) / len(positive)) if positive else 0.0


def _bps(rate) -> float:
    return rate.bits_per_second if isinstance(rate, RateResult) else float(rate)


def trial_seed(master_seed: int, trial: int) -> int:
    """Independent per-trial seed split from the master seed."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(trial,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def sweep_params(base: ScenarioParams, variable: SweepVariable, value: float) -> ScenarioParams:
    """Base parameters with one swept field replaced (re-validated)."""
    data = base.model_dump()
    if variable == SweepVariable.K:
        data['num_pairs'] = int(value)
    elif variable == SweepVariable.THETA_TX_DEG:
        data['antenna']['theta_tx_deg'] = value
    else:
        data['antenna']['theta_rx_deg'] = value
    return ScenarioParams.model_validate(data)


def resolve_workers(max_workers: Optional[int] = None) -> int:
    """Explicit setting or the CPU count, capped by MMCOEXIST_THREADS when set."""
    workers = max(1, int(max_workers)) if max_workers is not None else (os.cpu_count() or 1)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            workers = min(workers, max(1, int(env)))
        except ValueError:
            logger.warning('ignoring non-integer %s=%r', THREADS_ENV, env)
    return workers


class MonteCarloEngine:
    """Runs sweeps; trials are independent and reduced in trial-index order."""

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = resolve_workers(max_workers)

    def run_trial(self, params: ScenarioParams, schemes: Sequence, seed: int) -> List[TrialMetrics]:
        """Metrics of every scheme on one random deployment."""
        scenario = generate_deployment(params, seed)
        table = LinkTable(scenario)
        metrics = []
        for scheme in schemes:
            result = run_snapshot(scenario, scheme, table=table)
            metrics.append((sum_rate(result.rates), mean_rate_active(result.rates), result.active_count))
        return metrics

    def run_point(self, config: SweepConfig, value: float) -> List[MetricsRecord]:
        params = sweep_params(config.base, config.sweep_variable, value)
        schemes = [scheme_from_name(name, config.threshold_omni_dbm, config.threshold_dir_dbm)
                   for name in config.schemes]
        seeds = [trial_seed(config.master_seed, t) for t in range(config.trials)]

        if self.max_workers > 1 and config.trials > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                per_trial = list(pool.map(lambda s: self.run_trial(params, schemes, s), seeds))
        else:
            per_trial = [self.run_trial(params, schemes, s) for s in seeds]

        # [trial, scheme, metric]
        values = np.array(per_trial, dtype=float)
        records = []
        for i, scheme in enumerate(schemes):
            sums, means, counts = values[:, i, 0], values[:, i, 1], values[:, i, 2]
            records.append(MetricsRecord(
                scheme=scheme.name,
                sweep_value=value,
                mean_sum_rate_bps=float(np.mean(sums)),
                mean_rate_active_bps=float(np.mean(means)),
                mean_active_count=float(np.mean(counts)),
                trials=config.trials,
                std_err_sum_rate=_std_err(sums),
                std_err_mean_rate=_std_err(means),
            ))
        return records

    def run_sweep(self, config: SweepConfig) -> List[MetricsRecord]:
        """Records ordered by scheme, then by sweep value."""
        by_value: Dict[float, List[MetricsRecord]] = {}
        for value in config.sweep_values:
            logger.info('sweep %s=%g: %d trials x %d schemes',
                        config.sweep_variable.value, value, config.trials, len(config.schemes))
            by_value[value] = self.run_point(config, value)
        return [by_value[value][i] for i in range(len(config.schemes)) for value in config.sweep_values]


def _std_err(samples: np.ndarray) -> float:
    if len(samples) < 2:
        return 0.0
    return float(np.std(samples, ddof=1) / np.sqrt(len(samples)))


def run_sweep(config: SweepConfig, max_workers: Optional[int] = None) -> List[MetricsRecord]:
    return MonteCarloEngine(max_workers).run_sweep(config)


def _g4(value: float) -> str:
    return f'{value:.4g}'


def write_csv(records: Sequence[MetricsRecord], sweep_var: SweepVariable, stream: TextIO):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([r.scheme, sweep_var.value, f'{r.sweep_value:g}', r.trials,
                         _g4(r.mean_sum_rate_bps / 1e9), _g4(r.mean_rate_active_bps / 1e9),
                         _g4(r.mean_active_count), _g4(r.std_err_sum_rate / 1e9)])


def records_to_csv(records: Sequence[MetricsRecord], sweep_var: SweepVariable) -> str:
    buf = io.StringIO()
    write_csv(records, sweep_var, buf)
    return buf.getvalue()
