"""Random indoor deployments of K BS-MT pairs."""
import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from antenna import TWO_PI
from models import BeamPattern, NodePlacement, Scenario, ScenarioParams, SenseMode

logger = logging.getLogger(__name__)

PAIR_DISTANCE_TOL = 1e-9


def _boresight(dx: float, dy: float) -> float:
    """Direction of (dx, dy) in [0, 2*pi)."""
    angle = math.atan2(dy, dx) % TWO_PI
    # -0.0 and tiny negatives can round up to exactly 2*pi
    return 0.0 if angle >= TWO_PI else angle


def _place_pairs(bs_xy: np.ndarray, mt_xy: np.ndarray) -> Tuple[List[NodePlacement], List[NodePlacement]]:
    bs, mt = [], []
    for (bx, by), (mx, my) in zip(bs_xy.tolist(), mt_xy.tolist()):
        bs.append(NodePlacement(position=(bx, by), boresight=_boresight(mx - bx, my - by)))
        mt.append(NodePlacement(position=(mx, my), boresight=_boresight(bx - mx, by - my)))
    return bs, mt


def generate_deployment(params: ScenarioParams, seed: int) -> Scenario:
    """Drop K BSs uniformly over the area and each MT at pair_distance_m from its BS.

    MTs are not constrained to the area rectangle.
    """
    rng = np.random.default_rng(seed)
    k = params.num_pairs
    bs_xy = rng.uniform((0.0, 0.0), (params.area_width_m, params.area_height_m), size=(k, 2))
    angles = rng.uniform(0.0, TWO_PI, size=k)
    offsets = params.pair_distance_m * np.column_stack((np.cos(angles), np.sin(angles)))
    mt_xy = bs_xy + offsets
    bs, mt = _place_pairs(bs_xy, mt_xy)
    logger.debug('generated %d pairs with seed %d', k, seed)
    return Scenario(params=params, bs=bs, mt=mt, seed=seed)


def build_scenario(params: ScenarioParams, bs_positions: Sequence[Tuple[float, float]],
                   mt_positions: Sequence[Tuple[float, float]], seed: int = 0) -> Scenario:
    """Scenario from explicit coordinates; boresights point along each pair's link."""
    bs_xy = np.asarray(bs_positions, dtype=float).reshape(-1, 2)
    mt_xy = np.asarray(mt_positions, dtype=float).reshape(-1, 2)
    if len(bs_xy) != len(mt_xy):
        raise ValueError('bs_positions and mt_positions must have the same length')
    for k, (b, m) in enumerate(zip(bs_xy, mt_xy)):
        d = float(np.hypot(*(m - b)))
        if abs(d - params.pair_distance_m) > PAIR_DISTANCE_TOL:
            raise ValueError(
                f'pair {k}: BS-MT distance {d} m differs from pair_distance_m={params.pair_distance_m}')
    if len(bs_xy) != params.num_pairs:
        params = ScenarioParams.model_validate({**params.model_dump(), 'num_pairs': len(bs_xy)})
    bs, mt = _place_pairs(bs_xy, mt_xy)
    return Scenario(params=params, bs=bs, mt=mt, seed=seed)


def _check_index(scenario: Scenario, index: int, name: str):
    if not 0 <= index < scenario.num_pairs:
        raise IndexError(f'{name}={index} out of range for {scenario.num_pairs} pairs')


def pair_distance(scenario: Scenario, k: int, j: int) -> float:
    """Distance in meters between MT_k and BS_j."""
    _check_index(scenario, k, 'k')
    _check_index(scenario, j, 'j')
    mx, my = scenario.mt[k].position
    bx, by = scenario.bs[j].position
    return math.hypot(mx - bx, my - by)


def node_arrays(scenario: Scenario) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(bs_xy, mt_xy, bs_boresight, mt_boresight) as numpy arrays."""
    bs_xy = np.array([n.position for n in scenario.bs], dtype=float)
    mt_xy = np.array([n.position for n in scenario.mt], dtype=float)
    bs_bore = np.array([n.boresight for n in scenario.bs], dtype=float)
    mt_bore = np.array([n.boresight for n in scenario.mt], dtype=float)
    return bs_xy, mt_xy, bs_bore, mt_bore


def bs_pattern(scenario: Scenario, j: int) -> BeamPattern:
    """Tx pattern of BS_j, mainlobe on its own MT."""
    _check_index(scenario, j, 'j')
    ant = scenario.params.antenna
    return BeamPattern(mainlobe_beamwidth=math.radians(ant.theta_tx_deg),
                       mainlobe_gain=10 ** (ant.tx_mainlobe_gain_db / 10),
                       sidelobe_gain=ant.tx_sidelobe_gain,
                       boresight=scenario.bs[j].boresight)


def mt_pattern(scenario: Scenario, k: int) -> BeamPattern:
    """Rx data pattern of MT_k, mainlobe on its own BS (0 dB omni for r_omni MTs)."""
    _check_index(scenario, k, 'k')
    ant = scenario.params.antenna
    if ant.mt_rx_mode == SenseMode.OMNI:
        return BeamPattern(mainlobe_beamwidth=TWO_PI, mainlobe_gain=1.0, sidelobe_gain=1.0,
                           boresight=scenario.mt[k].boresight)
    return BeamPattern(mainlobe_beamwidth=math.radians(ant.theta_rx_deg),
                       mainlobe_gain=10 ** (ant.rx_mainlobe_gain_db / 10),
                       sidelobe_gain=ant.rx_sidelobe_gain,
                       boresight=scenario.mt[k].boresight)


def scenario_to_text(scenario: Scenario) -> str:
    """One node per line: role, pair index, x, y, boresight."""
    lines = [f'seed={scenario.seed}']
    for k in range(scenario.num_pairs):
        for role, node in (('BS', scenario.bs[k]), ('MT', scenario.mt[k])):
            x, y = node.position
            lines.append(f'{role} {k} {x!r} {y!r} {node.boresight!r}')
    return '\n'.join(lines) + '\n'


def scenario_from_text(text: str, params: ScenarioParams) -> Scenario:
    """Inverse of scenario_to_text for the given parameters."""
    seed = 0
    nodes = {'BS': {}, 'MT': {}}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        if line.startswith('seed='):
            seed = int(line.split('=', 1)[1])
            continue
        fields = line.split()
        if len(fields) != 5 or fields[0] not in nodes:
            raise ValueError(f'line {lineno}: expected "<BS|MT> <pair> <x> <y> <boresight>", got {line!r}')
        role, pair, x, y, bore = fields
        nodes[role][int(pair)] = NodePlacement(position=(float(x), float(y)), boresight=float(bore))
    count = len(nodes['BS'])
    if sorted(nodes['BS']) != list(range(count)) or sorted(nodes['MT']) != list(range(count)):
        raise ValueError('scenario text must list BS and MT for pairs 0..K-1')
    if count != params.num_pairs:
        params = ScenarioParams.model_validate({**params.model_dump(), 'num_pairs': count})
    return Scenario(params=params, bs=[nodes['BS'][k] for k in range(count)],
                    mt=[nodes['MT'][k] for k in range(count)], seed=seed)
