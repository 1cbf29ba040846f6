"""Coalition-game resource allocation for D2D pairs in a cellular + mmWave cell."""

from .baselines import (
    ccg_partition,
    exhaustive_optimal,
    fcc_partition,
    fmc_partition,
    rc_partition,
)
from .channel import (
    AntennaPattern,
    LinkBudget,
    antenna_gain_db,
    blockage_probability,
    cellular_rx_power,
    mmwave_rx_power,
    noise_power,
)
from .errors import BudgetExceededError, ConfigError, InvalidScenarioError
from .game import (
    FormationConfig,
    OrderPolicy,
    SwitchTrace,
    apply_switch,
    form_coalitions,
    is_nash_stable,
    random_partition,
    switch_gain,
)
from .harness import (
    SweepResult,
    SweepSpec,
    average_deviation,
    convergence_stats,
    run_sweep,
)
from .params import FadingMode, SystemParams
from .rate import (
    Partition,
    RateReport,
    batch_sum_rate,
    cellular_coalition_value,
    link_tables,
    mmwave_coalition_value,
    system_sum_rate,
)
from .scenario import Scenario, distance, generate_scenario, off_boresight_angles

__version__ = "0.1.0"
