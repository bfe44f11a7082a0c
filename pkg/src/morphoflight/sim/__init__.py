from .contact import (
    AIRBORNE,
    TIPOVER,
    TOUCHDOWN,
    ContactResult,
    Surface,
    TouchdownMetrics,
    clearances,
    contact_resolve,
    min_wheel_first_tilt,
    resting_pose,
)
from .engine import CSV_COLUMNS, NMPC, PID, Event, SimLog, run
from .metrics import landing_phase, metrics, read_log, summary, write_log, write_summary
from .pid import PidBaseline, PidGains, pid_baseline_step
from .scenario import (
    SCENARIO_FIELDS,
    Disturbance,
    Scenario,
    load_scenario,
    scenario_from_dict,
    shipped_scenario,
    shipped_scenario_path,
)

__all__ = [
    "AIRBORNE", "SCENARIO_FIELDS", "TIPOVER", "TOUCHDOWN", "CSV_COLUMNS", "NMPC", "PID",
    "ContactResult", "Disturbance", "Event", "PidBaseline", "PidGains", "Scenario", "SimLog",
    "Surface", "TouchdownMetrics", "clearances", "contact_resolve", "landing_phase",
    "load_scenario", "metrics", "min_wheel_first_tilt", "pid_baseline_step", "read_log",
    "resting_pose", "run", "scenario_from_dict", "shipped_scenario", "shipped_scenario_path", "summary", "write_log",
    "write_summary",
]
