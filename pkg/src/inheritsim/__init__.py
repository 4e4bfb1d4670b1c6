"""Deterministic ledger simulator for guardian-based account recovery and
digital inheritance: M-of-N vouching with delay periods, deposit honeypots,
committed (hidden) friends, soulbound role credentials, deadman switches,
collusion reminders and a single-call estate sweep."""

from .engine import Engine, ROOT
from .errors import DispatchError
from .ledger import Account, Ledger, TraceEvent, serialize_trace
from .recovery import FriendRef, ProtocolConstants
from .sbt import Role
from .sim import (
    BUNDLED_SCENARIOS,
    Scenario,
    Step,
    bundled_scenario_path,
    diff_traces,
    load_scenario,
    load_scenario_file,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "Account",
    "BUNDLED_SCENARIOS",
    "DispatchError",
    "Engine",
    "FriendRef",
    "Ledger",
    "ProtocolConstants",
    "ROOT",
    "Role",
    "Scenario",
    "Step",
    "TraceEvent",
    "bundled_scenario_path",
    "diff_traces",
    "load_scenario",
    "load_scenario_file",
    "run",
    "serialize_trace",
    "__version__",
]
