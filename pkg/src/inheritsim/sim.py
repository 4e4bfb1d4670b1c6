"""Scenario engine: scripted timelines replayed deterministically.

A scenario file is JSON with a name, optional protocol-constant overrides,
a genesis account list and an ordered step list. Every step carries an
``expect`` field, either ``"Ok"`` or an exact error identifier, and the
run aborts on the first mismatch, so adversarial scripts assert their
failures instead of merely observing them.

Block placement: steps are grouped by ``at_block``; the engine walks empty
blocks (hooks only) up to each group, dispatches the group's steps at that
height, then finalizes the block by running its hooks. Hooks therefore see
the block's dispatches already applied, which is what lets a claim or
close silence the reminder that would otherwise fire in the same block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from .engine import OPERATIONS, ROOT, Engine
from .errors import DispatchError, error_identifiers
from .ledger import TraceEvent, serialize_trace
from .recovery import ProtocolConstants

BUNDLED_SCENARIOS = (
    "fig2_lifecycle",
    "malicious_initiate",
    "collusion_attack",
    "deadman_autopilot",
    "root_override",
    "committed_friends",
)


class ScenarioError(Exception):
    """Base for scenario loading/running failures (not protocol errors)."""


class ParseError(ScenarioError):
    pass


class SchemaError(ScenarioError):
    pass


class UnsortedSteps(ScenarioError):
    pass


class ExpectationMismatch(ScenarioError):
    def __init__(self, step_index: int, expected: str, actual: str,
                 detail: str = "") -> None:
        self.step_index = step_index
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"step {step_index}: expected {expected}, got {actual}"
            + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class Step:
    at_block: int
    actor: str
    op: str
    args: dict
    expect: str  # "Ok" or an error identifier


@dataclass(frozen=True)
class Scenario:
    name: str
    genesis: tuple[tuple[str, int], ...]
    steps: tuple[Step, ...]
    constants: ProtocolConstants = field(default_factory=ProtocolConstants)


@dataclass(frozen=True)
class Divergence:
    index: int
    left: Optional[str]
    right: Optional[str]


@dataclass
class RunResult:
    scenario: Scenario
    engine: Engine
    trace: list[TraceEvent]
    state: dict

    def trace_text(self) -> str:
        return serialize_trace(self.trace)


# -- loading -----------------------------------------------------------------

_CONSTANT_KEYS = frozenset(
    ("config_deposit_base", "friend_deposit_factor", "recovery_deposit",
     "max_friends"))


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)


def load_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from None

    _require(isinstance(doc, dict), "top level must be an object")
    unknown = set(doc) - {"name", "constants", "genesis", "steps"}
    _require(not unknown, f"unknown top-level keys: {sorted(unknown)}")
    _require(isinstance(doc.get("name"), str) and doc["name"],
             "name must be a non-empty string")

    overrides = doc.get("constants", {})
    _require(isinstance(overrides, dict), "constants must be an object")
    bad = set(overrides) - _CONSTANT_KEYS
    _require(not bad, f"unknown constants: {sorted(bad)}")
    for key, value in overrides.items():
        _require(isinstance(value, int) and not isinstance(value, bool)
                 and value >= 0, f"constant {key} must be a nonnegative int")
    constants = ProtocolConstants(**overrides)

    genesis_raw = doc.get("genesis", [])
    _require(isinstance(genesis_raw, list), "genesis must be a list")
    genesis = []
    for entry in genesis_raw:
        _require(isinstance(entry, list) and len(entry) == 2,
                 f"genesis entries are [id, endowment]: {entry!r}")
        who, endowment = entry
        _require(isinstance(who, str) and who and who != ROOT,
                 f"bad genesis account id: {who!r}")
        _require(isinstance(endowment, int) and not isinstance(endowment, bool)
                 and endowment >= 0,
                 f"bad genesis endowment for {who}: {endowment!r}")
        genesis.append((who, endowment))

    steps_raw = doc.get("steps", [])
    _require(isinstance(steps_raw, list), "steps must be a list")
    legal_expects = error_identifiers() | {"Ok"}
    steps = []
    for i, raw in enumerate(steps_raw):
        _require(isinstance(raw, dict), f"step {i} must be an object")
        missing = {"at_block", "actor", "op", "expect"} - set(raw)
        _require(not missing, f"step {i} missing keys: {sorted(missing)}")
        unknown = set(raw) - {"at_block", "actor", "op", "args", "expect"}
        _require(not unknown, f"step {i} unknown keys: {sorted(unknown)}")
        at_block = raw["at_block"]
        _require(isinstance(at_block, int) and not isinstance(at_block, bool)
                 and at_block >= 0, f"step {i}: bad at_block {at_block!r}")
        _require(isinstance(raw["actor"], str) and raw["actor"],
                 f"step {i}: bad actor")
        op = raw["op"]
        _require(op in OPERATIONS, f"step {i}: unknown op {op!r}")
        args = raw.get("args", {})
        _require(isinstance(args, dict), f"step {i}: args must be an object")
        expect = raw["expect"]
        _require(expect in legal_expects,
                 f"step {i}: unknown expect {expect!r}")
        steps.append(Step(at_block, raw["actor"], op, args, expect))

    heights = [s.at_block for s in steps]
    if any(a > b for a, b in zip(heights, heights[1:])):
        raise UnsortedSteps(doc["name"])

    return Scenario(doc["name"], tuple(genesis), tuple(steps), constants)


def load_scenario_file(path: "str | Path") -> Scenario:
    return load_scenario(Path(path).read_text(encoding="utf-8"))


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a scenario shipped with the package."""
    if name.endswith(".json"):
        name = name[: -len(".json")]
    if name not in BUNDLED_SCENARIOS:
        raise KeyError(name)
    return Path(str(resources.files("inheritsim") / "scenarios" / f"{name}.json"))


# -- running -------------------------------------------------------------------

StepCallback = Callable[[int, Step, Engine], None]


def run(scenario: Scenario, on_step: Optional[StepCallback] = None) -> RunResult:
    """Replay a scenario on a fresh engine, checking every expectation."""
    engine = Engine(scenario.constants)
    for who, endowment in scenario.genesis:
        engine.ledger.create_account(who, endowment)

    index = 0
    steps = scenario.steps
    while index < len(steps):
        block = steps[index].at_block
        group = []
        while index < len(steps) and steps[index].at_block == block:
            group.append((index, steps[index]))
            index += 1

        ledger = engine.ledger
        if block > ledger.height:
            if block - ledger.height > 1:
                ledger.advance_blocks(block - ledger.height - 1)
            ledger.enter_block()
        for step_index, step in group:
            actual = "Ok"
            detail = ""
            try:
                engine.dispatch(step.actor, step.op, step.args)
            except DispatchError as exc:
                actual = exc.ident
                detail = str(exc)
            if actual != step.expect:
                raise ExpectationMismatch(step_index, step.expect, actual,
                                          detail)
            if on_step is not None:
                on_step(step_index, step, engine)
        ledger.run_block_hooks()

    return RunResult(scenario, engine, list(engine.ledger.trace),
                     engine.state_dump())


def diff_traces(a: list[TraceEvent], b: list[TraceEvent]) -> list[Divergence]:
    """Empty iff the serialized traces are byte-identical; otherwise the
    first point of divergence."""
    left = [event.to_json() for event in a]
    right = [event.to_json() for event in b]
    for i in range(max(len(left), len(right))):
        la = left[i] if i < len(left) else None
        rb = right[i] if i < len(right) else None
        if la != rb:
            return [Divergence(i, la, rb)]
    return []
