"""Command-line front door: run scenarios, check invariants, explain runs.

Exit codes: 0 success, 1 expectation mismatch or failed suite, 2 unloadable
input. Delay periods are counted in blocks; at a 6-second block time one
day is 14400 blocks.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import commit as commitments
from .checks import SUITES
from .sim import (
    BUNDLED_SCENARIOS,
    ExpectationMismatch,
    Scenario,
    ScenarioError,
    Step,
    bundled_scenario_path,
    load_scenario_file,
    run,
)


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists() and "/" not in path and "\\" not in path:
        name = path[:-5] if path.endswith(".json") else path
        if name in BUNDLED_SCENARIOS:
            return bundled_scenario_path(name)
    return p


def _load(path: str) -> Scenario:
    return load_scenario_file(_resolve(path))


def _event_text(event) -> str:
    fields = " ".join(f"{k}={v}" for k, v in event.payload.items())
    return f"[{event.block:>6}] {event.kind:<18} {fields}"


def cmd_run(args: argparse.Namespace) -> int:
    try:
        scenario = _load(args.scenario)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run(scenario)
    except ExpectationMismatch as exc:
        print(f"expectation mismatch: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        sys.stdout.write(result.trace_text())
    else:
        for event in result.trace:
            print(_event_text(event))
    if args.dump_state:
        print(json.dumps(result.state, indent=2))
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    seed = int(os.environ.get("INHERIT_SEED", "0"))
    names = list(SUITES) if args.all else list(args.suites)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        print(f"error: unknown suites {unknown}; "
              f"available: {', '.join(SUITES)}", file=sys.stderr)
        return 2
    if not names:
        print("0 suites selected (pass suite names or --all)")
        return 0
    failed = 0
    for name in names:
        result = SUITES[name](seed)
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.name:<14} {result.detail}")
        failed += 0 if result.passed else 1
    print(f"{len(names) - failed}/{len(names)} suites passed (seed {seed})")
    return 1 if failed else 0


# -- explain -----------------------------------------------------------------


def _role_labels(scenario: Scenario) -> dict[str, str]:
    roles: dict[str, str] = {}
    for step in scenario.steps:
        if step.op == "build_plan":
            roles[step.actor] = "testator"
            roles[step.args["executor"]] = "digital executor"
            for g in step.args["guardians"]:
                if isinstance(g, str):
                    roles.setdefault(g, "guardian")
            for who, _share in step.args["beneficiaries"]:
                roles.setdefault(who, "beneficiary")
        elif step.op == "create_recovery":
            roles.setdefault(step.actor, "testator")
            for f in step.args["friends"]:
                if isinstance(f, str):
                    roles.setdefault(f, "guardian")
    return roles


def _who(name: str, roles: dict[str, str]) -> str:
    role = roles.get(name)
    return f"{name} ({role})" if role else name


def _sentence(step: Step, roles: dict[str, str]) -> str:
    a = step.args
    actor = _who(step.actor, roles)

    def friends_clause(entries) -> str:
        parts = []
        for f in entries:
            if isinstance(f, str):
                parts.append(_who(f, roles))
            else:
                parts.append(f"commitment {f['commitment'][:12]}..")
        return ", ".join(parts)

    if step.op == "create_account":
        return f"{actor} endows account {a['id']} with {a['endowment']} units"
    if step.op == "transfer":
        return f"{actor} sends {a['amount']} units to {_who(a['to'], roles)}"
    if step.op == "reserve":
        return f"{actor} locks {a['amount']} units"
    if step.op == "unreserve":
        return f"{actor} unlocks {a['amount']} units"
    if step.op == "repatriate_reserved":
        return (f"{actor} releases {a['amount']} locked units to "
                f"{_who(a['to'], roles)}")
    if step.op == "build_plan":
        bens = ", ".join(f"{_who(w, roles)} ({s})"
                         for w, s in a["beneficiaries"])
        return (f"{actor} drafts an inheritance plan: executor "
                f"{_who(a['executor'], roles)}, guardians "
                f"{friends_clause(a['guardians'])}, beneficiaries {bens}, "
                f"{a['threshold']} vouches needed, "
                f"delay {a['delay_period']} blocks")
    if step.op == "verify_existence":
        return (f"{actor} checks that every party to "
                f"{_who(a['testator'], roles)}'s plan holds a role credential")
    if step.op == "enact_plan":
        return f"{actor} enacts the plan, reserving the configuration deposit"
    if step.op == "create_recovery":
        return (f"{actor} stores a recovery configuration: friends "
                f"{friends_clause(a['friends'])}, {a['threshold']} vouches "
                f"needed, delay {a['delay_period']} blocks")
    if step.op == "initiate_recovery":
        return (f"{actor} deposits and opens recovery on "
                f"{_who(a['lost'], roles)}")
    if step.op == "vouch_recovery":
        return (f"{actor} vouches for {_who(a['rescuer'], roles)} recovering "
                f"{_who(a['lost'], roles)}")
    if step.op == "vouch_recovery_committed":
        try:
            digest = commitments.commit_friend_hex(
                a["friend"], commitments.salt_from_hex(a["salt"]))
            shown = f"commitment {digest[:12]}.."
        except Exception:
            shown = "an invalid commitment reveal"
        return (f"a hidden friend ({shown}) vouches for "
                f"{_who(a['rescuer'], roles)} recovering "
                f"{_who(a['lost'], roles)}")
    if step.op == "claim_recovery":
        return (f"{actor} claims proxy control of {_who(a['lost'], roles)} "
                f"after the delay")
    if step.op == "close_recovery":
        return (f"{actor} closes {_who(a['rescuer'], roles)}'s recovery "
                f"and keeps the deposit")
    if step.op == "remove_recovery":
        return (f"{actor} removes the recovery configuration and severs "
                f"any proxy")
    if step.op == "as_recovered":
        inner = Step(step.at_block, a["lost"], a["call"]["op"],
                     a["call"].get("args", {}), step.expect)
        return (f"{actor}, acting as {_who(a['lost'], roles)}: "
                f"{_sentence(inner, roles)}")
    if step.op == "root_set_recovered":
        return (f"governance (root origin) binds {_who(a['rescuer'], roles)} "
                f"as proxy for {_who(a['lost'], roles)}")
    if step.op == "mint_sbt":
        return (f"{actor} issues a soulbound {a['role']} credential to "
                f"{_who(a['owner'], roles)}")
    if step.op == "sbt_transfer":
        return (f"{actor} tries to transfer soulbound token "
                f"{a['token_id']} to {_who(a['to'], roles)}")
    if step.op == "set_attribute":
        return (f"{actor} sets {a['key']}={a['value']} on soulbound token "
                f"{a['token_id']}")
    if step.op == "arm_switch":
        action = a.get("action", "none")
        tail = ("alert only" if action == "none"
                else f"then auto-open recovery by "
                     f"{_who(action['auto_initiate'], roles)}")
        return (f"{actor} arms a deadman switch: check in every "
                f"{a['liveness_period']} blocks, grace "
                f"{a.get('grace_period', 20)}, {tail}")
    if step.op == "check_in":
        return f"{actor} checks in, proving liveness"
    if step.op == "disarm":
        return f"{actor} disarms the deadman switch"
    if step.op == "sweep_assets":
        return (f"{actor} sweeps {_who(a['testator'], roles)}'s whole estate "
                f"to the beneficiaries in one call")
    return f"{actor} performs {step.op}"


def cmd_explain(args: argparse.Namespace) -> int:
    try:
        scenario = _load(args.scenario)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"scenario: {scenario.name}")
    genesis = ", ".join(f"{who}:{amount}" for who, amount in scenario.genesis)
    print(f"genesis: {genesis or '(none)'}")
    roles = _role_labels(scenario)
    for i, step in enumerate(scenario.steps):
        line = f"step {i:>2} [block {step.at_block:>5}] {_sentence(step, roles)}"
        if step.expect != "Ok":
            line += f" (expected to fail: {step.expect})"
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inheritsim",
        description="Deterministic simulator for guardian-based account "
                    "recovery and digital inheritance.",
        epilog="Bundled scenarios: " + ", ".join(BUNDLED_SCENARIOS)
               + ". Delay periods are in blocks; at 6-second blocks one day "
                 "is 14400 blocks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="replay a scenario and print its trace")
    p_run.add_argument("scenario", help="scenario file or bundled name")
    p_run.add_argument("--format", choices=("text", "json"), default="text")
    p_run.add_argument("--dump-state", action="store_true",
                       help="print the final state as JSON")
    p_run.set_defaults(func=cmd_run)

    p_check = sub.add_parser("check", help="run invariant suites")
    p_check.add_argument("suites", nargs="*",
                         help=f"suite names ({', '.join(SUITES)})")
    p_check.add_argument("--all", action="store_true", help="run every suite")
    p_check.set_defaults(func=cmd_check)

    p_explain = sub.add_parser(
        "explain", help="narrate a scenario's steps with role names")
    p_explain.add_argument("scenario", help="scenario file or bundled name")
    p_explain.set_defaults(func=cmd_explain)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entrypoint() -> None:
    sys.exit(main())
