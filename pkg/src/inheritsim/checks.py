"""Self-contained invariant suites behind ``inheritsim check``.

Each suite builds its own engines, drives them, and reports pass/fail with
a one-line detail. Randomized suites take a seed (the CLI reads
``INHERIT_SEED``, default 0) and are fully deterministic for a given seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

from . import commit as commitments
from .engine import Engine
from .errors import (
    DelayPeriod,
    DispatchError,
    NonTransferable,
    NotArmed,
    NotFriend,
    Threshold,
)
from .recovery import FriendRef
from .sbt import Role


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


# -- conservation -----------------------------------------------------------

def conservation_suite(seed: int = 0, dispatches: int = 1000) -> SuiteResult:
    """Random valid dispatches never change issuance or go negative."""
    rng = random.Random(seed)
    engine = Engine()
    ledger = engine.ledger
    ids = [f"ACCT{i}" for i in range(6)]
    for who in ids:
        ledger.create_account(who, rng.randrange(50, 2000))
    baseline = ledger.total_issuance()

    def pick_funded(minimum: int) -> "str | None":
        funded = [w for w in ids if ledger.accounts[w].free >= minimum]
        return rng.choice(funded) if funded else None

    def op_transfer() -> bool:
        frm, to = rng.choice(ids), rng.choice(ids)
        ledger.transfer(frm, to, rng.randint(0, ledger.accounts[frm].free))
        return True

    def op_reserve() -> bool:
        who = rng.choice(ids)
        ledger.reserve(who, rng.randint(0, ledger.accounts[who].free))
        return True

    def op_unreserve() -> bool:
        held = [w for w in ids if ledger.accounts[w].reserved > 0]
        if not held:
            return False
        who = rng.choice(held)
        ledger.unreserve(who, rng.randint(1, ledger.accounts[who].reserved))
        return True

    def op_repatriate() -> bool:
        held = [w for w in ids if ledger.accounts[w].reserved > 0]
        if not held:
            return False
        frm = rng.choice(held)
        ledger.repatriate_reserved(
            frm, rng.choice(ids), rng.randint(1, ledger.accounts[frm].reserved))
        return True

    def op_advance() -> bool:
        ledger.advance_blocks(rng.randint(1, 3))
        return True

    def op_create_recovery() -> bool:
        free_owners = [w for w in ids if w not in engine.recovery.configs]
        if not free_owners:
            return False
        owner = rng.choice(free_owners)
        others = sorted(rng.sample([w for w in ids if w != owner],
                                   rng.randint(1, 4)))
        deposit = engine.constants.config_deposit(len(others))
        if ledger.accounts[owner].free < deposit:
            return False
        engine.recovery.create_recovery(
            owner, [FriendRef.plain(f) for f in others],
            rng.randint(1, len(others)), rng.randint(0, 30))
        return True

    def op_initiate() -> bool:
        configured = list(engine.recovery.configs)
        if not configured:
            return False
        lost = rng.choice(configured)
        rescuer = pick_funded(engine.constants.recovery_deposit)
        if rescuer is None or (lost, rescuer) in engine.recovery.active:
            return False
        engine.recovery.initiate_recovery(rescuer, lost)
        return True

    def op_vouch() -> bool:
        open_recoveries = list(engine.recovery.active.values())
        rng.shuffle(open_recoveries)
        for rec in open_recoveries:
            config = engine.recovery.configs[rec.lost]
            fresh = [f.value for f in config.friends
                     if f.value not in rec.vouched]
            if fresh:
                engine.recovery.vouch_recovery(rng.choice(fresh), rec.lost,
                                               rec.rescuer)
                return True
        return False

    def op_claim() -> bool:
        for (lost, rescuer), rec in engine.recovery.active.items():
            config = engine.recovery.configs[lost]
            if (len(rec.vouched) >= config.threshold
                    and ledger.height >= rec.created + config.delay_period):
                engine.recovery.claim_recovery(rescuer, lost)
                return True
        return False

    def op_close() -> bool:
        if not engine.recovery.active:
            return False
        lost, rescuer = rng.choice(sorted(engine.recovery.active))
        engine.recovery.close_recovery(lost, rescuer)
        return True

    def op_remove() -> bool:
        quiet = [owner for owner in engine.recovery.configs
                 if not any(lost == owner for lost, _ in engine.recovery.active)]
        if not quiet:
            return False
        engine.recovery.remove_recovery(rng.choice(quiet))
        return True

    def op_mint() -> bool:
        engine.sbts.mint_sbt(rng.choice(ids), rng.choice(ids),
                             rng.choice(list(Role)))
        return True

    def op_attribute() -> bool:
        if not engine.sbts.tokens:
            return False
        token = engine.sbts.tokens[rng.choice(sorted(engine.sbts.tokens))]
        engine.sbts.set_attribute(token.issuer, token.token_id,
                                  f"k{rng.randint(0, 9)}",
                                  f"v{rng.randint(0, 9)}")
        return True

    ops: list[Callable[[], bool]] = [
        op_transfer, op_transfer, op_reserve, op_unreserve, op_repatriate,
        op_advance, op_create_recovery, op_initiate, op_vouch, op_claim,
        op_close, op_remove, op_mint, op_attribute,
    ]

    performed = 0
    while performed < dispatches:
        if not rng.choice(ops)():
            continue
        performed += 1
        if ledger.total_issuance() != baseline:
            return SuiteResult(
                "conservation", False,
                f"issuance drifted after dispatch {performed}")
        if any(a.free < 0 or a.reserved < 0 for a in ledger.accounts.values()):
            return SuiteResult(
                "conservation", False,
                f"negative balance after dispatch {performed}")
    return SuiteResult(
        "conservation", True,
        f"{dispatches} dispatches, issuance constant at {baseline}")


# -- threshold / delay brute force -----------------------------------------------

def threshold_suite() -> SuiteResult:
    """Enumerate all vouch subsets of a 3-of-5 setup at both sides of the
    delay boundary; the claim must succeed in exactly the right cases."""
    friends = ["F1", "F2", "F3", "F4", "F5"]
    created, delay = 60, 100
    successes_at = {created + delay - 1: 0, created + delay: 0}
    mismatches = 0

    for size in range(0, 6):
        for subset in combinations(friends, size):
            for height in sorted(successes_at):
                engine = Engine()
                engine.ledger.create_account("T", 1000)
                engine.ledger.create_account("E", 100)
                for f in friends:
                    engine.ledger.create_account(f, 0)
                engine.recovery.create_recovery(
                    "T", [FriendRef.plain(f) for f in friends], 3, delay)
                engine.ledger.advance_blocks(created)
                engine.recovery.initiate_recovery("E", "T")
                for f in subset:
                    engine.recovery.vouch_recovery(f, "T", "E")
                engine.ledger.advance_blocks(height - created)
                try:
                    engine.recovery.claim_recovery("E", "T")
                    succeeded = True
                except (Threshold, DelayPeriod):
                    succeeded = False
                expected = size >= 3 and height == created + delay
                if succeeded != expected:
                    mismatches += 1
                if succeeded:
                    successes_at[height] += 1

    passed = (mismatches == 0
              and successes_at[created + delay] == 16
              and successes_at[created + delay - 1] == 0)
    return SuiteResult(
        "threshold", passed,
        f"64 cases, {successes_at[created + delay]} claims at the boundary, "
        f"{successes_at[created + delay - 1]} early, {mismatches} mismatches")


# -- soulbound non-transferability ---------------------------------------------

def sbt_suite(seed: int = 0, attempts: int = 500) -> SuiteResult:
    rng = random.Random(seed)
    engine = Engine()
    ids = [f"HOLDER{i}" for i in range(6)]
    for who in ids:
        engine.ledger.create_account(who, 0)
    for _ in range(8):
        engine.sbts.mint_sbt(rng.choice(ids), rng.choice(ids),
                             rng.choice(list(Role)))
    owners_before = {t: tok.owner for t, tok in engine.sbts.tokens.items()}
    trace_before = len(engine.ledger.trace)

    refused = 0
    for _ in range(attempts):
        token_id = rng.randint(1, 12)  # includes ids that were never minted
        try:
            engine.sbts.sbt_transfer(token_id, rng.choice(ids),
                                     rng.choice(ids))
        except NonTransferable:
            refused += 1
    owners_after = {t: tok.owner for t, tok in engine.sbts.tokens.items()}
    passed = (refused == attempts
              and owners_after == owners_before
              and len(engine.ledger.trace) == trace_before)
    return SuiteResult(
        "sbt", passed,
        f"{refused}/{attempts} transfers refused, owners unchanged")


# -- deadman exhaustive window -----------------------------------------------------

def _deadman_oracle(checkins: list[int], period: int, grace: int,
                    horizon: int) -> tuple[list[int], list[int]]:
    """Block-by-block reference simulation of one switch armed at block 0.

    A check-in scheduled at a block where the switch has already fired is
    dropped, mirroring the engine's refusal.
    """
    last, state = 0, "armed"
    alerts, fires = [], []
    pending = set(checkins)
    for height in range(1, horizon + 1):
        if state == "armed" and height - last > period:
            state = "alerted"
            alerts.append(height)
        if state == "alerted" and height - last > period + grace:
            state = "fired"
            fires.append(height)
        if height in pending and state in ("armed", "alerted"):
            last, state = height, "armed"
    return alerts, fires


def _deadman_run(checkins: list[int], period: int, grace: int,
                 horizon: int) -> tuple[list[int], list[int]]:
    engine = Engine()
    engine.ledger.create_account("T", 0)
    engine.deadman.arm_switch("T", period, grace, None)
    pending = set(checkins)
    for height in range(1, horizon + 1):
        engine.ledger.advance_blocks(1)
        if height in pending:
            try:
                engine.deadman.check_in("T")
            except NotArmed:
                pass
    alerts = [e.block for e in engine.ledger.trace if e.kind == "DeadmanAlert"]
    fires = [e.block for e in engine.ledger.trace if e.kind == "DeadmanFired"]
    return alerts, fires


def deadman_suite(period: int = 100, grace: int = 20,
                  horizon: int = 450) -> SuiteResult:
    mismatches = 0
    for checkin in range(1, 301):
        got = _deadman_run([checkin], period, grace, horizon)
        want = _deadman_oracle([checkin], period, grace, horizon)
        if got != want:
            mismatches += 1
            continue
        alerts, fires = got
        # Closed form: one alert per expired window, one firing ever.
        if checkin <= period:
            ok = alerts == [checkin + period + 1] and \
                fires == [checkin + period + grace + 1]
        elif checkin <= period + grace:
            ok = alerts == [period + 1, checkin + period + 1] and \
                fires == [checkin + period + grace + 1]
        else:  # fired before the owner ever came back
            ok = alerts == [period + 1] and fires == [period + grace + 1]
        if not ok:
            mismatches += 1

    quiet = 0
    for gap in (1, 37, period):
        schedule = list(range(gap, 401, gap))
        if _deadman_run(schedule, period, grace, 400) == ([], []):
            quiet += 1
    passed = mismatches == 0 and quiet == 3
    return SuiteResult(
        "deadman", passed,
        f"300 placements checked, {mismatches} mismatches, "
        f"{quiet}/3 live schedules silent")


# -- commitment binding ----------------------------------------------------------

def commitment_suite(seed: int = 0, pairs: int = 256) -> SuiteResult:
    rng = random.Random(seed)
    alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    digests = set()
    failures = 0
    samples = []
    for i in range(pairs):
        account = "".join(rng.choice(alphabet) for _ in range(rng.randint(3, 12)))
        salt = rng.randbytes(commitments.SALT_LENGTH)
        digest = commitments.commit_friend(account, salt)
        if digest != commitments.commit_friend(account, salt):
            failures += 1
        if commitments.commit_friend(account, rng.randbytes(16)) == digest:
            failures += 1
        if commitments.commit_friend(account + "X", salt) == digest:
            failures += 1
        digests.add(digest)
        if i % 64 == 0:
            samples.append((account, salt, digest))

    # Engine-level reveal: the right preimage vouches, a wrong salt does not.
    for account, salt, digest in samples:
        engine = Engine()
        engine.ledger.create_account("T", 1000)
        engine.ledger.create_account("E", 100)
        engine.recovery.create_recovery(
            "T", [FriendRef.committed(digest)], 1, 0)
        engine.recovery.initiate_recovery("E", "T")
        try:
            engine.recovery.vouch_recovery_committed(
                account, rng.randbytes(16), "T", "E")
            failures += 1
        except NotFriend:
            pass
        try:
            engine.recovery.vouch_recovery_committed(account, salt, "T", "E")
        except DispatchError:
            failures += 1

    passed = failures == 0 and len(digests) == pairs
    return SuiteResult(
        "commitment", passed,
        f"{pairs} pairs bound, {len(digests)} distinct digests, "
        f"{failures} failures")


SUITES: dict[str, Callable[[int], SuiteResult]] = {
    "conservation": lambda seed: conservation_suite(seed),
    "threshold": lambda seed: threshold_suite(),
    "sbt": lambda seed: sbt_suite(seed),
    "deadman": lambda seed: deadman_suite(),
    "commitment": lambda seed: commitment_suite(seed),
}
