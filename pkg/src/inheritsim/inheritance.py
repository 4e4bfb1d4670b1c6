"""Inheritance planning: plan validation, enactment, reminders, sweep.

A plan names the testator, a digital executor, guardians, a vouch threshold
and delay period, and beneficiaries with exact rational shares summing to
one. Building a plan mints role credentials for every named party;
enacting it writes the underlying recovery configuration (guardians plus
the executor when flagged as a friend) and, if a notification cadence is
set, activates periodic reminder events for as long as any recovery stands
open against the testator without action having been taken. Those
reminders are the collusion tripwire: guardians opening recovery on their
own cannot stop them.

The sweep is the estate's single exit: through the executor's proxy
binding it closes the executor's own open recovery, removes the recovery
configuration (freeing its deposit into the estate), and distributes the
whole free balance to beneficiaries by largest-remainder apportionment,
ties broken by plan order. It validates everything up front and only then
mutates, so a failed sweep changes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import (
    DuplicateBeneficiary,
    NotSorted,
    RoundingImpossible,
    SharesDontSumToOne,
    StillActive,
    ThresholdTooLarge,
    UnknownPlan,
    ZeroThreshold,
)
from .ledger import AccountId, Balance, BlockNumber, Ledger
from .recovery import COMMITTED, PLAIN, FriendRef, RecoveryConfig, SocialRecovery
from .sbt import Role, SbtRegistry


@dataclass
class InheritancePlan:
    testator: AccountId
    executor: AccountId
    guardians: tuple[FriendRef, ...]
    threshold: int
    delay_period: int
    beneficiaries: tuple[tuple[AccountId, Fraction], ...]
    executor_is_friend: bool = False
    notification_cadence: Optional[int] = None

    def friend_refs(self) -> tuple[FriendRef, ...]:
        """Effective friend set in canonical (sorted) order."""
        refs = set(self.guardians)
        if self.executor_is_friend:
            refs.add(FriendRef.plain(self.executor))
        return tuple(sorted(refs, key=lambda r: r.value))


@dataclass
class SweepReport:
    old_account: AccountId
    distributed: list[tuple[AccountId, Balance]]
    dust_recipient: AccountId
    total_moved: Balance


def apportion(total: Balance,
              shares: "tuple[tuple[AccountId, Fraction], ...]") -> list[Balance]:
    """Largest-remainder split of ``total`` by exact rational shares.

    Every recipient gets floor(share * total) or that plus one; the units
    left after flooring go to the largest fractional parts, ties broken by
    list position. Sums to ``total`` exactly.
    """
    exact = [share * total for _who, share in shares]
    amounts = [int(e) for e in exact]  # floor, all values nonnegative
    leftover = total - sum(amounts)
    if leftover < 0 or leftover > len(shares):
        raise RoundingImpossible(f"total {total}, leftover {leftover}")
    by_remainder = sorted(range(len(shares)),
                          key=lambda i: (-(exact[i] - amounts[i]), i))
    for i in by_remainder[:leftover]:
        amounts[i] += 1
    return amounts


class EstatePlanner:
    """Plans keyed by testator, plus the reminder hook and the sweep."""

    def __init__(self, ledger: Ledger, recovery: SocialRecovery,
                 sbts: SbtRegistry) -> None:
        self.ledger = ledger
        self.recovery = recovery
        self.sbts = sbts
        self.plans: dict[AccountId, InheritancePlan] = {}
        self._cadences: dict[AccountId, int] = {}  # set at enactment

    # -- planning ----------------------------------------------------------

    def build_plan(self, testator: AccountId, executor: AccountId,
                   guardians: list[FriendRef], threshold: int,
                   delay_period: int,
                   beneficiaries: list[tuple[AccountId, Fraction]],
                   executor_is_friend: bool = False,
                   notification_cadence: Optional[int] = None) -> InheritancePlan:
        self.ledger.account(testator)
        self.ledger.account(executor)
        if not guardians:
            raise ValueError("guardians must be nonempty")
        if len({ref.kind for ref in guardians}) != 1:
            raise NotSorted("guardian list mixes plain and committed references")
        if guardians[0].kind == COMMITTED and executor_is_friend:
            # A plain executor id cannot join a committed friend set; list
            # the executor's commitment among the guardians instead.
            raise NotSorted("executor_is_friend needs a plain guardian list")
        for ref in guardians:
            if ref.kind == PLAIN:
                self.ledger.account(ref.value)
        seen: set[AccountId] = set()
        for who, share in beneficiaries:
            self.ledger.account(who)
            if who in seen:
                raise DuplicateBeneficiary(who)
            seen.add(who)
            if share <= 0:
                raise SharesDontSumToOne(f"non-positive share for {who}")
        if sum((share for _w, share in beneficiaries), Fraction(0)) != 1:
            raise SharesDontSumToOne(
                str(sum((s for _w, s in beneficiaries), Fraction(0))))

        plan = InheritancePlan(
            testator=testator,
            executor=executor,
            guardians=tuple(guardians),
            threshold=threshold,
            delay_period=delay_period,
            beneficiaries=tuple(beneficiaries),
            executor_is_friend=executor_is_friend,
            notification_cadence=notification_cadence,
        )
        refs = plan.friend_refs()
        if threshold < 1:
            raise ZeroThreshold(str(threshold))
        if threshold > len(refs):
            raise ThresholdTooLarge(f"{threshold} > {len(refs)}")

        self.sbts.mint_sbt(testator, executor, Role.EXECUTOR)
        for ref in plan.guardians:
            if ref.kind == PLAIN:
                self.sbts.mint_sbt(testator, ref.value, Role.GUARDIAN)
        for who, _share in plan.beneficiaries:
            self.sbts.mint_sbt(testator, who, Role.BENEFICIARY)

        self.plans[testator] = plan
        return plan

    def plan_for(self, testator: AccountId) -> InheritancePlan:
        plan = self.plans.get(testator)
        if plan is None:
            raise UnknownPlan(testator)
        return plan

    def enact_plan(self, testator: AccountId) -> RecoveryConfig:
        plan = self.plan_for(testator)
        config = self.recovery.create_recovery(
            testator, list(plan.friend_refs()), plan.threshold,
            plan.delay_period)
        if plan.notification_cadence is not None:
            self._cadences[testator] = plan.notification_cadence
        return config

    # -- reminders -----------------------------------------------------------

    def on_block(self, height: BlockNumber) -> None:
        """Emit a reminder every cadence blocks per open, unclaimed recovery
        against an enacted testator, starting one cadence after initiation."""
        for testator, cadence in self._cadences.items():
            plan = self.plans[testator]
            for (lost, rescuer), rec in self.recovery.active.items():
                if lost != testator:
                    continue
                if self.recovery.proxies.get(rescuer) == lost:
                    continue  # claimed: on-chain action was taken
                since = height - rec.created
                if since > 0 and since % cadence == 0:
                    self.ledger.emit("ReminderSent", {
                        "testator": testator,
                        "executor": plan.executor,
                        "rescuer": rescuer,
                    })

    # -- sweep -----------------------------------------------------------------

    def sweep_assets(self, executor: AccountId,
                     testator: AccountId) -> SweepReport:
        plan = self.plan_for(testator)
        self.recovery.require_proxy(executor, testator)
        third_party = [r for (lost, r) in self.recovery.active
                       if lost == testator and r != executor]
        if third_party:
            raise StillActive(", ".join(third_party))

        # Validation done; the steps below cannot fail.
        if (testator, executor) in self.recovery.active:
            self.recovery.close_recovery(testator, executor)
        if testator in self.recovery.configs:
            self.recovery.remove_recovery(testator)
        estate = self.ledger.account(testator)
        if estate.reserved:
            self.ledger.unreserve(testator, estate.reserved)

        total = estate.free
        amounts = apportion(total, plan.beneficiaries)
        distributed: list[tuple[AccountId, Balance]] = []
        for (who, _share), amount in zip(plan.beneficiaries, amounts):
            if amount == 0:
                continue
            self.ledger.transfer(testator, who, amount)
            distributed.append((who, amount))

        report = SweepReport(
            old_account=testator,
            distributed=distributed,
            dust_recipient=plan.beneficiaries[0][0],
            total_moved=total,
        )
        self.ledger.emit("SweepCompleted", {
            "old_account": report.old_account,
            "distributed": [[who, amount] for who, amount in distributed],
            "dust_recipient": report.dust_recipient,
            "total_moved": report.total_moved,
        })
        return report
