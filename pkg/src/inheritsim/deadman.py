"""Deadman's switch: liveness check-ins with staged alert and firing.

An owner arms a switch with a liveness period and a grace period. While the
owner keeps checking in at least every ``liveness_period`` blocks nothing
happens. One block after a check-in gap exceeds the period the switch
alerts (strict ``>``, so the boundary is ``last_checkin + period + 1``).
If the owner still does not respond, one block after the gap exceeds
``period + grace`` the switch fires, optionally auto-initiating recovery
on the owner's account with a configured rescuer. Firing is final; only
disarming before that point retires a switch.

Firing never bypasses the recovery delay period: the auto-initiated
recovery still needs vouches and the configured delay like any other.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .errors import (
    AlreadyArmed,
    AlreadyFired,
    DispatchError,
    NotArmed,
    UnknownSwitch,
    ZeroPeriod,
)
from .ledger import AccountId, BlockNumber, Ledger
from .recovery import SocialRecovery


class SwitchState(str, enum.Enum):
    ARMED = "Armed"
    ALERTED = "Alerted"
    FIRED = "Fired"
    DISARMED = "Disarmed"


@dataclass
class DeadmanSwitch:
    owner: AccountId
    liveness_period: int
    grace_period: int
    last_checkin: BlockNumber
    auto_rescuer: Optional[AccountId]  # None = alert/fire only
    state: SwitchState = SwitchState.ARMED


class DeadmanSwitches:
    """Per-owner switches plus the per-block expiry hook."""

    def __init__(self, ledger: Ledger, recovery: SocialRecovery) -> None:
        self.ledger = ledger
        self.recovery = recovery
        self.switches: dict[AccountId, DeadmanSwitch] = {}

    def arm_switch(self, owner: AccountId, liveness_period: int,
                   grace_period: int,
                   auto_rescuer: Optional[AccountId] = None) -> DeadmanSwitch:
        self.ledger.account(owner)
        existing = self.switches.get(owner)
        if existing is not None and existing.state != SwitchState.DISARMED:
            raise AlreadyArmed(owner)
        if liveness_period < 1:
            raise ZeroPeriod(owner)
        if grace_period < 0:
            raise ValueError("grace_period must be nonnegative")
        switch = DeadmanSwitch(owner, liveness_period, grace_period,
                               self.ledger.height, auto_rescuer)
        self.switches[owner] = switch
        return switch

    def check_in(self, owner: AccountId) -> DeadmanSwitch:
        switch = self.switches.get(owner)
        if switch is None:
            raise UnknownSwitch(owner)
        if switch.state not in (SwitchState.ARMED, SwitchState.ALERTED):
            raise NotArmed(f"{owner}: {switch.state.value}")
        switch.last_checkin = self.ledger.height
        switch.state = SwitchState.ARMED
        return switch

    def disarm(self, owner: AccountId) -> None:
        switch = self.switches.get(owner)
        if switch is None:
            raise UnknownSwitch(owner)
        if switch.state == SwitchState.FIRED:
            raise AlreadyFired(owner)
        switch.state = SwitchState.DISARMED

    def on_block(self, height: BlockNumber) -> None:
        for switch in self.switches.values():
            overdue = height - switch.last_checkin
            if (switch.state == SwitchState.ARMED
                    and overdue > switch.liveness_period):
                switch.state = SwitchState.ALERTED
                self.ledger.emit("DeadmanAlert", {
                    "owner": switch.owner,
                    "last_checkin": switch.last_checkin,
                })
            if (switch.state == SwitchState.ALERTED
                    and overdue > switch.liveness_period + switch.grace_period):
                switch.state = SwitchState.FIRED
                self._fire(switch)

    def _fire(self, switch: DeadmanSwitch) -> None:
        payload: dict = {"owner": switch.owner}
        if switch.auto_rescuer is None:
            payload["action"] = "none"
        else:
            payload["action"] = "auto_initiate"
            payload["rescuer"] = switch.auto_rescuer
            try:
                self.recovery.initiate_recovery(switch.auto_rescuer, switch.owner)
            except DispatchError as exc:
                payload["initiated"] = False
                payload["error"] = exc.ident
            else:
                payload["initiated"] = True
        self.ledger.emit("DeadmanFired", payload)
