"""Engine: one ledger plus every protocol module, with a dispatch surface.

The engine wires the modules together, registers per-block hooks in a fixed
order (deadman switches before reminder notifications, so traces are
reproducible), and exposes a name-based dispatch used by the scenario
runner and the CLI. Tests drive module methods directly; scenarios go
through ``dispatch`` so that origin rules and argument decoding live in
exactly one place.

Origins: a step's actor is an account id, or the distinguished string
``"Root"`` for the governance origin. Root may only call the operations
that exist for it; accounts may not call Root-only operations. Account
creation is setup plumbing and accepts any actor.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable

from . import commit as commitments
from .deadman import DeadmanSwitches
from .errors import BadOrigin
from .inheritance import EstatePlanner, InheritancePlan
from .ledger import AccountId, Ledger
from .recovery import FriendRef, ProtocolConstants, SocialRecovery
from .sbt import Role, SbtRegistry

ROOT = "Root"


class Engine:
    def __init__(self, constants: ProtocolConstants | None = None) -> None:
        self.constants = constants or ProtocolConstants()
        self.ledger = Ledger()
        self.recovery = SocialRecovery(self.ledger, self.constants)
        self.sbts = SbtRegistry(self.ledger)
        self.deadman = DeadmanSwitches(self.ledger, self.recovery)
        self.estate = EstatePlanner(self.ledger, self.recovery, self.sbts)
        self.ledger.register_hook(self.deadman.on_block)
        self.ledger.register_hook(self.estate.on_block)

    # -- dispatch ------------------------------------------------------------

    def dispatch(self, actor: str, op: str, args: dict) -> Any:
        """Run one named operation as ``actor``; unknown names are a bug."""
        try:
            handler = _HANDLERS[op]
        except KeyError:
            raise ValueError(f"unknown operation {op!r}") from None
        return handler(self, actor, args)

    def _signed(self, actor: str) -> AccountId:
        if actor == ROOT:
            raise BadOrigin("Root cannot sign account operations")
        return actor

    # -- inspection ------------------------------------------------------------

    def state_dump(self) -> dict:
        """Deterministic JSON-ready snapshot of all protocol state."""
        accounts = [
            {"id": a.id, "free": a.free, "reserved": a.reserved}
            for a in sorted(self.ledger.accounts.values(), key=lambda a: a.id)
        ]
        configs = [
            {
                "owner": c.owner,
                "mode": c.mode,
                "friends": [f.rendered() for f in c.friends],
                "threshold": c.threshold,
                "delay_period": c.delay_period,
                "deposit": c.deposit,
            }
            for c in sorted(self.recovery.configs.values(), key=lambda c: c.owner)
        ]
        active = [
            {
                "lost": r.lost,
                "rescuer": r.rescuer,
                "created": r.created,
                "deposit": r.deposit,
                "vouched": sorted(r.vouched),
            }
            for r in sorted(self.recovery.active.values(),
                            key=lambda r: (r.lost, r.rescuer))
        ]
        proxies = [
            {"rescuer": rescuer, "lost": lost}
            for rescuer, lost in sorted(self.recovery.proxies.items())
        ]
        sbts = [
            {
                "token_id": t.token_id,
                "issuer": t.issuer,
                "owner": t.owner,
                "role": t.role.value,
                "attributes": dict(t.attributes),
                "minted_at": t.minted_at,
            }
            for t in sorted(self.sbts.tokens.values(), key=lambda t: t.token_id)
        ]
        switches = [
            {
                "owner": s.owner,
                "liveness_period": s.liveness_period,
                "grace_period": s.grace_period,
                "last_checkin": s.last_checkin,
                "action": ("none" if s.auto_rescuer is None
                           else {"auto_initiate": s.auto_rescuer}),
                "state": s.state.value,
            }
            for s in sorted(self.deadman.switches.values(), key=lambda s: s.owner)
        ]
        plans = [
            {
                "testator": p.testator,
                "executor": p.executor,
                "guardians": [g.rendered() for g in p.guardians],
                "threshold": p.threshold,
                "delay_period": p.delay_period,
                "beneficiaries": [[who, str(share)]
                                  for who, share in p.beneficiaries],
                "executor_is_friend": p.executor_is_friend,
                "notification_cadence": p.notification_cadence,
            }
            for p in sorted(self.estate.plans.values(), key=lambda p: p.testator)
        ]
        return {
            "height": self.ledger.height,
            "total_issuance": self.ledger.total_issuance(),
            "accounts": accounts,
            "recovery": {"configs": configs, "active": active,
                         "proxies": proxies},
            "sbts": sbts,
            "deadman": switches,
            "plans": plans,
        }


# -- argument decoding ---------------------------------------------------------

def decode_friend_ref(entry: Any) -> FriendRef:
    """A friend is a bare account id or ``{"commitment": "<hex>"}``."""
    if isinstance(entry, str):
        return FriendRef.plain(entry)
    if isinstance(entry, dict) and set(entry) == {"commitment"}:
        return FriendRef.committed(entry["commitment"])
    raise ValueError(f"bad friend reference: {entry!r}")


def decode_share(text: Any) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        return Fraction(text)
    raise ValueError(f"bad share: {text!r}")


def decode_role(name: str) -> Role:
    try:
        return Role(name)
    except ValueError:
        raise ValueError(f"bad role: {name!r}") from None


def _beneficiaries(raw: Any) -> list:
    return [(who, decode_share(share)) for who, share in raw]


# -- handlers --------------------------------------------------------------------

def _h_create_account(e: Engine, actor: str, a: dict) -> Any:
    # Setup plumbing: any actor, including Root, may endow accounts.
    return e.ledger.create_account(a["id"], a["endowment"])


def _h_transfer(e: Engine, actor: str, a: dict) -> Any:
    return e.ledger.transfer(e._signed(actor), a["to"], a["amount"])


def _h_reserve(e: Engine, actor: str, a: dict) -> Any:
    return e.ledger.reserve(e._signed(actor), a["amount"])


def _h_unreserve(e: Engine, actor: str, a: dict) -> Any:
    return e.ledger.unreserve(e._signed(actor), a["amount"])


def _h_repatriate(e: Engine, actor: str, a: dict) -> Any:
    return e.ledger.repatriate_reserved(e._signed(actor), a["to"], a["amount"])


def _h_create_recovery(e: Engine, actor: str, a: dict) -> Any:
    friends = [decode_friend_ref(f) for f in a["friends"]]
    return e.recovery.create_recovery(e._signed(actor), friends,
                                      a["threshold"], a["delay_period"])


def _h_initiate(e: Engine, actor: str, a: dict) -> Any:
    return e.recovery.initiate_recovery(e._signed(actor), a["lost"])


def _h_vouch(e: Engine, actor: str, a: dict) -> Any:
    return e.recovery.vouch_recovery(e._signed(actor), a["lost"], a["rescuer"])


def _h_vouch_committed(e: Engine, actor: str, a: dict) -> Any:
    salt = commitments.salt_from_hex(a["salt"])
    return e.recovery.vouch_recovery_committed(a["friend"], salt, a["lost"],
                                               a["rescuer"])


def _h_claim(e: Engine, actor: str, a: dict) -> Any:
    return e.recovery.claim_recovery(e._signed(actor), a["lost"])


def _h_close(e: Engine, actor: str, a: dict) -> Any:
    return e.recovery.close_recovery(e._signed(actor), a["rescuer"])


def _h_remove(e: Engine, actor: str, a: dict) -> Any:
    return e.recovery.remove_recovery(e._signed(actor))


def _h_as_recovered(e: Engine, actor: str, a: dict) -> Any:
    rescuer = e._signed(actor)
    lost = a["lost"]
    e.recovery.require_proxy(rescuer, lost)
    call = a["call"]
    return e.dispatch(lost, call["op"], call.get("args", {}))


def _h_root_set_recovered(e: Engine, actor: str, a: dict) -> Any:
    if actor != ROOT:
        raise BadOrigin(actor)
    return e.recovery.root_set_recovered(a["lost"], a["rescuer"])


def _h_mint_sbt(e: Engine, actor: str, a: dict) -> Any:
    return e.sbts.mint_sbt(e._signed(actor), a["owner"], decode_role(a["role"]))


def _h_sbt_transfer(e: Engine, actor: str, a: dict) -> Any:
    return e.sbts.sbt_transfer(a["token_id"], e._signed(actor), a["to"])


def _h_set_attribute(e: Engine, actor: str, a: dict) -> Any:
    return e.sbts.set_attribute(e._signed(actor), a["token_id"], a["key"],
                                a["value"])


def _h_verify_existence(e: Engine, actor: str, a: dict) -> Any:
    plan = e.estate.plan_for(a["testator"])
    return e.sbts.verify_existence(plan)


def _h_arm_switch(e: Engine, actor: str, a: dict) -> Any:
    action = a.get("action", "none")
    if action == "none":
        rescuer = None
    elif isinstance(action, dict) and set(action) == {"auto_initiate"}:
        rescuer = action["auto_initiate"]
    else:
        raise ValueError(f"bad deadman action: {action!r}")
    return e.deadman.arm_switch(e._signed(actor), a["liveness_period"],
                                a.get("grace_period", 20), rescuer)


def _h_check_in(e: Engine, actor: str, a: dict) -> Any:
    return e.deadman.check_in(e._signed(actor))


def _h_disarm(e: Engine, actor: str, a: dict) -> Any:
    return e.deadman.disarm(e._signed(actor))


def _h_build_plan(e: Engine, actor: str, a: dict) -> InheritancePlan:
    guardians = [decode_friend_ref(g) for g in a["guardians"]]
    return e.estate.build_plan(
        e._signed(actor), a["executor"], guardians, a["threshold"],
        a["delay_period"], _beneficiaries(a["beneficiaries"]),
        executor_is_friend=a.get("executor_is_friend", False),
        notification_cadence=a.get("notification_cadence"),
    )


def _h_enact_plan(e: Engine, actor: str, a: dict) -> Any:
    return e.estate.enact_plan(e._signed(actor))


def _h_sweep(e: Engine, actor: str, a: dict) -> Any:
    return e.estate.sweep_assets(e._signed(actor), a["testator"])


_HANDLERS: dict[str, Callable[[Engine, str, dict], Any]] = {
    "create_account": _h_create_account,
    "transfer": _h_transfer,
    "reserve": _h_reserve,
    "unreserve": _h_unreserve,
    "repatriate_reserved": _h_repatriate,
    "create_recovery": _h_create_recovery,
    "initiate_recovery": _h_initiate,
    "vouch_recovery": _h_vouch,
    "vouch_recovery_committed": _h_vouch_committed,
    "claim_recovery": _h_claim,
    "close_recovery": _h_close,
    "remove_recovery": _h_remove,
    "as_recovered": _h_as_recovered,
    "root_set_recovered": _h_root_set_recovered,
    "mint_sbt": _h_mint_sbt,
    "sbt_transfer": _h_sbt_transfer,
    "set_attribute": _h_set_attribute,
    "verify_existence": _h_verify_existence,
    "arm_switch": _h_arm_switch,
    "check_in": _h_check_in,
    "disarm": _h_disarm,
    "build_plan": _h_build_plan,
    "enact_plan": _h_enact_plan,
    "sweep_assets": _h_sweep,
}

OPERATIONS = frozenset(_HANDLERS)
