"""Soulbound token registry: non-transferable role credentials.

Every party to an inheritance plan carries a token naming its role, issued
by the plan's testator. Tokens never move: the transfer operation exists
only to refuse, unconditionally, so the defining property is a testable
surface rather than an absence. Attributes are an issuer-gated key/value
map, letting the issuer evolve a credential after minting.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import NonTransferable, NotIssuer, UnknownToken
from .ledger import AccountId, BlockNumber, Ledger

if TYPE_CHECKING:
    from .inheritance import InheritancePlan


class Role(str, enum.Enum):
    TESTATOR = "Testator"
    EXECUTOR = "Executor"
    GUARDIAN = "Guardian"
    BENEFICIARY = "Beneficiary"


@dataclass
class SoulboundToken:
    token_id: int
    issuer: AccountId
    owner: AccountId
    role: Role
    attributes: dict[str, str] = field(default_factory=dict)
    minted_at: BlockNumber = 0


class SbtRegistry:
    def __init__(self, ledger: Ledger) -> None:
        self.ledger = ledger
        self.tokens: dict[int, SoulboundToken] = {}

    def mint_sbt(self, issuer: AccountId, owner: AccountId,
                 role: Role) -> SoulboundToken:
        self.ledger.account(issuer)
        self.ledger.account(owner)
        token_id = len(self.tokens) + 1
        token = SoulboundToken(token_id, issuer, owner, role,
                               minted_at=self.ledger.height)
        self.tokens[token_id] = token
        self.ledger.emit("SbtMinted", {
            "token_id": token_id,
            "issuer": issuer,
            "owner": owner,
            "role": role.value,
        })
        return token

    def sbt_transfer(self, token_id: int, frm: AccountId, to: AccountId) -> None:
        """Always refuses; state untouched, nothing traced."""
        raise NonTransferable(f"token {token_id}: {frm} -> {to}")

    def set_attribute(self, issuer: AccountId, token_id: int, key: str,
                      value: str) -> SoulboundToken:
        token = self.tokens.get(token_id)
        if token is None:
            raise UnknownToken(str(token_id))
        if token.issuer != issuer:
            raise NotIssuer(f"{issuer} did not issue token {token_id}")
        token.attributes[key] = value
        self.ledger.emit("SbtAttributeSet", {
            "token_id": token_id,
            "key": key,
            "value": value,
        })
        return token

    def holds_role(self, issuer: AccountId, owner: AccountId, role: Role) -> bool:
        return any(t.owner == owner and t.role == role and t.issuer == issuer
                   for t in self.tokens.values())

    def verify_existence(
            self, plan: "InheritancePlan") -> tuple[bool, list[tuple[AccountId, Role]]]:
        """Check that every checkable plan party holds a matching credential
        issued by the testator.

        Committed (hidden) guardians cannot be matched to an owner without
        revealing them, so they are excluded from the check. Missing pairs
        come back in plan order.
        """
        required: list[tuple[AccountId, Role]] = [(plan.executor, Role.EXECUTOR)]
        required += [(g.value, Role.GUARDIAN) for g in plan.guardians
                     if g.kind == "plain"]
        required += [(b, Role.BENEFICIARY) for b, _share in plan.beneficiaries]
        missing = [(who, role) for who, role in required
                   if not self.holds_role(plan.testator, who, role)]
        return (not missing, missing)
