"""Covert capacity accounting: B_T = sum of the per-method B_j.

Two modes:

* published mode, :func:`paper_scenario` + :func:`compute_total`, uses the
  published per-method budgets for a five-message call;
* measured mode, :func:`measured_scenario`, sums what the implemented channels
  actually carry in a concrete flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .channels import CHANNEL_IDS, ChannelConfig, get_channel
from .message import SipMessage

PER_MESSAGE = "per-message"
PER_FIRST_MESSAGE = "per-first-message"
PER_SDP_BODY = "per-sdp-body"
UNITS = (PER_MESSAGE, PER_FIRST_MESSAGE, PER_SDP_BODY)

METHODS = ("transport_stego", "sip_tokens", "sip_security", "sdp_stego", "other_sip")

OUT_OF_SCOPE = "out of scope: IP/TCP/UDP header embedding is not implemented"


@dataclass(frozen=True)
class MethodBudget:
    method: str
    bits_per_unit: int
    unit: str

    def __post_init__(self):
        if self.bits_per_unit < 0:
            raise ValueError("bits_per_unit must be non-negative")
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit {self.unit!r}")


@dataclass(frozen=True)
class ScenarioSpec:
    n_messages: int
    n_sdp_bodies: int
    budgets: tuple[MethodBudget, ...]

    def __post_init__(self):
        object.__setattr__(self, "budgets", tuple(self.budgets))
        if not 0 <= self.n_sdp_bodies <= self.n_messages:
            raise ValueError("need 0 <= n_sdp_bodies <= n_messages")

    @property
    def k(self) -> int:
        return len(self.budgets)

    def units(self, unit: str) -> int:
        if unit == PER_MESSAGE:
            return self.n_messages
        if unit == PER_FIRST_MESSAGE:
            return min(1, self.n_messages)
        return self.n_sdp_bodies


@dataclass(frozen=True)
class CapacityReport:
    per_method: tuple[tuple[str, int], ...]
    notes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "per_method", tuple(self.per_method))

    @property
    def total(self) -> int:
        return sum(bits for _, bits in self.per_method)

    def __getitem__(self, method: str) -> int:
        return dict(self.per_method)[method]

    def to_machine(self) -> str:
        lines = [f"{m}={b}" for m, b in self.per_method]
        lines.append(f"total={self.total}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        width = max([len(m) for m, _ in self.per_method] + [len("total")])
        rows = []
        for m, b in self.per_method:
            note = f"  ({self.notes[m]})" if m in self.notes else ""
            rows.append(f"{m:<{width}}  {b:>6} bits{note}")
        rows.append("-" * (width + 13))
        rows.append(f"{'total':<{width}}  {self.total:>6} bits")
        rows.append(f"total={self.total}")
        return "\n".join(rows) + "\n"


def paper_scenario() -> ScenarioSpec:
    """Five one-direction messages, two of them with SDP bodies."""
    return ScenarioSpec(
        n_messages=5,
        n_sdp_bodies=2,
        budgets=(
            MethodBudget("transport_stego", 16, PER_MESSAGE),
            MethodBudget("sip_tokens", 60 * 8, PER_FIRST_MESSAGE),
            MethodBudget("sip_security", 160, PER_MESSAGE),
            MethodBudget("sdp_stego", 60 * 8, PER_SDP_BODY),
            MethodBudget("other_sip", 8, PER_MESSAGE),
        ),
    )


def compute_total(spec: ScenarioSpec) -> CapacityReport:
    return CapacityReport(
        tuple((b.method, b.bits_per_unit * spec.units(b.unit)) for b in spec.budgets)
    )


def measured_scenario(
    flow: Sequence[SipMessage],
    cfg: ChannelConfig | None = None,
    enabled: Iterable[str] = CHANNEL_IDS,
) -> CapacityReport:
    """Per-channel capacity of a concrete flow, following the flow schedule
    (dialog-scoped channels count on the first message only)."""
    from .callflow import build_schedule

    cfg = cfg or ChannelConfig()
    enabled = set(enabled)
    sums = {cid: 0 for cid in CHANNEL_IDS if cid in enabled}
    for index, cid in build_schedule(len(flow), enabled):
        sums[cid] += get_channel(cid).capacity(flow[index], cfg)
    per = [("transport_stego", 0)] + list(sums.items())
    return CapacityReport(tuple(per), {"transport_stego": OUT_OF_SCOPE})
