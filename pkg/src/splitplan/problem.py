"""The constrained three-objective split problem.

Objectives, all minimised, for a split at ``l1``:

* ``f1`` end-to-end latency (s): client + upload + server time
* ``f2`` client energy (mJ): compute + upload + download energy
* ``f3`` client memory (bytes)

Constraint indices reported by :func:`feasible`:

1. client memory <= memory cap
2. l1 + l2 == L
3. 1 <= l1 <= L
4. 1 <= l2 <= L
5. upload throughput <= bandwidth
6. download throughput <= bandwidth
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, NamedTuple, Optional

from .cost import DeviceProfile, NetworkProfile, cost_breakdown
from .errors import InvalidInstance, ParseError
from .profile import ModelProfile, bundled_profile, read_json

DEFAULT_MEMORY_CAP = 1 << 30  # 1 GiB


class ObjectiveVector(NamedTuple):
    f1: float  # latency, s
    f2: float  # energy, mJ
    f3: int  # client memory, bytes


@dataclass(frozen=True)
class SplitCandidate:
    """``l1`` layers on the client, ``l2`` on the server.

    Not validated on construction so that out-of-range splits can still be
    checked by :func:`feasible`.
    """

    l1: int
    l2: int

    @classmethod
    def at(cls, l1: int, total_layers: int) -> "SplitCandidate":
        return cls(l1, total_layers - l1)


@dataclass(frozen=True)
class ProblemInstance:
    model: ModelProfile
    client: DeviceProfile
    server: DeviceProfile
    network: NetworkProfile
    memory_cap: float = DEFAULT_MEMORY_CAP

    def __post_init__(self):
        if isinstance(self.memory_cap, bool) or not isinstance(self.memory_cap, (int, float)):
            raise InvalidInstance(f"memory_cap must be a number, got {self.memory_cap!r}")
        if not self.memory_cap > 0:
            raise InvalidInstance(f"memory_cap must be > 0, got {self.memory_cap}")
        if self.model.total_layers < 2:
            raise InvalidInstance("model needs at least 2 layers")
        if self.client.freq_ghz is None or self.client.k is None:
            raise InvalidInstance("client device needs freq_ghz and k for its power model")
        net = self.network
        if net.tau_u_mbps > net.bandwidth_mbps or net.tau_d_mbps > net.bandwidth_mbps:
            raise InvalidInstance("link throughput exceeds bandwidth")

    @property
    def total_layers(self) -> int:
        return self.model.total_layers

    def candidate(self, l1: int) -> SplitCandidate:
        return SplitCandidate.at(l1, self.total_layers)


def _check_candidate(instance: ProblemInstance, candidate: SplitCandidate) -> None:
    if candidate.l1 + candidate.l2 != instance.total_layers:
        raise InvalidInstance(
            f"l1 + l2 = {candidate.l1 + candidate.l2} does not equal L = {instance.total_layers}"
        )


def evaluate(instance: ProblemInstance, candidate: SplitCandidate) -> ObjectiveVector:
    _check_candidate(instance, candidate)
    costs = cost_breakdown(instance, candidate.l1)
    return ObjectiveVector(
        f1=costs.t_total,
        f2=costs.e_total,
        f3=instance.model.client_memory(candidate.l1),
    )


def violations(instance: ProblemInstance, candidate: SplitCandidate) -> list[int]:
    """Indices (1-6) of every violated constraint, ascending."""
    total = instance.total_layers
    l1, l2 = candidate.l1, candidate.l2
    out = []
    # out-of-range splits are charged the memory of the clamped prefix
    if instance.model.client_memory(min(max(l1, 0), total)) > instance.memory_cap:
        out.append(1)
    if l1 + l2 != total:
        out.append(2)
    if not 1 <= l1 <= total:
        out.append(3)
    if not 1 <= l2 <= total:
        out.append(4)
    net = instance.network
    if net.tau_u_mbps > net.bandwidth_mbps:
        out.append(5)
    if net.tau_d_mbps > net.bandwidth_mbps:
        out.append(6)
    return out


def feasible(instance: ProblemInstance, candidate: SplitCandidate) -> tuple[bool, list[int]]:
    found = violations(instance, candidate)
    return not found, found


def is_feasible(instance: ProblemInstance, l1: int) -> bool:
    return not violations(instance, instance.candidate(l1))


def load_devices(document: dict[str, Any]) -> tuple[DeviceProfile, DeviceProfile, NetworkProfile]:
    """Parse a device/network document into ``(client, server, network)``."""
    if not isinstance(document, dict):
        raise ParseError("device document must be an object")
    try:
        client_doc, server_doc, net_doc = document["client"], document["server"], document["network"]
    except KeyError as exc:
        raise ParseError(f"device document missing {exc.args[0]!r}") from None
    if not all(isinstance(d, dict) for d in (client_doc, server_doc, net_doc)):
        raise ParseError("client, server and network must be objects")
    try:
        client = DeviceProfile(
            name=client_doc.get("name", "client"),
            cores=client_doc["cores"],
            clock_hz=client_doc["clock_hz"],
            freq_ghz=client_doc["freq_ghz"],
            k=client_doc["k"],
        )
        server = DeviceProfile(
            name=server_doc.get("name", "server"),
            cores=server_doc["cores"],
            clock_hz=server_doc["clock_hz"],
        )
        network = NetworkProfile(
            bandwidth_mbps=net_doc["bandwidth_mbps"],
            tau_u_mbps=net_doc.get("tau_u_mbps"),
            tau_d_mbps=net_doc.get("tau_d_mbps"),
            **{
                key: net_doc[key]
                for key in ("alpha_u", "beta_u", "alpha_d", "beta_d", "download_bits")
                if key in net_doc
            },
        )
    except KeyError as exc:
        raise ParseError(f"device document missing {exc.args[0]!r}") from None
    except TypeError as exc:
        raise ParseError(f"malformed device document: {exc}") from None
    return client, server, network


def default_devices_path() -> Path:
    return Path(str(resources.files("splitplan") / "data" / "j6_default.json"))


def default_devices() -> tuple[DeviceProfile, DeviceProfile, NetworkProfile]:
    return load_devices(read_json(default_devices_path()))


def default_instance(model: str | ModelProfile, memory_cap: Optional[float] = None) -> ProblemInstance:
    """The reference setup: octa-core 1.6 GHz phone, quad-core server, 10 Mbps link."""
    if isinstance(model, str):
        model = bundled_profile(model)
    client, server, network = default_devices()
    return ProblemInstance(
        model=model,
        client=client,
        server=server,
        network=network,
        memory_cap=DEFAULT_MEMORY_CAP if memory_cap is None else memory_cap,
    )


def objectives_finite(vector: ObjectiveVector) -> bool:
    return all(math.isfinite(v) and v >= 0 for v in vector)

