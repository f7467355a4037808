"""Latency and energy of a split inference.

Units: memory in bytes, tensor and download sizes in bits, bandwidth and
throughput in Mbps, power in mW, time in s, energy in mJ, frequency in GHz.
Compute time is the assigned memory divided by ``cores * clock_hz``, i.e. one
byte of assigned memory costs one core-cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

from .errors import IndexOutOfRange, InvalidInstance, ValidationError

if TYPE_CHECKING:
    from .problem import ProblemInstance

BITS_PER_MEGABIT = 1_000_000

# Linear throughput-to-power WiFi model constants.
ALPHA_UPLOAD = 283.17  # mW/Mbps
ALPHA_DOWNLOAD = 137.01  # mW/Mbps
BETA_UPLOAD = 132.86  # mW
BETA_DOWNLOAD = 132.86  # mW
CLIENT_POWER_K = 1.172


def _positive(name: str, value, allow_zero: bool = False) -> None:
    numeric = isinstance(value, (int, float)) and not isinstance(value, bool)
    if not numeric or not (value >= 0 if allow_zero else value > 0) or not math.isfinite(value):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValidationError(f"{name} must be {bound}, got {value!r}")


@dataclass(frozen=True)
class DeviceProfile:
    """A compute device. ``freq_ghz`` and ``k`` are only needed for the client."""

    name: str
    cores: int
    clock_hz: float
    freq_ghz: Optional[float] = None
    k: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.cores, bool) or not isinstance(self.cores, int) or self.cores < 1:
            raise ValidationError(f"cores must be an int >= 1, got {self.cores!r}")
        _positive("clock_hz", self.clock_hz)
        if self.freq_ghz is not None:
            _positive("freq_ghz", self.freq_ghz)
        if self.k is not None:
            _positive("k", self.k)

    @property
    def work_rate(self) -> float:
        """Bytes of assigned memory processed per second."""
        return self.cores * self.clock_hz

    @property
    def power_mw(self) -> float:
        """Dynamic power ``k * cores * freq**3``."""
        if self.freq_ghz is None or self.k is None:
            raise InvalidInstance(f"device {self.name!r} has no power model (freq_ghz, k)")
        return self.k * self.cores * self.freq_ghz**3


@dataclass(frozen=True)
class NetworkProfile:
    """Client-server link. Throughputs default to the full bandwidth."""

    bandwidth_mbps: float
    tau_u_mbps: Optional[float] = None
    tau_d_mbps: Optional[float] = None
    alpha_u: float = ALPHA_UPLOAD
    beta_u: float = BETA_UPLOAD
    alpha_d: float = ALPHA_DOWNLOAD
    beta_d: float = BETA_DOWNLOAD
    download_bits: float = 32_000

    def __post_init__(self):
        _positive("bandwidth_mbps", self.bandwidth_mbps)
        if self.tau_u_mbps is None:
            object.__setattr__(self, "tau_u_mbps", self.bandwidth_mbps)
        if self.tau_d_mbps is None:
            object.__setattr__(self, "tau_d_mbps", self.bandwidth_mbps)
        _positive("tau_u_mbps", self.tau_u_mbps)
        _positive("tau_d_mbps", self.tau_d_mbps)
        if self.tau_u_mbps > self.bandwidth_mbps:
            raise ValidationError(f"upload throughput {self.tau_u_mbps} exceeds bandwidth {self.bandwidth_mbps}")
        if self.tau_d_mbps > self.bandwidth_mbps:
            raise ValidationError(f"download throughput {self.tau_d_mbps} exceeds bandwidth {self.bandwidth_mbps}")
        for name in ("alpha_u", "beta_u", "alpha_d", "beta_d", "download_bits"):
            _positive(name, getattr(self, name), allow_zero=True)

    @property
    def upload_power_mw(self) -> float:
        return self.alpha_u * self.tau_u_mbps + self.beta_u

    @property
    def download_power_mw(self) -> float:
        return self.alpha_d * self.tau_d_mbps + self.beta_d

    def transfer_time(self, bits: float) -> float:
        """Seconds to move ``bits`` over the link."""
        return bits / BITS_PER_MEGABIT / self.bandwidth_mbps


@dataclass(frozen=True)
class CostBreakdown:
    t_client: float
    t_upload: float
    t_server: float
    t_download: float
    e_client: float
    e_upload: float
    e_download: float

    @property
    def t_total(self) -> float:
        # download latency is reported but not part of the end-to-end total
        return self.t_client + self.t_upload + self.t_server

    @property
    def e_total(self) -> float:
        return self.e_client + self.e_upload + self.e_download

    def to_dict(self) -> dict[str, float]:
        return {
            "t_client": self.t_client,
            "t_upload": self.t_upload,
            "t_server": self.t_server,
            "t_download": self.t_download,
            "t_total": self.t_total,
            "e_client": self.e_client,
            "e_upload": self.e_upload,
            "e_download": self.e_download,
            "e_total": self.e_total,
        }


def _check_split(instance: ProblemInstance, l1: int) -> None:
    total = instance.model.total_layers
    if not 1 <= l1 <= total - 1:
        raise IndexOutOfRange(f"l1={l1} outside [1, {total - 1}]")


def latency_breakdown(instance: ProblemInstance, l1: int) -> tuple[float, float, float, float]:
    """``(t_client, t_upload, t_server, t_download)`` in seconds."""
    _check_split(instance, l1)
    model, net = instance.model, instance.network
    t_client = model.client_memory(l1) / instance.client.work_rate
    t_server = model.server_memory(model.total_layers - l1) / instance.server.work_rate
    t_upload = net.transfer_time(model.intermediate_size_bits(l1))
    t_download = net.transfer_time(net.download_bits)
    return t_client, t_upload, t_server, t_download


def energy_breakdown(instance: ProblemInstance, l1: int) -> tuple[float, float, float]:
    """``(e_client, e_upload, e_download)`` in mJ."""
    t_client, t_upload, _, t_download = latency_breakdown(instance, l1)
    net = instance.network
    return (
        instance.client.power_mw * t_client,
        net.upload_power_mw * t_upload,
        net.download_power_mw * t_download,
    )


def cost_breakdown(instance: ProblemInstance, l1: int) -> CostBreakdown:
    t_client, t_upload, t_server, t_download = latency_breakdown(instance, l1)
    net = instance.network
    return CostBreakdown(
        t_client=t_client,
        t_upload=t_upload,
        t_server=t_server,
        t_download=t_download,
        e_client=instance.client.power_mw * t_client,
        e_upload=net.upload_power_mw * t_upload,
        e_download=net.download_power_mw * t_download,
    )
