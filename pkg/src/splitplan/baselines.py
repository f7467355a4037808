"""Single-rule split strategies used for comparison.

* LBO: latency-optimal split
* EBO: energy-optimal split
* COS: whole network on the client
* COC: whole network on the server, raw input uploaded
* RS: uniformly random split

COS and COC sit outside the feasible split range (one side holds no
layers); their results carry ``outside_feasible=True``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .cost import CostBreakdown, cost_breakdown
from .errors import InvalidInstance, NoFeasibleSolution
from .problem import ObjectiveVector, ProblemInstance, evaluate, is_feasible


class BaselineKind(str, Enum):
    LBO = "LBO"
    EBO = "EBO"
    COS = "COS"
    COC = "COC"
    RS = "RS"


@dataclass(frozen=True)
class BaselineResult:
    kind: BaselineKind
    l1: int
    l2: int
    objectives: ObjectiveVector
    breakdown: CostBreakdown
    outside_feasible: bool = False


def all_on_client(instance: ProblemInstance) -> CostBreakdown:
    model, client = instance.model, instance.client
    t_client = model.client_memory(model.total_layers) / client.work_rate
    return CostBreakdown(
        t_client=t_client,
        t_upload=0.0,
        t_server=0.0,
        t_download=0.0,
        e_client=client.power_mw * t_client,
        e_upload=0.0,
        e_download=0.0,
    )


def all_on_server(instance: ProblemInstance) -> CostBreakdown:
    model, net = instance.model, instance.network
    t_upload = net.transfer_time(model.input_size_bits())
    t_download = net.transfer_time(net.download_bits)
    return CostBreakdown(
        t_client=0.0,
        t_upload=t_upload,
        t_server=model.server_memory(model.total_layers) / instance.server.work_rate,
        t_download=t_download,
        e_client=0.0,
        e_upload=net.upload_power_mw * t_upload,
        e_download=net.download_power_mw * t_download,
    )


def _edge_result(kind: BaselineKind, instance: ProblemInstance, l1: int, costs: CostBreakdown) -> BaselineResult:
    objectives = ObjectiveVector(costs.t_total, costs.e_total, instance.model.client_memory(l1))
    return BaselineResult(kind, l1, instance.total_layers - l1, objectives, costs, outside_feasible=True)


def _split_result(kind: BaselineKind, instance: ProblemInstance, l1: int) -> BaselineResult:
    return BaselineResult(
        kind, l1, instance.total_layers - l1, evaluate(instance, instance.candidate(l1)), cost_breakdown(instance, l1)
    )


def _argmin(instance: ProblemInstance, objective: int) -> int:
    best = None
    for l1 in range(1, instance.total_layers):
        if not is_feasible(instance, l1):
            continue
        value = evaluate(instance, instance.candidate(l1))[objective]
        if best is None or value < best[0]:
            best = (value, l1)
    if best is None:
        raise NoFeasibleSolution("no split satisfies the memory cap")
    return best[1]


def random_split(total_layers: int, seed: int) -> int:
    rng = np.random.Generator(np.random.PCG64(seed))
    return int(rng.integers(1, total_layers))


def run_baseline(kind: BaselineKind | str, instance: ProblemInstance, seed: int = 0) -> BaselineResult:
    kind = BaselineKind(kind)
    total = instance.total_layers
    if total < 2:
        raise InvalidInstance("model needs at least 2 layers")
    if kind is BaselineKind.LBO:
        return _split_result(kind, instance, _argmin(instance, 0))
    if kind is BaselineKind.EBO:
        return _split_result(kind, instance, _argmin(instance, 1))
    if kind is BaselineKind.COS:
        return _edge_result(kind, instance, total, all_on_client(instance))
    if kind is BaselineKind.COC:
        return _edge_result(kind, instance, 0, all_on_server(instance))
    return _split_result(kind, instance, random_split(total, seed))
