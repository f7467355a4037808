"""CNN architecture profiles: shape inference and per-layer memory accounting.

A profile is an ordered list of layers. Split index ``l1`` means layers
``1..l1`` run on the client and ``l1+1..L`` on the server. Memory for a
set of layers is the sum of parameter bytes and output-activation bytes
of those layers; the intermediate tensor is the raw activation leaving
layer ``l1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from itertools import accumulate
from pathlib import Path
from typing import Any, Optional

from .errors import IndexOutOfRange, ParseError, ShapeMismatch, ValidationError

BUNDLED_PROFILES = ("alexnet", "vgg11", "vgg13", "vgg16", "mobilenetv2")


class LayerKind(str, Enum):
    CONV2D = "conv2d"
    MAXPOOL2D = "maxpool2d"
    AVGPOOL2D = "avgpool2d"
    ADAPTIVEAVGPOOL2D = "adaptiveavgpool2d"
    RELU = "relu"
    DROPOUT = "dropout"
    LINEAR = "linear"
    FLATTEN = "flatten"
    BLOCK = "block"


# optional fields each kind accepts; anything else must be None
_REQUIRED = {
    LayerKind.CONV2D: {"kernel", "in_channels", "out_channels"},
    LayerKind.MAXPOOL2D: {"kernel"},
    LayerKind.AVGPOOL2D: {"kernel"},
    LayerKind.ADAPTIVEAVGPOOL2D: {"output_size"},
    LayerKind.RELU: set(),
    LayerKind.DROPOUT: set(),
    LayerKind.LINEAR: {"in_features", "out_features"},
    LayerKind.FLATTEN: set(),
    LayerKind.BLOCK: {"block_param_count", "block_out_shape"},
}
_SPATIAL = {"stride", "padding"}
_ALLOWED = {
    kind: req | (_SPATIAL if kind in (LayerKind.CONV2D, LayerKind.MAXPOOL2D, LayerKind.AVGPOOL2D) else set())
    for kind, req in _REQUIRED.items()
}
_OPTIONAL_FIELDS = (
    "kernel",
    "stride",
    "padding",
    "in_channels",
    "out_channels",
    "in_features",
    "out_features",
    "output_size",
    "block_param_count",
    "block_out_shape",
)


@dataclass(frozen=True)
class TensorShape:
    """Activation shape, either ``(channels, height, width)`` or ``(features,)``."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(self.dims)
        if not dims or any(not isinstance(d, int) or isinstance(d, bool) or d <= 0 for d in dims):
            raise ShapeMismatch(f"tensor dims must be positive ints, got {self.dims!r}")
        object.__setattr__(self, "dims", dims)

    @property
    def elements(self) -> int:
        return math.prod(self.dims)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    def __str__(self):
        return "x".join(map(str, self.dims))


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a sequential CNN.

    Pooling layers default their stride to the kernel size, conv layers to 1.
    ``output_size`` is the square target of an adaptive average pool.
    """

    kind: LayerKind
    kernel: Optional[int] = None
    stride: Optional[int] = None
    padding: Optional[int] = None
    in_channels: Optional[int] = None
    out_channels: Optional[int] = None
    in_features: Optional[int] = None
    out_features: Optional[int] = None
    output_size: Optional[int] = None
    block_param_count: Optional[int] = None
    block_out_shape: Optional[TensorShape] = None

    def __post_init__(self):
        try:
            kind = LayerKind(self.kind)
        except ValueError:
            raise ValidationError(f"unknown layer kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)

        present = {name for name in _OPTIONAL_FIELDS if getattr(self, name) is not None}
        missing = _REQUIRED[kind] - present
        if missing:
            raise ValidationError(f"{kind.value} layer missing {sorted(missing)}")
        extra = present - _ALLOWED[kind]
        if extra:
            raise ValidationError(f"{kind.value} layer does not take {sorted(extra)}")

        if kind in (LayerKind.CONV2D, LayerKind.MAXPOOL2D, LayerKind.AVGPOOL2D):
            if self.stride is None:
                object.__setattr__(self, "stride", 1 if kind is LayerKind.CONV2D else self.kernel)
            if self.padding is None:
                object.__setattr__(self, "padding", 0)

        if self.block_out_shape is not None and not isinstance(self.block_out_shape, TensorShape):
            object.__setattr__(self, "block_out_shape", TensorShape(tuple(self.block_out_shape)))

        for name in _OPTIONAL_FIELDS:
            value = getattr(self, name)
            if value is None or name == "block_out_shape":
                continue
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValidationError(f"{kind.value}.{name} must be an int, got {value!r}")
            if name == "padding":
                if value < 0:
                    raise ValidationError(f"{kind.value}.padding must be >= 0, got {value}")
            elif value <= 0:
                raise ValidationError(f"{kind.value}.{name} must be > 0, got {value}")

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "LayerSpec":
        if not isinstance(doc, dict) or "kind" not in doc:
            raise ParseError(f"layer entry must be an object with a 'kind', got {doc!r}")
        unknown = set(doc) - {"kind", *_OPTIONAL_FIELDS}
        if unknown:
            raise ParseError(f"unknown layer keys {sorted(unknown)}")
        fields = dict(doc)
        if fields.get("block_out_shape") is not None:
            if not isinstance(fields["block_out_shape"], list):
                raise ParseError("block_out_shape must be a list")
            fields["block_out_shape"] = TensorShape(tuple(fields["block_out_shape"]))
        return cls(**fields)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind.value}
        for name in _OPTIONAL_FIELDS:
            value = getattr(self, name)
            if value is not None:
                doc[name] = list(value.dims) if isinstance(value, TensorShape) else value
        return doc


@dataclass(frozen=True)
class LayerCost:
    param_count: int
    activation_elements: int
    param_bytes: int
    activation_bytes: int

    @property
    def total_bytes(self) -> int:
        return self.param_bytes + self.activation_bytes


def _window(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def infer_shape(layer: LayerSpec, in_shape: TensorShape) -> TensorShape:
    """Output shape of ``layer`` applied to ``in_shape``.

    A linear layer also accepts a 3-D input whose element count equals
    ``in_features``: sequential classifiers flatten implicitly before the
    first fully connected layer.
    """
    kind = layer.kind
    if kind in (LayerKind.RELU, LayerKind.DROPOUT):
        return in_shape
    if kind is LayerKind.FLATTEN:
        return TensorShape((in_shape.elements,))
    if kind is LayerKind.BLOCK:
        return layer.block_out_shape
    if kind is LayerKind.LINEAR:
        if in_shape.elements != layer.in_features:
            raise ShapeMismatch(f"linear expects {layer.in_features} features, got {in_shape}")
        return TensorShape((layer.out_features,))

    if in_shape.ndim != 3:
        raise ShapeMismatch(f"{kind.value} needs a 3-D input, got {in_shape}")
    channels, height, width = in_shape.dims
    if kind is LayerKind.ADAPTIVEAVGPOOL2D:
        return TensorShape((channels, layer.output_size, layer.output_size))
    if kind is LayerKind.CONV2D:
        if channels != layer.in_channels:
            raise ShapeMismatch(f"conv2d expects {layer.in_channels} channels, got {in_shape}")
        channels = layer.out_channels
    out_h = _window(height, layer.kernel, layer.stride, layer.padding)
    out_w = _window(width, layer.kernel, layer.stride, layer.padding)
    if out_h <= 0 or out_w <= 0:
        raise ShapeMismatch(f"{kind.value} with kernel {layer.kernel} collapses {in_shape}")
    return TensorShape((channels, out_h, out_w))


def param_count(layer: LayerSpec) -> int:
    if layer.kind is LayerKind.CONV2D:
        return (layer.kernel * layer.kernel * layer.in_channels + 1) * layer.out_channels
    if layer.kind is LayerKind.LINEAR:
        return (layer.in_features + 1) * layer.out_features
    if layer.kind is LayerKind.BLOCK:
        return layer.block_param_count
    return 0


def layer_cost(layer: LayerSpec, in_shape: TensorShape, bytes_per_element: int = 4) -> LayerCost:
    out = infer_shape(layer, in_shape)
    params = param_count(layer)
    return LayerCost(
        param_count=params,
        activation_elements=out.elements,
        param_bytes=params * bytes_per_element,
        activation_bytes=out.elements * bytes_per_element,
    )


@dataclass(frozen=True)
class ModelProfile:
    """A shape-inferred CNN. Immutable once built.

    ``shapes[i]`` is the output of layer ``i + 1`` (1-based layer numbering in
    every public method); ``costs`` follows the same indexing.
    """

    name: str
    input_shape: TensorShape
    layers: tuple[LayerSpec, ...]
    bytes_per_element: int = 4
    shapes: tuple[TensorShape, ...] = field(init=False, repr=False)
    costs: tuple[LayerCost, ...] = field(init=False, repr=False)
    _prefix: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.input_shape, TensorShape):
            object.__setattr__(self, "input_shape", TensorShape(tuple(self.input_shape)))
        object.__setattr__(self, "layers", tuple(self.layers))
        bpe = self.bytes_per_element
        if not isinstance(bpe, int) or isinstance(bpe, bool) or bpe <= 0:
            raise ValidationError(f"bytes_per_element must be a positive int, got {bpe!r}")
        if len(self.layers) < 2:
            raise ValidationError(f"a profile needs at least 2 layers, got {len(self.layers)}")

        shapes, costs = [], []
        shape = self.input_shape
        for index, layer in enumerate(self.layers, start=1):
            try:
                cost = layer_cost(layer, shape, bpe)
                shape = infer_shape(layer, shape)
            except ShapeMismatch as exc:
                raise ShapeMismatch(f"{self.name} layer {index}: {exc}") from None
            shapes.append(shape)
            costs.append(cost)
        object.__setattr__(self, "shapes", tuple(shapes))
        object.__setattr__(self, "costs", tuple(costs))
        object.__setattr__(self, "_prefix", (0, *accumulate(c.total_bytes for c in costs)))

    @property
    def total_layers(self) -> int:
        return len(self.layers)

    def client_memory(self, l1: int) -> int:
        """Bytes held by the first ``l1`` layers (parameters + activations)."""
        if not 0 <= l1 <= self.total_layers:
            raise IndexOutOfRange(f"l1={l1} outside [0, {self.total_layers}]")
        return self._prefix[l1]

    def server_memory(self, l2: int) -> int:
        """Bytes held by the last ``l2`` layers."""
        if not 0 <= l2 <= self.total_layers:
            raise IndexOutOfRange(f"l2={l2} outside [0, {self.total_layers}]")
        return self._prefix[-1] - self._prefix[self.total_layers - l2]

    def intermediate_size_bits(self, l1: int) -> int:
        """Size in bits of the activation uploaded after ``l1`` client layers."""
        if not 1 <= l1 <= self.total_layers - 1:
            raise IndexOutOfRange(f"l1={l1} outside [1, {self.total_layers - 1}]")
        return self.costs[l1 - 1].activation_bytes * 8

    def input_size_bits(self) -> int:
        return self.input_shape.elements * self.bytes_per_element * 8

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "bytes_per_element": self.bytes_per_element,
            "input_shape": list(self.input_shape.dims),
            "layers": [layer.to_dict() for layer in self.layers],
        }


def client_memory(profile: ModelProfile, l1: int) -> int:
    return profile.client_memory(l1)


def server_memory(profile: ModelProfile, l2: int) -> int:
    return profile.server_memory(l2)


def intermediate_size_bits(profile: ModelProfile, l1: int) -> int:
    return profile.intermediate_size_bits(l1)


def load_profile(document: dict[str, Any]) -> ModelProfile:
    """Build a profile from its JSON-shaped description.

    Raises ParseError for structurally bad documents, ShapeMismatch when the
    layer chain does not compose and ValidationError for invariant breaks.
    """
    if not isinstance(document, dict):
        raise ParseError("profile document must be an object")
    for key in ("name", "input_shape", "layers"):
        if key not in document:
            raise ParseError(f"profile document missing {key!r}")
    if not isinstance(document["layers"], list) or not isinstance(document["input_shape"], list):
        raise ParseError("'layers' and 'input_shape' must be lists")
    layers = [LayerSpec.from_dict(entry) for entry in document["layers"]]
    return ModelProfile(
        name=str(document["name"]),
        input_shape=TensorShape(tuple(document["input_shape"])),
        layers=tuple(layers),
        bytes_per_element=document.get("bytes_per_element", 4),
    )


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def load_profile_file(path: str | Path) -> ModelProfile:
    return load_profile(read_json(path))


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("splitplan") / "data" / f"{name}.json"))


def bundled_profile(name: str) -> ModelProfile:
    if name not in BUNDLED_PROFILES:
        raise ValueError(f"no bundled profile {name!r}; choose from {BUNDLED_PROFILES}")
    return load_profile_file(bundled_path(name))
