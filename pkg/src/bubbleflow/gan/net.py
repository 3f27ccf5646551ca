"""Tiny fully-connected networks on flat parameter vectors.

Both the generator and the discriminator are small multilayer perceptrons
with leaky-ReLU hidden activations. Parameters live in one flat float64
vector (plus a shape schema) so optimizer state, checkpoints, and
finite-difference checks all operate on a single array. The backward pass
is written out analytically and returns both the parameter gradient and the
gradient with respect to the network input, which lets losses chain through
discriminator and feature extractor into the generator.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ForwardCache",
    "NetSpec",
    "ParamBundle",
    "backward",
    "disc_forward",
    "forward",
    "gen_forward",
    "init_params",
    "layer_shapes",
    "param_count",
    "sigmoid",
]

PROB_EPS = 1e-7  # discriminator outputs are clamped to [eps, 1-eps]


@dataclass(frozen=True)
class NetSpec:
    """MLP architecture: layer_sizes includes input and output widths."""

    layer_sizes: tuple[int, ...]
    leaky_slope: float = 0.2
    output: str = "linear"  # "linear" | "sigmoid"

    def __post_init__(self) -> None:
        if len(self.layer_sizes) < 3:
            raise ValueError("need at least one hidden layer")
        if any(s < 1 for s in self.layer_sizes):
            raise ValueError("all layer sizes must be >= 1")
        if self.output not in ("linear", "sigmoid"):
            raise ValueError("output must be 'linear' or 'sigmoid'")
        object.__setattr__(self, "layer_sizes", tuple(int(s) for s in self.layer_sizes))

    @property
    def n_in(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_out(self) -> int:
        return self.layer_sizes[-1]


def layer_shapes(spec: NetSpec) -> list[tuple[tuple[int, int], tuple[int]]]:
    sizes = spec.layer_sizes
    return [((sizes[i], sizes[i + 1]), (sizes[i + 1],)) for i in range(len(sizes) - 1)]


def param_count(spec: NetSpec) -> int:
    return sum(w[0] * w[1] + b[0] for w, b in layer_shapes(spec))


@dataclass
class ParamBundle:
    """Flat float64 weight/bias vector plus its architecture schema."""

    values: np.ndarray
    spec: NetSpec

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64).ravel()
        expected = param_count(self.spec)
        if self.values.size != expected:
            raise ValueError(
                f"parameter vector has {self.values.size} entries, schema needs {expected}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("parameters must be finite")

    def layers(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """(W, b) views into the flat vector; mutating them mutates values."""
        out = []
        offset = 0
        for (wi, wo), (bo,) in layer_shapes(self.spec):
            w = self.values[offset : offset + wi * wo].reshape(wi, wo)
            offset += wi * wo
            b = self.values[offset : offset + bo]
            offset += bo
            out.append((w, b))
        return out

    def copy(self) -> "ParamBundle":
        return replace(self, values=self.values.copy())


def init_params(spec: NetSpec, rng: np.random.Generator, gain: float = 1.0) -> ParamBundle:
    """He-style init scaled for the leaky slope; biases start at zero."""
    values = np.empty(param_count(spec), dtype=np.float64)
    offset = 0
    for (wi, wo), (bo,) in layer_shapes(spec):
        std = gain * np.sqrt(2.0 / (wi * (1.0 + spec.leaky_slope**2)))
        values[offset : offset + wi * wo] = std * rng.standard_normal(wi * wo)
        offset += wi * wo
        values[offset : offset + bo] = 0.0
        offset += bo
    return ParamBundle(values=values, spec=spec)


def sigmoid(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t, dtype=np.float64)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


@dataclass
class ForwardCache:
    """Intermediates needed by backward(): layer inputs and pre-activations."""

    inputs: list[np.ndarray]  # activation entering each layer
    pre: list[np.ndarray]  # pre-activation of each layer
    logits: np.ndarray  # final pre-squash output


def forward(params: ParamBundle, x: np.ndarray, want_cache: bool = False):
    """Batch forward pass. x is (batch, n_in); returns pre-squash logits
    (batch, n_out), optionally with the cache for backward()."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.spec.n_in:
        raise ValueError(
            f"input shape {x.shape} does not match n_in={params.spec.n_in}"
        )
    layers = params.layers()
    inputs, pre = [], []
    h = x
    slope = params.spec.leaky_slope
    for li, (w, b) in enumerate(layers):
        inputs.append(h)
        z = h @ w + b
        pre.append(z)
        if li < len(layers) - 1:
            h = np.where(z > 0, z, slope * z)
        else:
            h = z
    if want_cache:
        return h, ForwardCache(inputs=inputs, pre=pre, logits=h)
    return h


def backward(
    params: ParamBundle, cache: ForwardCache, delta_out: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Backpropagate dLoss/dlogits through the net.

    Returns (flat parameter gradient, dLoss/dinput). delta_out must be the
    gradient with respect to the pre-squash output, shape (batch, n_out).
    """
    layers = params.layers()
    slope = params.spec.leaky_slope
    grad = np.zeros_like(params.values)
    grad_bundle = ParamBundle(values=grad, spec=params.spec)
    grad_layers = grad_bundle.layers()

    delta = np.asarray(delta_out, dtype=np.float64)
    for li in range(len(layers) - 1, -1, -1):
        w, _ = layers[li]
        gw, gb = grad_layers[li]
        if li < len(layers) - 1:  # hidden layer: undo the leaky ReLU
            delta = delta * np.where(cache.pre[li] > 0, 1.0, slope)
        gw += cache.inputs[li].T @ delta
        gb += delta.sum(axis=0)
        delta = delta @ w.T
    return grad_bundle.values, delta


def gen_forward(params: ParamBundle, z: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Generator sample from noise z (batch, dz) and condition c (batch, dc).

    The condition enters by concatenation. Output is squashed per the spec's
    output mode (sigmoid for image intensities, linear for vector targets).
    """
    x = np.concatenate([np.atleast_2d(z), np.atleast_2d(c)], axis=1)
    logits = forward(params, x)
    if params.spec.output == "sigmoid":
        return sigmoid(logits)
    return logits


def disc_forward(params: ParamBundle, x: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Discriminator probability in (0, 1) for samples x under conditions c.

    Clamped to [PROB_EPS, 1 - PROB_EPS] so downstream logs stay finite.
    """
    if params.spec.output != "sigmoid":
        raise ValueError("discriminator spec must use sigmoid output")
    inp = np.concatenate([np.atleast_2d(x), np.atleast_2d(c)], axis=1)
    logits = forward(params, inp)
    return np.clip(sigmoid(logits), PROB_EPS, 1.0 - PROB_EPS)
