"""Adversarial and feature losses, with analytic gradients.

Two layers of API live here. The probability-space functions (loss_g,
loss_d, loss_d_mismatch, feature_loss) are the quantities the trainer
reports and tests assert against; they take discriminator outputs in (0, 1).
The *_loss_and_grad compositions recompute the same losses from parameters
through the networks, in logit space for numerical stability, and return
flat gradients for the optimizer and for finite-difference verification.

The mismatch objective extends the plain conditional discriminator loss
with two extra terms that push samples paired with deliberately wrong
conditions toward the fake class.
"""

from __future__ import annotations

import numpy as np

from .net import NetSpec, ParamBundle, backward, forward, init_params, sigmoid

__all__ = [
    "FeatureExtractor",
    "IdentityFeatures",
    "RandomFeatures",
    "disc_loss_and_grad",
    "false_condition_terms",
    "feature_loss",
    "gen_loss_and_grad",
    "loss_d",
    "loss_d_mismatch",
    "loss_g",
]


def _check_probs(name: str, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise ValueError(f"{name} must lie strictly inside (0, 1)")
    return p


def loss_g(d_on_fake: np.ndarray) -> float:
    """Nonsaturating generator loss: mean of -log D(G(z, c))."""
    p = _check_probs("d_on_fake", d_on_fake)
    return float(np.mean(-np.log(p)))


def loss_d(d_real: np.ndarray, d_fake: np.ndarray) -> float:
    """Plain conditional discriminator loss
    -mean[log D(x, c)] - mean[log(1 - D(G(z, c), c))]."""
    pr = _check_probs("d_real", d_real)
    pf = _check_probs("d_fake", d_fake)
    return float(np.mean(-np.log(pr)) + np.mean(-np.log1p(-pf)))


def false_condition_terms(d_real_false: np.ndarray, d_fake_false: np.ndarray) -> float:
    """The two wrong-condition penalty terms:
    -mean[log(1 - D(x, c_f))] - mean[log(1 - D(G(z, c_t)), c_f))]."""
    prf = _check_probs("d_real_false", d_real_false)
    pff = _check_probs("d_fake_false", d_fake_false)
    return float(np.mean(-np.log1p(-prf)) + np.mean(-np.log1p(-pff)))


def loss_d_mismatch(
    d_real_true: np.ndarray,
    d_real_false: np.ndarray,
    d_fake_true: np.ndarray,
    d_fake_false: np.ndarray,
) -> float:
    """Discriminator loss with mismatch terms: the plain conditional loss on
    true conditions plus the false-condition penalties. Drops term-by-term
    to loss_d when the false-condition terms are removed."""
    return loss_d(d_real_true, d_fake_true) + false_condition_terms(
        d_real_false, d_fake_false
    )


class FeatureExtractor:
    """Deterministic map from samples to feature vectors, with a backward
    pass so losses can chain through it. Subclasses are frozen: they hold no
    trainable state."""

    dim_out: int

    def features(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, x: np.ndarray, d_features: np.ndarray) -> np.ndarray:
        """Return dLoss/dx given dLoss/dfeatures at input x."""
        raise NotImplementedError


class IdentityFeatures(FeatureExtractor):
    def __init__(self, dim: int):
        self.dim_out = dim

    def features(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64)

    def backward(self, x: np.ndarray, d_features: np.ndarray) -> np.ndarray:
        return np.asarray(d_features, dtype=np.float64)


class RandomFeatures(FeatureExtractor):
    """Fixed-seed random MLP feature stack (leaky-ReLU hidden layers, linear
    head). Random features preserve distances in expectation, which is all
    the feature loss needs at this scale; a pretrained perceptual network
    can be slotted in through the same interface."""

    def __init__(self, dim_in: int, dim_out: int, hidden: int = 32, seed: int = 7):
        spec = NetSpec(layer_sizes=(dim_in, hidden, dim_out), output="linear")
        self._params = init_params(spec, np.random.default_rng(seed))
        self.dim_out = dim_out

    def features(self, x: np.ndarray) -> np.ndarray:
        return forward(self._params, np.atleast_2d(x))

    def backward(self, x: np.ndarray, d_features: np.ndarray) -> np.ndarray:
        _, cache = forward(self._params, np.atleast_2d(x), want_cache=True)
        _, d_input = backward(self._params, cache, d_features)
        return d_input


def feature_loss(
    extractor: FeatureExtractor, x_real: np.ndarray, x_fake: np.ndarray
) -> float:
    """Sum of the L1 and squared-L2 feature distances, each averaged over
    the batch: mean ||F(x) - F(x_hat)||_1 + mean ||F(x) - F(x_hat)||_2^2."""
    fr = extractor.features(np.atleast_2d(x_real))
    ff = extractor.features(np.atleast_2d(x_fake))
    if fr.shape != ff.shape:
        raise ValueError(f"feature shapes differ: {fr.shape} vs {ff.shape}")
    diff = fr - ff
    l1 = float(np.mean(np.sum(np.abs(diff), axis=1)))
    l2 = float(np.mean(np.sum(diff * diff, axis=1)))
    return l1 + l2


# ---------------------------------------------------------------------------
# Differentiable compositions (logit-space, finite-difference checkable)
# ---------------------------------------------------------------------------


def _softplus(t: np.ndarray) -> np.ndarray:
    return np.log1p(np.exp(-np.abs(t))) + np.maximum(t, 0.0)


def _concat(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.concatenate([np.atleast_2d(x), np.atleast_2d(c)], axis=1)


def _d_term(
    d_params: ParamBundle, x: np.ndarray, c: np.ndarray, real: bool
) -> tuple[float, np.ndarray, np.ndarray]:
    """One discriminator loss term and its gradients.

    real=True contributes -mean log sigma(t) (label: real); real=False
    contributes -mean log(1 - sigma(t)). Returns (loss, d_param_grad,
    dLoss/dx for the sample columns).
    """
    inp = _concat(x, c)
    logits, cache = forward(d_params, inp, want_cache=True)
    n = logits.shape[0]
    if real:
        loss = float(np.mean(_softplus(-logits)))
        delta = (sigmoid(logits) - 1.0) / n
    else:
        loss = float(np.mean(_softplus(logits)))
        delta = sigmoid(logits) / n
    grad, d_input = backward(d_params, cache, delta)
    d_x = d_input[:, : np.atleast_2d(x).shape[1]]
    return loss, grad, d_x


def disc_loss_and_grad(
    d_params: ParamBundle,
    x_real: np.ndarray,
    x_fake: np.ndarray,
    c_t: np.ndarray,
    c_f: np.ndarray | None = None,
    mismatch: bool = True,
) -> tuple[float, np.ndarray]:
    """Discriminator loss (mismatch variant by default) and its analytic
    gradient with respect to the discriminator parameters. Fake samples are
    treated as constants: no gradient flows back to the generator here."""
    if mismatch and c_f is None:
        raise ValueError("mismatch loss requires false conditions c_f")
    loss, grad, _ = _d_term(d_params, x_real, c_t, real=True)
    l2, g2, _ = _d_term(d_params, x_fake, c_t, real=False)
    loss, grad = loss + l2, grad + g2
    if mismatch:
        l3, g3, _ = _d_term(d_params, x_real, c_f, real=False)
        l4, g4, _ = _d_term(d_params, x_fake, c_f, real=False)
        loss, grad = loss + l3 + l4, grad + g3 + g4
    return loss, grad


def _gen_pass(
    g_params: ParamBundle, z: np.ndarray, c: np.ndarray
) -> tuple[np.ndarray, object]:
    logits, cache = forward(g_params, _concat(z, c), want_cache=True)
    if g_params.spec.output == "sigmoid":
        return sigmoid(logits), cache
    return logits, cache


def _gen_backprop(
    g_params: ParamBundle, cache, x_hat: np.ndarray, d_xhat: np.ndarray
) -> np.ndarray:
    if g_params.spec.output == "sigmoid":
        d_logits = d_xhat * x_hat * (1.0 - x_hat)
    else:
        d_logits = d_xhat
    grad, _ = backward(g_params, cache, d_logits)
    return grad


def gen_loss_and_grad(
    g_params: ParamBundle,
    d_params: ParamBundle,
    z: np.ndarray,
    c_t: np.ndarray,
    x_real: np.ndarray | None = None,
    extractor: FeatureExtractor | None = None,
    feature_weight: float = 1.0,
    c_f: np.ndarray | None = None,
) -> tuple[float, np.ndarray, dict[str, float]]:
    """Generator total loss (adversarial + weighted feature loss) and its
    analytic gradient with respect to the generator parameters.

    Passing c_f switches in the alternative objective whose generator
    expectation also covers samples produced under false conditions; the
    default follows the alternating-update recipe that only uses c_t.
    Returns (total, grad, parts) with parts = {"g": ..., "feature": ...}.
    """
    x_hat, cache = _gen_pass(g_params, z, c_t)
    n = x_hat.shape[0]

    t, d_cache = forward(d_params, _concat(x_hat, c_t), want_cache=True)
    adv = float(np.mean(_softplus(-t)))
    _, d_input = backward(d_params, d_cache, (sigmoid(t) - 1.0) / n)
    d_xhat = d_input[:, : x_hat.shape[1]]

    parts = {"g": adv, "feature": 0.0}
    if extractor is not None and feature_weight != 0.0:
        if x_real is None:
            raise ValueError("feature loss requires real samples")
        fr = extractor.features(np.atleast_2d(x_real))
        ff = extractor.features(x_hat)
        if fr.shape != ff.shape:
            raise ValueError(f"feature shapes differ: {fr.shape} vs {ff.shape}")
        diff = ff - fr
        feat = float(np.mean(np.sum(np.abs(diff), axis=1)) + np.mean(np.sum(diff**2, axis=1)))
        parts["feature"] = feat
        d_feat = (np.sign(diff) + 2.0 * diff) / n
        d_xhat = d_xhat + feature_weight * extractor.backward(x_hat, d_feat)

    grad = _gen_backprop(g_params, cache, x_hat, d_xhat)

    if c_f is not None:
        x_hat_f, cache_f = _gen_pass(g_params, z, c_f)
        t_f, d_cache_f = forward(d_params, _concat(x_hat_f, c_f), want_cache=True)
        adv_f = float(np.mean(_softplus(-t_f)))
        parts["g"] = adv + adv_f
        _, d_input_f = backward(d_params, d_cache_f, (sigmoid(t_f) - 1.0) / n)
        grad = grad + _gen_backprop(
            g_params, cache_f, x_hat_f, d_input_f[:, : x_hat_f.shape[1]]
        )

    total = parts["g"] + feature_weight * parts["feature"]
    return total, grad, parts
