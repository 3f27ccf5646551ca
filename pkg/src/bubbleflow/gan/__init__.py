"""Desk-scale conditional adversarial trainer: tiny MLP generator and
discriminator, mismatch and feature losses with analytic gradients, Adam
updates, and canned experiments."""

from .experiments import (
    Gaussian3DSource,
    SynthImageSource,
    default_conditions,
    run_gaussian_cloud,
    sample_generator,
)
from .losses import (
    FeatureExtractor,
    IdentityFeatures,
    RandomFeatures,
    disc_loss_and_grad,
    false_condition_terms,
    feature_loss,
    gen_loss_and_grad,
    loss_d,
    loss_d_mismatch,
    loss_g,
)
from .net import (
    NetSpec,
    ParamBundle,
    disc_forward,
    forward,
    gen_forward,
    init_params,
    param_count,
)
from .train import (
    Adam,
    TrainConfig,
    TrainResult,
    TrainingDiverged,
    load_checkpoint,
    sample_false_conditions,
    save_checkpoint,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]
