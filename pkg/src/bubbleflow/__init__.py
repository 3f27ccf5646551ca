"""Bubbly-flow image analysis toolkit.

Quantitative pipeline for gas-liquid two-phase flow imagery: image
correspondence metrics, physical parameter extraction from bubble
annotations, empirical-correlation baselines, a desk-scale conditional
adversarial trainer, generative-quality metrics, a procedural fixture
renderer, and a relative-error comparison harness.
"""

from . import (
    core,
    correlations,
    gan,
    gen_metrics,
    harness,
    image_metrics,
    synth,
    twophase,
)
from .core import (
    AnnotationSet,
    BubbleBox,
    BubbleEllipsoid,
    ConditionRecord,
    FlowCondition,
    GrayImage,
    PipeGeometry,
    box_to_ellipsoid,
    load_annotations,
    load_gray_image,
    parse_manifest,
    save_annotations,
    save_gray_image,
)

__version__ = "0.1.0"
