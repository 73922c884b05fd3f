"""Semantic-map scene synthesis toolkit.

Categorical diffusion over top-down semantic maps, per-instance attribute
prediction, scene assembly, and the plausibility metric suite, backed by the
C++ core in ``semscene._core``.
"""

from semscene._core import (  # noqa: F401
    CheckpointError,
    ConfigError,
    DataError,
    NoiseSchedule,
    argmax_map,
    assemble,
    build_dataset,
    build_schedule,
    ckl,
    connected_components,
    evaluate,
    extract,
    extract_instances,
    forward_marginal,
    generate,
    kl_categorical,
    one_hot,
    palette_colors,
    palette_names,
    posterior,
    sample_from,
    scene_metrics,
    train_apm,
    train_denoiser,
)

__all__ = [
    "CheckpointError",
    "ConfigError",
    "DataError",
    "NoiseSchedule",
    "argmax_map",
    "assemble",
    "build_dataset",
    "build_schedule",
    "ckl",
    "connected_components",
    "evaluate",
    "extract",
    "extract_instances",
    "forward_marginal",
    "generate",
    "kl_categorical",
    "one_hot",
    "palette_colors",
    "palette_names",
    "posterior",
    "sample_from",
    "scene_metrics",
    "train_apm",
    "train_denoiser",
]
