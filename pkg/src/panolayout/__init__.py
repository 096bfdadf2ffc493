"""360-aware ellipse object-layout engine for equirectangular panoramas."""

from .geometry import (
    EllipseParams,
    PolarCoord,
    SphereCoord,
    UnitVec,
    distance_field,
    ellipse_distance,
    pixel_to_sphere,
    rotate_to_center,
    sphere_to_unitvec,
)
from .layout import (
    LayoutMap,
    ObjectVector,
    SceneLayout,
    composite,
    composite_weight,
    manipulate,
    opacity,
    random_layout,
    split,
)
from .losses import LossWeights, loss_cycle, loss_d, loss_emp, loss_g, loss_recon, loss_total

__all__ = [
    "EllipseParams",
    "PolarCoord",
    "SphereCoord",
    "UnitVec",
    "distance_field",
    "ellipse_distance",
    "pixel_to_sphere",
    "rotate_to_center",
    "sphere_to_unitvec",
    "LayoutMap",
    "ObjectVector",
    "SceneLayout",
    "composite",
    "composite_weight",
    "manipulate",
    "opacity",
    "random_layout",
    "split",
    "LossWeights",
    "loss_cycle",
    "loss_d",
    "loss_emp",
    "loss_g",
    "loss_recon",
    "loss_total",
]

__version__ = "0.1.0"
