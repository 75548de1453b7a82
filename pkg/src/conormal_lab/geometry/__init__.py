"""Model geometries with exact geodesic flows."""

from .base import ManifoldModel, PhasePoint, TangentPerturbation, jacobi_propagator
from .flat import FlatTorus
from .hyperbolic import HyperbolicSurface
from .sphere import RoundSphere

PRESETS = {
    "torus2": lambda: FlatTorus(2),
    "sphere2": lambda: RoundSphere(2),
    "bolza": HyperbolicSurface.bolza,
    "hyperbolic-plane": HyperbolicSurface.plane,
}


def model_from_config(block):
    """Build a model from ``{"kind": ..., "dim": ..., "generators"|"preset": ...}``."""
    from ..exceptions import ConfigInvalid

    if not isinstance(block, dict):
        raise ConfigInvalid("model block must be an object")
    if "preset" in block and "kind" not in block:
        name = block["preset"]
        if name not in PRESETS:
            raise ConfigInvalid(f"unknown model preset '{name}'")
        return PRESETS[name]()
    kind = block.get("kind")
    if kind is None:
        raise ConfigInvalid("missing required field 'kind' in model")
    try:
        if kind == "torus":
            return FlatTorus(int(block.get("dim", 2)))
        if kind == "sphere":
            return RoundSphere(int(block.get("dim", 2)))
        if kind == "hyperbolic":
            if block.get("preset") == "bolza":
                return HyperbolicSurface.bolza()
            if block.get("preset") == "plane":
                return HyperbolicSurface.plane()
            if "generators" not in block and "preset" not in block:
                raise ConfigInvalid("hyperbolic model needs 'generators' or 'preset'")
            if "preset" in block:
                raise ConfigInvalid(f"unknown hyperbolic preset '{block['preset']}'")
            return HyperbolicSurface(block["generators"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(f"invalid model block: {exc}") from exc
    raise ConfigInvalid(f"unknown model kind '{kind}'")


__all__ = [
    "FlatTorus",
    "HyperbolicSurface",
    "ManifoldModel",
    "PhasePoint",
    "PRESETS",
    "RoundSphere",
    "TangentPerturbation",
    "jacobi_propagator",
    "model_from_config",
]
