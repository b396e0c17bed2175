from .geometry import AXIS_INDEX, Mesh, MeshError, Scope, box_mesh, meshes_digest, quad_mesh, triangle_areas
from .labels import (
    LABELS,
    NUM_LABELS,
    PALETTE,
    SemanticLabel,
    UnknownLabelError,
    label_of_index,
    label_of_name,
    label_of_rgb,
)
from .params import ParamEntry, ParamRegistry, RegistryError, Sampler, registry_replay
from .rng import RandomStream, fork_stream
