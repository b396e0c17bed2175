from .camera import CameraError, CameraPose, sample_camera
from .config import ConfigError, SceneConfig, load_config, parse_config
from .lighting import LightRig, sample_lighting
from .materials import GLASS_ALPHA, MaterialTable, assign_materials
from .scene import LevelViolation, Scene, allowed_labels, baseline_rules, build_scene, scene_bytes, scene_digest
