from .bezier import CurveError, CurveLoop, line_segment
from .extrude import DegenerateProfileError, Profile, extrude_profile, load_profile, load_profile_hierarchy
from .mesh2d import loop_mesh, loop_polygon, triangulate_polygon
from .offset import OffsetCollapseError, offset_inward, offset_tolerance
from .opening import OpeningSpec, Part, apply_opening
from .outline import KINDS, make_outline
from .panes import PaneGrid, subdivide_panes
from .window import WindowAssembly, WindowStyle, assemble_window, build_geometry, sample_instance, sample_style
