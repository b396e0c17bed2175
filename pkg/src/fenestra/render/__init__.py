from .raster import NEAR, PassBundle, edge_pass, gather, raycast, raycast_label, rasterize
