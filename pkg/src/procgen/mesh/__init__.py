from .kernel import (
    FaceHandle,
    Mesh,
    Pos,
    Topology,
    VertexHandle,
    edge_face_counts,
    facelist,
    loopv,
    nearbyv,
    pos_flip,
    vertexlist,
)
from .primitives import create_primitive, cube, icosahedron, iso, sphere, weld
from .subdivide import smooth_subdivide
from .io import load_obj, load_ply, save_obj, save_ply

__all__ = [
    "FaceHandle", "Mesh", "Pos", "Topology", "VertexHandle", "edge_face_counts", "facelist",
    "loopv", "nearbyv", "pos_flip", "vertexlist", "create_primitive", "cube", "icosahedron",
    "iso", "sphere", "weld", "smooth_subdivide", "load_obj", "load_ply", "save_obj", "save_ply",
]
