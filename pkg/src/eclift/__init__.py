# Lattice lifts of elliptic curves over F_p and their conformal Hopf tori.

from .errors import EcliftError
from .finite_field import FieldCtx, FqElem, make_field
from .weierstrass import CurveParams, CurvePoint, count_points, validate_curve
from .cm_order import QuadInt, LatticeLevel, fixed_lattice, frobenius_alpha, lattice_tau, weil_counts
from .lift import GALLERY, LiftReport, build_lift_report, mult_group_points, real_locus
from .modclass import EmbeddingClass, find_embedding_class, reduce_to_fundamental
from .sphere_curve import SphereCurveParams, solve_curve
from .emit import Scene, write_obj, write_ply, write_report, write_svg
from .hopf_map import EmbeddingCtx, Mesh, build_embedding_ctx, embed_point, generate_mesh, map_scene
from .frob_check import reduce_mod_p, verify_phi_reduction

__all__ = [
    "EcliftError",
    "FieldCtx",
    "FqElem",
    "make_field",
    "CurveParams",
    "CurvePoint",
    "count_points",
    "validate_curve",
    "QuadInt",
    "LatticeLevel",
    "fixed_lattice",
    "frobenius_alpha",
    "lattice_tau",
    "weil_counts",
    "GALLERY",
    "LiftReport",
    "build_lift_report",
    "mult_group_points",
    "real_locus",
    "EmbeddingClass",
    "find_embedding_class",
    "reduce_to_fundamental",
    "SphereCurveParams",
    "solve_curve",
    "Scene",
    "write_obj",
    "write_ply",
    "write_report",
    "write_svg",
    "EmbeddingCtx",
    "Mesh",
    "build_embedding_ctx",
    "embed_point",
    "generate_mesh",
    "map_scene",
    "reduce_mod_p",
    "verify_phi_reduction",
]
