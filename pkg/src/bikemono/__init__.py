"""Bicycle monodromy of plane curves: transport, classification, developments, back tracks."""

__version__ = "0.1.0"

from bikemono.geom2d import (
    PlaneCurve,
    PolygonPath,
    arclength_reparam,
    curvature,
    global_invariants,
    make_named_curve,
    parse_curve_spec,
)
from bikemono.moebius import (
    MonodromyClass,
    Sl2Map,
    circle_action,
    classify,
    exp_traceless,
    fixed_directions,
    hopf,
    hyp_distance,
    moebius_half_plane,
)
from bikemono.transport import (
    MonodromyReport,
    TransportResult,
    connection_matrix,
    monodromy,
    polygonal_convergence,
    transport,
    transport_polygon,
    transport_smooth,
)
from bikemono.hyperdev import (
    Development,
    chord_pair,
    curvature_transfer_check,
    develop,
    self_intersects,
)
from bikemono.tracks import (
    BackTrack,
    closed_back_tracks,
    cusps_and_maslov,
    length_bound_check,
    rot_identity_check,
    rotation_number_rear,
    theta_flow,
)

__all__ = [
    "BackTrack",
    "Development",
    "MonodromyClass",
    "MonodromyReport",
    "PlaneCurve",
    "PolygonPath",
    "Sl2Map",
    "TransportResult",
    "arclength_reparam",
    "chord_pair",
    "circle_action",
    "classify",
    "closed_back_tracks",
    "connection_matrix",
    "curvature",
    "curvature_transfer_check",
    "cusps_and_maslov",
    "develop",
    "exp_traceless",
    "fixed_directions",
    "global_invariants",
    "hopf",
    "hyp_distance",
    "length_bound_check",
    "make_named_curve",
    "moebius_half_plane",
    "monodromy",
    "parse_curve_spec",
    "polygonal_convergence",
    "rot_identity_check",
    "rotation_number_rear",
    "self_intersects",
    "theta_flow",
    "transport",
    "transport_polygon",
    "transport_smooth",
]
