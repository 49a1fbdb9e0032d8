"""Instance generators with computational checks of their claimed properties."""
from __future__ import annotations

from .grid_cluster import (ReductionArtifacts, cluster_observation_route, grid_cluster_instance,
                           reduction_bookkeeping, verify_hidden_centres)
from .packing import (disk_packing, maximal_disk_packing, sparse_lattice, sparse_report,
                      strip_traversal_route)
from .setcover import SetSystem, check_witness, setcover_instance, witness_tour
from .six_squares import six_squares, verify_six_squares

__all__ = [
    "ReductionArtifacts", "SetSystem", "check_witness", "cluster_observation_route",
    "disk_packing", "grid_cluster_instance", "maximal_disk_packing", "reduction_bookkeeping",
    "setcover_instance", "six_squares", "sparse_lattice", "sparse_report",
    "strip_traversal_route", "verify_hidden_centres", "verify_six_squares", "witness_tour",
]
