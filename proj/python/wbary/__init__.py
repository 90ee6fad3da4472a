"""Free-support Wasserstein barycenters and D2-clustering."""

from ._core import (
    Distribution,
    InvalidArgument,
    NumericalError,
    ParseError,
    d2_cluster,
    evaluate_objval,
    generate,
    num_threads,
    project_simplex,
    read_distributions,
    set_num_threads,
    solve_badmm,
    solve_pam,
    solve_transport,
    w2_distance,
    write_distributions,
)

__all__ = [
    "Distribution",
    "InvalidArgument",
    "NumericalError",
    "ParseError",
    "d2_cluster",
    "evaluate_objval",
    "generate",
    "num_threads",
    "project_simplex",
    "read_distributions",
    "set_num_threads",
    "solve_badmm",
    "solve_pam",
    "solve_transport",
    "w2_distance",
    "write_distributions",
]
