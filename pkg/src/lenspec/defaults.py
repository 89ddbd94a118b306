"""Shared numeric defaults and tolerances."""

import math

# Global length-comparison tolerance on analytic spaces.
EPS_LEN = 1e-9

# Parameter-grid step for "for all t" checks, and the refinement floor.
DELTA_DEFAULT = 2.0 * math.pi / 1024
DELTA_FLOOR = 2.0 * math.pi / 65536

# Search range for minimizing indices.
K_MAX_DEFAULT = 16

# Energy search.
TOL_GRAD = 1e-10
MAX_DESCENT_ITERS = 10_000
BACKTRACK_FACTOR = 0.5
TOL_CUT_REL = 1e-7  # relative width of the cut-locus exclusion zone

# Guard for combinatorial walk enumeration.
WALK_CAP = 10**6

# Steiner points per mesh edge.
STEINER_DEFAULT = 4
