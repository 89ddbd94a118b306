"""Length spectra, minimizing indices and uniform-energy critical points
on concretely represented compact length spaces."""

from .curves import CheckResult, ClosedCurve, CurveReport, curve_report
from .energy import (CriticalPointRecord, EnergySpec, HessianReport, ProductPoint,
                     SearchReport, energy_gradient, find_critical_points,
                     hessian_index, is_rotating_critical, open_index_search,
                     tuple_to_curve, uniform_energy)
from .errors import (AmbiguousSegmentError, CutLocusError, EnumerationCapError,
                     InvalidSpaceError, LengthSpaceError, SpaceMismatchError,
                     SystoleUndefinedError, UnsupportedOperationError)
from .gh import (Correspondence, ConvergenceReport, GHBound, GapResult,
                 MemberRecord, RelationCoverageError, convergence_experiment,
                 correspondence_distortion, gap_check, gh_upper_bound,
                 hausdorff_distance_reals)
from .graphspace import MetricGraph, interval_graph
from .meshspace import (MeshSurface, doubled_disk_mesh, ellipsoid_mesh,
                        equator_curve)
from .serialize import curve_from_json, parse_space_spec
from .spaces import (Circle, CirclePoint, FiniteMetricSpace, FinitePoint,
                     FlatTorus, GraphPoint, LengthSpace, MeshPoint, NetSample,
                     RoundSphere, SpherePoint, TorusPoint, build_net)
from .spectra import (GeodesicEnumeration, Spectrum, SpectrumEntry,
                      enumerate_graph_geodesics, min_length_bounds,
                      space_injrad, space_minind, spectrum, spectrum_1_over_k,
                      spectrum_open_1_over_k, systole)

__version__ = "0.1.0"
