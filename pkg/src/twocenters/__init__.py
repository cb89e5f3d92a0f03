"""Two fixed centers with an elastic term: critical points, regularization, periods and toric profiles."""
from .errors import *  # noqa: F401,F403
from .potential import MassParams, PlanePoint, CriticalPoint, find_critical_points, critical_summary  # noqa: F401
