# mapdeg/genus/__init__.py
from mapdeg.genus.assembly import GenusCounter, assemble_QS, cycle_variation, fundamental_cycles, iter_labellings
from mapdeg.genus.cells import CellBuilder, CellSeries, decay_rate_check
from mapdeg.genus.rings import ExactRing, QuadratureRing, SeriesRing
from mapdeg.genus.rotation import OracleFilter, RotationMap, RotationOracle, oracle_count
from mapdeg.genus.schemes import Scheme, cubic_scheme_count, enumerate_schemes

__all__ = [
    "CellBuilder", "CellSeries", "ExactRing", "GenusCounter", "OracleFilter", "QuadratureRing",
    "RotationMap", "RotationOracle", "Scheme", "SeriesRing", "assemble_QS", "cubic_scheme_count",
    "cycle_variation", "decay_rate_check", "enumerate_schemes", "fundamental_cycles",
    "iter_labellings", "oracle_count",
]
