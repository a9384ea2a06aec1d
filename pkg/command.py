# command.py
import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

from mapdeg.asymfit import AsymptoticFitter
from mapdeg.criticality import CriticalPoint, CriticalSolver, convergence_margin
from mapdeg.degrees import DegreeSpec
from mapdeg.enumerator import Enumerator
from mapdeg.errors import SpecValidationError
from mapdeg.genus import (GenusCounter, OracleFilter, RotationOracle, cubic_scheme_count, decay_rate_check,
                          enumerate_schemes)
from mapdeg.genus.assembly import GENUS_FIT_TERMS
from mapdeg.genus.schemes import enumerate_uncoloured
from mapdeg.moments import MomentService
from mapdeg.sampler import MobileSampler
from mapdeg.utils import format_constant


class Command(ABC):
    """
    Abstract base class for the Command Pattern.
    Each subcommand is one request object; execute() returns the result
    dictionary ({"result": ..., "rows": [...], "columns": [...]}) that the
    output strategy renders.
    """

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def execute(self) -> Dict[str, Any]:
        """
        Execute the command.
        """
        pass


def critical_constants(point: CriticalPoint) -> Dict[str, Any]:
    out = {
        "kind": point.kind,
        "z0": format_constant(point.z0, point.decimals.get("z0")),
        "R0": format_constant(point.R0, point.decimals.get("R0")),
        "growth": format_constant(point.growth),
        "dbar": point.dbar,
        "characteristic": point.characteristic,
        "derivs": point.derivs,
    }
    if point.L0 is not None:
        out["L0"] = format_constant(point.L0, point.decimals.get("L0"))
    if point.margin is not None:
        out["margin"] = point.margin
    return out


class CountCommand(Command):
    """Exact planar counts for n = 1..N."""

    def __init__(self, enumerator: Enumerator, spec: DegreeSpec, n: int):
        super().__init__()
        self.enumerator = enumerator
        self.spec = spec
        self.n = n

    def execute(self) -> Dict[str, Any]:
        table = self.enumerator.count_maps(self.spec, self.n)
        counts = table.counts[1:]
        return {
            "result": {"spec": self.spec.describe(), "dbar": self.spec.dbar, "genus": 0, "counts": counts},
            "columns": ["n", "count"],
            "rows": [{"n": n, "count": c} for n, c in enumerate(counts, start=1)],
        }


class CriticalCommand(Command):
    def __init__(self, solver: CriticalSolver, spec: DegreeSpec):
        super().__init__()
        self.solver = solver
        self.spec = spec

    def execute(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {"spec": self.spec.describe()}
        if self.spec.weights.rule != "uniform":
            report = self.solver.check_qboltzmann(self.spec)
            result["classification"] = report.classification
            result["alpha"] = report.alpha
            result["agrees_with_heuristic"] = report.agrees_with_heuristic
            point = report.critical_point
            if point is None:
                result["message"] = report.message
                return {"result": result, "columns": ["name", "value"], "rows": []}
        else:
            point = self.solver.solve(self.spec)
        result.update(critical_constants(point))
        rows = [{"name": k, "value": v["value"], "decimal": v["decimal"]}
                for k, v in result.items() if isinstance(v, dict) and "decimal" in v]
        return {"result": result, "columns": ["name", "value", "decimal"], "rows": rows}


class MomentsCommand(Command):
    """Limit means and covariances of the degree counts, with the degenerate-direction rows."""

    def __init__(self, moments: MomentService, spec: DegreeSpec, cutoff: int = 12, rows_up_to: int = 8):
        super().__init__()
        self.moments = moments
        self.spec = spec
        self.cutoff = cutoff
        self.rows_up_to = rows_up_to

    def execute(self) -> Dict[str, Any]:
        spec = self.spec
        if spec.is_bipartite:
            report = self.moments.mu_sigma_bipartite(spec, cutoff=self.cutoff)
            rows = [d for d in report.degrees if d <= self.rows_up_to]
            direction = self.moments.degenerate_rows(spec, report, rows)
        elif spec.kind == "all" and spec.weights.rule == "uniform":
            report = self.moments.mu_sigma_allmaps(cutoff=self.cutoff)
            rows = [d for d in report.degrees if d <= self.rows_up_to]
            direction = self.moments.audit_allmaps(spec, report, rows)
        else:
            report = self.moments.mu_sigma_numeric(spec, cutoff=min(self.cutoff, 8))
            rows = [d for d in report.degrees if d <= self.rows_up_to]
            direction = self.moments.degenerate_rows_numeric(spec, report, rows)
        result = report.to_dict()
        result["degenerate_direction"] = {str(d): v for d, v in direction.items()}
        result["min_principal_minor"] = MomentService.min_principal_minor(report)
        table = [{"d": d, "mu": report.mu[d], "sigma_dd": report.sigma[(d, d)]} for d in report.degrees]
        return {"result": result, "columns": ["d", "mu", "sigma_dd"], "rows": table}


class FitCommand(Command):
    """Fit of c·ρ^{-n}·n^β on exact planar counts, compared with the critical point."""

    def __init__(self, enumerator: Enumerator, fitter: AsymptoticFitter, solver: CriticalSolver,
                 spec: DegreeSpec, n: int):
        super().__init__()
        self.enumerator = enumerator
        self.fitter = fitter
        self.solver = solver
        self.spec = spec
        self.n = n

    def execute(self) -> Dict[str, Any]:
        table = self.enumerator.count_maps(self.spec, self.n)
        fit = self.fitter.fit_growth(table, correction=1.0, beta_expected=-2.5)
        comparison = self.fitter.compare_with_critical(fit, self.solver.solve(self.spec))
        return {
            "result": {"spec": self.spec.describe(), "fit": fit.to_dict(), "comparison": comparison.to_dict(),
                       "ratios": self.fitter.ratio_estimates(table),
                       "beta_window_shift": self.fitter.window_shift(table, correction=1.0)},
            "columns": ["n", "count", "scaled"],
            "rows": self.fitter.scaled_rows(table, fit),
        }


class SampleCommand(Command):
    """Degree histograms of uniform mobiles from the recursive sampler."""

    def __init__(self, sampler: MobileSampler, spec: DegreeSpec, n: int, reps: int, seed: int):
        super().__init__()
        self.sampler = sampler
        self.spec = spec
        self.n = n
        self.reps = reps
        self.seed = seed

    def execute(self) -> Dict[str, Any]:
        histograms = self.sampler.sample_histograms(self.spec, self.n, self.reps, self.seed)
        degrees = sorted({d for h in histograms for d in h})
        rows = []
        for k, histogram in enumerate(histograms):
            row: Dict[str, Any] = {"sample": k}
            row.update({f"X{d}": histogram.get(d, 0) for d in degrees})
            rows.append(row)
        return {
            "result": {"spec": self.spec.describe(), "n": self.n, "reps": self.reps, "rng": "PCG64",
                       "degrees": degrees},
            "columns": ["sample"] + [f"X{d}" for d in degrees],
            "rows": rows,
        }


class CltCommand(Command):
    def __init__(self, sampler: MobileSampler, spec: DegreeSpec, n: int, reps: int, d: int, seed: int):
        super().__init__()
        self.sampler = sampler
        self.spec = spec
        self.n = n
        self.reps = reps
        self.d = d
        self.seed = seed

    def execute(self) -> Dict[str, Any]:
        stats = self.sampler.clt_harness(self.spec, self.n, self.reps, self.d, self.seed)
        result = stats.to_dict()
        result["spec"] = self.spec.describe()
        rows = [{"d": k, "mean": stats.mean[k], "variance": stats.variance[k]} for k in sorted(stats.mean)]
        return {"result": result, "columns": ["d", "mean", "variance"], "rows": rows}


class SchemesCommand(Command):
    """Rooted coloured schemes of genus g as permutation arrays."""

    def __init__(self, genus: int):
        super().__init__()
        self.genus = genus

    def execute(self) -> Dict[str, Any]:
        schemes = enumerate_schemes(self.genus)
        listing = [s.to_dict() for s in schemes]
        cubic = sum(1 for s in enumerate_uncoloured(self.genus) if all(len(c) == 3 for c in s.vertices))
        return {
            "result": {"genus": self.genus, "count": len(listing), "schemes": listing,
                       "cubic_rooted": cubic, "cubic_formula": cubic_scheme_count(self.genus)},
            "columns": ["index", "vertices", "edges", "colours", "alpha"],
            "rows": [{"index": k, "vertices": len(s["vertices"]), "edges": s["edges"],
                      "colours": "".join(s["colours"]), "alpha": s["alpha"]} for k, s in enumerate(listing)],
        }


class GenusCountCommand(Command):
    def __init__(self, counter: GenusCounter, spec: DegreeSpec, n: int, genus: int = 1):
        super().__init__()
        self.counter = counter
        self.spec = spec
        self.n = n
        self.genus = genus

    def execute(self) -> Dict[str, Any]:
        table = self.counter.count(self.spec, self.n, self.genus)
        counts = table.counts[1:]
        return {
            "result": {"spec": self.spec.describe(), "genus": self.genus, "counts": counts,
                       "method": table.method},
            "columns": ["n", "count"],
            "rows": [{"n": n, "count": c} for n, c in enumerate(counts, start=1)],
        }


class GenusFitCommand(Command):
    """Exponent fit of the genus counts; β should be 5(g-1)/2."""

    def __init__(self, counter: GenusCounter, spec: DegreeSpec, n: int, genus: int = 1):
        super().__init__()
        self.counter = counter
        self.spec = spec
        self.n = n
        self.genus = genus

    def execute(self) -> Dict[str, Any]:
        table = self.counter.count(self.spec, self.n, self.genus)
        fit, comparison = self.counter.exponent_check(self.spec, self.n, self.genus, table=table)
        return {
            "result": {"spec": self.spec.describe(), "genus": self.genus, "fit": fit.to_dict(),
                       "comparison": comparison.to_dict(), "method": table.method,
                       "beta_window_shift": self.counter.fitter.window_shift(
                           table, self.spec.dbar, 0.5, terms=GENUS_FIT_TERMS)},
            "columns": ["n", "count", "scaled"],
            "rows": self.counter.fitter.scaled_rows(table, fit),
        }


class DiagnosticsCommand(Command):
    """Tightness sums, q-Boltzmann verdict, coefficient ratios and the edge-decay check."""

    def __init__(self, solver: CriticalSolver, fitter: AsymptoticFitter, enumerator: Enumerator,
                 spec: DegreeSpec, n: Optional[int] = None):
        super().__init__()
        self.solver = solver
        self.fitter = fitter
        self.enumerator = enumerator
        self.spec = spec
        self.n = n

    def execute(self) -> Dict[str, Any]:
        spec = self.spec
        point = self.solver.solve(spec)
        tightness = self.solver.tightness_diagnostics(spec, point)
        result: Dict[str, Any] = {
            "spec": spec.describe(),
            "critical": critical_constants(point),
            "tightness": {"sums": tightness.sums, "tail_bounds": tightness.tail_bounds,
                          "sequences": {k: {str(i): v for i, v in seq.items()}
                                        for k, seq in tightness.sequences.items()},
                          "passed": tightness.passed},
        }
        if point.kind == "general":
            result["convergence_margin"] = convergence_margin(point.L0, point.R0)
        if spec.weights.rule != "uniform":
            report = self.solver.check_qboltzmann(spec)
            result["qboltzmann"] = {"classification": report.classification, "alpha": report.alpha,
                                    "agrees_with_heuristic": report.agrees_with_heuristic}
        if spec.is_bipartite:
            result["edge_decay"] = decay_rate_check(spec, 0.9 * point.z0, self.solver).to_dict()
        rows: List[Dict[str, Any]] = []
        if self.n:
            ratios = self.fitter.ratio_estimates(self.enumerator.count_maps(spec, self.n))
            result["ratios"] = ratios
            rows = [{"n": n, "ratio": r} for n, r in ratios["ratios"]]
        return {"result": result, "columns": ["n", "ratio"], "rows": rows}


class OracleCommand(Command):
    """Brute-force rotation-system counts by genus."""

    def __init__(self, oracle: RotationOracle, n: int, genus: Optional[int] = None,
                 spec: Optional[DegreeSpec] = None):
        super().__init__()
        self.oracle = oracle
        self.n = n
        self.genus = genus
        self.spec = spec

    def execute(self) -> Dict[str, Any]:
        if self.n > self.oracle.max_edges:
            raise SpecValidationError(f"oracle is limited to n <= {self.oracle.max_edges}, got {self.n}")
        by_genus = self.oracle.count_by_genus(self.n)
        result: Dict[str, Any] = {"n": self.n, "by_genus": {str(g): c for g, c in by_genus.items()}}
        if self.spec is not None and self.genus is not None:
            result["filtered"] = self.oracle.count(
                self.n, OracleFilter(genus=self.genus, bipartite=self.spec.is_bipartite, degrees=self.spec))
        return {
            "result": result,
            "columns": ["genus", "count"],
            "rows": [{"genus": g, "count": c} for g, c in by_genus.items()],
        }
