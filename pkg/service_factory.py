# service_factory.py
from config import AppConfig
from mapdeg.asymfit import AsymptoticFitter
from mapdeg.criticality import CriticalSolver
from mapdeg.enumerator import Enumerator
from mapdeg.genus import GenusCounter, RotationOracle
from mapdeg.moments import MomentService
from mapdeg.sampler import MobileSampler
from mapdeg.series import SeriesEngine


class ServiceFactory:
    """
    Factory class for creating service instances.
    Implements the Factory Pattern to centralize service creation logic;
    every limit from AppConfig is injected here.
    """

    @staticmethod
    def create_series_engine(config: AppConfig) -> SeriesEngine:
        return SeriesEngine(
            max_order_bipartite=config.max_order_bipartite,
            max_order_general=config.max_order_general,
        )

    @staticmethod
    def create_enumerator(config: AppConfig) -> Enumerator:
        """
        Create an Enumerator instance.

        Args:
            config: Application configuration

        Returns:
            Enumerator over a configured SeriesEngine
        """
        return Enumerator(ServiceFactory.create_series_engine(config), threads=config.threads)

    @staticmethod
    def create_solver(config: AppConfig) -> CriticalSolver:
        return CriticalSolver(mp_dps=config.mp_dps, tail_tolerance=config.tail_tolerance)

    @staticmethod
    def create_fitter(config: AppConfig) -> AsymptoticFitter:
        return AsymptoticFitter(window=config.fit_window, threshold=config.fit_threshold)

    @staticmethod
    def create_moment_service(config: AppConfig) -> MomentService:
        return MomentService(
            solver=ServiceFactory.create_solver(config),
            enumerator=ServiceFactory.create_enumerator(config),
            fd_step=config.fd_step,
            richardson_tolerance=config.richardson_tolerance,
            threads=config.threads,
        )

    @staticmethod
    def create_sampler(config: AppConfig) -> MobileSampler:
        return MobileSampler(
            max_n=config.sampler_max_n,
            memory_limit=config.sampler_memory_mib * 2 ** 20,
            threads=config.threads,
            solver=ServiceFactory.create_solver(config),
        )

    @staticmethod
    def create_oracle(config: AppConfig) -> RotationOracle:
        return RotationOracle(max_edges=config.oracle_max_edges)

    @staticmethod
    def create_genus_counter(config: AppConfig) -> GenusCounter:
        """
        Create a GenusCounter instance.

        Args:
            config: Application configuration

        Returns:
            GenusCounter wired with engine, solver, fitter and oracle
        """
        return GenusCounter(
            engine=ServiceFactory.create_series_engine(config),
            solver=ServiceFactory.create_solver(config),
            fitter=ServiceFactory.create_fitter(config),
            oracle=ServiceFactory.create_oracle(config),
            max_order=config.max_order_genus,
            threads=config.threads,
        )
