"""Static renderings of solver frontier reports."""

from .plot import PlotError, PlotJob, load_report, plot_frontier2d, plot_regions3, run_job

__all__ = [
    "PlotError",
    "PlotJob",
    "load_report",
    "plot_frontier2d",
    "plot_regions3",
    "run_job",
]
