"""heatmix: multi-region simulator of residential heating technology diffusion.

Heterogeneous-household cost comparisons drive market-share dynamics for
heating technologies under policy schedules (carbon tax, subsidies,
kick-start seeding), producing technology-mix, energy, emission and
expenditure trajectories.
"""

__version__ = "0.1.0"
