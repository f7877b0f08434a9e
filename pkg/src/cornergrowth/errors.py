"""Exception types shared across the simulation modules."""


class SimulationError(Exception):
    """Base class for all simulation-level failures."""


class TieDetected(SimulationError):
    """Two candidate passage times compared bit-equal.

    With continuous weights this is a probability-zero event, so a tie
    signals an RNG or bookkeeping defect rather than bad luck.  Never
    tie-broken silently.
    """

    def __init__(self, site, message=None):
        self.site = tuple(site)
        super().__init__(message or f"exact tie in argmax/argmin at site {self.site}")


class RectangleTooLarge(SimulationError):
    """Brute-force enumeration guard tripped."""


class Truncated(SimulationError):
    """A computed object reached the far boundary of its finite rectangle.

    All quadrant objects live inside an explicit rectangle; clipped data is
    an error, never a silent return.
    """


class OutOfHorizon(SimulationError):
    """A time query lies past the last recorded event of a trace."""


class OutOfGrid(SimulationError):
    """A lattice site falls outside the rectangle it was queried against."""


class WindowBreach(SimulationError):
    """A tracked particle, hole or the marked pair reached the window edge
    before the simulation horizon."""


class IncompleteRectangle(SimulationError):
    """Not every site of the requested rectangle interchanged by the horizon."""


class ClockCollision(SimulationError):
    """Two Poisson event times compared bit-equal (null event; defect)."""


class CouplingViolation(SimulationError):
    """The exclusion/growth coupling produced diverging trajectories.

    Carries the first divergence time and both states for debugging; this is
    the strongest regression signal in the repository.
    """

    def __init__(self, seed, time, detail):
        self.seed = seed
        self.time = time
        self.detail = detail
        super().__init__(f"coupling diverged (seed={seed}) at t={time}: {detail}")
