"""Exception taxonomy shared across the library.

Every failure mode that callers are expected to handle has its own class;
the CLI maps them onto exit codes (see cli.py).
"""


class RisEeError(Exception):
    """Base class for all library-specific failures."""


class SingularChannel(RisEeError):
    """H^H H is numerically singular: factorization failed or the condition cap was exceeded."""


class Infeasible(RisEeError):
    """The per-user power floor cannot be met within the transmit budget."""


class NoFeasibleStart(RisEeError):
    """No feasible initial RIS state was found after exhausting the restart policy."""


class CapExceeded(RisEeError):
    """Exhaustive enumeration requested above the hard element-count cap."""


class AllInfeasible(RisEeError):
    """Every enumerated RIS state violates the constraints."""


class SolverFailure(RisEeError):
    """The conic solver broke down or returned an unusable solution."""


class RelaxationInfeasible(RisEeError):
    """The semidefinite relaxation admits no feasible point."""


class NoFeasibleRounding(RisEeError):
    """All randomized rounding candidates violate the power constraint."""
