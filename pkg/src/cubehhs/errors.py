"""Exception vocabulary shared across the package.

Every error that an operation can raise deliberately is one of these; anything
else escaping is a bug.  Errors that carry evidence expose it as ``witness``.
"""


class CubeHHSError(Exception):
    """Base class; carries an optional witness payload."""

    def __init__(self, message="", witness=None):
        super().__init__(message or self.__class__.__name__)
        self.witness = witness


class ParseError(CubeHHSError):
    """Malformed input text or config."""


class NotMedian(CubeHHSError):
    """Input graph is not median; witness is an offending triple or edge."""


class Disconnected(CubeHHSError):
    """Input graph is not connected."""


class RadiusTooSmall(CubeHHSError):
    """Requested construction needs a larger ball than was built."""


class EmptySubcomplex(CubeHHSError):
    """Operation received an empty vertex set."""


class ClosureDiverged(CubeHHSError):
    """Iterated closure exceeded its growth cap."""


class MaximalDomain(CubeHHSError):
    """Relative projection from the ambient domain does not exist."""


class NotAProduct(CubeHHSError):
    """Requested product decomposition does not exist."""


class DisconnectedGraph(CubeHHSError):
    """A contact-type graph that must be connected is not."""


class Inconsistent(CubeHHSError):
    """Coordinate tuple violates consistency; witness is a domain pair."""


class NoFit(CubeHHSError):
    """No parameter pair within the search grid satisfies the constraints."""


class NotFound(CubeHHSError):
    """Search exhausted its budget without a hit."""


class HorizonExceedsBall(CubeHHSError):
    """Requested horizon walks outside the realized window."""


class CapExceeded(CubeHHSError):
    """Hard size cap hit before the computation finished."""


class NotRemote(CubeHHSError):
    """Boundary point is not remote with respect to the support set."""


class Untrusted(CubeHHSError):
    """Result would depend on vertices outside the trusted region."""


class NotAxial(CubeHHSError):
    """Automorphism has no unbounded direction to iterate along."""


class FixedSouthPole(CubeHHSError):
    """Start point of a north-south iteration is the repelling fixed point."""


class Timeout(CubeHHSError):
    """Iteration failed to stabilize within the step cap; witness is the cap."""


class NotSingleDomain(CubeHHSError):
    """Operation needs a single active domain but several (or none) are active."""


class NotGeodesic(CubeHHSError):
    """Candidate path failed the geodesic (or quasigeodesic) side condition."""


class NotOrthogonalizable(CubeHHSError):
    """Family cannot be replaced by pairwise orthogonal representatives."""
