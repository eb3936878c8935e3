"""Exception hierarchy shared by the geometry, mesh, clipping and bench code."""


class GeometryError(ValueError):
    """Base class for every error raised by polyclip."""


class DegeneratePlane(GeometryError):
    pass


class DegenerateTriangle(GeometryError):
    pass


class MeshError(GeometryError):
    """A vertex/facet set that does not describe a valid convex polyhedron."""


class NotClosed(MeshError):
    pass


class NotConvex(MeshError):
    pass


class DegenerateFacet(MeshError):
    pass


class InvalidFacetCount(MeshError):
    pass


class WalkStalled(GeometryError):
    """The facet ring walk found no forward edge (an epsilon degeneracy)."""


class GenerationExhausted(GeometryError):
    pass


class EquivalenceViolation(AssertionError):
    """Two clippers disagreed on the same segment.

    ``segment`` holds the offending ``(a, b)`` endpoints so the case can be
    replayed, ``results`` maps algorithm name to its ClipResult.
    """

    def __init__(self, message, segment=None, results=None):
        super().__init__(message)
        self.segment = segment
        self.results = results or {}


class FormatError(GeometryError):
    """Malformed mesh or line-dataset text."""
