"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`VilenkinError`, so callers (and the CLI) can separate mathematical
failures from usage mistakes.
"""


class VilenkinError(Exception):
    """Base class for package errors."""


class ParameterError(VilenkinError, ValueError):
    """Inconsistent or out-of-range parameters (p, N, windows, shapes)."""


class StructureError(VilenkinError):
    """A tree record set is not a rooted tree."""

    def __init__(self, message, node_ids=()):
        super().__init__(message)
        self.node_ids = tuple(node_ids)


class InvalidTreeError(VilenkinError):
    """A tree is structurally fine but not N-valid."""


class ResourceError(VilenkinError):
    """A search or enumeration guard was exceeded."""


class MaskError(VilenkinError):
    """A mask table violates a required property."""


class NotValidMaskSupportError(MaskError):
    """A window set cannot be the support of a tree-generated mask."""


class MaskNotOrthogonalError(MaskError):
    """The support set produced by a mask is not elementary."""


class ConsistencyError(VilenkinError):
    """Two independent computations of the same object disagree."""
