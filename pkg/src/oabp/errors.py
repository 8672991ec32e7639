"""Exception hierarchy shared across the package.

Every error raised on purpose derives from OabpError so the CLI can map
library failures to a single exit code and everything else stays a bug.
"""

from __future__ import annotations


class OabpError(Exception):
    """Base class for all anticipated failures."""


class FieldError(OabpError):
    """Bad field configuration or element: non-prime modulus, reducible
    extension polynomial, element outside the field, field too small."""


class BudgetError(OabpError):
    """A configured resource limit was hit (expansion terms, grid points,
    irreducibility search, family size caps).  Never silently truncates."""


class StructureError(OabpError):
    """A branching program or polynomial violates a precondition: invalid
    level structure, order violation, non-oblivious input, bad cut."""


class FormatError(OabpError):
    """Malformed serialized input (JSON schema, element syntax, field
    mismatch between files)."""
