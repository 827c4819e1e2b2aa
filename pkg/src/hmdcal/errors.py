"""Exception types shared across the package.

Everything derives from HmdcalError so the CLI can catch one base class
and turn it into a nonzero exit with a machine-parsable error line.
"""


class HmdcalError(Exception):
    """Base class for all errors raised by this package."""


# -- geometry ---------------------------------------------------------------

class OffPlane(HmdcalError):
    """Point handed to a plane chart does not lie on the plane."""


class GrazingRay(HmdcalError):
    """Ray direction is (nearly) parallel to the plane it must cross."""


class WrongSide(HmdcalError):
    """Backward plane intersection would need a negative ray parameter."""


class BackwardDirection(HmdcalError):
    """Direction points away from the plane's forward hemisphere."""


# -- ray tracing ------------------------------------------------------------

class Miss(HmdcalError):
    """Ray does not hit a surface within its aperture."""


class TotalInternalReflection(HmdcalError):
    """Refraction impossible at this incidence (sin of exit angle > 1)."""


class RayLost(HmdcalError):
    """Traced ray never reached the terminal plane(s) of the system."""


class NoConvergence(HmdcalError):
    """Iterative ground-truth inversion failed to converge."""


class OutOfImage(HmdcalError):
    """Pixel coordinates outside the camera's image bounds."""


class BehindCamera(HmdcalError):
    """World point is behind the camera's image plane."""


# -- polynomial fitting -----------------------------------------------------

class Underdetermined(HmdcalError):
    """Too few (or rank-deficient / degenerate) samples for the basis."""


class IllConditioned(HmdcalError):
    """Least-squares system remains unusable even after ridge fallback."""


# -- model construction / lifting -------------------------------------------

class LiftDiverged(HmdcalError):
    """Base-plane lifting optimization did not reach a valid solution."""


class DegenerateDirection(HmdcalError):
    """Viewpoint coincides with its base-plane candidate; direction undefined."""


# -- data collection / evaluation -------------------------------------------

class ExcessiveDrops(HmdcalError):
    """More than half of the attempted correspondence traces were lost."""


class UnmatchedDots(HmdcalError):
    """Dot matching between captures is ambiguous."""


class IntegrityError(HmdcalError):
    """Artifact file content does not match the hash recorded in its header."""
