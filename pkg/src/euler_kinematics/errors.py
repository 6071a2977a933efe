"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI.
"""


class EulerKinError(Exception):
    code = "error"


class ValidationError(EulerKinError):
    code = "validation"

    def __init__(self, message, obj=None):
        super().__init__(message)
        self.obj = obj


class FaceClosureViolation(ValidationError):
    code = "face_closure"


class ImproperIntersection(ValidationError):
    code = "improper_intersection"


class DegenerateSimplex(ValidationError):
    code = "degenerate_simplex"


class NonCompactSupport(EulerKinError):
    code = "non_compact_support"


class DimensionCapExceeded(EulerKinError):
    code = "dimension_cap"


class NotOrthogonal(EulerKinError):
    code = "not_orthogonal"


class NotAFace(EulerKinError):
    code = "not_a_face"


class InvalidSampleCount(EulerKinError):
    code = "invalid_sample_count"


class RankDeficientSystem(EulerKinError):
    code = "rank_deficient"

    def __init__(self, message, residual=None, rank=None):
        super().__init__(message)
        self.residual = residual
        self.rank = rank


class OutOfRange(EulerKinError):
    code = "out_of_range"


class RadiusSumExceedsRegime(EulerKinError):
    code = "radius_sum"


class DegenerateTangency(EulerKinError):
    code = "degenerate_tangency"


class ParseError(EulerKinError):
    code = "parse"

    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line
