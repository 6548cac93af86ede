"""Domain errors.  Every error carries a stable ``name`` used by the CLI."""


class DomainError(Exception):
    name = "DomainError"

    def __init__(self, message="", **details):
        super().__init__(message or self.name)
        self.details = details

    def to_json(self):
        out = {"error": self.name, "message": str(self)}
        for key, val in self.details.items():
            out[key] = val if isinstance(val, (int, str, list, dict)) else str(val)
        return out


def _make(name):
    return type(name, (DomainError,), {"name": name})


ZeroLeadingCoefficient = _make("ZeroLeadingCoefficient")
NotExpandable = _make("NotExpandable")
WindowTooSmall = _make("WindowTooSmall")
UnknownGenerator = _make("UnknownGenerator")
RuleTableUnverified = _make("RuleTableUnverified")
NotQuasimodular = _make("NotQuasimodular")
InsufficientPrecision = _make("InsufficientPrecision")
SymmetryViolated = _make("SymmetryViolated")
ResidualNonzero = _make("ResidualNonzero")
NotInSpan = _make("NotInSpan")
FitFailed = _make("FitFailed")
SourceRangeInsufficient = _make("SourceRangeInsufficient")
DimensionMismatch = _make("DimensionMismatch")
UnknownOperator = _make("UnknownOperator")
UnsupportedClass = _make("UnsupportedClass")
ShiftMismatch = _make("ShiftMismatch")
NegativeExponent = _make("NegativeExponent")
MissingTableEntry = _make("MissingTableEntry")

ALL_ERRORS = [
    ZeroLeadingCoefficient, NotExpandable, WindowTooSmall, UnknownGenerator,
    RuleTableUnverified, NotQuasimodular, InsufficientPrecision, SymmetryViolated,
    ResidualNonzero, NotInSpan, FitFailed, SourceRangeInsufficient,
    DimensionMismatch, UnknownOperator, UnsupportedClass, ShiftMismatch,
    NegativeExponent, MissingTableEntry,
]
