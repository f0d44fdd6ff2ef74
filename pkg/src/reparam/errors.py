"""Exception types shared across the engine."""


class ReparamError(Exception):
    """Base class for all engine errors."""


class ZeroDenominator(ReparamError):
    pass


class NoAlgebraicGenerator(ReparamError):
    pass


class UnsupportedExtension(ReparamError):
    pass


class BudgetExceeded(ReparamError):
    def __init__(self, steps: int):
        super().__init__(f"Groebner step budget exhausted after {steps} reduction steps")
        self.steps = steps


class EmptyVariety(ReparamError):
    pass


class RankDeficient(ReparamError):
    """Raised only when a full-rank Jacobian is a hard requirement; pipelines
    that tolerate rank deficiency catch it and carry a warning instead."""

    def __init__(self, rank: int, needed: int):
        super().__init__(f"Jacobian rank {rank} < {needed}")
        self.rank = rank
        self.needed = needed


class NotARealization(ReparamError):
    pass


class InfiniteFiber(ReparamError):
    pass


class EliminationFailed(ReparamError):
    pass


class PrimitiveSearchExhausted(ReparamError):
    pass


class EvaluationSearchExhausted(ReparamError):
    pass


class NotInTower(ReparamError):
    pass


class DegreeOneExtension(ReparamError):
    pass


class NonLinearComponent(ReparamError):
    def __init__(self, msg, generators=None):
        super().__init__(msg)
        self.generators = generators or []


class CoefficientsOutsideField(ReparamError):
    pass


class SingularSubstitution(ReparamError):
    pass


class NoPolynomialRealization(ReparamError):
    """Carries the algorithm step at which the search provably fails."""

    def __init__(self, step: str, detail: str = ""):
        super().__init__(f"no polynomial realization: failed at step '{step}'" +
                         (f" ({detail})" if detail else ""))
        self.step = step


class NoFRealization(ReparamError):
    pass


class NoLine(ReparamError):
    pass


class ParseError(ReparamError):
    def __init__(self, msg, line=None, col=None):
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {col}" if col is not None else "")
        super().__init__(msg + loc)
        self.line = line
        self.col = col


class UndeclaredSymbol(ParseError):
    pass


class DuplicateEquation(ParseError):
    pass
