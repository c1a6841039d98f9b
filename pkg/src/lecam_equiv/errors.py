"""Exception types shared across modules."""


class PreconditionError(ValueError):
    """An operation was called outside its admissible input range."""


class DesignSizeError(PreconditionError):
    pass


class InvalidDesignError(PreconditionError):
    pass


class NonIsomorphicDesignError(PreconditionError):
    """Evaluation on the design does not determine elements of the space."""


class RankDeficiencyError(NonIsomorphicDesignError):
    def __init__(self, index: int, residual: float):
        self.index = index
        self.residual = residual
        super().__init__(
            f"empirical Gram-Schmidt breaks down at basis index {index} "
            f"(residual norm {residual:.3e})"
        )


class OrderingViolationError(PreconditionError):
    """Id - (Pi_n|S_n)^{-1} is not positive semidefinite."""


class DegenerateFilterError(PreconditionError):
    pass


class EmptyBinError(PreconditionError):
    pass
