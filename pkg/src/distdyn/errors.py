"""Exception hierarchy shared by every stage of the pipeline."""


class DistDynError(Exception):
    """Base class for all distdyn errors."""


class ConfigError(DistDynError):
    pass


class MissingData(DistDynError):
    def __init__(self, entity, year, variable):
        self.entity, self.year, self.variable = entity, year, variable
        super().__init__(f"missing value for entity={entity!r} year={year} variable={variable!r}")


class DegenerateYear(DistDynError):
    def __init__(self, year, detail="cross-sectional mean <= 0"):
        self.year = year
        super().__init__(f"year {year}: {detail}")


class InsufficientData(DistDynError):
    pass


class EmptyRegion(DistDynError):
    pass


class InvalidYear(DistDynError):
    pass


class MissingFactor(DistDynError):
    def __init__(self, fuel):
        self.fuel = fuel
        super().__init__(f"no emission factors for fuel {fuel!r}")


class InvalidQuantity(DistDynError):
    pass


class InvalidDeflator(DistDynError):
    pass


class DegenerateGDP(DistDynError):
    def __init__(self, entity, year):
        self.entity, self.year = entity, year
        super().__init__(f"nonpositive real GDP for entity={entity!r} year={year}")


class DegenerateSample(DistDynError):
    pass


class InvalidWeights(DistDynError):
    pass


class DegenerateKernel(DistDynError):
    pass


class GridMismatch(DistDynError):
    pass


class NotConverged(DistDynError):
    """Raised by strict ergodic solves; ``result`` holds the last iterate."""

    def __init__(self, result):
        self.result = result
        super().__init__(
            f"ergodic iteration did not converge in {result.iterations} iterations "
            f"(residual {result.residual:.3e})"
        )


class DegenerateNeighborhood(DistDynError):
    def __init__(self, entity, year):
        self.entity, self.year = entity, year
        super().__init__(f"neighbour mean <= 0 for entity={entity!r} year={year}")


class DegenerateCovariate(DistDynError):
    def __init__(self, entity, year):
        self.entity, self.year = entity, year
        super().__init__(f"covariate <= 0 for entity={entity!r} year={year}")
