from profile_variance_monitor.domain.exceptions.base import DomainError


class ChartError(DomainError):
    """Base class for all changepoint chart exceptions."""

    pass


class MethodMismatchError(ChartError):
    """Raised when a statistic is fed to a chart of another method."""

    def __init__(self, chart_method: str, statistic_method: str):
        self.chart_method = chart_method
        self.statistic_method = statistic_method
        self.message = (
            f"Cannot update a {chart_method} chart with a {statistic_method} statistic."
        )
        super().__init__(self.message)


class InvalidChangepointError(ChartError):
    """Raised when a candidate changepoint lies outside [0, T)."""

    def __init__(self, tau: int, length: int):
        self.tau = tau
        self.length = length
        self.message = f"Changepoint tau must satisfy 0 <= tau < {length}, got {tau}."
        super().__init__(self.message)


class InvalidChartParameterError(ChartError):
    """Raised when sigma0, the UCL, m0 or the window are invalid."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)
