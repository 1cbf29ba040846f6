"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameters or malformed configuration input."""


class InvalidScenarioError(ValueError):
    """A scenario violates geometric validity (e.g. near-coincident nodes)."""


class BudgetExceededError(RuntimeError):
    """Exhaustive search would exceed the evaluation budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"exhaustive search needs {required} evaluations, budget is {budget}"
        )
