"""Numerical tolerance settings."""
from pydantic import BaseModel, ConfigDict, PositiveFloat

DEFAULT_RANK_EPS = 1e-8
DEFAULT_RESIDUAL_EPS = 1e-10

# Checks pass when residuals stay within this multiple of residual_eps.
CHECK_FACTOR = 100.0


class Tolerance(BaseModel):
    """Rank threshold (relative to the top singular value) and residual threshold."""

    model_config = ConfigDict(frozen=True)

    rank_eps: PositiveFloat = DEFAULT_RANK_EPS
    residual_eps: PositiveFloat = DEFAULT_RESIDUAL_EPS

    @property
    def check_eps(self) -> float:
        return self.residual_eps * CHECK_FACTOR

    def merged(self, **overrides) -> "Tolerance":
        """Copy with non-None overrides applied."""
        values = {k: v for k, v in overrides.items() if v is not None}
        return self.model_copy(update=values) if values else self
