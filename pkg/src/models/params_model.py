"""
Algorithm parameter models.

Validated parameter bundles for the stability-based and bi-criteria solvers.
"""

from dataclasses import dataclass, asdict, replace

from ..utils import safe_ceil


def _check_open_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")


@dataclass(frozen=True)
class StabilityParams:
    """
    Parameters of the (epsilon^2, beta)-stability solvers.

    Attributes:
        epsilon: Accuracy parameter; the stability level is epsilon^2.
        beta0: Known lower bound on the stability fraction beta.
        eta: Failure probability (eta0 for the binary-search solver).
    """
    epsilon: float
    beta0: float
    eta: float

    def __post_init__(self):
        _check_open_unit('epsilon', self.epsilon)
        _check_open_unit('beta0', self.beta0)
        _check_open_unit('eta', self.eta)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BiCriteriaParams:
    """
    Parameters of the (1 + epsilon, 1 - delta) bi-criteria solvers.

    Attributes:
        epsilon: Radius (size) error.
        delta: Coverage error.
        eta1: Failure probability of each adaptive sample.
        eta2: Failure probability of each size estimate; derived from the
            round count and repetitions when None.
        z: Round cap; defaults to ceil(2 / epsilon) + 1.
        repetitions: Number of independent runs; derived from the
            repetition schedule when None.
    """
    epsilon: float
    delta: float
    eta1: float = 0.1
    eta2: float | None = None
    z: int | None = None
    repetitions: int | None = None

    def __post_init__(self):
        _check_open_unit('epsilon', self.epsilon)
        _check_open_unit('delta', self.delta)
        _check_open_unit('eta1', self.eta1)
        if self.eta2 is not None:
            _check_open_unit('eta2', self.eta2)
        if self.z is not None and self.z < 1:
            raise ValueError(f"z must be >= 1, got {self.z}")
        if self.repetitions is not None and self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")

    @property
    def rounds(self) -> int:
        """Round cap z."""
        if self.z is not None:
            return self.z
        return safe_ceil(2.0 / self.epsilon) + 1

    def with_changes(self, **changes) -> 'BiCriteriaParams':
        return replace(self, **changes)

    def to_dict(self) -> dict:
        data = asdict(self)
        data['rounds'] = self.rounds
        return data
