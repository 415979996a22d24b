class KeyLeasingError(ValueError):
    pass


class SimulationError(KeyLeasingError):
    pass


class LayoutError(SimulationError):
    """Register layout does not fit the requested operation"""


class WidthMismatch(KeyLeasingError):
    """Two bit strings (or a bit string and a register) disagree in width"""


class TermCapExceeded(SimulationError):
    pass


class HadamardCapExceeded(SimulationError):
    pass


class RankLimitExceeded(SimulationError):
    """The difference space of a Hadamard-measured segment is too large to sample"""


class DenseLimitExceeded(SimulationError):
    pass


class BackendError(KeyLeasingError):
    pass


class UnknownHandle(BackendError):
    pass


class SlotArityError(BackendError):
    pass


class SlotIndexError(BackendError):
    pass


class ConfigurationError(KeyLeasingError):
    pass


class GameError(KeyLeasingError):
    """The challenger was driven in a way the experiment does not allow"""
