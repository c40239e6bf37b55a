"""Exception types raised by infodist."""


class InfodistError(Exception):
    """Base class for all library errors."""


class InvalidInput(InfodistError, ValueError):
    pass


class InvalidDistribution(InfodistError, ValueError):
    pass


class InvalidSpec(InfodistError, ValueError):
    pass


class InvalidInstrument(InfodistError, ValueError):
    pass


class OutcomeImpossible(InfodistError):
    """The outcome has (numerically) zero probability, so no post-state exists."""


class RankDeficient(InfodistError):
    pass


class NotReversible(InfodistError):
    pass


class PreconditionViolated(InfodistError):
    pass
