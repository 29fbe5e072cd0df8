"""Exception hierarchy shared by all pipeline stages."""


class GestureError(Exception):
    """Base class for all domain errors raised by this package."""


# -- signal / calibration ------------------------------------------------

class AlreadyCalibrated(GestureError):
    pass


class InvalidCalibration(GestureError):
    pass


class DegenerateReadings(GestureError):
    pass


class TraceTooShort(GestureError):
    pass


class WindowTooLarge(GestureError):
    pass


# -- kinematics ----------------------------------------------------------

class DynamicTail(GestureError):
    pass


class NoGesture(GestureError):
    pass


# -- position classifier -------------------------------------------------

class InvalidHeight(GestureError):
    pass


class EmptyLabel(GestureError):
    pass


# -- feature classifier / evaluation ---------------------------------------

class EmptyTrainingSet(GestureError):
    pass


class UnknownLabel(GestureError):
    pass


class EmptyMatrix(GestureError):
    pass


class EmptyColumn(GestureError):
    pass


class InsufficientRows(GestureError):
    pass


# -- detectors -------------------------------------------------------------

class WindowTooShort(GestureError):
    pass


class NoStaticTail(GestureError):
    pass


# -- shortcut engine --------------------------------------------------------

class NoSuggestions(GestureError):
    pass


class IllegalEvent(GestureError):
    pass


class SessionNotFinal(GestureError):
    pass


# -- synthesis ----------------------------------------------------------------

class InvalidSpec(GestureError):
    pass
