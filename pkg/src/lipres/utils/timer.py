"""Time Operation."""

import time
from functools import wraps
from typing import Any, Callable, Optional

import arrow
from arrow import Arrow
from loguru import logger

__all__ = [
    "timing",
    "Timer",
]


def timing(func: Callable) -> Any:
    """Measure Timing of functions, logged at DEBUG level.

    :Usage Example:

    @timing
    def fit_all(frames: list) -> list:
        ...

    """

    @wraps(func)
    def wrap(*args: Any, **kwargs: Any) -> Any:
        """Wrap function."""
        start = time.perf_counter()
        result = func(*args, **kwargs)
        end = time.perf_counter()
        logger.debug("func:{} took: {:2.4f} sec", func.__qualname__, end - start)
        return result

    return wrap


class Timer:
    """Wall clock for run metadata and stage durations."""

    def __init__(self, tz_info: str = "UTC") -> None:
        """Init Timer."""
        self._tz_info: str = tz_info
        self._fmt: str = "YYYY-MM-DD HH:mm:ssZZ"
        self._start: float = time.perf_counter()
        self._stages: dict[str, float] = {}

    def to_now(self) -> Arrow:
        """Get now `Arrow` object."""
        return arrow.utcnow().to(tz=self._tz_info)

    def to_str(self, now: Optional[Arrow] = None, fmt: str = "") -> str:
        """string format for now"""
        fmt = fmt if fmt else self._fmt
        now = now if now else self.to_now()
        return now.format(fmt)

    def elapsed(self) -> float:
        """Seconds since the timer was created."""
        return time.perf_counter() - self._start

    def add_stage(self, name: str, seconds: float) -> None:
        """Accumulate seconds spent in a named stage."""
        self._stages[name] = self._stages.get(name, 0.0) + seconds

    @property
    def stages(self) -> dict[str, float]:
        """Copy of the accumulated stage durations."""
        return dict(self._stages)
