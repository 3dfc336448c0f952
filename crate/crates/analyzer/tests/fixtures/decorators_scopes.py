"""Decorators, nested scopes and class features."""
import functools

COUNTER = 0


def logged(func):
    """Count calls of `func`."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        global COUNTER
        COUNTER += 1
        return func(*args, **kwargs)
    return wrapper


def make_counter():
    """Return a closure that counts."""
    count = 0

    def step():
        nonlocal count
        count += 1
        return count
    return step


class Shape:
    """Base shape."""

    sides = 0

    def __init__(self, name: str) -> None:
        self._name = name

    @property
    def name(self):
        """The shape name."""
        return self._name

    @staticmethod
    def unit():
        """A unit shape."""
        return Shape("unit")

    @classmethod
    def named(cls, name):
        """Alternate constructor."""
        return cls(name)

    class Meta:
        """Nested metadata."""

        ordering = ("name",)


@logged
def area(shape: Shape, *, scale: float = 1.0, **extra) -> float:
    """Return a placeholder area."""
    return scale * len(shape.name) + len(extra)
