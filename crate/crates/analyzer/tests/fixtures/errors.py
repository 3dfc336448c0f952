"""Fixture exercising error-category rules."""
import os
import json as j


def broken(a, b, a):
    """Duplicate parameter."""
    return missing_name + a + b


def handler(path):
    """Swallow everything."""
    try:
        return open(path).read()
    except:
        return None


class Holder:
    """Holds a value."""

    value = 3

    def get(self):
        """Read the class attribute without qualification."""
        return value


return os.sep
