"""The fixed builtin-name table.

Names listed here are assumed defined everywhere, are never offered as
completion suggestions, and never receive trigger markers. The table is
versioned with the package: it must stay deterministic because trigger
insertion depends on it.
"""

from __future__ import annotations

BUILTIN_NAMES = frozenset(
    {
        "print",
        "len",
        "range",
        "abs",
        "min",
        "max",
        "sum",
        "str",
        "int",
        "float",
        "bool",
        "list",
        "dict",
        "set",
        "sorted",
        "enumerate",
        "zip",
        "isinstance",
        "type",
        "True",
        "False",
        "None",
        "__dict__",
        "__doc__",
        "__name__",
        "__class__",
        "__init__",
    }
)


def is_builtin(name: str) -> bool:
    return name in BUILTIN_NAMES
