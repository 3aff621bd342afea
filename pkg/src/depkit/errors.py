"""Exception types shared across the toolkit.

Domain failures that a caller can reasonably handle derive from
``DepkitError``; the CLI maps them to exit code 1.  Checker rejections are
*not* errors (they are verdicts carried by ``CheckOutcome``).
"""

from __future__ import annotations


class DepkitError(Exception):
    """Base class for all domain errors raised by depkit."""


class ParseError(DepkitError):
    """Malformed micro-article source."""

    def __init__(self, message: str, source_file: str, line: int):
        super().__init__(f"{source_file}:{line}: {message}")
        self.source_file = source_file
        self.line = line


class DuplicateNameError(DepkitError):
    """The same item name was introduced twice."""

    def __init__(self, name: str, first_file: str, second_file: str):
        super().__init__(
            f"duplicate item name {name!r} (first in {first_file}, again in {second_file})"
        )
        self.name = name
        self.first_file = first_file
        self.second_file = second_file


class DanglingThenError(DepkitError):
    """A 'then' link has no preceding statement to attach to."""

    def __init__(self, source_file: str, index_in_file: int):
        super().__init__(
            f"{source_file}: item #{index_in_file} starts with 'then' but has no "
            "preceding definition or theorem to link to"
        )
        self.source_file = source_file
        self.index_in_file = index_in_file


class NotVerifiableError(DepkitError):
    """An item fails to check even under its full candidate environment."""

    def __init__(self, item_name: str, reason: str):
        super().__init__(f"item {item_name!r} does not verify under its full environment ({reason})")
        self.item_name = item_name
        self.reason = reason


class CorpusMismatchError(DepkitError):
    """Two artifacts that must describe the same corpus do not."""


class UnknownItemError(DepkitError):
    """A name does not resolve to any known item (or file)."""

    def __init__(self, name: str):
        super().__init__(f"unknown item: {name!r}")
        self.name = name


class CycleDetectedError(DepkitError):
    """Dependency edges contradict the corpus ordering."""
