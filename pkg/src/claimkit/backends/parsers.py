"""Structured-response parsers for judge replies.

Every parser either returns a typed value or raises JudgeParseError; there
are no silent defaults. Reward policy for parse failures lives upstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ..corpus import Label
from .judges import JudgeParseError

_ANSWER_BLOCK = re.compile(r"<answer>(.*?)</answer>", re.DOTALL | re.IGNORECASE)
_VERDICT_BLOCK = re.compile(r"<verdict>(.*?)</verdict>", re.DOTALL | re.IGNORECASE)


class ThreeWayVerdict(Enum):
    SUPPORTED = "Supported"
    REFUTED = "Refuted"
    NOT_ENOUGH_INFO = "NotEnoughInfo"

    @classmethod
    def from_label(cls, label: Label) -> "ThreeWayVerdict":
        return cls.SUPPORTED if label is Label.SUPPORTED else cls.REFUTED


def parse_binary_answer(text: str) -> int:
    """Extract the last <answer> block; its content must be exactly 0 or 1."""
    blocks = _ANSWER_BLOCK.findall(text)
    if not blocks:
        raise JudgeParseError("no <answer> block in reply")
    content = blocks[-1].strip()
    if content == "0":
        return 0
    if content == "1":
        return 1
    raise JudgeParseError(f"<answer> content not in {{0,1}}: {content!r}")


ATOMICITY_KEYS = ("is_question", "single_focus", "no_conjunctions", "verifiable", "grounded")


@dataclass(frozen=True)
class AtomicityChecklist:
    is_question: bool
    single_focus: bool
    no_conjunctions: bool
    verifiable: bool
    grounded: bool

    def fraction_passed(self) -> float:
        values = (self.is_question, self.single_focus, self.no_conjunctions,
                  self.verifiable, self.grounded)
        return sum(values) / len(values)


def parse_atomicity(text: str) -> AtomicityChecklist:
    """Read the five key:YES/NO lines inside <answer>, order-insensitive by key."""
    blocks = _ANSWER_BLOCK.findall(text)
    if not blocks:
        raise JudgeParseError("no <answer> block in reply")
    found: dict[str, bool] = {}
    for line in blocks[-1].splitlines():
        line = line.strip()
        if ":" not in line:
            continue
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip().upper()
        if key in ATOMICITY_KEYS and value in ("YES", "NO"):
            found[key] = value == "YES"
    for key in ATOMICITY_KEYS:
        if key not in found:
            raise JudgeParseError(f"missing atomicity key: {key}")
    return AtomicityChecklist(**found)


_VERDICT_VALUES = {
    "supported": ThreeWayVerdict.SUPPORTED,
    "refuted": ThreeWayVerdict.REFUTED,
    "not enough information": ThreeWayVerdict.NOT_ENOUGH_INFO,
    "not enough info": ThreeWayVerdict.NOT_ENOUGH_INFO,
    "not_enough_info": ThreeWayVerdict.NOT_ENOUGH_INFO,
}


def parse_verdict(text: str) -> ThreeWayVerdict:
    """Map the last <verdict> block case-insensitively onto the three values."""
    blocks = _VERDICT_BLOCK.findall(text)
    if not blocks:
        raise JudgeParseError("no <verdict> block in reply")
    content = blocks[-1].strip().lower().rstrip(".")
    verdict = _VERDICT_VALUES.get(content)
    if verdict is None:
        raise JudgeParseError(f"unrecognized verdict content: {blocks[-1].strip()!r}")
    return verdict


_LIST_MARKER = re.compile(r"^\s*(?:\d+[.)]|[-*•])\s*")


def parse_question_list(text: str) -> list[str]:
    """Parse the silver-decomposition reply into a list of questions.

    Accepts numbered, bulleted, or bare lines; a question is a line that ends
    with '?' after stripping list markers. Zero questions is a parse error.
    """
    questions: list[str] = []
    for line in text.splitlines():
        stripped = _LIST_MARKER.sub("", line.strip())
        if stripped.endswith("?"):
            questions.append(stripped)
    if not questions:
        raise JudgeParseError("no questions found in decomposition reply")
    return questions
