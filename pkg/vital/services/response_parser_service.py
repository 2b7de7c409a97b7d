"""
ResponseParserService - turns model answers back into PropertyScores.

Strict mode accepts exactly the five contract lines, in order. Lenient mode
first tries strict, then scans the whole text case-insensitively for the
first occurrence of each key and records a warning for every deviation.
Out-of-range and non-integer scores are rejected in both modes.

Values are whitespace-normalized: OBJECT, MATERIAL and rationales come back
without leading or trailing whitespace, matching what render_contract writes.
"""

import re
from typing import Dict, List, Optional, Tuple

from .base_service import BaseService
from .prompt_service import CONTRACT_KEYS
from ..exceptions import ParseException, RangeException
from ..models.scoring import SCORE_MAX, SCORE_MIN, ParsedResponse, ParseMode, PhysicalProperty, PropertyScores

UNKNOWN = "unknown"

_TEXT_LINE = re.compile(r"^(OBJECT|MATERIAL):\s*(.+?)\s*$")
_SCORE_LINE = re.compile(r"^(HARDNESS|ELASTICITY|ROUGHNESS):\s*(-?\d+)\s*\|\s*([^|]*?)\s*$")
_LINE_KEY = re.compile(r"^\s*(OBJECT|MATERIAL|HARDNESS|ELASTICITY|ROUGHNESS)\s*:")
_ANY_SCORE = re.compile(r"\b(hardness|elasticity|roughness)\s*:\s*(-?\d+(?:\.\d+)?)(?!\d)", re.IGNORECASE)
_ANY_KEY = re.compile(r"\b(object|material|hardness|elasticity|roughness)\s*:", re.IGNORECASE)
_LEADING_SCORE = re.compile(r"^\s*(-?\d+(?:\.\d+)?)(?!\d)")
_SEPARATOR = re.compile(r"^\s*(?:\||-|:|,)?\s*")
_TRAILING = " \t,;.…"


def integer_score(key: str, raw: str) -> int:
    """A contract score: an integer in [SCORE_MIN, SCORE_MAX], never a decimal."""
    if "." in raw:
        raise RangeException(f"{key} score {raw} is not an integer in [{SCORE_MIN}, {SCORE_MAX}]")
    score = int(raw)
    if not SCORE_MIN <= score <= SCORE_MAX:
        raise RangeException(f"{key} score {score} outside [{SCORE_MIN}, {SCORE_MAX}]")
    return score


def check_score_ranges(text: str) -> None:
    for match in _ANY_SCORE.finditer(text):
        integer_score(match.group(1).upper(), match.group(2))


def parse_strict(text: str) -> PropertyScores:
    lines = [line for line in text.splitlines() if line.strip()]

    seen: Dict[str, int] = {}
    for number, line in enumerate(lines, start=1):
        key_match = _LINE_KEY.match(line)
        if key_match:
            key = key_match.group(1)
            if key in seen:
                raise ParseException(f"line {number}: duplicate {key} line (first on line {seen[key]})", number)
            seen[key] = number

    values: Dict[str, Tuple[str, ...]] = {}
    for index, key in enumerate(CONTRACT_KEYS):
        number = index + 1
        if index >= len(lines):
            raise ParseException(f"line {number}: missing {key} line", number)
        pattern = _TEXT_LINE if key in ("OBJECT", "MATERIAL") else _SCORE_LINE
        match = pattern.match(lines[index])
        if not match or match.group(1) != key:
            expected = f"{key}: <value>" if pattern is _TEXT_LINE else f"{key}: <1-10> | <rationale>"
            raise ParseException(f"line {number}: expected '{expected}', got {lines[index]!r}", number)
        values[key] = match.groups()[1:]

    if len(lines) > len(CONTRACT_KEYS):
        number = len(CONTRACT_KEYS) + 1
        raise ParseException(f"line {number}: unexpected extra line {lines[number - 1]!r}", number)

    return PropertyScores(
        object_name=values["OBJECT"][0],
        material=values["MATERIAL"][0],
        hardness=int(values["HARDNESS"][0]),
        elasticity=int(values["ELASTICITY"][0]),
        roughness=int(values["ROUGHNESS"][0]),
        rationales={p: values[p.label][1] for p in PhysicalProperty},
    )


def _scan(text: str) -> Tuple[Dict[str, Tuple[str, str]], List[str], List[str]]:
    """First (raw key, value) per key, the order keys were found in, and duplicate keys."""
    matches = list(_ANY_KEY.finditer(text))
    found: Dict[str, Tuple[str, str]] = {}
    order: List[str] = []
    duplicates: List[str] = []
    for position, match in enumerate(matches):
        key = match.group(1).upper()
        if key in found:
            if key not in duplicates:
                duplicates.append(key)
            continue
        end = matches[position + 1].start() if position + 1 < len(matches) else len(text)
        newline = text.find("\n", match.end())
        if newline != -1:
            end = min(end, newline)
        found[key] = (match.group(1), text[match.end():end])
        order.append(key)
    return found, order, duplicates


def parse_lenient(text: str) -> Tuple[PropertyScores, List[str]]:
    try:
        return parse_strict(text), []
    except ParseException as e:
        warnings = [f"response deviates from the five-line contract ({e})"]

    found, order, duplicates = _scan(text)
    if [k for k in CONTRACT_KEYS if k in found] != order:
        warnings.append(f"keys out of order: {', '.join(order)}")
    for key in duplicates:
        warnings.append(f"{key} appears more than once; first occurrence used")
    for key, (raw, _) in found.items():
        if raw != key:
            warnings.append(f"{key} written as {raw!r}")

    texts: Dict[str, str] = {}
    for key in ("OBJECT", "MATERIAL"):
        value = found[key][1].strip().strip(_TRAILING) if key in found else ""
        if not value:
            warnings.append(f"{key} missing; using {UNKNOWN!r}")
            value = UNKNOWN
        texts[key] = value

    scores: Dict[PhysicalProperty, int] = {}
    rationales: Dict[PhysicalProperty, str] = {}
    for prop in PhysicalProperty:
        if prop.label not in found:
            raise ParseException(f"no {prop.label} score found in the response")
        value = found[prop.label][1]
        number = _LEADING_SCORE.match(value)
        if not number:
            raise ParseException(f"{prop.label} value {value.strip()!r} does not start with an integer score")
        scores[prop] = integer_score(prop.label, number.group(1))
        rationale = _SEPARATOR.sub("", value[number.end():], count=1).strip().strip(_TRAILING).strip()
        if not rationale:
            warnings.append(f"{prop.label} has no rationale")
        rationales[prop] = rationale

    result = PropertyScores(
        object_name=texts["OBJECT"],
        material=texts["MATERIAL"],
        hardness=scores[PhysicalProperty.HARDNESS],
        elasticity=scores[PhysicalProperty.ELASTICITY],
        roughness=scores[PhysicalProperty.ROUGHNESS],
        rationales=rationales,
    )
    return result, warnings


def parse_response(text: str, mode: ParseMode) -> ParsedResponse:
    check_score_ranges(text)
    if mode is ParseMode.STRICT:
        return ParsedResponse(parse_strict(text), mode, [])
    scores, warnings = parse_lenient(text)
    return ParsedResponse(scores, mode, warnings)


class ResponseParserService(BaseService):
    """Parses responses and logs format deviations."""

    def __init__(self, mode: ParseMode = ParseMode.STRICT):
        super().__init__()
        self.mode = mode

    def parse(self, text: str, object_id: Optional[str] = None) -> ParsedResponse:
        parsed = parse_response(text, self.mode)
        for warning in parsed.warnings:
            self.log_warning(f"⚠️ {object_id or 'response'}: {warning}")
        return parsed
