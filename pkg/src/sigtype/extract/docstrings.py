"""Structured docstring parsing (ReST, Google, NumPy) backed by ``docstring_parser``."""
from __future__ import annotations

from dataclasses import dataclass, field

import docstring_parser
from docstring_parser import DocstringStyle, ParseError

STYLES = {
    "rest": DocstringStyle.REST,
    "google": DocstringStyle.GOOGLE,
    "numpy": DocstringStyle.NUMPYDOC,
}


@dataclass
class DocstringInfo:
    description: str = ""
    param_comments: dict[str, str] = field(default_factory=dict)
    return_comment: str | None = None
    style: str = "unstructured"

    @property
    def structured(self) -> bool:
        return self.style != "unstructured"


def _clean(text):
    if text is None:
        return None
    text = text.strip()
    return text or None


_PARAM_SECTIONS = ("param", "keyword", "other_param")


def _param_keys(name: str) -> list[str]:
    # NumPy allows "x, y : int" to document several parameters at once.
    keys = (part.strip().lstrip("*").strip() for part in name.split(","))
    return [key for key in keys if key]


def _params(parsed):
    return [p for p in parsed.params if p.args and p.args[0] in _PARAM_SECTIONS]


def _score(parsed) -> int:
    params = len(_params(parsed))
    returns = parsed.returns is not None and not parsed.returns.is_generator
    return params + int(returns)


def parse_docstring(docstring: str | None) -> DocstringInfo:
    """Split a docstring into description, per-parameter comments and return comment.

    Each supported style is tried; the one yielding the most parameter and
    return sections wins (earlier styles win ties). A docstring with no such
    sections in any style is ``unstructured`` and only its description is set.
    """
    if not docstring or not docstring.strip():
        return DocstringInfo()
    best, best_style, best_score = None, "unstructured", 0
    for style_name, style in STYLES.items():
        try:
            parsed = docstring_parser.parse(docstring, style=style)
        except (ParseError, ValueError, IndexError, AttributeError, KeyError, TypeError):
            continue
        score = _score(parsed)
        if score > best_score:
            best, best_score, best_style = parsed, score, style_name
    if best is None:
        return DocstringInfo(description=docstring.strip())

    description = "\n\n".join(
        part for part in (_clean(best.short_description), _clean(best.long_description)) if part
    )
    params = {}
    for param in _params(best):
        comment = _clean(param.description)
        if not comment:
            continue
        for key in _param_keys(param.arg_name):
            params.setdefault(key, comment)
    return_comment = None
    if best.returns is not None and not best.returns.is_generator:
        return_comment = _clean(best.returns.description)
    return DocstringInfo(
        description=description,
        param_comments=params,
        return_comment=return_comment,
        style=best_style,
    )
