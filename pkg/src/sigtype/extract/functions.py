"""AST mining: one :class:`RawFunction` per ``def`` in a module."""
from __future__ import annotations

import ast
import io
import json
import re
import tokenize
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from sigtype.errors import ParseFailure
from sigtype.extract.corpus import ExtractionStats, ProjectManifest, SourceFile, enumerate_sources
from sigtype.extract.docstrings import parse_docstring

JSON_KEYS = (
    "project",
    "path",
    "qualname",
    "line",
    "name",
    "docstring",
    "fn_comment",
    "params",
    "param_types",
    "param_comments",
    "return_exprs",
    "return_type",
    "return_comment",
)

_WS = re.compile(r"\s+")


@dataclass
class RawFunction:
    """Natural-language context of one function.

    ``params``, ``param_types`` and ``param_comments`` are parallel lists.
    ``return_exprs`` holds one non-empty token list per ``return <expr>``.
    """

    project: str
    path: str
    qualname: str
    line: int
    name: str
    docstring: str | None = None
    fn_comment: str | None = None
    params: list[str] = field(default_factory=list)
    param_types: list[str | None] = field(default_factory=list)
    param_comments: list[str | None] = field(default_factory=list)
    return_exprs: list[list[str]] = field(default_factory=list)
    return_type: str | None = None
    return_comment: str | None = None
    # Docstring parameter entries that match no parameter name; not serialized.
    orphan_param_comments: dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not len(self.params) == len(self.param_types) == len(self.param_comments):
            raise ValueError(f"{self.qualname}: parameter lists differ in length")

    @property
    def identity(self) -> str:
        return f"{self.project}/{self.path}::{self.qualname}@{self.line}"

    @property
    def is_typed(self) -> bool:
        return self.return_type is not None or any(t is not None for t in self.param_types)

    def to_json(self) -> dict:
        return {key: getattr(self, key) for key in JSON_KEYS}

    @classmethod
    def from_json(cls, obj: dict) -> RawFunction:
        missing = set(JSON_KEYS) - obj.keys()
        if missing:
            raise ValueError(f"function record lacks keys {sorted(missing)}")
        return cls(**{key: obj[key] for key in JSON_KEYS})


def parse_module(source: SourceFile) -> ast.Module:
    """Parse ``source`` as Python 3, raising :class:`ParseFailure` on error."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SyntaxWarning)
            return ast.parse(source.text, filename=source.relative_path)
    except (SyntaxError, ValueError, RecursionError, MemoryError) as exc:
        reason = getattr(exc, "msg", None) or str(exc) or type(exc).__name__
        raise ParseFailure(source.project_id, source.relative_path, reason) from None


def normalize_annotation(node: ast.expr, text: str | None) -> str:
    """Verbatim annotation source with whitespace collapsed.

    A string-literal (forward reference) annotation loses one level of quotes.
    """
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        raw = node.value
    else:
        raw = ast.get_source_segment(text, node) if text is not None else None
        if raw is None:
            raw = ast.unparse(node)
    return _WS.sub(" ", raw).strip()


def extract_return_identifiers(expr: ast.expr, text: str | None = None) -> list[str]:
    """Identifier names and keywords of a return expression, in source order.

    Literals and operators are dropped; attribute names count as identifiers,
    so ``self.first + ' ' + name`` gives ``['self', 'first', 'name']``.
    """
    segment = ast.get_source_segment(text, expr) if text is not None else None
    if segment is None:
        segment = ast.unparse(expr)
    # Parenthesize so multi-line segments tokenize as one logical line.
    readline = io.StringIO(f"({segment})").readline
    tokens = []
    try:
        for tok in tokenize.generate_tokens(readline):
            if tok.type == tokenize.NAME:
                tokens.append(tok.string)
    except (tokenize.TokenError, IndentationError, SyntaxError):
        return extract_return_identifiers(expr) if text is not None else tokens
    return tokens


def _returns(body):
    """Return statements of a function body, skipping nested scopes."""
    stack = list(reversed(body))
    while stack:
        node = stack.pop()
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef, ast.Lambda)):
            continue
        if isinstance(node, ast.Return):
            yield node
            continue
        stack.extend(reversed(list(ast.iter_child_nodes(node))))


def _arguments(args: ast.arguments):
    ordered = [*args.posonlyargs, *args.args]
    if args.vararg is not None:
        ordered.append(args.vararg)
    ordered.extend(args.kwonlyargs)
    if args.kwarg is not None:
        ordered.append(args.kwarg)
    return ordered


def _build(node, qualname, source, text) -> RawFunction:
    docstring = ast.get_docstring(node)
    info = parse_docstring(docstring)
    arguments = _arguments(node.args)
    names = [arg.arg for arg in arguments]
    types = [
        normalize_annotation(arg.annotation, text) if arg.annotation is not None else None
        for arg in arguments
    ]
    comments = [info.param_comments.get(name) for name in names]
    orphans = {k: v for k, v in info.param_comments.items() if k not in names}

    return_exprs = []
    for ret in _returns(node.body):
        if ret.value is None:
            continue
        tokens = extract_return_identifiers(ret.value, text)
        if tokens:
            return_exprs.append(tokens)

    return RawFunction(
        project=source.project_id if source else "",
        path=source.relative_path if source else "",
        qualname=qualname,
        line=node.lineno,
        name=node.name,
        docstring=docstring if docstring else None,
        fn_comment=(info.description or None) if info.structured else None,
        params=names,
        param_types=types,
        param_comments=comments,
        return_exprs=return_exprs,
        return_type=normalize_annotation(node.returns, text) if node.returns is not None else None,
        return_comment=info.return_comment if info.structured else None,
        orphan_param_comments=orphans,
    )


def extract_functions(tree: ast.Module, source: SourceFile | None = None) -> list[RawFunction]:
    """Every function and method in ``tree`` (including nested ones), in source order."""
    text = source.text if source is not None else None
    found = []

    def visit(body, prefix):
        for node in body:
            if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
                qualname = prefix + node.name
                found.append(_build(node, qualname, source, text))
                visit(node.body, qualname + ".<locals>.")
            elif isinstance(node, ast.ClassDef):
                visit(node.body, prefix + node.name + ".")
            else:
                # Definitions under if/try/with/for blocks keep the enclosing prefix.
                for child_body in _nested_bodies(node):
                    visit(child_body, prefix)

    visit(tree.body, "")
    return found


def _nested_bodies(node):
    for name in ("body", "orelse", "finalbody"):
        value = getattr(node, name, None)
        if isinstance(value, list) and value and isinstance(value[0], ast.stmt):
            yield value
    for handler in getattr(node, "handlers", ()) or ():
        yield handler.body
    for case in getattr(node, "cases", ()) or ():
        yield case.body


def extract_corpus(manifest: ProjectManifest, stats: ExtractionStats | None = None) -> list[RawFunction]:
    """Extract functions from every source file; parse failures are recorded, not raised."""
    stats = stats if stats is not None else ExtractionStats()
    functions = []
    for source in enumerate_sources(manifest, stats):
        try:
            tree = parse_module(source)
        except ParseFailure as failure:
            stats.failed += 1
            stats.failures.append((failure.project_id, failure.relative_path, failure.reason))
            continue
        stats.parsed += 1
        extracted = extract_functions(tree, source)
        stats.functions += len(extracted)
        stats.typed_functions += sum(fn.is_typed for fn in extracted)
        stats.orphan_param_comments += sum(len(fn.orphan_param_comments) for fn in extracted)
        functions.extend(extracted)
    return functions


def write_functions(functions, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for fn in functions:
            fh.write(json.dumps(fn.to_json(), ensure_ascii=False))
            fh.write("\n")


def read_functions(path) -> list[RawFunction]:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return [RawFunction.from_json(json.loads(line)) for line in fh if line.strip()]
