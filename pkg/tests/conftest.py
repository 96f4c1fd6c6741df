import time
from contextlib import contextmanager
from pathlib import Path

import pytest

from sigtype.extract import SourceFile, extract_functions, parse_module

PERSON = '''\
class Person:
    def full(self, sep: str = " ") -> str:
        """Join the person's names.

        Args:
            sep: Separator placed between first and last name.
            ghost: Not a parameter at all.

        Returns:
            The full name.
        """
        return self.first + sep + self.last
'''


def write_project(root: Path, files: dict[str, str | bytes], project="demo") -> Path:
    """Lay out one project under ``root`` and return a manifest naming it."""
    for rel, content in files.items():
        target = root / project / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, bytes):
            target.write_bytes(content)
        else:
            target.write_text(content, encoding="utf-8")
    manifest = root / "manifest.tsv"
    manifest.write_text(f"{project}\t{project}\n", encoding="utf-8")
    return manifest


def functions_of(text: str, project="p", path="m.py"):
    src = SourceFile(project, path, text)
    return extract_functions(parse_module(src), src)


@pytest.fixture
def person():
    (fn,) = functions_of(PERSON)
    return fn


# (name, passed, detail) per acceptance criterion, printed after the run
ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Context manager recording one acceptance criterion as PASS or FAIL.

    The body may fill the yielded dict's ``note``; a ``budget`` in seconds
    turns an overlong run into a failure.
    """
    @contextmanager
    def run(name, budget=None):
        info = {"note": ""}
        start = time.perf_counter()
        try:
            yield info
        except BaseException as exc:
            first = (str(exc).splitlines() or [""])[0][:120]
            ACCEPTANCE.append((name, False, f"{type(exc).__name__}: {first}"))
            print(f"FAIL  {name}")
            raise
        elapsed = time.perf_counter() - start
        ok = budget is None or elapsed < budget
        limit = f" (limit {budget:g}s)" if budget is not None else ""
        note = "; ".join(part for part in (info["note"], f"{elapsed:.2f}s{limit}") if part)
        ACCEPTANCE.append((name, ok, note))
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {note}")
        assert ok, f"{name} took {elapsed:.1f}s, over the {budget}s limit"
    return run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, note in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {note}")
