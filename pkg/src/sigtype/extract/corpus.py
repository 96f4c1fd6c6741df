"""Project manifests and source-file enumeration."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from sigtype.errors import DuplicateProjectId, MalformedManifest, MissingFile

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ManifestEntry:
    project_id: str
    root: Path


@dataclass
class ProjectManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class SourceFile:
    project_id: str
    relative_path: str
    text: str


@dataclass
class ExtractionStats:
    files: int = 0
    skipped: int = 0
    parsed: int = 0
    failed: int = 0
    functions: int = 0
    typed_functions: int = 0
    orphan_param_comments: int = 0
    failures: list[tuple[str, str, str]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "files": self.files,
            "skipped": self.skipped,
            "parsed": self.parsed,
            "failed": self.failed,
            "functions": self.functions,
            "typed_functions": self.typed_functions,
            "orphan_param_comments": self.orphan_param_comments,
            "failures": [list(f) for f in self.failures],
        }


def load_manifest(path) -> ProjectManifest:
    """Read a ``<project_id><TAB><root>`` manifest.

    Blank lines and lines starting with ``#`` are ignored. Relative roots are
    resolved against the manifest's directory.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"manifest not found: {path}")
    entries = []
    seen = set()
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise MalformedManifest(f"{path}:{lineno}: expected '<project_id>\\t<root>'")
        project_id, root = parts[0].strip(), Path(parts[1].strip())
        if project_id in seen:
            raise DuplicateProjectId(f"{path}:{lineno}: duplicate project id {project_id!r}")
        if not root.is_absolute():
            root = path.parent / root
        if not root.is_dir():
            raise MissingFile(f"{path}:{lineno}: project root does not exist: {root}")
        seen.add(project_id)
        entries.append(ManifestEntry(project_id, root))
    return ProjectManifest(entries)


def enumerate_sources(manifest: ProjectManifest, stats: ExtractionStats | None = None) -> list[SourceFile]:
    """List every ``*.py`` file under each project root, sorted by project then path.

    Files that are not valid UTF-8 are skipped and counted in ``stats.skipped``.
    """
    sources = []
    for entry in manifest:
        for file in entry.root.rglob("*.py"):
            if not file.is_file():
                continue
            relative = file.relative_to(entry.root).as_posix()
            if stats is not None:
                stats.files += 1
            try:
                text = file.read_bytes().decode("utf-8")
            except (UnicodeDecodeError, OSError) as exc:
                log.debug("skipping %s:%s: %s", entry.project_id, relative, exc)
                if stats is not None:
                    stats.skipped += 1
                continue
            sources.append(SourceFile(entry.project_id, relative, text))
    sources.sort(key=lambda s: (s.project_id, s.relative_path))
    return sources
