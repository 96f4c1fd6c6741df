"""Generated Python corpora whose natural-language context predicts types.

Each type has its own pools of parameter names, comment phrases, return
variable names and function-name stems. Noise knobs replace informative
names or comments with generic ones, so predictions from names alone are
weaker than predictions from names plus comments.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

PROFILES = {
    "int": dict(
        names=["count", "size", "index", "limit", "offset", "total", "width", "height", "retries", "port"],
        cues=["number of", "how many", "integer count of", "maximum number of", "zero based index of"],
        nouns=["rows", "bytes", "attempts", "workers", "pages"],
        returns=["count", "total", "length", "num_rows", "position"],
        stems=["count", "compute_total", "find_index", "get_length", "measure_size"],
    ),
    "str": dict(
        names=["name", "title", "label", "message", "text", "prefix", "suffix", "username", "url", "encoding"],
        cues=["human readable name of", "text label for", "string identifier of", "display title of", "message shown for"],
        nouns=["user", "report", "widget", "account", "channel"],
        returns=["name", "label", "text", "message", "title"],
        stems=["format_name", "get_title", "render_text", "build_label", "describe"],
    ),
    "bool": dict(
        names=["flag", "enabled", "verbose", "force", "recursive", "strict", "debug", "overwrite", "is_valid", "dry_run"],
        cues=["whether to enable", "true if we should allow", "toggle controlling", "switch that disables", "set true to skip"],
        nouns=["caching", "logging", "validation", "retries", "cleanup"],
        returns=["ok", "found", "success", "valid", "enabled"],
        stems=["is_ready", "has_access", "check_valid", "should_retry", "can_connect"],
    ),
    "float": dict(
        names=["ratio", "rate", "weight", "alpha", "threshold", "scale", "factor", "tolerance", "probability", "temperature"],
        cues=["fraction between zero and one for", "scaling factor applied to", "decimal weight of", "real valued threshold on", "learning rate used by"],
        nouns=["loss", "score", "signal", "gradient", "distance"],
        returns=["ratio", "mean", "score", "weight", "fraction"],
        stems=["compute_ratio", "average", "estimate_rate", "get_weight", "normalize_score"],
    ),
    "List[str]": dict(
        names=["tags", "keywords", "lines", "words", "choices", "columns", "aliases", "hosts", "tokens", "suffixes"],
        cues=["sequence of strings naming", "list of words describing", "ordered collection of labels for", "several textual entries of", "all string keys in"],
        nouns=["columns", "servers", "languages", "authors", "sections"],
        returns=["lines", "words", "tags", "parts", "tokens"],
        stems=["split_lines", "list_tags", "collect_words", "get_columns", "tokenize"],
    ),
    "Dict[str, Any]": dict(
        names=["config", "options", "settings", "metadata", "params", "attrs", "context", "mapping", "payload", "environ"],
        cues=["mapping of keys to values for", "dictionary of settings for", "key value pairs describing", "json like object holding", "lookup table for"],
        nouns=["request", "session", "plugin", "job", "backend"],
        returns=["config", "options", "mapping", "payload", "settings"],
        stems=["load_config", "get_options", "to_dict", "parse_settings", "merge_params"],
    ),
    "bytes": dict(
        names=["data", "blob", "raw", "chunk", "buf", "digest", "body", "packet", "frame", "content"],
        cues=["raw binary content of", "encoded bytes read from", "compressed binary payload of", "octet buffer holding", "binary digest of"],
        nouns=["file", "socket", "image", "archive", "stream"],
        returns=["blob", "raw", "chunk", "digest", "buf"],
        stems=["read_bytes", "encode", "compress", "serialize", "pack"],
    ),
    "Path": dict(
        names=["path", "directory", "folder", "filename", "root", "dest", "source_dir", "output_dir", "cache_dir", "workdir"],
        cues=["filesystem location of", "directory containing", "where to write", "file system path to", "folder used for"],
        nouns=["logs", "results", "downloads", "checkpoints", "templates"],
        returns=["path", "target", "folder", "location", "root"],
        stems=["resolve_path", "find_directory", "get_root", "make_folder", "locate"],
    ),
}

GENERIC_NAMES = ["value", "arg", "obj", "x", "param", "elem", "thing", "other", "inp", "val"]
GENERIC_COMMENTS = ["the input to use", "argument passed through", "value given by the caller", "input for this call"]
GENERIC_RETURNS = ["result", "out", "ret", "res", "value"]
GENERIC_STEMS = ["process", "handle", "run", "apply", "compute"]
FILLER = ["the", "given", "current", "optional", "target", "selected"]


@dataclass(frozen=True)
class CorpusSpec:
    n_functions: int = 2000
    n_projects: int = 4
    functions_per_file: int = 25
    name_noise: float = 0.35
    comment_noise: float = 0.15
    return_noise: float = 0.3
    max_params: int = 3
    param_annotated: float = 0.9
    return_annotated: float = 0.85
    method_share: float = 0.3
    # docstring style shares; the rest of the mass has no docstring
    style_google: float = 0.3
    style_rest: float = 0.15
    style_numpy: float = 0.15
    style_plain: float = 0.15
    param_comment_share: float = 0.9
    return_comment_share: float = 0.9


class _Gen:
    def __init__(self, spec: CorpusSpec, seed: int):
        self.spec = spec
        self.rng = np.random.default_rng(seed)
        self.types = list(PROFILES)

    def pick(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    def chance(self, p):
        return bool(self.rng.random() < p)

    def param_name(self, t, used):
        base = self.pick(GENERIC_NAMES) if self.chance(self.spec.name_noise) else self.pick(PROFILES[t]["names"])
        name, i = base, 2
        while name in used or name == "self":
            name, i = f"{base}{i}", i + 1
        used.add(name)
        return name

    def comment(self, t):
        if self.chance(self.spec.comment_noise):
            return self.pick(GENERIC_COMMENTS).capitalize() + "."
        p = PROFILES[t]
        return f"{self.pick(p['cues']).capitalize()} {self.pick(FILLER)} {self.pick(p['nouns'])}."

    def return_expr(self, t, is_method):
        noisy = self.chance(self.spec.return_noise)
        var = self.pick(GENERIC_RETURNS) if noisy else self.pick(PROFILES[t]["returns"])
        form = int(self.rng.integers(3))
        if is_method and form == 0:
            return f"self.{var}"
        if form == 1:
            return f"{var} if {var} is not None else {self.default_literal(t)}"
        return var

    @staticmethod
    def default_literal(t):
        return {"int": "0", "str": "''", "bool": "False", "float": "0.0", "List[str]": "[]",
                "Dict[str, Any]": "{}", "bytes": "b''", "Path": "Path('.')"}[t]

    def function(self, fn_index, is_method):
        s = self.spec
        ret_t = self.pick(self.types)
        n_params = int(self.rng.integers(1, s.max_params + 1))
        used = set()
        params = []
        for _ in range(n_params):
            t = self.pick(self.types)
            params.append((self.param_name(t, used), t, self.chance(s.param_annotated)))
        stem = self.pick(GENERIC_STEMS) if self.chance(s.name_noise) else self.pick(PROFILES[ret_t]["stems"])
        fname = f"{stem}_{fn_index}"

        style_roll = self.rng.random()
        bounds = np.cumsum([s.style_google, s.style_rest, s.style_numpy, s.style_plain])
        style = ["google", "rest", "numpy", "plain", None][int(np.searchsorted(bounds, style_roll, side="right"))]
        summary = f"{stem.replace('_', ' ').capitalize()} for the {self.pick(PROFILES[ret_t]['nouns'])}."
        pcomments = [self.comment(t) if self.chance(s.param_comment_share) else None for _, t, _ in params]
        rcomment = self.comment(ret_t) if self.chance(s.return_comment_share) else None
        doc = self.docstring(style, summary, params, pcomments, rcomment)

        sig = []
        if is_method:
            sig.append("self")
        for name, t, annotated in params:
            sig.append(f"{name}: {t}" if annotated else name)
        ret_ann = f" -> {ret_t}" if self.chance(s.return_annotated) else ""
        indent = "    " if is_method else ""
        lines = [f"{indent}def {fname}({', '.join(sig)}){ret_ann}:"]
        if doc is not None:
            body_indent = indent + "    "
            doc_lines = doc.split("\n")
            lines.append(f'{body_indent}"""{doc_lines[0]}')
            lines.extend((body_indent + dl) if dl else "" for dl in doc_lines[1:])
            lines.append(f'{body_indent}"""')
        lines.append(f"{indent}    return {self.return_expr(ret_t, is_method)}")
        return "\n".join(lines)

    @staticmethod
    def docstring(style, summary, params, pcomments, rcomment):
        if style is None:
            return None
        if style == "plain":
            return summary
        out = [summary, ""]
        if style == "google":
            out.append("Args:")
            out.extend(f"    {name}: {c}" for (name, _, _), c in zip(params, pcomments) if c)
            if rcomment:
                out += ["", "Returns:", f"    {rcomment}"]
        elif style == "rest":
            out.extend(f":param {name}: {c}" for (name, _, _), c in zip(params, pcomments) if c)
            if rcomment:
                out.append(f":return: {rcomment}")
        else:
            out += ["Parameters", "----------"]
            for (name, _, _), c in zip(params, pcomments):
                if c:
                    out += [f"{name}", f"    {c}"]
            if rcomment:
                out += ["", "Returns", "-------", "object", f"    {rcomment}"]
        return "\n".join(out)


HEADER = "from pathlib import Path\nfrom typing import Any, Dict, List\n\n"


def generate_sources(spec: CorpusSpec = CorpusSpec(), seed: int = 0) -> dict[str, dict[str, str]]:
    """``{project_id: {relative_path: source_text}}`` for a whole corpus."""
    gen = _Gen(spec, seed)
    projects = {f"proj{p}": {} for p in range(spec.n_projects)}
    chunks = []
    for i in range(spec.n_functions):
        chunks.append((gen.chance(spec.method_share), i))
    per_file = spec.functions_per_file
    for file_no, start in enumerate(range(0, len(chunks), per_file)):
        project = f"proj{file_no % spec.n_projects}"
        parts = [HEADER]
        in_class = False
        for is_method, i in chunks[start:start + per_file]:
            if is_method and not in_class:
                parts.append(f"class Component{i}:\n")
                in_class = True
            elif not is_method and in_class:
                parts.append("\n")
                in_class = False
            parts.append(gen.function(i, is_method) + "\n\n")
        projects[project][f"pkg/module_{file_no:03d}.py"] = "".join(parts)
    return projects


def write_corpus(root, spec: CorpusSpec = CorpusSpec(), seed: int = 0) -> Path:
    """Write a generated corpus plus ``manifest.tsv`` under ``root``; returns the manifest path."""
    root = Path(root)
    lines = []
    for project, files in generate_sources(spec, seed).items():
        (root / project).mkdir(parents=True, exist_ok=True)
        for rel, text in files.items():
            target = root / project / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
        lines.append(f"{project}\t{project}")
    manifest = root / "manifest.tsv"
    manifest.write_text("# generated corpus\n" + "\n".join(lines) + "\n", encoding="utf-8")
    return manifest
