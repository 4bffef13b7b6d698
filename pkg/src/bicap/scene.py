"""Flat sectioned key=value scene files with typed values.

Grammar, line by line:

* ``[section]`` opens a section; keys before the first section are illegal;
* ``key = value`` assigns into the current section;
* ``#`` starts a comment (anywhere outside a quoted string);
* values are typed: ``true``/``false``, integers, floats, ``[v, v, ...]``
  one-dimensional numeric arrays, ``"quoted strings"``, or bare words.

Errors always name the offending section and key.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["SceneError", "Scene", "parse_scene", "load_scene"]

_MISSING = object()

_SECTION_RE = re.compile(r"^\[([A-Za-z0-9_.-]+)\]$")
_KEY_RE = re.compile(r"^[A-Za-z0-9_.-]+$")
_INT_RE = re.compile(r"^[+-]?\d+$")


class SceneError(ValueError):
    """Malformed scene input; the message names the offending key."""


def _strip_comment(line: str) -> str:
    out = []
    in_quote = False
    for ch in line:
        if ch == '"':
            in_quote = not in_quote
        if ch == "#" and not in_quote:
            break
        out.append(ch)
    return "".join(out).strip()


def _parse_scalar(token: str, where: str):
    if token == "true":
        return True
    if token == "false":
        return False
    if _INT_RE.match(token):
        return int(token)
    try:
        return float(token)
    except ValueError:
        pass
    if token.startswith('"'):
        if len(token) < 2 or not token.endswith('"') or '"' in token[1:-1]:
            raise SceneError(f"{where}: unterminated string {token!r}")
        return token[1:-1]
    if _KEY_RE.match(token):
        return token
    raise SceneError(f"{where}: cannot parse value {token!r}")


def _parse_value(text: str, where: str):
    if text.startswith("["):
        if not text.endswith("]"):
            raise SceneError(f"{where}: unterminated array")
        body = text[1:-1].strip()
        if not body:
            return []
        items = [_parse_scalar(tok.strip(), where) for tok in body.split(",")]
        for item in items:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise SceneError(f"{where}: arrays hold numbers only")
        return items
    return _parse_scalar(text, where)


@dataclass(frozen=True)
class Scene:
    """Parsed scene: sections mapping keys to typed values."""

    sections: dict[str, dict[str, object]]
    sha256: str | None = None
    path: str | None = None

    def has_section(self, name: str) -> bool:
        return name in self.sections

    def section(self, name: str) -> dict[str, object]:
        if name not in self.sections:
            raise SceneError(f"missing scene section [{name}]")
        return self.sections[name]

    def get(self, section: str, key: str, default=_MISSING):
        sec = self.sections.get(section)
        if sec is None or key not in sec:
            if default is _MISSING:
                if sec is None:
                    raise SceneError(f"missing scene section [{section}]")
                raise SceneError(f"missing scene key {section}.{key}")
            return default
        return sec[key]

    def _typed(self, section: str, key: str, kinds, label: str, default):
        sec = self.sections.get(section) or {}
        if key not in sec:
            return self.get(section, key, default)  # default or the right error
        val = sec[key]
        if (isinstance(val, bool) and bool not in kinds) or not isinstance(val, tuple(kinds)):
            raise SceneError(f"scene key {section}.{key} must be {label}")
        return val

    def get_str(self, section: str, key: str, default=_MISSING) -> str:
        return self._typed(section, key, (str,), "a string", default)

    def get_bool(self, section: str, key: str, default=_MISSING) -> bool:
        return self._typed(section, key, (bool,), "a boolean", default)

    def get_int(self, section: str, key: str, default=_MISSING) -> int:
        return self._typed(section, key, (int,), "an integer", default)

    def get_float(self, section: str, key: str, default=_MISSING):
        val = self._typed(section, key, (int, float), "a number", default)
        return float(val) if isinstance(val, (int, float)) and not isinstance(val, bool) else val

    def get_floats(self, section: str, key: str, default=_MISSING):
        val = self._typed(section, key, (list,), "an array", default)
        return [float(v) for v in val] if isinstance(val, list) else val


def parse_scene(text: str, path: str | None = None) -> Scene:
    sections: dict[str, dict[str, object]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            current = m.group(1)
            if current in sections:
                raise SceneError(f"line {lineno}: duplicate section [{current}]")
            sections[current] = {}
            continue
        if "=" not in line:
            raise SceneError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not _KEY_RE.match(key):
            raise SceneError(f"line {lineno}: bad key {key!r}")
        if current is None:
            raise SceneError(f"line {lineno}: key {key!r} appears before any [section]")
        if key in sections[current]:
            raise SceneError(f"line {lineno}: duplicate key {current}.{key}")
        value = value.strip()
        if not value:
            raise SceneError(f"line {lineno}: key {current}.{key} has no value")
        sections[current][key] = _parse_value(value, f"line {lineno}, key {current}.{key}")
    return Scene(sections=sections, path=path)


def load_scene(path: str | Path) -> Scene:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise SceneError(f"cannot read scene file {p}: {exc}") from exc
    scene = parse_scene(data.decode("utf-8"), path=str(p))
    return Scene(sections=scene.sections, sha256=hashlib.sha256(data).hexdigest(), path=str(p))
