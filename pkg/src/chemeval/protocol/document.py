"""Markdown-ish parser for model answers.

Recognises a ``<think>`` block, ATX headers, fenced code blocks, lists and
pipe tables. Malformed constructs are recorded as defects; parsing itself
never fails.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_FENCE = re.compile(r"^\s*(`{3,}|~{3,})\s*([^`\s]*)\s*(.*)$")
_HEADER = re.compile(r"^(#{1,6})\s+(.*?)\s*#*\s*$")
_BAD_HEADER = re.compile(r"^#{1,6}[^#\s]")
_BULLET = re.compile(r"^(\s*)([-*+])\s+(.*)$")
_NUMBERED = re.compile(r"^(\s*)(\d+)[.)]\s+(.*)$")
_TABLE_SEP = re.compile(r"^\s*\|?\s*:?-{2,}:?\s*(\|\s*:?-{2,}:?\s*)*\|?\s*$")
_SHORT_FENCE = re.compile(r"^\s*`{1,2}(?!`)\s*smiles\b", re.IGNORECASE)


@dataclass(frozen=True)
class Span:
    start: int
    end: int


@dataclass(frozen=True)
class ThinkBlock:
    text: str
    span: Span


@dataclass(frozen=True)
class Section:
    level: int
    title: str
    body: str
    span: Span


@dataclass(frozen=True)
class CodeBlock:
    language: str
    content: str
    span: Span


@dataclass(frozen=True)
class ListBlock:
    style: str  # "bullet", "numbered" or "mixed"
    items: tuple[str, ...]
    span: Span
    mixed: bool = False


@dataclass(frozen=True)
class TableBlock:
    column_counts: tuple[int, ...]
    span: Span
    aligned: bool

    @property
    def column_count(self) -> int:
        return self.column_counts[0] if self.column_counts else 0

    @property
    def row_count(self) -> int:
        return len(self.column_counts)

    @property
    def consistent(self) -> bool:
        return len(set(self.column_counts)) <= 1


@dataclass(frozen=True)
class Defect:
    kind: str
    line: int
    message: str


@dataclass(frozen=True)
class StructuredDoc:
    text: str
    think_block: ThinkBlock | None = None
    think_first: bool = False
    sections: tuple[Section, ...] = ()
    code_blocks: tuple[CodeBlock, ...] = ()
    lists: tuple[ListBlock, ...] = ()
    tables: tuple[TableBlock, ...] = ()
    defects: tuple[Defect, ...] = ()
    # Lines outside fences, with their 0-based line numbers.
    prose: tuple[tuple[int, str], ...] = field(default=(), repr=False)

    def defects_of(self, kind: str) -> list[Defect]:
        return [d for d in self.defects if d.kind == kind]


def _table_cells(line: str) -> int:
    s = line.strip()
    if s.startswith("|"):
        s = s[1:]
    if s.endswith("|") and not s.endswith("\\|"):
        s = s[:-1]
    return len(re.split(r"(?<!\\)\|", s))


def parse_document(text: str) -> StructuredDoc:
    """Parse ``text`` into a :class:`StructuredDoc`."""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    defects: list[Defect] = []
    think = None
    think_first = False
    open_tag = text.find("<think>")
    if open_tag != -1:
        close_tag = text.find("</think>", open_tag)
        if close_tag == -1:
            defects.append(Defect("unterminated_think", text.count("\n", 0, open_tag), "<think> is never closed"))
        else:
            body_start = open_tag + len("<think>")
            think = ThinkBlock(text[body_start:close_tag].strip("\n"), Span(open_tag, close_tag + len("</think>")))
            think_first = not text[:open_tag].strip()
    elif "</think>" in text:
        defects.append(Defect("unterminated_think", text.count("\n", 0, text.find("</think>")),
                              "</think> without an opening tag"))

    lines = text.split("\n")
    offsets = []
    pos = 0
    for ln in lines:
        offsets.append(pos)
        pos += len(ln) + 1

    def span(a: int, b: int) -> Span:
        end = offsets[b] + len(lines[b]) if b < len(lines) else len(text)
        return Span(offsets[a], end)

    code_blocks: list[CodeBlock] = []
    in_fence = [False] * len(lines)
    i = 0
    while i < len(lines):
        m = _FENCE.match(lines[i])
        if not m:
            if _SHORT_FENCE.match(lines[i]):
                defects.append(Defect("malformed_fence", i, "smiles block opened with fewer than three backticks"))
            i += 1
            continue
        fence, lang = m.group(1), m.group(2)
        close = None
        for j in range(i + 1, len(lines)):
            s = lines[j].strip()
            if s.startswith(fence[0] * len(fence)) and not s.strip(fence[0]):
                close = j
                break
            if s.startswith(fence[0] * 2) and not s.strip(fence[0]) and len(s) < len(fence):
                # A short closing run such as ``: the fence never properly closes.
                break
        if close is None:
            defects.append(Defect("unterminated_fence", i, f"code fence opened on line {i + 1} is never closed"))
            i += 1
            continue
        content = "\n".join(lines[i + 1:close])
        code_blocks.append(CodeBlock(lang.lower(), content, span(i, close)))
        for k in range(i, close + 1):
            in_fence[k] = True
        i = close + 1

    prose = [(k, ln) for k, ln in enumerate(lines) if not in_fence[k]]

    sections: list[Section] = []
    headers = []
    for k, ln in prose:
        if ln.startswith("#"):
            hm = _HEADER.match(ln)
            if hm:
                headers.append((k, len(hm.group(1)), hm.group(2)))
            elif _BAD_HEADER.match(ln):
                defects.append(Defect("malformed_header", k, f"header without a space: {ln.strip()!r}"))
    for n, (k, level, title) in enumerate(headers):
        end = headers[n + 1][0] - 1 if n + 1 < len(headers) else len(lines) - 1
        body = "\n".join(lines[k + 1:end + 1]).strip("\n")
        sections.append(Section(level, title, body, span(k, end)))

    lists: list[ListBlock] = []
    cur: list[tuple[int, int, str, str]] = []  # (line, indent, style, item)

    def flush():
        if not cur:
            return
        levels: dict[int, set[str]] = {}
        for _, indent, style, _ in cur:
            levels.setdefault(indent, set()).add(style)
        mixed = any(len(s) > 1 for s in levels.values())
        top = cur[0][2]
        lists.append(ListBlock("mixed" if mixed else top, tuple(c[3] for c in cur),
                               span(cur[0][0], cur[-1][0]), mixed))
        cur.clear()

    prev_line = None
    for k, ln in prose:
        if prev_line is not None and k != prev_line + 1:
            flush()
        prev_line = k
        if not ln.strip():
            flush()
            continue
        bm = _BULLET.match(ln)
        nm = _NUMBERED.match(ln)
        if bm and not ln.lstrip().startswith("**"):
            cur.append((k, len(bm.group(1).expandtabs(4)), "bullet", bm.group(3)))
        elif nm:
            cur.append((k, len(nm.group(1).expandtabs(4)), "numbered", nm.group(3)))
        elif cur and (ln.startswith((" ", "\t")) or not ln.lstrip().startswith(("#", "|"))):
            continue  # continuation of the previous item
        else:
            flush()
    flush()

    tables: list[TableBlock] = []
    run: list[tuple[int, str]] = []

    def flush_table():
        if len(run) >= 2:
            counts = tuple(_table_cells(ln) for _, ln in run)
            aligned = bool(_TABLE_SEP.match(run[1][1]))
            tables.append(TableBlock(counts, span(run[0][0], run[-1][0]), aligned))
        run.clear()

    prev_line = None
    for k, ln in prose:
        if prev_line is not None and k != prev_line + 1:
            flush_table()
        prev_line = k
        if ln.strip().startswith("|"):
            run.append((k, ln))
        else:
            flush_table()
    flush_table()

    return StructuredDoc(
        text=text,
        think_block=think,
        think_first=think_first,
        sections=tuple(sections),
        code_blocks=tuple(code_blocks),
        lists=tuple(lists),
        tables=tuple(tables),
        defects=tuple(sorted(defects, key=lambda d: (d.line, d.kind))),
        prose=tuple(prose),
    )
