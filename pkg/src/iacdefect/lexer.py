"""Best-effort lexer for Puppet manifests.

Classifies source text into comments, string literals, words, assignment
operators, and single-character leftovers. The lexer is total: any input,
including syntactically broken Puppet, produces a token stream. Unterminated
strings and block comments are closed at end of file and reported as
recoverable warnings on the stream.

The classification is deliberately shallow. Resource bodies, class scoping
and interpolation structure are never parsed; every downstream count is
expressible over this token stream alone.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

COMMENT = "comment"
STRING = "string_literal"
WORD = "word"
OPERATOR = "operator"
OTHER = "other"

TOKEN_KINDS = frozenset({COMMENT, STRING, WORD, OPERATOR, OTHER})

# ':' is a word character so namespaced names like ntp::install stay one word.
_WORD_CHARS = frozenset(string.ascii_letters + string.digits + "_:")


def count_lines(text: str) -> int:
    """Number of physical lines; a trailing newline does not open a new line."""
    if not text:
        return 0
    n = text.count("\n")
    return n if text.endswith("\n") else n + 1


@dataclass
class SourceScript:
    """One manifest: an identifying path plus its raw text."""

    path: str
    body: str
    line_count: int = -1

    def __post_init__(self):
        if self.line_count < 0:
            self.line_count = count_lines(self.body)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int  # 1-based line of the token's first character
    start: int  # character offset into the script body


@dataclass
class TokenStream:
    script: SourceScript
    tokens: tuple[Token, ...]
    warnings: tuple[str, ...] = field(default_factory=tuple)


def read_script(path, name: str | None = None) -> SourceScript:
    """Load a script from disk: UTF-8 with replacement, CRLF normalized to LF."""
    with open(path, encoding="utf-8", errors="replace") as fh:
        body = fh.read()
    return SourceScript(path=name if name is not None else str(path),
                        body=body.replace("\r\n", "\n"))


def tokenize(script: SourceScript) -> TokenStream:
    """Scan a script into a TokenStream.

    Never raises on any text. Every character lands in exactly one token or
    in inter-token whitespace, so joining token texts with the original gaps
    reproduces the body byte for byte.
    """
    body = script.body
    n = len(body)
    tokens: list[Token] = []
    warns: list[str] = []
    i = 0
    line = 1
    while i < n:
        ch = body[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            continue
        if ch == "#":
            # line comment: to end of line, newline excluded
            end = body.find("\n", i)
            end = n if end == -1 else end
            tokens.append(Token(COMMENT, body[i:end], line, i))
            i = end
            continue
        if ch == "/" and body.startswith("/*", i):
            end = body.find("*/", i + 2)
            if end == -1:
                end = n
                warns.append(f"unterminated block comment starting at line {line}")
            else:
                end += 2
            text = body[i:end]
            tokens.append(Token(COMMENT, text, line, i))
            line += text.count("\n")
            i = end
            continue
        if ch in "'\"":
            quote = ch
            j = i + 1
            closed = False
            while j < n:
                c = body[j]
                if c == "\\" and j + 1 < n and body[j + 1] in ("\\", "'", '"'):
                    j += 2  # escaped quote or backslash never terminates
                    continue
                j += 1
                if c == quote:
                    closed = True
                    break
            if not closed:
                warns.append(f"unterminated string starting at line {line}")
            text = body[i:j]
            tokens.append(Token(STRING, text, line, i))
            line += text.count("\n")
            i = j
            continue
        if ch in _WORD_CHARS:
            j = i
            while j < n and body[j] in _WORD_CHARS:
                j += 1
            tokens.append(Token(WORD, body[i:j], line, i))
            i = j
            continue
        if ch == "=":
            if body.startswith("=>", i):
                tokens.append(Token(OPERATOR, "=>", line, i))
                i += 2
            else:
                tokens.append(Token(OPERATOR, "=", line, i))
                i += 1
            continue
        tokens.append(Token(OTHER, ch, line, i))
        i += 1
    return TokenStream(script=script, tokens=tuple(tokens), warnings=tuple(warns))


def strip_comments(script: SourceScript) -> str:
    """Return the body with every comment replaced by a single space.

    String literals are untouched even when they contain '#'. Idempotent.
    """
    stream = tokenize(script)
    body = script.body
    parts: list[str] = []
    pos = 0
    for tok in stream.tokens:
        if tok.kind != COMMENT:
            continue
        parts.append(body[pos:tok.start])
        parts.append(" ")
        pos = tok.start + len(tok.text)
    parts.append(body[pos:])
    return "".join(parts)
