"""Tolerant parser for a JavaScript subset, plus per-file structural metrics.

The grammar covered is exactly what the change counters and complexity
features need: function declarations and expressions, arrow functions,
methods in object literals and class bodies, parameter lists, top-level
``var``/``let``/``const`` declarations (treated as the file's globals),
line and block comments, and generic statements for everything else.
Anything the parser cannot make sense of degrades to an ``Other`` node
spanning the region; parsing never raises. A warning counter on the
returned tree reports how often recovery kicked in.

Node kinds and their roles:

- ``Program``       root, spans the whole file.
- ``FunctionDecl``  ``function name(...) {...}`` in statement position.
- ``FunctionExpr``  ``function`` in expression position, or a function-
                    valued object property (``foo: function () {...}``).
- ``ArrowFunction`` ``(...) => ...`` anywhere.
- ``Method``        shorthand methods in object literals and class bodies.
- ``Param``         one parameter; destructuring patterns collapse to a
                    single Param whose name is the normalized pattern text.
- ``VarDecl``       one declarator of a Program-scope declaration. Inside
                    functions, declarations are plain Statements so they
                    count as method logic.
- ``Statement``     any other statement, including control-flow constructs
                    (their branch statements become children) and class
                    declarations (their methods become children).
- ``Comment``       line or block comment, attached to the deepest node
                    whose span contains it.
- ``Other``         recovery node for unparseable regions.

Every node carries a 64-bit fingerprint of its whitespace-collapsed source
slice; the tree differ anchors on these.
"""

from __future__ import annotations

import hashlib
import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

PROGRAM = "Program"
FUNCTION_DECL = "FunctionDecl"
FUNCTION_EXPR = "FunctionExpr"
ARROW_FUNCTION = "ArrowFunction"
METHOD = "Method"
PARAM = "Param"
VAR_DECL = "VarDecl"
STATEMENT = "Statement"
COMMENT = "Comment"
OTHER = "Other"

FUNCTION_KINDS = frozenset({FUNCTION_DECL, FUNCTION_EXPR, ARROW_FUNCTION, METHOD})

_MAX_DEPTH = 100

_WS_RUN = re.compile(r"\s+")
_WS_AROUND_PUNCT = re.compile(r" ?([^\w\s$]) ?")


def normalize_slice(text: str) -> str:
    """Collapse whitespace runs and drop spaces hugging punctuation, so a
    node's fingerprint survives pure reformatting."""
    collapsed = _WS_RUN.sub(" ", text).strip()
    return _WS_AROUND_PUNCT.sub(r"\1", collapsed)


def _fingerprint(text: str) -> int:
    digest = hashlib.blake2b(normalize_slice(text).encode("utf-8", "replace"),
                             digest_size=8)
    return int.from_bytes(digest.digest(), "big")


@dataclass(eq=False)
class JsNode:
    kind: str
    name: str | None = None
    children: list["JsNode"] = field(default_factory=list)
    span: tuple[int, int] = (1, 1)  # 1-based (start_line, end_line)
    text_hash: int = 0
    # internal bookkeeping for diffing and metrics
    start: int = 0  # char offsets into the source
    end: int = 0
    parent: "JsNode | None" = field(default=None, repr=False)
    index: int = 0          # preorder index within the file tree
    size: int = 1           # nodes in this subtree, self included
    sibling_pos: int = 0    # index within parent.children
    param_names: tuple[str, ...] = ()          # function kinds only
    body_toks: tuple[int, int] = (0, 0)        # function kinds only
    full_toks: tuple[int, int] = (0, 0)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def is_function(self) -> bool:
        return self.kind in FUNCTION_KINDS


@dataclass
class JsAst:
    root: JsNode
    path: str
    source: str
    warnings: int = 0
    # token stream kept for cyclomatic counting
    _tokens: list = field(default_factory=list, repr=False)

    def nodes(self):
        return list(self.root.walk())


@dataclass
class FileMetrics:
    loc: int
    function_count: int
    cyclomatic_total: int
    cyclomatic_avg: float
    global_var_names: set[str]
    comment_nodes: list[JsNode]


# ---------------------------------------------------------------------------
# tokenizer

NAME, NUM, STR, TEMPLATE, REGEX, PUNCT, EOF = (
    "name", "num", "str", "template", "regex", "punct", "eof")


@dataclass
class _Tok:
    type: str
    value: str
    start: int
    end: int


_NUM_RE = re.compile(
    r"0[xXoObB][0-9a-fA-F]+n?|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?n?")
_NAME_RE = re.compile(r"[A-Za-z_$-￿][A-Za-z0-9_$-￿]*")
_PUNCTS = [
    ">>>=", "===", "!==", "**=", "<<=", ">>=", "...", ">>>", "=>", "==",
    "!=", "<=", ">=", "&&", "||", "??", "?.", "**", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
]
# first-character dispatch, longest candidates first
_PUNCT_BY_FIRST: dict[str, list[str]] = {}
for _p in sorted(_PUNCTS, key=len, reverse=True):
    _PUNCT_BY_FIRST.setdefault(_p[0], []).append(_p)

_ASCII_WS = " \t\r\n\v\f"

# a '/' starts a regex literal only after these
_REGEX_AFTER_NAME = frozenset({
    "return", "typeof", "instanceof", "in", "of", "new", "delete", "void",
    "throw", "case", "do", "else", "yield", "await",
})


def _scan_string(src: str, i: int) -> int:
    quote = src[i]
    j = i + 1
    n = len(src)
    while j < n:
        c = src[j]
        if c == "\\":
            j += 2
        elif c == quote:
            return j + 1
        elif c == "\n":
            return j  # unterminated; stop at end of line
        else:
            j += 1
    return n


def _scan_template(src: str, i: int) -> int:
    # whole template (including ${...} interpolations) becomes one token
    j = i + 1
    n = len(src)
    depth = 0
    while j < n:
        c = src[j]
        if c == "\\":
            j += 2
        elif depth == 0 and c == "`":
            return j + 1
        elif src.startswith("${", j):
            depth += 1
            j += 2
        elif depth > 0 and c == "{":
            depth += 1
            j += 1
        elif depth > 0 and c == "}":
            depth -= 1
            j += 1
        elif depth > 0 and c == "`":
            j = _scan_template(src, j)
        else:
            j += 1
    return n


def _scan_regex(src: str, i: int) -> int | None:
    j = i + 1
    n = len(src)
    in_class = False
    while j < n:
        c = src[j]
        if c == "\\":
            j += 2
        elif c == "\n":
            return None
        elif c == "[":
            in_class = True
            j += 1
        elif c == "]":
            in_class = False
            j += 1
        elif c == "/" and not in_class:
            j += 1
            while j < n and src[j].isalpha():
                j += 1
            return j
        else:
            j += 1
    return None


def _regex_allowed(prev: _Tok | None) -> bool:
    if prev is None:
        return True
    if prev.type == NAME:
        return prev.value in _REGEX_AFTER_NAME
    if prev.type == PUNCT:
        return prev.value not in (")", "]", "}", "++", "--")
    return False


def tokenize(src: str) -> tuple[list[_Tok], list[tuple[int, int]]]:
    """Split source into tokens plus a separate list of comment spans."""
    tokens: list[_Tok] = []
    comments: list[tuple[int, int]] = []
    i = 0
    n = len(src)
    prev: _Tok | None = None
    while i < n:
        c = src[i]
        if c in _ASCII_WS or c.isspace():
            i += 1
            continue
        if c == "/":
            nxt = src[i + 1] if i + 1 < n else ""
            if nxt == "/":
                j = src.find("\n", i)
                j = n if j == -1 else j
                comments.append((i, j))
                i = j
                continue
            if nxt == "*":
                j = src.find("*/", i + 2)
                j = n if j == -1 else j + 2
                comments.append((i, j))
                i = j
                continue
            if _regex_allowed(prev):
                j = _scan_regex(src, i)
                if j is None:
                    j = i + (2 if nxt == "=" else 1)
                    prev = _Tok(PUNCT, src[i:j], i, j)
                else:
                    prev = _Tok(REGEX, src[i:j], i, j)
            else:
                j = i + (2 if nxt == "=" else 1)
                prev = _Tok(PUNCT, src[i:j], i, j)
        elif c in "'\"":
            j = _scan_string(src, i)
            prev = _Tok(STR, src[i:j], i, j)
        elif c == "`":
            j = _scan_template(src, i)
            prev = _Tok(TEMPLATE, src[i:j], i, j)
        elif c in "0123456789" or (c == "." and i + 1 < n
                                   and src[i + 1] in "0123456789"):
            m = _NUM_RE.match(src, i)
            j = m.end()
            prev = _Tok(NUM, src[i:j], i, j)
        else:
            m = _NAME_RE.match(src, i)
            if m is not None:
                j = m.end()
                prev = _Tok(NAME, src[i:j], i, j)
            else:
                j = i + 1
                for p in _PUNCT_BY_FIRST.get(c, ()):
                    if src.startswith(p, i):
                        j = i + len(p)
                        break
                prev = _Tok(PUNCT, src[i:j], i, j)
        tokens.append(prev)
        i = j
    return tokens, comments


# ---------------------------------------------------------------------------
# parser

_VAR_KEYWORDS = frozenset({"var", "let", "const"})
_CONTROL_KEYWORDS = frozenset({"if", "for", "while", "do", "switch", "try", "with"})
_METHOD_MODIFIERS = frozenset({"get", "set", "async", "static"})
# previous tokens after which '{' opens an object literal, not a block
_VALUE_POSITION = frozenset({
    "=", "(", ",", "[", ":", "=>", "&&", "||", "?", "??", "return", "+",
    "-", "*", "/", "%", "==", "===", "!=", "!==", "...", "typeof", "in",
    "of", "new", "throw", "yield", "await", "case", "do", "else",
})
# names that never start a new statement after a line break
_NO_ASI_BEFORE = frozenset({
    "instanceof", "in", "of", "else", "while", "catch", "finally", "extends",
})
_NO_ASI_AFTER = frozenset({
    "typeof", "new", "delete", "void", "in", "of", "instanceof", "else",
    "do", "case", "throw", "yield", "await", "async", "function", "extends",
})

_OPEN_TO_CLOSE = {"(": ")", "[": "]", "{": "}"}


class _Parser:
    def __init__(self, src: str, tokens: list[_Tok]):
        self.src = src
        self.toks = tokens
        self.pos = 0
        self.warnings = 0
        self.newlines = [m.start() for m in re.finditer("\n", src)]

    # -- token helpers ------------------------------------------------------

    def _cur(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def _peek(self, ahead: int = 1) -> _Tok | None:
        k = self.pos + ahead
        return self.toks[k] if k < len(self.toks) else None

    def _advance(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def _at_punct(self, value: str, ahead: int = 0) -> bool:
        t = self._peek(ahead) if ahead else self._cur()
        return t is not None and t.type == PUNCT and t.value == value

    def _at_name(self, value: str) -> bool:
        t = self._cur()
        return t is not None and t.type == NAME and t.value == value

    def _line_of(self, offset: int) -> int:
        return 1 + bisect_left(self.newlines, offset)

    def _line_break_between(self, a: _Tok, b: _Tok) -> bool:
        return self._line_of(a.end - 1 if a.end > a.start else a.start) \
            < self._line_of(b.start)

    def _match_bracket(self, open_idx: int) -> int:
        """Token index of the bracket matching toks[open_idx], or last token."""
        depth = 0
        want = _OPEN_TO_CLOSE[self.toks[open_idx].value]
        openers = set(_OPEN_TO_CLOSE)
        closers = set(_OPEN_TO_CLOSE.values())
        for k in range(open_idx, len(self.toks)):
            t = self.toks[k]
            if t.type != PUNCT:
                continue
            if t.value in openers:
                depth += 1
            elif t.value in closers:
                depth -= 1
                if depth == 0:
                    return k if t.value == want else k
        return len(self.toks) - 1

    # -- node helpers -------------------------------------------------------

    def _node(self, kind, name, start, end, children=()) -> JsNode:
        node = JsNode(kind=kind, name=name, start=start, end=max(start, end))
        node.children = list(children)
        return node

    def _other_region(self) -> JsNode:
        """Swallow one statement's worth of tokens into an Other node."""
        start_tok = self._cur()
        depth = 0
        last = start_tok
        while self._cur() is not None:
            t = self._advance()
            last = t
            if t.type == PUNCT:
                if t.value in _OPEN_TO_CLOSE:
                    depth += 1
                elif t.value in (")", "]", "}"):
                    if depth == 0 and t.value == "}":
                        break
                    depth -= 1
                elif t.value == ";" and depth <= 0:
                    break
            if depth < 0:
                break
        self.warnings += 1
        return self._node(OTHER, None, start_tok.start, last.end)

    # -- entry point --------------------------------------------------------

    def parse_program(self) -> JsNode:
        children = self._statement_list(depth=0, at_program=True, closing=None)
        return self._node(PROGRAM, None, 0, len(self.src), children)

    def _statement_list(self, depth, at_program, closing) -> list[JsNode]:
        items: list[JsNode] = []
        while True:
            t = self._cur()
            if t is None:
                break
            if closing is not None and t.type == PUNCT and t.value == closing:
                break
            before = self.pos
            try:
                items.extend(self._statement(depth, at_program))
            except RecursionError:
                items.append(self._other_region())
            if self.pos == before:  # no progress: swallow one token
                tok = self._advance()
                items.append(self._node(OTHER, None, tok.start, tok.end))
                self.warnings += 1
        return items

    def _statement(self, depth, at_program) -> list[JsNode]:
        if depth > _MAX_DEPTH:
            return [self._other_region()]
        t = self._cur()
        if t.type == PUNCT:
            if t.value == ";":
                self._advance()
                return []
            if t.value == "{":
                return [self._block_statement(depth)]
            if t.value in (")", "]", "}"):
                tok = self._advance()
                self.warnings += 1
                return [self._node(OTHER, None, tok.start, tok.end)]
            return [self._expression_statement(depth)]
        if t.type != NAME:
            return [self._expression_statement(depth)]
        word = t.value
        if word == "function":
            return [self._function(FUNCTION_DECL, depth)]
        if word == "async" and self._peek() is not None \
                and self._peek().type == NAME and self._peek().value == "function":
            self._advance()
            return [self._function(FUNCTION_DECL, depth)]
        if word == "class":
            return [self._class(depth)]
        if word in _VAR_KEYWORDS:
            nxt = self._peek()
            if nxt is not None and (nxt.type == NAME or
                                    (nxt.type == PUNCT and nxt.value in "[{")):
                return self._var_statement(depth, at_program)
        if word in _CONTROL_KEYWORDS:
            return [self._control(word, depth)]
        if word == "export":
            return self._export_statement(depth, at_program)
        return [self._expression_statement(depth)]

    def _export_statement(self, depth, at_program) -> list[JsNode]:
        start = self._advance()  # 'export'
        t = self._cur()
        if t is not None and t.type == NAME and t.value == "default":
            self._advance()
            t = self._cur()
        if t is not None and t.type == NAME and (
                t.value in ("function", "class", "async") or t.value in _VAR_KEYWORDS):
            nodes = self._statement(depth, at_program)
            for node in nodes:  # the export keyword belongs to the declaration
                node.start = min(node.start, start.start)
            return nodes
        # export lists, re-exports and default expressions
        node = self._expression_statement(depth)
        node.start = min(node.start, start.start)
        return [node]

    def _block_statement(self, depth) -> JsNode:
        open_tok = self._advance()
        children = self._statement_list(depth + 1, False, "}")
        end = open_tok.end
        if self._at_punct("}"):
            end = self._advance().end
        return self._node(STATEMENT, None, open_tok.start, end, children)

    def _branch_into(self, depth, children: list[JsNode]) -> int:
        """Parse a control-flow branch; block contents flatten into *children*.

        Returns the end offset of what was consumed.
        """
        t = self._cur()
        if t is None:
            return 0
        if t.type == PUNCT and t.value == "{":
            open_tok = self._advance()
            children.extend(self._statement_list(depth + 1, False, "}"))
            end = open_tok.end
            if self._at_punct("}"):
                end = self._advance().end
            return end
        before = self.pos
        nodes = self._statement(depth + 1, False)
        children.extend(nodes)
        if self.pos == before:
            return t.end
        return max((n.end for n in nodes), default=self.toks[self.pos - 1].end)

    def _paren_group(self, depth, children: list[JsNode]) -> int:
        """Consume a parenthesized head such as an if-condition."""
        if not self._at_punct("("):
            return self.toks[self.pos - 1].end if self.pos else 0
        self._advance()
        kids, _ = self._expression(depth, stop=(), asi=False)
        children.extend(kids)
        if self._at_punct(")"):
            return self._advance().end
        return self.toks[self.pos - 1].end if self.pos else 0

    def _control(self, word, depth) -> JsNode:
        start_tok = self._advance()
        children: list[JsNode] = []
        end = start_tok.end
        if word == "do":
            end = self._branch_into(depth, children)
            if self._at_name("while"):
                self._advance()
                end = self._paren_group(depth, children)
            if self._at_punct(";"):
                end = self._advance().end
        elif word == "try":
            end = self._branch_into(depth, children)
            if self._at_name("catch"):
                self._advance()
                if self._at_punct("("):
                    end = self._paren_group(depth, children)
                end = self._branch_into(depth, children)
            if self._at_name("finally"):
                self._advance()
                end = self._branch_into(depth, children)
        elif word == "switch":
            end = self._paren_group(depth, children)
            if self._at_punct("{"):
                self._advance()
                while self._cur() is not None and not self._at_punct("}"):
                    if self._at_name("case"):
                        self._advance()
                        kids, _ = self._expression(depth, stop=(":",), asi=False)
                        children.extend(kids)
                        if self._at_punct(":"):
                            self._advance()
                    elif self._at_name("default"):
                        self._advance()
                        if self._at_punct(":"):
                            self._advance()
                    else:
                        before = self.pos
                        children.extend(self._statement(depth + 1, False))
                        if self.pos == before:
                            self._advance()
                            self.warnings += 1
                if self._at_punct("}"):
                    end = self._advance().end
        else:  # if / for / while / with
            end = self._paren_group(depth, children)
            end = self._branch_into(depth, children) or end
            if word == "if" and self._at_name("else"):
                self._advance()
                if self._at_name("if"):
                    nested = self._control("if", depth + 1)
                    children.append(nested)
                    end = nested.end
                else:
                    end = self._branch_into(depth, children) or end
        return self._node(STATEMENT, None, start_tok.start, end, children)

    def _var_statement(self, depth, at_program) -> list[JsNode]:
        kw_tok = self._advance()
        declarators: list[tuple[str, int, int, list[JsNode]]] = []
        while True:
            t = self._cur()
            if t is None:
                break
            if t.type == NAME:
                name = t.value
                name_start = t.start
                end = self._advance().end
            elif t.type == PUNCT and t.value in "[{":
                close = self._match_bracket(self.pos)
                name = _WS_RUN.sub(" ", self.src[t.start:self.toks[close].end])
                name_start = t.start
                end = self.toks[close].end
                self.pos = close + 1
            else:
                break
            kids: list[JsNode] = []
            if self._at_punct("="):
                self._advance()
                kids, end2 = self._expression(
                    depth, stop=(",", ";"), asi=True, name_ctx=name)
                end = end2 or end
            declarators.append((name, name_start, end, kids))
            if self._at_punct(","):
                self._advance()
                continue
            break
        stmt_end = declarators[-1][2] if declarators else kw_tok.end
        if self._at_punct(";"):
            stmt_end = self._advance().end
        if at_program:
            return [self._node(VAR_DECL, name, start, end, kids)
                    for name, start, end, kids in declarators]
        kids = [k for _, _, _, ks in declarators for k in ks]
        return [self._node(STATEMENT, None, kw_tok.start, stmt_end, kids)]

    def _expression_statement(self, depth) -> JsNode:
        start_tok = self._cur()
        if start_tok is None:  # keyword ran into EOF
            offset = self.toks[-1].end if self.toks else 0
            return self._node(STATEMENT, None, offset, offset)
        children, end = self._expression(depth, stop=(";",), asi=True)
        if self._at_punct(";"):
            end = self._advance().end
        return self._node(STATEMENT, None, start_tok.start, end or start_tok.end,
                          children)

    # -- expression scanning --------------------------------------------------

    def _arrow_ahead(self) -> bool:
        t = self._cur()
        if t is None:
            return False
        if t.type == NAME and t.value not in _NO_ASI_AFTER and self._at_punct("=>", 1):
            return True
        if t.type == PUNCT and t.value == "(":
            close = self._match_bracket(self.pos)
            nxt = self.toks[close + 1] if close + 1 < len(self.toks) else None
            return nxt is not None and nxt.type == PUNCT and nxt.value == "=>"
        return False

    def _expression(self, depth, stop, asi, name_ctx=None):
        """Scan one expression fragment, collecting embedded definitions.

        Stops (at bracket level zero) at any punctuation in *stop*, at an
        unbalanced closer, or at a newline that plausibly separates two
        statements. Returns (children, end_offset).
        """
        children: list[JsNode] = []
        level = 0
        prev: _Tok | None = None
        end = 0
        # name a function/arrow after the identifier it is assigned to
        pending_name = name_ctx

        def capture(node: JsNode):
            nonlocal end, prev, pending_name
            children.append(node)
            end = node.end
            prev = _Tok(PUNCT, ")", node.end, node.end)
            pending_name = None

        while True:
            t = self._cur()
            if t is None:
                break
            if level == 0 and t.type == PUNCT and (
                    t.value in stop or t.value in (")", "]", "}")):
                break
            if asi and level == 0 and prev is not None \
                    and self._line_break_between(prev, t) \
                    and self._asi_break(prev, t):
                break
            if t.type == NAME and t.value == "function":
                capture(self._function(FUNCTION_EXPR, depth, ctx_name=pending_name))
                continue
            if t.type == NAME and t.value == "async" and self._peek() is not None:
                nxt = self._peek()
                if nxt.type == NAME and nxt.value == "function":
                    self._advance()
                    capture(self._function(FUNCTION_EXPR, depth,
                                           ctx_name=pending_name))
                    continue
                arrow_next = (
                    (nxt.type == NAME and self._at_punct("=>", 2))
                    or (nxt.type == PUNCT and nxt.value == "("))
                if arrow_next:
                    save = self.pos
                    self._advance()  # 'async'
                    if self._arrow_ahead():
                        capture(self._arrow(depth, ctx_name=pending_name))
                        continue
                    self.pos = save
            if self._arrow_ahead():
                capture(self._arrow(depth, ctx_name=pending_name))
                continue
            if t.type == NAME and t.value == "class":
                capture(self._class(depth))
                continue
            if t.type == PUNCT and t.value == "{":
                if prev is None or prev.value in _VALUE_POSITION:
                    kids, obj_end = self._object_literal(depth)
                    children.extend(kids)
                    end = obj_end
                    prev = _Tok(PUNCT, "}", obj_end, obj_end)
                    pending_name = None
                    continue
                level += 1
            elif t.type == PUNCT and t.value in ("(", "["):
                level += 1
            elif t.type == PUNCT and t.value in (")", "]", "}"):
                level -= 1
            tok = self._advance()
            if tok.type == PUNCT and tok.value in ("=", ":") \
                    and prev is not None and prev.type == NAME:
                pending_name = prev.value
            elif not (tok.type == NAME and (self._at_punct("=")
                                            or self._at_punct(":"))):
                pending_name = None
            prev = tok
            end = tok.end
        return children, end

    def _asi_break(self, prev: _Tok, nxt: _Tok) -> bool:
        if prev.type == NAME and prev.value in ("return", "break", "continue"):
            return True
        prev_ends = (
            (prev.type in (NAME, NUM, STR, TEMPLATE, REGEX)
             and prev.value not in _NO_ASI_AFTER)
            or (prev.type == PUNCT and prev.value in (")", "]", "}", "++", "--")))
        nxt_starts = (
            (nxt.type == NAME and nxt.value not in _NO_ASI_BEFORE)
            or nxt.type in (NUM, STR, TEMPLATE))
        return prev_ends and nxt_starts

    # -- functions, arrows, classes, object literals -------------------------

    def _params(self, depth) -> tuple[list[JsNode], int]:
        params: list[JsNode] = []
        end = self.toks[self.pos - 1].end if self.pos else 0
        if not self._at_punct("("):
            return params, end
        self._advance()
        while True:
            t = self._cur()
            if t is None:
                break
            if t.type == PUNCT and t.value == ")":
                end = self._advance().end
                break
            if t.type == PUNCT and t.value in (",", "..."):
                self._advance()
                continue
            if t.type == NAME:
                node = self._node(PARAM, t.value, t.start, t.end)
                self._advance()
            elif t.type == PUNCT and t.value in "[{":
                close = self._match_bracket(self.pos)
                text = _WS_RUN.sub(" ", self.src[t.start:self.toks[close].end])
                node = self._node(PARAM, text, t.start, self.toks[close].end)
                self.pos = close + 1
            else:
                self._advance()
                continue
            if self._at_punct("="):
                self._advance()
                kids, dend = self._expression(depth, stop=(",",), asi=False)
                node.children.extend(kids)
                node.end = dend or node.end
            params.append(node)
        return params, end

    def _function(self, kind, depth, ctx_name=None) -> JsNode:
        tok_start = self.pos
        start_tok = self._advance()  # 'function'
        if self._at_punct("*"):
            self._advance()
        name = ctx_name
        t = self._cur()
        if t is not None and t.type == NAME:
            name = t.value
            self._advance()
        params, end = self._params(depth)
        body_children: list[JsNode] = []
        body_toks = (self.pos, self.pos)
        if self._at_punct("{"):
            open_tok = self._advance()
            body_start = self.pos
            body_children = self._statement_list(depth + 1, False, "}")
            body_toks = (body_start, self.pos)
            end = open_tok.end
            if self._at_punct("}"):
                end = self._advance().end
        else:
            self.warnings += 1
        node = self._node(kind, name, start_tok.start, end,
                          params + body_children)
        node.param_names = tuple(p.name or "" for p in params)
        node.body_toks = body_toks
        node.full_toks = (tok_start, self.pos)
        return node

    def _arrow(self, depth, ctx_name=None) -> JsNode:
        tok_start = self.pos
        t = self._cur()
        params: list[JsNode] = []
        start = t.start
        if t.type == NAME:
            params = [self._node(PARAM, t.value, t.start, t.end)]
            self._advance()
        else:
            params, _ = self._params(depth)
        if self._at_punct("=>"):
            self._advance()
        body_children: list[JsNode] = []
        end = self.toks[self.pos - 1].end if self.pos else start
        if self._at_punct("{"):
            open_tok = self._advance()
            body_start = self.pos
            body_children = self._statement_list(depth + 1, False, "}")
            body_toks = (body_start, self.pos)
            end = open_tok.end
            if self._at_punct("}"):
                end = self._advance().end
        else:
            body_start = self.pos
            body_children, bend = self._expression(
                depth, stop=(",", ";", ":"), asi=True)
            body_toks = (body_start, self.pos)
            end = bend or end
        node = self._node(ARROW_FUNCTION, ctx_name, start, end,
                          params + body_children)
        node.param_names = tuple(p.name or "" for p in params)
        node.body_toks = body_toks
        node.full_toks = (tok_start, self.pos)
        return node

    def _method(self, name, depth, start) -> JsNode:
        tok_start = self.pos
        params, end = self._params(depth)
        body_children: list[JsNode] = []
        body_toks = (self.pos, self.pos)
        if self._at_punct("{"):
            open_tok = self._advance()
            body_start = self.pos
            body_children = self._statement_list(depth + 1, False, "}")
            body_toks = (body_start, self.pos)
            end = open_tok.end
            if self._at_punct("}"):
                end = self._advance().end
        node = self._node(METHOD, name, start, end, params + body_children)
        node.param_names = tuple(p.name or "" for p in params)
        node.body_toks = body_toks
        node.full_toks = (tok_start, self.pos)
        return node

    def _class(self, depth) -> JsNode:
        start_tok = self._advance()  # 'class'
        name = None
        t = self._cur()
        if t is not None and t.type == NAME and t.value != "extends":
            name = t.value
            self._advance()
        children: list[JsNode] = []
        if self._at_name("extends"):
            self._advance()
            kids, _ = self._expression(depth, stop=(), asi=False)
            children.extend(kids)
        end = start_tok.end
        if self._at_punct("{"):
            self._advance()
            while self._cur() is not None and not self._at_punct("}"):
                before = self.pos
                member = self._class_member(depth)
                if member is not None:
                    children.append(member)
                if self.pos == before:
                    self._advance()
                    self.warnings += 1
            if self._at_punct("}"):
                end = self._advance().end
        return self._node(STATEMENT, name, start_tok.start, end, children)

    def _class_member(self, depth) -> JsNode | None:
        while self._at_punct(";"):
            self._advance()
        t = self._cur()
        if t is None or self._at_punct("}"):
            return None
        start = t.start
        while t is not None and t.type == NAME and t.value in _METHOD_MODIFIERS \
                and not self._at_punct("(", 1):
            self._advance()
            t = self._cur()
        if self._at_punct("*"):
            self._advance()
            t = self._cur()
        if t is None:
            return None
        if t.type in (NAME, STR, NUM):
            key = t.value.strip("'\"") if t.type == STR else t.value
            self._advance()
        elif t.type == PUNCT and t.value == "[":
            close = self._match_bracket(self.pos)
            key = _WS_RUN.sub(" ", self.src[t.start:self.toks[close].end])
            self.pos = close + 1
        else:
            return None
        if self._at_punct("("):
            return self._method(key, depth, start)
        # class field
        kids: list[JsNode] = []
        end = self.toks[self.pos - 1].end
        if self._at_punct("="):
            self._advance()
            kids, vend = self._expression(depth, stop=(";",), asi=True,
                                          name_ctx=key)
            end = vend or end
        if self._at_punct(";"):
            end = self._advance().end
        return self._node(STATEMENT, key, start, end, kids)

    def _object_literal(self, depth) -> tuple[list[JsNode], int]:
        open_tok = self._advance()  # '{'
        children: list[JsNode] = []
        end = open_tok.end
        last_pos = -1
        while True:
            t = self._cur()
            if t is None:
                break
            if t.type == PUNCT and t.value == "}":
                end = self._advance().end
                break
            if self.pos == last_pos:  # stray token; never stall
                self._advance()
                self.warnings += 1
                continue
            last_pos = self.pos
            if t.type == PUNCT and t.value in (",", ";"):
                self._advance()
                continue
            if t.type == PUNCT and t.value == "...":
                self._advance()
                kids, _ = self._expression(depth, stop=(",",), asi=False)
                children.extend(kids)
                continue
            start = t.start
            mods_consumed = False
            while t is not None and t.type == NAME and t.value in _METHOD_MODIFIERS \
                    and self._peek() is not None \
                    and (self._peek().type in (NAME, STR, NUM)
                         or (self._peek().type == PUNCT
                             and self._peek().value in ("[", "*"))):
                self._advance()
                mods_consumed = True
                t = self._cur()
            if self._at_punct("*"):
                self._advance()
                t = self._cur()
            if t is None:
                break
            if t.type in (NAME, STR, NUM):
                key = t.value.strip("'\"") if t.type == STR else t.value
                self._advance()
            elif t.type == PUNCT and t.value == "[":
                close = self._match_bracket(self.pos)
                key = _WS_RUN.sub(" ", self.src[t.start:self.toks[close].end])
                self.pos = close + 1
            else:
                kids, _ = self._expression(depth, stop=(",",), asi=False)
                children.extend(kids)
                continue
            if self._at_punct("("):
                children.append(self._method(key, depth, start))
            elif self._at_punct(":"):
                self._advance()
                kids, _ = self._expression(depth, stop=(",",), asi=False,
                                           name_ctx=key)
                children.extend(kids)
            # bare shorthand property: nothing to record
        return children, end


# ---------------------------------------------------------------------------
# public API

def parse_js(source: str, path: str = "<memory>") -> JsAst:
    """Parse *source* into a tolerant AST. Total: never raises on any input."""
    tokens, comment_spans = tokenize(source)
    parser = _Parser(source, tokens)
    try:
        root = parser.parse_program()
    except RecursionError:
        root = JsNode(kind=PROGRAM, start=0, end=len(source))
        parser.warnings += 1
    _attach_comments(root, comment_spans, source)
    _finalize(root, source, parser.newlines)
    return JsAst(root=root, path=path, source=source,
                 warnings=parser.warnings, _tokens=tokens)


def _attach_comments(root: JsNode, spans, source: str) -> None:
    for start, end in spans:
        host = root
        while True:
            nxt = None
            for child in host.children:
                if child.start <= start and end <= child.end:
                    nxt = child
                    break
            if nxt is None or nxt.kind == COMMENT:
                break
            host = nxt
        host.children.append(JsNode(kind=COMMENT, start=start, end=end))


def _finalize(root: JsNode, source: str, newlines: list[int]) -> None:
    def line_of(offset: int) -> int:
        return 1 + bisect_right(newlines, offset - 1) if offset > 0 else 1

    counter = 0

    def visit(node: JsNode, parent: JsNode | None):
        nonlocal counter
        node.parent = parent
        node.index = counter
        counter += 1
        node.children.sort(key=lambda c: (c.start, c.end))
        node.text_hash = _fingerprint(source[node.start:node.end])
        end_off = max(node.start, node.end - 1)
        node.span = (line_of(node.start), line_of(end_off))
        size = 1
        for pos, child in enumerate(node.children):
            child.sibling_pos = pos
            size += visit(child, node)
        node.size = size
        return size

    visit(root, None)


_DECISION_NAMES = frozenset({"if", "for", "while", "do", "case", "catch"})
_DECISION_PUNCT = frozenset({"?", "&&", "||"})


def cyclomatic(ast: JsAst) -> dict:
    """Cyclomatic complexity per function: 1 + decision points in its body.

    Decision points are ``if`` (including else-if), ``for`` in all its
    forms, ``while``, ``do``, ``case``, ``catch``, the ternary ``?`` and the
    ``&&`` / ``||`` operators. Tokens belonging to a nested function count
    toward that nested function only.
    """
    decision_idx = [
        k for k, t in enumerate(ast._tokens)
        if (t.type == NAME and t.value in _DECISION_NAMES)
        or (t.type == PUNCT and t.value in _DECISION_PUNCT)
    ]

    def count_in(lo: int, hi: int) -> int:
        return bisect_left(decision_idx, hi) - bisect_left(decision_idx, lo)

    functions = [n for n in ast.root.walk() if n.is_function()]

    # map each function to its directly nested functions (no intervening one)
    def nearest_fn(node: JsNode) -> JsNode | None:
        p = node.parent
        while p is not None:
            if p.is_function():
                return p
            p = p.parent
        return None

    nested: dict[int, list[JsNode]] = {id(f): [] for f in functions}
    for f in functions:
        host = nearest_fn(f)
        if host is not None:
            nested[id(host)].append(f)

    per_function = {}
    total = 0
    for f in functions:
        lo, hi = f.body_toks
        count = count_in(lo, hi)
        for g in nested[id(f)]:
            glo, ghi = g.full_toks
            overlap_lo, overlap_hi = max(lo, glo), min(hi, ghi)
            if overlap_lo < overlap_hi:
                count -= count_in(overlap_lo, overlap_hi)
        value = 1 + count
        per_function[f] = value
        total += value
    return {
        "per_function": per_function,
        "total": total,
        "count": len(functions),
    }


def file_metrics(ast: JsAst, source: str | None = None) -> FileMetrics:
    """Physical and structural metrics for one parsed file."""
    src = ast.source if source is None else source
    loc = sum(1 for line in src.splitlines() if line.strip())
    cyc = cyclomatic(ast)
    globals_ = {n.name for n in ast.root.children
                if n.kind == VAR_DECL and n.name}
    comments = [n for n in ast.root.walk() if n.kind == COMMENT]
    count = cyc["count"]
    total = cyc["total"]
    return FileMetrics(
        loc=loc,
        function_count=count,
        cyclomatic_total=total,
        cyclomatic_avg=total / max(1, count),
        global_var_names=globals_,
        comment_nodes=comments,
    )
