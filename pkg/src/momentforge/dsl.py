"""Problem definition language: a line-oriented recursive-descent parser.

A problem file is a sequence of declarations, one per line; a line that
starts with whitespace continues the previous declaration and ``#`` starts a
comment::

    letters A[0..1] hermitian
    letters B[0..1] hermitian
    rule A[x]*A[x] -> 1
    rule B[y]*B[y] -> 1
    rule B[y]*A[x] -> A[x]*B[y]
    generator swap: A[i] -> B[i], B[i] -> A[i]
    generator flip: A[1] -> -A[1]
    level 1
    maximize A[0]*B[0] + A[0]*B[1] + A[1]*B[0] - A[1]*B[1]

Rules and generator clauses are patterns: identifiers inside brackets are
variables bound by matching, the first matching rule or clause wins, and
letters matched by no clause are fixed by a generator.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .algebra import Alphabet, Letter, Polynomial, Word
from .evaluation import EvaluationRules
from .rewrite import RewriteError, RewriteSystem, check_compatibility
from .symmetry import GeneralizedPermutation, GroupError

MAX_LETTERS = 512
MAX_TERMS = 100_000
MAX_WORD = 256
MAX_DEPTH = 100
OPTION_NAMES = ("cap_basis", "cap_closure", "cap_group", "tolerance")

Index = Union[int, str]
Pos = Tuple[int, int]


class ProblemError(ValueError):
    """A syntax or validation error carrying a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


# --------------------------------------------------------------------------
# syntax tree

@dataclass(frozen=True)
class Pattern:
    family: str
    indices: Optional[Tuple[Index, ...]]
    dagger: bool = False
    pos: Pos = field(default=(0, 0), compare=False)

    def variables(self) -> List[str]:
        return [i for i in (self.indices or ()) if isinstance(i, str)]


@dataclass(frozen=True)
class LetterDecl:
    family: str
    ranges: Tuple[Tuple[int, int], ...]
    hermitian: bool
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class AdjointDecl:
    left: Pattern
    right: Pattern
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Condition:
    left: Index
    op: str
    right: Index


@dataclass(frozen=True)
class RuleDecl:
    lhs: Tuple[Pattern, Pattern]
    rhs: Optional[Tuple[Pattern, ...]]  # None is zero, () the empty word
    conditions: Tuple[Condition, ...] = ()
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Clause:
    source: Pattern
    negate: bool
    target: Pattern


@dataclass(frozen=True)
class GeneratorDecl:
    name: Optional[str]
    clauses: Tuple[Clause, ...]
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class PatternList:
    patterns: Tuple[Pattern, ...]  # empty tuple means every letter
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass
class ProblemDefinition:
    """Declarations of a problem plus the objects derived from them.

    Equality compares declarations only, so a parse/print round trip can be
    checked with ``==``.
    """

    letters: Tuple[LetterDecl, ...] = ()
    adjoints: Tuple[AdjointDecl, ...] = ()
    rules: Tuple[RuleDecl, ...] = ()
    generators: Tuple[GeneratorDecl, ...] = ()
    split: Optional[Union[str, GeneratorDecl]] = None
    real: bool = True
    transposes: Tuple[PatternList, ...] = ()
    cyclics: Tuple[PatternList, ...] = ()
    options: Tuple[Tuple[str, Fraction], ...] = ()
    level: Optional[int] = None
    objective_terms: Tuple[Tuple[Word, Fraction], ...] = ()

    alphabet: Alphabet = field(default=None, compare=False, repr=False)
    rewrite: RewriteSystem = field(default=None, compare=False, repr=False)
    generator_perms: Dict[str, GeneralizedPermutation] = field(default_factory=dict, compare=False, repr=False)
    split_perm: Optional[GeneralizedPermutation] = field(default=None, compare=False, repr=False)
    evaluation: EvaluationRules = field(default=None, compare=False, repr=False)
    objective: Polynomial = field(default=None, compare=False, repr=False)

    def option(self, name: str, default=None):
        for k, v in self.options:
            if k == name:
                return v
        return default


# --------------------------------------------------------------------------
# lexer

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|\.\.|!=|==|[\[\](),*+\-/':=^])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[List[Token]]:
    """Split into logical declarations, each a list of tokens."""
    decls: List[List[Token]] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        toks: List[Token] = []
        pos = 0
        while pos < len(line):
            m = _TOKEN.match(line, pos)
            if m is None:
                raise ProblemError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
            kind = m.lastgroup
            if kind not in ("ws", "comment"):
                toks.append(Token(kind, m.group(), lineno, pos + 1))
            pos = m.end()
        if not toks:
            continue
        if line[:1] in (" ", "\t"):
            if not decls:
                raise ProblemError("continuation line without a declaration", lineno, 1)
            decls[-1].extend(toks)
        else:
            decls.append(toks)
    return decls


class _Cursor:
    def __init__(self, toks: List[Token]):
        self.toks = toks
        self.i = 0
        self.depth = 0

    def peek(self, k: int = 0) -> Optional[Token]:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def error(self, message: str, tok: Optional[Token] = None) -> ProblemError:
        tok = tok or self.peek()
        if tok is None:
            last = self.toks[-1]
            return ProblemError(message, last.line, last.col + len(last.text))
        return ProblemError(message, tok.line, tok.col)

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of declaration")
        self.i += 1
        return tok

    def accept(self, text: str) -> Optional[Token]:
        tok = self.peek()
        if tok is not None and tok.text == text and tok.kind != "number":
            self.i += 1
            return tok
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text:
            raise self.error(f"expected {text!r}")
        self.i += 1
        return tok

    def expect_kind(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            raise self.error(f"expected {what}")
        self.i += 1
        return tok

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def end(self):
        if not self.done():
            raise self.error(f"unexpected {self.peek().text!r}")


def _int(tok: Token, cur: _Cursor) -> int:
    if tok.kind != "number" or "." in tok.text:
        raise cur.error("expected an integer", tok)
    return int(tok.text)


# --------------------------------------------------------------------------
# declaration parsers

def _pattern(cur: _Cursor, allow_bare: bool = False) -> Pattern:
    name = cur.expect_kind("ident", "a letter")
    indices: Optional[Tuple[Index, ...]] = ()
    if cur.accept("["):
        idx: List[Index] = []
        while True:
            tok = cur.next()
            if tok.kind == "number":
                idx.append(_int(tok, cur))
            elif tok.kind == "ident":
                idx.append(tok.text)
            else:
                raise cur.error("expected an index", tok)
            if cur.accept("]"):
                break
            cur.expect(",")
        indices = tuple(idx)
    elif allow_bare:
        indices = None
    dagger = cur.accept("'") is not None
    return Pattern(name.text, indices, dagger, (name.line, name.col))


def _parse_letters(cur: _Cursor, pos: Pos) -> LetterDecl:
    name = cur.expect_kind("ident", "a family name")
    ranges = []
    if cur.accept("["):
        while True:
            lo = _int(cur.next(), cur)
            hi = lo
            if cur.accept(".."):
                hi = _int(cur.next(), cur)
            if hi < lo:
                raise cur.error("empty index range")
            ranges.append((lo, hi))
            if cur.accept("]"):
                break
            cur.expect(",")
    hermitian = cur.accept("hermitian") is not None
    cur.end()
    return LetterDecl(name.text, tuple(ranges), hermitian, (name.line, name.col))


def _parse_rule(cur: _Cursor, pos: Pos) -> RuleDecl:
    first = cur.peek()
    lhs = [_pattern(cur)]
    while cur.accept("*"):
        lhs.append(_pattern(cur))
    if len(lhs) != 2:
        raise cur.error("left-hand side must have degree two", first)
    cur.expect("->")
    rhs: Optional[Tuple[Pattern, ...]]
    tok = cur.peek()
    if tok is not None and tok.kind == "number":
        cur.next()
        if tok.text == "0":
            rhs = None
        elif tok.text == "1":
            rhs = ()
        else:
            raise cur.error("right-hand side must be 0, 1 or a product of letters", tok)
    else:
        parts = [_pattern(cur)]
        while cur.accept("*"):
            parts.append(_pattern(cur))
        if len(parts) > 2:
            raise cur.error("right-hand side must have degree at most two", tok)
        rhs = tuple(parts)
    conds = []
    if cur.accept("if"):
        while True:
            left = cur.next()
            op = cur.next()
            if op.text not in ("==", "!="):
                raise cur.error("expected '==' or '!='", op)
            right = cur.next()
            conds.append(Condition(_index_value(left, cur), op.text, _index_value(right, cur)))
            if not cur.accept("and"):
                break
    cur.end()
    bound = {v for p in lhs for v in p.variables()}
    for p in (rhs or ()):
        for v in p.variables():
            if v not in bound:
                raise ProblemError(f"variable {v!r} is not bound by the left-hand side", *p.pos)
    for c in conds:
        for v in (c.left, c.right):
            if isinstance(v, str) and v not in bound:
                raise ProblemError(f"variable {v!r} is not bound by the left-hand side", *pos)
    return RuleDecl((lhs[0], lhs[1]), rhs, tuple(conds), pos)


def _index_value(tok: Token, cur: _Cursor) -> Index:
    if tok.kind == "number":
        return _int(tok, cur)
    if tok.kind == "ident":
        return tok.text
    raise cur.error("expected an index or variable", tok)


def _parse_clauses(cur: _Cursor, name: Optional[str], pos: Pos) -> GeneratorDecl:
    clauses = []
    while True:
        src = _pattern(cur)
        cur.expect("->")
        negate = cur.accept("-") is not None
        dst = _pattern(cur)
        bound = set(src.variables())
        for v in dst.variables():
            if v not in bound:
                raise ProblemError(f"variable {v!r} is not bound by the source pattern", *dst.pos)
        clauses.append(Clause(src, negate, dst))
        if not cur.accept(","):
            break
    cur.end()
    return GeneratorDecl(name, tuple(clauses), pos)


def _parse_plist(cur: _Cursor, pos: Pos) -> PatternList:
    if cur.accept("*"):
        cur.end()
        return PatternList((), pos)
    pats = [_pattern(cur, allow_bare=True)]
    while cur.accept(","):
        pats.append(_pattern(cur, allow_bare=True))
    cur.end()
    return PatternList(tuple(pats), pos)


# objective expressions evaluate to free polynomials: dict word -> Fraction

class _Expr:
    def __init__(self, cur: _Cursor, resolve):
        self.cur = cur
        self.resolve = resolve

    def expr(self) -> Dict[Word, Fraction]:
        cur = self.cur
        cur.depth += 1
        if cur.depth > MAX_DEPTH:
            raise cur.error("expression nested too deeply")
        sign = Fraction(1)
        if cur.accept("-"):
            sign = Fraction(-1)
        else:
            cur.accept("+")
        acc = _scale(self.term(), sign)
        while True:
            if cur.accept("+"):
                acc = _add(acc, self.term())
            elif cur.accept("-"):
                acc = _add(acc, _scale(self.term(), Fraction(-1)))
            else:
                break
        cur.depth -= 1
        return acc

    def term(self) -> Dict[Word, Fraction]:
        cur = self.cur
        acc = self.power()
        while True:
            tok = cur.peek()
            if cur.accept("*"):
                acc = _mul(acc, self.power(), cur, tok)
            elif cur.accept("/"):
                den = self.power()
                if set(den) - {()} or not den.get(()):
                    raise cur.error("can only divide by a nonzero number", tok)
                acc = _scale(acc, 1 / den[()])
            else:
                return acc

    def power(self) -> Dict[Word, Fraction]:
        cur = self.cur
        base = self.factor()
        tok = cur.peek()
        if cur.accept("^"):
            k = _int(cur.next(), cur)
            if k > 64:
                raise cur.error("exponent too large", tok)
            out: Dict[Word, Fraction] = {(): Fraction(1)}
            for _ in range(k):
                out = _mul(out, base, cur, tok)
            return out
        return base

    def factor(self) -> Dict[Word, Fraction]:
        cur = self.cur
        tok = cur.peek()
        if tok is None:
            raise cur.error("expected a term")
        if tok.kind == "number":
            cur.next()
            return {(): Fraction(tok.text)}
        if cur.accept("("):
            inner = self.expr()
            cur.expect(")")
            return inner
        if tok.kind == "ident":
            pat = _pattern(cur)
            if any(isinstance(i, str) for i in pat.indices):
                raise ProblemError("objective letters need integer indices", *pat.pos)
            return {(self.resolve(pat),): Fraction(1)}
        if tok.text == "-":
            cur.next()
            return _scale(self.factor(), Fraction(-1))
        raise cur.error(f"unexpected {tok.text!r}")


def _scale(p, k):
    return {w: c * k for w, c in p.items() if c * k != 0}


def _add(p, q):
    out = dict(p)
    for w, c in q.items():
        out[w] = out.get(w, Fraction(0)) + c
    return {w: c for w, c in out.items() if c != 0}


def _mul(p, q, cur, tok):
    if len(p) * len(q) > MAX_TERMS:
        raise cur.error("objective has too many terms", tok)
    out: Dict[Word, Fraction] = {}
    for v, a in p.items():
        for w, b in q.items():
            u = v + w
            if len(u) > MAX_WORD:
                raise cur.error("objective monomial too long", tok)
            out[u] = out.get(u, Fraction(0)) + a * b
    return {w: c for w, c in out.items() if c != 0}


# --------------------------------------------------------------------------
# semantic phase

class _Letters:
    def __init__(self, decls: Sequence[LetterDecl]):
        self.families: Dict[str, LetterDecl] = {}
        self.letters: List[Letter] = []
        self.lookup: Dict[Tuple[str, Tuple[int, ...]], int] = {}
        self.by_family: Dict[str, List[int]] = {}
        self.hermitian: List[bool] = []
        for d in decls:
            if d.family in self.families:
                raise ProblemError(f"letter family {d.family!r} declared twice", *d.pos)
            count = 1
            for lo, hi in d.ranges:
                count *= hi - lo + 1
            if len(self.letters) + count > MAX_LETTERS:
                raise ProblemError(f"more than {MAX_LETTERS} letters declared", *d.pos)
            self.families[d.family] = d
            members = self.by_family.setdefault(d.family, [])
            for idx in itertools.product(*(range(lo, hi + 1) for lo, hi in d.ranges)):
                self.letters.append(Letter(d.family, tuple(idx)))
                k = len(self.letters)
                self.lookup[(d.family, tuple(idx))] = k
                members.append(k)
                self.hermitian.append(d.hermitian)

    def candidates(self, pat: Pattern) -> List[int]:
        if pat.family not in self.families:
            raise ProblemError(f"unknown letter family {pat.family!r}", *pat.pos)
        arity = len(self.families[pat.family].ranges)
        if pat.indices is not None and len(pat.indices) != arity:
            raise ProblemError(f"{pat.family} takes {arity} indices", *pat.pos)
        return self.by_family[pat.family]

    def match(self, pat: Pattern, k: int, env: Dict[str, int]) -> Optional[Dict[str, int]]:
        letter = self.letters[k - 1]
        if letter.family != pat.family:
            return None
        if pat.indices is None:
            return env
        env = dict(env)
        for want, have in zip(pat.indices, letter.indices):
            if isinstance(want, int):
                if want != have:
                    return None
            elif want in env:
                if env[want] != have:
                    return None
            else:
                env[want] = have
        return env

    def instantiate(self, pat: Pattern, env: Dict[str, int]) -> int:
        self.candidates(pat)
        idx = tuple(env[i] if isinstance(i, str) else i for i in pat.indices)
        k = self.lookup.get((pat.family, idx))
        if k is None:
            shown = pat.family + ("[" + ",".join(map(str, idx)) + "]" if idx else "")
            raise ProblemError(f"unknown letter {shown}", *pat.pos)
        return k


def _adjoint_table(letters: _Letters, decls: Sequence[AdjointDecl]) -> List[int]:
    n = len(letters.letters)
    adj = [0] * (n + 1)
    for k in range(1, n + 1):
        if letters.hermitian[k - 1]:
            adj[k] = k
    for d in decls:
        for k in letters.candidates(d.left):
            env = letters.match(d.left, k, {})
            if env is None:
                continue
            t = letters.instantiate(d.right, env)
            for a, b in ((k, t), (t, k)):
                if adj[a] not in (0, b):
                    raise ProblemError("adjoint declaration is not an involution", *d.pos)
                adj[a] = b
    for k in range(1, n + 1):
        if adj[k] == 0:
            raise ProblemError(f"letter {letters.letters[k - 1].name} has no declared adjoint",
                               *letters.families[letters.letters[k - 1].family].pos)
    return adj[1:]


def _resolve_ref(letters: _Letters, alphabet: Alphabet, pat: Pattern) -> int:
    k = letters.instantiate(pat, {})
    return alphabet.adjoint_letter(k) if pat.dagger else k


def _rule_table(letters: _Letters, alphabet: Alphabet, decls: Sequence[RuleDecl]):
    table: Dict[Tuple[int, int], Optional[Word]] = {}
    origin: Dict[Tuple[int, int], RuleDecl] = {}
    for d in decls:
        p1, p2 = d.lhs
        for i in letters.candidates(p1):
            env1 = letters.match(p1, i, {})
            if env1 is None:
                continue
            i_eff = alphabet.adjoint_letter(i) if p1.dagger else i
            for j in letters.candidates(p2):
                env = letters.match(p2, j, env1)
                if env is None:
                    continue
                j_eff = alphabet.adjoint_letter(j) if p2.dagger else j
                if (i_eff, j_eff) in table:
                    continue
                if not all(_holds(c, env) for c in d.conditions):
                    continue
                if d.rhs is None:
                    rhs = None
                else:
                    rhs = []
                    for p in d.rhs:
                        k = letters.instantiate(p, env)
                        rhs.append(alphabet.adjoint_letter(k) if p.dagger else k)
                    rhs = tuple(rhs)
                table[(i_eff, j_eff)] = rhs
                origin[(i_eff, j_eff)] = d
    for pair, rhs in table.items():
        if rhs is not None and len(rhs) == 2 and rhs != pair and rhs in table and table[rhs] != rhs:
            raise ProblemError(
                f"right-hand side {alphabet.format_word(rhs)} is not in normal form", *origin[pair].pos)
    return table, origin


def _holds(c: Condition, env: Dict[str, int]) -> bool:
    a = env[c.left] if isinstance(c.left, str) else c.left
    b = env[c.right] if isinstance(c.right, str) else c.right
    return (a == b) if c.op == "==" else (a != b)


def _generator(letters: _Letters, alphabet: Alphabet, rewrite: RewriteSystem,
               d: GeneratorDecl) -> GeneralizedPermutation:
    n = len(alphabet)
    label = f"generator {d.name}" if d.name else "split generator"
    images: Dict[int, int] = {}
    for cl in d.clauses:
        for k in letters.candidates(cl.source):
            env = letters.match(cl.source, k, {})
            if env is None:
                continue
            src = alphabet.adjoint_letter(k) if cl.source.dagger else k
            if src in images:
                continue
            t = letters.instantiate(cl.target, env)
            t = alphabet.adjoint_letter(t) if cl.target.dagger else t
            images[src] = -t if cl.negate else t
    # adjoints of mapped letters follow their partner
    for k in list(images):
        a = alphabet.adjoint_letter(k)
        if a not in images:
            images[a] = alphabet.adjoint_letter(images[k])
    try:
        g = GeneralizedPermutation.from_mapping(n, images)
    except GroupError:
        raise ProblemError(f"{label} is not a bijection on letters", *d.pos) from None
    if not g.commutes_with_adjoint(alphabet):
        raise ProblemError(f"{label} does not commute with the adjoint", *d.pos)
    try:
        ok = check_compatibility(g, rewrite)
    except RewriteError as exc:
        raise ProblemError(str(exc), *d.pos) from None
    if not ok:
        raise ProblemError(f"{label} is not compatible with the rewriting rules", *d.pos)
    return g


def _predicate(letters: _Letters, plist: PatternList) -> frozenset:
    if not plist.patterns:
        return frozenset(range(1, len(letters.letters) + 1))
    out = set()
    for pat in plist.patterns:
        for k in letters.candidates(pat):
            if letters.match(pat, k, {}) is not None:
                out.add(k)
    return frozenset(out)


# --------------------------------------------------------------------------
# entry points

_KEYWORDS = ("letters", "adjoint", "rule", "generator", "split", "evaluation",
             "transpose", "cyclic", "option", "level", "maximize")


def parse_problem(text: str) -> ProblemDefinition:
    """Parse and validate a problem file, raising :class:`ProblemError`."""
    decls = _tokenize(text)
    pd = ProblemDefinition()
    letters_d, adjoints, rules, gens, transposes, cyclics, options = [], [], [], [], [], [], []
    objective_cursor = None
    split = None
    seen: Dict[str, Token] = {}
    for toks in decls:
        cur = _Cursor(toks)
        head = cur.next()
        pos = (head.line, head.col)
        kw = head.text
        if head.kind != "ident" or kw not in _KEYWORDS:
            raise ProblemError(f"unknown declaration {head.text!r}", *pos)
        if kw in ("split", "evaluation", "level", "maximize"):
            if kw in seen:
                raise ProblemError(f"duplicate {kw} declaration", *pos)
            seen[kw] = head
        if kw == "letters":
            letters_d.append(_parse_letters(cur, pos))
        elif kw == "adjoint":
            left = _pattern(cur)
            cur.expect("=")
            right = _pattern(cur)
            cur.end()
            if set(right.variables()) - set(left.variables()):
                raise ProblemError("unbound variable in adjoint declaration", *right.pos)
            adjoints.append(AdjointDecl(left, right, pos))
        elif kw == "rule":
            rules.append(_parse_rule(cur, pos))
        elif kw == "generator":
            name = cur.expect_kind("ident", "a generator name")
            if any(g.name == name.text for g in gens):
                raise ProblemError(f"generator {name.text!r} declared twice", name.line, name.col)
            cur.expect(":")
            gens.append(_parse_clauses(cur, name.text, pos))
        elif kw == "split":
            if cur.accept(":"):
                split = _parse_clauses(cur, None, pos)
            else:
                ref = cur.expect_kind("ident", "a generator name or ':'")
                cur.end()
                split = (ref.text, (ref.line, ref.col))
        elif kw == "evaluation":
            tok = cur.next()
            if tok.text not in ("real", "complex"):
                raise cur.error("expected 'real' or 'complex'", tok)
            cur.end()
            pd.real = tok.text == "real"
        elif kw == "transpose":
            transposes.append(_parse_plist(cur, pos))
        elif kw == "cyclic":
            cyclics.append(_parse_plist(cur, pos))
        elif kw == "option":
            name = cur.expect_kind("ident", "an option name")
            if name.text not in OPTION_NAMES:
                raise ProblemError(f"unknown option {name.text!r}", name.line, name.col)
            cur.expect("=")
            val = cur.expect_kind("number", "a number")
            cur.end()
            options.append((name.text, Fraction(val.text)))
        elif kw == "level":
            tok = cur.next()
            level = _int(tok, cur)
            if level < 1:
                raise cur.error("level must be at least 1", tok)
            cur.end()
            pd.level = level
        elif kw == "maximize":
            if cur.done():
                raise cur.error("empty objective")
            objective_cursor = cur

    if objective_cursor is None:
        raise ProblemError("missing objective", *(decls[-1][0].line + 1, 1) if decls else (1, 1))

    letters = _Letters(letters_d)
    try:
        alphabet = Alphabet(letters.letters, _adjoint_table(letters, adjoints))
    except ValueError as exc:
        if isinstance(exc, ProblemError):
            raise
        raise ProblemError(str(exc), 1, 1) from None
    table, origin = _rule_table(letters, alphabet, rules)
    try:
        rewrite = RewriteSystem(alphabet, table)
    except RewriteError as exc:
        first = rules[0].pos if rules else (1, 1)
        raise ProblemError(str(exc), *first) from None

    perms: Dict[str, GeneralizedPermutation] = {}
    for d in gens:
        perms[d.name] = _generator(letters, alphabet, rewrite, d)
    split_perm = None
    if isinstance(split, tuple):
        name, spos = split
        if name not in perms:
            raise ProblemError(f"unknown generator {name!r}", *spos)
        split_perm = perms[name]
        split = name
    elif split is not None:
        split_perm = _generator(letters, alphabet, rewrite, split)
    if split_perm is not None and split_perm.order() != 2:
        tok = seen["split"]
        raise ProblemError("split generator must have order two", tok.line, tok.col)

    ev = EvaluationRules(pd.real,
                         tuple(_predicate(letters, p) for p in transposes),
                         tuple(_predicate(letters, p) for p in cyclics))

    free = _Expr(objective_cursor, lambda pat: _resolve_ref(letters, alphabet, pat)).expr()
    objective_cursor.end()
    try:
        objective = rewrite.polynomial(free.items())
    except RewriteError as exc:
        tok = seen["maximize"]
        raise ProblemError(str(exc), tok.line, tok.col) from None
    if pd.level is not None and objective.degree > 2 * pd.level:
        tok = seen["maximize"]
        raise ProblemError(f"objective degree {objective.degree} exceeds twice the level {pd.level}",
                           tok.line, tok.col)

    pd.letters = tuple(letters_d)
    pd.adjoints = tuple(adjoints)
    pd.rules = tuple(rules)
    pd.generators = tuple(gens)
    pd.split = split
    pd.transposes = tuple(transposes)
    pd.cyclics = tuple(cyclics)
    pd.options = tuple(options)
    pd.objective_terms = tuple(free.items())
    pd.alphabet = alphabet
    pd.rewrite = rewrite
    pd.generator_perms = perms
    pd.split_perm = split_perm
    pd.evaluation = ev
    pd.objective = objective
    return pd


def _fmt_index(i: Index) -> str:
    return str(i)


def _fmt_pattern(p: Pattern) -> str:
    s = p.family
    if p.indices:
        s += "[" + ",".join(_fmt_index(i) for i in p.indices) + "]"
    return s + ("'" if p.dagger else "")


def _fmt_letter(letter: Letter) -> str:
    if not letter.indices:
        return letter.family
    return f"{letter.family}[{','.join(map(str, letter.indices))}]"


def _fmt_clauses(d: GeneratorDecl) -> str:
    return ", ".join(f"{_fmt_pattern(c.source)} -> {'-' if c.negate else ''}{_fmt_pattern(c.target)}"
                     for c in d.clauses)


def _fmt_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_problem(pd: ProblemDefinition) -> str:
    """Canonical text of a problem; ``parse_problem`` reads it back unchanged."""
    out = []
    for d in pd.letters:
        s = f"letters {d.family}"
        if d.ranges:
            s += "[" + ", ".join(f"{lo}..{hi}" if hi != lo else str(lo) for lo, hi in d.ranges) + "]"
        if d.hermitian:
            s += " hermitian"
        out.append(s)
    for d in pd.adjoints:
        out.append(f"adjoint {_fmt_pattern(d.left)} = {_fmt_pattern(d.right)}")
    for d in pd.rules:
        lhs = "*".join(_fmt_pattern(p) for p in d.lhs)
        if d.rhs is None:
            rhs = "0"
        elif not d.rhs:
            rhs = "1"
        else:
            rhs = "*".join(_fmt_pattern(p) for p in d.rhs)
        s = f"rule {lhs} -> {rhs}"
        if d.conditions:
            s += " if " + " and ".join(f"{c.left} {c.op} {c.right}" for c in d.conditions)
        out.append(s)
    for d in pd.generators:
        out.append(f"generator {d.name}: {_fmt_clauses(d)}")
    if isinstance(pd.split, str):
        out.append(f"split {pd.split}")
    elif pd.split is not None:
        out.append(f"split: {_fmt_clauses(pd.split)}")
    out.append(f"evaluation {'real' if pd.real else 'complex'}")
    for kw, lists in (("transpose", pd.transposes), ("cyclic", pd.cyclics)):
        for pl in lists:
            body = "*" if not pl.patterns else ", ".join(_fmt_pattern(p) for p in pl.patterns)
            out.append(f"{kw} {body}")
    for name, val in pd.options:
        out.append(f"option {name} = {_fmt_option(val)}")
    if pd.level is not None:
        out.append(f"level {pd.level}")
    out.append("maximize " + _fmt_objective(pd))
    return "\n".join(out) + "\n"


def _fmt_option(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return repr(float(v))


def _fmt_objective(pd: ProblemDefinition) -> str:
    if not pd.objective_terms:
        return "0"
    letters = pd.alphabet.letters
    parts = []
    for k, (w, c) in enumerate(pd.objective_terms):
        mag = abs(c)
        body = "*".join(_fmt_letter(letters[i - 1]) for i in w)
        if not w:
            body = _fmt_coef(mag)
        elif mag != 1:
            body = f"{_fmt_coef(mag)}*{body}"
        if k == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def load_problem(path) -> ProblemDefinition:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())
