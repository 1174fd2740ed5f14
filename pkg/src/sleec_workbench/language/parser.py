"""Recursive-descent parser for SLEEC documents.

The document layout is a definitions block followed by a rules block::

    def_start
        event <Name>
        measure <name>: <boolean|numeric|scale(l1, ..., ln)>
        constant <name> = <int>
    def_end
    rule_start
        <Id> when <Event> [and <Condition>] then [not] <Event>
             [within <n> <unit>]
             (unless <Condition> [then [not] <Event> [within ...]])*
    rule_end

On a syntax error inside a rule the parser skips to the next rule
boundary (an identifier followed by ``when``, or ``rule_end``) so one run
reports every broken rule. A prohibition (``then not ...``) without a
``within`` deadline is rejected here: an unbounded prohibition has no
meaning to the bounded checker.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Category, Diagnostic, Severity, Span, has_errors
from .nodes import (
    AndExpr,
    BoolAtom,
    Comparison,
    Condition,
    ConstantDef,
    Defeater,
    EventDef,
    IntLit,
    MeasureDef,
    MeasureKind,
    NameRef,
    NotExpr,
    OrExpr,
    Polarity,
    Response,
    Rule,
    Spec,
    TimeUnit,
    TimeValue,
)
from .tokens import TIME_UNITS, Token, TokenType, tokenize

_I64_MAX = 2**63 - 1

_CMP_TYPES = {
    TokenType.LT: "<",
    TokenType.GT: ">",
    TokenType.LE: "<=",
    TokenType.GE: ">=",
    TokenType.EQ: "=",
    TokenType.NEQ: "<>",
}


class _ParseAbort(Exception):
    """Internal signal: give up on the current construct and resynchronise."""


@dataclass
class ParseResult:
    spec: Spec | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.spec is not None and not has_errors(self.diagnostics)


class SleecParseError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(d.render() for d in diagnostics))
        self.diagnostics = diagnostics


def parse(text: str) -> ParseResult:
    """Parse ``text`` into a Spec, recovering at rule boundaries on errors."""
    tokens, diagnostics = tokenize(text)
    parser = _Parser(tokens, diagnostics)
    spec = parser.parse_document()
    return ParseResult(spec, parser.diagnostics)


def parse_spec(text: str) -> Spec:
    """Parse, raising :class:`SleecParseError` on any error diagnostic."""
    result = parse(text)
    if not result.ok:
        errors = [d for d in result.diagnostics if d.severity is Severity.ERROR]
        raise SleecParseError(errors or result.diagnostics)
    assert result.spec is not None
    return result.spec


def parse_rule_text(text: str) -> tuple[Rule | None, list[Diagnostic]]:
    """Parse a single rule snippet (as suggested by the explanation pipeline)."""
    tokens, diagnostics = tokenize(text)
    parser = _Parser(tokens, diagnostics)
    rule = parser.parse_single_rule()
    return rule, parser.diagnostics


class _Parser:
    def __init__(self, tokens: list[Token], diagnostics: list[Diagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics = diagnostics

    # --- token helpers -------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        idx = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[idx]

    def advance(self) -> Token:
        tok = self.cur
        if tok.type is not TokenType.EOF:
            self.pos += 1
        return tok

    def at_keyword(self, word: str) -> bool:
        return self.cur.type is TokenType.KEYWORD and self.cur.text == word

    def eat_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            self.fail(f"expected '{word}', found {self.describe(self.cur)}")
        return self.advance()

    def expect(self, ttype: TokenType, what: str) -> Token:
        if self.cur.type is not ttype:
            self.fail(f"expected {what}, found {self.describe(self.cur)}")
        return self.advance()

    def expect_event(self, what: str) -> Token:
        # An identifier right before `when` is the next rule's id, not an
        # event reference; failing here lets recovery resynchronise cleanly.
        if self.cur.type is TokenType.IDENT and self.peek().type is TokenType.KEYWORD \
                and self.peek().text == "when":
            self.fail(f"expected {what} before the next rule starts")
        return self.expect(TokenType.IDENT, what)

    def describe(self, tok: Token) -> str:
        if tok.type is TokenType.EOF:
            return "end of input"
        if tok.type is TokenType.UNSUPPORTED:
            return f"unsupported keyword '{tok.text}'"
        return f"'{tok.text}'"

    def error(self, message: str, span: Span | None = None) -> None:
        self.diagnostics.append(
            Diagnostic(Severity.ERROR, Category.SYNTAX, span or self.cur.span, message)
        )

    def fail(self, message: str, span: Span | None = None) -> None:
        if self.cur.type is TokenType.UNSUPPORTED and span is None:
            self.error(
                f"unsupported SLEEC construct '{self.cur.text}' "
                "(only when/then/unless/within rules are accepted)"
            )
        else:
            self.error(message, span)
        raise _ParseAbort()

    # --- document ------------------------------------------------------

    def parse_document(self) -> Spec:
        events: list[EventDef] = []
        measures: list[MeasureDef] = []
        constants: list[ConstantDef] = []
        rules: list[Rule] = []

        try:
            self.eat_keyword("def_start")
        except _ParseAbort:
            self.sync_to_keywords({"event", "measure", "constant", "def_end", "rule_start"})
        self.parse_definitions(events, measures, constants)
        try:
            self.eat_keyword("rule_start")
        except _ParseAbort:
            self.sync_to_rule_boundary()
        while not self.at_keyword("rule_end") and self.cur.type is not TokenType.EOF:
            start = self.pos
            try:
                rules.append(self.parse_rule())
            except _ParseAbort:
                if self.pos == start:
                    self.advance()
                self.sync_to_rule_boundary()
        try:
            self.eat_keyword("rule_end")
        except _ParseAbort:
            pass
        if self.cur.type is not TokenType.EOF:
            self.error(f"unexpected trailing input: {self.describe(self.cur)}")
        return Spec(tuple(events), tuple(measures), tuple(constants), tuple(rules))

    def sync_to_keywords(self, words: set[str]) -> None:
        while self.cur.type is not TokenType.EOF:
            if self.cur.type is TokenType.KEYWORD and self.cur.text in words:
                return
            self.advance()

    def sync_to_rule_boundary(self) -> None:
        """Skip to the next `<Id> when` pair, `rule_end`, or end of input."""
        while self.cur.type is not TokenType.EOF:
            if self.at_keyword("rule_end"):
                return
            if self.cur.type is TokenType.IDENT and self.peek().type is TokenType.KEYWORD \
                    and self.peek().text == "when":
                return
            self.advance()

    # --- definitions ---------------------------------------------------

    def parse_definitions(
        self,
        events: list[EventDef],
        measures: list[MeasureDef],
        constants: list[ConstantDef],
    ) -> None:
        while True:
            if self.at_keyword("def_end"):
                self.advance()
                return
            if self.cur.type is TokenType.EOF or self.at_keyword("rule_start"):
                self.error("expected 'def_end'")
                return
            try:
                if self.at_keyword("event"):
                    start = self.advance()
                    name = self.expect(TokenType.IDENT, "event name")
                    events.append(EventDef(name.text, span=_join(start.span, name.span)))
                elif self.at_keyword("measure"):
                    measures.append(self.parse_measure())
                elif self.at_keyword("constant"):
                    start = self.advance()
                    name = self.expect(TokenType.IDENT, "constant name")
                    self.expect(TokenType.EQ, "'='")
                    value, vspan = self.parse_int()
                    if abs(value) > _I64_MAX:
                        self.error("constant value outside 64-bit signed range", vspan)
                    else:
                        constants.append(
                            ConstantDef(name.text, value, span=_join(start.span, vspan))
                        )
                else:
                    self.fail(
                        f"expected 'event', 'measure', or 'constant', found {self.describe(self.cur)}"
                    )
            except _ParseAbort:
                self.sync_to_keywords({"event", "measure", "constant", "def_end", "rule_start"})

    def parse_measure(self) -> MeasureDef:
        start = self.advance()  # 'measure'
        name = self.expect(TokenType.IDENT, "measure name")
        self.expect(TokenType.COLON, "':'")
        if self.cur.type is not TokenType.TYPENAME:
            self.fail(f"expected 'boolean', 'numeric', or 'scale(...)', found {self.describe(self.cur)}")
        tname = self.advance()
        if tname.text == "boolean":
            return MeasureDef(name.text, MeasureKind.BOOLEAN, span=_join(start.span, tname.span))
        if tname.text == "numeric":
            return MeasureDef(name.text, MeasureKind.NUMERIC, span=_join(start.span, tname.span))
        self.expect(TokenType.LPAREN, "'('")
        literals: list[str] = []
        while True:
            lit = self.expect(TokenType.IDENT, "scale literal")
            literals.append(lit.text)
            if self.cur.type is TokenType.COMMA:
                self.advance()
                continue
            break
        close = self.expect(TokenType.RPAREN, "')'")
        if len(literals) < 2:
            self.error("a scale needs at least 2 literals", _join(start.span, close.span))
        if len(set(literals)) != len(literals):
            self.error(f"duplicate scale literal in '{name.text}'", _join(start.span, close.span))
        return MeasureDef(
            name.text, MeasureKind.SCALE, tuple(literals), span=_join(start.span, close.span)
        )

    def parse_int(self) -> tuple[int, Span]:
        negative = False
        start_span = self.cur.span
        if self.cur.type is TokenType.MINUS:
            negative = True
            self.advance()
        tok = self.expect(TokenType.INT, "an integer")
        value = int(tok.text)
        return (-value if negative else value), _join(start_span, tok.span)

    # --- rules -----------------------------------------------------------

    def parse_single_rule(self) -> Rule | None:
        try:
            rule = self.parse_rule()
        except _ParseAbort:
            return None
        if self.cur.type is not TokenType.EOF:
            self.error(f"unexpected trailing input: {self.describe(self.cur)}")
            return None
        return rule

    def parse_rule(self) -> Rule:
        rid = self.expect(TokenType.IDENT, "a rule identifier")
        self.eat_keyword("when")
        trigger = self.expect_event("a trigger event")
        condition: Condition | None = None
        if self.at_keyword("and"):
            self.advance()
            condition = self.parse_condition()
        self.eat_keyword("then")
        response = self.parse_response()
        defeaters: list[Defeater] = []
        while self.at_keyword("unless"):
            start = self.advance()
            dcond = self.parse_condition()
            dresp: Response | None = None
            if self.at_keyword("then"):
                self.advance()
                dresp = self.parse_response()
            end_span = dresp.span if dresp is not None else _cond_span(dcond)
            defeaters.append(Defeater(dcond, dresp, span=_join(start.span, end_span)))
        end = response.span if not defeaters else defeaters[-1].span
        return Rule(
            rid.text,
            trigger.text,
            condition,
            response,
            tuple(defeaters),
            span=_join(rid.span, end),
        )

    def parse_response(self) -> Response:
        start_span = self.cur.span
        polarity = Polarity.MUST
        if self.at_keyword("not"):
            polarity = Polarity.MUST_NOT
            self.advance()
        event = self.expect_event("a response event")
        deadline: TimeValue | None = None
        end_span = event.span
        if self.at_keyword("within"):
            w = self.advance()
            amount, aspan = self.parse_int()
            if self.cur.type is not TokenType.UNIT:
                self.fail("expected a time unit (seconds/minutes/hours/days)")
            unit_tok = self.advance()
            if amount < 1:
                self.error("a 'within' deadline must be at least 1", _join(w.span, unit_tok.span))
                raise _ParseAbort()
            unit = TimeUnit(TIME_UNITS[unit_tok.text])
            deadline = TimeValue(amount, unit, span=_join(w.span, unit_tok.span))
            end_span = unit_tok.span
        if polarity is Polarity.MUST_NOT and deadline is None:
            self.error(
                f"prohibition of '{event.text}' needs a 'within' deadline "
                "(an unbounded 'then not' cannot be checked)",
                _join(start_span, event.span),
            )
            raise _ParseAbort()
        return Response(polarity, event.text, deadline, span=_join(start_span, end_span))

    # --- conditions ------------------------------------------------------

    def parse_condition(self) -> Condition:
        left = self.parse_and()
        while self.at_keyword("or"):
            self.advance()
            right = self.parse_and()
            left = OrExpr(left, right, span=_join(_cond_span(left), _cond_span(right)))
        return left

    def parse_and(self) -> Condition:
        left = self.parse_unary()
        while self.at_keyword("and"):
            self.advance()
            right = self.parse_unary()
            left = AndExpr(left, right, span=_join(_cond_span(left), _cond_span(right)))
        return left

    def parse_unary(self) -> Condition:
        if self.at_keyword("not"):
            start = self.advance()
            inner = self.parse_unary()
            return NotExpr(inner, span=_join(start.span, _cond_span(inner)))
        return self.parse_atom()

    def parse_atom(self) -> Condition:
        if self.cur.type is TokenType.LPAREN:
            self.advance()
            inner = self.parse_condition()
            self.expect(TokenType.RPAREN, "')'")
            return inner
        name = self.expect(TokenType.IDENT, "a measure name")
        if self.cur.type in _CMP_TYPES:
            op_tok = self.advance()
            operand = self.parse_operand()
            ospan = operand.span
            return Comparison(name.text, _CMP_TYPES[op_tok.type], operand, span=_join(name.span, ospan))
        return BoolAtom(name.text, span=name.span)

    def parse_operand(self):
        if self.cur.type in (TokenType.INT, TokenType.MINUS):
            value, span = self.parse_int()
            return IntLit(value, span=span)
        tok = self.expect(TokenType.IDENT, "an integer, constant, or scale literal")
        return NameRef(tok.text, span=tok.span)


def _join(a: Span, b: Span) -> Span:
    return Span(a.line, a.col, b.end_line, b.end_col)


def _cond_span(cond: Condition) -> Span:
    return cond.span
