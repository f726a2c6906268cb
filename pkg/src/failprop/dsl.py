"""The ``.fprop`` text format.

Example::

    model tiny
    values { v0 v1 }

    function F {
      in iSel free
      out o
      transfer o.status = {
        F.status = OK implies OK
        else F.status = Lost implies Lost
        else Err
      }
      transfer o.value = iSel.value
    }

    function G {
      in i
      out p
      transfer p.status = G.status = OK implies i.status else G.status
    }

    flow o -> i

    assert nominal {
      when others OK
      expect p.status = OK
    }

See ``docs/grammar.md`` for the full grammar.  Lexical and syntax errors raise
:class:`ParseError`; structurally invalid models raise :class:`ModelError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from failprop.errors import ModelError, ParseError, SourceSpan
from failprop.expr import (
    STATUS,
    VALUE,
    And,
    Chain,
    Compare,
    Not,
    Or,
    Ref,
    Status,
    StatusLit,
    ValueLit,
)
from failprop.model import (
    RESERVED,
    Assertion,
    Constraint,
    Equality,
    Flow,
    FunctionDecl,
    Model,
    Transfer,
    assertion_violations,
    validate_structure,
)

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<comment>//[^\n]*)"
    r"|(?P<arrow>->|→)"
    r"|(?P<ne>!=|≠)"
    r"|(?P<punct>[{}().,=])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
)

_STATUS_NAMES = {s.value: s for s in Status}


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "sym", "eof"
    text: str
    span: SourceSpan


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(file, line, col))
        chunk = m.group()
        kind = m.lastgroup
        if kind == "ident":
            tokens.append(Token("ident", chunk, SourceSpan(file, line, col, len(chunk))))
        elif kind == "arrow":
            tokens.append(Token("sym", "->", SourceSpan(file, line, col, len(chunk))))
        elif kind == "ne":
            tokens.append(Token("sym", "!=", SourceSpan(file, line, col, len(chunk))))
        elif kind == "punct":
            tokens.append(Token("sym", chunk, SourceSpan(file, line, col, 1)))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(file, line, col, 0)))
    return tokens


class _Parser:
    def __init__(self, text: str, file: str):
        self.toks = tokenize(text, file)
        self.i = 0

    # -- token plumbing --

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind != "eof" and self.tok.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def fail(self, message: str, expected=()) -> ParseError:
        found = self.tok.text or "end of input"
        return ParseError(f"{message}, found {found!r}", self.tok.span, tuple(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail(f"expected {text!r}", (text,))
        return self.advance()

    def name(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in RESERVED:
            raise self.fail(f"expected {what}", (what,))
        return self.advance()

    def attr(self) -> str:
        if self.at(STATUS) or self.at(VALUE):
            return self.advance().text
        raise self.fail("expected attribute", (STATUS, VALUE))

    def done(self):
        if self.tok.kind != "eof":
            raise self.fail("unexpected trailing input", ("end of input",))

    # -- model --

    def model(self):
        start = self.expect("model")
        name = self.name("model name").text
        self.expect("values")
        self.expect("{")
        values = []
        while not self.at("}"):
            values.append(self.name("value name").text)
        self.expect("}")
        functions, flows, assertions = [], [], []
        while self.tok.kind != "eof":
            if self.at("function"):
                functions.append(self.function())
            elif self.at("flow"):
                flows.extend(self.flow())
            elif self.at("assert"):
                assertions.append(self.assertion())
            else:
                raise self.fail("expected declaration", ("function", "flow", "assert"))
        return start, Model(name, tuple(values), tuple(functions), tuple(flows), tuple(assertions))

    def port_list(self):
        items = [self.port_item()]
        while self.at(","):
            self.advance()
            items.append(self.port_item())
        return items

    def port_item(self):
        name = self.name("port name").text
        free = False
        if self.at("free"):
            self.advance()
            free = True
        return name, free

    def function(self) -> FunctionDecl:
        start = self.expect("function")
        name = self.name("function name").text
        self.expect("{")
        inputs, outputs, free, transfers = [], [], set(), {}
        while not self.at("}"):
            if self.at("in"):
                self.advance()
                for p, is_free in self.port_list():
                    inputs.append(p)
                    if is_free:
                        free.add(p)
            elif self.at("out"):
                kw = self.advance()
                for p, is_free in self.port_list():
                    if is_free:
                        raise ParseError("only input ports can be free", kw.span)
                    outputs.append(p)
            elif self.at("transfer"):
                kw = self.advance()
                port = self.name("port name").text
                self.expect(".")
                attr = self.attr()
                self.expect("=")
                expr = self.chain_or_block()
                old = transfers.get(port)
                if attr == STATUS:
                    if old is not None and old[0] is not None:
                        raise ParseError(f"duplicate status transfer for {port}", kw.span)
                    transfers[port] = (expr, old[1] if old else None)
                else:
                    if old is not None and old[1] is not None:
                        raise ParseError(f"duplicate value transfer for {port}", kw.span)
                    transfers[port] = (old[0] if old else None, expr)
            else:
                raise self.fail("expected function item", ("in", "out", "transfer", "}"))
        self.expect("}")
        final = {}
        for port, (s, v) in transfers.items():
            if s is None:
                raise ParseError(f"value transfer for {port} without a status transfer",
                                 v.span or start.span)
            final[port] = Transfer(s, v)
        return FunctionDecl(name, tuple(inputs), tuple(outputs), final, frozenset(free),
                            span=start.span)

    def flow(self) -> list[Flow]:
        self.expect("flow")
        src = self.name("port name").text
        self.expect("->")
        targets = [self.name("port name")]
        while self.at(","):
            self.advance()
            targets.append(self.name("port name"))
        return [Flow(src, t.text, span=t.span) for t in targets]

    # -- transfer expressions --

    def chain_or_block(self) -> Chain:
        if self.at("{"):
            self.advance()
            c = self.chain()
            self.expect("}")
            return c
        return self.chain()

    def chain(self) -> Chain:
        start = self.tok.span
        branches = []
        while True:
            guard, result, span = self.branch()
            if guard is None:
                return Chain(tuple(branches), result, span=start)
            branches.append((guard, result))
            if not self.at("else"):
                raise ParseError("transfer chain not total: missing final 'else'", span,
                                 ("else",))
            self.advance()

    def branch(self):
        span = self.tok.span
        if not (self.at("not") or self.at("(")):
            save = self.i
            term = self.term()
            if not (self.at("=") or self.at("!=") or self.at("and") or self.at("or")
                    or self.at("implies")):
                return None, term, span
            self.i = save
        guard = self.guard()
        self.expect("implies")
        return guard, self.term(), span

    def guard(self):
        span = self.tok.span
        args = [self.conj()]
        while self.at("or"):
            self.advance()
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args), span=span)

    def conj(self):
        span = self.tok.span
        args = [self.unary()]
        while self.at("and"):
            self.advance()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args), span=span)

    def unary(self):
        span = self.tok.span
        if self.at("not"):
            self.advance()
            return Not(self.unary(), span=span)
        if self.at("("):
            self.advance()
            g = self.guard()
            self.expect(")")
            return g
        left = self.term()
        if not (self.at("=") or self.at("!=")):
            raise self.fail("expected comparison", ("=", "!="))
        op = self.advance().text
        return Compare(left, op, self.term(), span=span)

    def term(self):
        t = self.tok
        if t.kind != "ident":
            raise self.fail("expected term", ("port.status", "port.value", "literal"))
        if self.peek().text == "." and self.peek().kind == "sym":
            self.name()
            self.advance()
            return Ref(t.text, self.attr(), span=t.span)
        self.advance()
        if t.text in _STATUS_NAMES:
            return StatusLit(_STATUS_NAMES[t.text], span=t.span)
        if t.text in RESERVED:
            self.i -= 1
            raise self.fail("expected term", ("port.status", "port.value", "literal"))
        return ValueLit(t.text, span=t.span)

    # -- assertions --

    def literal(self):
        t = self.name_or_status()
        return _STATUS_NAMES.get(t.text, t.text)

    def name_or_status(self) -> Token:
        if self.tok.kind == "ident" and self.tok.text in _STATUS_NAMES:
            return self.advance()
        return self.name("literal")

    def equality(self) -> Equality:
        t = self.name()
        self.expect(".")
        attr = self.attr()
        self.expect("=")
        return Equality(t.text, attr, self.literal(), span=t.span)

    def constraint(self) -> Constraint:
        eqs, others, exempt = [], False, []
        while True:
            if self.at("others") or self.at("all"):
                self.advance()
                self.expect("OK")
                others = True
                if self.at("except"):
                    self.advance()
                    exempt.append(self.name("function name").text)
                    while self.at(","):
                        self.advance()
                        exempt.append(self.name("function name").text)
            else:
                eqs.append(self.equality())
            if not self.at("and"):
                break
            self.advance()
        return Constraint(tuple(eqs), others, tuple(exempt))

    def conclusion(self) -> tuple[Equality, ...]:
        eqs = [self.equality()]
        while self.at("and"):
            self.advance()
            eqs.append(self.equality())
        return tuple(eqs)

    def assertion(self) -> Assertion:
        start = self.expect("assert")
        name = self.name("assertion name").text
        self.expect("{")
        if self.at("structure"):
            self.advance()
            self.expect("}")
            return Assertion(name, structural=True, span=start.span)
        hyp = Constraint()
        if self.at("when"):
            self.advance()
            hyp = self.constraint()
        self.expect("expect")
        concl = self.conclusion()
        self.expect("}")
        return Assertion(name, hyp, concl, span=start.span)


def _fail_on_violations(model: Model, violations):
    if violations:
        raise ModelError(violations)
    return model


def parse_model(text: str, file: str = "<input>") -> Model:
    """Parse and validate a complete model file."""
    p = _Parser(text, file)
    _, model = p.model()
    return _fail_on_violations(model, validate_structure(model))


def parse_model_unchecked(text: str, file: str = "<input>") -> Model:
    """Parse without structural validation (syntax errors still raise)."""
    return _Parser(text, file).model()[1]


def _bind(model: Model | None, assertion: Assertion):
    if model is None:
        return assertion
    problems = assertion_violations(model, assertion)
    if problems:
        v = problems[0]
        raise ParseError(v.message, v.span or assertion.span or SourceSpan("<input>", 1, 1))
    return assertion


def parse_assertion(text: str, model: Model | None = None, file: str = "<input>") -> Assertion:
    """Parse one ``assert`` block; with ``model``, also check every name is declared."""
    p = _Parser(text, file)
    a = p.assertion()
    p.done()
    return _bind(model, a)


def parse_constraint(text: str, model: Model | None = None, file: str = "<input>") -> Constraint:
    """Parse a scenario constraint such as ``GPS.status = Err and others OK``."""
    p = _Parser(text, file)
    c = p.constraint()
    p.done()
    if model is not None:
        _bind(model, Assertion("where", c, structural=True))
    return c


def parse_condition(text: str, model: Model | None = None, file: str = "<input>"):
    """Parse a conjunction of port equalities (the ``expect`` clause grammar)."""
    p = _Parser(text, file)
    eqs = p.conclusion()
    p.done()
    if model is not None:
        _bind(model, Assertion("condition", Constraint(), eqs))
    return eqs


# -- serialization --------------------------------------------------------

def _term_text(t) -> str:
    return str(t)


def _guard_text(g, nested: bool = False) -> str:
    if isinstance(g, Compare):
        return f"{_term_text(g.left)} {g.op} {_term_text(g.right)}"
    if isinstance(g, Not):
        return "not " + _guard_text(g.arg, nested=True)
    joiner = " and " if isinstance(g, And) else " or "
    body = joiner.join(_guard_text(a, nested=True) for a in g.args)
    return f"({body})" if nested else body


def _chain_lines(c: Chain, indent: str) -> list[str]:
    if not c.branches:
        return [_term_text(c.default)]
    lines = ["{"]
    for k, (g, r) in enumerate(c.branches):
        prefix = "" if k == 0 else "else "
        lines.append(f"{indent}  {prefix}{_guard_text(g)} implies {_term_text(r)}")
    lines.append(f"{indent}  else {_term_text(c.default)}")
    lines.append(f"{indent}}}")
    return lines


def _constraint_text(c: Constraint) -> str:
    parts = [str(e) for e in c.equalities]
    if c.others_ok:
        tail = "others OK"
        if c.exempt:
            tail += " except " + ", ".join(c.exempt)
        parts.append(tail)
    return " and ".join(parts)


def serialize_assertion(a: Assertion) -> str:
    if a.structural:
        return f"assert {a.name} {{ structure }}\n"
    lines = [f"assert {a.name} {{"]
    if not a.hypothesis.is_empty:
        lines.append(f"  when {_constraint_text(a.hypothesis)}")
    lines.append("  expect " + " and ".join(str(e) for e in a.conclusion))
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize(model: Model) -> str:
    """Canonical text for ``model``; stable byte-for-byte across calls."""
    out = [f"model {model.name}", f"values {{ {' '.join(model.values)} }}", ""]
    for f in model.functions:
        out.append(f"function {f.name} {{")
        if f.inputs:
            items = [p + (" free" if p in f.free else "") for p in f.inputs]
            out.append("  in " + ", ".join(items))
        if f.outputs:
            out.append("  out " + ", ".join(f.outputs))
        for p in f.outputs:
            tr = f.transfers.get(p)
            if tr is None:
                continue
            for attr, expr in ((STATUS, tr.status), (VALUE, tr.value)):
                if expr is None:
                    continue
                lines = _chain_lines(expr, "  ")
                out.append(f"  transfer {p}.{attr} = {lines[0]}")
                out.extend(lines[1:])
        out.append("}")
        out.append("")
    for fl in model.flows:
        out.append(f"flow {fl.source} -> {fl.target}")
    if model.flows:
        out.append("")
    for a in model.assertions:
        out.append(serialize_assertion(a))
    return "\n".join(out).rstrip("\n") + "\n"
