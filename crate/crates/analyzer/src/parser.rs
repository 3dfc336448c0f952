//! Recursive-descent parser for the supported Python subset.
//!
//! Covers statements, function and class definitions (with decorators and
//! annotations), the full expression precedence ladder, comprehensions,
//! lambdas, f-strings and `async`/`await`. `match` statements are not
//! supported and are reported as syntax errors.

use crate::ast::*;
use crate::error::SyntaxError;
use crate::lexer::{tokenize, Token, TokenKind, TokenStream};

const KEYWORDS: [&str; 35] = [
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
    "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// A parsed module together with its token stream.
#[derive(Debug, Clone)]
pub struct SyntaxTree {
    pub module: Module,
    pub tokens: TokenStream,
}

impl SyntaxTree {
    pub fn node_count(&self) -> usize {
        count_nodes(&self.module)
    }
}

pub fn parse(source: &str) -> Result<SyntaxTree, SyntaxError> {
    let tokens = tokenize(source)?;
    let module = Parser::new(&tokens.tokens, 0).module()?;
    Ok(SyntaxTree { module, tokens })
}

/// Parses a standalone expression (used for f-string replacement fields).
fn parse_expression(text: &str, line: u32) -> Result<Expr, SyntaxError> {
    let wrapped = format!("({text})");
    let ts = tokenize(&wrapped).map_err(|e| SyntaxError {
        line,
        col: e.col,
        message: format!("f-string: {}", e.message),
    })?;
    let mut p = Parser::new(&ts.tokens, line.saturating_sub(1));
    let e = p.star_expressions()?;
    if p.peek().kind != TokenKind::Newline {
        return Err(p.error("f-string: expecting '}'"));
    }
    Ok(e)
}

type PResult<T> = Result<T, SyntaxError>;

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    line_offset: u32,
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token], line_offset: u32) -> Self {
        Parser { toks, pos: 0, line_offset }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)]
    }

    fn line(&self) -> u32 {
        self.peek().line + self.line_offset
    }

    fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_op(&self, op: &str) -> bool {
        self.peek().is_op(op)
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().is_name(kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let t = self.peek();
        SyntaxError { line: t.line + self.line_offset, col: t.col, message: msg.into() }
    }

    fn invalid(&self) -> SyntaxError {
        let t = self.peek();
        match t.kind {
            TokenKind::EndMarker => self.error("unexpected EOF while parsing"),
            TokenKind::Indent => self.error("unexpected indent"),
            TokenKind::Newline => self.error("invalid syntax"),
            _ => self.error(format!("invalid syntax near '{}'", t.text)),
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{op}'")))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{kw}'")))
        }
    }

    fn identifier(&mut self) -> PResult<String> {
        let t = self.peek();
        if t.kind == TokenKind::Name && !is_keyword(&t.text) {
            Ok(self.advance().text)
        } else {
            Err(self.error("expected identifier"))
        }
    }

    // ---- statements ------------------------------------------------------

    fn module(&mut self) -> PResult<Module> {
        let mut body = Vec::new();
        while self.peek().kind != TokenKind::EndMarker {
            if self.peek().kind == TokenKind::Newline {
                self.advance();
                continue;
            }
            body.extend(self.statement()?);
        }
        Ok(Module { body })
    }

    fn statement(&mut self) -> PResult<Vec<Stmt>> {
        let t = self.peek();
        if t.kind == TokenKind::Indent {
            return Err(self.error("unexpected indent"));
        }
        if t.kind == TokenKind::Name {
            match t.text.as_str() {
                "def" | "class" | "if" | "while" | "for" | "try" | "with" => {
                    return Ok(vec![self.compound(Vec::new())?])
                }
                "async" if matches!(self.peek_at(1).text.as_str(), "def" | "for" | "with") => {
                    return Ok(vec![self.compound(Vec::new())?])
                }
                _ => {}
            }
        }
        if self.at_op("@") {
            let mut decorators = Vec::new();
            while self.eat_op("@") {
                decorators.push(self.namedexpr_test()?);
                self.expect_newline()?;
            }
            if !(self.at_kw("def") || self.at_kw("class") || (self.at_kw("async") && self.peek_at(1).is_name("def"))) {
                return Err(self.error("expected function or class definition after decorator"));
            }
            return Ok(vec![self.compound(decorators)?]);
        }
        self.simple_stmts()
    }

    fn expect_newline(&mut self) -> PResult<()> {
        match self.peek().kind {
            TokenKind::Newline => {
                self.advance();
                Ok(())
            }
            TokenKind::EndMarker => Ok(()),
            _ => Err(self.invalid()),
        }
    }

    fn simple_stmts(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = vec![self.simple()?];
        while self.eat_op(";") {
            if matches!(self.peek().kind, TokenKind::Newline | TokenKind::EndMarker) {
                break;
            }
            out.push(self.simple()?);
        }
        self.expect_newline()?;
        Ok(out)
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_op(":")?;
        if self.peek().kind == TokenKind::Newline {
            self.advance();
            if self.peek().kind != TokenKind::Indent {
                return Err(self.error("expected an indented block"));
            }
            self.advance();
            let mut body = Vec::new();
            while !matches!(self.peek().kind, TokenKind::Dedent | TokenKind::EndMarker) {
                if self.peek().kind == TokenKind::Newline {
                    self.advance();
                    continue;
                }
                body.extend(self.statement()?);
            }
            if self.peek().kind == TokenKind::Dedent {
                self.advance();
            }
            Ok(body)
        } else {
            self.simple_stmts()
        }
    }

    fn compound(&mut self, decorators: Vec<Expr>) -> PResult<Stmt> {
        let line = self.line();
        let is_async = self.eat_kw("async");
        let kw = self.advance();
        let kind = match kw.text.as_str() {
            "def" => self.funcdef(decorators, is_async)?,
            "class" => self.classdef(decorators)?,
            "if" => return self.if_stmt(line, false),
            "while" => {
                let test = self.namedexpr_test()?;
                let body = self.block()?;
                let orelse = self.else_block()?;
                StmtKind::While { test, body, orelse }
            }
            "for" => {
                let target = self.target_list()?;
                self.expect_kw("in")?;
                let iter = self.star_expressions()?;
                let body = self.block()?;
                let orelse = self.else_block()?;
                StmtKind::For { target, iter, body, orelse, is_async }
            }
            "try" => self.try_stmt()?,
            "with" => {
                let mut items = Vec::new();
                loop {
                    let context_expr = self.test()?;
                    let optional_vars = if self.eat_kw("as") { Some(self.star_target()?) } else { None };
                    items.push(WithItem { context_expr, optional_vars });
                    if !self.eat_op(",") {
                        break;
                    }
                }
                let body = self.block()?;
                StmtKind::With { items, body, is_async }
            }
            _ => return Err(self.invalid()),
        };
        Ok(Stmt { kind, line })
    }

    fn else_block(&mut self) -> PResult<Vec<Stmt>> {
        if self.eat_kw("else") {
            self.block()
        } else {
            Ok(Vec::new())
        }
    }

    fn if_stmt(&mut self, line: u32, is_elif: bool) -> PResult<Stmt> {
        let test = self.namedexpr_test()?;
        let body = self.block()?;
        let orelse = if self.at_kw("elif") {
            let l = self.line();
            self.advance();
            vec![self.if_stmt(l, true)?]
        } else {
            self.else_block()?
        };
        Ok(Stmt { kind: StmtKind::If { test, body, orelse, is_elif }, line })
    }

    fn try_stmt(&mut self) -> PResult<StmtKind> {
        let body = self.block()?;
        let mut handlers = Vec::new();
        while self.at_kw("except") {
            let line = self.line();
            self.advance();
            let (type_, name) = if self.at_op(":") {
                (None, None)
            } else {
                let t = self.test()?;
                let t = if self.at_op(",") {
                    let mut elts = vec![t];
                    while self.eat_op(",") {
                        if self.at_kw("as") || self.at_op(":") {
                            break;
                        }
                        elts.push(self.test()?);
                    }
                    Expr::new(ExprKind::Tuple(elts), line)
                } else {
                    t
                };
                let name = if self.eat_kw("as") { Some(self.identifier()?) } else { None };
                (Some(t), name)
            };
            let hbody = self.block()?;
            handlers.push(ExceptHandler { type_, name, body: hbody, line });
        }
        let orelse = self.else_block()?;
        let finalbody = if self.eat_kw("finally") { self.block()? } else { Vec::new() };
        if handlers.is_empty() && finalbody.is_empty() {
            return Err(self.error("expected 'except' or 'finally' block"));
        }
        Ok(StmtKind::Try { body, handlers, orelse, finalbody })
    }

    fn funcdef(&mut self, decorators: Vec<Expr>, is_async: bool) -> PResult<StmtKind> {
        let name = self.identifier()?;
        self.expect_op("(")?;
        let args = self.parameters(")", true)?;
        self.expect_op(")")?;
        let returns = if self.eat_op("->") { Some(self.test()?) } else { None };
        let body = self.block()?;
        Ok(StmtKind::FunctionDef(Box::new(FunctionDef { name, args, body, decorators, returns, is_async })))
    }

    /// Parameter list up to (not including) `close`.
    fn parameters(&mut self, close: &str, annotations: bool) -> PResult<Arguments> {
        let mut a = Arguments::default();
        let mut seen_star = false;
        let mut pos_defaults: Vec<Expr> = Vec::new();
        while !self.at_op(close) {
            let line = self.line();
            if self.eat_op("/") {
                a.posonly.append(&mut a.args);
            } else if self.eat_op("**") {
                let name = self.identifier()?;
                let annotation = self.param_annotation(annotations)?;
                a.kwarg = Some(Arg { name, annotation, line });
            } else if self.eat_op("*") {
                seen_star = true;
                if !(self.at_op(",") || self.at_op(close)) {
                    let name = self.identifier()?;
                    let annotation = self.param_annotation(annotations)?;
                    a.vararg = Some(Arg { name, annotation, line });
                }
            } else {
                let name = self.identifier()?;
                let annotation = self.param_annotation(annotations)?;
                let default = if self.eat_op("=") { Some(self.test()?) } else { None };
                let arg = Arg { name, annotation, line };
                if seen_star {
                    a.kwonly.push(arg);
                    a.kw_defaults.push(default);
                } else {
                    a.args.push(arg);
                    match default {
                        Some(d) => pos_defaults.push(d),
                        None if !pos_defaults.is_empty() => {
                            return Err(self.error("non-default argument follows default argument"))
                        }
                        None => {}
                    }
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        a.defaults = pos_defaults;
        Ok(a)
    }

    fn param_annotation(&mut self, allowed: bool) -> PResult<Option<Expr>> {
        if allowed && self.eat_op(":") {
            Ok(Some(self.test()?))
        } else {
            Ok(None)
        }
    }

    fn classdef(&mut self, decorators: Vec<Expr>) -> PResult<StmtKind> {
        let name = self.identifier()?;
        let (mut bases, mut keywords) = (Vec::new(), Vec::new());
        if self.eat_op("(") {
            let (a, k) = self.arglist()?;
            bases = a;
            keywords = k;
            self.expect_op(")")?;
        }
        let body = self.block()?;
        Ok(StmtKind::ClassDef(Box::new(ClassDef { name, bases, keywords, body, decorators })))
    }

    fn simple(&mut self) -> PResult<Stmt> {
        let line = self.line();
        let t = self.peek().clone();
        if t.kind == TokenKind::Name {
            let kind = match t.text.as_str() {
                "pass" => {
                    self.advance();
                    StmtKind::Pass
                }
                "break" => {
                    self.advance();
                    StmtKind::Break
                }
                "continue" => {
                    self.advance();
                    StmtKind::Continue
                }
                "return" => {
                    self.advance();
                    let v = if self.at_end_of_simple() { None } else { Some(self.star_expressions()?) };
                    StmtKind::Return(v)
                }
                "raise" => {
                    self.advance();
                    let (mut exc, mut cause) = (None, None);
                    if !self.at_end_of_simple() {
                        exc = Some(self.test()?);
                        if self.eat_kw("from") {
                            cause = Some(self.test()?);
                        }
                    }
                    StmtKind::Raise { exc, cause }
                }
                "global" | "nonlocal" => {
                    self.advance();
                    let mut names = vec![self.identifier()?];
                    while self.eat_op(",") {
                        names.push(self.identifier()?);
                    }
                    if t.text == "global" {
                        StmtKind::Global(names)
                    } else {
                        StmtKind::Nonlocal(names)
                    }
                }
                "del" => {
                    self.advance();
                    let mut targets = vec![self.bitor()?];
                    while self.eat_op(",") {
                        if self.at_end_of_simple() {
                            break;
                        }
                        targets.push(self.bitor()?);
                    }
                    StmtKind::Delete(targets)
                }
                "assert" => {
                    self.advance();
                    let test = self.test()?;
                    let msg = if self.eat_op(",") { Some(self.test()?) } else { None };
                    StmtKind::Assert { test, msg }
                }
                "import" => {
                    self.advance();
                    let mut names = Vec::new();
                    loop {
                        let name = self.dotted_name()?;
                        let asname = if self.eat_kw("as") { Some(self.identifier()?) } else { None };
                        names.push(Alias { name, asname });
                        if !self.eat_op(",") {
                            break;
                        }
                    }
                    StmtKind::Import(names)
                }
                "from" => {
                    self.advance();
                    self.import_from()?
                }
                _ => self.expr_stmt()?,
            };
            return Ok(Stmt { kind, line });
        }
        Ok(Stmt { kind: self.expr_stmt()?, line })
    }

    fn at_end_of_simple(&self) -> bool {
        matches!(self.peek().kind, TokenKind::Newline | TokenKind::EndMarker) || self.at_op(";")
    }

    fn dotted_name(&mut self) -> PResult<String> {
        let mut name = self.identifier()?;
        while self.eat_op(".") {
            name.push('.');
            name.push_str(&self.identifier()?);
        }
        Ok(name)
    }

    fn import_from(&mut self) -> PResult<StmtKind> {
        let mut level = 0;
        loop {
            if self.eat_op(".") {
                level += 1;
            } else if self.eat_op("...") {
                level += 3;
            } else {
                break;
            }
        }
        let module = if self.at_kw("import") { None } else { Some(self.dotted_name()?) };
        if module.is_none() && level == 0 {
            return Err(self.invalid());
        }
        self.expect_kw("import")?;
        let mut names = Vec::new();
        if self.eat_op("*") {
            names.push(Alias { name: "*".into(), asname: None });
        } else {
            let paren = self.eat_op("(");
            loop {
                if paren && self.at_op(")") {
                    break;
                }
                let name = self.identifier()?;
                let asname = if self.eat_kw("as") { Some(self.identifier()?) } else { None };
                names.push(Alias { name, asname });
                if !self.eat_op(",") {
                    break;
                }
            }
            if paren {
                self.expect_op(")")?;
            }
            if names.is_empty() {
                return Err(self.invalid());
            }
        }
        Ok(StmtKind::ImportFrom { module, names, level })
    }

    fn expr_stmt(&mut self) -> PResult<StmtKind> {
        let first = self.star_expressions_or_yield()?;
        if self.at_op(":") {
            self.advance();
            let annotation = self.test()?;
            let value = if self.eat_op("=") { Some(self.star_expressions_or_yield()?) } else { None };
            return Ok(StmtKind::AnnAssign { target: first, annotation, value });
        }
        let t = self.peek();
        if t.kind == TokenKind::Op
            && t.text.len() >= 2
            && t.text.ends_with('=')
            && !matches!(t.text.as_str(), "==" | "<=" | ">=" | "!=")
        {
            let sym = t.text[..t.text.len() - 1].to_string();
            if let Some(op) = BinOpKind::from_symbol(&sym) {
                self.advance();
                let value = self.star_expressions_or_yield()?;
                return Ok(StmtKind::AugAssign { target: first, op, value });
            }
        }
        if self.at_op("=") {
            let mut targets = vec![first];
            let mut value;
            loop {
                self.advance();
                value = self.star_expressions_or_yield()?;
                if self.at_op("=") {
                    targets.push(value);
                } else {
                    break;
                }
            }
            return Ok(StmtKind::Assign { targets, value });
        }
        Ok(StmtKind::Expr(first))
    }

    // ---- expressions -----------------------------------------------------

    fn star_expressions_or_yield(&mut self) -> PResult<Expr> {
        if self.at_kw("yield") {
            self.yield_expr()
        } else {
            self.star_expressions()
        }
    }

    fn yield_expr(&mut self) -> PResult<Expr> {
        let line = self.line();
        self.expect_kw("yield")?;
        if self.eat_kw("from") {
            let v = self.test()?;
            return Ok(Expr::new(ExprKind::YieldFrom(Box::new(v)), line));
        }
        if self.at_end_of_simple() || self.at_op(")") || self.at_op("=") {
            return Ok(Expr::new(ExprKind::Yield(None), line));
        }
        let v = self.star_expressions()?;
        Ok(Expr::new(ExprKind::Yield(Some(Box::new(v))), line))
    }

    /// Comma-separated expressions (with optional `*` items); a trailing or
    /// separating comma makes a tuple.
    fn star_expressions(&mut self) -> PResult<Expr> {
        let line = self.line();
        let first = self.star_expression()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.expression_cannot_start() {
                break;
            }
            elts.push(self.star_expression()?);
        }
        Ok(Expr::new(ExprKind::Tuple(elts), line))
    }

    fn expression_cannot_start(&self) -> bool {
        let t = self.peek();
        match t.kind {
            TokenKind::Newline | TokenKind::EndMarker | TokenKind::Indent | TokenKind::Dedent => true,
            TokenKind::Op => matches!(
                t.text.as_str(),
                ")" | "]"
                    | "}"
                    | "="
                    | ":"
                    | ";"
                    | "+="
                    | "-="
                    | "*="
                    | "/="
                    | "//="
                    | "%="
                    | "**="
                    | ">>="
                    | "<<="
                    | "&="
                    | "|="
                    | "^="
                    | "@="
            ),
            TokenKind::Name => matches!(t.text.as_str(), "in" | "for" | "if" | "else" | "as" | "from"),
            _ => false,
        }
    }

    fn star_expression(&mut self) -> PResult<Expr> {
        if self.at_op("*") {
            let line = self.line();
            self.advance();
            let v = self.bitor()?;
            return Ok(Expr::new(ExprKind::Starred(Box::new(v)), line));
        }
        self.test()
    }

    fn star_namedexpr(&mut self) -> PResult<Expr> {
        if self.at_op("*") {
            let line = self.line();
            self.advance();
            let v = self.bitor()?;
            return Ok(Expr::new(ExprKind::Starred(Box::new(v)), line));
        }
        self.namedexpr_test()
    }

    fn namedexpr_test(&mut self) -> PResult<Expr> {
        if self.peek().kind == TokenKind::Name && self.peek_at(1).is_op(":=") {
            let line = self.line();
            let name = self.identifier()?;
            self.advance();
            let value = self.test()?;
            return Ok(Expr::new(
                ExprKind::NamedExpr { target: Box::new(Expr::new(ExprKind::Name(name), line)), value: Box::new(value) },
                line,
            ));
        }
        self.test()
    }

    fn test(&mut self) -> PResult<Expr> {
        if self.at_kw("lambda") {
            return self.lambda();
        }
        let line = self.line();
        let body = self.or_test()?;
        if self.at_kw("if") {
            // A conditional expression needs an `else`; `x if y` alone belongs
            // to an enclosing comprehension clause and is handled there.
            self.advance();
            let test = self.or_test()?;
            self.expect_kw("else")?;
            let orelse = self.test()?;
            return Ok(Expr::new(
                ExprKind::IfExp { test: Box::new(test), body: Box::new(body), orelse: Box::new(orelse) },
                line,
            ));
        }
        Ok(body)
    }

    fn test_no_cond(&mut self) -> PResult<Expr> {
        if self.at_kw("lambda") {
            return self.lambda();
        }
        self.or_test()
    }

    fn lambda(&mut self) -> PResult<Expr> {
        let line = self.line();
        self.expect_kw("lambda")?;
        let args = self.parameters(":", false)?;
        self.expect_op(":")?;
        let body = self.test()?;
        Ok(Expr::new(ExprKind::Lambda { args: Box::new(args), body: Box::new(body) }, line))
    }

    fn or_test(&mut self) -> PResult<Expr> {
        let line = self.line();
        let first = self.and_test()?;
        if !self.at_kw("or") {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_kw("or") {
            values.push(self.and_test()?);
        }
        Ok(Expr::new(ExprKind::BoolOp { op: BoolOpKind::Or, values }, line))
    }

    fn and_test(&mut self) -> PResult<Expr> {
        let line = self.line();
        let first = self.not_test()?;
        if !self.at_kw("and") {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_kw("and") {
            values.push(self.not_test()?);
        }
        Ok(Expr::new(ExprKind::BoolOp { op: BoolOpKind::And, values }, line))
    }

    fn not_test(&mut self) -> PResult<Expr> {
        if self.at_kw("not") {
            let line = self.line();
            self.advance();
            let operand = self.not_test()?;
            return Ok(Expr::new(ExprKind::UnaryOp { op: UnaryOpKind::Not, operand: Box::new(operand) }, line));
        }
        self.comparison()
    }

    fn comp_op(&mut self) -> Option<CmpOpKind> {
        let t = self.peek();
        let op = match (t.kind, t.text.as_str()) {
            (TokenKind::Op, "<") => CmpOpKind::Lt,
            (TokenKind::Op, ">") => CmpOpKind::Gt,
            (TokenKind::Op, "==") => CmpOpKind::Eq,
            (TokenKind::Op, "!=") => CmpOpKind::NotEq,
            (TokenKind::Op, "<=") => CmpOpKind::LtE,
            (TokenKind::Op, ">=") => CmpOpKind::GtE,
            (TokenKind::Name, "in") => CmpOpKind::In,
            (TokenKind::Name, "not") if self.peek_at(1).is_name("in") => {
                self.advance();
                CmpOpKind::NotIn
            }
            (TokenKind::Name, "is") => {
                if self.peek_at(1).is_name("not") {
                    self.advance();
                    CmpOpKind::IsNot
                } else {
                    CmpOpKind::Is
                }
            }
            _ => return None,
        };
        self.advance();
        Some(op)
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let line = self.line();
        let left = self.bitor()?;
        let mut ops = Vec::new();
        let mut comparators = Vec::new();
        while let Some(op) = self.comp_op() {
            ops.push(op);
            comparators.push(self.bitor()?);
        }
        if ops.is_empty() {
            return Ok(left);
        }
        Ok(Expr::new(ExprKind::Compare { left: Box::new(left), ops, comparators }, line))
    }

    fn binary_level(&mut self, ops: &[&str], next: fn(&mut Self) -> PResult<Expr>) -> PResult<Expr> {
        let line = self.line();
        let mut left = next(self)?;
        loop {
            let t = self.peek();
            if t.kind == TokenKind::Op && ops.contains(&t.text.as_str()) {
                let op = BinOpKind::from_symbol(&t.text).expect("binary operator");
                self.advance();
                let right = next(self)?;
                left = Expr::new(ExprKind::BinOp { left: Box::new(left), op, right: Box::new(right) }, line);
            } else {
                return Ok(left);
            }
        }
    }

    fn bitor(&mut self) -> PResult<Expr> {
        self.binary_level(&["|"], Self::bitxor)
    }

    fn bitxor(&mut self) -> PResult<Expr> {
        self.binary_level(&["^"], Self::bitand)
    }

    fn bitand(&mut self) -> PResult<Expr> {
        self.binary_level(&["&"], Self::shift)
    }

    fn shift(&mut self) -> PResult<Expr> {
        self.binary_level(&["<<", ">>"], Self::arith)
    }

    fn arith(&mut self) -> PResult<Expr> {
        self.binary_level(&["+", "-"], Self::term)
    }

    fn term(&mut self) -> PResult<Expr> {
        self.binary_level(&["*", "/", "//", "%", "@"], Self::factor)
    }

    fn factor(&mut self) -> PResult<Expr> {
        let t = self.peek();
        if t.kind == TokenKind::Op {
            let op = match t.text.as_str() {
                "-" => Some(UnaryOpKind::USub),
                "+" => Some(UnaryOpKind::UAdd),
                "~" => Some(UnaryOpKind::Invert),
                _ => None,
            };
            if let Some(op) = op {
                let line = self.line();
                self.advance();
                let operand = self.factor()?;
                return Ok(Expr::new(ExprKind::UnaryOp { op, operand: Box::new(operand) }, line));
            }
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let line = self.line();
        let base = self.await_primary()?;
        if self.eat_op("**") {
            let exp = self.factor()?;
            return Ok(Expr::new(
                ExprKind::BinOp { left: Box::new(base), op: BinOpKind::Pow, right: Box::new(exp) },
                line,
            ));
        }
        Ok(base)
    }

    fn await_primary(&mut self) -> PResult<Expr> {
        if self.at_kw("await") {
            let line = self.line();
            self.advance();
            let v = self.primary()?;
            return Ok(Expr::new(ExprKind::Await(Box::new(v)), line));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        loop {
            let line = e.line;
            if self.eat_op(".") {
                let attr = self.identifier()?;
                e = Expr::new(ExprKind::Attribute { value: Box::new(e), attr }, line);
            } else if self.eat_op("(") {
                let (args, keywords) = self.call_args()?;
                self.expect_op(")")?;
                e = Expr::new(ExprKind::Call { func: Box::new(e), args, keywords }, line);
            } else if self.eat_op("[") {
                let slice = self.subscript_list()?;
                self.expect_op("]")?;
                e = Expr::new(ExprKind::Subscript { value: Box::new(e), slice: Box::new(slice) }, line);
            } else {
                return Ok(e);
            }
        }
    }

    fn call_args(&mut self) -> PResult<(Vec<Expr>, Vec<Keyword>)> {
        let (args, keywords) = self.arglist()?;
        Ok((args, keywords))
    }

    /// Call-style argument list; a sole unparenthesized generator is allowed.
    fn arglist(&mut self) -> PResult<(Vec<Expr>, Vec<Keyword>)> {
        let mut args = Vec::new();
        let mut keywords = Vec::new();
        while !self.at_op(")") {
            let line = self.line();
            if self.eat_op("**") {
                let value = self.test()?;
                keywords.push(Keyword { arg: None, value });
            } else if self.eat_op("*") {
                let v = self.test()?;
                args.push(Expr::new(ExprKind::Starred(Box::new(v)), line));
            } else if self.peek().kind == TokenKind::Name
                && self.peek_at(1).is_op("=")
                && !is_keyword(&self.peek().text)
            {
                let arg = self.identifier()?;
                self.advance();
                let value = self.test()?;
                keywords.push(Keyword { arg: Some(arg), value });
            } else {
                let e = self.namedexpr_test()?;
                if self.at_kw("for") || (self.at_kw("async") && self.peek_at(1).is_name("for")) {
                    let generators = self.comp_for()?;
                    args.push(Expr::new(ExprKind::GeneratorExp { elt: Box::new(e), generators }, line));
                } else {
                    args.push(e);
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        Ok((args, keywords))
    }

    fn subscript_list(&mut self) -> PResult<Expr> {
        let line = self.line();
        let first = self.subscript_item()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.at_op("]") {
                break;
            }
            elts.push(self.subscript_item()?);
        }
        Ok(Expr::new(ExprKind::Tuple(elts), line))
    }

    fn subscript_item(&mut self) -> PResult<Expr> {
        let line = self.line();
        let lower = if self.at_op(":") { None } else { Some(self.star_namedexpr()?) };
        if !self.at_op(":") {
            return lower.ok_or_else(|| self.invalid());
        }
        self.advance();
        let bound = |p: &mut Self| -> PResult<Option<Box<Expr>>> {
            if p.at_op(":") || p.at_op("]") || p.at_op(",") {
                Ok(None)
            } else {
                Ok(Some(Box::new(p.test()?)))
            }
        };
        let upper = bound(self)?;
        let step = if self.eat_op(":") { bound(self)? } else { None };
        Ok(Expr::new(ExprKind::Slice { lower: lower.map(Box::new), upper, step }, line))
    }

    fn comp_for(&mut self) -> PResult<Vec<Comprehension>> {
        let mut gens = Vec::new();
        loop {
            let is_async = if self.at_kw("async") && self.peek_at(1).is_name("for") {
                self.advance();
                true
            } else {
                false
            };
            if !self.eat_kw("for") {
                break;
            }
            let target = self.target_list()?;
            self.expect_kw("in")?;
            let iter = self.test_no_cond()?;
            let mut ifs = Vec::new();
            while self.eat_kw("if") {
                ifs.push(self.test_no_cond()?);
            }
            gens.push(Comprehension { target, iter, ifs, is_async });
        }
        Ok(gens)
    }

    fn star_target(&mut self) -> PResult<Expr> {
        if self.at_op("*") {
            let line = self.line();
            self.advance();
            let v = self.bitor()?;
            return Ok(Expr::new(ExprKind::Starred(Box::new(v)), line));
        }
        self.bitor()
    }

    fn target_list(&mut self) -> PResult<Expr> {
        let line = self.line();
        let first = self.star_target()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.at_kw("in") || self.at_op("=") || self.at_op(":") {
                break;
            }
            elts.push(self.star_target()?);
        }
        Ok(Expr::new(ExprKind::Tuple(elts), line))
    }

    fn atom(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        let line = t.line + self.line_offset;
        match t.kind {
            TokenKind::Name => {
                let kind = match t.text.as_str() {
                    "True" => ExprKind::Constant(Constant::True),
                    "False" => ExprKind::Constant(Constant::False),
                    "None" => ExprKind::Constant(Constant::None),
                    s if is_keyword(s) => return Err(self.invalid()),
                    s => ExprKind::Name(s.to_string()),
                };
                self.advance();
                Ok(Expr::new(kind, line))
            }
            TokenKind::Number => {
                self.advance();
                let text = t.text.clone();
                let c = if text.ends_with(['j', 'J']) {
                    Constant::Complex(text)
                } else if !text.starts_with("0x") && !text.starts_with("0X") && text.contains(['.', 'e', 'E']) {
                    Constant::Float(text)
                } else {
                    Constant::Int(text)
                };
                Ok(Expr::new(ExprKind::Constant(c), line))
            }
            TokenKind::String => self.strings(),
            TokenKind::Op => match t.text.as_str() {
                "(" => self.paren_atom(),
                "[" => self.list_atom(),
                "{" => self.brace_atom(),
                "..." => {
                    self.advance();
                    Ok(Expr::new(ExprKind::Constant(Constant::Ellipsis), line))
                }
                _ => Err(self.invalid()),
            },
            _ => Err(self.invalid()),
        }
    }

    fn paren_atom(&mut self) -> PResult<Expr> {
        let line = self.line();
        self.expect_op("(")?;
        if self.eat_op(")") {
            return Ok(Expr::new(ExprKind::Tuple(Vec::new()), line));
        }
        if self.at_kw("yield") {
            let y = self.yield_expr()?;
            self.expect_op(")")?;
            return Ok(y);
        }
        let first = self.star_namedexpr()?;
        if self.at_kw("for") || (self.at_kw("async") && self.peek_at(1).is_name("for")) {
            let generators = self.comp_for()?;
            self.expect_op(")")?;
            return Ok(Expr::new(ExprKind::GeneratorExp { elt: Box::new(first), generators }, line));
        }
        if self.eat_op(")") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.at_op(")") {
                break;
            }
            elts.push(self.star_namedexpr()?);
        }
        self.expect_op(")")?;
        Ok(Expr::new(ExprKind::Tuple(elts), line))
    }

    fn list_atom(&mut self) -> PResult<Expr> {
        let line = self.line();
        self.expect_op("[")?;
        if self.eat_op("]") {
            return Ok(Expr::new(ExprKind::List(Vec::new()), line));
        }
        let first = self.star_namedexpr()?;
        if self.at_kw("for") || (self.at_kw("async") && self.peek_at(1).is_name("for")) {
            let generators = self.comp_for()?;
            self.expect_op("]")?;
            return Ok(Expr::new(ExprKind::ListComp { elt: Box::new(first), generators }, line));
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.at_op("]") {
                break;
            }
            elts.push(self.star_namedexpr()?);
        }
        self.expect_op("]")?;
        Ok(Expr::new(ExprKind::List(elts), line))
    }

    fn brace_atom(&mut self) -> PResult<Expr> {
        let line = self.line();
        self.expect_op("{")?;
        if self.eat_op("}") {
            return Ok(Expr::new(ExprKind::Dict { keys: Vec::new(), values: Vec::new() }, line));
        }
        // dict display or comprehension
        let mut first_key = if self.eat_op("**") {
            None
        } else {
            let k = self.star_namedexpr()?;
            if !self.at_op(":") {
                return self.set_rest(k, line);
            }
            Some(k)
        };
        let first_value = match first_key {
            None => self.bitor()?,
            Some(_) => {
                self.expect_op(":")?;
                self.test()?
            }
        };
        let comprehension = self.at_kw("for") || (self.at_kw("async") && self.peek_at(1).is_name("for"));
        if let Some(key) = first_key.take_if(|_| comprehension) {
            let generators = self.comp_for()?;
            self.expect_op("}")?;
            return Ok(Expr::new(
                ExprKind::DictComp { key: Box::new(key), value: Box::new(first_value), generators },
                line,
            ));
        }
        let mut keys = vec![first_key];
        let mut values = vec![first_value];
        while self.eat_op(",") {
            if self.at_op("}") {
                break;
            }
            if self.eat_op("**") {
                keys.push(None);
                values.push(self.bitor()?);
            } else {
                keys.push(Some(self.test()?));
                self.expect_op(":")?;
                values.push(self.test()?);
            }
        }
        self.expect_op("}")?;
        Ok(Expr::new(ExprKind::Dict { keys, values }, line))
    }

    fn set_rest(&mut self, first: Expr, line: u32) -> PResult<Expr> {
        if self.at_kw("for") || (self.at_kw("async") && self.peek_at(1).is_name("for")) {
            let generators = self.comp_for()?;
            self.expect_op("}")?;
            return Ok(Expr::new(ExprKind::SetComp { elt: Box::new(first), generators }, line));
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.at_op("}") {
                break;
            }
            elts.push(self.star_namedexpr()?);
        }
        self.expect_op("}")?;
        Ok(Expr::new(ExprKind::Set(elts), line))
    }

    /// One or more adjacent string literals, concatenated.
    fn strings(&mut self) -> PResult<Expr> {
        let line = self.line();
        let mut parts: Vec<FPart> = Vec::new();
        let mut any_f = false;
        let mut any_bytes = false;
        let mut any_text = false;
        while self.peek().kind == TokenKind::String {
            let t = self.advance();
            let lit = split_string_literal(&t.text);
            if lit.bytes {
                any_bytes = true;
            } else {
                any_text = true;
            }
            if lit.fstring {
                any_f = true;
                let tline = t.line + self.line_offset;
                parse_fstring_body(lit.body, tline, &mut parts)?;
            } else {
                push_literal(&mut parts, lit.body);
            }
        }
        if any_bytes && any_text {
            return Err(SyntaxError { line, col: 0, message: "cannot mix bytes and nonbytes literals".into() });
        }
        if !any_f {
            let text: String = parts
                .into_iter()
                .map(|p| match p {
                    FPart::Lit(s) => s,
                    FPart::Field(_) => unreachable!(),
                })
                .collect();
            let c = if any_bytes { Constant::Bytes(text) } else { Constant::Str(text) };
            return Ok(Expr::new(ExprKind::Constant(c), line));
        }
        Ok(Expr::new(ExprKind::JoinedStr(fparts_to_exprs(parts, line)), line))
    }
}

enum FPart {
    Lit(String),
    Field(Expr),
}

fn push_literal(parts: &mut Vec<FPart>, s: &str) {
    if s.is_empty() {
        return;
    }
    if let Some(FPart::Lit(prev)) = parts.last_mut() {
        prev.push_str(s);
    } else {
        parts.push(FPart::Lit(s.to_string()));
    }
}

fn fparts_to_exprs(parts: Vec<FPart>, line: u32) -> Vec<Expr> {
    parts
        .into_iter()
        .map(|p| match p {
            FPart::Lit(s) => Expr::new(ExprKind::Constant(Constant::Str(s)), line),
            FPart::Field(e) => e,
        })
        .collect()
}

struct StringLiteral<'a> {
    body: &'a str,
    fstring: bool,
    bytes: bool,
}

fn split_string_literal(text: &str) -> StringLiteral<'_> {
    let qpos = text.find(['\'', '"']).unwrap_or(0);
    let prefix = text[..qpos].to_ascii_lowercase();
    let rest = &text[qpos..];
    let q = if rest.starts_with("'''") || rest.starts_with("\"\"\"") { 3 } else { 1 };
    let body = if rest.len() >= 2 * q { &rest[q..rest.len() - q] } else { "" };
    StringLiteral { body, fstring: prefix.contains('f'), bytes: prefix.contains('b') }
}

/// Splits an f-string body into literal chunks and formatted fields.
fn parse_fstring_body(body: &str, line: u32, parts: &mut Vec<FPart>) -> PResult<()> {
    let chars: Vec<char> = body.chars().collect();
    let mut i = 0;
    let mut lit = String::new();
    let ferr = |msg: &str| SyntaxError { line, col: 0, message: format!("f-string: {msg}") };
    while i < chars.len() {
        let c = chars[i];
        if c == '{' {
            if chars.get(i + 1) == Some(&'{') {
                lit.push('{');
                i += 2;
                continue;
            }
            push_literal(parts, &lit);
            lit.clear();
            let (debug_text, field, next) = parse_fstring_field(&chars, i + 1, line)?;
            if let Some(t) = debug_text {
                push_literal(parts, &t);
            }
            parts.push(FPart::Field(field));
            i = next;
        } else if c == '}' {
            if chars.get(i + 1) == Some(&'}') {
                lit.push('}');
                i += 2;
                continue;
            }
            return Err(ferr("single '}' is not allowed"));
        } else {
            lit.push(c);
            i += 1;
        }
    }
    push_literal(parts, &lit);
    Ok(())
}

fn is_self_documenting(field: &str) -> bool {
    field.ends_with('=') && !["==", "!=", "<=", ">="].iter().any(|op| field.ends_with(op))
}

/// Parses one replacement field starting after `{`. Returns the echoed
/// source text for `{x=}` fields, the `FormattedValue`, and the index after
/// the closing `}`.
fn parse_fstring_field(chars: &[char], start: usize, line: u32) -> PResult<(Option<String>, Expr, usize)> {
    let ferr = |msg: &str| SyntaxError { line, col: 0, message: format!("f-string: {msg}") };
    let mut depth = 0i32;
    let mut i = start;
    let mut quote: Option<char> = None;
    while i < chars.len() {
        let c = chars[i];
        if let Some(q) = quote {
            if c == q {
                quote = None;
            }
            i += 1;
            continue;
        }
        match c {
            '\'' | '"' => quote = Some(c),
            '(' | '[' | '{' => depth += 1,
            ')' | ']' => depth -= 1,
            '}' if depth > 0 => depth -= 1,
            '}' | ':' if depth == 0 => break,
            '!' if depth == 0 && chars.get(i + 1) != Some(&'=') => break,
            _ => {}
        }
        i += 1;
    }
    if i >= chars.len() {
        return Err(ferr("expecting '}'"));
    }
    let mut expr_text: String = chars[start..i].iter().collect();
    // `{name=}` echoes its own source text before the value.
    let trimmed = expr_text.trim_end();
    let debug_text = if is_self_documenting(trimmed) {
        let text = expr_text.clone();
        expr_text.truncate(trimmed.len() - 1);
        Some(text)
    } else {
        None
    };
    if expr_text.trim().is_empty() {
        return Err(ferr("empty expression not allowed"));
    }
    let value = parse_expression(&expr_text, line)?;
    let mut conversion = None;
    if chars[i] == '!' {
        conversion = chars.get(i + 1).copied();
        if !matches!(conversion, Some('r' | 's' | 'a')) {
            return Err(ferr("invalid conversion character"));
        }
        i += 2;
    }
    let mut format_spec = None;
    if chars.get(i) == Some(&':') {
        i += 1;
        let mut spec_parts = Vec::new();
        let mut lit = String::new();
        loop {
            match chars.get(i) {
                None => return Err(ferr("expecting '}'")),
                Some('}') => break,
                Some('{') => {
                    push_literal(&mut spec_parts, &lit);
                    lit.clear();
                    let (debug_text, f, next) = parse_fstring_field(chars, i + 1, line)?;
                    if let Some(t) = debug_text {
                        push_literal(&mut spec_parts, &t);
                    }
                    spec_parts.push(FPart::Field(f));
                    i = next;
                }
                Some(&c) => {
                    lit.push(c);
                    i += 1;
                }
            }
        }
        push_literal(&mut spec_parts, &lit);
        format_spec = Some(Box::new(Expr::new(ExprKind::JoinedStr(fparts_to_exprs(spec_parts, line)), line)));
    }
    if chars.get(i) != Some(&'}') {
        return Err(ferr("expecting '}'"));
    }
    if debug_text.is_some() && conversion.is_none() && format_spec.is_none() {
        conversion = Some('r');
    }
    Ok((
        debug_text,
        Expr::new(ExprKind::FormattedValue { value: Box::new(value), conversion, format_spec }, line),
        i + 1,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(src: &str) -> Vec<Stmt> {
        parse(src).unwrap().module.body
    }

    #[test]
    fn minimal_function() {
        let b = body("def f():\n    return 1");
        assert_eq!(b.len(), 1);
        assert!(matches!(b[0].kind, StmtKind::FunctionDef(_)));
    }

    #[test]
    fn malformed_def_reports_line_one() {
        let e = parse("def f(:").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn bool_ops_flatten() {
        let b = body("x = a and b and c or d\n");
        let StmtKind::Assign { value, .. } = &b[0].kind else { panic!() };
        let ExprKind::BoolOp { op, values } = &value.kind else { panic!() };
        assert_eq!(*op, BoolOpKind::Or);
        assert_eq!(values.len(), 2);
        assert!(matches!(&values[0].kind, ExprKind::BoolOp { values, .. } if values.len() == 3));
    }

    #[test]
    fn comparison_chain_is_one_node() {
        let b = body("a < b <= c\n");
        let StmtKind::Expr(e) = &b[0].kind else { panic!() };
        assert!(matches!(&e.kind, ExprKind::Compare { ops, .. } if ops.len() == 2));
    }

    #[test]
    fn elif_nests() {
        let b = body("if a:\n    pass\nelif b:\n    pass\nelse:\n    pass\n");
        let StmtKind::If { orelse, .. } = &b[0].kind else { panic!() };
        assert!(matches!(&orelse[0].kind, StmtKind::If { is_elif: true, orelse, .. } if orelse.len() == 1));
    }

    #[test]
    fn power_binds_tighter_than_unary() {
        let b = body("-x ** 2\n");
        let StmtKind::Expr(e) = &b[0].kind else { panic!() };
        assert!(matches!(&e.kind, ExprKind::UnaryOp { op: UnaryOpKind::USub, .. }));
    }

    #[test]
    fn comprehension_with_condition() {
        let b = body("y = [x for x in xs if x > 0 if x < 9]\n");
        let StmtKind::Assign { value, .. } = &b[0].kind else { panic!() };
        let ExprKind::ListComp { generators, .. } = &value.kind else { panic!() };
        assert_eq!(generators[0].ifs.len(), 2);
    }

    #[test]
    fn conditional_expression_in_comprehension_element() {
        let b = body("y = [a if a else b for a in xs if a]\n");
        let StmtKind::Assign { value, .. } = &b[0].kind else { panic!() };
        let ExprKind::ListComp { elt, generators } = &value.kind else { panic!() };
        assert!(matches!(elt.kind, ExprKind::IfExp { .. }));
        assert_eq!(generators[0].ifs.len(), 1);
    }

    #[test]
    fn parameters_with_defaults_and_kwonly() {
        let b = body("def f(a, /, b: int = 1, *args, c, d=2, **kw) -> None:\n    pass\n");
        let StmtKind::FunctionDef(f) = &b[0].kind else { panic!() };
        assert_eq!(f.args.posonly.len(), 1);
        assert_eq!(f.args.args.len(), 1);
        assert_eq!(f.args.defaults.len(), 1);
        assert_eq!(f.args.kwonly.len(), 2);
        assert_eq!(f.args.kw_defaults.len(), 2);
        assert!(f.args.vararg.is_some() && f.args.kwarg.is_some());
    }

    #[test]
    fn fstring_fields() {
        let b = body("s = f'a{x!r:>{w}}b'\n");
        let StmtKind::Assign { value, .. } = &b[0].kind else { panic!() };
        let ExprKind::JoinedStr(parts) = &value.kind else { panic!() };
        assert_eq!(parts.len(), 3);
        assert!(matches!(&parts[1].kind, ExprKind::FormattedValue { conversion: Some('r'), format_spec: Some(_), .. }));
    }

    #[test]
    fn self_documenting_fstring_field() {
        let b = body("s = f'x {a=} y'\n");
        let StmtKind::Assign { value, .. } = &b[0].kind else { panic!() };
        let ExprKind::JoinedStr(parts) = &value.kind else { panic!() };
        assert_eq!(parts[0].kind, ExprKind::Constant(Constant::Str("x a=".into())));
        assert!(matches!(&parts[1].kind, ExprKind::FormattedValue { conversion: Some('r'), .. }));
    }

    #[test]
    fn string_concatenation_is_one_constant() {
        let b = body("s = 'a' \"b\"\n");
        let StmtKind::Assign { value, .. } = &b[0].kind else { panic!() };
        assert_eq!(value.kind, ExprKind::Constant(Constant::Str("ab".into())));
    }

    #[test]
    fn one_line_compound_and_semicolons() {
        let b = body("if x: a = 1; b = 2\nwhile y: pass\n");
        let StmtKind::If { body, .. } = &b[0].kind else { panic!() };
        assert_eq!(body.len(), 2);
    }

    #[test]
    fn decorators_lambdas_and_slices() {
        let src = "@dec(1)\n@other\nclass A(B, metaclass=M):\n    f = lambda x, *a, k=1: x[1:2, ::3]\n";
        let b = body(src);
        let StmtKind::ClassDef(c) = &b[0].kind else { panic!() };
        assert_eq!(c.decorators.len(), 2);
        assert_eq!(c.keywords.len(), 1);
    }

    #[test]
    fn try_except_forms() {
        let src =
            "try:\n    x()\nexcept (A, B) as e:\n    pass\nexcept:\n    pass\nelse:\n    pass\nfinally:\n    pass\n";
        let b = body(src);
        let StmtKind::Try { handlers, orelse, finalbody, .. } = &b[0].kind else { panic!() };
        assert_eq!(handlers.len(), 2);
        assert_eq!(handlers[0].name.as_deref(), Some("e"));
        assert_eq!((orelse.len(), finalbody.len()), (1, 1));
    }

    #[test]
    fn star_unpacking_targets() {
        let b = body("a, *b = c\nfor i, (j, k) in z: pass\n");
        assert!(
            matches!(&b[0].kind, StmtKind::Assign { targets, .. } if matches!(targets[0].kind, ExprKind::Tuple(_)))
        );
    }

    #[test]
    fn walrus_and_await() {
        body("async def f():\n    if (n := await g()) > 1:\n        return [y async for y in h()]\n");
    }

    #[test]
    fn keyword_as_identifier_is_error() {
        assert!(parse("class = 3\n").is_err());
        assert!(parse("x = = 2\n").is_err());
    }

    #[test]
    fn node_count_simple() {
        // Assign, Name, BinOp, Name, Name
        assert_eq!(parse("a = b + c\n").unwrap().node_count(), 5);
    }
}
