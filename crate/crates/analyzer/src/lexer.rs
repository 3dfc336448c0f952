//! Tokenizer for Python source text.
//!
//! Produces the logical token stream (with `Newline`, `Indent` and `Dedent`
//! markers) consumed by the parser, and keeps comments on a side channel so
//! that line statistics can be computed without re-scanning the text.

use crate::error::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Name,
    Number,
    String,
    Op,
    Newline,
    Indent,
    Dedent,
    EndMarker,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the first character.
    pub line: u32,
    /// 0-based column (in chars) of the first character.
    pub col: u32,
    /// 1-based line of the last character.
    pub end_line: u32,
}

impl Token {
    pub fn is_op(&self, op: &str) -> bool {
        self.kind == TokenKind::Op && self.text == op
    }

    pub fn is_name(&self, name: &str) -> bool {
        self.kind == TokenKind::Name && self.text == name
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    pub line: u32,
    pub text: String,
}

#[derive(Debug, Clone, Default)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
}

const THREE_CHAR_OPS: [&str; 5] = ["**=", "//=", ">>=", "<<=", "..."];
const TWO_CHAR_OPS: [&str; 19] =
    ["**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", ":=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@="];
const ONE_CHAR_OPS: &str = "+-*/%@&|^~<>()[]{},:;.=";

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    depth: Vec<(char, u32)>,
    indents: Vec<u32>,
    at_line_start: bool,
    out: TokenStream,
}

pub fn tokenize(source: &str) -> Result<TokenStream, SyntaxError> {
    let mut lx = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 0,
        depth: Vec::new(),
        indents: vec![0],
        at_line_start: true,
        out: TokenStream::default(),
    };
    lx.run()?;
    Ok(lx.out)
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

impl Lexer {
    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 0;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: u32, col: u32, msg: impl Into<String>) -> SyntaxError {
        SyntaxError { line, col, message: msg.into() }
    }

    fn push(&mut self, kind: TokenKind, text: String, line: u32, col: u32) {
        let end_line = self.line;
        self.out.tokens.push(Token { kind, text, line, col, end_line });
    }

    fn last_is_newline_or_empty(&self) -> bool {
        matches!(
            self.out.tokens.last().map(|t| t.kind),
            None | Some(TokenKind::Newline) | Some(TokenKind::Indent) | Some(TokenKind::Dedent)
        )
    }

    fn run(&mut self) -> Result<(), SyntaxError> {
        while self.pos < self.chars.len() {
            if self.at_line_start && self.depth.is_empty() {
                self.handle_indentation()?;
                if self.pos >= self.chars.len() {
                    break;
                }
            }
            let c = self.peek(0).unwrap();
            let (line, col) = (self.line, self.col);
            match c {
                ' ' | '\t' | '\x0c' => {
                    self.bump();
                }
                '\r' => {
                    self.bump();
                }
                '\n' => {
                    self.bump();
                    if self.depth.is_empty() {
                        if !self.last_is_newline_or_empty() {
                            self.out.tokens.push(Token {
                                kind: TokenKind::Newline,
                                text: String::new(),
                                line,
                                col,
                                end_line: line,
                            });
                        }
                        self.at_line_start = true;
                    }
                }
                '#' => {
                    let mut text = String::new();
                    while let Some(ch) = self.peek(0) {
                        if ch == '\n' {
                            break;
                        }
                        text.push(ch);
                        self.bump();
                    }
                    self.out.comments.push(Comment { line, text });
                }
                '\\' => {
                    // explicit line joining
                    self.bump();
                    while matches!(self.peek(0), Some(' ') | Some('\t') | Some('\r')) {
                        self.bump();
                    }
                    match self.peek(0) {
                        Some('\n') => {
                            self.bump();
                        }
                        None => return Err(self.err(line, col, "unexpected EOF after line continuation")),
                        _ => return Err(self.err(line, col, "unexpected character after line continuation character")),
                    }
                }
                c if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) => {
                    let text = self.number()?;
                    self.push(TokenKind::Number, text, line, col);
                }
                c if is_ident_start(c) => {
                    let mut text = String::new();
                    while let Some(ch) = self.peek(0) {
                        if is_ident_continue(ch) {
                            text.push(ch);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if matches!(self.peek(0), Some('\'') | Some('"')) && is_string_prefix(&text) {
                        let body = self.string_body(line, col)?;
                        let mut full = text;
                        full.push_str(&body);
                        self.push(TokenKind::String, full, line, col);
                    } else {
                        self.push(TokenKind::Name, text, line, col);
                    }
                }
                '\'' | '"' => {
                    let body = self.string_body(line, col)?;
                    self.push(TokenKind::String, body, line, col);
                }
                _ => {
                    let op = self.operator(line, col)?;
                    match op.as_str() {
                        "(" | "[" | "{" => self.depth.push((op.chars().next().unwrap(), line)),
                        ")" | "]" | "}" => {
                            let close = op.chars().next().unwrap();
                            let want = match close {
                                ')' => '(',
                                ']' => '[',
                                _ => '{',
                            };
                            match self.depth.pop() {
                                Some((open, _)) if open == want => {}
                                Some((open, _)) => {
                                    return Err(self.err(
                                        line,
                                        col,
                                        format!(
                                            "closing parenthesis '{close}' does not match opening parenthesis '{open}'"
                                        ),
                                    ))
                                }
                                None => return Err(self.err(line, col, format!("unmatched '{close}'"))),
                            }
                        }
                        _ => {}
                    }
                    self.push(TokenKind::Op, op, line, col);
                }
            }
        }
        if let Some(&(open, l)) = self.depth.last() {
            return Err(self.err(l, 0, format!("'{open}' was never closed")));
        }
        if !self.last_is_newline_or_empty() {
            let (line, col) = (self.line, self.col);
            self.out.tokens.push(Token { kind: TokenKind::Newline, text: String::new(), line, col, end_line: line });
        }
        let line = self.line;
        while self.indents.len() > 1 {
            self.indents.pop();
            self.out.tokens.push(Token { kind: TokenKind::Dedent, text: String::new(), line, col: 0, end_line: line });
        }
        self.out.tokens.push(Token { kind: TokenKind::EndMarker, text: String::new(), line, col: 0, end_line: line });
        Ok(())
    }

    /// Measures leading whitespace of a physical line and emits indentation
    /// tokens. Blank and comment-only lines are ignored.
    fn handle_indentation(&mut self) -> Result<(), SyntaxError> {
        self.at_line_start = false;
        let mut width = 0u32;
        let mut off = 0;
        loop {
            match self.peek(off) {
                Some(' ') => width += 1,
                Some('\t') => width = (width / 8 + 1) * 8,
                Some('\x0c') => width = 0,
                _ => break,
            }
            off += 1;
        }
        match self.peek(off) {
            None | Some('\n') | Some('#') => return Ok(()),
            Some('\r') if matches!(self.peek(off + 1), Some('\n') | None) => return Ok(()),
            Some('\\') => return Ok(()),
            _ => {}
        }
        for _ in 0..off {
            self.bump();
        }
        let current = *self.indents.last().unwrap();
        let line = self.line;
        if width > current {
            if self.out.tokens.is_empty() {
                return Err(self.err(line, 0, "unexpected indent"));
            }
            self.indents.push(width);
            self.out.tokens.push(Token { kind: TokenKind::Indent, text: String::new(), line, col: 0, end_line: line });
        } else if width < current {
            while *self.indents.last().unwrap() > width {
                self.indents.pop();
                self.out.tokens.push(Token {
                    kind: TokenKind::Dedent,
                    text: String::new(),
                    line,
                    col: 0,
                    end_line: line,
                });
            }
            if *self.indents.last().unwrap() != width {
                return Err(self.err(line, width, "unindent does not match any outer indentation level"));
            }
        }
        Ok(())
    }

    fn number(&mut self) -> Result<String, SyntaxError> {
        let mut text = String::new();
        let (line, col) = (self.line, self.col);
        if self.peek(0) == Some('0') && matches!(self.peek(1), Some('x' | 'X' | 'o' | 'O' | 'b' | 'B')) {
            text.push(self.bump().unwrap());
            text.push(self.bump().unwrap());
            while let Some(c) = self.peek(0) {
                if c.is_ascii_hexdigit() || c == '_' {
                    text.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            if text.len() == 2 {
                return Err(self.err(line, col, "invalid number literal"));
            }
            return Ok(text);
        }
        let digits = |lx: &mut Self, text: &mut String| {
            while let Some(c) = lx.peek(0) {
                if c.is_ascii_digit() || c == '_' {
                    text.push(c);
                    lx.bump();
                } else {
                    break;
                }
            }
        };
        digits(self, &mut text);
        if self.peek(0) == Some('.') {
            text.push('.');
            self.bump();
            digits(self, &mut text);
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let sign = matches!(self.peek(1), Some('+' | '-'));
            let next = if sign { self.peek(2) } else { self.peek(1) };
            if next.is_some_and(|c| c.is_ascii_digit()) {
                text.push(self.bump().unwrap());
                if sign {
                    text.push(self.bump().unwrap());
                }
                digits(self, &mut text);
            }
        }
        if matches!(self.peek(0), Some('j' | 'J')) {
            text.push(self.bump().unwrap());
        }
        if self.peek(0).is_some_and(is_ident_start) {
            return Err(self.err(self.line, self.col, "invalid decimal literal"));
        }
        Ok(text)
    }

    /// Consumes a quoted string starting at the opening quote and returns the
    /// raw source text (quotes included).
    fn string_body(&mut self, line: u32, col: u32) -> Result<String, SyntaxError> {
        let quote = self.bump().unwrap();
        let mut text = String::new();
        text.push(quote);
        let triple = self.peek(0) == Some(quote) && self.peek(1) == Some(quote);
        if triple {
            text.push(self.bump().unwrap());
            text.push(self.bump().unwrap());
        } else if self.peek(0) == Some(quote) {
            text.push(self.bump().unwrap());
            return Ok(text);
        }
        loop {
            let Some(c) = self.bump() else {
                return Err(self.err(line, col, "unterminated string literal"));
            };
            text.push(c);
            match c {
                '\\' => {
                    if let Some(n) = self.bump() {
                        text.push(n);
                    }
                }
                '\n' if !triple => {
                    return Err(self.err(line, col, "unterminated string literal"));
                }
                c if c == quote => {
                    if !triple {
                        return Ok(text);
                    }
                    if self.peek(0) == Some(quote) && self.peek(1) == Some(quote) {
                        text.push(self.bump().unwrap());
                        text.push(self.bump().unwrap());
                        return Ok(text);
                    }
                }
                _ => {}
            }
        }
    }

    fn operator(&mut self, line: u32, col: u32) -> Result<String, SyntaxError> {
        let take = |n: usize, lx: &Self| -> String { (0..n).filter_map(|i| lx.peek(i)).collect() };
        let three = take(3, self);
        if THREE_CHAR_OPS.contains(&three.as_str()) {
            for _ in 0..3 {
                self.bump();
            }
            return Ok(three);
        }
        let two = take(2, self);
        if TWO_CHAR_OPS.contains(&two.as_str()) {
            for _ in 0..2 {
                self.bump();
            }
            return Ok(two);
        }
        let c = self.peek(0).unwrap();
        if ONE_CHAR_OPS.contains(c) {
            self.bump();
            return Ok(c.to_string());
        }
        Err(self.err(line, col, format!("invalid character '{c}'")))
    }
}

fn is_string_prefix(s: &str) -> bool {
    matches!(s.to_ascii_lowercase().as_str(), "r" | "u" | "b" | "f" | "br" | "rb" | "fr" | "rf")
}
