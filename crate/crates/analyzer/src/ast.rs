//! Syntax tree for the supported Python subset.
//!
//! Node shapes follow CPython's `ast` module closely (statement and expression
//! node kinds, flattened boolean operations, comparison chains, `elif` as a
//! nested `If`), so node counts are comparable with a reference parser.

#[derive(Debug, Clone, PartialEq)]
pub struct Module {
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub args: Arguments,
    pub body: Vec<Stmt>,
    pub decorators: Vec<Expr>,
    pub returns: Option<Expr>,
    pub is_async: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDef {
    pub name: String,
    pub bases: Vec<Expr>,
    pub keywords: Vec<Keyword>,
    pub body: Vec<Stmt>,
    pub decorators: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    FunctionDef(Box<FunctionDef>),
    ClassDef(Box<ClassDef>),
    Return(Option<Expr>),
    Delete(Vec<Expr>),
    Assign {
        targets: Vec<Expr>,
        value: Expr,
    },
    AugAssign {
        target: Expr,
        op: BinOpKind,
        value: Expr,
    },
    AnnAssign {
        target: Expr,
        annotation: Expr,
        value: Option<Expr>,
    },
    For {
        target: Expr,
        iter: Expr,
        body: Vec<Stmt>,
        orelse: Vec<Stmt>,
        is_async: bool,
    },
    While {
        test: Expr,
        body: Vec<Stmt>,
        orelse: Vec<Stmt>,
    },
    If {
        test: Expr,
        body: Vec<Stmt>,
        orelse: Vec<Stmt>,
        /// True when this node was written as an `elif` clause.
        is_elif: bool,
    },
    With {
        items: Vec<WithItem>,
        body: Vec<Stmt>,
        is_async: bool,
    },
    Raise {
        exc: Option<Expr>,
        cause: Option<Expr>,
    },
    Try {
        body: Vec<Stmt>,
        handlers: Vec<ExceptHandler>,
        orelse: Vec<Stmt>,
        finalbody: Vec<Stmt>,
    },
    Assert {
        test: Expr,
        msg: Option<Expr>,
    },
    Import(Vec<Alias>),
    ImportFrom {
        module: Option<String>,
        names: Vec<Alias>,
        level: u32,
    },
    Global(Vec<String>),
    Nonlocal(Vec<String>),
    Expr(Expr),
    Pass,
    Break,
    Continue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WithItem {
    pub context_expr: Expr,
    pub optional_vars: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceptHandler {
    pub type_: Option<Expr>,
    pub name: Option<String>,
    pub body: Vec<Stmt>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alias {
    pub name: String,
    pub asname: Option<String>,
}

impl Alias {
    /// The name this import binds in the importing scope.
    pub fn bound_name(&self) -> &str {
        match &self.asname {
            Some(a) => a,
            None => self.name.split('.').next().unwrap_or(&self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub name: String,
    pub annotation: Option<Expr>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Arguments {
    pub posonly: Vec<Arg>,
    pub args: Vec<Arg>,
    pub vararg: Option<Arg>,
    pub kwonly: Vec<Arg>,
    pub kw_defaults: Vec<Option<Expr>>,
    pub kwarg: Option<Arg>,
    pub defaults: Vec<Expr>,
}

impl Arguments {
    /// Every parameter in declaration order.
    pub fn all(&self) -> impl Iterator<Item = &Arg> {
        self.posonly
            .iter()
            .chain(self.args.iter())
            .chain(self.vararg.iter())
            .chain(self.kwonly.iter())
            .chain(self.kwarg.iter())
    }

    /// Positional and keyword parameters, excluding `*args` and `**kwargs`.
    pub fn named(&self) -> impl Iterator<Item = &Arg> {
        self.posonly.iter().chain(self.args.iter()).chain(self.kwonly.iter())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Keyword {
    /// `None` for `**mapping` unpacking.
    pub arg: Option<String>,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comprehension {
    pub target: Expr,
    pub iter: Expr,
    pub ifs: Vec<Expr>,
    pub is_async: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constant {
    /// Inner text of the literal(s) with prefixes and quotes stripped.
    Str(String),
    Bytes(String),
    Int(String),
    Float(String),
    Complex(String),
    True,
    False,
    None,
    Ellipsis,
}

impl Constant {
    /// Operand identity used by Halstead counting.
    pub fn key(&self) -> String {
        match self {
            Constant::Str(s) => format!("'{s}'"),
            Constant::Bytes(s) => format!("b'{s}'"),
            Constant::Int(s) | Constant::Float(s) | Constant::Complex(s) => s.clone(),
            Constant::True => "True".into(),
            Constant::False => "False".into(),
            Constant::None => "None".into(),
            Constant::Ellipsis => "...".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOpKind {
    And,
    Or,
}

impl BoolOpKind {
    pub fn symbol(self) -> &'static str {
        match self {
            BoolOpKind::And => "and",
            BoolOpKind::Or => "or",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOpKind {
    Add,
    Sub,
    Mult,
    MatMult,
    Div,
    FloorDiv,
    Mod,
    Pow,
    LShift,
    RShift,
    BitOr,
    BitXor,
    BitAnd,
}

impl BinOpKind {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOpKind::Add => "+",
            BinOpKind::Sub => "-",
            BinOpKind::Mult => "*",
            BinOpKind::MatMult => "@",
            BinOpKind::Div => "/",
            BinOpKind::FloorDiv => "//",
            BinOpKind::Mod => "%",
            BinOpKind::Pow => "**",
            BinOpKind::LShift => "<<",
            BinOpKind::RShift => ">>",
            BinOpKind::BitOr => "|",
            BinOpKind::BitXor => "^",
            BinOpKind::BitAnd => "&",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "+" => BinOpKind::Add,
            "-" => BinOpKind::Sub,
            "*" => BinOpKind::Mult,
            "@" => BinOpKind::MatMult,
            "/" => BinOpKind::Div,
            "//" => BinOpKind::FloorDiv,
            "%" => BinOpKind::Mod,
            "**" => BinOpKind::Pow,
            "<<" => BinOpKind::LShift,
            ">>" => BinOpKind::RShift,
            "|" => BinOpKind::BitOr,
            "^" => BinOpKind::BitXor,
            "&" => BinOpKind::BitAnd,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOpKind {
    Not,
    Invert,
    UAdd,
    USub,
}

impl UnaryOpKind {
    /// Unary plus and minus are spelled `u+`/`u-` to keep them distinct from
    /// the binary operators.
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOpKind::Not => "not",
            UnaryOpKind::Invert => "~",
            UnaryOpKind::UAdd => "u+",
            UnaryOpKind::USub => "u-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOpKind {
    Eq,
    NotEq,
    Lt,
    LtE,
    Gt,
    GtE,
    Is,
    IsNot,
    In,
    NotIn,
}

impl CmpOpKind {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOpKind::Eq => "==",
            CmpOpKind::NotEq => "!=",
            CmpOpKind::Lt => "<",
            CmpOpKind::LtE => "<=",
            CmpOpKind::Gt => ">",
            CmpOpKind::GtE => ">=",
            CmpOpKind::Is => "is",
            CmpOpKind::IsNot => "is not",
            CmpOpKind::In => "in",
            CmpOpKind::NotIn => "not in",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    BoolOp {
        op: BoolOpKind,
        values: Vec<Expr>,
    },
    NamedExpr {
        target: Box<Expr>,
        value: Box<Expr>,
    },
    BinOp {
        left: Box<Expr>,
        op: BinOpKind,
        right: Box<Expr>,
    },
    UnaryOp {
        op: UnaryOpKind,
        operand: Box<Expr>,
    },
    Lambda {
        args: Box<Arguments>,
        body: Box<Expr>,
    },
    IfExp {
        test: Box<Expr>,
        body: Box<Expr>,
        orelse: Box<Expr>,
    },
    /// `None` keys mark `**mapping` unpacking.
    Dict {
        keys: Vec<Option<Expr>>,
        values: Vec<Expr>,
    },
    Set(Vec<Expr>),
    ListComp {
        elt: Box<Expr>,
        generators: Vec<Comprehension>,
    },
    SetComp {
        elt: Box<Expr>,
        generators: Vec<Comprehension>,
    },
    DictComp {
        key: Box<Expr>,
        value: Box<Expr>,
        generators: Vec<Comprehension>,
    },
    GeneratorExp {
        elt: Box<Expr>,
        generators: Vec<Comprehension>,
    },
    Await(Box<Expr>),
    Yield(Option<Box<Expr>>),
    YieldFrom(Box<Expr>),
    Compare {
        left: Box<Expr>,
        ops: Vec<CmpOpKind>,
        comparators: Vec<Expr>,
    },
    Call {
        func: Box<Expr>,
        args: Vec<Expr>,
        keywords: Vec<Keyword>,
    },
    FormattedValue {
        value: Box<Expr>,
        conversion: Option<char>,
        format_spec: Option<Box<Expr>>,
    },
    JoinedStr(Vec<Expr>),
    Constant(Constant),
    Attribute {
        value: Box<Expr>,
        attr: String,
    },
    Subscript {
        value: Box<Expr>,
        slice: Box<Expr>,
    },
    Starred(Box<Expr>),
    Name(String),
    List(Vec<Expr>),
    Tuple(Vec<Expr>),
    Slice {
        lower: Option<Box<Expr>>,
        upper: Option<Box<Expr>>,
        step: Option<Box<Expr>>,
    },
}

impl Expr {
    pub fn new(kind: ExprKind, line: u32) -> Self {
        Expr { kind, line }
    }

    pub fn as_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Name(n) => Some(n),
            _ => None,
        }
    }

    /// Direct child expressions, in source order.
    pub fn children(&self) -> Vec<&Expr> {
        let mut out: Vec<&Expr> = Vec::new();
        match &self.kind {
            ExprKind::BoolOp { values, .. } => out.extend(values),
            ExprKind::NamedExpr { target, value } => {
                out.push(target);
                out.push(value);
            }
            ExprKind::BinOp { left, right, .. } => {
                out.push(left);
                out.push(right);
            }
            ExprKind::UnaryOp { operand, .. } => out.push(operand),
            ExprKind::Lambda { args, body } => {
                out.extend(args.defaults.iter());
                out.extend(args.kw_defaults.iter().flatten());
                out.push(body);
            }
            ExprKind::IfExp { test, body, orelse } => {
                out.push(body);
                out.push(test);
                out.push(orelse);
            }
            ExprKind::Dict { keys, values } => {
                for (k, v) in keys.iter().zip(values) {
                    if let Some(k) = k {
                        out.push(k);
                    }
                    out.push(v);
                }
            }
            ExprKind::Set(items) | ExprKind::List(items) | ExprKind::Tuple(items) => out.extend(items),
            ExprKind::JoinedStr(items) => out.extend(items),
            ExprKind::ListComp { elt, generators }
            | ExprKind::SetComp { elt, generators }
            | ExprKind::GeneratorExp { elt, generators } => {
                out.push(elt);
                push_generators(&mut out, generators);
            }
            ExprKind::DictComp { key, value, generators } => {
                out.push(key);
                out.push(value);
                push_generators(&mut out, generators);
            }
            ExprKind::Await(v) | ExprKind::YieldFrom(v) | ExprKind::Starred(v) => out.push(v),
            ExprKind::Yield(v) => {
                if let Some(v) = v {
                    out.push(v);
                }
            }
            ExprKind::Compare { left, comparators, .. } => {
                out.push(left);
                out.extend(comparators);
            }
            ExprKind::Call { func, args, keywords } => {
                out.push(func);
                out.extend(args);
                out.extend(keywords.iter().map(|k| &k.value));
            }
            ExprKind::FormattedValue { value, format_spec, .. } => {
                out.push(value);
                if let Some(s) = format_spec {
                    out.push(s);
                }
            }
            ExprKind::Attribute { value, .. } => out.push(value),
            ExprKind::Subscript { value, slice } => {
                out.push(value);
                out.push(slice);
            }
            ExprKind::Slice { lower, upper, step } => {
                out.extend(lower.as_deref());
                out.extend(upper.as_deref());
                out.extend(step.as_deref());
            }
            ExprKind::Constant(_) | ExprKind::Name(_) => {}
        }
        out
    }
}

fn push_generators<'a>(out: &mut Vec<&'a Expr>, generators: &'a [Comprehension]) {
    for g in generators {
        out.push(&g.target);
        out.push(&g.iter);
        out.extend(g.ifs.iter());
    }
}

impl Stmt {
    /// Expressions owned directly by this statement (not by nested statements).
    pub fn exprs(&self) -> Vec<&Expr> {
        let mut out: Vec<&Expr> = Vec::new();
        match &self.kind {
            StmtKind::FunctionDef(f) => {
                out.extend(f.decorators.iter());
                push_argument_exprs(&mut out, &f.args);
                out.extend(f.returns.iter());
            }
            StmtKind::ClassDef(c) => {
                out.extend(c.decorators.iter());
                out.extend(c.bases.iter());
                out.extend(c.keywords.iter().map(|k| &k.value));
            }
            StmtKind::Return(v) => out.extend(v.iter()),
            StmtKind::Delete(ts) => out.extend(ts),
            StmtKind::Assign { targets, value } => {
                out.extend(targets);
                out.push(value);
            }
            StmtKind::AugAssign { target, value, .. } => {
                out.push(target);
                out.push(value);
            }
            StmtKind::AnnAssign { target, annotation, value } => {
                out.push(target);
                out.push(annotation);
                out.extend(value.iter());
            }
            StmtKind::For { target, iter, .. } => {
                out.push(target);
                out.push(iter);
            }
            StmtKind::While { test, .. } | StmtKind::If { test, .. } => out.push(test),
            StmtKind::With { items, .. } => {
                for it in items {
                    out.push(&it.context_expr);
                    out.extend(it.optional_vars.iter());
                }
            }
            StmtKind::Raise { exc, cause } => {
                out.extend(exc.iter());
                out.extend(cause.iter());
            }
            StmtKind::Try { handlers, .. } => {
                for h in handlers {
                    out.extend(h.type_.iter());
                }
            }
            StmtKind::Assert { test, msg } => {
                out.push(test);
                out.extend(msg.iter());
            }
            StmtKind::Expr(e) => out.push(e),
            StmtKind::Import(_)
            | StmtKind::ImportFrom { .. }
            | StmtKind::Global(_)
            | StmtKind::Nonlocal(_)
            | StmtKind::Pass
            | StmtKind::Break
            | StmtKind::Continue => {}
        }
        out
    }

    /// Nested statement blocks, in source order.
    pub fn blocks(&self) -> Vec<&[Stmt]> {
        match &self.kind {
            StmtKind::FunctionDef(f) => vec![&f.body],
            StmtKind::ClassDef(c) => vec![&c.body],
            StmtKind::For { body, orelse, .. }
            | StmtKind::While { body, orelse, .. }
            | StmtKind::If { body, orelse, .. } => {
                vec![body, orelse]
            }
            StmtKind::With { body, .. } => vec![body],
            StmtKind::Try { body, handlers, orelse, finalbody } => {
                let mut v: Vec<&[Stmt]> = vec![body];
                v.extend(handlers.iter().map(|h| h.body.as_slice()));
                v.push(orelse);
                v.push(finalbody);
                v
            }
            _ => Vec::new(),
        }
    }

    /// The docstring-candidate string if this is a bare string statement.
    pub fn as_docstring(&self) -> Option<&str> {
        match &self.kind {
            StmtKind::Expr(Expr { kind: ExprKind::Constant(Constant::Str(s)), .. }) => Some(s),
            _ => None,
        }
    }
}

fn push_argument_exprs<'a>(out: &mut Vec<&'a Expr>, args: &'a Arguments) {
    for a in args.all() {
        out.extend(a.annotation.iter());
    }
    out.extend(args.defaults.iter());
    out.extend(args.kw_defaults.iter().flatten());
}

/// Returns the docstring of a body, if its first statement is a plain string.
pub fn docstring(body: &[Stmt]) -> Option<&str> {
    body.first().and_then(Stmt::as_docstring)
}

/// Counts statement and expression nodes the way a walk over CPython's
/// `ast` counts instances of `ast.stmt` and `ast.expr`.
pub fn count_nodes(module: &Module) -> usize {
    fn stmt(s: &Stmt) -> usize {
        1 + s.exprs().into_iter().map(expr).sum::<usize>()
            + s.blocks().into_iter().flat_map(|b| b.iter()).map(stmt).sum::<usize>()
    }
    fn expr(e: &Expr) -> usize {
        1 + e.children().into_iter().map(expr).sum::<usize>()
    }
    module.body.iter().map(stmt).sum()
}

/// Visits every statement in `body`, depth first, including nested blocks.
pub fn walk_stmts<'a>(body: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
    for s in body {
        f(s);
        for block in s.blocks() {
            walk_stmts(block, f);
        }
    }
}

/// Visits every expression under `e`, including `e` itself.
pub fn walk_expr<'a>(e: &'a Expr, f: &mut impl FnMut(&'a Expr)) {
    f(e);
    for c in e.children() {
        walk_expr(c, f);
    }
}
