//! Lexer and recursive-descent parser for `.gfj` programs.
//!
//! ```text
//! program   := classDecl* "run" expr "at" grade
//! classDecl := "class" Id ("extends" Id)? "{" (fieldDecl | methodDecl)* "}"
//! fieldDecl := Id "[" grade "]" Id ";"
//! methodDecl:= Id "[" grade "]" Id "(" params ")" "[" grade "]" "{" expr "}"
//! expr      := atom (("@" grade)? "." Id ("(" args ")")?)*
//! atom      := Id | "new" Id "(" args ")" | "{" Id "[" grade "]" Id "=" expr ";" expr "}" | "(" expr ")"
//! arg       := expr ("^" grade)?
//! grade     := Kind ":" value | Int
//! ```
//!
//! `//` starts a line comment.

use thiserror::Error;

use super::syntax::{name, Arg, Expr, ExprKind, GradedType, Name, Span};
use super::table::{ClassDecl, ClassTable, FieldDecl, MethodDecl, Param};
use super::Program;
use crate::hetero::{GradeUniverse, HeteroError, KindId, KindedGrade};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("{span}: {source}")]
    Grade { span: Span, source: HeteroError },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. } | ParseError::Grade { span, .. } => *span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Punct(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) => format!("`{s}`"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn text(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Int(s) => s.clone(),
            Tok::Punct(c) => c.to_string(),
            Tok::Eof => String::new(),
        }
    }
}

const KEYWORDS: [&str; 5] = ["class", "extends", "new", "run", "at"];

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().expect("peeked");
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
        } else if c == '/' && text_at_comment(&chars) {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                s.push(bump(&mut chars));
            }
            out.push((Tok::Int(s), span));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while chars
                .peek()
                .is_some_and(|&c| c.is_alphanumeric() || c == '_' || c == '$')
            {
                s.push(bump(&mut chars));
            }
            out.push((Tok::Ident(s), span));
        } else if c == '∞' {
            bump(&mut chars);
            out.push((Tok::Ident("inf".into()), span));
        } else if "{}()[];,.=@^:/".contains(c) {
            bump(&mut chars);
            out.push((Tok::Punct(c), span));
        } else {
            return Err(ParseError::Syntax {
                span,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

fn text_at_comment(chars: &std::iter::Peekable<std::str::Chars>) -> bool {
    let mut it = chars.clone();
    it.next();
    it.next() == Some('/')
}

struct Parser<'a> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    universe: &'a GradeUniverse,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax {
            span: self.span(),
            msg: msg.into(),
        })
    }

    fn is_punct(&self, c: char) -> bool {
        *self.peek() == Tok::Punct(c)
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_punct(&mut self, c: char) -> PResult<Span> {
        if self.is_punct(c) {
            Ok(self.next().1)
        } else {
            self.error(format!("expected `{c}`, found {}", self.peek().describe()))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected `{kw}`, found {}", self.peek().describe()))
        }
    }

    fn ident(&mut self) -> PResult<(Name, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let (_, span) = self.next();
                Ok((name(&s), span))
            }
            t => self.error(format!("expected identifier, found {}", t.describe())),
        }
    }

    fn grade(&mut self) -> PResult<KindedGrade> {
        let span = self.span();
        let (kind, text) = match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                (KindId::nat(), n)
            }
            Tok::Ident(k) => {
                self.next();
                self.expect_punct(':')?;
                (KindId::new(&k), self.grade_value()?)
            }
            t => return self.error(format!("expected grade, found {}", t.describe())),
        };
        let alg = self
            .universe
            .algebra(&kind)
            .map_err(|source| ParseError::Grade { span, source })?;
        let value = alg.parse_value(&text).map_err(|e| ParseError::Grade {
            span,
            source: e.into(),
        })?;
        Ok(KindedGrade::new(kind, value))
    }

    fn grade_value(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Punct('(') => {
                let mut depth = 0usize;
                let mut s = String::new();
                loop {
                    let (t, _) = self.next();
                    match t {
                        Tok::Punct('(') => depth += 1,
                        Tok::Punct(')') => depth -= 1,
                        Tok::Eof => return self.error("unterminated grade literal"),
                        _ => {}
                    }
                    s.push_str(&t.text());
                    if depth == 0 {
                        return Ok(s);
                    }
                }
            }
            Tok::Ident(v) => {
                self.next();
                Ok(v)
            }
            Tok::Int(n) => {
                self.next();
                if self.is_punct('/') && matches!(self.peek_at(1), Tok::Int(_)) {
                    self.next();
                    let (d, _) = self.next();
                    Ok(format!("{n}/{}", d.text()))
                } else {
                    Ok(n)
                }
            }
            t => self.error(format!("expected grade value, found {}", t.describe())),
        }
    }

    fn graded_type(&mut self) -> PResult<GradedType> {
        let (class, _) = self.ident()?;
        self.expect_punct('[')?;
        let grade = self.grade()?;
        self.expect_punct(']')?;
        Ok(GradedType { class, grade })
    }

    fn program(&mut self) -> PResult<Program> {
        let mut classes = Vec::new();
        while self.is_keyword("class") {
            classes.push(self.class_decl()?);
        }
        self.expect_keyword("run")?;
        let main = self.expr()?;
        self.expect_keyword("at")?;
        let grade = self.grade()?;
        if *self.peek() != Tok::Eof {
            return self.error(format!("expected end of input, found {}", self.peek().describe()));
        }
        Ok(Program {
            table: ClassTable::new(classes),
            main,
            grade,
        })
    }

    fn class_decl(&mut self) -> PResult<ClassDecl> {
        let span = self.span();
        self.expect_keyword("class")?;
        let (cname, _) = self.ident()?;
        let superclass = if self.is_keyword("extends") {
            self.next();
            self.ident()?.0
        } else {
            name("Object")
        };
        self.expect_punct('{')?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        while !self.is_punct('}') {
            let mspan = self.span();
            let ty = self.graded_type()?;
            let (member, _) = self.ident()?;
            if self.is_punct(';') {
                self.next();
                fields.push(FieldDecl {
                    ty,
                    name: member,
                    span: mspan,
                });
            } else if self.is_punct('(') {
                self.next();
                let mut params = Vec::new();
                if !self.is_punct(')') {
                    loop {
                        let ty = self.graded_type()?;
                        let (pname, _) = self.ident()?;
                        params.push(Param { ty, name: pname });
                        if self.is_punct(',') {
                            self.next();
                        } else {
                            break;
                        }
                    }
                }
                self.expect_punct(')')?;
                self.expect_punct('[')?;
                let this_grade = self.grade()?;
                self.expect_punct(']')?;
                self.expect_punct('{')?;
                let body = self.expr()?;
                self.expect_punct('}')?;
                methods.push(MethodDecl {
                    name: member,
                    ret: ty,
                    this_grade,
                    params,
                    body,
                    span: mspan,
                });
            } else {
                return self.error(format!(
                    "expected `;` or `(` after member name, found {}",
                    self.peek().describe()
                ));
            }
        }
        self.expect_punct('}')?;
        Ok(ClassDecl {
            name: cname,
            superclass,
            fields,
            methods,
            span,
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        loop {
            let span = self.span();
            let ascription = if self.is_punct('@') {
                self.next();
                let g = self.grade()?;
                if !self.is_punct('.') {
                    return self.error("a receiver ascription must be followed by `.`");
                }
                Some(g)
            } else if self.is_punct('.') {
                None
            } else {
                return Ok(e);
            };
            self.expect_punct('.')?;
            let (member, _) = self.ident()?;
            let kind = if self.is_punct('(') {
                ExprKind::Invk {
                    recv: Box::new(e),
                    ascription,
                    method: member,
                    args: self.args()?,
                }
            } else {
                ExprKind::Field {
                    recv: Box::new(e),
                    ascription,
                    field: member,
                }
            };
            e = Expr::new(kind, span);
        }
    }

    fn args(&mut self) -> PResult<Vec<Arg>> {
        self.expect_punct('(')?;
        let mut args = Vec::new();
        if !self.is_punct(')') {
            loop {
                let expr = self.expr()?;
                let annotation = if self.is_punct('^') {
                    self.next();
                    Some(self.grade()?)
                } else {
                    None
                };
                args.push(Arg { expr, annotation });
                if self.is_punct(',') {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect_punct(')')?;
        Ok(args)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) if s == "new" => {
                self.next();
                let (class, _) = self.ident()?;
                let args = self.args()?;
                Ok(Expr::new(ExprKind::New { class, args }, span))
            }
            Tok::Ident(_) => {
                let (x, _) = self.ident()?;
                Ok(Expr::new(ExprKind::Var(x), span))
            }
            Tok::Punct('{') => {
                self.next();
                let decl = self.graded_type()?;
                let (var, _) = self.ident()?;
                self.expect_punct('=')?;
                let init = self.expr()?;
                self.expect_punct(';')?;
                let body = self.expr()?;
                self.expect_punct('}')?;
                Ok(Expr::new(
                    ExprKind::Block {
                        decl,
                        var,
                        init: Box::new(init),
                        body: Box::new(body),
                    },
                    span,
                ))
            }
            Tok::Punct('(') => {
                self.next();
                let e = self.expr()?;
                self.expect_punct(')')?;
                Ok(e)
            }
            t => self.error(format!("expected expression, found {}", t.describe())),
        }
    }
}

fn parser<'a>(text: &str, universe: &'a GradeUniverse) -> PResult<Parser<'a>> {
    Ok(Parser {
        toks: lex(text)?,
        pos: 0,
        universe,
    })
}

pub fn parse_program(text: &str, universe: &GradeUniverse) -> PResult<Program> {
    parser(text, universe)?.program()
}

/// Parses a single expression.
pub fn parse_expr(text: &str, universe: &GradeUniverse) -> PResult<Expr> {
    let mut p = parser(text, universe)?;
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("expected end of input, found {}", p.peek().describe()));
    }
    Ok(e)
}

/// Parses a grade literal such as `N:3` or `AP:(w,private)`.
pub fn parse_grade(text: &str, universe: &GradeUniverse) -> PResult<KindedGrade> {
    let mut p = parser(text, universe)?;
    let g = p.grade()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("expected end of input, found {}", p.peek().describe()));
    }
    Ok(g)
}

/// Parses a graded type such as `Pair[N:1]`.
pub fn parse_graded_type(text: &str, universe: &GradeUniverse) -> PResult<GradedType> {
    let mut p = parser(text, universe)?;
    let t = p.graded_type()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("expected end of input, found {}", p.peek().describe()));
    }
    Ok(t)
}
