//! Hand-written parser for `.cyp` and `.byp` modules.
//!
//! Expressions follow the "expression to end of line" discipline: a term in
//! a declaration, a proposition or a rewrite step is parsed from the tokens
//! of a single line (up to `;`), and must consume all of them. Proof
//! structure is delimited by keywords, never by indentation.

mod lexer;
mod resolve;

use std::sync::Arc;

use crate::diagnostics::{Diagnostic, Result};
use crate::syntax::*;
use crate::typecheck::Type;

use lexer::{Keyword, Tok, Token};

pub use resolve::resolve_names;

/// Parse a module from source text.
pub fn parse_module(source: &str) -> Result<RawModule> {
    let tokens = lexer::tokenize(source)?;
    let mut p = Parser::new(source, tokens);
    let mut decls = Vec::new();
    loop {
        while p.eat(&Tok::Semi) {}
        if p.at_end() {
            break;
        }
        decls.push(p.decl()?);
    }
    Ok(RawModule { file: None, decls })
}

/// [`parse_module`], recording `file` in the module and its diagnostics.
pub fn parse_file(file: &str, source: &str) -> Result<RawModule> {
    let file: Arc<str> = Arc::from(file);
    parse_module(source)
        .map(|m| RawModule {
            file: Some(file.clone()),
            ..m
        })
        .map_err(|d| d.in_file(&file))
}

/// Parse a single term; the whole input must be one expression.
pub fn parse_term(source: &str) -> Result<Term> {
    let tokens = lexer::tokenize(source)?;
    let mut p = Parser::new(source, tokens);
    if p.at_end() {
        return Err(Diagnostic::parse("expected a term"));
    }
    let t = p.term()?;
    if let Some(tok) = p.peek_token() {
        return Err(
            Diagnostic::parse(format!("unexpected {} after the term", p.describe(tok)))
                .with_span(Some(tok.span)),
        );
    }
    Ok(t)
}

/// Parse a type expression such as `(a -> b) -> List a -> List b`.
pub fn parse_type(source: &str) -> Result<Type> {
    let tokens = lexer::tokenize(source)?;
    let mut p = Parser::new(source, tokens);
    let (t, _) = p.ty()?;
    if let Some(tok) = p.peek_token() {
        return Err(
            Diagnostic::parse(format!("unexpected {} after the type", p.describe(tok)))
                .with_span(Some(tok.span)),
        );
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    /// Tokens at or after `limit` are invisible (end-of-line restriction).
    limit: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, tokens: Vec<Token>) -> Self {
        let limit = tokens.len();
        Parser {
            src,
            tokens,
            pos: 0,
            limit,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.limit
    }

    fn peek_token(&self) -> Option<&Token> {
        if self.at_end() {
            None
        } else {
            self.tokens.get(self.pos)
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.peek_token().map(|t| &t.tok)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        let i = self.pos + ahead;
        if i >= self.limit {
            None
        } else {
            self.tokens.get(i).map(|t| &t.tok)
        }
    }

    fn is_kw(&self, kw: Keyword) -> bool {
        self.peek() == Some(&Tok::Kw(kw))
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Lower(n)) if n.as_str() == word)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Span of the most recently consumed token.
    fn last_span(&self) -> Option<Span> {
        self.pos
            .checked_sub(1)
            .and_then(|i| self.tokens.get(i))
            .map(|t| t.span)
    }

    fn span_from(&self, start: Span) -> Span {
        self.last_span().map_or(start, |end| start.join(end))
    }

    fn describe(&self, tok: &Token) -> String {
        let text = tok.span.slice(self.src).unwrap_or("?");
        format!("`{text}`")
    }

    fn error(&self, expected: &str) -> Diagnostic {
        match self.peek_token() {
            Some(tok) => {
                Diagnostic::parse(format!("expected {expected}, found {}", self.describe(tok)))
                    .with_span(Some(tok.span))
            }
            None => {
                // End of input or of the current line.
                let what = if self.pos >= self.tokens.len() {
                    "end of input"
                } else {
                    "end of line"
                };
                Diagnostic::parse(format!("expected {expected}, found {what}"))
                    .with_span(self.last_span())
            }
        }
    }

    fn expect(&mut self, tok: &Tok, expected: &str) -> Result<Span> {
        if self.peek() == Some(tok) {
            Ok(self.bump().span)
        } else {
            Err(self.error(expected))
        }
    }

    fn expect_kw(&mut self, kw: Keyword, expected: &str) -> Result<Span> {
        self.expect(&Tok::Kw(kw), expected)
    }

    fn expect_word(&mut self, word: &str) -> Result<Span> {
        if self.is_word(word) {
            Ok(self.bump().span)
        } else {
            Err(self.error(&format!("`{word}`")))
        }
    }

    fn lower_name(&mut self, expected: &str) -> Result<(Name, Span)> {
        match self.peek() {
            Some(Tok::Lower(n)) => {
                let n = n.clone();
                Ok((n, self.bump().span))
            }
            _ => Err(self.error(expected)),
        }
    }

    fn any_name(&mut self, expected: &str) -> Result<(Name, Span)> {
        match self.peek() {
            Some(Tok::Lower(n)) | Some(Tok::Upper(n)) => {
                let n = n.clone();
                Ok((n, self.bump().span))
            }
            _ => Err(self.error(expected)),
        }
    }

    /// Run `f` on the tokens of the current line (up to `;`), which it must
    /// consume completely.
    fn until_eol<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let Some(first) = self.peek_token() else {
            return f(self);
        };
        let line = first.span.start.line;
        let mut end = self.pos;
        while end < self.limit
            && self.tokens[end].span.start.line == line
            && self.tokens[end].tok != Tok::Semi
        {
            end += 1;
        }
        let outer = self.limit;
        self.limit = end;
        let result = f(self);
        let dangling = self.peek_token().cloned();
        self.limit = outer;
        let value = result?;
        if let Some(tok) = dangling {
            return Err(Diagnostic::parse(format!(
                "unexpected {} before the end of the line",
                self.describe(&tok)
            ))
            .with_span(Some(tok.span)));
        }
        Ok(value)
    }

    // -----------------------------------------------------------------------
    // Terms

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Upper(_) | Tok::Lower(_) | Tok::Underscore | Tok::LParen)
        )
    }

    /// Returns the atom and the span of its tokens (including parentheses).
    fn atom(&mut self) -> Result<(Term, Span)> {
        match self.peek() {
            Some(Tok::Upper(n)) => {
                let n = n.clone();
                let span = self.bump().span;
                Ok((Term::constant(n).with_span(Some(span)), span))
            }
            Some(Tok::Lower(n)) => {
                let n = n.clone();
                let span = self.bump().span;
                Ok((Term::ident(n).with_span(Some(span)), span))
            }
            Some(Tok::Underscore) => {
                let span = self.bump().span;
                Ok((Term::hole().with_span(Some(span)), span))
            }
            Some(Tok::LParen) => {
                let open = self.bump().span;
                let inner = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok((inner, self.span_from(open)))
            }
            _ => Err(self.error("a term")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let (mut t, first) = self.atom()?;
        while self.starts_atom() {
            let (arg, arg_span) = self.atom()?;
            t = Term::app(t, arg).with_span(Some(first.join(arg_span)));
        }
        Ok(t)
    }

    // -----------------------------------------------------------------------
    // Types

    fn ty(&mut self) -> Result<(Type, Span)> {
        let (arg, span) = self.btype()?;
        if self.eat(&Tok::Arrow) {
            let (res, res_span) = self.ty()?;
            return Ok((Type::fun(arg, res), span.join(res_span)));
        }
        Ok((arg, span))
    }

    fn btype(&mut self) -> Result<(Type, Span)> {
        if let Some(Tok::Upper(n)) = self.peek() {
            let n = n.clone();
            let start = self.bump().span;
            let mut args = Vec::new();
            while self.starts_atype() {
                args.push(self.atype()?.0);
            }
            return Ok((Type::con(n, args), self.span_from(start)));
        }
        self.atype()
    }

    fn starts_atype(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Upper(_) | Tok::Lower(_) | Tok::LParen)
        )
    }

    fn atype(&mut self) -> Result<(Type, Span)> {
        match self.peek() {
            Some(Tok::Upper(n)) => {
                let n = n.clone();
                let span = self.bump().span;
                Ok((Type::con(n, vec![]), span))
            }
            Some(Tok::Lower(n)) => {
                let n = n.clone();
                let span = self.bump().span;
                Ok((Type::Var(n), span))
            }
            Some(Tok::LParen) => {
                let open = self.bump().span;
                let (t, _) = self.ty()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok((t, self.span_from(open)))
            }
            _ => Err(self.error("a type")),
        }
    }

    fn binder(&mut self) -> Result<Binder> {
        let (name, start) = self.lower_name("a variable name")?;
        self.expect(&Tok::DColon, "`::`")?;
        let (ty, ty_span) = self.ty()?;
        Ok(Binder {
            name,
            ty,
            span: Some(start.join(ty_span)),
        })
    }

    fn binder_list(&mut self) -> Result<Vec<Binder>> {
        let mut out = vec![self.binder()?];
        while self.eat(&Tok::Comma) {
            out.push(self.binder()?);
        }
        Ok(out)
    }

    // -----------------------------------------------------------------------
    // Propositions

    /// `[forall binders :]`
    fn quantifier(&mut self) -> Result<Vec<Binder>> {
        if !self.is_kw(Keyword::Forall) {
            return Ok(Vec::new());
        }
        self.bump();
        let binders = self.binder_list()?;
        self.expect(&Tok::Colon, "`:` after the quantified variables")?;
        Ok(binders)
    }

    /// `term .=. term` on one line.
    fn equation(&mut self) -> Result<(Term, Term, Span)> {
        self.until_eol(|p| {
            let lhs = p.term()?;
            p.expect(&Tok::PropEq, "`.=.`")?;
            let rhs = p.term()?;
            let span = join_opt(lhs.span, rhs.span).expect("parsed terms carry spans");
            Ok((lhs, rhs, span))
        })
    }

    fn prop(&mut self) -> Result<Prop> {
        let start = self.peek_token().map(|t| t.span);
        let binders = self.quantifier()?;
        let (lhs, rhs, eq_span) = self.equation()?;
        let span = start.map_or(eq_span, |s| s.join(eq_span));
        Ok(Prop {
            binders,
            lhs,
            rhs,
            span: Some(span),
        })
    }

    // -----------------------------------------------------------------------
    // Declarations

    fn decl(&mut self) -> Result<Decl> {
        let start = self.peek_token().expect("decl called at end").span;
        let kind = match self.peek() {
            Some(Tok::Kw(Keyword::Data)) => DeclKind::Data(self.until_eol(Self::data_decl)?),
            Some(Tok::Kw(Keyword::Axiom)) => DeclKind::Axiom(self.axiom()?),
            Some(Tok::Kw(Keyword::Lemma)) => DeclKind::Lemma(self.lemma()?),
            Some(Tok::Dots) => {
                self.bump();
                DeclKind::Hole
            }
            Some(Tok::Lower(_)) if self.peek_at(1) == Some(&Tok::DColon) => {
                DeclKind::Sig(self.until_eol(Self::sig_decl)?)
            }
            Some(Tok::Lower(_)) => DeclKind::Equation(self.until_eol(Self::fun_equation)?),
            _ => {
                return Err(self
                    .error("a declaration (`data`, a signature, an equation, `axiom` or `Lemma`)"))
            }
        };
        Ok(Decl {
            kind,
            span: Some(self.span_from(start)),
        })
    }

    fn data_decl(&mut self) -> Result<DataDecl> {
        self.expect_kw(Keyword::Data, "`data`")?;
        let name = match self.peek() {
            Some(Tok::Upper(n)) => {
                let n = n.clone();
                self.bump();
                n
            }
            _ => return Err(self.error("a type name")),
        };
        let mut params = Vec::new();
        while let Some(Tok::Lower(n)) = self.peek() {
            params.push(n.clone());
            self.bump();
        }
        let mut ctors = Vec::new();
        // `data T` without constructors declares an abstract type.
        if self.eat(&Tok::Equals) {
            loop {
                let (cname, cspan) = match self.peek() {
                    Some(Tok::Upper(n)) => {
                        let n = n.clone();
                        (n, self.bump().span)
                    }
                    _ => return Err(self.error("a constructor name")),
                };
                let mut args = Vec::new();
                while self.starts_atype() {
                    args.push(self.atype()?.0);
                }
                ctors.push(CtorDecl {
                    name: cname,
                    args,
                    span: Some(self.span_from(cspan)),
                });
                if !self.eat(&Tok::Bar) {
                    break;
                }
            }
        }
        Ok(DataDecl {
            name,
            params,
            ctors,
        })
    }

    fn sig_decl(&mut self) -> Result<SigDecl> {
        let (name, _) = self.lower_name("a function name")?;
        self.expect(&Tok::DColon, "`::`")?;
        let (ty, _) = self.ty()?;
        Ok(SigDecl { name, ty })
    }

    fn fun_equation(&mut self) -> Result<FunEquation> {
        let (name, span) = self.lower_name("a function name")?;
        let mut lhs = Term::constant(name.clone()).with_span(Some(span));
        while self.starts_atom() {
            let (arg, arg_span) = self.atom()?;
            lhs = Term::app(lhs, arg).with_span(Some(span.join(arg_span)));
        }
        self.expect(&Tok::Equals, "`=` or a pattern")?;
        let rhs = self.term()?;
        Ok(FunEquation { name, lhs, rhs })
    }

    fn axiom(&mut self) -> Result<Axiom> {
        self.expect_kw(Keyword::Axiom, "`axiom`")?;
        let (name, _) = self.any_name("an axiom name")?;
        self.expect(&Tok::Colon, "`:`")?;
        let prop = self.prop()?;
        Ok(Axiom { name, prop })
    }

    fn lemma(&mut self) -> Result<Lemma> {
        self.expect_kw(Keyword::Lemma, "`Lemma`")?;
        let name = match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Colon), _) => {
                self.bump();
                None
            }
            (Some(Tok::Lower(n) | Tok::Upper(n)), Some(Tok::Colon)) => {
                let n = n.clone();
                self.bump();
                self.bump();
                Some(n)
            }
            // `Lemma lhs .=. rhs` without name and colon.
            _ => None,
        };
        let prop = self.prop()?;
        let proof = self.proof()?;
        Ok(Lemma { name, prop, proof })
    }

    // -----------------------------------------------------------------------
    // Proofs

    /// `Proof ... QED` or `Proof by <method> QED`.
    fn proof(&mut self) -> Result<Proof> {
        let start = self.expect_kw(Keyword::Proof, "`Proof`")?;
        let kind = if self.is_dots() {
            let dots = self.bump().span;
            self.expect_qed(start)?;
            return Ok(Proof {
                kind: ProofKind::Hole,
                span: Some(dots),
            });
        } else {
            self.expect_kw(Keyword::By, "`by` or `...` after `Proof`")?;
            self.method()?
        };
        self.expect_qed(start)?;
        Ok(Proof {
            kind,
            span: Some(self.span_from(start)),
        })
    }

    fn expect_qed(&mut self, proof_start: Span) -> Result<()> {
        if self.is_kw(Keyword::Qed) {
            self.bump();
            return Ok(());
        }
        let found = match self.peek_token() {
            Some(tok) => format!("found {}", self.describe(tok)),
            None => "found end of input".to_string(),
        };
        let end = self.last_span().unwrap_or(proof_start);
        Err(
            Diagnostic::parse(format!("unterminated proof: expected `QED`, {found}"))
                .with_span(Some(end))
                .with_span(Some(proof_start)),
        )
    }

    fn is_dots(&self) -> bool {
        self.peek() == Some(&Tok::Dots)
    }

    /// A proof inside a case or after `Show`: `Proof ...` or a bare `...`.
    fn subproof(&mut self) -> Result<Proof> {
        if self.is_dots() {
            let span = self.bump().span;
            return Ok(Proof {
                kind: ProofKind::Hole,
                span: Some(span),
            });
        }
        self.proof()
    }

    fn method(&mut self) -> Result<ProofKind> {
        match self.peek() {
            Some(Tok::Lower(w)) if w.as_str() == "rewriting" => {
                self.bump();
                Ok(ProofKind::Rewriting(self.chain()?))
            }
            Some(Tok::Lower(w)) if w.as_str() == "extensionality" => {
                self.bump();
                let var = self.until_eol(|p| {
                    p.expect_word("with")?;
                    p.binder()
                })?;
                let shown = self.show()?;
                let proof = self.subproof()?;
                Ok(ProofKind::Extensionality {
                    var,
                    shown,
                    proof: Box::new(proof),
                })
            }
            Some(Tok::Lower(w)) if w.as_str() == "case" => {
                self.bump();
                let (scrutinee, ty) = self.until_eol(|p| {
                    p.expect_word("analysis")?;
                    p.expect_word("on")?;
                    let scrutinee = p.term()?;
                    p.expect(&Tok::DColon, "`::`")?;
                    Ok((scrutinee, p.ty()?.0))
                })?;
                let cases = self.entries(Self::case)?;
                Ok(ProofKind::CaseAnalysis {
                    scrutinee,
                    ty,
                    cases,
                })
            }
            Some(Tok::Lower(w)) if w.as_str() == "induction" => {
                self.bump();
                let (var, generalizing) = self.until_eol(|p| {
                    p.expect_word("on")?;
                    let var = p.binder()?;
                    let generalizing = if p.is_kw(Keyword::Generalizing) {
                        p.bump();
                        p.binder_list()?
                    } else {
                        Vec::new()
                    };
                    Ok((var, generalizing))
                })?;
                let cases = self.entries(Self::ind_case)?;
                Ok(ProofKind::Induction {
                    var,
                    generalizing,
                    cases,
                })
            }
            _ => Err(self.error("`rewriting`, `extensionality`, `case analysis` or `induction`")),
        }
    }

    fn chain(&mut self) -> Result<Chain> {
        let first = self.until_eol(Self::term)?;
        let mut steps = Vec::new();
        loop {
            let is_link = self.is_dots()
                || (self.peek() == Some(&Tok::LParen)
                    && self.peek_at(1) == Some(&Tok::Kw(Keyword::By)));
            if !is_link {
                break;
            }
            steps.push(self.until_eol(|p| {
                let (link, link_span) = p.link()?;
                p.expect(&Tok::PropEq, "`.=.` after the justification")?;
                let term = p.term()?;
                Ok(Step {
                    link,
                    link_span: Some(link_span),
                    term,
                })
            })?);
        }
        Ok(Chain { first, steps })
    }

    fn link(&mut self) -> Result<(Link, Span)> {
        if self.is_dots() {
            return Ok((Link::Ellipsis, self.bump().span));
        }
        let open = self.expect(&Tok::LParen, "`(by ...)` or `...`")?;
        self.expect_kw(Keyword::By, "`by`")?;
        let link = if self.eat(&Tok::Underscore) {
            Link::ByHole
        } else if self.eat(&Tok::Kw(Keyword::Def)) {
            Link::ByDef(self.lower_name("a function name")?.0)
        } else {
            Link::ByRule(self.any_name("a rule name, `def` or `_`")?.0)
        };
        self.expect(&Tok::RParen, "`)`")?;
        Ok((link, self.span_from(open)))
    }

    fn show(&mut self) -> Result<Prop> {
        self.expect_kw(Keyword::Show, "`Show:`")?;
        self.expect(&Tok::Colon, "`:` after `Show`")?;
        self.prop()
    }

    /// Cases up to (not including) `QED`; `...` stands for missing cases.
    fn entries<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> Result<T>,
    ) -> Result<Vec<Entry<T>>> {
        let mut out = Vec::new();
        loop {
            if self.is_kw(Keyword::Case) {
                out.push(Entry::Item(item(self)?));
            } else if self.is_dots() {
                out.push(Entry::Hole(Some(self.bump().span)));
            } else if self.is_kw(Keyword::Qed) || self.at_end() {
                return Ok(out);
            } else {
                return Err(self.error("`Case`, `...` or `QED`"));
            }
        }
    }

    fn fixes(&mut self) -> Result<Vec<Binder>> {
        if !self.is_kw(Keyword::Fix) {
            return Ok(Vec::new());
        }
        self.until_eol(|p| {
            p.bump();
            p.binder_list()
        })
    }

    fn assumption(&mut self) -> Result<Assumption> {
        let start = self.expect_kw(Keyword::Assume, "`Assume`")?;
        let (name, _) = self.any_name("an assumption name")?;
        self.expect(&Tok::Colon, "`:`")?;
        let prop = self.prop()?;
        Ok(Assumption {
            name,
            prop,
            span: Some(self.span_from(start)),
        })
    }

    fn case(&mut self) -> Result<Case> {
        let start = self.expect_kw(Keyword::Case, "`Case`")?;
        let pattern = self.until_eol(Self::term)?;
        let fixes = self.fixes()?;
        let assumption = self.assumption()?;
        self.eat(&Tok::Kw(Keyword::Then));
        let proof = self.subproof()?;
        Ok(Case {
            pattern,
            fixes,
            assumption,
            proof,
            span: Some(self.span_from(start)),
        })
    }

    fn ind_case(&mut self) -> Result<IndCase> {
        let start = self.expect_kw(Keyword::Case, "`Case`")?;
        let pattern = self.until_eol(Self::term)?;
        let fixes = self.fixes()?;
        let mut hypotheses = Vec::new();
        while self.is_kw(Keyword::Assume) {
            hypotheses.push(self.assumption()?);
        }
        self.eat(&Tok::Kw(Keyword::Then));
        let refixed = if self.is_kw(Keyword::For) || self.is_word("for") {
            Some(self.until_eol(|p| {
                p.bump();
                p.expect_word("fixed")?;
                p.binder_list()
            })?)
        } else {
            None
        };
        let shown = self.show()?;
        let proof = self.subproof()?;
        Ok(IndCase {
            pattern,
            fixes,
            hypotheses,
            refixed,
            shown,
            proof,
            span: Some(self.span_from(start)),
        })
    }
}
