use crate::diagnostics::{Diagnostic, Result};
use crate::syntax::{Name, Pos, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Keyword {
    Data,
    Axiom,
    Lemma,
    Proof,
    Qed,
    By,
    Def,
    Case,
    Assume,
    Then,
    Show,
    Fix,
    For,
    Forall,
    Generalizing,
}

impl Keyword {
    fn from_word(w: &str) -> Option<Keyword> {
        Some(match w {
            "data" => Keyword::Data,
            "axiom" => Keyword::Axiom,
            "Lemma" => Keyword::Lemma,
            "Proof" => Keyword::Proof,
            "QED" => Keyword::Qed,
            "by" => Keyword::By,
            "def" => Keyword::Def,
            "Case" => Keyword::Case,
            "Assume" => Keyword::Assume,
            "Then" => Keyword::Then,
            "Show" => Keyword::Show,
            "Fix" => Keyword::Fix,
            "For" => Keyword::For,
            "forall" => Keyword::Forall,
            "generalizing" => Keyword::Generalizing,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Upper(Name),
    Lower(Name),
    Kw(Keyword),
    Underscore,
    LParen,
    RParen,
    Comma,
    Colon,
    DColon,
    Equals,
    Bar,
    Arrow,
    PropEq,
    Dots,
    Semi,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a str,
    offset: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
            offset: self.offset,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn rest(&self) -> &'a str {
        &self.src[self.offset..]
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut cur = Cursor {
        src,
        offset: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if cur.rest().starts_with("--") {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let start = cur.pos();
        let symbols: [(&str, Tok); 5] = [
            (".=.", Tok::PropEq),
            ("...", Tok::Dots),
            ("::", Tok::DColon),
            ("->", Tok::Arrow),
            ("=", Tok::Equals),
        ];
        if let Some((text, tok)) = symbols.iter().find(|(s, _)| cur.rest().starts_with(s)) {
            cur.bump_n(text.chars().count());
            out.push(Token {
                tok: tok.clone(),
                span: Span::new(start, cur.pos()),
            });
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '|' => Some(Tok::Bar),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(tok) = single {
            cur.bump();
            out.push(Token {
                tok,
                span: Span::new(start, cur.pos()),
            });
            continue;
        }
        if c == '_' || c.is_ascii_alphabetic() {
            while cur.peek().is_some_and(is_ident_char) {
                cur.bump();
            }
            let span = Span::new(start, cur.pos());
            let word = &src[start.offset..cur.offset];
            let tok = if word == "_" {
                Tok::Underscore
            } else if word.starts_with('_') {
                return Err(Diagnostic::parse(format!(
                    "identifiers must start with a letter: `{word}`"
                ))
                .with_span(Some(span)));
            } else if let Some(kw) = Keyword::from_word(word) {
                Tok::Kw(kw)
            } else if word.starts_with(|c: char| c.is_ascii_uppercase()) {
                Tok::Upper(Name::new(word))
            } else {
                Tok::Lower(Name::new(word))
            };
            out.push(Token { tok, span });
            continue;
        }
        cur.bump();
        return Err(Diagnostic::parse(format!("unexpected character `{c}`"))
            .with_span(Some(Span::new(start, cur.pos()))));
    }
    Ok(out)
}
