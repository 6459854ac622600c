//! Epistemic formulas with public announcements.
//!
//! The AST holds only six core constructors. Derived connectives (`true`,
//! `|`, `->`, `E`, `Ehat`) are expanded while parsing, so every other module
//! only ever has to handle the core.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Words with a fixed meaning in the concrete syntax.
pub const RESERVED_WORDS: [&str; 5] = ["B", "E", "Ehat", "true", "false"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `B agent body`: the agent believes the body.
    Believes(String, Box<Formula>),
    /// `[! announcement] body`: after truthfully announcing, the body holds.
    Announced(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("undeclared atom `{0}`")]
    UndeclaredAtom(String),
    #[error("undeclared agent `{0}`")]
    UndeclaredAgent(String),
}

/// Returns true for a nonempty string over `[A-Za-z0-9_]`.
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn top() -> Self {
        Formula::False.not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    /// `a | b` as `~(~a & ~b)`.
    pub fn or(self, other: Formula) -> Self {
        self.not().and(other.not()).not()
    }

    /// `a -> b` as `~(a & ~b)`.
    pub fn implies(self, other: Formula) -> Self {
        self.and(other.not()).not()
    }

    pub fn believes(agent: impl Into<String>, body: Formula) -> Self {
        Formula::Believes(agent.into(), Box::new(body))
    }

    pub fn announced(announcement: Formula, body: Formula) -> Self {
        Formula::Announced(Box::new(announcement), Box::new(body))
    }

    /// Mutual belief: conjunction of `B i body` over `agents` in lexicographic order.
    pub fn everybody<S: AsRef<str>>(agents: &[S], body: Formula) -> Self {
        let mut sorted: Vec<&str> = agents.iter().map(|a| a.as_ref()).collect();
        sorted.sort_unstable();
        sorted.dedup();
        let mut iter = sorted.into_iter();
        let first = match iter.next() {
            Some(a) => Formula::believes(a, body.clone()),
            None => return Formula::top(),
        };
        iter.fold(first, |acc, a| acc.and(Formula::believes(a, body.clone())))
    }

    /// Dual of mutual belief, `~E~body`.
    pub fn everybody_dual<S: AsRef<str>>(agents: &[S], body: Formula) -> Self {
        Formula::everybody(agents, body.not()).not()
    }

    /// Maximum nesting of belief and announcement operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::False => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::And(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Believes(_, f) => 1 + f.modal_depth(),
            Formula::Announced(a, b) => 1 + a.modal_depth().max(b.modal_depth()),
        }
    }

    /// True when the formula contains no belief and no announcement operator.
    pub fn is_propositional(&self) -> bool {
        self.modal_depth() == 0
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.as_str());
            }
        });
        out
    }

    pub fn agents(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Believes(i, _) = f {
                out.insert(i.as_str());
            }
        });
        out
    }

    /// Pre-order traversal over every subformula, including `self`.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Atom(_) | Formula::False => {}
            Formula::Not(g) | Formula::Believes(_, g) => g.visit(f),
            Formula::And(l, r) | Formula::Announced(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    /// Checks every identifier against a declared vocabulary.
    pub fn check_vocabulary<A, P>(&self, agents: &[A], atoms: &[P]) -> Result<(), FormulaError>
    where
        A: AsRef<str>,
        P: AsRef<str>,
    {
        for p in self.atoms() {
            if !atoms.iter().any(|q| q.as_ref() == p) {
                return Err(FormulaError::UndeclaredAtom(p.to_string()));
            }
        }
        for i in self.agents() {
            if !agents.iter().any(|a| a.as_ref() == i) {
                return Err(FormulaError::UndeclaredAgent(i.to_string()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::False => write!(f, "false"),
            Formula::Not(g) => write!(f, "~{g}"),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Believes(i, g) => write!(f, "B {i} {g}"),
            Formula::Announced(a, b) => write!(f, "[! {a}] {b}"),
        }
    }
}

/// Canonical text; `parse_formula(&print_formula(f), ..)` gives back `f`.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

/// Parses the concrete syntax, expanding derived connectives and checking
/// every identifier against the declared agents and atoms.
pub fn parse_formula<A, P>(text: &str, agents: &[A], atoms: &[P]) -> Result<Formula, FormulaError>
where
    A: AsRef<str>,
    P: AsRef<str>,
{
    let tokens = lex(text)?;
    let agent_names: Vec<&str> = agents.iter().map(|a| a.as_ref()).collect();
    let mut parser = Parser {
        tokens,
        pos: 0,
        agents: agent_names,
    };
    let f = parser.implication()?;
    match parser.peek() {
        (Tok::End, _) => {}
        (tok, pos) => {
            return Err(FormulaError::Syntax {
                pos,
                message: format!("unexpected {}", tok.describe()),
            })
        }
    }
    f.check_vocabulary(agents, atoms)?;
    Ok(f)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    AnnounceOpen,
    RBracket,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::AnnounceOpen => "`[!`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b']' => out.push((Tok::RBracket, start)),
            b'~' => out.push((Tok::Tilde, start)),
            b'&' => out.push((Tok::Amp, start)),
            b'|' => out.push((Tok::Pipe, start)),
            b'[' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_whitespace() {
                    j += 1;
                }
                if j >= bytes.len() || bytes[j] != b'!' {
                    return Err(FormulaError::Syntax {
                        pos: start,
                        message: "expected `!` after `[`".into(),
                    });
                }
                i = j;
                out.push((Tok::AnnounceOpen, start));
            }
            b'-' => {
                if bytes.get(i + 1) != Some(&b'>') {
                    return Err(FormulaError::Syntax {
                        pos: start,
                        message: "expected `->`".into(),
                    });
                }
                i += 1;
                out.push((Tok::Arrow, start));
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((Tok::Ident(text[i..j].to_string()), start));
                i = j;
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(FormulaError::Syntax {
                    pos: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    agents: Vec<&'a str>,
}

impl Parser<'_> {
    fn peek(&self) -> (Tok, usize) {
        self.tokens[self.pos].clone()
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormulaError> {
        let (tok, pos) = self.bump();
        if tok == want {
            Ok(())
        } else {
            Err(FormulaError::Syntax {
                pos,
                message: format!("expected {}, found {}", want.describe(), tok.describe()),
            })
        }
    }

    // right associative
    fn implication(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disjunction()?;
        if self.peek().0 == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.conjunction()?;
        while self.peek().0 == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            acc = acc.or(rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.unary()?;
        while self.peek().0 == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            acc = acc.and(rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let (tok, _) = self.peek();
        match tok {
            Tok::Tilde => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::AnnounceOpen => {
                self.bump();
                let announcement = self.implication()?;
                self.expect(Tok::RBracket)?;
                let body = self.unary()?;
                Ok(Formula::announced(announcement, body))
            }
            Tok::Ident(word) if word == "B" => {
                self.bump();
                let (agent_tok, agent_pos) = self.bump();
                let agent = match agent_tok {
                    Tok::Ident(a) if !RESERVED_WORDS.contains(&a.as_str()) => a,
                    other => {
                        return Err(FormulaError::Syntax {
                            pos: agent_pos,
                            message: format!("expected agent after `B`, found {}", other.describe()),
                        })
                    }
                };
                let body = self.unary()?;
                Ok(Formula::believes(agent, body))
            }
            Tok::Ident(word) if word == "E" => {
                self.bump();
                let body = self.unary()?;
                Ok(Formula::everybody(&self.agents, body))
            }
            Tok::Ident(word) if word == "Ehat" => {
                self.bump();
                let body = self.unary()?;
                Ok(Formula::everybody_dual(&self.agents, body))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, FormulaError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Ident(w) if w == "true" => Ok(Formula::top()),
            Tok::Ident(w) if w == "false" => Ok(Formula::False),
            Tok::Ident(w) => Ok(Formula::Atom(w)),
            Tok::LParen => {
                let inner = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(FormulaError::Syntax {
                pos,
                message: format!("expected a formula, found {}", other.describe()),
            }),
        }
    }
}
