//! Formulas of EL, PAL, APAL, GAL and CAL.
//!
//! Diamonds and `K̂` are not constructors: the parser and the smart
//! constructors desugar them into boxes and negation, so every checker and
//! analysis only has one clause per operator.
//!
//! Children are reference counted, so generated formulas may share
//! subterms. Analyses that walk the tree memoise by node address and stay
//! linear in the size of the shared graph.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kripke::{AgentId, PropId};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Atom(PropId),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Know(AgentId, Arc<Formula>),
    /// `[ψ]φ`
    AnnBox(Arc<Formula>, Arc<Formula>),
    /// `[!]φ`: after every announcement.
    ApalBox(Arc<Formula>),
    /// `[G]φ`: after every announcement of group `G`.
    GalBox(BTreeSet<AgentId>, Arc<Formula>),
    /// `[⟨G⟩]φ`: whatever `G` announces, the others can respond to keep `φ`.
    CalBox(BTreeSet<AgentId>, Arc<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {line}:{column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown operator `{name}` at {line}:{column}")]
    UnknownOperator {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("formula contains announcements or quantifiers")]
    NotEpistemic,
}

fn group<I, A>(agents: I) -> BTreeSet<AgentId>
where
    I: IntoIterator<Item = A>,
    A: Into<AgentId>,
{
    agents.into_iter().map(Into::into).collect()
}

impl Formula {
    pub fn atom(p: impl Into<PropId>) -> Formula {
        Formula::Atom(p.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn know(a: impl Into<AgentId>, f: Formula) -> Formula {
        Formula::Know(a.into(), Arc::new(f))
    }

    /// `K̂_a φ = ¬K_a¬φ`
    pub fn poss(a: impl Into<AgentId>, f: Formula) -> Formula {
        Formula::not(Formula::know(a, Formula::not(f)))
    }

    pub fn ann(psi: Formula, phi: Formula) -> Formula {
        Formula::AnnBox(Arc::new(psi), Arc::new(phi))
    }

    /// `⟨ψ⟩φ = ¬[ψ]¬φ`
    pub fn ann_dia(psi: Formula, phi: Formula) -> Formula {
        Formula::not(Formula::ann(psi, Formula::not(phi)))
    }

    pub fn apal(f: Formula) -> Formula {
        Formula::ApalBox(Arc::new(f))
    }

    pub fn apal_dia(f: Formula) -> Formula {
        Formula::not(Formula::apal(Formula::not(f)))
    }

    pub fn gal<I, A>(agents: I, f: Formula) -> Formula
    where
        I: IntoIterator<Item = A>,
        A: Into<AgentId>,
    {
        Formula::GalBox(group(agents), Arc::new(f))
    }

    pub fn gal_dia<I, A>(agents: I, f: Formula) -> Formula
    where
        I: IntoIterator<Item = A>,
        A: Into<AgentId>,
    {
        Formula::not(Formula::gal(agents, Formula::not(f)))
    }

    pub fn cal<I, A>(agents: I, f: Formula) -> Formula
    where
        I: IntoIterator<Item = A>,
        A: Into<AgentId>,
    {
        Formula::CalBox(group(agents), Arc::new(f))
    }

    pub fn cal_dia<I, A>(agents: I, f: Formula) -> Formula
    where
        I: IntoIterator<Item = A>,
        A: Into<AgentId>,
    {
        Formula::not(Formula::cal(agents, Formula::not(f)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    /// Left-folded conjunction; the empty conjunction is `Top`.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-folded disjunction; the empty disjunction is `Bottom`.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    /// Applies `K_{a1} K_{a2} … φ` with `agents[0]` outermost.
    pub fn know_chain(agents: &[&str], f: Formula) -> Formula {
        agents
            .iter()
            .rev()
            .fold(f, |acc, a| Formula::know(*a, acc))
    }

    pub fn parse(text: &str) -> Result<Formula, FormulaError> {
        Parser::new(text)?.parse_all()
    }

    /// Maximum nesting of `K`. Only defined for pure epistemic formulas.
    pub fn modal_depth(&self) -> Result<usize, FormulaError> {
        fn go(f: &Formula, memo: &mut HashMap<*const Formula, usize>) -> Result<usize, FormulaError> {
            let key = f as *const Formula;
            if let Some(&d) = memo.get(&key) {
                return Ok(d);
            }
            let d = match f {
                Formula::Top | Formula::Bottom | Formula::Atom(_) => 0,
                Formula::Not(a) => go(a, memo)?,
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => go(a, memo)?.max(go(b, memo)?),
                Formula::Know(_, a) => 1 + go(a, memo)?,
                _ => return Err(FormulaError::NotEpistemic),
            };
            memo.insert(key, d);
            Ok(d)
        }
        go(self, &mut HashMap::new())
    }

    /// True iff the formula has no announcement or quantifier constructors.
    pub fn is_el(&self) -> bool {
        self.modal_depth().is_ok()
    }

    /// True iff the formula is `⋀_{a∈G} K_a φ_a` with one conjunct per agent
    /// of `G` and every `φ_a` epistemic. The empty group admits only `Top`.
    pub fn is_el_group(&self, g: &BTreeSet<AgentId>) -> bool {
        let mut conjuncts = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::And(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                other => conjuncts.push(other),
            }
        }
        if g.is_empty() {
            return conjuncts == [&Formula::Top];
        }
        let mut seen = BTreeSet::new();
        for c in conjuncts {
            match c {
                Formula::Know(a, body) if g.contains(a) && body.is_el() => {
                    if !seen.insert(a.clone()) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        seen.len() == g.len()
    }

    pub fn atoms_of(&self) -> BTreeSet<PropId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Agents named by `K` or by a group operator.
    pub fn agents_of(&self) -> BTreeSet<AgentId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Know(a, _) => {
                out.insert(a.clone());
            }
            Formula::GalBox(g, _) | Formula::CalBox(g, _) => out.extend(g.iter().cloned()),
            _ => {}
        });
        out
    }

    /// Calls `f` once per distinct node of the shared graph.
    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if !seen.insert(node as *const Formula) {
                continue;
            }
            f(node);
            match node {
                Formula::Top | Formula::Bottom | Formula::Atom(_) => {}
                Formula::Not(a) | Formula::Know(_, a) | Formula::ApalBox(a) => stack.push(a),
                Formula::GalBox(_, a) | Formula::CalBox(_, a) => stack.push(a),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::AnnBox(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
    }

    /// Number of nodes when the tree is fully unshared.
    pub fn tree_size(&self) -> u128 {
        fn go(f: &Formula, memo: &mut HashMap<*const Formula, u128>) -> u128 {
            let key = f as *const Formula;
            if let Some(&n) = memo.get(&key) {
                return n;
            }
            let n = 1 + match f {
                Formula::Top | Formula::Bottom | Formula::Atom(_) => 0,
                Formula::Not(a) | Formula::Know(_, a) | Formula::ApalBox(a) => go(a, memo),
                Formula::GalBox(_, a) | Formula::CalBox(_, a) => go(a, memo),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::AnnBox(a, b) => {
                    go(a, memo).saturating_add(go(b, memo))
                }
            };
            memo.insert(key, n);
            n
        }
        go(self, &mut HashMap::new())
    }
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formula::parse(s)
    }
}

// ---------------------------------------------------------------------------
// Printer

const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn write_group(out: &mut String, g: &BTreeSet<AgentId>) {
    out.push('{');
    for (i, a) in g.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(a.as_str());
    }
    out.push('}');
}

fn print_into(f: &Formula, ctx: u8, out: &mut String) {
    let (own, _) = match f {
        Formula::Imp(..) => (PREC_IMP, ()),
        Formula::Or(..) => (PREC_OR, ()),
        Formula::And(..) => (PREC_AND, ()),
        _ => (PREC_UNARY, ()),
    };
    let wrap = own < ctx;
    if wrap {
        out.push('(');
    }
    match f {
        Formula::Top => out.push_str("true"),
        Formula::Bottom => out.push_str("false"),
        Formula::Atom(p) => out.push_str(p.as_str()),
        Formula::Not(a) => {
            out.push('~');
            print_into(a, PREC_UNARY, out);
        }
        Formula::And(a, b) => {
            print_into(a, PREC_AND, out);
            out.push_str(" & ");
            print_into(b, PREC_UNARY, out);
        }
        Formula::Or(a, b) => {
            print_into(a, PREC_OR, out);
            out.push_str(" | ");
            print_into(b, PREC_AND, out);
        }
        Formula::Imp(a, b) => {
            print_into(a, PREC_OR, out);
            out.push_str(" -> ");
            print_into(b, PREC_IMP, out);
        }
        Formula::Know(a, body) => {
            out.push_str("K ");
            out.push_str(a.as_str());
            out.push(' ');
            print_into(body, PREC_UNARY, out);
        }
        Formula::AnnBox(psi, phi) => {
            out.push('[');
            print_into(psi, 0, out);
            out.push_str("] ");
            print_into(phi, PREC_UNARY, out);
        }
        Formula::ApalBox(phi) => {
            out.push_str("[!] ");
            print_into(phi, PREC_UNARY, out);
        }
        Formula::GalBox(g, phi) => {
            out.push_str("[G");
            write_group(out, g);
            out.push_str("] ");
            print_into(phi, PREC_UNARY, out);
        }
        Formula::CalBox(g, phi) => {
            out.push_str("[C");
            write_group(out, g);
            out.push_str("] ");
            print_into(phi, PREC_UNARY, out);
        }
    }
    if wrap {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        print_into(self, 0, &mut out);
        f.write_str(&out)
    }
}

// ---------------------------------------------------------------------------
// Lexer and parser

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    BoxAll,
    DiaAll,
    LBrace,
    RBrace,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Tilde => "`~`",
            Tok::Amp => "`&`",
            Tok::Bar => "`|`",
            Tok::Arrow => "`->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::BoxAll => "`[!]`",
            Tok::DiaAll => "`<!>`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const KEYWORDS: [&str; 4] = ["K", "Kh", "true", "false"];

fn lex(text: &str) -> Result<Vec<Token>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let rest = &chars[i..];
        let (tok, len) = if rest.starts_with(&['[', '!', ']']) {
            (Tok::BoxAll, 3)
        } else if rest.starts_with(&['<', '!', '>']) {
            (Tok::DiaAll, 3)
        } else if rest.starts_with(&['-', '>']) {
            (Tok::Arrow, 2)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .iter()
                .take_while(|ch| ch.is_ascii_alphanumeric() || **ch == '_')
                .count();
            (Tok::Ident(rest[..len].iter().collect()), len)
        } else {
            let tok = match c {
                '~' => Tok::Tilde,
                '&' => Tok::Amp,
                '|' => Tok::Bar,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                other => {
                    return Err(FormulaError::SyntaxError {
                        line: l0,
                        column: c0,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            (tok, 1)
        };
        out.push(Token {
            tok,
            line: l0,
            column: c0,
        });
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, FormulaError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> FormulaError {
        let t = &self.toks[self.pos];
        FormulaError::SyntaxError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn parse_all(mut self) -> Result<Formula, FormulaError> {
        let f = self.formula()?;
        if *self.peek() != Tok::Eof {
            return Err(self.error(format!("unexpected {}", self.peek())));
        }
        Ok(f)
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn ident(&mut self, what: &str) -> Result<String, FormulaError> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                Ok(name)
            }
            other => Err(self.error(format!("expected {what}, found {other}"))),
        }
    }

    fn group(&mut self) -> Result<BTreeSet<AgentId>, FormulaError> {
        self.expect(Tok::LBrace)?;
        let mut g = BTreeSet::new();
        if *self.peek() != Tok::RBrace {
            loop {
                g.insert(AgentId::new(self.ident("agent name")?));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(g)
    }

    /// After an opening `[` or `<`: a group operator is `G{` or `C{`; any
    /// other identifier directly followed by `{` is an unknown operator.
    fn group_operator(&mut self) -> Result<Option<(char, BTreeSet<AgentId>)>, FormulaError> {
        if let (Tok::Ident(name), Tok::LBrace) = (self.peek().clone(), self.peek_at(1)) {
            let t = self.toks[self.pos].clone();
            let kind = match name.as_str() {
                "G" => 'G',
                "C" => 'C',
                _ => {
                    return Err(FormulaError::UnknownOperator {
                        line: t.line,
                        column: t.column,
                        name,
                    })
                }
            };
            self.bump();
            return Ok(Some((kind, self.group()?)));
        }
        Ok(None)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::BoxAll => {
                self.bump();
                Ok(Formula::apal(self.unary()?))
            }
            Tok::DiaAll => {
                self.bump();
                Ok(Formula::apal_dia(self.unary()?))
            }
            Tok::LBrack => {
                self.bump();
                if let Some((kind, g)) = self.group_operator()? {
                    self.expect(Tok::RBrack)?;
                    let body = self.unary()?;
                    return Ok(match kind {
                        'G' => Formula::GalBox(g, Arc::new(body)),
                        _ => Formula::CalBox(g, Arc::new(body)),
                    });
                }
                let psi = self.formula()?;
                self.expect(Tok::RBrack)?;
                Ok(Formula::ann(psi, self.unary()?))
            }
            Tok::Lt => {
                self.bump();
                if let Some((kind, g)) = self.group_operator()? {
                    self.expect(Tok::Gt)?;
                    let body = self.unary()?;
                    return Ok(match kind {
                        'G' => Formula::gal_dia(g, body),
                        _ => Formula::cal_dia(g, body),
                    });
                }
                let psi = self.formula()?;
                self.expect(Tok::Gt)?;
                Ok(Formula::ann_dia(psi, self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => match name.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::Top)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::Bottom)
                }
                "K" | "Kh" => {
                    self.bump();
                    let a = self.ident("agent name")?;
                    let body = self.unary()?;
                    Ok(if name == "K" {
                        Formula::know(a, body)
                    } else {
                        Formula::poss(a, body)
                    })
                }
                _ => {
                    self.bump();
                    Ok(Formula::atom(name))
                }
            },
            other => Err(self.error(format!("expected a formula, found {other}"))),
        }
    }
}
