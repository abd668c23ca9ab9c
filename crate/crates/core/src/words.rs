//! Trace words: `coeff · Re|Im tr(w₁ w₂ ⋯ w_m)` over a small matrix alphabet,
//! with cyclic differentiation and a plain-text expression grammar.
//!
//! The grammar is
//!
//! ```text
//! sum   := term ( ("+" | "-") term )*
//! term  := [number "*"] ("Re" | "Im") "tr" "(" word ")"
//! word  := letter ( ("*" | whitespace) letter )*
//! ```
//!
//! with letters `G`, `Ginv`, `J` on the phase space and `X`, `Y` on the double.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{c, project_su, trace, CMat, C64};

/// Which real part of the trace a word reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Re,
    Im,
}

impl Part {
    pub fn of(self, z: C64) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }

    /// Gradient (in su(n), for the inner product `−Re tr(XY)`) of
    /// `X ↦ part tr(X·A)`, scaled by `coeff`.
    pub(crate) fn gradient(self, a: &CMat, coeff: f64) -> CMat {
        // part tr(XA) = Re tr(XB) with B = A or −iA; gradient = π(−B)
        let b = match self {
            Part::Re => a.clone(),
            Part::Im => a * c(0.0, -1.0),
        };
        project_su(&(b * c(-coeff, 0.0)))
    }
}

/// An alphabet symbol. Every alphabet also admits constant matrices, which
/// are not expressible in the text grammar.
pub trait Letter: Clone + fmt::Debug + PartialEq {
    fn symbol(&self) -> Option<&'static str>;
    fn parse(token: &str) -> Option<Self>;
    fn fixed(m: Arc<CMat>) -> Self;
}

/// Letters of phase-space words: `g`, `g⁻¹`, `J`, or a constant matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseLetter {
    G,
    GInv,
    J,
    Fixed(Arc<CMat>),
}

impl Letter for PhaseLetter {
    fn symbol(&self) -> Option<&'static str> {
        match self {
            PhaseLetter::G => Some("G"),
            PhaseLetter::GInv => Some("Ginv"),
            PhaseLetter::J => Some("J"),
            PhaseLetter::Fixed(_) => None,
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token {
            "G" => Some(PhaseLetter::G),
            "Ginv" => Some(PhaseLetter::GInv),
            "J" => Some(PhaseLetter::J),
            _ => None,
        }
    }

    fn fixed(m: Arc<CMat>) -> Self {
        PhaseLetter::Fixed(m)
    }
}

/// Letters of words on the double `su(n) × su(n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum DoubleLetter {
    X,
    Y,
    Fixed(Arc<CMat>),
}

impl Letter for DoubleLetter {
    fn symbol(&self) -> Option<&'static str> {
        match self {
            DoubleLetter::X => Some("X"),
            DoubleLetter::Y => Some("Y"),
            DoubleLetter::Fixed(_) => None,
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token {
            "X" => Some(DoubleLetter::X),
            "Y" => Some(DoubleLetter::Y),
            _ => None,
        }
    }

    fn fixed(m: Arc<CMat>) -> Self {
        DoubleLetter::Fixed(m)
    }
}

/// One term `coeff · part tr(letters)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Word<L> {
    letters: Vec<L>,
    part: Part,
    coeff: f64,
}

impl<L: Letter> Word<L> {
    pub fn new(letters: Vec<L>, part: Part, coeff: f64) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Domain("trace word needs at least one letter".into()));
        }
        if !coeff.is_finite() {
            return Err(Error::Domain("trace word coefficient must be finite".into()));
        }
        Ok(Self { letters, part, coeff })
    }

    pub fn letters(&self) -> &[L] {
        &self.letters
    }

    pub fn part(&self) -> Part {
        self.part
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { letters: self.letters.clone(), part: self.part, coeff: self.coeff * factor }
    }

    /// Value of the term, given a resolver mapping letters to matrices.
    pub fn eval_with<'a>(&'a self, resolve: impl Fn(&'a L) -> &'a CMat) -> f64 {
        let mut prod = resolve(&self.letters[0]).clone();
        for l in &self.letters[1..] {
            prod *= resolve(l);
        }
        self.coeff * self.part.of(trace(&prod))
    }

    /// Cyclic expansion: the trace together with, for every position i, the
    /// product of the remaining letters read cyclically from i+1, so that
    /// `d tr(w) = Σ_i tr(δw_i · rest_i)`.
    pub fn expand_with<'a>(&'a self, resolve: impl Fn(&'a L) -> &'a CMat) -> CyclicExpansion {
        let mats: Vec<&CMat> = self.letters.iter().map(resolve).collect();
        let m = mats.len();
        let n = mats[0].nrows();
        let id = CMat::identity(n, n);
        // prefix[k] = w_0 ⋯ w_{k-1}, suffix[k] = w_k ⋯ w_{m-1}
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(id.clone());
        for k in 0..m {
            let next = &prefix[k] * mats[k];
            prefix.push(next);
        }
        let mut suffix = vec![id; m + 1];
        for k in (0..m).rev() {
            suffix[k] = mats[k] * &suffix[k + 1];
        }
        let rests = (0..m).map(|i| &suffix[i + 1] * &prefix[i]).collect();
        CyclicExpansion { trace: trace(&prefix[m]), rests }
    }
}

pub struct CyclicExpansion {
    pub trace: C64,
    pub rests: Vec<CMat>,
}

/// A finite sum of trace words.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSum<L> {
    terms: Vec<Word<L>>,
}

impl<L: Letter> Default for TraceSum<L> {
    fn default() -> Self {
        Self { terms: Vec::new() }
    }
}

impl<L: Letter> TraceSum<L> {
    pub fn new(terms: Vec<Word<L>>) -> Self {
        Self { terms }
    }

    pub fn single(word: Word<L>) -> Self {
        Self { terms: vec![word] }
    }

    pub fn terms(&self) -> &[Word<L>] {
        &self.terms
    }

    pub fn plus(mut self, other: &Self) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { terms: self.terms.iter().map(|w| w.scaled(factor)).collect() }
    }

    /// Linear function `⟨A, ·⟩ = −Re tr(A · letter)` of a single letter.
    pub fn linear(a: &CMat, letter: L) -> Self {
        let w = Word { letters: vec![L::fixed(Arc::new(a.clone())), letter], part: Part::Re, coeff: -1.0 };
        Self::single(w)
    }

    /// True when every letter has a textual symbol.
    pub fn is_textual(&self) -> bool {
        self.terms.iter().all(|w| w.letters.iter().all(|l| l.symbol().is_some()))
    }

    /// Render in the text grammar; fails on constant-matrix letters.
    pub fn to_expr(&self) -> Result<String> {
        if self.terms.is_empty() {
            return Err(Error::Parse("empty sum has no text form".into()));
        }
        let mut out = String::new();
        for (i, w) in self.terms.iter().enumerate() {
            let mut letters = Vec::with_capacity(w.letters.len());
            for l in &w.letters {
                letters.push(l.symbol().ok_or_else(|| {
                    Error::Parse("constant matrices have no text form".into())
                })?);
            }
            if i > 0 {
                out.push_str(" + ");
            }
            let part = match w.part {
                Part::Re => "Re",
                Part::Im => "Im",
            };
            out.push_str(&format!("{:?} * {} tr({})", w.coeff, part, letters.join("*")));
        }
        Ok(out)
    }

    pub fn parse(src: &str) -> Result<Self> {
        Parser::new(src).sum()
    }
}

impl<L: Letter> std::str::FromStr for TraceSum<L> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            _ if ch.is_whitespace() => i += 1,
            '*' | '·' => {
                out.push(Token::Star);
                i += 1;
            }
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            _ if ch.is_ascii_digit() || ch == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut k = i + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        i = k;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {text:?}")))?;
                out.push(Token::Num(v));
            }
            _ if ch.is_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_alphanumeric() {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            _ => return Err(Error::Parse(format!("unexpected character {ch:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'s> {
    src: &'s str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'s> Parser<'s> {
    fn new(src: &'s str) -> Self {
        Self { src, tokens: Vec::new(), pos: 0 }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token) -> Result<()> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(Error::Parse(format!("expected {want:?}, found {other:?} in {:?}", self.src))),
        }
    }

    fn sum<L: Letter>(mut self) -> Result<TraceSum<L>> {
        self.tokens = tokenize(self.src)?;
        let mut terms = vec![self.term(1.0)?];
        while let Some(tok) = self.next() {
            let sign = match tok {
                Token::Plus => 1.0,
                Token::Minus => -1.0,
                other => return Err(Error::Parse(format!("expected + or -, found {other:?}"))),
            };
            terms.push(self.term(sign)?);
        }
        Ok(TraceSum { terms })
    }

    fn term<L: Letter>(&mut self, mut sign: f64) -> Result<Word<L>> {
        while let Some(Token::Minus) | Some(Token::Plus) = self.peek() {
            if self.next() == Some(Token::Minus) {
                sign = -sign;
            }
        }
        let mut coeff = 1.0;
        if let Some(Token::Num(v)) = self.peek().cloned() {
            self.pos += 1;
            coeff = v;
            self.expect(Token::Star)?;
        }
        let part = match self.next() {
            Some(Token::Ident(s)) if s == "Re" => Part::Re,
            Some(Token::Ident(s)) if s == "Im" => Part::Im,
            other => return Err(Error::Parse(format!("expected Re or Im, found {other:?}"))),
        };
        match self.next() {
            Some(Token::Ident(s)) if s == "tr" => {}
            other => return Err(Error::Parse(format!("expected tr, found {other:?}"))),
        }
        self.expect(Token::LParen)?;
        let mut letters = Vec::new();
        loop {
            match self.next() {
                Some(Token::Ident(s)) => {
                    letters.push(L::parse(&s).ok_or_else(|| Error::Parse(format!("unknown letter {s:?}")))?)
                }
                Some(Token::Star) if !letters.is_empty() => continue,
                Some(Token::RParen) if !letters.is_empty() => break,
                other => return Err(Error::Parse(format!("malformed word near {other:?}"))),
            }
        }
        Word::new(letters, part, sign * coeff).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `Re tr(M)` and friends for the Casimir generators: the pair (part, sign)
/// with `Re[i^k z] = sign · part(z)`.
pub fn i_power_part(k: usize) -> (Part, f64) {
    match k % 4 {
        0 => (Part::Re, 1.0),
        1 => (Part::Im, -1.0),
        2 => (Part::Re, -1.0),
        _ => (Part::Im, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type PhaseSum = TraceSum<PhaseLetter>;

    #[test]
    fn parses_and_renders() {
        let f: PhaseSum = "2 * Re tr(G*J) + -0.5 * Im tr(Ginv J J) - Re tr(J)".parse().unwrap();
        assert_eq!(f.terms().len(), 3);
        assert_eq!(f.terms()[0].coeff(), 2.0);
        assert_eq!(f.terms()[1].coeff(), -0.5);
        assert_eq!(f.terms()[1].part(), Part::Im);
        assert_eq!(f.terms()[2].coeff(), -1.0);
        assert_eq!(
            f.terms()[1].letters(),
            &[PhaseLetter::GInv, PhaseLetter::J, PhaseLetter::J]
        );
        let text = f.to_expr().unwrap();
        let again: PhaseSum = text.parse().unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn exponent_coefficients_survive() {
        let f: PhaseSum = "1e+2 * Re tr(J) + 2.5E-3 * Im tr(G)".parse().unwrap();
        assert_eq!(f.terms()[0].coeff(), 100.0);
        assert_eq!(f.terms()[1].coeff(), 2.5e-3);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "Re tr()", "Re tr(Q)", "2 Re tr(J)", "Re tr(J", "Re(J)", "Re tr(J) +"] {
            assert!(PhaseSum::parse(bad).is_err(), "{bad:?} should fail");
        }
        assert!(TraceSum::<DoubleLetter>::parse("Re tr(G)").is_err());
    }

    #[test]
    fn constants_have_no_text_form() {
        let a = CMat::identity(2, 2);
        let f = PhaseSum::linear(&a, PhaseLetter::J);
        assert!(!f.is_textual());
        assert!(f.to_expr().is_err());
    }

    #[test]
    fn empty_word_is_rejected() {
        assert!(Word::<PhaseLetter>::new(vec![], Part::Re, 1.0).is_err());
        assert!(Word::new(vec![PhaseLetter::J], Part::Re, f64::NAN).is_err());
    }

    #[test]
    fn i_power_convention() {
        let z = c(0.3, -1.7);
        for k in 0..8 {
            let (part, sign) = i_power_part(k);
            let direct = (c(0.0, 1.0).powu(k as u32) * z).re;
            assert!((sign * part.of(z) - direct).abs() < 1e-15);
        }
    }
}
