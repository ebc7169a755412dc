//! Text format for σπ-ODEs (`.spode`) and frames (`.frame`).
//!
//! ```text
//! # comment
//! x1' = x2^(1/3)*x3 + poly(0,2)*x2*x1^(-0.2)
//! x2' = 6*x1*x2^5*x3
//! x3' = 3*x1^(-8)*x2 + 4 + x3^(1/2) - 1.5*x1*x3
//! ```
//!
//! Indices are 1-based. A coefficient is a number, an exact polynomial
//! `poly(c0,c1,...)` in `t`, or a truncated series `jet(c0,c1,...)`; both
//! accept an expansion point as `poly@2.5(...)`. A right-hand side of `0` is
//! the zero equation, while `poly(0)` is a single vanishing constant term.
//! Exponents written as `(p/q)` or integers are exact; decimal exponents are
//! treated as irrational when classifying the domain.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::frame::{FrameError, QuadraticFrame};
use crate::jet::TimeJet;
use crate::monomial::{Exponent, Monomial};
use crate::ode::{SigmaPiOde, Term};

/// Location of a problem in the input. `line` and `column` are 1-based,
/// `start..end` are byte offsets into the full text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{span}: {message}")]
    Syntax { message: String, span: SourceSpan },
    #[error("{span}: equation for x{index} given twice")]
    DuplicateEquation { index: usize, span: SourceSpan },
    #[error("{span}: exponent has a zero denominator")]
    BadExponent { span: SourceSpan },
    #[error("{span}: frame row {} has {found} entries, expected {expected}", row + 1)]
    NonSquare { row: usize, expected: usize, found: usize, span: SourceSpan },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::DuplicateEquation { span, .. }
            | ParseError::BadExponent { span }
            | ParseError::NonSquare { span, .. } => *span,
        }
    }
}

/// Byte-level cursor over one logical line of the input.
struct Cursor<'a> {
    text: &'a str,
    line_start: usize,
    line_no: usize,
    pos: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line_start: usize, line_no: usize, end: usize) -> Self {
        Self { text, line_start, line_no, pos: line_start, end }
    }

    fn span(&self, start: usize, end: usize) -> SourceSpan {
        let end = end.max(start).min(self.text.len());
        let column = self.text[self.line_start..start.min(self.text.len())].chars().count() + 1;
        SourceSpan { line: self.line_no, column, start, end }
    }

    fn error(&self, start: usize, message: impl Into<String>) -> ParseError {
        let end = if start < self.end { start + self.peek_len() } else { start };
        ParseError::Syntax { message: message.into(), span: self.span(start, end) }
    }

    fn peek_len(&self) -> usize {
        self.text[self.pos.min(self.end)..self.end].chars().next().map_or(0, char::len_utf8)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.end && matches!(self.bytes()[self.pos], b' ' | b'\t' | b'\r') {
            self.pos += 1;
        }
    }

    fn bytes(&self) -> &'a [u8] {
        self.text.as_bytes()
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        (self.pos < self.end).then(|| self.bytes()[self.pos])
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            let found = self.describe_here();
            Err(self.error(self.pos, format!("expected '{}', found {found}", b as char)))
        }
    }

    fn describe_here(&mut self) -> String {
        match self.peek() {
            None => "end of line".into(),
            Some(_) => {
                let c = self.text[self.pos..].chars().next().unwrap();
                format!("'{c}'")
            }
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..self.end].starts_with(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    /// Unsigned decimal literal, optionally with a fraction and exponent.
    fn unsigned_number(&mut self) -> Result<(f64, bool), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let b = self.bytes();
        let mut i = self.pos;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < self.end && b[*i].is_ascii_digit() {
                *i += 1;
            }
            *i > s
        };
        let int_part = digits(&mut i);
        let mut integral = true;
        let mut frac_part = false;
        if i < self.end && b[i] == b'.' {
            i += 1;
            integral = false;
            frac_part = digits(&mut i);
        }
        if !int_part && !frac_part {
            return Err(self.error(start, "expected a number"));
        }
        if i < self.end && matches!(b[i], b'e' | b'E') {
            let mut j = i + 1;
            if j < self.end && matches!(b[j], b'+' | b'-') {
                j += 1;
            }
            if digits(&mut j) {
                i = j;
                integral = false;
            }
        }
        self.pos = i;
        let value: f64 = self.text[start..i].parse().map_err(|_| self.error(start, "malformed number"))?;
        if !value.is_finite() {
            return Err(ParseError::Syntax { message: "number out of range".into(), span: self.span(start, i) });
        }
        Ok((value, integral))
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let (v, _) = self.unsigned_number()?;
        Ok(if negative { -v } else { v })
    }

    /// 1-based index following `x`, returned 0-based.
    fn index(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let b = self.bytes();
        let mut i = self.pos;
        while i < self.end && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == start {
            return Err(self.error(start, "expected an index after 'x'"));
        }
        self.pos = i;
        match self.text[start..i].parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(ParseError::Syntax { message: "indices start at 1".into(), span: self.span(start, i) }),
        }
    }
}

/// `NUMBER`, `poly[@c](...)`, `jet[@c](...)`, optionally preceded by `-`
/// inside frames.
fn coefficient(cur: &mut Cursor) -> Result<TimeJet, ParseError> {
    let start = {
        cur.skip_ws();
        cur.pos
    };
    let exact = if cur.eat_keyword("poly") {
        Some(true)
    } else if cur.eat_keyword("jet") {
        Some(false)
    } else {
        None
    };
    let Some(exact) = exact else {
        let (v, _) = cur.unsigned_number()?;
        return Ok(TimeJet::constant(v));
    };
    let center = if cur.eat(b'@') { cur.signed_number()? } else { 0.0 };
    cur.expect(b'(')?;
    let mut coeffs = vec![cur.signed_number()?];
    while cur.eat(b',') {
        coeffs.push(cur.signed_number()?);
    }
    cur.expect(b')')?;
    if !center.is_finite() {
        return Err(cur.error(start, "expansion point must be finite"));
    }
    Ok(if exact { TimeJet::poly(center, coeffs) } else { TimeJet::truncated(center, coeffs) })
}

fn exponent(cur: &mut Cursor) -> Result<Exponent, ParseError> {
    cur.skip_ws();
    let start = cur.pos;
    let parenthesized = cur.eat(b'(');
    let negative = if cur.eat(b'-') {
        true
    } else {
        cur.eat(b'+');
        false
    };
    let (num, num_int) = cur.unsigned_number()?;
    let mut p = if parenthesized && cur.eat(b'/') {
        let den_start = cur.pos;
        let (den, den_int) = cur.unsigned_number()?;
        if den == 0.0 {
            return Err(ParseError::BadExponent { span: cur.span(start, cur.pos) });
        }
        let small = |v: f64| v.abs() < 9.0e15;
        if num_int && den_int && small(num) && small(den) {
            Exponent::rational(num as i64, den as i64).expect("nonzero denominator")
        } else if den.is_finite() {
            Exponent::real(num / den)
        } else {
            return Err(cur.error(den_start, "malformed denominator"));
        }
    } else {
        Exponent::real(num)
    };
    if negative {
        p = -p;
    }
    if parenthesized {
        cur.expect(b')')?;
    }
    Ok(p)
}

fn factor(cur: &mut Cursor, m: Monomial, max_index: &mut usize) -> Result<Monomial, ParseError> {
    cur.expect(b'x')?;
    let j = cur.index()?;
    *max_index = (*max_index).max(j + 1);
    let p = if cur.eat(b'^') { exponent(cur)? } else { Exponent::ONE };
    Ok(m.with(j, p))
}

fn term(cur: &mut Cursor, negative: bool, max_index: &mut usize) -> Result<Term, ParseError> {
    let mut coeff = TimeJet::constant(1.0);
    let mut monomial = Monomial::one();
    if cur.peek() == Some(b'x') {
        monomial = factor(cur, monomial, max_index)?;
    } else {
        coeff = coefficient(cur)?;
    }
    while cur.eat(b'*') {
        monomial = factor(cur, monomial, max_index)?;
    }
    if negative {
        coeff = coeff.scale(-1.0);
    }
    Ok(Term::new(coeff, monomial))
}

/// Equation body after `=`. Returns `None` for the literal zero equation.
fn rhs(cur: &mut Cursor, max_index: &mut usize) -> Result<Vec<Term>, ParseError> {
    let body_start = {
        cur.skip_ws();
        cur.pos
    };
    let body = cur.text[body_start..cur.end].trim_end();
    if body == "0" {
        cur.pos = cur.end;
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut negative = if cur.eat(b'-') {
        true
    } else {
        cur.eat(b'+');
        false
    };
    loop {
        terms.push(term(cur, negative, max_index)?);
        if cur.eat(b'+') {
            negative = false;
        } else if cur.eat(b'-') {
            negative = true;
        } else if cur.at_end() {
            return Ok(terms);
        } else {
            let found = cur.describe_here();
            return Err(cur.error(cur.pos, format!("expected '+', '-', '*' or end of line, found {found}")));
        }
    }
}

/// Logical lines with comments stripped: `(line_no, start, end)`.
fn lines(text: &str) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
    let mut offset = 0;
    text.split('\n').enumerate().filter_map(move |(k, line)| {
        let start = offset;
        offset += line.len() + 1;
        let content = line.find('#').map_or(line, |c| &line[..c]);
        (!content.trim().is_empty()).then_some((k + 1, start, start + content.len()))
    })
}

pub fn parse_ode(text: &str) -> Result<SigmaPiOde, ParseError> {
    let mut equations: Vec<Option<Vec<Term>>> = Vec::new();
    let mut max_index = 0;
    for (line_no, start, end) in lines(text) {
        let mut cur = Cursor::new(text, start, line_no, end);
        cur.skip_ws();
        let lhs_start = cur.pos;
        cur.expect(b'x')?;
        let i = cur.index()?;
        let lhs_span = cur.span(lhs_start, cur.pos);
        cur.expect(b'\'')?;
        cur.expect(b'=')?;
        let eq = rhs(&mut cur, &mut max_index)?;
        if equations.len() <= i {
            equations.resize(i + 1, None);
        }
        if equations[i].is_some() {
            return Err(ParseError::DuplicateEquation { index: i + 1, span: lhs_span });
        }
        equations[i] = Some(eq);
    }
    if equations.is_empty() {
        let span = SourceSpan { line: 1, column: 1, start: 0, end: 0 };
        return Err(ParseError::Syntax { message: "no equations".into(), span });
    }
    let n = equations.len().max(max_index);
    equations.resize(n, None);
    let equations = equations.into_iter().map(Option::unwrap_or_default).collect();
    Ok(SigmaPiOde::new(n, equations).expect("indices bounded by the largest one seen"))
}

pub fn parse_frame(text: &str) -> Result<QuadraticFrame, ParseError> {
    let mut rows = Vec::new();
    let mut row_spans = Vec::new();
    for (line_no, start, end) in lines(text) {
        let mut cur = Cursor::new(text, start, line_no, end);
        let mut row = Vec::new();
        while !cur.at_end() {
            let negative = cur.eat(b'-');
            let jet = coefficient(&mut cur)?;
            row.push(if negative { jet.scale(-1.0) } else { jet });
            cur.eat(b',');
        }
        row_spans.push(cur.span(start, end));
        rows.push(row);
    }
    QuadraticFrame::from_rows(rows).map_err(|e| match e {
        FrameError::NonSquare { row, expected, found } => {
            ParseError::NonSquare { row, expected, found, span: row_spans[row] }
        }
        FrameError::Empty => ParseError::Syntax {
            message: "empty frame".into(),
            span: SourceSpan { line: 1, column: 1, start: 0, end: 0 },
        },
    })
}

/// Shortest decimal that parses back to the same `f64`; integers without a
/// fractional part.
pub fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        if v == 0.0 && v.is_sign_negative() {
            return "-0".into();
        }
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

fn format_exponent(p: Exponent) -> String {
    match p.ratio() {
        Some((1, 1)) => String::new(),
        Some((n, 1)) if n > 0 => format!("^{n}"),
        Some((n, 1)) => format!("^({n})"),
        Some((n, d)) => format!("^({n}/{d})"),
        None if p.value() > 0.0 => format!("^{}", format_number(p.value())),
        None => format!("^({})", format_number(p.value())),
    }
}

/// `x1^2*x3^(-1/2)`; `1` for the constant monomial.
pub fn format_monomial(m: &Monomial) -> String {
    if m.is_one() {
        return "1".into();
    }
    m.iter().map(|(j, p)| format!("x{}{}", j + 1, format_exponent(p))).collect::<Vec<_>>().join("*")
}

pub fn format_jet(jet: &TimeJet) -> String {
    if jet.is_exact() && jet.center() == 0.0 && jet.order() == 0 {
        return format_number(jet.coeffs()[0]);
    }
    let head = if jet.is_exact() { "poly" } else { "jet" };
    let center = if jet.center() == 0.0 { String::new() } else { format!("@{}", format_number(jet.center())) };
    let coeffs: Vec<String> = jet.coeffs().iter().map(|&c| format_number(c)).collect();
    format!("{head}{center}({})", coeffs.join(","))
}

fn format_term(term: &Term, first: bool, out: &mut String) {
    let plain = term.coeff.is_exact() && term.coeff.center() == 0.0 && term.coeff.order() == 0;
    let c = term.coeff.coeffs()[0];
    let negative = plain && c.is_sign_negative();
    if !first {
        out.push_str(if negative { " - " } else { " + " });
    } else if negative {
        out.push('-');
    }
    let magnitude = if negative { -c } else { c };
    if term.monomial.is_one() {
        out.push_str(&if plain { format_number(magnitude) } else { format_jet(&term.coeff) });
        return;
    }
    if !plain {
        out.push_str(&format_jet(&term.coeff));
        out.push('*');
    } else if magnitude != 1.0 {
        out.push_str(&format_number(magnitude));
        out.push('*');
    }
    out.push_str(&format_monomial(&term.monomial));
}

/// Canonical text; `parse_ode(serialize_ode(ode)) == ode`.
pub fn serialize_ode(ode: &SigmaPiOde) -> String {
    let mut out = String::new();
    for (i, eq) in ode.equations().iter().enumerate() {
        out.push_str(&format!("x{}' = ", i + 1));
        match eq.as_slice() {
            [] => out.push('0'),
            [t] if t.monomial.is_one() && t.coeff == TimeJet::zero() => out.push_str("poly(0)"),
            terms => {
                for (l, t) in terms.iter().enumerate() {
                    format_term(t, l == 0, &mut out);
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn serialize_frame(frame: &QuadraticFrame) -> String {
    frame.rows().map(|row| row.iter().map(format_jet).collect::<Vec<_>>().join(" ") + "\n").collect()
}
