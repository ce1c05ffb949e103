//! The `.plank` text format.
//!
//! ```text
//! # scale_mm_per_unit: 1000
//! bbox = Cuboid(-0.35, -0.23, -0.76, 0.35, 0.23, 0.76)
//! plank1 = Cuboid(bbox_1, bbox_2, bbox_3, -0.34, bbox_5, bbox_6)
//! ```
//!
//! One statement per line. `name_k` refers to coordinate `k` (1..=6) of an
//! earlier statement; typeset subscripts (`bbox₁`) are accepted as well.
//! `#` starts a comment. A comment of the form `# scale_mm_per_unit: <f>`
//! sets the program scale.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{CoordRef, Plank, Program, BBOX};
use crate::geom::Dof;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("forward reference to `{0}`")]
    ForwardReference(String),
    #[error("subscript {0} outside 1..6")]
    SubscriptOutOfRange(u32),
    #[error("`{0}` is defined twice")]
    DuplicateName(String),
    #[error("the first statement must define `bbox`")]
    MissingBbox,
    #[error("bbox coordinates must be literals")]
    BboxAttachment,
}

enum Arg {
    Literal(f64),
    Ref { name: String, subscript: u32 },
}

struct Statement {
    line: usize,
    name: String,
    name_col: usize,
    args: Vec<(Arg, usize)>,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Self { chars: src.chars().collect(), pos: 0, line }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: self.pos + 1, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax(msg.into()))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return Err(self.syntax("expected identifier")),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn arg(&mut self) -> Result<(Arg, usize), ParseError> {
        self.skip_ws();
        let col = self.pos + 1;
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let start = self.pos;
                self.pos += 1;
                while let Some(c) = self.peek() {
                    let prev = self.chars[self.pos - 1];
                    if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || ((c == '-' || c == '+') && (prev == 'e' || prev == 'E')) {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                text.parse::<f64>()
                    .map(|v| (Arg::Literal(v), col))
                    .map_err(|_| ParseError { line: self.line, column: col, kind: ParseErrorKind::Syntax(format!("bad number `{text}`")) })
            }
            _ => {
                let word = self.ident()?;
                // Typeset subscript digits directly after the name.
                let mut sub = String::new();
                while let Some(c) = self.peek() {
                    match subscript_digit(c) {
                        Some(d) => {
                            sub.push(d);
                            self.pos += 1;
                        }
                        None => break,
                    }
                }
                let (name, digits) = if !sub.is_empty() {
                    (word, sub)
                } else {
                    match word.rfind('_') {
                        Some(i) if i + 1 < word.len() && word[i + 1..].chars().all(|c| c.is_ascii_digit()) => {
                            (word[..i].to_string(), word[i + 1..].to_string())
                        }
                        _ => return Err(ParseError { line: self.line, column: col, kind: ParseErrorKind::Syntax(format!("expected a number or `name_k`, found `{word}`")) }),
                    }
                };
                let subscript = digits.parse::<u32>().unwrap_or(u32::MAX);
                Ok((Arg::Ref { name, subscript }, col))
            }
        }
    }
}

fn subscript_digit(c: char) -> Option<char> {
    let base = '₀' as u32;
    let v = c as u32;
    if (base..base + 10).contains(&v) {
        char::from_digit(v - base, 10)
    } else {
        None
    }
}

fn parse_statement(text: &str, line: usize) -> Result<Statement, ParseError> {
    let mut cur = Cursor::new(text, line);
    cur.skip_ws();
    let name_col = cur.pos + 1;
    let name = cur.ident()?;
    cur.expect('=')?;
    let kw = cur.ident()?;
    if kw != "Cuboid" {
        return Err(ParseError { line, column: cur.pos + 1 - kw.chars().count(), kind: ParseErrorKind::Syntax(format!("expected `Cuboid`, found `{kw}`")) });
    }
    cur.expect('(')?;
    let mut args = Vec::with_capacity(6);
    loop {
        args.push(cur.arg()?);
        cur.skip_ws();
        match cur.peek() {
            Some(',') => cur.pos += 1,
            Some(')') => {
                cur.pos += 1;
                break;
            }
            _ => return Err(cur.syntax("expected `,` or `)`")),
        }
    }
    cur.skip_ws();
    if cur.peek().is_some() {
        return Err(cur.syntax("trailing characters"));
    }
    if args.len() != 6 {
        return Err(ParseError { line, column: name_col, kind: ParseErrorKind::Syntax(format!("Cuboid takes 6 arguments, found {}", args.len())) });
    }
    Ok(Statement { line, name, name_col, args })
}

fn scale_directive(comment: &str) -> Option<f64> {
    let rest = comment.trim().strip_prefix("scale_mm_per_unit")?;
    let rest = rest.trim_start().strip_prefix([':', '='])?;
    rest.trim().parse().ok()
}

/// Parse `.plank` source into a program. The first statement is the box.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut scale = 1.0;
    let mut statements = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let (code, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        if let Some(s) = comment.and_then(scale_directive) {
            scale = s;
        }
        if code.trim().is_empty() {
            continue;
        }
        statements.push(parse_statement(code, line)?);
    }

    let first = statements.first().ok_or(ParseError { line: 1, column: 1, kind: ParseErrorKind::MissingBbox })?;
    if first.name != "bbox" {
        // A reference to `bbox` without a definition reads better as an unknown identifier.
        if let Some((col, line)) = statements.iter().find_map(|s| {
            s.args.iter().find_map(|(a, c)| match a {
                Arg::Ref { name, .. } if name == "bbox" => Some((*c, s.line)),
                _ => None,
            })
        }) {
            return Err(ParseError { line, column: col, kind: ParseErrorKind::UnknownIdentifier("bbox".into()) });
        }
        return Err(ParseError { line: first.line, column: first.name_col, kind: ParseErrorKind::MissingBbox });
    }

    let mut defined_at: HashMap<&str, usize> = HashMap::new();
    for (idx, s) in statements.iter().enumerate() {
        if defined_at.insert(s.name.as_str(), idx).is_some() {
            return Err(ParseError { line: s.line, column: s.name_col, kind: ParseErrorKind::DuplicateName(s.name.clone()) });
        }
    }

    let mut bbox = [0.0; 6];
    let mut planks = Vec::with_capacity(statements.len() - 1);
    for (idx, s) in statements.iter().enumerate() {
        let mut coords = [CoordRef::Literal(0.0); 6];
        for (k, (arg, col)) in s.args.iter().enumerate() {
            let err = |kind| ParseError { line: s.line, column: *col, kind };
            coords[k] = match arg {
                Arg::Literal(v) => CoordRef::Literal(*v),
                Arg::Ref { name, subscript } => {
                    if idx == BBOX {
                        return Err(err(ParseErrorKind::BboxAttachment));
                    }
                    let target = match defined_at.get(name.as_str()) {
                        None => return Err(err(ParseErrorKind::UnknownIdentifier(name.clone()))),
                        Some(&t) if t >= idx => return Err(err(ParseErrorKind::ForwardReference(name.clone()))),
                        Some(&t) => t,
                    };
                    if !(1..=6).contains(subscript) {
                        return Err(err(ParseErrorKind::SubscriptOutOfRange(*subscript)));
                    }
                    CoordRef::attach(target, Dof::ALL[*subscript as usize - 1])
                }
            };
        }
        if idx == BBOX {
            for (b, c) in bbox.iter_mut().zip(coords) {
                if let CoordRef::Literal(v) = c {
                    *b = v;
                }
            }
        } else {
            planks.push(Plank { coords });
        }
    }
    Ok(Program { scale_mm_per_unit: scale, bbox, planks })
}

fn cuboid_name(i: usize) -> String {
    if i == BBOX {
        "bbox".to_string()
    } else {
        format!("plank{i}")
    }
}

/// Print a program. Literals use the shortest text that parses back to the
/// same `f64`.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    writeln!(out, "# scale_mm_per_unit: {}", p.scale_mm_per_unit).unwrap();
    let bbox: Vec<String> = p.bbox.iter().map(|v| format!("{v}")).collect();
    writeln!(out, "bbox = Cuboid({})", bbox.join(", ")).unwrap();
    for (i, plank) in p.planks.iter().enumerate() {
        let args: Vec<String> = plank
            .coords
            .iter()
            .map(|c| match c {
                CoordRef::Literal(v) => format!("{v}"),
                CoordRef::Attach { plank, dof } => format!("{}_{}", cuboid_name(*plank), dof.index() + 1),
            })
            .collect();
        writeln!(out, "{} = Cuboid({})", cuboid_name(i + 1), args.join(", ")).unwrap();
    }
    out
}
