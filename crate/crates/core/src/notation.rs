//! The relation notation: `S(x,y)`, `A(x,y)`, `M(x,y)`, `J(x,y,...)`,
//! `I(p1,p2,...)` over proposition leaves `p<digits>`.
//!
//! Input may carry whitespace between any two tokens. The canonical form
//! produced by [`serialize_expr`] (and `Display`) has none.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{PropId, RelationExpr};

/// Maximum relation nesting accepted by the parser.
pub const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParseErrorKind {
    UnexpectedToken,
    UnbalancedParen,
    ArityError,
    BadPropId,
    IdentityNonLeaf,
    TrailingInput,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A parse failure. `position` is a character offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{kind} at {position}: {message}")]
pub struct ParseDiagnostic {
    pub position: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

/// A parse failure inside a `;`-separated list, with the index of the item.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("item {item}: {diagnostic}")]
pub struct ListDiagnostic {
    pub item: usize,
    pub diagnostic: ParseDiagnostic,
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    base: usize,
    depth: usize,
}

type PResult<T> = Result<T, ParseDiagnostic>;

impl<'a> Parser<'a> {
    fn new(chars: &'a [char], base: usize) -> Self {
        Parser { chars, pos: 0, base, depth: 0 }
    }

    fn error(&self, kind: ParseErrorKind, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            position: self.base + self.pos,
            kind,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn found(&self) -> String {
        match self.chars.get(self.pos) {
            Some(c) => format!("{c:?}"),
            None => "end of input".to_string(),
        }
    }

    fn document(mut self) -> PResult<RelationExpr> {
        let expr = self.expr()?;
        match self.peek() {
            None => Ok(expr),
            Some(')') => Err(self.error(ParseErrorKind::UnbalancedParen, "unmatched ')'")),
            Some(_) => Err(self.error(
                ParseErrorKind::TrailingInput,
                format!("unexpected {} after complete expression", self.found()),
            )),
        }
    }

    fn expr(&mut self) -> PResult<RelationExpr> {
        match self.peek() {
            Some('p') => self.prop().map(RelationExpr::Prop),
            Some(c @ ('S' | 'A' | 'M' | 'J' | 'I')) => self.relation(c),
            None if self.depth > 0 => Err(self.error(
                ParseErrorKind::UnbalancedParen,
                "input ended inside an open parenthesis",
            )),
            _ => Err(self.error(
                ParseErrorKind::UnexpectedToken,
                format!("expected a proposition or relation, found {}", self.found()),
            )),
        }
    }

    fn prop(&mut self) -> PResult<PropId> {
        let start = self.pos;
        self.pos += 1;
        let digits_start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.error(ParseErrorKind::BadPropId, "expected digits after 'p'"));
        }
        let digits: String = self.chars[digits_start..self.pos].iter().collect();
        match digits.parse::<u32>() {
            Ok(n) if n > 0 => Ok(PropId(n)),
            Ok(_) => {
                self.pos = start;
                Err(self.error(ParseErrorKind::BadPropId, "proposition ids start at 1"))
            }
            Err(_) => {
                self.pos = start;
                Err(self.error(ParseErrorKind::BadPropId, format!("proposition id p{digits} is too large")))
            }
        }
    }

    fn relation(&mut self, letter: char) -> PResult<RelationExpr> {
        if self.depth >= MAX_DEPTH {
            return Err(self.error(
                ParseErrorKind::UnexpectedToken,
                format!("relations nested deeper than {MAX_DEPTH} levels"),
            ));
        }
        self.pos += 1;
        if self.peek() != Some('(') {
            return Err(self.error(
                ParseErrorKind::UnexpectedToken,
                format!("expected '(' after {letter}, found {}", self.found()),
            ));
        }
        self.pos += 1;
        self.depth += 1;
        let expr = match letter {
            'S' | 'A' | 'M' => {
                let first = self.expr()?;
                self.delimiter(letter, false)?;
                let second = self.expr()?;
                self.delimiter(letter, true)?;
                match letter {
                    'S' => RelationExpr::support(first, second),
                    'A' => RelationExpr::attack(first, second),
                    _ => RelationExpr::matching(first, second),
                }
            }
            'J' => {
                let mut members = vec![self.expr()?];
                while self.list_continues(letter, members.len())? {
                    members.push(self.expr()?);
                }
                RelationExpr::Joint(members)
            }
            _ => {
                let mut members = vec![self.identity_member()?];
                while self.list_continues(letter, members.len())? {
                    members.push(self.identity_member()?);
                }
                RelationExpr::Identity(members)
            }
        };
        self.depth -= 1;
        Ok(expr)
    }

    /// Expects ',' (`closing == false`) or ')' inside a binary relation.
    fn delimiter(&mut self, letter: char, closing: bool) -> PResult<()> {
        let (want, other) = if closing { (')', ',') } else { (',', ')') };
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) if c == other => Err(self.error(
                ParseErrorKind::ArityError,
                format!("{letter} takes exactly two arguments"),
            )),
            None => Err(self.error(ParseErrorKind::UnbalancedParen, format!("missing ')' to close {letter}("))),
            Some(_) => Err(self.error(
                ParseErrorKind::UnexpectedToken,
                format!("expected '{want}', found {}", self.found()),
            )),
        }
    }

    /// After a member of J/I: `true` if another member follows.
    fn list_continues(&mut self, letter: char, count: usize) -> PResult<bool> {
        match self.peek() {
            Some(',') => {
                self.pos += 1;
                Ok(true)
            }
            Some(')') if count < 2 => Err(self.error(
                ParseErrorKind::ArityError,
                format!("{letter} needs at least two members"),
            )),
            Some(')') => {
                self.pos += 1;
                Ok(false)
            }
            None => Err(self.error(ParseErrorKind::UnbalancedParen, format!("missing ')' to close {letter}("))),
            Some(_) => Err(self.error(
                ParseErrorKind::UnexpectedToken,
                format!("expected ',' or ')', found {}", self.found()),
            )),
        }
    }

    fn identity_member(&mut self) -> PResult<PropId> {
        match self.peek() {
            Some('p') => self.prop(),
            Some('S' | 'A' | 'M' | 'J' | 'I') => Err(self.error(
                ParseErrorKind::IdentityNonLeaf,
                "identity members must be propositions",
            )),
            None => Err(self.error(ParseErrorKind::UnbalancedParen, "missing ')' to close I(")),
            Some(_) => Err(self.error(
                ParseErrorKind::UnexpectedToken,
                format!("expected a proposition, found {}", self.found()),
            )),
        }
    }
}

/// Parses one relation expression.
pub fn parse_expr(text: &str) -> Result<RelationExpr, ParseDiagnostic> {
    let chars: Vec<char> = text.chars().collect();
    Parser::new(&chars, 0).document()
}

/// Canonical string of an expression.
pub fn serialize_expr(expr: &RelationExpr) -> String {
    expr.to_string()
}

/// Parses a `;`-separated list, ignoring empty items. Diagnostic positions
/// are offsets into the whole list text.
pub fn parse_relation_list(text: &str) -> Result<Vec<RelationExpr>, ListDiagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    let mut item = 0;
    for end in 0..=chars.len() {
        match chars.get(end) {
            Some('(') => {
                depth += 1;
                continue;
            }
            Some(')') => {
                depth = depth.saturating_sub(1);
                continue;
            }
            Some(';') if depth == 0 => {}
            Some(_) => continue,
            None => {}
        }
        let slice = &chars[start..end];
        if slice.iter().any(|c| !c.is_whitespace()) {
            let expr = Parser::new(slice, start)
                .document()
                .map_err(|diagnostic| ListDiagnostic { item, diagnostic })?;
            out.push(expr);
        }
        item += 1;
        start = end + 1;
    }
    Ok(out)
}

impl fmt::Display for RelationExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, letter: &str, items: &[T]) -> fmt::Result {
            write!(f, "{letter}(")?;
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{item}")?;
            }
            f.write_str(")")
        }
        match self {
            RelationExpr::Prop(id) => write!(f, "{id}"),
            RelationExpr::Support(a, b) => write!(f, "S({a},{b})"),
            RelationExpr::Attack(a, b) => write!(f, "A({a},{b})"),
            RelationExpr::Match(a, b) => write!(f, "M({a},{b})"),
            RelationExpr::Joint(members) => list(f, "J", members),
            RelationExpr::Identity(members) => list(f, "I", members),
        }
    }
}

impl std::str::FromStr for RelationExpr {
    type Err = ParseDiagnostic;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RelationExpr as R;

    fn p(i: u32) -> R {
        R::prop(i)
    }

    fn kind_of(text: &str) -> (ParseErrorKind, usize) {
        let d = parse_expr(text).unwrap_err();
        (d.kind, d.position)
    }

    #[test]
    fn parses_basic_and_nested_forms() {
        assert_eq!(parse_expr("S(p1, p2)").unwrap(), R::support(p(1), p(2)));
        assert_eq!(
            parse_expr("S(M(J(p4,p5),p2),p6)").unwrap(),
            R::support(R::matching(R::joint(vec![p(4), p(5)]), p(2)), p(6))
        );
        assert_eq!(parse_expr("A(p3,S(p1,p2))").unwrap(), R::attack(p(3), R::support(p(1), p(2))));
        assert_eq!(parse_expr("  I( p1 ,p2,\tp3 ) ").unwrap(), R::identity([1, 2, 3]));
        assert_eq!(parse_expr("p7").unwrap(), p(7));
    }

    #[test]
    fn diagnostics_by_kind() {
        assert_eq!(kind_of("J(p1)"), (ParseErrorKind::ArityError, 4));
        assert_eq!(kind_of("I(p1,S(p2,p3))"), (ParseErrorKind::IdentityNonLeaf, 5));
        assert_eq!(kind_of("S(p1,p2"), (ParseErrorKind::UnbalancedParen, 7));
        assert_eq!(kind_of("S(p1,p2))").0, ParseErrorKind::UnbalancedParen);
        assert_eq!(kind_of("S(p1,p2) x"), (ParseErrorKind::TrailingInput, 9));
        assert_eq!(kind_of("S(p1)"), (ParseErrorKind::ArityError, 4));
        assert_eq!(kind_of("S(p1,p2,p3)"), (ParseErrorKind::ArityError, 7));
        assert_eq!(kind_of("S(px,p2)"), (ParseErrorKind::BadPropId, 3));
        assert_eq!(kind_of("S(p0,p2)"), (ParseErrorKind::BadPropId, 2));
        assert_eq!(kind_of("p99999999999").0, ParseErrorKind::BadPropId);
        assert_eq!(kind_of("").0, ParseErrorKind::UnexpectedToken);
        assert_eq!(kind_of("X(p1,p2)"), (ParseErrorKind::UnexpectedToken, 0));
        assert_eq!(kind_of("S p1").0, ParseErrorKind::UnexpectedToken);
        assert_eq!(kind_of("S(p1;p2)"), (ParseErrorKind::UnexpectedToken, 4));
    }

    #[test]
    fn positions_count_characters_not_bytes() {
        // Two 3-byte characters before the offending token.
        assert_eq!(kind_of("S(p1,p2)测试"), (ParseErrorKind::TrailingInput, 8));
        assert_eq!(kind_of("S(测,p2)"), (ParseErrorKind::UnexpectedToken, 2));
    }

    #[test]
    fn depth_limit() {
        let mut text = "p1".to_string();
        for _ in 0..MAX_DEPTH {
            text = format!("S({text},p2)");
        }
        assert_eq!(parse_expr(&text).unwrap().depth(), MAX_DEPTH);
        let deeper = format!("S({text},p2)");
        assert_eq!(parse_expr(&deeper).unwrap_err().kind, ParseErrorKind::UnexpectedToken);
    }

    #[test]
    fn canonical_serialization() {
        assert_eq!(serialize_expr(&R::support(p(10), p(11))), "S(p10,p11)");
        assert_eq!(serialize_expr(&R::matching(R::joint(vec![p(6), p(7)]), p(3))), "M(J(p6,p7),p3)");
        let t = parse_expr("S( M( J(p4 , p5) , p2 ) , p6 )").unwrap();
        assert_eq!(t.to_string(), "S(M(J(p4,p5),p2),p6)");
        assert_eq!(parse_expr(&serialize_expr(&t)).unwrap(), t);
    }

    #[test]
    fn relation_lists() {
        assert_eq!(
            parse_relation_list("J(p4, p5); J(p6, p7)").unwrap(),
            vec![R::joint(vec![p(4), p(5)]), R::joint(vec![p(6), p(7)])]
        );
        assert_eq!(parse_relation_list("").unwrap(), vec![]);
        assert_eq!(parse_relation_list(" ; ;").unwrap(), vec![]);
        // "S(p1,p2);" is 9 chars, so item 1 starts at offset 9 and its
        // missing ')' is reported at the end of input, offset 13.
        let err = parse_relation_list("S(p1,p2);J(p1").unwrap_err();
        assert_eq!(err.item, 1);
        assert_eq!(err.diagnostic.kind, ParseErrorKind::UnbalancedParen);
        assert_eq!(err.diagnostic.position, 13);
    }
}
