//! Text format for H-descriptions.
//!
//! The first line holds `m n` with `n = d + 1`. Each of the `m` following
//! lines holds `b  -a_1 ... -a_d` for the inequality `a x <= b`. Entries may
//! be integers or fractions like `3/4`; fractions are cleared row by row.
//! Blank lines and lines starting with `#` are ignored.

use std::str::FromStr;

use barvinok::arith::{Int, Rat, RatVec};
use barvinok::polytope::HRep;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    At { line: usize, col: usize, msg: String },
    #[error("expected {expected} rows after the header, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("line {line}: {msg}")]
    Row { line: usize, msg: String },
}

/// Whitespace-separated tokens with 1-based line and column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let len = rest[start..].find(char::is_whitespace).unwrap_or(rest.len() - start);
        let tok = &rest[start..start + len];
        let col = offset + start + 1;
        offset += start + len;
        rest = &rest[start + len..];
        Some((col, tok))
    })
}

fn number<T: FromStr>(tok: &str, line: usize, col: usize, what: &str) -> Result<T, ParseError> {
    tok.parse().map_err(|_| ParseError::At { line, col, msg: format!("expected {what}, found `{tok}`") })
}

pub fn parse_hrep(text: &str) -> Result<HRep, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let (hline, header) = lines.next().ok_or(ParseError::At { line: 1, col: 1, msg: "missing header `m n`".into() })?;
    let head: Vec<(usize, &str)> = tokens(header).collect();
    if head.len() != 2 {
        return Err(ParseError::At {
            line: hline,
            col: head.get(2).map_or(1, |t| t.0),
            msg: format!("header must hold two numbers `m n`, found {} tokens", head.len()),
        });
    }
    let m: usize = number(head[0].1, hline, head[0].0, "a row count")?;
    let n: usize = number(head[1].1, hline, head[1].0, "a column count")?;
    if n < 2 {
        return Err(ParseError::At { line: hline, col: head[1].0, msg: "need at least two columns".into() });
    }
    let d = n - 1;

    let mut rows = Vec::with_capacity(m);
    let mut row_lines = Vec::with_capacity(m);
    for (lineno, line) in lines {
        if rows.len() == m {
            return Err(ParseError::At { line: lineno, col: 1, msg: format!("more than {m} rows") });
        }
        let toks: Vec<(usize, &str)> = tokens(line).collect();
        if toks.len() != n {
            return Err(ParseError::At {
                line: lineno,
                col: toks.get(n).map_or(line.len() + 1, |t| t.0),
                msg: format!("expected {n} entries, found {}", toks.len()),
            });
        }
        let mut entries = Vec::with_capacity(n);
        for &(col, tok) in &toks {
            entries.push(number::<Rat>(tok, lineno, col, "an integer or fraction")?);
        }
        let rhs = entries[0].clone();
        let normal: RatVec = entries[1..].iter().map(|x| -x).collect();
        rows.push((normal, rhs));
        row_lines.push(lineno);
    }
    if rows.len() != m {
        return Err(ParseError::RowCount { expected: m, found: rows.len() });
    }
    // report row-level problems (such as a zero normal) against their line
    for (i, (normal, _)) in rows.iter().enumerate() {
        if normal.iter().all(|x| *x == Rat::from_integer(Int::from(0))) {
            return Err(ParseError::Row { line: row_lines[i], msg: "all coefficients are zero".into() });
        }
    }
    HRep::from_rational(d, rows).map_err(|e| ParseError::Row { line: hline, msg: e.to_string() })
}

/// Inverse of [`parse_hrep`] for integer data.
pub fn render(p: &HRep) -> String {
    let mut out = format!("{} {}\n", p.num_rows(), p.dim() + 1);
    for (a, b) in p.rows() {
        let mut fields = vec![b.to_string()];
        fields.extend(a.iter().map(|x| (-x).to_string()));
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use barvinok::arith::int_vec;

    #[test]
    fn unit_interval() {
        let p = parse_hrep("2 2\n1 -1\n0 1\n").unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.num_rows(), 2);
        assert_eq!(p.normal(0), int_vec(&[1]).as_slice());
        assert_eq!(p.rhs(0), &Int::from(1));
        assert_eq!(p.normal(1), int_vec(&[-1]).as_slice());
        assert_eq!(p.rhs(1), &Int::from(0));
    }

    #[test]
    fn unit_square_and_comments() {
        let text = "# unit square\n4 3\n1 -1 0\n0 1 0\n\n1 0 -1\n0 0 1\n";
        let p = parse_hrep(text).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.num_rows(), 4);
    }

    #[test]
    fn fractions_are_cleared() {
        let p = parse_hrep("2 2\n1/2 -1/3\n0 1\n").unwrap();
        assert_eq!(p.normal(0), int_vec(&[2]).as_slice());
        assert_eq!(p.rhs(0), &Int::from(3));
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(
            parse_hrep("2 3\n1 -1 0\n0 1\n"),
            Err(ParseError::At { line: 3, col: 4, msg: "expected 3 entries, found 2".into() })
        );
        assert_eq!(
            parse_hrep("1 2\n1 x\n"),
            Err(ParseError::At { line: 2, col: 3, msg: "expected an integer or fraction, found `x`".into() })
        );
        assert!(matches!(parse_hrep("2\n"), Err(ParseError::At { line: 1, .. })));
        assert!(matches!(parse_hrep("a 2\n"), Err(ParseError::At { line: 1, col: 1, .. })));
        assert_eq!(parse_hrep("3 2\n1 -1\n"), Err(ParseError::RowCount { expected: 3, found: 1 }));
        assert!(matches!(parse_hrep("1 2\n1 -1\n0 1\n"), Err(ParseError::At { line: 3, .. })));
        assert_eq!(parse_hrep("1 2\n5 0\n"), Err(ParseError::Row { line: 2, msg: "all coefficients are zero".into() }));
        assert!(parse_hrep("").is_err());
    }

    #[test]
    fn render_round_trip() {
        for p in [HRep::hypercube(3, -2, 5), HRep::standard_simplex(4, 7), HRep::cross_polytope(3, 2)] {
            assert_eq!(parse_hrep(&render(&p)).unwrap(), p);
        }
        assert_eq!(render(&parse_hrep("2 2\n1 -1\n0 1\n").unwrap()), "2 2\n1 -1\n0 1\n");
    }
}
