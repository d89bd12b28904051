//! Plain-text instance files.
//!
//! ```text
//! n m
//! <m reals>        (n lines, rows of A)
//! <n reals>        (b)
//! truth: <m reals> (optional)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{check_span, RegressionInstance};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Largest `n * m` accepted from a file.
const MAX_ENTRIES: usize = 1 << 26;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_reals(text: &str, line: usize, expected: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        let v: f64 = tok
            .parse()
            .map_err(|_| parse_err(line, format!("not a number: {tok:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(line, format!("non-finite value {tok:?}")));
        }
        out.push(v);
        if out.len() > expected {
            break;
        }
    }
    if out.len() != expected {
        return Err(parse_err(
            line,
            format!("expected {expected} values, found {}", text.split_whitespace().count()),
        ));
    }
    Ok(out)
}

fn parse_dim(tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(1, format!("missing {what}")))?;
    let v: usize = tok
        .parse()
        .map_err(|_| parse_err(1, format!("{what} is not a count: {tok:?}")))?;
    if v == 0 {
        return Err(parse_err(1, format!("{what} must be positive")));
    }
    Ok(v)
}

/// Parses an instance and checks that `b` lies in the span of `A`.
pub fn parse_instance(text: &str) -> Result<RegressionInstance> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut toks = header.split_whitespace();
    let n = parse_dim(toks.next(), "n")?;
    let m = parse_dim(toks.next(), "m")?;
    if toks.next().is_some() {
        return Err(parse_err(1, "expected exactly `n m`"));
    }
    if n.checked_mul(m).is_none_or(|e| e > MAX_ENTRIES) {
        return Err(parse_err(1, format!("instance too large: {n} x {m}")));
    }

    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| parse_err(0, format!("unexpected end of input, expected {what}")))
    };
    let mut data = Vec::new();
    for i in 0..n {
        let (ln, l) = next("a row of A").map_err(|e| with_eof_line(e, text))?;
        data.extend(parse_reals(l, ln, m).map_err(|e| match e {
            Error::Parse { line, message } => parse_err(line, format!("row {} of A: {message}", i + 1)),
            e => e,
        })?);
    }
    let (ln, l) = next("b").map_err(|e| with_eof_line(e, text))?;
    let b = parse_reals(l, ln, n)?;

    let mut truth = None;
    for (ln, l) in lines {
        let t = l.trim();
        if t.is_empty() {
            continue;
        }
        match t.strip_prefix("truth:") {
            Some(rest) if truth.is_none() => truth = Some(parse_reals(rest, ln, m)?),
            _ => return Err(parse_err(ln, "unexpected trailing content")),
        }
    }

    let a = DenseMatrix::new(n, m, data)?;
    check_span(&a, &b)?;
    Ok(RegressionInstance {
        a,
        b,
        truth,
        seed: None,
    })
}

fn with_eof_line(e: Error, text: &str) -> Error {
    match e {
        Error::Parse { message, .. } => parse_err(text.lines().count() + 1, message),
        e => e,
    }
}

fn push_reals(out: &mut String, v: &[f64]) {
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        // 17 significant digits round-trip every f64
        let _ = write!(out, "{x:.16e}");
    }
    out.push('\n');
}

pub fn format_instance(inst: &RegressionInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", inst.a.n_rows(), inst.a.n_cols());
    for row in inst.a.rows() {
        push_reals(&mut out, row);
    }
    push_reals(&mut out, &inst.b);
    if let Some(t) = &inst.truth {
        out.push_str("truth: ");
        push_reals(&mut out, t);
    }
    out
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<RegressionInstance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: impl AsRef<Path>, inst: &RegressionInstance) -> Result<()> {
    std::fs::write(path, format_instance(inst))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::random_orthogonal_instance;

    #[test]
    fn round_trip() {
        let mut inst = random_orthogonal_instance(3, 5, 2, 9).unwrap();
        let back = parse_instance(&format_instance(&inst)).unwrap();
        inst.seed = None;
        assert_eq!(back, inst);

        inst.truth = None;
        let back = parse_instance(&format_instance(&inst)).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn round_trip_through_file() {
        let inst = RegressionInstance::new(
            DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap(),
            vec![1.0],
            None,
        )
        .unwrap();
        let path = std::env::temp_dir().join(format!("irls-io-{}.txt", std::process::id()));
        write_instance(&path, &inst).unwrap();
        assert_eq!(read_instance(&path).unwrap(), inst);
        let _ = std::fs::remove_file(path);
    }

    #[test]
    fn malformed_header() {
        for text in ["", "x 2\n", "1\n", "0 2\n", "1 2 3\n"] {
            assert!(
                matches!(parse_instance(text), Err(Error::Parse { line: 1, .. })),
                "{text:?}"
            );
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(
            parse_instance("1 2\n1 x\n1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_instance("2 2\n1 0\n0 1\n1\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(
            parse_instance("1 2\n1 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_instance("1 2\n1 1\n1\nfoo\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(
            parse_instance("1 2\n1 inf\n1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn zero_row_is_out_of_span() {
        assert!(matches!(
            parse_instance("1 2\n0 0\n1\n"),
            Err(Error::Span)
        ));
    }
}
