//! Plain-text serialization for arrays.
//!
//! A PDA file is a version header, a parameter line, and one line per row:
//!
//! ```text
//! PDA v1
//! K=4 F=2 Z=1 S=2
//! * 1 * 0
//! 0 * 1 *
//! ```
//!
//! Generalized arrays use the `GPDA v1` header, an extra `I=` parameter and
//! `value^superscript` tokens (e.g. `3^2`). Lines starting with `#` are
//! comments and may appear anywhere; readers accept LF or CRLF endings and
//! arbitrary runs of blanks between tokens, writers always emit the canonical
//! single-space form with a trailing newline.

use thiserror::Error;

use crate::gpda::{GeneralizedPdaArray, GpdaEntry, GpdaError, Label};
use crate::pda::{PdaArray, PdaEntry, PdaError};

/// Errors raised while reading array files.
#[derive(Debug, Error)]
pub enum FormatError {
    /// Malformed text; positions are 1-based.
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// The body has a different number of rows than the header declares.
    #[error("header declares F={declared} rows but the body has {found}")]
    HeaderMismatch { declared: usize, found: usize },
    /// The parsed values do not form a well-shaped array.
    #[error(transparent)]
    Shape(#[from] PdaError),
    /// The parsed values do not form a well-shaped generalized array.
    #[error(transparent)]
    GeneralizedShape(#[from] GpdaError),
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Significant lines of the input: (1-based line number, content).
/// Comments and blank lines are dropped, CR endings stripped.
fn significant_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.strip_suffix('\r').unwrap_or(line)))
        .filter(|(_, line)| {
            let trimmed = line.trim_start();
            !trimmed.is_empty() && !trimmed.starts_with('#')
        })
        .collect()
}

/// Tokens of a line with their 1-based column positions.
fn tokens_with_columns(line: &str) -> Vec<(usize, &str)> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (off, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push((s, &line[s..off]));
            }
        } else if start.is_none() {
            start = Some(off);
        }
    }
    if let Some(s) = start {
        tokens.push((s, &line[s..]));
    }
    tokens
        .into_iter()
        .map(|(off, tok)| (line[..off].chars().count() + 1, tok))
        .collect()
}

/// Parse `key=value` pairs in a fixed order from the parameter line.
fn parse_parameters(line_no: usize, line: &str, keys: &[&str]) -> Result<Vec<u64>, FormatError> {
    let tokens = tokens_with_columns(line);
    if tokens.len() != keys.len() {
        return Err(parse_err(
            line_no,
            1,
            format!(
                "parameter line needs {} fields ({}), found {}",
                keys.len(),
                keys.join(", "),
                tokens.len()
            ),
        ));
    }
    let mut values = Vec::with_capacity(keys.len());
    for (&key, &(column, token)) in keys.iter().zip(&tokens) {
        let Some((name, digits)) = token.split_once('=') else {
            return Err(parse_err(
                line_no,
                column,
                format!("expected `{key}=<number>`, found `{token}`"),
            ));
        };
        if name != key {
            return Err(parse_err(
                line_no,
                column,
                format!("expected key `{key}`, found `{name}`"),
            ));
        }
        let value: u64 = digits.parse().map_err(|_| {
            parse_err(
                line_no,
                column,
                format!("`{digits}` is not a non-negative integer"),
            )
        })?;
        values.push(value);
    }
    Ok(values)
}

struct RawBody<'a> {
    /// One entry per row: (1-based line number, tokens with columns).
    rows: Vec<(usize, Vec<(usize, &'a str)>)>,
}

/// Common front half of both readers: check the version header, parse the
/// parameter line, and slice the body into token rows of equal length.
fn parse_layout<'a>(
    text: &'a str,
    version: &str,
    keys: &[&str],
) -> Result<(Vec<u64>, RawBody<'a>), FormatError> {
    let lines = significant_lines(text);
    let Some(&(header_no, header)) = lines.first() else {
        return Err(parse_err(1, 1, format!("missing `{version}` header")));
    };
    let header_tokens: Vec<&str> = header.split_whitespace().collect();
    let version_tokens: Vec<&str> = version.split_whitespace().collect();
    if header_tokens != version_tokens {
        return Err(parse_err(
            header_no,
            1,
            format!("expected header `{version}`, found `{}`", header.trim()),
        ));
    }
    let Some(&(params_no, params)) = lines.get(1) else {
        return Err(parse_err(
            header_no,
            1,
            "missing parameter line after the header",
        ));
    };
    let values = parse_parameters(params_no, params, keys)?;
    let num_cols = values[0] as usize;
    let num_rows = values[1] as usize;

    let body = &lines[2..];
    if body.len() != num_rows {
        return Err(FormatError::HeaderMismatch {
            declared: num_rows,
            found: body.len(),
        });
    }
    let mut rows = Vec::with_capacity(body.len());
    for (data_row, &(line_no, line)) in body.iter().enumerate() {
        let tokens = tokens_with_columns(line);
        if tokens.len() != num_cols {
            return Err(parse_err(
                line_no,
                1,
                format!(
                    "row {data_row} has {} entries, expected K={num_cols}",
                    tokens.len()
                ),
            ));
        }
        rows.push((line_no, tokens));
    }
    Ok((values, RawBody { rows }))
}

/// Read a PDA from its text form.
///
/// Integer values are taken as written even when they fall outside `[0, S)`;
/// run [`PdaArray::validate`] to check the conditions. The shape, in
/// contrast, must match the header exactly.
pub fn read_pda(text: &str) -> Result<PdaArray, FormatError> {
    let (values, body) = parse_layout(text, "PDA v1", &["K", "F", "Z", "S"])?;
    let (num_caches, num_rows) = (values[0] as usize, values[1] as usize);
    let (stars, num_integers) = (values[2] as usize, values[3] as u32);

    let mut grid = Vec::with_capacity(num_rows * num_caches);
    for (line_no, tokens) in &body.rows {
        for &(column, token) in tokens {
            let entry = if token == "*" {
                PdaEntry::Star
            } else {
                let value: u32 = token.parse().map_err(|_| {
                    parse_err(
                        *line_no,
                        column,
                        format!("`{token}` is neither `*` nor a non-negative integer"),
                    )
                })?;
                PdaEntry::Int(value)
            };
            grid.push(entry);
        }
    }
    Ok(PdaArray::new(
        num_caches,
        num_rows,
        stars,
        num_integers,
        grid,
    )?)
}

/// Render a PDA in canonical text form (single spaces, trailing newline).
pub fn write_pda(pda: &PdaArray) -> String {
    let mut out = String::from("PDA v1\n");
    out.push_str(&format!(
        "K={} F={} Z={} S={}\n",
        pda.num_caches(),
        pda.num_rows(),
        pda.stars_per_column(),
        pda.num_integers()
    ));
    for row in 0..pda.num_rows() {
        for col in 0..pda.num_caches() {
            if col > 0 {
                out.push(' ');
            }
            out.push_str(&pda.entry(row, col).to_string());
        }
        out.push('\n');
    }
    out
}

/// Read a generalized PDA from its text form.
///
/// Values and superscripts are taken as written; run
/// [`GeneralizedPdaArray::validate`] to check the conditions.
pub fn read_gpda(text: &str) -> Result<GeneralizedPdaArray, FormatError> {
    let (values, body) = parse_layout(text, "GPDA v1", &["K", "F", "Z", "S", "I"])?;
    let (num_users, num_rows) = (values[0] as usize, values[1] as usize);
    let (stars, num_integers) = (values[2] as usize, values[3] as u32);
    let max_superscript = values[4] as u32;

    let mut grid = Vec::with_capacity(num_rows * num_users);
    for (line_no, tokens) in &body.rows {
        for &(column, token) in tokens {
            let entry = if token == "*" {
                GpdaEntry::Star
            } else {
                let bad = || {
                    parse_err(
                        *line_no,
                        column,
                        format!(
                            "`{token}` is neither `*` nor `value^superscript` \
                             (e.g. `3^2`)"
                        ),
                    )
                };
                let (value, superscript) = token.split_once('^').ok_or_else(bad)?;
                let value: u32 = value.parse().map_err(|_| bad())?;
                let superscript: u32 = superscript.parse().map_err(|_| bad())?;
                GpdaEntry::Labeled(Label::new(value, superscript))
            };
            grid.push(entry);
        }
    }
    Ok(GeneralizedPdaArray::new(
        num_users,
        num_rows,
        stars,
        num_integers,
        max_superscript,
        grid,
    )?)
}

/// Render a generalized PDA in canonical text form.
pub fn write_gpda(g: &GeneralizedPdaArray) -> String {
    let mut out = String::from("GPDA v1\n");
    out.push_str(&format!(
        "K={} F={} Z={} S={} I={}\n",
        g.num_users(),
        g.num_rows(),
        g.stars_per_column(),
        g.num_integers(),
        g.max_superscript()
    ));
    for row in 0..g.num_rows() {
        for col in 0..g.num_users() {
            if col > 0 {
                out.push(' ');
            }
            out.push_str(&g.entry(row, col).to_string());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_row_pda() -> PdaArray {
        let grid = vec![
            PdaEntry::Star,
            PdaEntry::Int(1),
            PdaEntry::Star,
            PdaEntry::Int(0),
            PdaEntry::Int(0),
            PdaEntry::Star,
            PdaEntry::Int(1),
            PdaEntry::Star,
        ];
        PdaArray::new(4, 2, 1, 2, grid).unwrap()
    }

    const TWO_ROW_TEXT: &str = "PDA v1\nK=4 F=2 Z=1 S=2\n* 1 * 0\n0 * 1 *\n";

    #[test]
    fn read_parses_the_canonical_example() {
        assert_eq!(read_pda(TWO_ROW_TEXT).unwrap(), two_row_pda());
    }

    #[test]
    fn write_emits_the_canonical_form() {
        assert_eq!(write_pda(&two_row_pda()), TWO_ROW_TEXT);
    }

    #[test]
    fn read_accepts_comments_blanks_and_crlf() {
        let text = "# caches along the top\r\nPDA v1\r\n\r\nK=4  F=2\tZ=1 S=2\r\n*  1 * 0\r\n# middle note\r\n0 * 1 *\r\n";
        assert_eq!(read_pda(text).unwrap(), two_row_pda());
    }

    #[test]
    fn round_trips_are_identities() {
        let pda = two_row_pda();
        assert_eq!(read_pda(&write_pda(&pda)).unwrap(), pda);
        // write . read reproduces non-canonical inputs canonically.
        let noisy = "PDA v1\n# hi\nK=4   F=2 Z=1 S=2\n*\t1 * 0\n0 * 1 *\n";
        assert_eq!(write_pda(&read_pda(noisy).unwrap()), TWO_ROW_TEXT);
    }

    #[test]
    fn read_rejects_wrong_header() {
        let err = read_pda("PDA v2\nK=1 F=1 Z=0 S=1\n0\n").unwrap_err();
        match err {
            FormatError::Parse {
                line,
                column,
                message,
            } => {
                assert_eq!((line, column), (1, 1));
                assert!(message.contains("PDA v1"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn read_names_the_row_with_wrong_entry_count() {
        let text = "PDA v1\nK=4 F=2 Z=1 S=2\n* 1 * 0\n0 * 1 * 9\n";
        let err = read_pda(text).unwrap_err();
        match err {
            FormatError::Parse { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("row 1"), "{message}");
                assert!(message.contains("expected K=4"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn read_reports_row_count_conflicts() {
        let text = "PDA v1\nK=4 F=3 Z=1 S=2\n* 1 * 0\n0 * 1 *\n";
        let err = read_pda(text).unwrap_err();
        match err {
            FormatError::HeaderMismatch { declared, found } => {
                assert_eq!((declared, found), (3, 2));
            }
            other => panic!("expected header mismatch, got {other:?}"),
        }
    }

    #[test]
    fn read_points_at_bad_tokens() {
        let text = "PDA v1\nK=4 F=2 Z=1 S=2\n* 1 * 0\n0 * x *\n";
        let err = read_pda(text).unwrap_err();
        match err {
            FormatError::Parse { line, column, .. } => {
                assert_eq!((line, column), (4, 5));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn read_rejects_misnamed_parameter_keys() {
        let text = "PDA v1\nK=4 F=2 Q=1 S=2\n* 1 * 0\n0 * 1 *\n";
        let err = read_pda(text).unwrap_err();
        match err {
            FormatError::Parse {
                line,
                column,
                message,
            } => {
                assert_eq!((line, column), (2, 9));
                assert!(message.contains("`Z`"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn read_keeps_out_of_range_values_for_the_validator() {
        let text = "PDA v1\nK=2 F=1 Z=0 S=1\n0 7\n";
        let pda = read_pda(text).unwrap();
        assert_eq!(pda.entry(0, 1), PdaEntry::Int(7));
        assert!(!pda.validate().is_ok());
    }

    #[test]
    fn read_wraps_shape_errors() {
        // Z=3 stars cannot fit into F=1 rows.
        let text = "PDA v1\nK=2 F=1 Z=3 S=1\n0 *\n";
        assert!(matches!(
            read_pda(text).unwrap_err(),
            FormatError::Shape(PdaError::StarsExceedRows { .. })
        ));
    }

    const GPDA_TEXT: &str = "GPDA v1\nK=8 F=2 Z=1 S=2 I=3\n\
                             * * * 1^1 1^2 * * 0^1\n\
                             0^1 0^2 0^3 * * 1^1 1^2 *\n";

    #[test]
    fn gpda_round_trip_matches_the_expansion_example() {
        let g = read_gpda(GPDA_TEXT).unwrap();
        assert_eq!(g.num_users(), 8);
        assert_eq!(g.max_superscript(), 3);
        assert_eq!(g.entry(0, 3), GpdaEntry::Labeled(Label::new(1, 1)));
        assert_eq!(g.entry(1, 2), GpdaEntry::Labeled(Label::new(0, 3)));
        assert!(g.validate().is_ok());
        assert_eq!(write_gpda(&g), GPDA_TEXT);
        assert_eq!(read_gpda(&write_gpda(&g)).unwrap(), g);
    }

    #[test]
    fn gpda_read_rejects_bare_integers() {
        let text = "GPDA v1\nK=2 F=1 Z=0 S=1 I=1\n0 0^1\n";
        let err = read_gpda(text).unwrap_err();
        match err {
            FormatError::Parse {
                line,
                column,
                message,
            } => {
                assert_eq!((line, column), (3, 1));
                assert!(message.contains("value^superscript"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn gpda_read_requires_its_own_header() {
        let err = read_gpda(TWO_ROW_TEXT).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 1, .. }));
    }
}
