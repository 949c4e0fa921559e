//! Line-oriented template files.
//!
//! ```text
//! FCCT1 <connectivity>
//! <label> <sample_count> <f0> ... <f(c-1)>
//! ```
//!
//! `FCCR1` files have the same header shape and append the mean raw counts
//! `<r0> ... <r(c-1)>` after the frequencies, for raw-total matching.

use std::fmt::Write as _;

use super::{Template, TemplateSet};
use crate::chaincode::DirectionScheme;
use crate::{Error, Result};

const NORMALIZED_MAGIC: &str = "FCCT1";
const RAW_MAGIC: &str = "FCCR1";

/// Frequencies read from a file must sum to one within this tolerance.
pub const FILE_SUM_TOLERANCE: f64 = 1e-6;

const MIN_SIGNIFICANT_DIGITS: usize = 12;

/// Serializes a template set. Raw counts are written (as `FCCR1`) only when
/// `raw` is set, and then every template must carry them.
pub fn write_templates(ts: &TemplateSet, raw: bool) -> Result<String> {
    let mut out = String::new();
    let magic = if raw { RAW_MAGIC } else { NORMALIZED_MAGIC };
    writeln!(out, "{magic} {}", ts.scheme()).unwrap();
    for t in ts.templates() {
        write!(out, "{} {}", t.label, t.sample_count).unwrap();
        for &f in &t.frequencies {
            write!(out, " {}", decimal(f)).unwrap();
        }
        if raw {
            let counts = t.mean_counts.as_ref().ok_or(Error::MissingRawCounts(t.label))?;
            for &c in counts {
                write!(out, " {}", decimal(c)).unwrap();
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Shortest round-trip decimal, padded with zeros to at least 12 significant
/// digits.
fn decimal(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') {
        s.push('.');
    }
    let significant = s
        .trim_start_matches('-')
        .trim_start_matches(['0', '.'])
        .chars()
        .filter(char::is_ascii_digit)
        .count();
    let pad = if v == 0.0 {
        MIN_SIGNIFICANT_DIGITS
    } else {
        MIN_SIGNIFICANT_DIGITS.saturating_sub(significant)
    };
    s.extend(std::iter::repeat_n('0', pad));
    s
}

pub fn parse_templates(text: &str) -> Result<TemplateSet> {
    let err = |line: usize, message: String| Error::TemplateFormat { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let mut fields = header.split_whitespace();
    let raw = match fields.next() {
        Some(NORMALIZED_MAGIC) => false,
        Some(RAW_MAGIC) => true,
        other => return Err(err(1, format!("unknown magic {:?}", other.unwrap_or("")))),
    };
    let scheme = fields
        .next()
        .and_then(|c| c.parse::<u8>().ok())
        .ok_or_else(|| err(1, "missing connectivity".into()))
        .and_then(|c| DirectionScheme::try_from(c).map_err(|e| err(1, e.to_string())))?;
    if fields.next().is_some() {
        return Err(err(1, "trailing fields in header".into()));
    }

    let n = scheme.len();
    let expected = 2 + if raw { 2 * n } else { n };
    let mut templates = Vec::new();
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != expected {
            return Err(err(no, format!("expected {expected} fields, found {}", fields.len())));
        }
        let mut chars = fields[0].chars();
        let label = match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_uppercase() || c.is_ascii_digit() => c,
            _ => return Err(err(no, format!("invalid label {:?}", fields[0]))),
        };
        let sample_count: usize = fields[1]
            .parse()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| err(no, format!("invalid sample count {:?}", fields[1])))?;
        let numbers = fields[2..]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| err(no, format!("invalid number {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let (frequencies, counts) = numbers.split_at(n);
        let sum: f64 = frequencies.iter().sum();
        if (sum - 1.0).abs() > FILE_SUM_TOLERANCE {
            return Err(err(no, format!("frequencies sum to {sum}")));
        }
        templates.push(Template {
            label,
            scheme,
            frequencies: frequencies.to_vec(),
            sample_count,
            mean_counts: raw.then(|| counts.to_vec()),
        });
    }
    TemplateSet::new(scheme, templates)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(raw: bool) -> TemplateSet {
        TemplateSet::new(
            DirectionScheme::Four,
            vec![
                Template {
                    label: 'A',
                    scheme: DirectionScheme::Four,
                    frequencies: vec![0.25, 0.25, 0.25, 0.25],
                    sample_count: 1,
                    mean_counts: raw.then(|| vec![3.0, 3.0, 3.0, 3.0]),
                },
                Template {
                    label: '7',
                    scheme: DirectionScheme::Four,
                    frequencies: vec![0.1, 0.2, 0.3, 0.4],
                    sample_count: 3,
                    mean_counts: raw.then(|| vec![1.5, 3.0, 4.5, 6.0]),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn writes_expected_text() {
        let text = write_templates(&set(false), false).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("FCCT1 4"));
        assert_eq!(
            lines.next(),
            Some("A 1 0.250000000000 0.250000000000 0.250000000000 0.250000000000")
        );
        assert!(lines.next().unwrap().starts_with("7 3 0.100000000000 "));
    }

    #[test]
    fn round_trips_exactly() {
        for raw in [false, true] {
            let ts = set(raw);
            let text = write_templates(&ts, raw).unwrap();
            assert_eq!(parse_templates(&text).unwrap(), ts);
        }
        let third = TemplateSet::new(
            DirectionScheme::Four,
            vec![Template {
                label: 'X',
                scheme: DirectionScheme::Four,
                frequencies: vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
                sample_count: 1,
                mean_counts: None,
            }],
        )
        .unwrap();
        let text = write_templates(&third, false).unwrap();
        assert_eq!(parse_templates(&text).unwrap(), third);
    }

    #[test]
    fn raw_write_needs_counts() {
        assert!(matches!(
            write_templates(&set(false), true),
            Err(Error::MissingRawCounts('A'))
        ));
    }

    #[test]
    fn decimal_padding() {
        assert_eq!(decimal(0.0), "0.000000000000");
        assert_eq!(decimal(1.0), "1.00000000000");
        assert_eq!(decimal(0.0625), "0.0625000000000");
        assert_eq!(decimal(12.5), "12.5000000000");
        let long = decimal(1.0 / 3.0);
        assert_eq!(long.parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    fn line_of(text: &str) -> usize {
        match parse_templates(text) {
            Err(Error::TemplateFormat { line, .. }) => line,
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_files() {
        assert_eq!(line_of(""), 1);
        assert_eq!(line_of("FCCT2 8\n"), 1);
        assert_eq!(line_of("FCCT1 6\n"), 1);
        assert_eq!(line_of("FCCT1\n"), 1);
        assert_eq!(line_of("FCCT1 4\nA 1 0.5 0.5 0\n"), 2);
        assert_eq!(line_of("FCCT1 4\nA 1 0.5 0.5 0 0 0\n"), 2);
        assert_eq!(line_of("FCCT1 4\nA 1 0.5 0.5 0.5 0\n"), 2);
        assert_eq!(line_of("FCCT1 4\nA 0 0.5 0.5 0 0\n"), 2);
        assert_eq!(line_of("FCCT1 4\nab 1 0.5 0.5 0 0\n"), 2);
        assert_eq!(line_of("FCCT1 4\nA 1 0.5 0.5 x 0\n"), 2);
        assert_eq!(line_of("FCCT1 4\n\nA 1 0.5 0.5 -0 0\nB 1 1 0 0 0 0\n"), 4);
        assert_eq!(line_of("FCCR1 4\nA 1 0.5 0.5 0 0\n"), 2);
    }

    #[test]
    fn tolerates_small_rounding() {
        let ts = parse_templates("FCCT1 4\nA 1 0.3333333 0.3333333 0.3333333 0\n").unwrap();
        assert_eq!(ts.len(), 1);
    }
}
