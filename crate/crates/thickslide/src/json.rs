//! Paving documents.
//!
//! ```text
//! {"domain":[[lo,hi],...],"epsilon":e,
//!  "entries":[{"box":[[lo,hi],...],"class":"IN|PEN|OUT|UNKNOWN"},...],
//!  "counts":{"IN":n,"PEN":n,"OUT":n,"UNKNOWN":n},
//!  "meta":{"bisections":n,"classified":n}}
//! ```
//!
//! Numbers are written with 17 significant digits, so every double reads
//! back exactly. The document carries no timing information and is
//! byte-for-byte reproducible.

use std::fmt::Write as _;

use serde::Deserialize;
use thickslide_core::interval::{Interval, IntervalBox};
use thickslide_core::paver::{ClassCounts, Paving, PavingEntry, PavingMeta};
use thickslide_core::thickset::BoxClass;

/// `printf("%.17g")`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m.replace('.', "")),
        None => ("", mantissa.replace('.', "")),
    };
    if !(-4..17).contains(&exp) {
        let d = digits.trim_end_matches('0');
        let (head, tail) = d.split_at(1);
        let frac = if tail.is_empty() {
            String::new()
        } else {
            format!(".{tail}")
        };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{head}{frac}e{esign}{:02}", exp.abs());
    }
    let s = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    };
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{sign}{s}")
}

fn write_box(out: &mut String, b: &IntervalBox) {
    out.push('[');
    for (i, c) in b.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "[{},{}]", format_g17(c.lo()), format_g17(c.hi()));
    }
    out.push(']');
}

pub fn write_paving(p: &Paving) -> String {
    let mut out = String::with_capacity(64 + 48 * p.entries.len());
    out.push_str("{\"domain\":");
    write_box(&mut out, &p.domain);
    let _ = write!(out, ",\"epsilon\":{},\"entries\":[", format_g17(p.epsilon));
    for (i, e) in p.entries.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("{\"box\":");
        write_box(&mut out, &e.cell);
        let _ = write!(out, ",\"class\":\"{}\"}}", e.class.label());
    }
    let c = ClassCounts::from_entries(&p.entries);
    let _ = write!(
        out,
        "],\"counts\":{{\"IN\":{},\"PEN\":{},\"OUT\":{},\"UNKNOWN\":{}}},\
         \"meta\":{{\"bisections\":{},\"classified\":{}}}}}",
        c.inside, c.penumbra, c.outside, c.unknown, p.meta.bisections, p.meta.classified
    );
    out.push('\n');
    out
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("malformed paving document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid interval [{0}, {1}]")]
    Interval(f64, f64),
    #[error("unknown class '{0}'")]
    Class(String),
    #[error("entry {0} does not match the domain dimension")]
    Dimension(usize),
    #[error("counts do not match the entries")]
    Counts,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    domain: Vec<[f64; 2]>,
    epsilon: f64,
    entries: Vec<EntryDoc>,
    counts: CountsDoc,
    meta: MetaDoc,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    #[serde(rename = "box")]
    cell: Vec<[f64; 2]>,
    class: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CountsDoc {
    #[serde(rename = "IN")]
    inside: usize,
    #[serde(rename = "PEN")]
    penumbra: usize,
    #[serde(rename = "OUT")]
    outside: usize,
    #[serde(rename = "UNKNOWN")]
    unknown: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaDoc {
    bisections: usize,
    classified: usize,
}

fn to_box(bounds: &[[f64; 2]]) -> Result<IntervalBox, ReadError> {
    bounds
        .iter()
        .map(|&[lo, hi]| Interval::try_new(lo, hi).map_err(|_| ReadError::Interval(lo, hi)))
        .collect::<Result<Vec<_>, _>>()
        .map(IntervalBox::new)
}

pub fn read_paving(text: &str) -> Result<Paving, ReadError> {
    let doc: Doc = serde_json::from_str(text)?;
    let domain = to_box(&doc.domain)?;
    let entries = doc
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let cell = to_box(&e.cell)?;
            if cell.dim() != domain.dim() {
                return Err(ReadError::Dimension(i));
            }
            let class =
                BoxClass::from_label(&e.class).ok_or_else(|| ReadError::Class(e.class.clone()))?;
            Ok(PavingEntry { cell, class })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let counts = ClassCounts {
        inside: doc.counts.inside,
        penumbra: doc.counts.penumbra,
        outside: doc.counts.outside,
        unknown: doc.counts.unknown,
    };
    if counts != ClassCounts::from_entries(&entries) {
        return Err(ReadError::Counts);
    }
    Ok(Paving {
        domain,
        epsilon: doc.epsilon,
        entries,
        meta: PavingMeta {
            counts,
            bisections: doc.meta.bisections,
            classified: doc.meta.classified,
            elapsed: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.0, "-2"),
            (0.1, "0.10000000000000001"),
            (0.02, "0.02"),
            (1e-5, "1.0000000000000001e-05"),
            (123456.0, "123456"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (-0.375, "-0.375"),
            (0.0001, "0.0001"),
            (2.5e-300, "2.5e-300"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g17(x), want, "{x:e}");
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn one_entry_document() {
        let unit = IntervalBox::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]);
        let p = Paving {
            domain: unit.clone(),
            epsilon: 0.5,
            entries: vec![PavingEntry {
                cell: unit,
                class: BoxClass::Out,
            }],
            meta: PavingMeta::default(),
        };
        let text = write_paving(&p);
        assert!(text.contains(r#""entries":[{"box":[[0,1],[0,1]],"class":"OUT"}]"#));
        assert!(text.contains(r#""counts":{"IN":0,"PEN":0,"OUT":1,"UNKNOWN":0}"#));
        let back = read_paving(&text).unwrap();
        assert_eq!(back.entries, p.entries);
    }

    #[test]
    fn rejects_inconsistent_documents() {
        let doc = r#"{"domain":[[0,1]],"epsilon":0.1,"entries":[{"box":[[0,1]],"class":"MAYBE"}],
                      "counts":{"IN":0,"PEN":0,"OUT":0,"UNKNOWN":0},"meta":{"bisections":0,"classified":1}}"#;
        assert!(matches!(read_paving(doc), Err(ReadError::Class(_))));
        let doc = doc.replace("MAYBE", "IN");
        assert!(matches!(read_paving(&doc), Err(ReadError::Counts)));
        let doc = doc.replace("[[0,1]],\"class", "[[1,0]],\"class");
        assert!(matches!(
            read_paving(&doc),
            Err(ReadError::Interval(1.0, 0.0))
        ));
    }
}
