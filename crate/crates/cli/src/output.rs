//! Output formats and rendering for the single-value commands.

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use num_rational::Ratio;
use serde::Serialize;
use systole_core::census::{ScalingReport, Subfamily};
use systole_core::{IntersectionMatrix, LValue, QuadForm};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Writes to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s.into_bytes()
}

fn csv_rows<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn render_matrix(m: &IntersectionMatrix, format: Format) -> Vec<u8> {
    match format {
        Format::Json => json(m),
        Format::Csv => {
            let mut header = vec!["class".to_string(), "a".into(), "b".into(), "c".into()];
            header.extend((0..m.class_number()).map(|j| format!("I{j}")));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            csv_rows(
                &header,
                m.classes.iter().zip(&m.entries).enumerate().map(|(i, (f, row))| {
                    let mut r = vec![i.to_string(), f.a.to_string(), f.b.to_string(), f.c.to_string()];
                    r.extend(row.iter().map(u64::to_string));
                    r
                }),
            )
        }
        Format::Text => {
            let mut s = format!(
                "N = {}, D = {}{}, h = {}\n",
                m.n,
                m.discriminant,
                if m.squarefree { "" } else { " (not squarefree)" },
                m.class_number()
            );
            for (f, row) in m.classes.iter().zip(&m.entries) {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:>6}")).collect();
                s += &format!("{:>20} {}\n", f.to_string(), cells.join(" "));
            }
            s += &format!(
                "total {} (distinct pairs {}), a-bound {}, doubling passes {}, candidates {}\n",
                m.total(),
                m.total_distinct(),
                m.certificate.final_a_bound,
                m.certificate.doubling_passes,
                m.certificate.candidates
            );
            s.into_bytes()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassNumberOutput {
    pub discriminant: i64,
    pub class_number: usize,
    /// Reduced cycles, canonical form first.
    pub cycles: Vec<Vec<QuadForm>>,
}

pub fn render_class_number(out: &ClassNumberOutput, format: Format) -> Vec<u8> {
    match format {
        Format::Json => json(out),
        Format::Csv => csv_rows(
            &["class", "length", "canonical"],
            out.cycles.iter().enumerate().map(|(i, c)| {
                vec![i.to_string(), c.len().to_string(), c[0].to_string()]
            }),
        ),
        Format::Text => {
            let mut s = format!("D = {}: h = {}\n", out.discriminant, out.class_number);
            for (i, c) in out.cycles.iter().enumerate() {
                let forms: Vec<String> = c.iter().map(QuadForm::to_string).collect();
                s += &format!("  class {i} ({} forms): {}\n", c.len(), forms.join(" "));
            }
            s.into_bytes()
        }
    }
}

pub fn render_l_value(l: &LValue, format: Format) -> Vec<u8> {
    match format {
        Format::Json => json(l),
        Format::Csv => csv_rows(
            &["D", "value", "tail_bound", "rounding_bound", "delta"],
            [vec![
                l.d.to_string(),
                format!("{:.12}", l.value),
                format!("{:.3e}", l.tail_bound),
                format!("{:.3e}", l.rounding_bound),
                l.delta.to_string(),
            ]],
        ),
        Format::Text => format!(
            "L(chi_{}, 1) = {:.12} +/- {:.3e} (terms up to {})\n",
            l.d,
            l.value,
            l.radius(),
            l.delta
        )
        .into_bytes(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubfamilyOutput {
    pub size: usize,
    pub k: usize,
    pub crossing_number: u128,
    /// Mean over all `k`-subsets.
    pub average: Ratio<u128>,
    /// `(k/n)² cr`.
    pub bound: Ratio<u128>,
    pub subfamily: Subfamily,
}

pub fn render_subfamily(out: &SubfamilyOutput, format: Format) -> Vec<u8> {
    let s = &out.subfamily;
    match format {
        Format::Json => json(out),
        Format::Csv => csv_rows(
            &["size", "k", "cr", "average", "bound", "cr_subfamily", "strategy", "seed", "indices"],
            [vec![
                out.size.to_string(),
                out.k.to_string(),
                out.crossing_number.to_string(),
                out.average.to_string(),
                out.bound.to_string(),
                s.crossing_number.to_string(),
                format!("{:?}", s.strategy).to_lowercase(),
                s.seed.to_string(),
                s.indices.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
            ]],
        ),
        Format::Text => format!(
            "{} of {} curves, cr = {}: subfamily cr {} <= (k/n)^2 cr = {} (average {}), {:?} strategy, seed {}\nindices {:?}\n",
            out.k,
            out.size,
            out.crossing_number,
            s.crossing_number,
            out.bound,
            out.average,
            s.strategy,
            s.seed,
            s.indices
        )
        .into_bytes(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundOutput {
    pub genus: u64,
    pub curves: u64,
    pub lower_bound: u128,
    pub scaling: Option<ScalingReport>,
}

pub fn render_lower_bound(out: &LowerBoundOutput, format: Format) -> Vec<u8> {
    match format {
        Format::Json => json(out),
        Format::Csv => csv_rows(
            &["genus", "curves", "lower_bound"],
            [vec![out.genus.to_string(), out.curves.to_string(), out.lower_bound.to_string()]],
        ),
        Format::Text => {
            let mut s = format!(
                "genus {}, {} curves: crossing number >= {}\n",
                out.genus, out.curves, out.lower_bound
            );
            if let Some(r) = &out.scaling {
                s += &format!(
                    "alpha = {}, beta = {}: subfamily crossings g^{} (identity {}), residual {:.1e}\n\
                     limsup constant {} ({} at alpha = 0), contradiction reached: {}\n",
                    r.alpha,
                    r.beta,
                    r.subfamily_crossing_exponent,
                    r.exponent_identity,
                    r.numeric_residual,
                    r.limsup_constant,
                    r.limsup_constant_alpha_zero,
                    r.contradiction_reached
                );
            }
            s.into_bytes()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use systole_core::intersection_matrix;

    #[test]
    fn matrix_formats() {
        let m = intersection_matrix(4).unwrap();
        let text = String::from_utf8(render_matrix(&m, Format::Text)).unwrap();
        assert!(text.contains("not squarefree"));
        let csv = String::from_utf8(render_matrix(&m, Format::Csv)).unwrap();
        assert!(csv.starts_with("class,a,b,c,I0,I1\n"));
        let back: IntersectionMatrix = serde_json::from_slice(&render_matrix(&m, Format::Json)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn unwritable_path_reports_it() {
        let err = write_output(Some(Path::new("/nonexistent/dir/out.csv")), b"x").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/out.csv"));
    }
}
