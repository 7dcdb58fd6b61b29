use std::io::{Read, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::format::{format_number, round_to_printed};
use crate::capacity::{CapacityResult, SweepPoint};
use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const FIXED_COLUMNS: [&str; 6] = [
    "gamma",
    "N",
    "q_bits",
    "converged",
    "iterations",
    "mean_energy",
];

/// One row of a capacity table. Failed points carry `converged = false`,
/// NaN values and an empty distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    #[serde(serialize_with = "printed", deserialize_with = "nullable")]
    pub gamma: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(serialize_with = "printed", deserialize_with = "nullable")]
    pub q_bits: f64,
    pub converged: bool,
    pub iterations: usize,
    #[serde(serialize_with = "printed", deserialize_with = "nullable")]
    pub mean_energy: f64,
    #[serde(serialize_with = "printed_vec")]
    pub p: Vec<f64>,
}

fn printed<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(round_to_printed(*x))
    } else {
        s.serialize_none()
    }
}

fn printed_vec<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| round_to_printed(*x)))
}

fn nullable<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl ResultRecord {
    pub fn from_result(r: &CapacityResult) -> Self {
        Self {
            gamma: r.gamma,
            n: r.n,
            q_bits: r.q_bits,
            converged: r.converged,
            iterations: r.iterations,
            mean_energy: r.p_opt.mean_energy(),
            p: r.p_opt.probs().to_vec(),
        }
    }

    pub fn failed(gamma: f64, n: usize) -> Self {
        Self {
            gamma,
            n,
            q_bits: f64::NAN,
            converged: false,
            iterations: 0,
            mean_energy: f64::NAN,
            p: Vec::new(),
        }
    }

    pub fn from_point(point: &SweepPoint) -> Self {
        match &point.outcome {
            Ok(r) => Self::from_result(r),
            Err(_) => Self::failed(point.gamma, point.n),
        }
    }

    /// The record as a reader of the printed table sees it.
    pub fn rounded(&self) -> Self {
        Self {
            gamma: round_to_printed(self.gamma),
            q_bits: round_to_printed(self.q_bits),
            mean_energy: round_to_printed(self.mean_energy),
            p: self.p.iter().map(|&x| round_to_printed(x)).collect(),
            ..self.clone()
        }
    }

    /// Equality at printed precision, with NaN equal to NaN.
    pub fn same_printed(&self, other: &Self) -> bool {
        let eq = |a: f64, b: f64| format_number(a) == format_number(b);
        eq(self.gamma, other.gamma)
            && self.n == other.n
            && eq(self.q_bits, other.q_bits)
            && self.converged == other.converged
            && self.iterations == other.iterations
            && eq(self.mean_energy, other.mean_energy)
            && self.p.len() == other.p.len()
            && self.p.iter().zip(&other.p).all(|(&a, &b)| eq(a, b))
    }
}

fn sort_records(records: &mut [ResultRecord]) {
    records.sort_by(|a, b| a.n.cmp(&b.n).then(a.gamma.total_cmp(&b.gamma)));
}

fn table_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e.to_string()),
        other => Error::Table(format!("{other:?}")),
    }
}

/// Writes a header and one row per record, sorted by `(N, γ)`. The `p_k`
/// columns run to the largest `N` present; shorter rows end in empty fields.
pub fn write_csv<W: Write>(out: W, records: &[ResultRecord]) -> Result<()> {
    let mut rows = records.to_vec();
    sort_records(&mut rows);
    let width = rows.iter().map(|r| r.n + 1).max().unwrap_or(0);
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..width).map(|k| format!("p_{k}")));
    writer.write_record(&header).map_err(table_error)?;
    for r in &rows {
        let mut fields = vec![
            format_number(r.gamma),
            r.n.to_string(),
            format_number(r.q_bits),
            r.converged.to_string(),
            r.iterations.to_string(),
            format_number(r.mean_energy),
        ];
        fields.extend(r.p.iter().map(|&x| format_number(x)));
        fields.resize(FIXED_COLUMNS.len() + width, String::new());
        writer.write_record(&fields).map_err(table_error)?;
    }
    writer.flush()?;
    Ok(())
}

fn parse_float(field: &str, line: u64) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Table(format!("line {line}: '{field}' is not a number")))
}

fn parse_int(field: &str, line: u64) -> Result<usize> {
    field.parse().map_err(|_| {
        Error::Table(format!(
            "line {line}: '{field}' is not a nonnegative integer"
        ))
    })
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRecord>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(input);
    let columns = reader.headers().map_err(table_error)?.clone();
    let fixed = FIXED_COLUMNS.len();
    let header_ok = columns.len() >= fixed
        && columns.iter().take(fixed).eq(FIXED_COLUMNS)
        && columns
            .iter()
            .skip(fixed)
            .enumerate()
            .all(|(k, c)| c == format!("p_{k}"));
    if !header_ok {
        let header: Vec<&str> = columns.iter().collect();
        return Err(Error::Table(format!(
            "unexpected header '{}'",
            header.join(",")
        )));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(table_error)?;
        let no = row.position().map_or(0, |p| p.line());
        let fields: Vec<&str> = row.iter().collect();
        let converged = match fields[3] {
            "true" => true,
            "false" => false,
            other => return Err(Error::Table(format!("line {no}: bad flag '{other}'"))),
        };
        let filled = fields[fixed..].iter().take_while(|f| !f.is_empty()).count();
        if fields[fixed + filled..].iter().any(|f| !f.is_empty()) {
            return Err(Error::Table(format!(
                "line {no}: gap inside the distribution"
            )));
        }
        let p = fields[fixed..fixed + filled]
            .iter()
            .map(|f| parse_float(f, no))
            .collect::<Result<Vec<_>>>()?;
        records.push(ResultRecord {
            gamma: parse_float(fields[0], no)?,
            n: parse_int(fields[1], no)?,
            q_bits: parse_float(fields[2], no)?,
            converged,
            iterations: parse_int(fields[4], no)?,
            mean_energy: parse_float(fields[5], no)?,
            p,
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub config_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub provenance: Provenance,
    pub records: Vec<ResultRecord>,
}

/// Pretty-printed JSON with records sorted by `(N, γ)`; non-finite values
/// become `null`.
pub fn write_json<W: Write>(
    mut out: W,
    provenance: &Provenance,
    records: &[ResultRecord],
) -> Result<()> {
    let mut rows = records.to_vec();
    sort_records(&mut rows);
    let doc = SweepDocument {
        provenance: provenance.clone(),
        records: rows,
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<SweepDocument> {
    serde_json::from_reader(input).map_err(|e| Error::Table(e.to_string()))
}
