//! Count files: one CSV row per outcome cell.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use super::setting::{outcome_index, parse_basis_label, CountRecord, TomographySetting, OUTCOMES};
use crate::error::{Error, Result};

pub const COUNTS_HEADER: [&str; 7] = [
    "setting_c",
    "setting_d",
    "setting_b",
    "c",
    "b",
    "count",
    "shots",
];

pub fn write_counts<W: Write>(out: W, records: &[CountRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(COUNTS_HEADER).map_err(to_err)?;
    for r in records {
        let (sc, sd, sb) = r.setting.labels();
        for (k, (c, b)) in OUTCOMES.into_iter().enumerate() {
            w.write_record([
                sc.as_str(),
                sd.as_str(),
                sb.as_str(),
                &c.to_string(),
                &b.to_string(),
                &r.counts[k].to_string(),
                &r.shots.to_string(),
            ])
            .map_err(to_err)?;
        }
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

type Labels = (String, String, String);
/// Setting, the outcome cells seen so far, and the shot count.
type PartialRecord = (TomographySetting, [Option<f64>; 4], f64);

pub fn read_counts<R: Read>(input: R) -> Result<Vec<CountRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().ne(COUNTS_HEADER) {
        return Err(Error::Parse(format!(
            "count file header must be `{}`",
            COUNTS_HEADER.join(",")
        )));
    }

    // keyed by labels so output order follows first appearance
    let mut order: Vec<Labels> = Vec::new();
    let mut cells: BTreeMap<Labels, PartialRecord> = BTreeMap::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        let at = |msg: String| Error::Parse(format!("count file row {}: {msg}", line + 2));
        let field = |i: usize| {
            row.get(i)
                .ok_or_else(|| at(format!("missing `{}`", COUNTS_HEADER[i])))
        };
        let num = |i: usize| -> Result<f64> {
            let s = field(i)?;
            s.parse::<f64>()
                .map_err(|_| at(format!("`{s}` is not a number")))
        };
        let sign = |i: usize| -> Result<i8> {
            match field(i)? {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                s => Err(at(format!("outcome `{s}` must be +1 or -1"))),
            }
        };
        let setting = TomographySetting {
            c_basis: parse_basis_label(field(0)?)?,
            d_prep: field(1)?.parse()?,
            b_basis: parse_basis_label(field(2)?)?,
        };
        let key = (
            field(0)?.to_string(),
            field(1)?.to_string(),
            field(2)?.to_string(),
        );
        let (c, b, count, shots) = (sign(3)?, sign(4)?, num(5)?, num(6)?);
        let entry = cells.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            (setting, [None; 4], shots)
        });
        if entry.2 != shots {
            return Err(at(format!(
                "shots {shots} disagree with earlier rows ({})",
                entry.2
            )));
        }
        let slot = &mut entry.1[outcome_index(c, b)];
        if slot.is_some() {
            return Err(at(format!("duplicate cell c={c}, b={b}")));
        }
        *slot = Some(count);
    }

    order
        .into_iter()
        .map(|key| {
            let (setting, counts, shots) = cells.remove(&key).expect("key recorded on insert");
            let mut full = [0.0; 4];
            for (k, c) in counts.iter().enumerate() {
                full[k] = c.ok_or_else(|| {
                    Error::Parse(format!("setting {setting} lacks cell {:?}", OUTCOMES[k]))
                })?;
            }
            CountRecord::new(setting, full, shots)
        })
        .collect()
}

pub fn write_counts_file(path: &Path, records: &[CountRecord]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_counts(std::io::BufWriter::new(file), records)
}

pub fn read_counts_file(path: &Path) -> Result<Vec<CountRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_counts(std::io::BufReader::new(file))
}
