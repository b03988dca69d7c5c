use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::smoother::Dataset;

/// A dataset rescaled to `x ∈ [0, 1]` together with the affine map back to
/// the original units: `x_original = offset + scale · x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub data: Dataset,
    pub offset: f64,
    pub scale: f64,
    pub warnings: Vec<String>,
}

impl Ingested {
    pub fn to_original_x(&self, x: f64) -> f64 {
        self.offset + self.scale * x
    }

    /// Bandwidths scale without the offset.
    pub fn to_original_h(&self, h: f64) -> f64 {
        h * self.scale
    }

    pub fn to_internal_h(&self, h: f64) -> f64 {
        h / self.scale
    }
}

pub fn ingest_csv(path: &Path, x_col: &str, y_col: &str) -> Result<Ingested> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(file, x_col, y_col)
}

/// Reads two named columns, sorts by `x`, rescales `x` to `[0, 1]` and separates
/// tied `x` values by the smallest representable step.
pub fn ingest_reader<R: Read>(reader: R, x_col: &str, y_col: &str) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Csv(format!("missing column '{name}'")))
    };
    let (xi, yi) = (column(x_col)?, column(y_col)?);

    let mut rows = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| Error::Csv(format!("row {row}: {e}")))?;
        let cell = |idx: usize, name: &str| -> Result<f64> {
            let raw = record.get(idx).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Csv(format!("row {row}: column '{name}' value {raw:?} is not a finite number")))
        };
        rows.push((cell(xi, x_col)?, cell(yi, y_col)?));
    }
    if rows.len() < Dataset::MIN_LEN {
        return Err(Error::InvalidDataset(format!(
            "need at least {} rows, got {}",
            Dataset::MIN_LEN,
            rows.len()
        )));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let offset = rows[0].0;
    let scale = rows[rows.len() - 1].0 - offset;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidDataset("x has no spread".into()));
    }
    let mut x: Vec<f64> = rows.iter().map(|r| ((r.0 - offset) / scale).clamp(0.0, 1.0)).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let ties = separate_ties(&mut x);
    let mut warnings = Vec::new();
    if ties > 0 {
        warnings.push(format!("{ties} tied x values were separated by one ulp"));
    }
    Ok(Ingested {
        data: Dataset::new(x, y)?,
        offset,
        scale,
        warnings,
    })
}

/// Makes a sorted vector in `[0, 1]` strictly increasing; returns the number of moved entries.
fn separate_ties(x: &mut [f64]) -> usize {
    let mut moved = 0;
    for i in 1..x.len() {
        if x[i] <= x[i - 1] {
            x[i] = x[i - 1].next_up();
            moved += 1;
        }
    }
    let n = x.len();
    if x[n - 1] > 1.0 {
        x[n - 1] = 1.0;
        for i in (0..n - 1).rev() {
            if x[i] >= x[i + 1] {
                x[i] = x[i + 1].next_down();
            }
        }
    }
    moved
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest(text: &str) -> Result<Ingested> {
        ingest_reader(text.as_bytes(), "x", "y")
    }

    #[test]
    fn affine_rescaling() {
        let got = ingest("x,y\n0,1\n50,2\n100,3\n").unwrap();
        assert_eq!(got.data.x(), &[0.0, 0.5, 1.0]);
        assert_eq!((got.offset, got.scale), (0.0, 100.0));
        assert_eq!(got.to_original_h(0.09), 9.0);
    }

    #[test]
    fn sorts_rows() {
        let got = ingest("y,x\n3,10\n1,-10\n2,0\n").unwrap();
        assert_eq!(got.data.y(), &[1.0, 2.0, 3.0]);
        assert_eq!(got.data.x(), &[0.0, 0.5, 1.0]);
        assert_eq!(got.to_original_x(0.5), 0.0);
    }

    #[test]
    fn reports_bad_row() {
        let err = ingest("x,y\n1,2\n2,oops\n3,4\n").unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        assert!(ingest("x,z\n1,2\n2,3\n3,4\n").unwrap_err().to_string().contains("missing column 'y'"));
        assert!(ingest("x,y\n1,2\n2,3\n").is_err());
    }

    #[test]
    fn ties_are_separated() {
        let got = ingest("x,y\n0,1\n1,2\n1,3\n2,4\n2,5\n").unwrap();
        let x = got.data.x();
        assert!(x.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(x[4], 1.0);
        assert_eq!(got.warnings.len(), 1);
        assert!((x[1] - 0.5).abs() < 1e-15 && (x[2] - 0.5).abs() < 1e-15);
    }
}
