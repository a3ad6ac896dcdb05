//! Atomic file output and the per-point CSV table.

use std::io::Write;
use std::path::Path;

use chernlab_core::ChartPoint;

/// Per-point scalar outputs. Missing values are written as empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub dim: usize,
    pub columns: Vec<String>,
    pub rows: Vec<(ChartPoint, Vec<Option<f64>>)>,
}

impl Table {
    pub fn new(dim: usize, columns: &[&str]) -> Self {
        Self {
            dim,
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, point: &ChartPoint, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push((point.clone(), values.into_iter().map(Some).collect()));
    }

    /// Appends `other` with its columns prefixed by `prefix.`; existing
    /// rows get empty cells for the new columns and vice versa.
    pub fn merge(&mut self, prefix: &str, other: Table) {
        let offset = self.columns.len();
        let added = other.columns.len();
        self.columns.extend(other.columns.iter().map(|c| format!("{prefix}.{c}")));
        for (_, row) in &mut self.rows {
            row.extend(std::iter::repeat_n(None, added));
        }
        for (p, vals) in other.rows {
            let mut row = vec![None; offset];
            row.extend(vals);
            self.rows.push((p, row));
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = Vec::new();
        for k in 1..=self.dim {
            header.push(format!("z{k}_re"));
            header.push(format!("z{k}_im"));
        }
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for (p, vals) in &self.rows {
            let mut rec: Vec<String> = Vec::with_capacity(header.len());
            for z in p.coords() {
                rec.push(format!("{:e}", z.re));
                rec.push(format!("{:e}", z.im));
            }
            rec.extend(vals.iter().map(|v| v.map(|x| format!("{x:e}")).unwrap_or_default()));
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

/// Writes through a temporary file in the destination directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chernlab_core::C64;

    fn pt(x: f64) -> ChartPoint {
        ChartPoint::new(vec![C64::new(x, -x)]).unwrap()
    }

    #[test]
    fn merged_tables_pad_missing_cells() {
        let mut a = Table::new(1, &[]);
        let mut b = Table::new(1, &["x"]);
        b.push(&pt(1.0), vec![2.0]);
        let mut c = Table::new(1, &["y", "z"]);
        c.push(&pt(0.5), vec![3.0, 4.0]);
        a.merge("b", b);
        a.merge("c", c);
        let text = String::from_utf8(a.to_csv().unwrap()).unwrap();
        assert_eq!(text, "z1_re,z1_im,b.x,c.y,c.z\n1e0,-1e0,2e0,,\n5e-1,-5e-1,,3e0,4e0\n");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
