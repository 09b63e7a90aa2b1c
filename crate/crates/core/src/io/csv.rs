use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::pauli::{HybridMarginal, RingLattice};
use crate::quadrature::{SphereGrid, UniformGrid};
use crate::specfun::HalfInt;
use crate::spintomo::SpinMarginal;
use crate::symtomo::{QuadratureMarginal, SymplecticFrame};
use crate::{Error, Result};

/// A numeric table with a JSON header: line 1 is `# {json}`, line 2 the
/// comma-separated column names, then one row per line.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Rows are limited to keep hostile inputs from exhausting memory.
const MAX_ROWS: usize = 1 << 26;

impl CsvTable {
    pub fn render(&self) -> String {
        let mut out = format!("# {}\n{}\n", self.header, self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = match lines.next() {
            Some((_, l)) => {
                let body = l.strip_prefix("# ").ok_or_else(|| Error::parse(1, "header must start with '# '"))?;
                serde_json::from_str(body).map_err(|e| Error::parse(1, format!("header is not JSON: {e}")))?
            }
            None => return Err(Error::parse(1, "empty file")),
        };
        let columns: Vec<String> = match lines.next() {
            Some((_, l)) if !l.trim().is_empty() => l.split(',').map(|c| c.trim().to_string()).collect(),
            _ => return Err(Error::parse(2, "missing column names")),
        };
        let mut rows = Vec::new();
        for (i, l) in lines {
            if l.trim().is_empty() {
                continue;
            }
            if rows.len() >= MAX_ROWS {
                return Err(Error::parse(i + 1, "too many rows"));
            }
            let row = l
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| Error::parse(i + 1, format!("not a number: {c:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::parse(i + 1, format!("{} cells, expected {}", row.len(), columns.len())));
            }
            rows.push(row);
        }
        Ok(Self { header, columns, rows })
    }

    fn header_field<T: DeserializeOwned>(&self, key: &str) -> Result<T> {
        let v = self.header.get(key).ok_or_else(|| Error::parse(1, format!("header lacks `{key}`")))?;
        serde_json::from_value(v.clone()).map_err(|e| Error::parse(1, format!("header `{key}`: {e}")))
    }

    /// The header's `kind` tag.
    pub fn kind(&self) -> Result<String> {
        self.header_field("kind")
    }

    fn expect_kind(&self, kind: &str) -> Result<()> {
        let got: String = self.header_field("kind")?;
        if got != kind {
            return Err(Error::parse(1, format!("expected a {kind} table, found {got}")));
        }
        Ok(())
    }

    fn expect_rows(&self, n: usize) -> Result<()> {
        if self.rows.len() != n {
            return Err(Error::Lattice(format!("{} rows, lattice needs {n}", self.rows.len())));
        }
        Ok(())
    }

    /// Checks that column `col` of row `r` equals `want` bit for bit.
    fn expect_cell(&self, r: usize, col: usize, want: f64) -> Result<()> {
        let got = self.rows[r][col];
        if got != want && !(got.is_nan() && want.is_nan()) {
            return Err(Error::parse(r + 3, format!("column {} is {got}, lattice has {want}", self.columns[col])));
        }
        Ok(())
    }

    fn last(&self, r: usize) -> f64 {
        self.rows[r][self.columns.len() - 1]
    }
}

fn checks(defect: f64, min: f64) -> Value {
    json!({ "normalization_defect": defect, "min_value": min })
}

pub fn quadrature_to_csv(w: &QuadratureMarginal) -> CsvTable {
    let nodes = w.grid.nodes();
    let mut rows = Vec::new();
    for (f, frame) in w.frames.iter().enumerate() {
        for (ix, &x) in nodes.iter().enumerate() {
            rows.push(vec![f as f64, frame.mu, frame.nu, x, w.values[f][ix]]);
        }
    }
    CsvTable {
        header: json!({
            "kind": "symplectic",
            "grid": w.grid,
            "frames": w.frames,
            "checks": checks(w.normalization_defect(), w.min_value()),
        }),
        columns: ["frame", "mu", "nu", "x", "w"].map(String::from).to_vec(),
        rows,
    }
}

pub fn quadrature_from_csv(t: &CsvTable) -> Result<QuadratureMarginal> {
    t.expect_kind("symplectic")?;
    let grid: UniformGrid = t.header_field("grid")?;
    let frames: Vec<SymplecticFrame> = t.header_field("frames")?;
    if grid.points == 0 || grid.points > MAX_ROWS || frames.is_empty() {
        return Err(Error::parse(1, "empty or oversized lattice"));
    }
    t.expect_rows(grid.points.saturating_mul(frames.len()))?;
    let nodes = grid.nodes();
    let mut values = Vec::with_capacity(frames.len());
    for (f, frame) in frames.iter().enumerate() {
        let mut row = Vec::with_capacity(nodes.len());
        for (ix, &x) in nodes.iter().enumerate() {
            let r = f * nodes.len() + ix;
            t.expect_cell(r, 0, f as f64)?;
            t.expect_cell(r, 1, frame.mu)?;
            t.expect_cell(r, 2, frame.nu)?;
            t.expect_cell(r, 3, x)?;
            row.push(t.last(r));
        }
        values.push(row);
    }
    QuadratureMarginal::new(grid, frames, values)
}

pub fn spin_to_csv(w: &SpinMarginal) -> CsvTable {
    let grid = w.grid();
    let mut rows = Vec::new();
    for (k, s) in w.j.projections().enumerate() {
        for (ia, &a) in grid.alphas.iter().enumerate() {
            for (ib, &b) in grid.betas.iter().enumerate() {
                rows.push(vec![s.value(), a, b, w.get(k, ia, ib)]);
            }
        }
    }
    CsvTable {
        header: json!({
            "kind": "spin",
            "j": w.j,
            "n_alpha": w.n_alpha,
            "n_beta": w.n_beta,
            "checks": checks(w.normalization_defect(), w.min_value()),
        }),
        columns: ["s", "alpha", "beta", "w"].map(String::from).to_vec(),
        rows,
    }
}

pub fn spin_from_csv(t: &CsvTable) -> Result<SpinMarginal> {
    t.expect_kind("spin")?;
    let j: HalfInt = t.header_field("j")?;
    let n_alpha: usize = t.header_field("n_alpha")?;
    let n_beta: usize = t.header_field("n_beta")?;
    if j.twice() < 0 || j.twice() > crate::spintomo::MAX_SPIN_TWICE || n_alpha == 0 || n_beta == 0 || n_alpha > 4096 || n_beta > 4096 {
        return Err(Error::parse(1, "spin lattice out of range"));
    }
    t.expect_rows(j.multiplicity() * n_alpha * n_beta)?;
    let grid = crate::quadrature::SphereGrid::new(n_alpha, n_beta);
    let mut values = Vec::with_capacity(t.rows.len());
    let mut r = 0;
    for s in j.projections() {
        for &a in &grid.alphas {
            for &b in &grid.betas {
                t.expect_cell(r, 0, s.value())?;
                t.expect_cell(r, 1, a)?;
                t.expect_cell(r, 2, b)?;
                values.push(t.last(r));
                r += 1;
            }
        }
    }
    SpinMarginal::new(j, n_alpha, n_beta, values)
}

#[derive(Serialize, Deserialize)]
struct HybridHeader {
    kind: String,
    lattice: RingLattice,
    times: Vec<f64>,
}

fn hybrid_columns(lat: &RingLattice) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for k in 1..=lat.modes {
        cols.push(format!("x{k}"));
    }
    for k in 1..=lat.modes {
        cols.push(format!("mu{k}"));
        cols.push(format!("nu{k}"));
    }
    cols.extend(["s", "alpha", "beta", "w"].map(String::from));
    cols
}

fn hybrid_coords(lat: &RingLattice, grids: &(Vec<f64>, SphereGrid), t: f64, idx: usize) -> Vec<f64> {
    let p = lat.point_in(&grids.0, &grids.1, idx);
    let mut row = vec![t];
    row.extend(&p.xs);
    for f in &p.frames {
        row.push(f.mu);
        row.push(f.nu);
    }
    row.extend([p.s.value(), p.spin.alpha, p.spin.beta]);
    row
}

/// A time series of hybrid marginals on one lattice.
pub fn hybrid_to_csv(series: &[HybridMarginal]) -> Result<CsvTable> {
    let lat = series.first().ok_or_else(|| Error::Lattice("empty time series".into()))?.lattice.clone();
    if series.iter().any(|w| w.lattice != lat) {
        return Err(Error::Lattice("snapshots on different lattices".into()));
    }
    let mut rows = Vec::new();
    let grids = (lat.x.nodes(), lat.sphere());
    for w in series {
        for (idx, &v) in w.values.iter().enumerate() {
            let mut row = hybrid_coords(&lat, &grids, w.time, idx);
            row.push(v);
            rows.push(row);
        }
    }
    let defect = series.iter().map(|w| w.normalization_defect()).fold(0.0, f64::max);
    let min = series.iter().map(|w| w.min_value()).fold(f64::INFINITY, f64::min);
    let mut header = serde_json::to_value(HybridHeader {
        kind: "hybrid".into(),
        lattice: lat.clone(),
        times: series.iter().map(|w| w.time).collect(),
    })
    .map_err(|e| Error::Config(e.to_string()))?;
    header["checks"] = checks(defect, min);
    Ok(CsvTable { header, columns: hybrid_columns(&lat), rows })
}

pub fn hybrid_from_csv(t: &CsvTable) -> Result<Vec<HybridMarginal>> {
    t.expect_kind("hybrid")?;
    let h: HybridHeader = serde_json::from_value(t.header.clone()).map_err(|e| Error::parse(1, e.to_string()))?;
    h.lattice.validate()?;
    if t.columns != hybrid_columns(&h.lattice) {
        return Err(Error::parse(2, "columns do not match the lattice"));
    }
    let n = h.lattice.len();
    t.expect_rows(n.saturating_mul(h.times.len()))?;
    let mut out = Vec::with_capacity(h.times.len());
    let grids = (h.lattice.x.nodes(), h.lattice.sphere());
    for (k, &time) in h.times.iter().enumerate() {
        let mut values = Vec::with_capacity(n);
        for idx in 0..n {
            let r = k * n + idx;
            for (col, want) in hybrid_coords(&h.lattice, &grids, time, idx).into_iter().enumerate() {
                t.expect_cell(r, col, want)?;
            }
            values.push(t.last(r));
        }
        out.push(HybridMarginal::new(h.lattice.clone(), time, values)?);
    }
    Ok(out)
}
