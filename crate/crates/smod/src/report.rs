//! Parameter sweeps over (d, a) grids with closed-form comparison columns,
//! and the CSV serialization used for regression diffs.

use crate::error::{Error, Result};
use crate::modulus::{outer_inf, split_seed, Method};
use crate::space::SpaceSpec;
use crate::witness::thmc_bound;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaKind {
    /// min(4a/(2+d), 1) * d, the L1 value.
    L1,
    /// 2ad for the p = 2 gap in inner-product spaces.
    Hilbert2,
    None,
}

impl std::str::FromStr for FormulaKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(FormulaKind::L1),
            "hilbert2" => Ok(FormulaKind::Hilbert2),
            "none" => Ok(FormulaKind::None),
            other => Err(Error::Parse(format!("unknown formula `{other}`"))),
        }
    }
}

impl FormulaKind {
    pub fn value(&self, d: f64, a: f64) -> Result<Option<f64>> {
        match self {
            FormulaKind::L1 => Ok(Some(thmc_bound(d, a)?)),
            FormulaKind::Hilbert2 => Ok(Some(2.0 * a * d)),
            FormulaKind::None => Ok(None),
        }
    }

    /// The gap exponent the comparison formula refers to.
    pub fn p(&self) -> f64 {
        match self {
            FormulaKind::Hilbert2 => 2.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub space: String,
    pub d: f64,
    pub a: f64,
    pub estimate: f64,
    pub direction: String,
    pub formula: Option<f64>,
    pub abs_err: Option<f64>,
    pub method: String,
    pub seed: u64,
    pub evaluations: u64,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

/// Parses a `start:stop:step` grid into its (inclusive) values.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Parse(format!("grid `{s}` must be start:stop:step"));
    match parts.as_slice() {
        [single] => Ok(vec![single.trim().parse::<f64>().map_err(|_| bad())?]),
        [start, stop, step] => {
            let start: f64 = start.trim().parse().map_err(|_| bad())?;
            let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
            let step: f64 = step.trim().parse().map_err(|_| bad())?;
            if !step.is_finite() || step <= 0.0 {
                return Err(Error::Parse(format!("grid step must be positive in `{s}`")));
            }
            let mut out = Vec::new();
            let mut k = 0u32;
            loop {
                let v = start + step * k as f64;
                if v > stop + 1e-12 {
                    break;
                }
                out.push(v);
                k += 1;
            }
            Ok(out)
        }
        _ => Err(bad()),
    }
}

pub const DEFAULT_PAIR_BUDGET: usize = 24;

/// Runs the outer-infimum estimate over the (d, a) grid. Per-cell seeds are
/// split from the base seed by cell index, so results are independent of the
/// parallelism level; rows come back sorted by (d, a).
pub fn run_sweep(
    space: &SpaceSpec,
    d_grid: &[f64],
    a_grid: &[f64],
    formula: FormulaKind,
    method: Method,
    seed: u64,
    threads: Option<usize>,
) -> Result<SweepReport> {
    for &d in d_grid {
        if !(0.0 < d && d < 2.0) {
            return Err(Error::Domain(format!("sweep requires 0 < d < 2, got {d}")));
        }
    }
    for &a in a_grid {
        if a <= 0.0 {
            return Err(Error::Domain(format!("sweep requires a > 0, got {a}")));
        }
    }

    let cells: Vec<(usize, f64, f64)> = d_grid
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| a_grid.iter().enumerate().map(move |(j, &a)| (i * a_grid.len() + j, d, a)))
        .collect();

    let run_cell = |&(idx, d, a): &(usize, f64, f64)| -> Result<SweepRow> {
        let start = std::time::Instant::now();
        let cell_seed = split_seed(seed, idx as u64);
        let p = formula.p();
        let out = outer_inf(space, d, a, p, DEFAULT_PAIR_BUDGET, cell_seed, method)?;
        let f = formula.value(d, a)?;
        Ok(SweepRow {
            space: space.to_string(),
            d,
            a,
            estimate: out.estimate.value,
            direction: out.estimate.direction.to_string(),
            formula: f,
            abs_err: f.map(|fv| (out.estimate.value - fv).abs()),
            method: out.estimate.method.to_string(),
            seed: cell_seed,
            evaluations: out.estimate.evaluations,
            runtime_ms: start.elapsed().as_millis() as u64,
        })
    };

    let mut rows: Vec<SweepRow> = match threads {
        Some(1) => cells.iter().map(&run_cell).collect::<Result<_>>()?,
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?
            .install(|| cells.par_iter().map(run_cell).collect::<Result<_>>())?,
        None => cells.par_iter().map(run_cell).collect::<Result<_>>()?,
    };
    rows.sort_by(|r1, r2| {
        r1.d.partial_cmp(&r2.d).unwrap().then(r1.a.partial_cmp(&r2.a).unwrap())
    });
    Ok(SweepReport { rows })
}

/// Formats with `sig` significant digits in plain decimal notation.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", sig.saturating_sub(1), x);
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

pub const CSV_HEADER: &str =
    "space,d,a,estimate,direction,formula,abs_err,method,seed,evaluations,runtime_ms";

pub fn write_csv<W: Write>(report: &SweepReport, mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in &report.rows {
        let opt = |v: Option<f64>| v.map(|x| fmt_sig(x, 12)).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.space,
            fmt_sig(r.d, 12),
            fmt_sig(r.a, 12),
            fmt_sig(r.estimate, 12),
            r.direction,
            opt(r.formula),
            opt(r.abs_err),
            r.method,
            r.seed,
            r.evaluations,
            r.runtime_ms
        )?;
    }
    Ok(())
}

pub fn read_csv<R: std::io::Read>(r: R) -> Result<SweepReport> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let parse = |s: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}` in CSV")))
    };
    let parse_opt = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            parse(s).map(Some)
        }
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let rec = record.map_err(|e| Error::Parse(format!("CSV: {e}")))?;
        if rec.len() != 11 {
            return Err(Error::Parse(format!("CSV row has {} fields, expected 11", rec.len())));
        }
        rows.push(SweepRow {
            space: rec[0].to_string(),
            d: parse(&rec[1])?,
            a: parse(&rec[2])?,
            estimate: parse(&rec[3])?,
            direction: rec[4].to_string(),
            formula: parse_opt(&rec[5])?,
            abs_err: parse_opt(&rec[6])?,
            method: rec[7].to_string(),
            seed: rec[8].parse().map_err(|_| Error::Parse("bad seed in CSV".into()))?,
            evaluations: rec[9].parse().map_err(|_| Error::Parse("bad count in CSV".into()))?,
            runtime_ms: rec[10].parse().map_err(|_| Error::Parse("bad runtime in CSV".into()))?,
        });
    }
    Ok(SweepReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.2:1.0:0.4").unwrap(), vec![0.2, 0.6000000000000001, 1.0]);
        assert_eq!(parse_grid("1").unwrap(), vec![1.0]);
        assert!(parse_grid("1:2:0").is_err());
        assert!(parse_grid("a:b:c").is_err());
        assert!(parse_grid("1:2:3:4").is_err());
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(5.0, 12), "5.00000000000");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(0.0, 12), "0.00000000000");
        assert_eq!(fmt_sig(1.23456789012_f64, 12), "1.23456789012");
        // idempotent under parse/format round trips
        for x in [0.1, 2.0 / 3.0, 123.456, 1e-4] {
            let s = fmt_sig(x, 12);
            let back: f64 = s.parse().unwrap();
            assert_eq!(fmt_sig(back, 12), s);
        }
    }

    #[test]
    fn sweep_rows_sorted_and_reproducible() {
        let space = SpaceSpec::L2 { n: 2 };
        let d = vec![1.0, 0.5];
        let a = vec![0.4, 0.1];
        let r1 = run_sweep(&space, &d, &a, FormulaKind::Hilbert2, Method::Witness, 9, Some(1))
            .unwrap();
        let r2 = run_sweep(&space, &d, &a, FormulaKind::Hilbert2, Method::Witness, 9, Some(4))
            .unwrap();
        assert_eq!(r1.rows.len(), 4);
        for w in r1.rows.windows(2) {
            assert!((w[0].d, w[0].a) <= (w[1].d, w[1].a));
        }
        for (x, y) in r1.rows.iter().zip(&r2.rows) {
            assert_eq!(x.estimate, y.estimate);
            assert_eq!(x.seed, y.seed);
            assert_eq!(x.evaluations, y.evaluations);
        }
        // hilbert2 comparison: estimates land on 2ad
        for row in &r1.rows {
            assert!(row.abs_err.unwrap() < 5e-3, "row {row:?}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let space = SpaceSpec::L2 { n: 2 };
        let report =
            run_sweep(&space, &[1.0], &[0.4], FormulaKind::Hilbert2, Method::Witness, 3, Some(1))
                .unwrap();
        let mut buf = Vec::new();
        write_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        let back = read_csv(&buf[..]).unwrap();
        let mut buf2 = Vec::new();
        write_csv(&back, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        let space = SpaceSpec::L2 { n: 2 };
        assert!(run_sweep(&space, &[2.5], &[0.1], FormulaKind::None, Method::Witness, 1, Some(1))
            .is_err());
        assert!(run_sweep(&space, &[1.0], &[0.0], FormulaKind::None, Method::Witness, 1, Some(1))
            .is_err());
    }
}
