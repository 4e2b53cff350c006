use std::fmt::Write as _;
use std::path::Path;

use torus_splines::GridFunction;

const AXES: [&str; 3] = ["x", "y", "z"];

// Values that round to zero print without a sign.
fn unsigned_zero(v: f64) -> f64 {
    if v.abs() < 5e-13 {
        0.0
    } else {
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

/// Renders grid samples as CSV (`x[,y[,z]],value`) or JSON lines, one record
/// per sample, first axis slowest. Numbers use twelve decimals.
pub fn render(grid: &GridFunction, format: Format) -> String {
    let axes = &AXES[..grid.dim()];
    let mut out = String::new();
    if format == Format::Csv {
        out.push_str(&axes.join(","));
        out.push_str(",value\n");
    }
    for (x, v) in grid.points() {
        let v = unsigned_zero(v);
        match format {
            Format::Csv => {
                for c in &x {
                    let _ = write!(out, "{c:.12},");
                }
                let _ = writeln!(out, "{v:.12}");
            }
            Format::Jsonl => {
                out.push('{');
                for (name, c) in axes.iter().zip(&x) {
                    let _ = write!(out, "\"{name}\":{c:.12},");
                }
                let _ = writeln!(out, "\"value\":{v:.12}}}");
            }
        }
    }
    out
}

pub fn emit(grid: &GridFunction, format: Format, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render(grid, format))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_grid() {
        let g = GridFunction::new(1, 4, vec![1.0; 4]).unwrap();
        let csv = render(&g, Format::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x,value");
        assert!(lines[1..].iter().all(|l| l.ends_with(",1.000000000000")));
        assert_eq!(lines[2], "1.570796326795,1.000000000000");
    }

    #[test]
    fn no_negative_zero() {
        let g = GridFunction::new(1, 4, vec![-1e-15, -0.0, 0.0, -2.0]).unwrap();
        let csv = render(&g, Format::Csv);
        assert!(!csv.contains("-0.000000000000"));
        assert!(csv.ends_with(",-2.000000000000\n"));
    }

    #[test]
    fn two_dimensional_order() {
        let n = 8;
        let g = GridFunction::new(2, n, (0..n * n).map(|i| i as f64).collect()).unwrap();
        let csv = render(&g, Format::Csv);
        let rows: Vec<Vec<f64>> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 64);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r[2], i as f64);
            assert!((r[0] - g.coordinate(i / n)).abs() < 1e-12);
            assert!((r[1] - g.coordinate(i % n)).abs() < 1e-12);
        }
    }

    #[test]
    fn jsonl_mirrors_csv() {
        let g = GridFunction::new(2, 4, (0..16).map(|i| 0.5 * i as f64).collect()).unwrap();
        let csv = render(&g, Format::Csv);
        let jsonl = render(&g, Format::Jsonl);
        for (c, j) in csv.lines().skip(1).zip(jsonl.lines()) {
            let f: Vec<&str> = c.split(',').collect();
            assert_eq!(j, format!("{{\"x\":{},\"y\":{},\"value\":{}}}", f[0], f[1], f[2]));
        }
        assert_eq!(render(&g, Format::Jsonl), jsonl);
    }
}
