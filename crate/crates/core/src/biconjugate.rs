//! Brute-force convex envelope `J**` on meshes with one or two unknowns.
//!
//! `J` is sampled on a uniform box grid and transformed twice with the
//! discrete Legendre transform
//!
//! ```text
//! J*(s)  = max_u  s·u − J(u)
//! J**(u) = max_s  s·u − J*(s)
//! ```
//!
//! over a slope grid that spans the finite-difference slopes of `J` on the
//! box and contains `s = 0`, so `min J** = min J` on the grid exactly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::DcSplit;
use crate::io::fmt_num;
use crate::mesh::Field;
use crate::report::CheckReport;

/// Slope-grid refinement relative to the point grid, per axis, for one
/// unknown.
const SLOPE_REFINE_1D: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Biconjugate {
    /// Grid points, each of length `dof`.
    pub points: Vec<Vec<f64>>,
    pub j: Vec<f64>,
    pub jss: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
    pub per_axis: usize,
    /// `Σ Δu · Δs` over axes: how far the discrete envelope may sit below
    /// the continuous one.
    pub resolution: f64,
}

pub fn biconjugate_bruteforce(dc: &DcSplit, lo: f64, hi: f64, grid_points: usize) -> Result<Biconjugate> {
    let mesh = dc.mesh();
    let dof = mesh.dof();
    if dof > 2 {
        return Err(Error::InvalidParameter(format!(
            "brute-force biconjugate needs at most 2 unknowns, mesh has {dof}"
        )));
    }
    if !(hi > lo) || grid_points < 3 {
        return Err(Error::InvalidParameter(format!(
            "need lo < hi and at least 3 grid points, got [{lo}, {hi}] with {grid_points}"
        )));
    }
    let du = (hi - lo) / (grid_points - 1) as f64;
    let axis: Vec<f64> = (0..grid_points).map(|i| lo + du * i as f64).collect();
    let points = tensor(&axis, dof);
    let j = points
        .par_iter()
        .map(|x| dc.value(&Field::new(mesh, x.clone())?))
        .collect::<Result<Vec<f64>>>()?;

    let (smin, smax) = slope_range(&j, grid_points, dof, du);
    let ns = if dof == 1 { SLOPE_REFINE_1D * grid_points } else { grid_points };
    let ds = (smax - smin) / (ns - 1) as f64;
    let mut saxis: Vec<f64> = (0..ns).map(|i| smin + ds * i as f64).collect();
    if !saxis.contains(&0.0) {
        saxis.push(0.0);
        saxis.sort_by(f64::total_cmp);
    }
    let slopes = tensor(&saxis, dof);

    let jstar: Vec<f64> = slopes
        .par_iter()
        .map(|s| {
            points
                .iter()
                .zip(&j)
                .map(|(x, jx)| dot(s, x) - jx)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let jss: Vec<f64> = points
        .par_iter()
        .map(|x| {
            slopes
                .iter()
                .zip(&jstar)
                .map(|(s, js)| dot(s, x) - js)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();

    let argmin = argmin(&j);
    let on_edge = points[argmin].iter().any(|&c| c == lo || c == hi);
    if on_edge {
        return Err(Error::MinimizerOnBoundary {
            point: points[argmin].clone(),
        });
    }
    Ok(Biconjugate {
        points,
        j,
        jss,
        lo,
        hi,
        per_axis: grid_points,
        resolution: dof as f64 * du * ds,
    })
}

fn tensor(axis: &[f64], dof: usize) -> Vec<Vec<f64>> {
    if dof == 1 {
        axis.iter().map(|&a| vec![a]).collect()
    } else {
        let mut out = Vec::with_capacity(axis.len() * axis.len());
        for &b in axis {
            for &a in axis {
                out.push(vec![a, b]);
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

/// Range of forward-difference slopes along every axis, padded by 10%.
fn slope_range(j: &[f64], m: usize, dof: usize, du: f64) -> (f64, f64) {
    let mut lo = 0.0_f64;
    let mut hi = 0.0_f64;
    let stride = |axis: usize| if axis == 0 { 1 } else { m };
    for axis in 0..dof {
        let st = stride(axis);
        for idx in 0..j.len() {
            let coord = if axis == 0 { idx % m } else { idx / m };
            if coord + 1 < m {
                let s = (j[idx + st] - j[idx]) / du;
                lo = lo.min(s);
                hi = hi.max(s);
            }
        }
    }
    let pad = 0.1 * (hi - lo).max(1e-12);
    (lo - pad, hi + pad)
}

impl Biconjugate {
    pub fn min_j(&self) -> f64 {
        self.j.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_jss(&self) -> f64 {
        self.jss.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest `J − J**` over the grid.
    pub fn max_gap(&self) -> f64 {
        self.j
            .iter()
            .zip(&self.jss)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest violation of midpoint convexity of `J**` along grid lines.
    pub fn convexity_defect(&self) -> f64 {
        let m = self.per_axis;
        let dof = self.points[0].len();
        let mut worst = 0.0_f64;
        for axis in 0..dof {
            let st = if axis == 0 { 1 } else { m };
            for idx in 0..self.jss.len() {
                let coord = if axis == 0 { idx % m } else { idx / m };
                if coord >= 1 && coord + 1 < m {
                    let mid = self.jss[idx];
                    let avg = 0.5 * (self.jss[idx - st] + self.jss[idx + st]);
                    worst = worst.max(mid - avg);
                }
            }
        }
        worst
    }

    /// Checks `J** ≤ J + 1e-9`, midpoint convexity within the transform
    /// resolution and `|min J** − min J| ≤ 1e-2`.
    pub fn report(&self) -> CheckReport {
        let mut rep = CheckReport::new("biconj");
        let excess = self
            .jss
            .iter()
            .zip(&self.j)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max);
        rep.conclusion("minorant", excess, 1e-9);
        rep.conclusion("convexity", self.convexity_defect(), self.resolution);
        let (mj, mjss) = (self.min_j(), self.min_jss());
        rep.conclusion("equal_infima", (mj - mjss).abs(), 1e-2);
        rep.value("min_J", mj);
        rep.value("min_Jss", mjss);
        rep.value("max_gap", self.max_gap());
        rep.value("resolution", self.resolution);
        rep.value("grid_points", self.points.len() as f64);
        rep
    }

    /// CSV with one row per grid point: coordinates, `J`, `J**`.
    pub fn to_csv(&self) -> String {
        let dof = self.points[0].len();
        let mut s = if dof == 1 {
            String::from("u,J,Jss\n")
        } else {
            String::from("u1,u2,J,Jss\n")
        };
        for ((x, a), b) in self.points.iter().zip(&self.j).zip(&self.jss) {
            for c in x {
                s += &fmt_num(*c);
                s.push(',');
            }
            s += &format!("{},{}\n", fmt_num(*a), fmt_num(*b));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::gl_dc_split;
    use crate::mesh::build_mesh;
    use crate::primal::GLParams;

    fn single(gamma: f64) -> DcSplit {
        let m = build_mesh(1, 1, 1.0).unwrap();
        gl_dc_split(&GLParams::new(gamma, 1.0, 1.0, Field::zeros(m)).unwrap())
    }

    #[test]
    fn convex_case_reproduces_j() {
        let b = biconjugate_bruteforce(&single(1.0), -2.0, 2.0, 401).unwrap();
        assert!(b.report().passed(), "{}", b.report());
        assert_eq!(b.min_j(), b.min_jss());
        // J convex here: J** = J within two resolutions
        assert!(b.max_gap() <= 2.0 * b.resolution, "{} {}", b.max_gap(), b.resolution);
        let mid = b.points.iter().position(|x| x[0] == 0.0).unwrap();
        assert_eq!(b.j[mid], b.min_j());
    }

    #[test]
    fn double_well_envelope_is_below_between_wells() {
        let b = biconjugate_bruteforce(&single(0.01), -2.0, 2.0, 401).unwrap();
        let rep = b.report();
        assert!(rep.passed(), "{rep}");
        let mid = b.points.iter().position(|x| x[0] == 0.0).unwrap();
        assert!(b.j[mid] - b.jss[mid] >= b.resolution);
        // the envelope is flat between the wells
        let w = b.points.iter().position(|x| (x[0] - 0.5).abs() < 1e-12).unwrap();
        assert!((b.jss[w] - b.min_jss()).abs() <= 2.0 * b.resolution);
    }

    #[test]
    fn envelope_against_analytic_hull() {
        // For a symmetric double well the hull is min J on [−a, a] and J outside.
        let b = biconjugate_bruteforce(&single(0.01), -2.0, 2.0, 401).unwrap();
        let m = b.min_j();
        let a = b.points[b.j.iter().position(|&v| v == m).unwrap()][0].abs();
        for (x, (&j, &jss)) in b.points.iter().zip(b.j.iter().zip(&b.jss)) {
            let hull = if x[0].abs() <= a { m } else { j };
            assert!((jss - hull).abs() <= 2.0 * b.resolution, "{} {jss} {hull}", x[0]);
        }
    }

    #[test]
    fn two_unknowns() {
        let m = build_mesh(1, 2, 1.0).unwrap();
        let dc = gl_dc_split(&GLParams::new(0.02, 1.0, 1.0, Field::zeros(m)).unwrap());
        let b = biconjugate_bruteforce(&dc, -2.0, 2.0, 41).unwrap();
        let rep = b.report();
        assert!(rep.get("minorant").unwrap().pass);
        assert!(rep.get("equal_infima").unwrap().pass);
    }

    #[test]
    fn minimizer_on_edge_is_an_error() {
        let m = build_mesh(1, 1, 1.0).unwrap();
        let dc = gl_dc_split(&GLParams::new(1.0, 1.0, 1.0, Field::constant(m, 50.0)).unwrap());
        assert!(matches!(
            biconjugate_bruteforce(&dc, -1.0, 1.0, 51),
            Err(Error::MinimizerOnBoundary { .. })
        ));
        let big = build_mesh(1, 3, 1.0).unwrap();
        let dc3 = gl_dc_split(&GLParams::new(1.0, 1.0, 1.0, Field::zeros(big)).unwrap());
        assert!(biconjugate_bruteforce(&dc3, -1.0, 1.0, 11).is_err());
    }
}
