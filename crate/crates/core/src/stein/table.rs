//! Tabulated f' for Monte Carlo use: cubic Hermite on (f', f'') nodes, with the c/y decay
//! towards the limits of f' beyond the last node.

use rayon::prelude::*;

use super::SteinSolution;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct FprimeTable {
    /// Uniform core [-core, core] with spacing `h`.
    core: f64,
    h: f64,
    core_nodes: Vec<(f64, f64)>,
    /// Geometric nodes at core·ratio^k on each side, k ≥ 1.
    ratio: f64,
    right: Vec<(f64, f64)>,
    left: Vec<(f64, f64)>,
    limits: (f64, f64),
    /// Finer nodes around the cusp of f'' at the strike: (start, spacing, nodes).
    patch: Option<(f64, f64, Vec<(f64, f64)>)>,
}

const PATCH_HALF: f64 = 0.05;
const PATCH_STEP: f64 = 1e-4;

impl FprimeTable {
    /// Default layout: spacing 0.005 on |y| ≤ 30 + 2|M|, then ratio 1.01 out to 10⁸.
    pub fn build(sol: &SteinSolution) -> Result<Self> {
        let m = match sol.test_fn().tag() {
            super::TestFnTag::Call(m) | super::TestFnTag::Put(m) => m,
            _ => 0.0,
        };
        Self::with_layout(sol, 30.0 + 2.0 * m, 0.005, 1.01, 1e8)
    }

    /// f'' has a cusp at the strike (±M), so nodes there are 10⁻⁴ apart.
    fn cusp_patch(sol: &SteinSolution) -> Result<Option<(f64, f64, Vec<(f64, f64)>)>> {
        let center = match sol.test_fn().tag() {
            super::TestFnTag::Call(m) => m,
            super::TestFnTag::Put(m) => -m,
            _ => return Ok(None),
        };
        let n = (2.0 * PATCH_HALF / PATCH_STEP).round() as usize;
        let start = center - PATCH_HALF;
        let nodes: Result<Vec<_>> = (0..=n)
            .into_par_iter()
            .map(|i| {
                let y = start + i as f64 * PATCH_STEP;
                Ok((sol.fprime(y)?, sol.fsecond(y)?))
            })
            .collect();
        Ok(Some((start, PATCH_STEP, nodes?)))
    }

    pub fn with_layout(sol: &SteinSolution, core: f64, h: f64, ratio: f64, reach: f64) -> Result<Self> {
        let n = (2.0 * core / h).round() as usize;
        let h = 2.0 * core / n as f64;
        let node = |y: f64| -> Result<(f64, f64)> { Ok((sol.fprime(y)?, sol.fsecond(y)?)) };
        let core_nodes: Result<Vec<_>> = (0..=n).into_par_iter().map(|i| node(-core + i as f64 * h)).collect();
        let k_max = ((reach / core).ln() / ratio.ln()).ceil() as i32;
        let side = |sign: f64| -> Result<Vec<(f64, f64)>> {
            (1..=k_max).into_par_iter().map(|k| node(sign * core * ratio.powi(k))).collect()
        };
        let (lim_lo, lim_hi) = sol.fprime_limits();
        let right = side(1.0)?;
        let left = side(-1.0)?;
        let limits = (
            if lim_lo.is_nan() { left.last().unwrap().0 } else { lim_lo },
            if lim_hi.is_nan() { right.last().unwrap().0 } else { lim_hi },
        );
        Ok(FprimeTable {
            core,
            h,
            core_nodes: core_nodes?,
            ratio,
            right,
            left,
            limits,
            patch: Self::cusp_patch(sol)?,
        })
    }

    #[inline]
    fn hermite(x0: f64, x1: f64, a: (f64, f64), b: (f64, f64), x: f64) -> f64 {
        let d = x1 - x0;
        let t = (x - x0) / d;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * a.0 + (t3 - 2.0 * t2 + t) * d * a.1 + (-2.0 * t3 + 3.0 * t2) * b.0 + (t3 - t2) * d * b.1
    }

    /// Interpolated f'(y).
    pub fn eval(&self, y: f64) -> f64 {
        if let Some((start, h, nodes)) = &self.patch {
            let u = (y - start) / h;
            if u >= 0.0 && u < (nodes.len() - 1) as f64 {
                let i = u.floor() as usize;
                let x0 = start + i as f64 * h;
                return Self::hermite(x0, x0 + h, nodes[i], nodes[i + 1], y);
            }
        }
        let ay = y.abs();
        if ay <= self.core {
            let u = (y + self.core) / self.h;
            let i = (u.floor() as usize).min(self.core_nodes.len() - 2);
            let x0 = -self.core + i as f64 * self.h;
            return Self::hermite(x0, x0 + self.h, self.core_nodes[i], self.core_nodes[i + 1], y);
        }
        let (nodes, edge, limit, sign) = if y > 0.0 {
            (&self.right, self.core_nodes[self.core_nodes.len() - 1], self.limits.1, 1.0)
        } else {
            (&self.left, self.core_nodes[0], self.limits.0, -1.0)
        };
        let k = ((ay / self.core).ln() / self.ratio.ln()).floor() as usize;
        if k >= nodes.len() {
            let last = nodes[nodes.len() - 1].0;
            let reach = self.core * self.ratio.powi(nodes.len() as i32);
            return limit + (last - limit) * reach / ay;
        }
        let x0 = self.core * self.ratio.powi(k as i32);
        let x1 = x0 * self.ratio;
        let a = if k == 0 { edge } else { nodes[k - 1] };
        let b = nodes[k];
        if sign > 0.0 {
            Self::hermite(x0, x1, a, b, ay)
        } else {
            // Nodes on the left are stored at -x; flip the slope for the |y| coordinate.
            Self::hermite(x0, x1, (a.0, -a.1), (b.0, -b.1), ay)
        }
    }

    pub fn limits(&self) -> (f64, f64) {
        self.limits
    }
}

#[cfg(test)]
mod tests {
    use super::super::{SteinSolution, SteinTestFn};
    use super::*;

    #[test]
    fn table_reproduces_direct_values() {
        let s = SteinSolution::new(SteinTestFn::call(4.0).unwrap(), 1.5, 0.3).unwrap();
        let t = FprimeTable::with_layout(&s, 20.0, 0.005, 1.01, 1e8).unwrap();
        for &y in &[-1e9, -3e5, -250.0, -20.5, -7.31, 0.0, 3.9, 4.1, 19.99, 33.3, 1e4, 2e9] {
            let d = s.fprime(y).unwrap();
            let v = t.eval(y);
            assert!((d - v).abs() < 1e-8, "y={y}: {v} vs {d}");
        }
        for &y in &[3.999, 4.00013, 4.013] {
            let (d, v) = (s.fprime(y).unwrap(), t.eval(y));
            assert!((d - v).abs() < 1e-6, "y={y}: {v} vs {d}");
        }
    }
}
