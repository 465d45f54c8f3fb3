//! Lazy n-fold convolution of small atomic factors.
//!
//! The implicit atom count is the product of the factor sizes, so the
//! interesting instances (tens of factors) can never be enumerated. Total
//! variation and Fourier values are computed in product form; enumeration
//! is available below [`crate::measure::ENUM_BUDGET`].

use num_complex::Complex64;

use super::{Atom, AtomicMeasure, MERGE_TOL};
use crate::error::{Error, Result};

/// How we know the pairwise position sums are distinct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distinctness {
    /// Verified by full enumeration; carries the minimal pairwise gap.
    Certified { min_gap: f64 },
    /// Asserted by the construction (e.g. rationally independent data);
    /// never verified numerically. Flagged in reports.
    Asserted,
    Unknown,
}

/// `scale * delta_shift * factor_1 * ... * factor_k` (convolution product),
/// kept in factored form.
#[derive(Debug, Clone)]
pub struct ProductMeasure {
    dim: usize,
    factors: Vec<AtomicMeasure>,
    shift: Vec<f64>,
    scale: f64,
    distinctness: Distinctness,
}

impl ProductMeasure {
    pub fn new(factors: Vec<AtomicMeasure>, shift: Vec<f64>, scale: f64) -> Result<Self> {
        let dim = shift.len();
        for f in &factors {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: f.dim() });
            }
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::DegenerateInput(format!("product scale {scale}")));
        }
        Ok(Self { dim, factors, shift, scale, distinctness: Distinctness::Unknown })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[AtomicMeasure] {
        &self.factors
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn distinctness(&self) -> Distinctness {
        self.distinctness
    }

    /// Product of the factor atom counts.
    pub fn implicit_atom_count(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, f| acc.saturating_mul(f.len() as u128))
    }

    /// Marks distinctness as asserted by the construction. Use only when the
    /// generating data is rationally independent by design.
    pub fn assert_distinct(mut self) -> Self {
        if !matches!(self.distinctness, Distinctness::Certified { .. }) {
            self.distinctness = Distinctness::Asserted;
        }
        self
    }

    /// Runs the enumeration-based distinctness check and records the verdict.
    /// Fails with `BudgetExceeded` when the implicit count is over budget
    /// (the verdict is then "uncertified").
    pub fn certify_distinctness(mut self, budget: u128) -> Result<Self> {
        let (distinct, min_gap) = self.distinctness_check(budget)?;
        if distinct {
            self.distinctness = Distinctness::Certified { min_gap };
        } else {
            self.distinctness = Distinctness::Unknown;
        }
        Ok(self)
    }

    /// Enumerates all sum positions and reports whether they are pairwise
    /// distinct (gap > merge tolerance) together with the minimal gap.
    pub fn distinctness_check(&self, budget: u128) -> Result<(bool, f64)> {
        let needed = self.implicit_atom_count();
        if needed > budget {
            return Err(Error::BudgetExceeded {
                what: "distinctness enumeration".into(),
                needed,
                budget,
                unit: "positions",
            });
        }
        if needed <= 1 {
            let gap = if self.factors.len() == 1 {
                self.factors[0].min_gap().unwrap_or(f64::INFINITY)
            } else {
                f64::INFINITY
            };
            return Ok((true, gap));
        }
        // Single factor: positions are the factor's own, already distinct.
        if self.factors.len() == 1 {
            let gap = self.factors[0].min_gap().unwrap_or(f64::INFINITY);
            return Ok((gap > MERGE_TOL, gap));
        }
        let mut positions: Vec<Vec<f64>> = vec![self.shift.clone()];
        for f in &self.factors {
            let mut next = Vec::with_capacity(positions.len() * f.len());
            for p in &positions {
                for a in f.atoms() {
                    next.push(p.iter().zip(&a.position).map(|(x, y)| x + y).collect());
                }
            }
            positions = next;
        }
        positions.sort_by(|a, b| a.partial_cmp(b).expect("finite positions"));
        let mut best = f64::INFINITY;
        for i in 0..positions.len() {
            for q in &positions[i + 1..] {
                if q[0] - positions[i][0] >= best {
                    break;
                }
                let d = positions[i]
                    .iter()
                    .zip(q)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                best = best.min(d);
            }
        }
        Ok((best > MERGE_TOL, best))
    }

    /// log2 of the analytic total variation `scale * prod TV(factor_i)`.
    /// This is the true TV exactly when the sum positions are distinct.
    pub fn log2_analytic_total_variation(&self) -> f64 {
        let mut acc = self.scale.log2();
        for f in &self.factors {
            acc += f.total_variation().log2();
        }
        acc
    }

    /// Total variation. With certified or asserted distinctness this is the
    /// analytic product (no enumeration); otherwise it enumerates and merges
    /// within `budget`.
    pub fn total_variation(&self, budget: u128) -> Result<f64> {
        match self.distinctness {
            Distinctness::Certified { .. } | Distinctness::Asserted => {
                // Sequential product; falls back to log space on overflow.
                let mut tv = self.scale;
                for f in &self.factors {
                    tv *= f.total_variation();
                }
                if tv.is_finite() && tv > 0.0 {
                    Ok(tv)
                } else {
                    Ok(self.log2_analytic_total_variation().exp2())
                }
            }
            Distinctness::Unknown => Ok(self.enumerate(budget)?.total_variation()),
        }
    }

    /// Full enumeration into an atomic measure (merging collisions).
    pub fn enumerate(&self, budget: u128) -> Result<AtomicMeasure> {
        let needed = self.implicit_atom_count();
        if needed > budget {
            return Err(Error::BudgetExceeded {
                what: "product enumeration".into(),
                needed,
                budget,
                unit: "atoms",
            });
        }
        let mut acc: Vec<Atom> = vec![Atom {
            position: self.shift.clone(),
            weight: Complex64::new(self.scale, 0.0),
        }];
        for f in &self.factors {
            let mut next = Vec::with_capacity(acc.len() * f.len());
            for base in &acc {
                for a in f.atoms() {
                    next.push(Atom {
                        position: base.position.iter().zip(&a.position).map(|(x, y)| x + y).collect(),
                        weight: base.weight * a.weight,
                    });
                }
            }
            acc = next;
        }
        AtomicMeasure::new(self.dim, acc.into_iter().map(|a| (a.position, a.weight)))
    }

    /// Shifts the whole product; only the global shift changes.
    pub fn translate(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        let mut out = self.clone();
        out.shift = self.shift.iter().zip(v).map(|(a, b)| a + b).collect();
        Ok(out)
    }

    /// Multiplies the global scale.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::DegenerateInput(format!("scale factor {s}")));
        }
        let mut out = self.clone();
        out.scale = self.scale * s;
        Ok(out)
    }

    /// Per-coordinate bounding box of the implicit support, without
    /// enumeration.
    pub fn support_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.shift.clone();
        let mut hi = self.shift.clone();
        for f in &self.factors {
            if let Some((flo, fhi)) = f.support_bounds() {
                for c in 0..self.dim {
                    lo[c] += flo[c];
                    hi[c] += fhi[c];
                }
            }
        }
        (lo, hi)
    }

    /// Upper bound for the mean |position| of the implicit atoms relative to
    /// the shift: sum over factors of (sum |w||x|) / TV. Used for Lipschitz
    /// bounds of the transform.
    pub fn mean_position_norm_bound(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| {
                let m: f64 = f
                    .atoms()
                    .iter()
                    .map(|a| a.weight.norm() * a.position.iter().map(|x| x * x).sum::<f64>().sqrt())
                    .sum();
                let tv = f.total_variation();
                if tv > 0.0 {
                    m / tv
                } else {
                    0.0
                }
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks(a: f64, b: f64) -> AtomicMeasure {
        AtomicMeasure::new(
            1,
            vec![
                (vec![0.0], Complex64::new(1.0, 0.0)),
                (vec![a], Complex64::new(1.0, 0.0)),
                (vec![b], Complex64::new(1.0, 0.0)),
                (vec![a + b], Complex64::new(-1.0, 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn distinct_product_has_product_tv() {
        let p = ProductMeasure::new(
            vec![ks(2f64.sqrt() / 4.0, 3f64.sqrt() / 4.0), ks(5f64.sqrt() / 4.0, 7f64.sqrt() / 4.0)],
            vec![0.0],
            1.0,
        )
        .unwrap()
        .certify_distinctness(1 << 20)
        .unwrap();
        assert!(matches!(p.distinctness(), Distinctness::Certified { .. }));
        assert_eq!(p.total_variation(1 << 20).unwrap(), 16.0);
        assert_eq!(p.enumerate(1 << 20).unwrap().total_variation(), 16.0);
    }

    #[test]
    fn rational_collision_downgrades_tv() {
        // a_1 = b_1 forces 0 + a_1 = b_1 + 0 collisions across factors of a
        // single block; TV must come from enumeration-with-merge.
        let p = ProductMeasure::new(vec![ks(0.25, 0.25 + 1e-15)], vec![0.0], 1.0).unwrap();
        let (distinct, gap) = p.distinctness_check(1 << 20).unwrap();
        assert!(!distinct);
        assert!(gap <= MERGE_TOL);
    }

    #[test]
    fn budget_exceeded_is_uncertified() {
        let p = ProductMeasure::new(vec![ks(0.1, 0.2); 20], vec![0.0], 1.0).unwrap();
        assert!(matches!(
            p.distinctness_check(1 << 20),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn translate_only_moves_shift() {
        let p = ProductMeasure::new(vec![ks(0.25, 0.5)], vec![0.0], 1.0).unwrap();
        let q = p.translate(&[8.0]).unwrap();
        assert_eq!(q.shift(), &[8.0]);
        let (lo, hi) = q.support_bounds();
        assert!(lo[0] >= 8.0 && hi[0] <= 8.75 + 1e-12);
    }
}
