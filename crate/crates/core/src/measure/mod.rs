//! Finite signed/complex atomic measures with value semantics.
//!
//! Construction canonicalizes: atoms are sorted by position, positions
//! closer than [`MERGE_TOL`] are merged by weight addition, and exact-zero
//! weights are pruned. Every operation returns a new canonical measure.
//! Positions are *distinct* exactly when their Euclidean distance exceeds
//! [`MERGE_TOL`]; nothing in this crate certifies exact rational
//! independence — see [`product::ProductMeasure::distinctness_check`].

pub mod block;
pub mod product;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Positions within this Euclidean distance are treated as the same atom.
pub const MERGE_TOL: f64 = 1e-12;

/// Default cap on explicitly enumerated atoms.
pub const ENUM_BUDGET: u128 = 1 << 20;

/// A Dirac position with a complex weight. Zero weights never survive
/// canonicalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub position: Vec<f64>,
    pub weight: Complex64,
}

fn euclid(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn norm2(p: &[f64]) -> f64 {
    p.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Closed axis-aligned box in R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Window {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(Error::DegenerateInput(format!("window bounds [{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// One-dimensional interval [a, b].
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    /// Centered cube [-radius, radius]^d.
    pub fn cube(dim: usize, radius: f64) -> Self {
        Self { lower: vec![-radius; dim], upper: vec![radius; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (l, u))| *l <= *x && *x <= *u)
    }

    pub fn translate(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(Self {
            lower: self.lower.iter().zip(v).map(|(a, b)| a + b).collect(),
            upper: self.upper.iter().zip(v).map(|(a, b)| a + b).collect(),
        })
    }

    /// True when the boxes [lower, upper] and [lo, hi] intersect.
    pub fn intersects_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(lo.iter().zip(hi))
            .all(|((wl, wu), (bl, bu))| bl <= wu && wl <= bu)
    }
}

/// Finite atomic measure on R^d with canonical (sorted, merged) atom list.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    atoms: Vec<Atom>,
    min_gap: Option<f64>,
}

impl AtomicMeasure {
    pub fn new<I>(dim: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<f64>, Complex64)>,
    {
        let mut raw = Vec::new();
        for (position, weight) in atoms {
            if position.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: position.len() });
            }
            if position.iter().any(|x| !x.is_finite()) || !weight.re.is_finite() || !weight.im.is_finite() {
                return Err(Error::DegenerateInput("non-finite atom".into()));
            }
            raw.push(Atom { position, weight });
        }
        Ok(Self::canonicalize(dim, raw))
    }

    /// Unit Dirac measure at `position`.
    pub fn dirac(position: Vec<f64>) -> Self {
        let dim = position.len();
        Self {
            dim,
            atoms: vec![Atom { position, weight: Complex64::new(1.0, 0.0) }],
            min_gap: None,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, atoms: Vec::new(), min_gap: None }
    }

    fn canonicalize(dim: usize, mut raw: Vec<Atom>) -> Self {
        raw.sort_by(|a, b| a.position.partial_cmp(&b.position).expect("finite positions"));
        let mut merged: Vec<Atom> = Vec::with_capacity(raw.len());
        for atom in raw {
            // Look back through atoms whose first coordinate is within the
            // merge tolerance; in the sorted order nothing further back can
            // collide.
            let mut target = None;
            for (idx, prev) in merged.iter().enumerate().rev() {
                if dim > 0 && atom.position[0] - prev.position[0] > MERGE_TOL {
                    break;
                }
                if euclid(&atom.position, &prev.position) <= MERGE_TOL {
                    target = Some(idx);
                    break;
                }
            }
            match target {
                Some(idx) => merged[idx].weight += atom.weight,
                None => merged.push(atom),
            }
        }
        merged.retain(|a| a.weight != Complex64::new(0.0, 0.0));
        let min_gap = Self::compute_min_gap(&merged);
        Self { dim, atoms: merged, min_gap }
    }

    fn compute_min_gap(atoms: &[Atom]) -> Option<f64> {
        if atoms.len() < 2 {
            return None;
        }
        let mut best = f64::INFINITY;
        for i in 0..atoms.len() {
            for atom in &atoms[i + 1..] {
                if atom.position[0] - atoms[i].position[0] >= best {
                    break;
                }
                best = best.min(euclid(&atoms[i].position, &atom.position));
            }
        }
        Some(best)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Minimal pairwise distance between atom positions, `None` below two atoms.
    pub fn min_gap(&self) -> Option<f64> {
        self.min_gap
    }

    /// Sum of weight moduli.
    pub fn total_variation(&self) -> f64 {
        let mut acc = NeumaierSum::new();
        for a in &self.atoms {
            acc.add(a.weight.norm());
        }
        acc.total()
    }

    /// Total mass (sum of weights, the transform at t = 0).
    pub fn total_mass(&self) -> Complex64 {
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for a in &self.atoms {
            re.add(a.weight.re);
            im.add(a.weight.im);
        }
        Complex64::new(re.total(), im.total())
    }

    /// The variation measure |mu|: same positions, weights replaced by moduli.
    pub fn variation(&self) -> Self {
        Self {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { position: a.position.clone(), weight: Complex64::new(a.weight.norm(), 0.0) })
                .collect(),
            min_gap: self.min_gap,
        }
    }

    /// Largest Euclidean norm among atom positions (0 for the zero measure).
    pub fn support_radius(&self) -> f64 {
        self.atoms.iter().map(|a| norm2(&a.position)).fold(0.0, f64::max)
    }

    /// Per-coordinate bounding box of the support; `None` when empty.
    pub fn support_bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.atoms.is_empty() {
            return None;
        }
        let mut lo = self.atoms[0].position.clone();
        let mut hi = lo.clone();
        for a in &self.atoms[1..] {
            for c in 0..self.dim {
                lo[c] = lo[c].min(a.position[c]);
                hi[c] = hi[c].max(a.position[c]);
            }
        }
        Some((lo, hi))
    }

    pub fn translate(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        // min_gap is translation invariant; the sorted order is preserved.
        Ok(Self {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    position: a.position.iter().zip(v).map(|(x, s)| x + s).collect(),
                    weight: a.weight,
                })
                .collect(),
            min_gap: self.min_gap,
        })
    }

    pub fn scale_weights(&self, s: Complex64) -> Self {
        if s == Complex64::new(0.0, 0.0) {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { position: a.position.clone(), weight: a.weight * s })
                .collect(),
            min_gap: self.min_gap,
        }
    }

    /// Measure sum (atoms merged where positions coincide).
    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let raw = self.atoms.iter().chain(&other.atoms).cloned().collect();
        Ok(Self::canonicalize(self.dim, raw))
    }

    /// Convolution: all pairwise position sums with product weights,
    /// coincident sums merged, zero weights pruned.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.convolve_with_budget(other, ENUM_BUDGET)
    }

    pub fn convolve_with_budget(&self, other: &Self, budget: u128) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let needed = self.atoms.len() as u128 * other.atoms.len() as u128;
        if needed > budget {
            return Err(Error::BudgetExceeded {
                what: "convolution enumeration".into(),
                needed,
                budget,
                unit: "atoms",
            });
        }
        let mut raw = Vec::with_capacity(needed as usize);
        for a in &self.atoms {
            for b in &other.atoms {
                raw.push(Atom {
                    position: a.position.iter().zip(&b.position).map(|(x, y)| x + y).collect(),
                    weight: a.weight * b.weight,
                });
            }
        }
        Ok(Self::canonicalize(self.dim, raw))
    }

    /// Atoms with position inside the closed window.
    pub fn restrict(&self, window: &Window) -> Result<Self> {
        if window.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: window.dim() });
        }
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .filter(|a| window.contains(&a.position))
            .cloned()
            .collect();
        let min_gap = Self::compute_min_gap(&atoms);
        Ok(Self { dim: self.dim, atoms, min_gap })
    }

    /// Hahn–Jordan decomposition into four positive parts:
    /// mu = (real_pos - real_neg) + i (imag_pos - imag_neg).
    pub fn hahn_jordan(&self) -> HahnJordan {
        let mut parts: [Vec<Atom>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        for a in &self.atoms {
            let entries = [
                (0, a.weight.re.max(0.0)),
                (1, (-a.weight.re).max(0.0)),
                (2, a.weight.im.max(0.0)),
                (3, (-a.weight.im).max(0.0)),
            ];
            for (idx, value) in entries {
                if value != 0.0 {
                    parts[idx].push(Atom {
                        position: a.position.clone(),
                        weight: Complex64::new(value, 0.0),
                    });
                }
            }
        }
        let [rp, rn, ip, im] = parts;
        let wrap = |atoms: Vec<Atom>| {
            let min_gap = Self::compute_min_gap(&atoms);
            Self { dim: self.dim, atoms, min_gap }
        };
        HahnJordan {
            real_pos: wrap(rp),
            real_neg: wrap(rn),
            imag_pos: wrap(ip),
            imag_neg: wrap(im),
        }
    }
}

/// The four positive parts of a complex measure.
#[derive(Debug, Clone)]
pub struct HahnJordan {
    pub real_pos: AtomicMeasure,
    pub real_neg: AtomicMeasure,
    pub imag_pos: AtomicMeasure,
    pub imag_neg: AtomicMeasure,
}

impl HahnJordan {
    /// (real_pos - real_neg) + i (imag_pos - imag_neg).
    pub fn recombine(&self) -> Result<AtomicMeasure> {
        let i = Complex64::new(0.0, 1.0);
        self.real_pos
            .add(&self.real_neg.scale_weights(Complex64::new(-1.0, 0.0)))?
            .add(&self.imag_pos.scale_weights(i))?
            .add(&self.imag_neg.scale_weights(-i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// delta_0 + delta_a + delta_b - delta_{a+b}.
    pub(crate) fn ks(a: f64, b: f64) -> AtomicMeasure {
        AtomicMeasure::new(
            1,
            vec![
                (vec![0.0], c(1.0, 0.0)),
                (vec![a], c(1.0, 0.0)),
                (vec![b], c(1.0, 0.0)),
                (vec![a + b], c(-1.0, 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn merge_and_prune() {
        // delta_a + delta_a merges to a single atom of weight 2.
        let m = AtomicMeasure::new(1, vec![(vec![1.5], c(1.0, 0.0)), (vec![1.5], c(1.0, 0.0))]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.atoms()[0].weight, c(2.0, 0.0));
        // delta_a - delta_a cancels to the zero measure.
        let z = AtomicMeasure::new(1, vec![(vec![1.5], c(1.0, 0.0)), (vec![1.5], c(-1.0, 0.0))]).unwrap();
        assert!(z.is_empty());
        assert_eq!(z.total_variation(), 0.0);
    }

    #[test]
    fn convolution_identity_and_counts() {
        let mu = ks(0.3, 0.65);
        let delta0 = AtomicMeasure::dirac(vec![0.0]);
        assert_eq!(delta0.convolve(&mu).unwrap(), mu);

        // Q-independent-looking parameters: all 16 sums distinct, weights +-1.
        let nu = ks(2f64.sqrt() / 4.0, 3f64.sqrt() / 4.0)
            .convolve(&ks(5f64.sqrt() / 4.0, 7f64.sqrt() / 4.0))
            .unwrap();
        assert_eq!(nu.len(), 16);
        assert!(nu.atoms().iter().all(|a| (a.weight.norm() - 1.0).abs() < 1e-15));
        assert_eq!(nu.total_variation(), 16.0);
    }

    #[test]
    fn translation_group_action() {
        let mu = ks(0.25, 0.5);
        let there = mu.translate(&[3.25]).unwrap();
        let back = there.translate(&[-3.25]).unwrap();
        assert_eq!(back, mu);
        assert_eq!(there.total_variation(), mu.total_variation());
        assert_eq!(there.min_gap(), mu.min_gap());
    }

    #[test]
    fn hahn_jordan_splits_ks_block() {
        let mu = ks(0.25, 0.5);
        let hj = mu.hahn_jordan();
        assert_eq!(hj.real_pos.len(), 3);
        assert_eq!(hj.real_neg.len(), 1);
        assert!(hj.imag_pos.is_empty() && hj.imag_neg.is_empty());
        assert_eq!(hj.recombine().unwrap(), mu);

        let im = AtomicMeasure::new(1, vec![(vec![0.0], c(0.0, 1.0))]).unwrap();
        let hj = im.hahn_jordan();
        assert!(hj.real_pos.is_empty() && hj.real_neg.is_empty() && hj.imag_neg.is_empty());
        assert_eq!(hj.imag_pos.len(), 1);
    }

    #[test]
    fn variation_of_complex_weight() {
        let m = AtomicMeasure::new(1, vec![(vec![0.0], c(1.0, 1.0))]).unwrap();
        let v = m.variation();
        assert!((v.atoms()[0].weight.re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(v.atoms()[0].weight.im, 0.0);
    }

    #[test]
    fn restrict_keeps_window_atoms() {
        let mu = ks(0.25, 0.5);
        let all = mu.restrict(&Window::cube(1, 10.0)).unwrap();
        assert_eq!(all, mu);
        let some = mu.restrict(&Window::interval(0.2, 0.6).unwrap()).unwrap();
        assert_eq!(some.len(), 2);
    }
}
