//! Pointwise Fourier transforms of atomic, product, and block measures
//! (almost periodic trigonometric sums), and certified sup-norm estimation
//! on windows.
//!
//! The sup over all of R of an almost periodic sum is not finitely
//! computable; what we certify is (a) a lower bound attained at a witness
//! point, (b) an upper bound on the window from a grid plus a Lipschitz
//! bound, and (c) the analytic global bound (total variation or a sharper
//! caller-supplied constant).

pub mod compact;
pub mod sinc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::block::{BlockMeasure, BlockPayload};
use crate::measure::product::ProductMeasure;
use crate::measure::{AtomicMeasure, Window};
use crate::sum::NeumaierSum;
use crate::trig::{phasor_neg, sin_cos_2pi};

/// Cap on grid nodes in one sup-norm scan.
pub const GRID_BUDGET: u128 = 10_000_000;

/// Transform of an atomic measure at `t`: sum of w_j exp(-2 pi i x_j . t),
/// accumulated with compensated summation.
pub fn ft_atomic(mu: &AtomicMeasure, t: &[f64]) -> Complex64 {
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for a in mu.atoms() {
        let phase: f64 = a.position.iter().zip(t).map(|(x, s)| x * s).sum();
        let (pr, pi) = phasor_neg(phase);
        re.add(a.weight.re * pr - a.weight.im * pi);
        im.add(a.weight.re * pi + a.weight.im * pr);
    }
    Complex64::new(re.total(), im.total())
}

/// Transform of a product measure: scale * exp(-2 pi i shift . t) * product
/// of the factor transforms. Cost is the sum of the factor sizes,
/// independent of the implicit atom count.
pub fn ft_product(p: &ProductMeasure, t: &[f64]) -> Complex64 {
    let phase: f64 = p.shift().iter().zip(t).map(|(x, s)| x * s).sum();
    let (pr, pi) = phasor_neg(phase);
    let mut acc = Complex64::new(p.scale() * pr, p.scale() * pi);
    for f in p.factors() {
        acc *= ft_atomic(f, t);
    }
    acc
}

/// Transform of a block measure: sum over blocks of the shifted payload
/// transforms. Density payloads are not supported here (they pair through
/// quadrature instead).
pub fn ft_block(b: &BlockMeasure, t: &[f64]) -> Result<Complex64> {
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for block in b.blocks() {
        let inner = match &block.payload {
            BlockPayload::Atomic(mu) => ft_atomic(mu, t),
            BlockPayload::Product(p) => ft_product(p, t),
            BlockPayload::Density(_) => {
                return Err(Error::Unsupported(
                    "transform of a density block; pair it by quadrature".into(),
                ))
            }
        };
        let phase: f64 = block.shift.iter().zip(t).map(|(x, s)| x * s).sum();
        let (pr, pi) = phasor_neg(phase);
        re.add(inner.re * pr - inner.im * pi);
        im.add(inner.re * pi + inner.im * pr);
    }
    Ok(Complex64::new(re.total(), im.total()))
}

/// |transform of delta_0 + delta_a + delta_b - delta_{a+b}|^2 in closed
/// form: 4 - 2 cos(2 pi (a+b) t) + 2 cos(2 pi (a-b) t), clamped to [0, 8].
pub fn ks_factor_abs2(a: f64, b: f64, t: f64) -> f64 {
    let (_, c_sum) = sin_cos_2pi((a + b) * t);
    let (_, c_diff) = sin_cos_2pi((a - b) * t);
    (4.0 - 2.0 * c_sum + 2.0 * c_diff).clamp(0.0, 8.0)
}

/// Certified window estimate of a sup norm.
#[derive(Debug, Clone, Serialize)]
pub struct SupEstimate {
    /// Attained value at the witness point (lower bound for the window sup).
    pub lower: f64,
    /// Grid max plus Lipschitz slack, capped by the analytic bound.
    pub upper_on_window: f64,
    /// Caller-supplied global bound (e.g. a product of factor bounds).
    pub analytic_upper: Option<f64>,
    pub witness: Vec<f64>,
    pub grid_step: f64,
    pub window: Window,
}

enum Source<'a> {
    Atomic(&'a AtomicMeasure),
    Product(&'a ProductMeasure),
    Block(&'a BlockMeasure),
    Compact { g: &'a compact::CompactFunction, tol: f64 },
}

/// Evaluator bundling a transform with its certified Lipschitz bound.
pub struct FtEvaluator<'a> {
    source: Source<'a>,
    lipschitz: f64,
    tv_bound: f64,
}

impl<'a> FtEvaluator<'a> {
    pub fn atomic(mu: &'a AtomicMeasure) -> Self {
        // |grad FT| <= 2 pi sum |w_j| |x_j|.
        let mut lip = NeumaierSum::new();
        for a in mu.atoms() {
            let r = a.position.iter().map(|x| x * x).sum::<f64>().sqrt();
            lip.add(a.weight.norm() * r);
        }
        Self {
            source: Source::Atomic(mu),
            lipschitz: std::f64::consts::TAU * lip.total(),
            tv_bound: mu.total_variation(),
        }
    }

    pub fn product(p: &'a ProductMeasure) -> Self {
        // Product-form Lipschitz bound:
        // 2 pi TV (|shift| + sum_i (sum |w||x|)/TV_i); valid even when sums
        // collide (merging only lowers the true constant).
        let tv = p.log2_analytic_total_variation().exp2();
        let shift_norm = p.shift().iter().map(|x| x * x).sum::<f64>().sqrt();
        let lipschitz = std::f64::consts::TAU * tv * (shift_norm + p.mean_position_norm_bound());
        Self { source: Source::Product(p), lipschitz, tv_bound: tv }
    }

    pub fn block(b: &'a BlockMeasure) -> Result<Self> {
        let mut lip = 0.0;
        let mut tv = NeumaierSum::new();
        for block in b.blocks() {
            let shift_norm = block.shift.iter().map(|x| x * x).sum::<f64>().sqrt();
            let (block_tv, mean) = match &block.payload {
                BlockPayload::Atomic(mu) => {
                    let t = mu.total_variation();
                    let m: f64 = mu
                        .atoms()
                        .iter()
                        .map(|a| {
                            a.weight.norm() * a.position.iter().map(|x| x * x).sum::<f64>().sqrt()
                        })
                        .sum();
                    (t, if t > 0.0 { m / t } else { 0.0 })
                }
                BlockPayload::Product(p) => (
                    p.log2_analytic_total_variation().exp2(),
                    p.mean_position_norm_bound(),
                ),
                BlockPayload::Density(_) => {
                    return Err(Error::Unsupported("transform of a density block".into()))
                }
            };
            lip += std::f64::consts::TAU * block_tv * (shift_norm + mean);
            tv.add(block_tv);
        }
        Ok(Self { source: Source::Block(b), lipschitz: lip, tv_bound: tv.total() })
    }

    /// Transform of a compactly supported function; requires an L1 estimate
    /// for the Lipschitz bound.
    pub fn compact(g: &'a compact::CompactFunction, quad_tol: f64) -> Result<Self> {
        let l1 = g.l1_hint().ok_or_else(|| Error::DegenerateInput(
            "compact function without an L1 estimate".into(),
        ))?;
        Ok(Self {
            source: Source::Compact { g, tol: quad_tol },
            lipschitz: std::f64::consts::TAU * g.support_radius() * l1,
            tv_bound: l1,
        })
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Global analytic bound |FT| <= tv_bound.
    pub fn tv_bound(&self) -> f64 {
        self.tv_bound
    }

    pub fn eval(&self, t: &[f64]) -> Complex64 {
        match &self.source {
            Source::Atomic(mu) => ft_atomic(mu, t),
            Source::Product(p) => ft_product(p, t),
            Source::Block(b) => ft_block(b, t).expect("validated at construction"),
            Source::Compact { g, tol } => compact::ft_compact_tol(g, t[0], *tol),
        }
    }

    pub fn eval_abs(&self, t: &[f64]) -> f64 {
        self.eval(t).norm()
    }
}

fn grid_counts(window: &Window, step: f64) -> Result<Vec<usize>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::DegenerateInput(format!("grid step {step}")));
    }
    let mut counts = Vec::with_capacity(window.dim());
    let mut total: u128 = 1;
    for (l, u) in window.lower().iter().zip(window.upper()) {
        let n = (((u - l) / step).ceil() as usize).max(1) + 1;
        counts.push(n);
        total = total.saturating_mul(n as u128);
    }
    if total > GRID_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "sup-norm grid".into(),
            needed: total,
            budget: GRID_BUDGET,
            unit: "grid nodes",
        });
    }
    Ok(counts)
}

fn scan_grid(
    ev: &FtEvaluator<'_>,
    window: &Window,
    counts: &[usize],
) -> (f64, Vec<f64>) {
    let dim = window.dim();
    let mut idx = vec![0usize; dim];
    let mut best = f64::NEG_INFINITY;
    let mut witness = vec![0.0; dim];
    let mut point = vec![0.0; dim];
    loop {
        for c in 0..dim {
            let n = counts[c];
            let frac = if n > 1 { idx[c] as f64 / (n - 1) as f64 } else { 0.0 };
            point[c] = window.lower()[c] + frac * (window.upper()[c] - window.lower()[c]);
        }
        let v = ev.eval_abs(&point);
        if v > best {
            best = v;
            witness.copy_from_slice(&point);
        }
        // Odometer increment.
        let mut c = 0;
        loop {
            if c == dim {
                return (best, witness);
            }
            idx[c] += 1;
            if idx[c] < counts[c] {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

/// Grid sup estimate: `lower` is the grid max (attained at `witness`),
/// `upper_on_window` adds the Lipschitz slack for one grid cell and is
/// capped by the analytic bound.
pub fn sup_norm_estimate(
    ev: &FtEvaluator<'_>,
    window: &Window,
    grid_step: f64,
    analytic_upper: Option<f64>,
) -> Result<SupEstimate> {
    if window.dim() > 2 {
        return Err(Error::Unsupported("certified sup search limited to d <= 2".into()));
    }
    let counts = grid_counts(window, grid_step)?;
    let (lower, witness) = scan_grid(ev, window, &counts);
    // Largest distance from a window point to the nearest grid node.
    let mut cell2 = 0.0;
    for (c, &n) in counts.iter().enumerate() {
        let h = if n > 1 {
            (window.upper()[c] - window.lower()[c]) / (n - 1) as f64
        } else {
            0.0
        };
        cell2 += (h / 2.0) * (h / 2.0);
    }
    let mut upper = lower + ev.lipschitz() * cell2.sqrt();
    upper = upper.min(ev.tv_bound());
    if let Some(a) = analytic_upper {
        upper = upper.min(a);
    }
    let upper = upper.max(lower.min(analytic_upper.unwrap_or(f64::INFINITY)));
    Ok(SupEstimate {
        lower,
        upper_on_window: upper,
        analytic_upper,
        witness,
        grid_step,
        window: window.clone(),
    })
}

/// Like [`sup_norm_estimate`] but follows the coarse scan with local
/// refinement passes around the best point, improving the witness/lower
/// bound (the certified upper bound still comes from the coarse grid).
pub fn sup_norm_estimate_refined(
    ev: &FtEvaluator<'_>,
    window: &Window,
    grid_step: f64,
    passes: u32,
    analytic_upper: Option<f64>,
) -> Result<SupEstimate> {
    let mut est = sup_norm_estimate(ev, window, grid_step, analytic_upper)?;
    let mut step = grid_step;
    for _ in 0..passes {
        let local = Window::new(
            est.witness.iter().zip(window.lower()).map(|(w, l)| (w - step).max(*l)).collect(),
            est.witness.iter().zip(window.upper()).map(|(w, u)| (w + step).min(*u)).collect(),
        )?;
        step /= 8.0;
        let counts = grid_counts(&local, step)?;
        let (lower, witness) = scan_grid(ev, &local, &counts);
        if lower > est.lower {
            est.lower = lower;
            est.witness = witness;
        }
    }
    // Refinement can only raise the attained value toward the true sup.
    est.upper_on_window = est.upper_on_window.max(est.lower.min(est.analytic_upper.unwrap_or(f64::INFINITY)));
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks_measure(a: f64, b: f64) -> AtomicMeasure {
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
    fn mass_at_zero_frequency() {
        let mu = ks_measure(0.3, 0.7);
        let v = ft_atomic(&mu, &[0.0]);
        assert_eq!(v, Complex64::new(2.0, 0.0));
        let d = AtomicMeasure::dirac(vec![0.4]);
        assert!((ft_atomic(&d, &[1.3]).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ks_closed_form_matches_direct_square() {
        let (a, b) = (2f64.sqrt() / 2.0, 3f64.sqrt() / 2.0);
        let mu = ks_measure(a, b);
        for i in 0..1000 {
            let t = -50.0 + 0.1 * i as f64;
            let direct = ft_atomic(&mu, &[t]).norm_sqr();
            let closed = ks_factor_abs2(a, b, t);
            assert!((direct - closed).abs() < 1e-12, "t={t}");
            assert!((0.0..=8.0).contains(&closed));
        }
        assert_eq!(ks_factor_abs2(a, b, 0.0), 4.0);
    }

    #[test]
    fn translation_phase_covariance() {
        let mu = ks_measure(0.21, 0.55);
        let nu = mu.translate(&[1.75]).unwrap();
        for &t in &[0.1, 0.77, 5.3] {
            let lhs = ft_atomic(&nu, &[t]);
            let (pr, pi) = phasor_neg(1.75 * t);
            let rhs = ft_atomic(&mu, &[t]) * Complex64::new(pr, pi);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn sup_estimate_brackets_dirac() {
        let d = AtomicMeasure::dirac(vec![0.7]);
        let ev = FtEvaluator::atomic(&d);
        let est = sup_norm_estimate(&ev, &Window::interval(0.0, 10.0).unwrap(), 0.01, None).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-12);
        assert!(est.upper_on_window <= 1.0 + 1e-12);
    }

    #[test]
    fn product_eval_matches_enumeration() {
        let p = ProductMeasure::new(
            vec![ks_measure(2f64.sqrt() / 4.0, 3f64.sqrt() / 4.0), ks_measure(5f64.sqrt() / 4.0, 7f64.sqrt() / 4.0)],
            vec![0.0],
            1.0,
        )
        .unwrap();
        let enumerated = p.enumerate(1 << 20).unwrap();
        for i in 0..50 {
            let t = -9.0 + 0.37 * i as f64;
            let lhs = ft_product(&p, &[t]);
            let rhs = ft_atomic(&enumerated, &[t]);
            assert!((lhs - rhs).norm() < 1e-10 * enumerated.total_variation());
        }
        assert!((ft_product(&p, &[0.0]).re - 4.0).abs() < 1e-12);
    }
}
