//! One-dimensional polynomial algebra, the orthogonal families used by the
//! interior degrees of freedom, and Gauss quadrature on `[-1, 1]`.
//!
//! The Jacobi family here is the one orthogonal under the weight `(1 - ξ²)`:
//!
//! ```text
//! J_l(ξ) = ((l+1)!)² Σ_s  ((ξ-1)/2)^(l-s) ((ξ+1)/2)^s / (s! (l+1-s)! (s+1)! (l-s)!)
//! ```
//!
//! Both Jacobi and Legendre polynomials are stored as monomial coefficient
//! vectors; the degrees that occur in the element families are small.

use crate::error::{Error, Result};

/// Largest number of points for which [`gauss_rule`] is available.
pub const MAX_GAUSS_POINTS: usize = 20;

/// A univariate polynomial stored by monomial coefficients (`coeffs[i]` multiplies `ξ^i`).
///
/// The zero polynomial has no coefficients; otherwise the last coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly1D {
    coeffs: Vec<f64>,
}

impl Poly1D {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `ξ^power`
    pub fn monomial(power: usize) -> Self {
        let mut coeffs = vec![0.0; power + 1];
        coeffs[power] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    /// The antiderivative vanishing at `lower`.
    pub fn antiderivative_from(&self, lower: f64) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i as f64 + 1.0)),
        );
        let mut p = Self::new(coeffs);
        let shift = p.eval(lower);
        if !p.coeffs.is_empty() {
            p.coeffs[0] -= shift;
        }
        Self::new(p.coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0.0)
                        + other.coeffs.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::constant(1.0), |acc, _| acc.mul(self))
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Jacobi polynomial `J_l` orthogonal under `(1 - ξ²)` on `[-1, 1]`, normalized so `J_l(1) = l + 1`.
pub fn jacobi(l: usize) -> Poly1D {
    let l = l as u64;
    let minus = Poly1D::new(vec![-0.5, 0.5]);
    let plus = Poly1D::new(vec![0.5, 0.5]);
    // ((l+1)!)² / (s!(l+1-s)!(s+1)!(l-s)!) = C(l+1, s) · C(l+1, s+1)
    (0..=l).fold(Poly1D::zero(), |acc, s| {
        let c = (binomial(l + 1, s) * binomial(l + 1, s + 1)) as f64;
        let term = minus
            .pow((l - s) as usize)
            .mul(&plus.pow(s as usize))
            .scale(c);
        acc.add(&term)
    })
}

/// `∫_{-1}^{ξ} J_l(s) ds` as a polynomial of degree `l + 1`.
pub fn jacobi_antiderivative(l: usize) -> Poly1D {
    jacobi(l).antiderivative_from(-1.0)
}

/// Legendre polynomial from the Rodrigues formula `L_l = 1/(2^l l!) d^l/dξ^l (ξ² - 1)^l`.
pub fn legendre(l: usize) -> Poly1D {
    let base = Poly1D::new(vec![-1.0, 0.0, 1.0]).pow(l);
    let differentiated = (0..l).fold(base, |p, _| p.derivative());
    let scale = (0..l).fold(1.0, |acc, i| acc * 2.0 * (i as f64 + 1.0));
    differentiated.scale(1.0 / scale)
}

pub fn eval_jacobi(l: usize, xi: f64) -> f64 {
    jacobi(l).eval(xi)
}

pub fn eval_jacobi_antiderivative(l: usize, xi: f64) -> f64 {
    jacobi_antiderivative(l).eval(xi)
}

pub fn eval_legendre(l: usize, xi: f64) -> f64 {
    legendre(l).eval(xi)
}

/// Legendre value and derivative by the three-term recurrence; used for root finding.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        // endpoint limit P_n'(±1) = (±1)^{n+1} n(n+1)/2
        x.powi(n as i32 + 1) * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness(&self) -> usize {
        2 * self.len() - 1
    }
}

/// `n`-point Gauss–Legendre rule, nodes in increasing order.
pub fn gauss_rule(n: usize) -> Result<QuadRule> {
    if !(1..=MAX_GAUSS_POINTS).contains(&n) {
        return Err(Error::QuadratureRange(n));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadRule { nodes, weights })
}

/// Interior nodes of the `m`-point Gauss–Lobatto rule (the roots of `L'_{m-1}`), increasing.
///
/// Returns `m - 2` points; an empty vector for `m <= 2`.
pub fn gauss_lobatto_interior(m: usize) -> Vec<f64> {
    if m <= 2 {
        return Vec::new();
    }
    let deg = m - 1;
    let dpoly = legendre(deg).derivative();
    let ddpoly = dpoly.derivative();
    let count = m - 2;
    let mut nodes: Vec<f64> = (1..=count)
        .map(|j| {
            let mut x = -(std::f64::consts::PI * j as f64 / deg as f64).cos();
            for _ in 0..100 {
                let dx = dpoly.eval(x) / ddpoly.eval(x);
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            x
        })
        .collect();
    // symmetrize exactly
    for i in 0..count / 2 {
        let a = 0.5 * (nodes[count - 1 - i] - nodes[i]);
        nodes[i] = -a;
        nodes[count - 1 - i] = a;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }
    nodes
}

/// Tensor-product Gauss rule on `[-1, 1]^D`.
#[derive(Debug, Clone)]
pub struct TensorRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
}

impl<const D: usize> TensorRule<D> {
    pub fn gauss(n: usize) -> Result<Self> {
        let rule = gauss_rule(n)?;
        let total = n.pow(D as u32);
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for flat in 0..total {
            let mut idx = flat;
            let mut p = [0.0; D];
            let mut w = 1.0;
            for slot in p.iter_mut() {
                let i = idx % n;
                idx /= n;
                *slot = rule.nodes[i];
                w *= rule.weights[i];
            }
            points.push(p);
            weights.push(w);
        }
        Ok(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct evaluation of the defining double-factorial sum, independent of the
    /// monomial expansion used by [`jacobi`].
    fn jacobi_by_sum(l: usize, xi: f64) -> f64 {
        let fact = |n: usize| (1..=n).fold(1.0f64, |a, i| a * i as f64);
        let lead = fact(l + 1).powi(2);
        (0..=l)
            .map(|s| {
                lead / (fact(s) * fact(l + 1 - s) * fact(s + 1) * fact(l - s))
                    * ((xi - 1.0) / 2.0).powi((l - s) as i32)
                    * ((xi + 1.0) / 2.0).powi(s as i32)
            })
            .sum()
    }

    /// Composite Simpson with many panels: slow, but shares nothing with the Gauss code.
    fn simpson(f: impl Fn(f64) -> f64, panels: usize) -> f64 {
        let h = 2.0 / panels as f64;
        let mut s = f(-1.0) + f(1.0);
        for i in 1..panels {
            let x = -1.0 + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(eval_jacobi(0, 0.7), 1.0);
        assert!((eval_jacobi(1, 0.5) - 1.0).abs() < 1e-15);
        assert!((eval_jacobi(2, 1.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_matches_defining_sum() {
        for l in 0..=8 {
            for &x in &[-1.0, -0.73, -0.2, 0.0, 0.41, 0.9, 1.0] {
                let a = eval_jacobi(l, x);
                let b = jacobi_by_sum(l, x);
                assert!((a - b).abs() < 1e-11 * (1.0 + b.abs()), "l={l} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn jacobi_antiderivative_examples() {
        for &x in &[-1.0, -0.3, 0.25, 1.0] {
            assert!((eval_jacobi_antiderivative(0, x) - (x + 1.0)).abs() < 1e-15);
        }
        assert!(eval_jacobi_antiderivative(1, 1.0).abs() < 1e-15);
        assert!((eval_jacobi_antiderivative(1, 0.0) + 1.0).abs() < 1e-15);
        for l in 0..8 {
            assert!(eval_jacobi_antiderivative(l, -1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(eval_legendre(0, 0.3), 1.0);
        assert!((eval_legendre(1, -0.4) + 0.4).abs() < 1e-15);
        assert!((eval_legendre(2, 0.0) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn degrees() {
        for l in 0..8 {
            assert_eq!(jacobi(l).degree(), l);
            assert_eq!(legendre(l).degree(), l);
            assert_eq!(jacobi_antiderivative(l).degree(), l + 1);
        }
    }

    #[test]
    fn jacobi_weighted_orthogonality_against_simpson_oracle() {
        for l in 0..=6 {
            for m in 0..=6 {
                let got = simpson(
                    |x| (1.0 - x * x) * jacobi_by_sum(l, x) * jacobi_by_sum(m, x),
                    4000,
                );
                let expected = if l == m {
                    8.0 * (l + 1) as f64 / ((2 * l + 3) * (l + 2)) as f64
                } else {
                    0.0
                };
                assert!((got - expected).abs() < 1e-9, "({l},{m}) {got} vs {expected}");
            }
        }
        // J_1 = 2ξ, so ∫ (1 - ξ²) 4ξ² = 16/15
        let v = simpson(|x| (1.0 - x * x) * (2.0 * x).powi(2), 4000);
        assert!((v - 16.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_small_rules() {
        let r1 = gauss_rule(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert!((r1.weights[0] - 2.0).abs() < 1e-15);
        let r2 = gauss_rule(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r2.nodes[0] + s).abs() < 1e-15 && (r2.nodes[1] - s).abs() < 1e-15);
        assert!((r2.weights[0] - 1.0).abs() < 1e-15 && (r2.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_rule_range_is_checked() {
        assert!(matches!(gauss_rule(0), Err(Error::QuadratureRange(0))));
        assert!(matches!(gauss_rule(21), Err(Error::QuadratureRange(21))));
    }

    #[test]
    fn gauss_exactness() {
        for n in 1..=MAX_GAUSS_POINTS {
            let r = gauss_rule(n).unwrap();
            let wsum: f64 = r.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n={n}");
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!(r.integrate(|x| x.powi(2 * n as i32 - 1)).abs() < 1e-14);
            for d in 0..2 * n {
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(d as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} d={d}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn lobatto_interior_points() {
        assert!(gauss_lobatto_interior(2).is_empty());
        assert_eq!(gauss_lobatto_interior(3), vec![0.0]);
        let p = gauss_lobatto_interior(4);
        let s = 1.0 / 5f64.sqrt();
        assert!((p[0] + s).abs() < 1e-15 && (p[1] - s).abs() < 1e-15);
        let p5 = gauss_lobatto_interior(5);
        let t = (3.0f64 / 7.0).sqrt();
        assert!((p5[0] + t).abs() < 1e-14 && p5[1] == 0.0 && (p5[2] - t).abs() < 1e-14);
    }

    #[test]
    fn tensor_rule_integrates_products() {
        let r = TensorRule::<2>::gauss(3).unwrap();
        let v: f64 = r
            .points
            .iter()
            .zip(&r.weights)
            .map(|(p, w)| w * p[0].powi(4) * p[1].powi(2))
            .sum();
        assert!((v - 0.4 * 2.0 / 3.0).abs() < 1e-14);
    }
}
