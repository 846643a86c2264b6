//! Multivariate polynomials on the reference cell and vector/tensor fields built from them.

use std::collections::BTreeMap;

use crate::polys::Poly1D;

pub type Exponents<const D: usize> = [u8; D];

/// A polynomial in `D` variables, stored as a sorted exponent → coefficient map.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly<const D: usize> {
    terms: BTreeMap<Exponents<D>, f64>,
}

impl<const D: usize> Poly<D> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial([0; D], c)
    }

    pub fn monomial(exps: Exponents<D>, coeff: f64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0.0 {
            terms.insert(exps, coeff);
        }
        Self { terms }
    }

    /// Embed a univariate polynomial in variable `var`.
    pub fn from_1d(p: &Poly1D, var: usize) -> Self {
        let mut out = Self::zero();
        for (i, &c) in p.coeffs().iter().enumerate() {
            let mut e = [0u8; D];
            e[var] = i as u8;
            out.add_term(e, c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents<D>, &f64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &Exponents<D>) -> f64 {
        self.terms.get(exps).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exps: Exponents<D>, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(exps).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&exps);
        }
    }

    pub fn eval(&self, x: &[f64; D]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&p, &xi)| acc * xi.powi(p as i32))
            })
            .sum()
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&p| p as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> usize {
        self.terms
            .keys()
            .map(|e| e[var] as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = [0u8; D];
                for i in 0..D {
                    e[i] = ea[i] + eb[i];
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn deriv(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut d = *e;
                d[var] -= 1;
                out.add_term(d, c * e[var] as f64);
            }
        }
        out
    }

    /// Antiderivative in `var` that vanishes on the plane `x_var = lower`.
    pub fn antideriv_from(&self, var: usize, lower: f64) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut d = *e;
            d[var] += 1;
            out.add_term(d, c / d[var] as f64);
        }
        let base = out.restrict(var, lower);
        out.sub(&base)
    }

    /// Substitute `x_var = value`; the result no longer depends on `var`.
    pub fn restrict(&self, var: usize, value: f64) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut d = *e;
            let p = d[var];
            d[var] = 0;
            out.add_term(d, c * value.powi(p as i32));
        }
        out
    }

    /// Exact integral over `[-1, 1]^D`.
    pub fn integrate_reference(&self) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().fold(*c, |acc, &p| {
                    if p % 2 == 1 {
                        0.0
                    } else {
                        acc * 2.0 / (p as f64 + 1.0)
                    }
                })
            })
            .sum()
    }
}

/// A vector- or tensor-valued polynomial field: one [`Poly`] per component.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyField<const D: usize> {
    pub comps: Vec<Poly<D>>,
}

impl<const D: usize> PolyField<D> {
    pub fn zero(n_comps: usize) -> Self {
        Self {
            comps: vec![Poly::zero(); n_comps],
        }
    }

    /// A field with a single nonzero component.
    pub fn single(n_comps: usize, comp: usize, p: Poly<D>) -> Self {
        let mut f = Self::zero(n_comps);
        f.comps[comp] = p;
        f
    }

    pub fn n_comps(&self) -> usize {
        self.comps.len()
    }

    pub fn eval(&self, x: &[f64; D]) -> Vec<f64> {
        self.comps.iter().map(|p| p.eval(x)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            comps: self.comps.iter().map(|p| p.scale(s)).collect(),
        }
    }

    pub fn max_degree_in(&self, var: usize) -> usize {
        self.comps.iter().map(|p| p.degree_in(var)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.comps.iter().map(|p| p.total_degree()).max().unwrap_or(0)
    }
}

/// Flattened monomial coordinates of a family of fields, for rank and least-squares tests.
///
/// Returns one coefficient column per field over the union of `(component, exponent)` keys.
pub fn coefficient_columns<const D: usize>(fields: &[&PolyField<D>]) -> Vec<Vec<f64>> {
    let mut keys: BTreeMap<(usize, Exponents<D>), usize> = BTreeMap::new();
    for f in fields {
        for (c, p) in f.comps.iter().enumerate() {
            for (e, _) in p.terms() {
                let next = keys.len();
                keys.entry((c, *e)).or_insert(next);
            }
        }
    }
    // renumber in sorted order for determinism
    let order: BTreeMap<(usize, Exponents<D>), usize> = keys
        .keys()
        .enumerate()
        .map(|(i, k)| (*k, i))
        .collect();
    fields
        .iter()
        .map(|f| {
            let mut col = vec![0.0; order.len()];
            for (c, p) in f.comps.iter().enumerate() {
                for (e, v) in p.terms() {
                    col[order[&(c, *e)]] = *v;
                }
            }
            col
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_and_calculus() {
        // p = 3x²y - y + 2
        let p = Poly::<2>::monomial([2, 1], 3.0)
            .add(&Poly::monomial([0, 1], -1.0))
            .add(&Poly::constant(2.0));
        assert_eq!(p.eval(&[2.0, 0.5]), 6.0 - 0.5 + 2.0);
        assert_eq!(p.deriv(0), Poly::monomial([1, 1], 6.0));
        assert_eq!(p.total_degree(), 3);
        assert_eq!(p.degree_in(1), 1);
        let q = p.antideriv_from(0, -1.0);
        assert!(q.restrict(0, -1.0).is_zero());
        assert_eq!(q.deriv(0), p);
        // ∫ 3x²y - y + 2 over [-1,1]² = 8
        assert!((p.integrate_reference() - 8.0).abs() < 1e-15);
        let sq = p.mul(&p);
        let x = [0.3, -0.7];
        assert!((sq.eval(&x) - p.eval(&x).powi(2)).abs() < 1e-14);
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn columns_cover_union_of_terms() {
        let a = PolyField::<2>::single(2, 0, Poly::monomial([1, 0], 1.0));
        let b = PolyField::<2>::single(2, 1, Poly::monomial([1, 0], 2.0));
        let cols = coefficient_columns(&[&a, &b]);
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[0].len(), 2);
        assert_eq!(cols[0].iter().sum::<f64>(), 1.0);
        assert_eq!(cols[1].iter().sum::<f64>(), 2.0);
    }
}
