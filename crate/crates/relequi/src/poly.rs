//! Sparse multivariate polynomials with complex coefficients, truncated at a
//! fixed total degree. Every series manipulation in the normal-form pipeline
//! runs on these.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default relative prune threshold: coefficients below `eps * max|c|` are
/// dropped after arithmetic so cancellation dust does not bloat the term map.
pub const PRUNE_EPS: f64 = 1e-14;

/// Exponent vector of a single term, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u8>);

impl Monomial {
    pub fn new(exps: Vec<u8>) -> Self {
        Monomial(exps)
    }

    pub fn unit(vars: usize) -> Self {
        Monomial(vec![0; vars])
    }

    pub fn exps(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial truncated at `max_degree`; terms of higher total degree are
/// discarded by every operation.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncPoly {
    vars: usize,
    max_degree: u32,
    terms: BTreeMap<Monomial, Complex64>,
}

impl TruncPoly {
    pub fn zero(vars: usize, max_degree: u32) -> Self {
        TruncPoly {
            vars,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, max_degree: u32, c: impl Into<Complex64>) -> Self {
        let mut p = Self::zero(vars, max_degree);
        let c = c.into();
        if c != Complex64::ZERO {
            p.terms.insert(Monomial::unit(vars), c);
        }
        p
    }

    /// The monomial `c * x_i`.
    pub fn variable(vars: usize, max_degree: u32, i: usize, c: impl Into<Complex64>) -> Self {
        assert!(i < vars, "variable index out of range");
        let mut exps = vec![0u8; vars];
        exps[i] = 1;
        let mut p = Self::zero(vars, max_degree);
        let c = c.into();
        if c != Complex64::ZERO && max_degree >= 1 {
            p.terms.insert(Monomial(exps), c);
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u8]) -> Complex64 {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .copied()
            .unwrap_or(Complex64::ZERO)
    }

    /// Insert (accumulate) a term, silently dropping it beyond the truncation degree.
    pub fn add_term(&mut self, exps: Vec<u8>, c: Complex64) {
        debug_assert_eq!(exps.len(), self.vars);
        let m = Monomial(exps);
        if m.degree() > self.max_degree || c == Complex64::ZERO {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == Complex64::ZERO {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop coefficients below `eps` relative to the largest one.
    pub fn prune(mut self, eps: f64) -> Self {
        let m = self.max_coeff();
        if m > 0.0 {
            self.terms.retain(|_, c| c.norm() > eps * m);
        }
        self
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::Dimension(format!(
                "polynomials over {} and {} variables",
                self.vars, other.vars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.max_degree != other.max_degree {
            return Err(Error::Dimension(format!(
                "truncation degrees {} and {}",
                self.max_degree, other.max_degree
            )));
        }
        let mut r = self.clone();
        for (m, &c) in &other.terms {
            let entry = r.terms.entry(m.clone()).or_insert(Complex64::ZERO);
            *entry += c;
        }
        r.terms.retain(|_, c| *c != Complex64::ZERO);
        Ok(r.prune(PRUNE_EPS))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        let mut r = self.clone();
        if s == Complex64::ZERO {
            r.terms.clear();
            return r;
        }
        for c in r.terms.values_mut() {
            *c *= s;
        }
        r
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let deg = self.max_degree.min(other.max_degree);
        let mut r = Self::zero(self.vars, deg);
        for (m1, &c1) in &self.terms {
            let d1 = m1.degree();
            if d1 > deg {
                continue;
            }
            for (m2, &c2) in &other.terms {
                if d1 + m2.degree() > deg {
                    continue;
                }
                let exps: Vec<u8> = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                let entry = r.terms.entry(Monomial(exps)).or_insert(Complex64::ZERO);
                *entry += c1 * c2;
            }
        }
        r.terms.retain(|_, c| *c != Complex64::ZERO);
        Ok(r.prune(PRUNE_EPS))
    }

    /// Substitute `subst[i]` for variable `i`. All substitutes must live in a
    /// common target space; the result is truncated at the target degree.
    pub fn compose(&self, subst: &[TruncPoly]) -> Result<Self> {
        if subst.len() != self.vars {
            return Err(Error::Dimension(format!(
                "{} substitutes for {} variables",
                subst.len(),
                self.vars
            )));
        }
        let tvars = subst[0].vars;
        let tdeg = subst[0].max_degree;
        for s in subst {
            if s.vars != tvars || s.max_degree != tdeg {
                return Err(Error::Dimension(
                    "substitutes live in different spaces".into(),
                ));
            }
        }
        // memoized powers of each substitute
        let mut pows: Vec<Vec<TruncPoly>> = subst
            .iter()
            .map(|s| vec![Self::constant(tvars, tdeg, 1.0), s.clone()])
            .collect();
        let mut r = Self::zero(tvars, tdeg);
        for (m, &c) in &self.terms {
            let mut term = Self::constant(tvars, tdeg, c);
            for (i, &e) in m.0.iter().enumerate() {
                while pows[i].len() <= e as usize {
                    let next = pows[i].last().unwrap().mul(&subst[i])?;
                    pows[i].push(next);
                }
                if e > 0 {
                    term = term.mul(&pows[i][e as usize])?;
                }
            }
            r = r.add(&term)?;
        }
        Ok(r)
    }

    /// Homogeneous part of total degree `d`.
    pub fn grade(&self, d: u32) -> Self {
        let mut r = Self::zero(self.vars, self.max_degree);
        for (m, &c) in &self.terms {
            if m.degree() == d {
                r.terms.insert(m.clone(), c);
            }
        }
        r
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Self {
        assert!(var < self.vars, "variable index out of range");
        let mut r = Self::zero(self.vars, self.max_degree);
        for (m, &c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            r.terms.insert(Monomial(exps), c * f64::from(e));
        }
        r
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        debug_assert_eq!(point.len(), self.vars);
        let mut acc = Complex64::ZERO;
        for (m, &c) in &self.terms {
            let mut v = c;
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    v *= point[i];
                }
            }
            acc += v;
        }
        acc
    }

    pub fn eval_real(&self, point: &[f64]) -> Complex64 {
        let pt: Vec<Complex64> = point.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.eval(&pt)
    }

    /// Max-norm over coefficients.
    pub fn norm(&self) -> f64 {
        self.max_coeff()
    }

    /// Re-truncate to a (lower) maximum degree.
    pub fn truncated(&self, max_degree: u32) -> Self {
        let mut r = Self::zero(self.vars, max_degree);
        for (m, &c) in &self.terms {
            if m.degree() <= max_degree {
                r.terms.insert(m.clone(), c);
            }
        }
        r
    }
}

impl Serialize for TruncPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            exps: &'a [u8],
            re: f64,
            im: f64,
        }
        struct Terms<'a>(&'a TruncPoly);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.terms.len()))?;
                for (m, c) in &self.0.terms {
                    seq.serialize_element(&Term {
                        exps: &m.0,
                        re: c.re,
                        im: c.im,
                    })?;
                }
                seq.end()
            }
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            vars: usize,
            max_degree: u32,
            terms: Terms<'a>,
        }
        Repr {
            vars: self.vars,
            max_degree: self.max_degree,
            terms: Terms(self),
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn x(i: usize, vars: usize, deg: u32) -> TruncPoly {
        TruncPoly::variable(vars, deg, i, 1.0)
    }

    #[test]
    fn add_cancellation() {
        // (x0 + x1) + (x0 - x1) = 2 x0
        let a = x(0, 2, 3).add(&x(1, 2, 3)).unwrap();
        let b = x(0, 2, 3).sub(&x(1, 2, 3)).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.num_terms(), 1);
        assert_relative_eq!(s.coeff(&[1, 0]).re, 2.0);
    }

    #[test]
    fn add_identity() {
        let p = x(0, 2, 3).mul(&x(1, 2, 3)).unwrap();
        let q = p.add(&TruncPoly::zero(2, 3)).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn add_degree_boundary() {
        let sq = x(0, 1, 2).mul(&x(0, 1, 2)).unwrap();
        let s = sq.add(&sq).unwrap();
        assert_relative_eq!(s.coeff(&[2]).re, 2.0);
    }

    #[test]
    fn mul_truncates() {
        let p = x(0, 1, 1).mul(&x(0, 1, 1)).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn mul_difference_of_squares() {
        let one = TruncPoly::constant(1, 2, 1.0);
        let p = one.add(&x(0, 1, 2)).unwrap();
        let q = one.sub(&x(0, 1, 2)).unwrap();
        let r = p.mul(&q).unwrap();
        assert_relative_eq!(r.coeff(&[0]).re, 1.0);
        assert_relative_eq!(r.coeff(&[2]).re, -1.0);
        assert_eq!(r.coeff(&[1]), Complex64::ZERO);
    }

    #[test]
    fn mul_binomial() {
        // (x5 + x6)^2 in a 7-variable space
        let s = x(5, 7, 2).add(&x(6, 7, 2)).unwrap();
        let sq = s.mul(&s).unwrap();
        let mut e55 = vec![0u8; 7];
        e55[5] = 2;
        let mut e56 = vec![0u8; 7];
        e56[5] = 1;
        e56[6] = 1;
        let mut e66 = vec![0u8; 7];
        e66[6] = 2;
        assert_relative_eq!(sq.coeff(&e55).re, 1.0);
        assert_relative_eq!(sq.coeff(&e56).re, 2.0);
        assert_relative_eq!(sq.coeff(&e66).re, 1.0);
    }

    #[test]
    fn compose_square_of_sum() {
        // p(x) = x^2, x -> u + v
        let p = x(0, 1, 2).mul(&x(0, 1, 2)).unwrap();
        let uv = x(0, 2, 2).add(&x(1, 2, 2)).unwrap();
        let r = p.compose(&[uv]).unwrap();
        assert_relative_eq!(r.coeff(&[2, 0]).re, 1.0);
        assert_relative_eq!(r.coeff(&[1, 1]).re, 2.0);
        assert_relative_eq!(r.coeff(&[0, 2]).re, 1.0);
    }

    #[test]
    fn compose_identity() {
        let p = x(0, 2, 3)
            .mul(&x(1, 2, 3))
            .unwrap()
            .add(&x(0, 2, 3))
            .unwrap();
        let id = [x(0, 2, 3), x(1, 2, 3)];
        assert_eq!(p.compose(&id).unwrap(), p);
    }

    #[test]
    fn compose_arity_mismatch() {
        let p = x(0, 2, 3);
        let one_subst = vec![x(0, 2, 3)];
        assert!(matches!(
            p.compose(&one_subst).unwrap_err(),
            Error::Dimension(_)
        ));
    }

    #[test]
    fn grade_parts() {
        let one = TruncPoly::constant(2, 3, 1.0);
        let p = one
            .add(&x(0, 2, 3))
            .unwrap()
            .add(&x(0, 2, 3).mul(&x(1, 2, 3)).unwrap())
            .unwrap();
        assert_relative_eq!(p.grade(2).coeff(&[1, 1]).re, 1.0);
        assert_eq!(p.grade(2).num_terms(), 1);
        assert_relative_eq!(p.grade(0).coeff(&[0, 0]).re, 1.0);
    }

    #[test]
    fn partial_rules() {
        let p = x(0, 2, 3).mul(&x(0, 2, 3)).unwrap();
        assert_relative_eq!(p.partial(0).coeff(&[1, 0]).re, 2.0);
        let q = x(0, 2, 3).mul(&x(1, 2, 3)).unwrap();
        assert_relative_eq!(q.partial(1).coeff(&[1, 0]).re, 1.0);
        let c = TruncPoly::constant(2, 3, 5.0);
        assert!(c.partial(0).is_zero());
    }

    #[test]
    fn serialization_is_graded_lex_sorted() {
        let one = TruncPoly::constant(2, 2, 1.0);
        let p = one
            .add(&x(1, 2, 2))
            .unwrap()
            .add(&x(0, 2, 2).mul(&x(0, 2, 2)).unwrap())
            .unwrap();
        let js = serde_json::to_string(&p).unwrap();
        let c = js.find("[0,0]").unwrap();
        let l = js.find("[0,1]").unwrap();
        let q = js.find("[2,0]").unwrap();
        assert!(c < l && l < q);
    }
}
