//! Probability and signed measures on finite products of cyclic groups.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::group::{DualElement, FiniteGroup, FiniteSubgroup, GroupSpec};
use crate::scalar::Scalar;

/// Mass function on `Z_{n_1} × ... × Z_{n_k}`, indexed like [`FiniteGroup`].
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMeasure<T> {
    group: FiniteGroup,
    masses: Vec<T>,
    signed: bool,
}

fn mass_tolerance<T: Scalar>() -> f64 {
    if T::is_exact() {
        0.0
    } else if std::mem::size_of::<T>() <= 4 {
        1e-5
    } else {
        1e-9
    }
}

impl<T: Scalar> FiniteMeasure<T> {
    fn build(spec: &GroupSpec, masses: Vec<T>, signed: bool) -> Result<Self> {
        let group = spec.finite_group()?;
        if masses.len() != group.order() {
            return Err(Error::InvalidMeasure(format!(
                "{} masses for a group of order {}",
                masses.len(),
                group.order()
            )));
        }
        if !signed {
            if let Some(i) = masses.iter().position(|m| *m < T::zero()) {
                return Err(Error::InvalidMeasure(format!(
                    "negative mass {:?} at {:?}",
                    masses[i],
                    group.element(i)
                )));
            }
        }
        let total = masses.iter().cloned().fold(T::zero(), |a, b| a + b);
        if !(total.clone() - T::one()).within(mass_tolerance::<T>()) {
            return Err(Error::InvalidMeasure(format!("total mass {total:?} is not 1")));
        }
        Ok(FiniteMeasure { group, masses, signed })
    }

    /// A probability distribution.
    pub fn new(spec: &GroupSpec, masses: Vec<T>) -> Result<Self> {
        Self::build(spec, masses, false)
    }

    /// A signed measure of total mass 1.
    pub fn signed(spec: &GroupSpec, masses: Vec<T>) -> Result<Self> {
        Self::build(spec, masses, true)
    }

    /// Normalizes nonnegative integer weights exactly (`w_i / Σw`).
    pub fn from_weights(spec: &GroupSpec, weights: &[u64]) -> Result<Self> {
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(Error::InvalidMeasure("all weights are zero".into()));
        }
        let masses = weights.iter().map(|&w| T::from_ratio(w as i64, total as i64)).collect();
        Self::new(spec, masses)
    }

    /// The degenerate distribution `E_x`.
    pub fn dirac(spec: &GroupSpec, x: &[i64]) -> Result<Self> {
        let group = spec.finite_group()?;
        if x.len() != group.rank() {
            return Err(Error::DimensionMismatch { expected: group.rank(), found: x.len() });
        }
        let mut masses = vec![T::zero(); group.order()];
        masses[group.index_of(x)] = T::one();
        Ok(FiniteMeasure { group, masses, signed: false })
    }

    /// Haar (uniform) distribution on a subgroup.
    pub fn haar(k: &FiniteSubgroup) -> Self {
        let group = k.group();
        let mut masses = vec![T::zero(); group.order()];
        let w = T::from_ratio(1, k.order() as i64);
        for &i in k.indices() {
            masses[i] = w.clone();
        }
        FiniteMeasure { group, masses, signed: false }
    }

    pub fn uniform(spec: &GroupSpec) -> Result<Self> {
        Ok(Self::haar(&FiniteSubgroup::whole(&spec.finite_group()?)))
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn spec(&self) -> GroupSpec {
        self.group.spec()
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn mass(&self, x: &[i64]) -> T {
        self.masses[self.group.index_of(x)].clone()
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    /// Indices with nonzero mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.masses.len()).filter(|&i| !self.masses[i].within(0.0)).collect()
    }

    pub fn to_f64(&self) -> FiniteMeasure<f64> {
        FiniteMeasure {
            group: self.group.clone(),
            masses: self.masses.iter().map(|m| m.to_f64_lossy()).collect(),
            signed: self.signed,
        }
    }

    /// `μ̂(y) = Σ_x μ(x) (x, y)`.
    pub fn charfn(&self, y: &DualElement) -> Complex64 {
        let roots = self.group.roots_of_unity();
        let yi = self.group.index_of(&y.0);
        self.charfn_idx(&roots, yi)
    }

    fn charfn_idx(&self, roots: &[Complex64], y: usize) -> Complex64 {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.within(0.0))
            .map(|(x, m)| roots[self.group.phase_idx(x, y) as usize] * m.to_f64_lossy())
            .sum()
    }

    /// `μ̂` on the whole dual, indexed like the group.
    pub fn charfn_table(&self) -> Vec<Complex64> {
        let roots = self.group.roots_of_unity();
        (0..self.group.order()).map(|y| self.charfn_idx(&roots, y)).collect()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    /// `(μ*ν)(z) = Σ_{x+y=z} μ(x)ν(y)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut masses = vec![T::zero(); self.group.order()];
        for (x, mx) in self.masses.iter().enumerate().filter(|(_, m)| !m.within(0.0)) {
            for (y, my) in other.masses.iter().enumerate().filter(|(_, m)| !m.within(0.0)) {
                let z = self.group.add_idx(x, y);
                masses[z] = masses[z].clone() + mx.clone() * my.clone();
            }
        }
        Ok(FiniteMeasure { group: self.group.clone(), masses, signed: self.signed || other.signed })
    }

    /// `μ̄(B) = μ(−B)`.
    pub fn reflect(&self) -> Self {
        let mut masses = vec![T::zero(); self.group.order()];
        for (x, m) in self.masses.iter().enumerate() {
            masses[self.group.neg_idx(x)] = m.clone();
        }
        FiniteMeasure { group: self.group.clone(), masses, signed: self.signed }
    }

    /// Image measure `α(μ)(B) = μ(α⁻¹B)`.
    pub fn pushforward(&self, alpha: &Endo) -> Result<Self> {
        if alpha.spec() != &self.spec() {
            return Err(Error::SpecMismatch);
        }
        let map = alpha.index_map()?;
        let mut masses = vec![T::zero(); self.group.order()];
        for (x, m) in self.masses.iter().enumerate() {
            masses[map[x]] = masses[map[x]].clone() + m.clone();
        }
        Ok(FiniteMeasure { group: self.group.clone(), masses, signed: self.signed })
    }

    /// `μ * E_x`.
    pub fn shift(&self, x: &[i64]) -> Result<Self> {
        self.convolve(&Self::dirac(&self.spec(), x)?)
    }
}

/// On-disk form of a finite measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub group: GroupSpec,
    pub masses: Vec<f64>,
    #[serde(default)]
    pub signed: bool,
}

impl TryFrom<MeasureRecord> for FiniteMeasure<f64> {
    type Error = Error;

    fn try_from(r: MeasureRecord) -> Result<Self> {
        FiniteMeasure::build(&r.group, r.masses, r.signed)
    }
}

impl From<&FiniteMeasure<f64>> for MeasureRecord {
    fn from(m: &FiniteMeasure<f64>) -> Self {
        MeasureRecord { group: m.spec(), masses: m.masses.clone(), signed: m.signed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    type Rational = BigRational;

    fn fin(orders: &[u64]) -> GroupSpec {
        GroupSpec::finite(orders).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn validation() {
        let s = fin(&[3]);
        assert!(FiniteMeasure::new(&s, vec![0.5, 0.5]).is_err());
        assert!(FiniteMeasure::new(&s, vec![0.5, 0.6, -0.1]).is_err());
        assert!(FiniteMeasure::signed(&s, vec![0.5, 0.6, -0.1]).is_ok());
        assert!(FiniteMeasure::new(&s, vec![0.5, 0.4, 0.0]).is_err());
        assert!(FiniteMeasure::new(&s, vec![q(1, 3), q(1, 3), q(1, 3)]).is_ok());
        assert!(FiniteMeasure::new(&s, vec![q(1, 3), q(1, 3), q(333, 1000)]).is_err());
        assert!(FiniteMeasure::<f64>::new(&GroupSpec::torus(1).unwrap(), vec![1.0]).is_err());
    }

    #[test]
    fn charfn_examples() {
        let s = fin(&[5]);
        let e0 = FiniteMeasure::<f64>::dirac(&s, &[0]).unwrap();
        let haar = FiniteMeasure::<f64>::uniform(&s).unwrap();
        for y in 0..5 {
            let y = DualElement(vec![y]);
            assert!((e0.charfn(&y) - 1.0).norm() < 1e-12);
            let expected = if y.0[0] == 0 { 1.0 } else { 0.0 };
            assert!((haar.charfn(&y) - expected).norm() < 1e-12);
        }
        let mu = FiniteMeasure::new(&fin(&[2]), vec![0.75, 0.25]).unwrap();
        assert!((mu.charfn(&DualElement(vec![1])) - 0.5).norm() < 1e-12);
    }

    #[test]
    fn convolution_examples() {
        let s = fin(&[3]);
        let mu = FiniteMeasure::new(&s, vec![q(1, 2), q(1, 2), Rational::zero()]).unwrap();
        let c = mu.convolve(&mu).unwrap();
        assert_eq!(c.masses(), &[q(1, 4), q(1, 2), q(1, 4)]);
        let e0 = FiniteMeasure::dirac(&s, &[0]).unwrap();
        assert_eq!(mu.convolve(&e0).unwrap(), mu);

        let g = fin(&[6]).finite_group().unwrap();
        let k = FiniteSubgroup::generated(&g, &[vec![2]]).unwrap();
        let h = FiniteMeasure::<Rational>::haar(&k);
        assert_eq!(h.convolve(&h).unwrap(), h);
    }

    #[test]
    fn reflect_examples() {
        let s = fin(&[3]);
        let mu = FiniteMeasure::new(&s, vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(mu.reflect().masses(), &[0.2, 0.3, 0.5]);
        assert_eq!(mu.reflect().reflect(), mu);
        let e = FiniteMeasure::<f64>::dirac(&fin(&[5]), &[2]).unwrap();
        assert_eq!(e.reflect(), FiniteMeasure::dirac(&fin(&[5]), &[3]).unwrap());
        let sym = FiniteMeasure::new(&s, vec![0.4, 0.3, 0.3]).unwrap();
        assert_eq!(sym.reflect(), sym);
    }

    #[test]
    fn pushforward_examples() {
        let s = fin(&[4]);
        let mu = FiniteMeasure::new(&s, vec![q(0, 1), q(1, 2), q(1, 2), q(0, 1)]).unwrap();
        let alpha = Endo::scalar(&s, 3);
        let p = mu.pushforward(&alpha).unwrap();
        assert_eq!(p.masses(), &[q(0, 1), q(0, 1), q(1, 2), q(1, 2)]);
        assert_eq!(mu.pushforward(&Endo::identity(&s)).unwrap(), mu);
        let e = FiniteMeasure::<f64>::dirac(&s, &[1]).unwrap();
        assert_eq!(e.pushforward(&alpha).unwrap(), FiniteMeasure::dirac(&s, &[3]).unwrap());
    }

    #[test]
    fn f32_measures_work() {
        let s = fin(&[2, 2]);
        let mu = FiniteMeasure::<f32>::from_weights(&s, &[1, 2, 3, 4]).unwrap();
        let c = mu.convolve(&mu.reflect()).unwrap();
        let total: f32 = c.masses().iter().sum();
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn record_round_trip() {
        let mu = FiniteMeasure::new(&fin(&[2, 2]), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let json = serde_json::to_string(&MeasureRecord::from(&mu)).unwrap();
        let back: MeasureRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(FiniteMeasure::try_from(back).unwrap(), mu);
    }
}
