use crate::error::{Error, Result};
use crate::graph::{Domain, Graph};

/// A real value per vertex, read either as a function `phi` or as a signed
/// measure `mu` depending on the operation.
///
/// Norms follow the stationary weight `pi(v) = deg(v)`:
/// functions use `||phi||_{2,pi}` and `||phi||_{1,pi}`, measures use
/// `||mu||_{2,1/pi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassVector {
    values: Vec<f64>,
    support_hint: Option<Domain>,
}

impl MassVector {
    pub fn from_values(values: Vec<f64>) -> Self {
        MassVector {
            values,
            support_hint: None,
        }
    }

    pub fn with_support(mut self, domain: Domain) -> Self {
        self.support_hint = Some(domain);
        self
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_values(vec![0.0; n])
    }

    pub fn delta(n: usize, v: usize) -> Self {
        let mut values = vec![0.0; n];
        values[v] = 1.0;
        Self::from_values(values)
    }

    /// Uniform probability measure on `set`.
    pub fn uniform_on(g: &Graph, set: &Domain) -> Self {
        let mut values = vec![0.0; g.vertex_count()];
        let w = 1.0 / set.len() as f64;
        for v in set.iter() {
            values[v] = w;
        }
        Self::from_values(values).with_support(set.clone())
    }

    /// `pi_D(v) = pi(v) / pi(D)` on `set`.
    pub fn pi_on(g: &Graph, set: &Domain) -> Self {
        let mut values = vec![0.0; g.vertex_count()];
        let total = set.pi_mass(g);
        for v in set.iter() {
            values[v] = g.pi(v) / total;
        }
        Self::from_values(values).with_support(set.clone())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn support_hint(&self) -> Option<&Domain> {
        self.support_hint.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&x| x >= 0.0)
    }

    /// Restriction `mu I_A`.
    pub fn restricted(&self, domain: &Domain) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for v in domain.iter() {
            values[v] = self.values[v];
        }
        Self::from_values(values).with_support(domain.clone())
    }

    /// Error if any non-zero entry lies outside `domain`.
    pub fn require_support(&self, domain: &Domain) -> Result<()> {
        match self
            .values
            .iter()
            .enumerate()
            .find(|&(v, &x)| x != 0.0 && !domain.contains(v))
        {
            Some((vertex, _)) => Err(Error::SupportViolation { vertex }),
            None => Ok(()),
        }
    }

    pub fn mass_in(&self, set: &Domain) -> f64 {
        set.iter().map(|v| self.values[v]).sum()
    }

    /// `||phi||_{2,pi}^2`
    pub fn norm_2_pi_sq(&self, g: &Graph) -> f64 {
        self.values.iter().enumerate().map(|(v, &x)| g.pi(v) * x * x).sum()
    }

    /// `||phi||_{1,pi}`
    pub fn norm_1_pi(&self, g: &Graph) -> f64 {
        self.values.iter().enumerate().map(|(v, &x)| g.pi(v) * x.abs()).sum()
    }

    /// `||mu||_{2,1/pi}^2`
    pub fn norm_2_inv_pi_sq(&self, g: &Graph) -> f64 {
        self.inner_inv_pi(g, self)
    }

    pub fn norm_2_inv_pi(&self, g: &Graph) -> f64 {
        self.norm_2_inv_pi_sq(g).sqrt()
    }

    /// `<mu, nu>_{1/pi}`
    pub fn inner_inv_pi(&self, g: &Graph, other: &MassVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(v, (&a, &b))| a * b / g.pi(v))
            .sum()
    }

    /// `<phi, psi>_pi`
    pub fn inner_pi(&self, g: &Graph, other: &MassVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(v, (&a, &b))| g.pi(v) * a * b)
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        MassVector {
            values: self.values.iter().map(|x| x * factor).collect(),
            support_hint: self.support_hint.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_on_cycle() {
        let g = Graph::cycle(5).unwrap();
        let phi = MassVector::from_values(vec![1.0, -2.0, 0.0, 0.0, 0.5]);
        assert_eq!(phi.norm_2_pi_sq(&g), 2.0 * (1.0 + 4.0 + 0.25));
        assert_eq!(phi.norm_1_pi(&g), 2.0 * 3.5);
        assert_eq!(phi.norm_2_inv_pi_sq(&g), 5.25 / 2.0);
    }

    #[test]
    fn start_measures_are_probabilities() {
        let g = Graph::lamplighter_segment(3).unwrap();
        let d = g.ball(4, 2).unwrap();
        let u = MassVector::uniform_on(&g, &d);
        let p = MassVector::pi_on(&g, &d);
        assert!((u.sum() - 1.0).abs() < 1e-12);
        assert!((p.sum() - 1.0).abs() < 1e-12);
        assert!(u.require_support(&d).is_ok());
        assert_eq!(p.norm_2_inv_pi_sq(&g) * d.pi_mass(&g), 1.0_f64.max(p.norm_2_inv_pi_sq(&g) * d.pi_mass(&g)));
    }

    #[test]
    fn support_violation_names_vertex() {
        let d = Domain::new(4, vec![0, 1]).unwrap();
        let phi = MassVector::from_values(vec![1.0, 0.0, 0.0, 3.0]);
        assert_eq!(phi.require_support(&d), Err(Error::SupportViolation { vertex: 3 }));
    }
}
