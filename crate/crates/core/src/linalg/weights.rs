use crate::error::{Error, Result};

/// How a [`WeightVector`] enters the quadratic objective `<r, x^2>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRole {
    /// `r`, the weights themselves.
    Resistances,
    /// `c = 1 / r`.
    Conductances,
}

/// Strictly positive, finite per-column weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
    role: WeightRole,
}

impl WeightVector {
    pub fn new(values: Vec<f64>, role: WeightRole) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("weight vector is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "weight {i} is {} (must be positive and finite)",
                values[i]
            )));
        }
        Ok(Self { values, role })
    }

    pub fn resistances(values: Vec<f64>) -> Result<Self> {
        Self::new(values, WeightRole::Resistances)
    }

    pub fn conductances(values: Vec<f64>) -> Result<Self> {
        Self::new(values, WeightRole::Conductances)
    }

    /// `1/m` in every coordinate.
    pub fn uniform(m: usize, role: WeightRole) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("weight vector is empty".into()));
        }
        Ok(Self {
            values: vec![1.0 / m as f64; m],
            role,
        })
    }

    pub fn role(&self) -> WeightRole {
        self.role
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm1(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Rescaled onto the simplex.
    pub fn normalized(&self) -> Self {
        let s = self.norm1();
        Self {
            values: self.values.iter().map(|v| v / s).collect(),
            role: self.role,
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect(), self.role)
    }

    /// Weights as conductances, inverting if necessary.
    pub fn conductances_vec(&self) -> Vec<f64> {
        match self.role {
            WeightRole::Conductances => self.values.clone(),
            WeightRole::Resistances => self.values.iter().map(|r| 1.0 / r).collect(),
        }
    }

    /// Weights as resistances, inverting if necessary.
    pub fn resistances_vec(&self) -> Vec<f64> {
        match self.role {
            WeightRole::Resistances => self.values.clone(),
            WeightRole::Conductances => self.values.iter().map(|c| 1.0 / c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive() {
        assert!(WeightVector::resistances(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::resistances(vec![1.0, -2.0]).is_err());
        assert!(WeightVector::conductances(vec![f64::INFINITY]).is_err());
        assert!(WeightVector::conductances(vec![]).is_err());
    }

    #[test]
    fn normalized_lies_in_simplex() {
        let w = WeightVector::resistances(vec![1.0, 3.0, 4.0]).unwrap().normalized();
        assert!((w.norm1() - 1.0).abs() < 1e-15);
        assert_eq!(w.values(), &[0.125, 0.375, 0.5]);
    }
}
