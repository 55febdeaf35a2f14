use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Observed values together with the seed and model tag that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet<F> {
    values: Vec<F>,
    seed: u64,
    model_tag: String,
}

impl<F: Scalar> SampleSet<F> {
    /// Fails on an empty sequence or on any non-finite value.
    pub fn new(values: Vec<F>, seed: u64, model_tag: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("sample set is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample {i} is not finite")));
        }
        Ok(SampleSet {
            values,
            seed,
            model_tag: model_tag.into(),
        })
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn model_tag(&self) -> &str {
        &self.model_tag
    }

    pub fn into_values(self) -> Vec<F> {
        self.values
    }

    /// Absolute values, as needed by the Mellin route.
    pub fn abs(&self) -> Self {
        SampleSet {
            values: self.values.iter().map(|v| v.abs()).collect(),
            seed: self.seed,
            model_tag: format!("|{}|", self.model_tag),
        }
    }

    /// Concatenation; the seed of `self` is kept.
    pub fn union(&self, other: &Self) -> Self {
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        SampleSet {
            values,
            seed: self.seed,
            model_tag: self.model_tag.clone(),
        }
    }

    pub fn mean(&self) -> F {
        let s = self.values.iter().fold(F::zero(), |a, &b| a + b);
        s / F::of_usize(self.values.len())
    }

    /// Precision conversion.
    pub fn cast<G: Scalar>(&self) -> SampleSet<G> {
        SampleSet {
            values: self.values.iter().map(|v| G::lit(v.as_f64())).collect(),
            seed: self.seed,
            model_tag: self.model_tag.clone(),
        }
    }
}
