use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{FiniteDistribution, Outcome};
use crate::error::{Error, Result};

/// A randomized map from input outcomes to distributions over one shared
/// output outcome set.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub struct StochasticKernel {
    outputs: Vec<Outcome>,
    rows: BTreeMap<Outcome, Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct KernelRow {
    input: Outcome,
    output: FiniteDistribution,
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    rows: Vec<KernelRow>,
}

impl TryFrom<KernelRepr> for StochasticKernel {
    type Error = Error;

    fn try_from(repr: KernelRepr) -> Result<Self> {
        StochasticKernel::from_rows(repr.rows.into_iter().map(|r| (r.input, r.output)))
    }
}

impl From<StochasticKernel> for KernelRepr {
    fn from(k: StochasticKernel) -> Self {
        let rows = k
            .rows
            .keys()
            .map(|input| KernelRow {
                input: input.clone(),
                output: k.row(input).expect("row exists"),
            })
            .collect();
        KernelRepr { rows }
    }
}

impl StochasticKernel {
    /// Builds a kernel from per-input output distributions. The shared output
    /// set is the sorted union of all row labels.
    pub fn from_rows<I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Outcome, FiniteDistribution)>,
    {
        let rows: Vec<(Outcome, FiniteDistribution)> = rows.into_iter().collect();
        let outputs: Vec<Outcome> = rows
            .iter()
            .flat_map(|(_, d)| d.outcomes().iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<&Outcome, usize> = outputs.iter().enumerate().map(|(i, o)| (o, i)).collect();
        let mut dense = BTreeMap::new();
        for (input, dist) in &rows {
            let mut row = vec![0.0; outputs.len()];
            for (o, w) in dist.iter() {
                row[index[o]] += w;
            }
            if dense.insert(input.clone(), row).is_some() {
                return Err(Error::DuplicateOutcome(input.clone()));
            }
        }
        Ok(StochasticKernel { outputs, rows: dense })
    }

    /// Dense constructor; every row must be a probability vector over `outputs`.
    pub fn from_dense(outputs: Vec<Outcome>, rows: Vec<(Outcome, Vec<f64>)>) -> Result<Self> {
        let mut dense = BTreeMap::new();
        for (input, row) in rows {
            if row.len() != outputs.len() {
                return Err(Error::InvalidParam(format!("row for {input} has wrong length")));
            }
            FiniteDistribution::new(outputs.clone(), row.clone())?;
            if dense.insert(input.clone(), row).is_some() {
                return Err(Error::DuplicateOutcome(input));
            }
        }
        Ok(StochasticKernel { outputs, rows: dense })
    }

    pub fn identity<'a, I>(outcomes: I) -> Self
    where
        I: IntoIterator<Item = &'a Outcome>,
    {
        let outputs: Vec<Outcome> = outcomes.into_iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let rows = outputs
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let mut row = vec![0.0; outputs.len()];
                row[i] = 1.0;
                (o.clone(), row)
            })
            .collect();
        StochasticKernel { outputs, rows }
    }

    pub fn outputs(&self) -> &[Outcome] {
        &self.outputs
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Outcome> {
        self.rows.keys()
    }

    pub fn row_weights(&self, input: &Outcome) -> Option<&[f64]> {
        self.rows.get(input).map(Vec::as_slice)
    }

    pub fn row(&self, input: &Outcome) -> Option<FiniteDistribution> {
        let row = self.rows.get(input)?;
        Some(
            FiniteDistribution::new(self.outputs.clone(), row.clone())
                .expect("rows are validated at construction"),
        )
    }
}

/// The law of `K(Z)` for `Z ~ dist`.
pub fn pushforward(dist: &FiniteDistribution, kernel: &StochasticKernel) -> Result<FiniteDistribution> {
    let mut out = vec![0.0; kernel.outputs.len()];
    for (z, w) in dist.support() {
        let row = kernel.rows.get(z).ok_or_else(|| Error::MissingRow(z.clone()))?;
        for (acc, r) in out.iter_mut().zip(row) {
            *acc += w * r;
        }
    }
    FiniteDistribution::new(kernel.outputs.clone(), out)
}
