use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind};

/// A finite probability mass function, entries sorted by key.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf<K, S> {
    entries: Vec<(K, S)>,
}

impl<K: Ord + Clone, S: Scalar> Pmf<K, S> {
    /// Sorts entries by key and merges duplicate keys.
    pub fn new(mut entries: Vec<(K, S)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(K, S)> = Vec::with_capacity(entries.len());
        for (k, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == k => last.1 = last.1.clone() + v,
                _ => merged.push((k, v)),
            }
        }
        Pmf { entries: merged }
    }

    pub fn entries(&self) -> &[(K, S)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mass(&self, key: &K) -> S {
        match self.entries.binary_search_by(|e| e.0.cmp(key)) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn total(&self) -> S {
        self.entries
            .iter()
            .fold(S::zero(), |acc, (_, v)| acc + v.clone())
    }

    /// Checks nonnegativity and `|Σ mass − 1| ≤ tol`; exact backends
    /// require the sum to be exactly one.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if let Some((_, v)) = self.entries.iter().find(|(_, v)| v.to_f64() < 0.0) {
            return Err(Error::Degenerate(format!("negative mass {v:?}")));
        }
        let total = self.total();
        let ok = match S::KIND {
            ScalarKind::Exact => total == S::one(),
            ScalarKind::Double => (total.to_f64() - 1.0).abs() <= tol,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Degenerate(format!("masses sum to {total:?}")))
        }
    }

    /// Push-forward along `f`.
    pub fn map_keys<K2: Ord + Clone>(&self, f: impl Fn(&K) -> K2) -> Pmf<K2, S> {
        Pmf::new(
            self.entries
                .iter()
                .map(|(k, v)| (f(k), v.clone()))
                .collect(),
        )
    }

    pub fn to_f64(&self) -> Pmf<K, f64> {
        Pmf {
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), v.to_f64()))
                .collect(),
        }
    }
}

impl<S: Scalar> Pmf<usize, S> {
    pub fn mean(&self) -> f64 {
        self.entries
            .iter()
            .map(|(k, v)| *k as f64 * v.to_f64())
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.entries
            .iter()
            .map(|(k, v)| (*k as f64 - mean).powi(2) * v.to_f64())
            .sum()
    }
}
