//! Finitely supported (possibly truncated) probability laws.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::scalar::Scalar;

/// A map `state → probability` plus the mass known to lie outside the
/// stored support. For a truncated probability law,
/// `Σ support + tail_deficit = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseLaw<K: Ord, S> {
    support: BTreeMap<K, S>,
    tail_deficit: S,
}

impl<K: Ord + Clone, S: Scalar> Default for SparseLaw<K, S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone, S: Scalar> SparseLaw<K, S> {
    pub fn new() -> Self {
        SparseLaw {
            support: BTreeMap::new(),
            tail_deficit: S::zero(),
        }
    }

    pub fn dirac(state: K) -> Self {
        let mut law = Self::new();
        law.support.insert(state, S::one());
        law
    }

    pub fn from_parts(support: BTreeMap<K, S>, tail_deficit: S) -> Self {
        SparseLaw { support, tail_deficit }
    }

    /// Adds `p` to the mass at `state`; zero contributions are dropped.
    pub fn add(&mut self, state: K, p: S) {
        if p.is_zero() {
            return;
        }
        match self.support.get_mut(&state) {
            Some(v) => *v = v.clone() + p,
            None => {
                self.support.insert(state, p);
            }
        }
    }

    pub fn add_deficit(&mut self, p: S) {
        self.tail_deficit = self.tail_deficit.clone() + p;
    }

    pub fn get(&self, state: &K) -> S {
        self.support.get(state).cloned().unwrap_or_else(S::zero)
    }

    pub fn tail_deficit(&self) -> &S {
        &self.tail_deficit
    }

    pub fn support(&self) -> &BTreeMap<K, S> {
        &self.support
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &S)> {
        self.support.iter()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Sum of the stored masses.
    pub fn mass(&self) -> S {
        self.support.values().fold(S::zero(), |acc, v| acc + v.clone())
    }

    /// Pushes the law forward through `f`, merging states that collide.
    pub fn map_states<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> SparseLaw<K2, S> {
        let mut out = SparseLaw::new();
        for (k, v) in &self.support {
            out.add(f(k), v.clone());
        }
        out.tail_deficit = self.tail_deficit.clone();
        out
    }

    pub fn to_f64(&self) -> SparseLaw<K, f64> {
        SparseLaw {
            support: self.support.iter().map(|(k, v)| (k.clone(), v.to_f64())).collect(),
            tail_deficit: self.tail_deficit.to_f64(),
        }
    }
}

impl<K: Ord + Clone> SparseLaw<K, f64> {
    /// Empirical law of a sample.
    pub fn empirical<I: IntoIterator<Item = K>>(samples: I) -> Self {
        let mut counts: BTreeMap<K, u64> = BTreeMap::new();
        let mut n = 0u64;
        for s in samples {
            *counts.entry(s).or_default() += 1;
            n += 1;
        }
        Self::from_counts(&counts, n)
    }

    pub fn from_counts(counts: &BTreeMap<K, u64>, n: u64) -> Self {
        let n = n.max(1) as f64;
        SparseLaw {
            support: counts.iter().map(|(k, &c)| (k.clone(), c as f64 / n)).collect(),
            tail_deficit: 0.0,
        }
    }
}

#[derive(Serialize)]
struct RowEntry<'a, K> {
    state: &'a K,
    probability: String,
}

#[derive(Serialize)]
struct LawJson<'a, K> {
    rows: Vec<RowEntry<'a, K>>,
    deficit: String,
}

impl<K: Ord + Clone + Serialize, S: Scalar> SparseLaw<K, S> {
    /// `{"rows": [{"state": …, "probability": "num/den"}, …], "deficit": …}`.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = LawJson {
            rows: self
                .support
                .iter()
                .map(|(state, p)| RowEntry {
                    state,
                    probability: p.render(),
                })
                .collect(),
            deficit: self.tail_deficit.render(),
        };
        serde_json::to_value(doc).expect("law serializes")
    }
}
