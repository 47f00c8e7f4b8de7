//! Named parameter storage shared by training, checkpointing, and the
//! gradient checker.

use std::collections::BTreeMap;

use crate::error::{ChaosError, Result};
use crate::nncore::array::NumArray;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamId(pub(crate) usize);

/// Ordered collection of named arrays. Iteration order is insertion order,
/// which fixes gradient/optimizer alignment and checkpoint layout.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSet {
    names: Vec<String>,
    values: Vec<NumArray>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: NumArray) -> ParamId {
        self.names.push(name.into());
        self.values.push(value);
        ParamId(self.values.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn value(&self, id: ParamId) -> &NumArray {
        &self.values[id.0]
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut NumArray {
        &mut self.values[id.0]
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.values.len()).map(ParamId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &NumArray)> {
        self.names.iter().map(|s| s.as_str()).zip(self.values.iter())
    }

    pub fn total_elements(&self) -> usize {
        self.values.iter().map(|v| v.len()).sum()
    }

    /// Sorted name -> array map for serialization.
    pub fn to_map(&self) -> BTreeMap<String, NumArray> {
        self.iter().map(|(n, v)| (n.to_string(), v.clone())).collect()
    }

    /// Rebuilds from a map, expecting exactly `order`'s names.
    pub fn from_map(order: &[&str], map: &BTreeMap<String, NumArray>) -> Result<Self> {
        if order.len() != map.len() {
            return Err(ChaosError::Config(format!(
                "checkpoint has {} weight entries, expected {}",
                map.len(),
                order.len()
            )));
        }
        let mut set = Self::new();
        for name in order {
            let value = map.get(*name).ok_or_else(|| {
                ChaosError::Config(format!("checkpoint is missing weight '{name}'"))
            })?;
            set.add(*name, value.clone());
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insertion_order_is_stable() {
        let mut p = ParamSet::new();
        let b = p.add("b", NumArray::vector(vec![1.0]));
        let a = p.add("a", NumArray::vector(vec![2.0]));
        assert_eq!(p.name(b), "b");
        assert_eq!(p.name(a), "a");
        let names: Vec<&str> = p.iter().map(|(n, _)| n).collect();
        assert_eq!(names, vec!["b", "a"]);
    }

    #[test]
    fn map_round_trip() {
        let mut p = ParamSet::new();
        p.add("w", NumArray::from_vec(vec![1.0, 2.0], &[2]).unwrap());
        p.add("b", NumArray::vector(vec![0.5]));
        let map = p.to_map();
        let back = ParamSet::from_map(&["w", "b"], &map).unwrap();
        assert_eq!(back, p);
        assert!(ParamSet::from_map(&["w", "missing"], &map).is_err());
    }
}
