//! Multi-attribute diversity of technology sets.
//!
//! An attribute is an explicit subset of the technology catalog carrying a
//! consumer weight in `[0, 1]`. The diversity of a set `D` is the total weight
//! of attributes realised by at least one member of `D`; the dissimilarity of
//! `y'` from `y` is the total weight of attributes `y'` has and `y` lacks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Tolerance on the total consumer mass of a panel.
pub const PANEL_MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Technology {
    pub id: String,
    pub label: Option<String>,
}

impl Technology {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// A characteristic shared by a subset of technologies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub id: String,
    pub members: BTreeSet<String>,
}

impl Attribute {
    pub fn new<I, S>(id: impl Into<String>, members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            id: id.into(),
            members: members.into_iter().map(Into::into).collect(),
        }
    }
}

/// One quadrature node of the consumer continuum.
#[derive(Debug, Clone, PartialEq)]
pub struct Consumer {
    pub mass: f64,
    /// Valuation in `[0, 1]` per attribute id; missing entries count as 0.
    pub valuations: BTreeMap<String, f64>,
}

/// Finite weighted panel of consumers whose masses sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsumerPanel {
    consumers: Vec<Consumer>,
}

impl ConsumerPanel {
    pub fn new(consumers: Vec<Consumer>) -> Result<Self> {
        let mut total = 0.0;
        for (i, consumer) in consumers.iter().enumerate() {
            if !consumer.mass.is_finite() || consumer.mass < 0.0 {
                return Err(Error::Validation(format!(
                    "consumer {i} has invalid mass {}",
                    consumer.mass
                )));
            }
            for (attr, &v) in &consumer.valuations {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Validation(format!(
                        "consumer {i} values attribute {attr:?} at {v}, outside [0, 1]"
                    )));
                }
            }
            total += consumer.mass;
        }
        if (total - 1.0).abs() > PANEL_MASS_TOLERANCE {
            return Err(Error::Validation(format!(
                "consumer masses sum to {total}, expected 1"
            )));
        }
        Ok(Self { consumers })
    }

    pub fn consumers(&self) -> &[Consumer] {
        &self.consumers
    }

    /// Mass-weighted mean valuation of `attr_id` (0 for consumers that omit it).
    fn mean_valuation(&self, attr_id: &str) -> f64 {
        let w: f64 = self
            .consumers
            .iter()
            .fold(0.0, |acc, c| {
                acc + c.mass * c.valuations.get(attr_id).copied().unwrap_or(0.0)
            });
        w.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone)]
struct IndexedAttribute {
    id: String,
    members: Vec<usize>,
    weight: f64,
}

/// Technology catalog together with a weighted attribute family.
#[derive(Debug, Clone)]
pub struct DiversityModel {
    catalog: Vec<Technology>,
    attributes: Vec<Attribute>,
    indexed: Vec<IndexedAttribute>,
    tech_index: HashMap<String, usize>,
    attr_index: HashMap<String, usize>,
}

impl DiversityModel {
    /// Builds a model from directly supplied weights. Every attribute needs a weight.
    pub fn with_weights(
        catalog: Vec<Technology>,
        attributes: Vec<Attribute>,
        weights: &BTreeMap<String, f64>,
    ) -> Result<Self> {
        let attr_ids: BTreeSet<&str> = attributes.iter().map(|a| a.id.as_str()).collect();
        if let Some(unknown) = weights.keys().find(|k| !attr_ids.contains(k.as_str())) {
            return Err(Error::domain(format!(
                "weight given for unknown attribute {unknown:?}"
            )));
        }
        let resolved = attributes
            .iter()
            .map(|a| {
                weights.get(&a.id).copied().ok_or_else(|| {
                    Error::Validation(format!("attribute {:?} has no weight", a.id))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::build(catalog, attributes, resolved)
    }

    /// Builds a model whose weights are the panel's mean valuations.
    pub fn from_panel(
        catalog: Vec<Technology>,
        attributes: Vec<Attribute>,
        panel: &ConsumerPanel,
    ) -> Result<Self> {
        let attr_ids: BTreeSet<&str> = attributes.iter().map(|a| a.id.as_str()).collect();
        for consumer in panel.consumers() {
            if let Some(unknown) = consumer
                .valuations
                .keys()
                .find(|k| !attr_ids.contains(k.as_str()))
            {
                return Err(Error::domain(format!(
                    "panel values unknown attribute {unknown:?}"
                )));
            }
        }
        let weights = attributes
            .iter()
            .map(|a| panel.mean_valuation(&a.id))
            .collect();
        Self::build(catalog, attributes, weights)
    }

    fn build(catalog: Vec<Technology>, attributes: Vec<Attribute>, weights: Vec<f64>) -> Result<Self> {
        let mut tech_index = HashMap::with_capacity(catalog.len());
        for (i, t) in catalog.iter().enumerate() {
            if tech_index.insert(t.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate technology id {:?}", t.id)));
            }
        }
        let mut attr_index = HashMap::with_capacity(attributes.len());
        let mut indexed = Vec::with_capacity(attributes.len());
        for (i, (attr, &weight)) in attributes.iter().zip(&weights).enumerate() {
            if attr_index.insert(attr.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate attribute id {:?}", attr.id)));
            }
            if !weight.is_finite() || !(0.0..=1.0).contains(&weight) {
                return Err(Error::Validation(format!(
                    "attribute {:?} has weight {weight}, outside [0, 1]",
                    attr.id
                )));
            }
            let members = attr
                .members
                .iter()
                .map(|m| {
                    tech_index.get(m).copied().ok_or_else(|| {
                        Error::Validation(format!(
                            "attribute {:?} lists unknown technology {m:?}",
                            attr.id
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            indexed.push(IndexedAttribute {
                id: attr.id.clone(),
                members,
                weight,
            });
        }
        Ok(Self {
            catalog,
            attributes,
            indexed,
            tech_index,
            attr_index,
        })
    }

    pub fn catalog(&self) -> &[Technology] {
        &self.catalog
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn weight(&self, attr_id: &str) -> Option<f64> {
        self.attr_index.get(attr_id).map(|&i| self.indexed[i].weight)
    }

    /// Weights keyed by attribute id.
    pub fn weights(&self) -> BTreeMap<String, f64> {
        self.indexed
            .iter()
            .map(|a| (a.id.clone(), a.weight))
            .collect()
    }

    /// Weight `attr_id` would receive from `panel`.
    pub fn attribute_weight(&self, panel: &ConsumerPanel, attr_id: &str) -> Result<f64> {
        if !self.attr_index.contains_key(attr_id) {
            return Err(Error::domain(format!("unknown attribute {attr_id:?}")));
        }
        Ok(panel.mean_valuation(attr_id))
    }

    /// Ids of attributes with strictly positive weight, sorted.
    pub fn relevant_attributes(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .indexed
            .iter()
            .filter(|a| a.weight > 0.0)
            .map(|a| a.id.clone())
            .collect();
        ids.sort();
        ids
    }

    /// Sum of all attribute weights; an upper bound on any diversity value.
    pub fn total_weight(&self) -> f64 {
        self.indexed.iter().fold(0.0, |acc, a| acc + a.weight)
    }

    fn index_of(&self, tech_id: &str) -> Result<usize> {
        self.tech_index
            .get(tech_id)
            .copied()
            .ok_or_else(|| Error::domain(format!("unknown technology {tech_id:?}")))
    }

    /// Diversity of the set of technologies named by `ids`.
    pub fn diversity<S: AsRef<str>>(&self, ids: &[S]) -> Result<f64> {
        let mut in_set = vec![false; self.catalog.len()];
        for id in ids {
            in_set[self.index_of(id.as_ref())?] = true;
        }
        Ok(self.diversity_of_mask(&in_set))
    }

    /// Diversity of a set given as a membership mask over catalog positions.
    pub fn diversity_of_mask(&self, in_set: &[bool]) -> f64 {
        self.indexed
            .iter()
            .filter(|a| a.members.iter().any(|&m| in_set.get(m).copied().unwrap_or(false)))
            .fold(0.0, |acc, a| acc + a.weight)
    }

    /// Dissimilarity of `yp` from `y`: weight of attributes `yp` has and `y` lacks.
    pub fn dissimilarity(&self, yp: &str, y: &str) -> Result<f64> {
        let ip = self.index_of(yp)?;
        let i = self.index_of(y)?;
        Ok(self
            .indexed
            .iter()
            .filter(|a| a.members.contains(&ip) && !a.members.contains(&i))
            .fold(0.0, |acc, a| acc + a.weight))
    }

    /// Whether `yp` is more diverse on its own than `y`.
    pub fn is_relevant_innovation(&self, yp: &str, y: &str) -> Result<bool> {
        Ok(self.dissimilarity(yp, y)? > self.dissimilarity(y, yp)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1() -> DiversityModel {
        let catalog = vec![Technology::new("y"), Technology::new("yp")];
        let attrs = vec![
            Attribute::new("A1", ["y", "yp"]),
            Attribute::new("A2", ["y"]),
            Attribute::new("A3", ["yp"]),
        ];
        let weights = [("A1", 0.5), ("A2", 0.2), ("A3", 0.4)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        DiversityModel::with_weights(catalog, attrs, &weights).unwrap()
    }

    fn consumer(mass: f64, v: f64) -> Consumer {
        Consumer {
            mass,
            valuations: [("A1".to_string(), v)].into_iter().collect(),
        }
    }

    #[test]
    fn attribute_weight_is_mass_weighted_mean() {
        let model = f1();
        let cases = [
            (vec![consumer(0.5, 1.0), consumer(0.5, 0.0)], 0.5),
            (vec![consumer(1.0, 0.0)], 0.0),
            (vec![consumer(0.25, 0.8), consumer(0.75, 0.4)], 0.5),
        ];
        for (consumers, expected) in cases {
            let panel = ConsumerPanel::new(consumers).unwrap();
            let w = model.attribute_weight(&panel, "A1").unwrap();
            assert!((w - expected).abs() < 1e-12, "{w} vs {expected}");
        }
        let panel = ConsumerPanel::new(vec![consumer(1.0, 0.3)]).unwrap();
        assert!(matches!(model.attribute_weight(&panel, "nope"), Err(Error::Domain(_))));
    }

    #[test]
    fn panel_rejects_bad_masses_and_valuations() {
        assert!(ConsumerPanel::new(vec![consumer(0.5, 0.1)]).is_err());
        assert!(ConsumerPanel::new(vec![consumer(1.5, 0.1), consumer(-0.5, 0.1)]).is_err());
        assert!(ConsumerPanel::new(vec![consumer(1.0, 1.2)]).is_err());
    }

    #[test]
    fn relevant_attributes_filter_strictly_positive() {
        let catalog = vec![Technology::new("y")];
        let attrs = vec![
            Attribute::new("A3", ["y"]),
            Attribute::new("A1", ["y"]),
            Attribute::new("A2", ["y"]),
        ];
        let w = |a: f64, b: f64, c: f64| -> BTreeMap<String, f64> {
            [("A1", a), ("A2", b), ("A3", c)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect()
        };
        let m = DiversityModel::with_weights(catalog.clone(), attrs.clone(), &w(0.5, 0.0, 0.4)).unwrap();
        assert_eq!(m.relevant_attributes(), vec!["A1", "A3"]);
        let m = DiversityModel::with_weights(catalog.clone(), attrs.clone(), &w(0.0, 0.0, 0.0)).unwrap();
        assert!(m.relevant_attributes().is_empty());
        let m = DiversityModel::with_weights(catalog, attrs, &w(1e-15, 0.0, 0.0)).unwrap();
        assert_eq!(m.relevant_attributes(), vec!["A1"]);
    }

    #[test]
    fn diversity_on_fixture() {
        let m = f1();
        let empty: [&str; 0] = [];
        assert_eq!(m.diversity(&empty).unwrap(), 0.0);
        assert!((m.diversity(&["y"]).unwrap() - 0.7).abs() < 1e-12);
        assert!((m.diversity(&["yp"]).unwrap() - 0.9).abs() < 1e-12);
        assert!((m.diversity(&["y", "yp"]).unwrap() - 1.1).abs() < 1e-12);
        assert!(matches!(m.diversity(&["z"]), Err(Error::Domain(_))));

        let mut weights = m.weights();
        weights.insert("A2".into(), 0.0);
        let m0 = DiversityModel::with_weights(m.catalog().to_vec(), m.attributes().to_vec(), &weights)
            .unwrap();
        assert!((m0.diversity(&["y"]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dissimilarity_on_fixture() {
        let m = f1();
        assert_eq!(m.dissimilarity("y", "y").unwrap(), 0.0);
        assert_eq!(m.dissimilarity("yp", "yp").unwrap(), 0.0);
        assert!((m.dissimilarity("yp", "y").unwrap() - 0.4).abs() < 1e-12);
        assert!((m.dissimilarity("y", "yp").unwrap() - 0.2).abs() < 1e-12);
        let lhs = m.diversity(&["yp"]).unwrap();
        let rhs = m.diversity(&["y"]).unwrap() + m.dissimilarity("yp", "y").unwrap()
            - m.dissimilarity("y", "yp").unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        assert!(m.dissimilarity("q", "y").is_err());
    }

    #[test]
    fn relevant_innovation_on_fixture() {
        let m = f1();
        assert!(m.is_relevant_innovation("yp", "y").unwrap());
        assert!(!m.is_relevant_innovation("y", "y").unwrap());
        assert!(!m.is_relevant_innovation("y", "yp").unwrap());
    }

    #[test]
    fn construction_rejects_inconsistent_catalogs() {
        let weights: BTreeMap<String, f64> = [("A".to_string(), 0.5)].into_iter().collect();
        let dup = DiversityModel::with_weights(
            vec![Technology::new("y"), Technology::new("y")],
            vec![Attribute::new("A", ["y"])],
            &weights,
        );
        assert!(dup.is_err());
        let stray = DiversityModel::with_weights(
            vec![Technology::new("y")],
            vec![Attribute::new("A", ["z"])],
            &weights,
        );
        assert!(stray.is_err());
        let heavy: BTreeMap<String, f64> = [("A".to_string(), 1.5)].into_iter().collect();
        let heavy = DiversityModel::with_weights(
            vec![Technology::new("y")],
            vec![Attribute::new("A", ["y"])],
            &heavy,
        );
        assert!(heavy.is_err());
    }

    #[test]
    fn empty_sums_are_positive_zero() {
        let m = f1();
        let d = m.dissimilarity("y", "y").unwrap();
        assert!(d == 0.0 && d.is_sign_positive());
        assert!(m.diversity_of_mask(&[false, false]).is_sign_positive());
    }
}
