//! Nominal-to-numerical coding and min-max scaling to `[-1, +1]`.
//!
//! Both transforms are fitted on training rows only and serialize to JSON so
//! a trained pipeline can be reapplied exactly.

use serde::{Deserialize, Serialize};

use crate::dataset::{Attribute, AttributeKind, ExampleSet, Role, Value};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalColumn {
    pub attribute: String,
    /// Token at position `i` maps to code `i`.
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NominalMapping {
    pub columns: Vec<NominalColumn>,
}

impl NominalMapping {
    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, attribute: &str) -> Option<&NominalColumn> {
        self.columns.iter().find(|c| c.attribute == attribute)
    }

    pub fn code(&self, attribute: &str, token: &str) -> Option<usize> {
        self.column(attribute)?.tokens.iter().position(|t| t == token)
    }
}

/// Token codes for every regular nominal attribute, numbered in order of
/// first appearance in `set`.
pub fn fit_nominal_mapping(set: &ExampleSet) -> Result<NominalMapping> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("cannot fit on an empty example set".into()));
    }
    let mut columns = Vec::new();
    for i in set.regular_indices() {
        let attr = &set.schema()[i];
        if !attr.kind.is_nominal() {
            continue;
        }
        let mut tokens: Vec<String> = Vec::new();
        for row in set.rows() {
            let t = row[i].as_token().expect("regular values are present");
            if !tokens.iter().any(|s| s == t) {
                tokens.push(t.to_owned());
            }
        }
        columns.push(NominalColumn {
            attribute: attr.name.clone(),
            tokens,
        });
    }
    Ok(NominalMapping { columns })
}

/// Replace regular nominal values by their codes. The label stays nominal.
pub fn apply_nominal_mapping(set: &ExampleSet, m: &NominalMapping) -> Result<ExampleSet> {
    let mut schema = set.schema().to_vec();
    let mut rows = set.rows().to_vec();
    for i in set.regular_indices() {
        let attr = &set.schema()[i];
        if !attr.kind.is_nominal() {
            continue;
        }
        let column = m
            .column(&attr.name)
            .ok_or_else(|| Error::SchemaMismatch(format!("no nominal mapping for `{}`", attr.name)))?;
        for row in rows.iter_mut() {
            let token = row[i].as_token().expect("regular values are present");
            let code = column
                .tokens
                .iter()
                .position(|t| t == token)
                .ok_or_else(|| Error::UnseenToken {
                    attribute: attr.name.clone(),
                    token: token.to_owned(),
                })?;
            row[i] = Value::Number(code as f64);
        }
        schema[i] = Attribute {
            name: attr.name.clone(),
            kind: AttributeKind::Numeric,
            role: Role::Regular,
            vocabulary: Vec::new(),
        };
    }
    set.replace_rows(schema, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleColumn {
    pub attribute: String,
    pub min: f64,
    pub max: f64,
}

impl ScaleColumn {
    /// `2 (x - min) / (max - min) - 1`, clamped to `[-1, 1]`; constant columns map to 0.
    pub fn scale(&self, x: f64) -> f64 {
        let span = self.max - self.min;
        if span <= 0.0 {
            return 0.0;
        }
        (2.0 * (x - self.min) / span - 1.0).clamp(-1.0, 1.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub columns: Vec<ScaleColumn>,
}

pub fn fit_scaler(set: &ExampleSet) -> Result<ScalingParams> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("cannot fit on an empty example set".into()));
    }
    let x = set.feature_matrix()?;
    let columns = set
        .regular_indices()
        .iter()
        .enumerate()
        .map(|(j, &i)| {
            let (min, max) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), row| {
                (lo.min(row[j]), hi.max(row[j]))
            });
            ScaleColumn {
                attribute: set.schema()[i].name.clone(),
                min,
                max,
            }
        })
        .collect();
    Ok(ScalingParams { columns })
}

pub fn apply_scaler(set: &ExampleSet, p: &ScalingParams) -> Result<ExampleSet> {
    let regular = set.regular_indices();
    if regular.len() != p.columns.len() {
        return Err(Error::SchemaMismatch(format!(
            "scaler fitted on {} attributes, set has {}",
            p.columns.len(),
            regular.len()
        )));
    }
    for (&i, col) in regular.iter().zip(&p.columns) {
        if set.schema()[i].name != col.attribute {
            return Err(Error::SchemaMismatch(format!(
                "scaler expects `{}` where the set has `{}`",
                col.attribute,
                set.schema()[i].name
            )));
        }
    }
    let x = set.feature_matrix()?;
    let rows = set
        .rows()
        .iter()
        .zip(&x)
        .map(|(row, features)| {
            let mut row = row.clone();
            for ((&i, col), &v) in regular.iter().zip(&p.columns).zip(features) {
                row[i] = Value::Number(col.scale(v));
            }
            row
        })
        .collect();
    set.replace_rows(set.schema().to_vec(), rows)
}

/// Nominal mapping followed by scaling, fitted together.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub nominal: NominalMapping,
    pub scaling: ScalingParams,
}

impl Preprocessor {
    pub fn fit(set: &ExampleSet) -> Result<Self> {
        let nominal = fit_nominal_mapping(set)?;
        let coded = apply_nominal_mapping(set, &nominal)?;
        let scaling = fit_scaler(&coded)?;
        Ok(Preprocessor { nominal, scaling })
    }

    pub fn apply(&self, set: &ExampleSet) -> Result<ExampleSet> {
        apply_scaler(&apply_nominal_mapping(set, &self.nominal)?, &self.scaling)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_synthetic;

    fn tokens(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn mixed_set() -> ExampleSet {
        let schema = vec![
            Attribute::numeric("age"),
            Attribute::nominal("owner", tokens(&["yes", "no"])),
            Attribute::nominal("colour", tokens(&["blue", "red", "green", "purple"])),
            Attribute::nominal("class", tokens(&["good", "bad"])).with_role(Role::Label),
        ];
        let row = |age: f64, owner: &str, colour: &str, class: &str| {
            vec![
                Value::Number(age),
                Value::Token(owner.into()),
                Value::Token(colour.into()),
                Value::Token(class.into()),
            ]
        };
        ExampleSet::new(
            schema,
            vec![
                row(20.0, "no", "red", "good"),
                row(30.0, "yes", "blue", "bad"),
                row(40.0, "no", "red", "good"),
                row(50.0, "no", "green", "bad"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn numeric_only_schema_gives_empty_mapping() {
        let set = generate_synthetic(10, 3, 1.0, 0).unwrap();
        assert!(fit_nominal_mapping(&set).unwrap().is_empty());
    }

    #[test]
    fn codes_follow_first_appearance() {
        let m = fit_nominal_mapping(&mixed_set()).unwrap();
        assert_eq!(m.code("owner", "no"), Some(0));
        assert_eq!(m.code("owner", "yes"), Some(1));
        assert_eq!(m.column("colour").unwrap().tokens, tokens(&["red", "blue", "green"]));
        assert!(m.column("class").is_none(), "label is not coded");
    }

    #[test]
    fn apply_makes_regular_numeric_and_keeps_label() {
        let set = mixed_set();
        let m = fit_nominal_mapping(&set).unwrap();
        let coded = apply_nominal_mapping(&set, &m).unwrap();
        let x = coded.feature_matrix().unwrap();
        assert_eq!(x[0], vec![20.0, 0.0, 0.0]);
        assert_eq!(x[3], vec![50.0, 0.0, 2.0]);
        assert_eq!(coded.label_of(1), Some("bad"));
        assert_eq!(coded.label_attribute().kind, AttributeKind::BinaryNominal);
        assert_eq!(apply_nominal_mapping(&coded, &m).unwrap(), coded);
    }

    #[test]
    fn unseen_token_is_an_error() {
        let set = mixed_set();
        let m = fit_nominal_mapping(&set.select(&[0, 1, 2])).unwrap();
        let err = apply_nominal_mapping(&set, &m).unwrap_err();
        assert!(matches!(err, Error::UnseenToken { ref token, .. } if token == "green"));
    }

    #[test]
    fn scaler_endpoints_midpoint_and_clamp() {
        let col = ScaleColumn {
            attribute: "x".into(),
            min: 2.0,
            max: 4.0,
        };
        assert_eq!(col.scale(2.0), -1.0);
        assert_eq!(col.scale(4.0), 1.0);
        assert_eq!(col.scale(3.0), 0.0);
        assert_eq!(col.scale(5.0), 1.0);
        assert_eq!(col.scale(-7.0), -1.0);
        let flat = ScaleColumn {
            attribute: "x".into(),
            min: 3.0,
            max: 3.0,
        };
        assert_eq!(flat.scale(3.0), 0.0);
        assert_eq!(flat.scale(100.0), 0.0);
    }

    #[test]
    fn pipeline_lands_in_unit_box() {
        let set = mixed_set();
        let p = Preprocessor::fit(&set).unwrap();
        let out = p.apply(&set).unwrap();
        for row in out.feature_matrix().unwrap() {
            assert!(row.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
        let json = p.to_json().unwrap();
        assert_eq!(Preprocessor::from_json(&json).unwrap(), p);
    }

    #[test]
    fn scaler_rejects_mismatched_schema() {
        let a = generate_synthetic(10, 3, 1.0, 0).unwrap();
        let b = generate_synthetic(10, 2, 1.0, 0).unwrap();
        let p = fit_scaler(&a).unwrap();
        assert!(matches!(apply_scaler(&b, &p), Err(Error::SchemaMismatch(_))));
    }
}
