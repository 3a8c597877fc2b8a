//! JSON encodings of diagrams and sums.
//!
//! Serialization is canonical: terms are sorted by canonical key, half-edges are named
//! `h0, h1, ...` by id, cyclic orders start at their smallest half-edge, and object
//! keys come out sorted.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Color, Diagram, DiagramSum, Truncation};
use crate::error::{Error, Result};
use crate::linalg::{parse_rational, Rational};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LegJson {
    pub he: String,
    pub color: Color,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VertexJson {
    pub cyclic: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DiagramJson {
    #[serde(default)]
    pub legs: Vec<LegJson>,
    #[serde(default)]
    pub vertices: Vec<VertexJson>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub circles: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: String,
    pub diagram: DiagramJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SumJson {
    #[serde(default)]
    pub truncation: Option<Truncation>,
    pub terms: Vec<TermJson>,
}

fn he_name(h: usize) -> String {
    format!("h{h}")
}

impl DiagramJson {
    pub fn from_diagram(d: &Diagram) -> Self {
        let legs = d.legs().iter().map(|l| LegJson { he: he_name(l.he), color: l.color.clone() }).collect();
        let vertices = d
            .vertices()
            .iter()
            .map(|hs| {
                let start = (0..3).min_by_key(|&i| hs[i]).expect("three half-edges");
                VertexJson { cyclic: (0..3).map(|k| he_name(hs[(start + k) % 3])).collect() }
            })
            .collect();
        let edges = d.edges().into_iter().map(|(a, b)| (he_name(a), he_name(b))).collect();
        Self { legs, vertices, edges, circles: d.circles() as i64 }
    }

    pub fn to_diagram(&self) -> Result<Diagram> {
        let legs: Vec<(String, Color)> = self.legs.iter().map(|l| (l.he.clone(), l.color.clone())).collect();
        let vertices: Vec<Vec<String>> = self.vertices.iter().map(|v| v.cyclic.clone()).collect();
        Diagram::validate(&legs, &vertices, &self.edges, self.circles)
    }
}

impl Diagram {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(DiagramJson::from_diagram(self)).expect("diagram serializes")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: DiagramJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse { path: "diagram".into(), message: e.to_string() })?;
        raw.to_diagram()
    }
}

impl DiagramSum {
    pub fn to_json_struct(&self) -> SumJson {
        SumJson {
            truncation: self.truncation(),
            terms: self
                .terms()
                .map(|t| TermJson { coeff: t.coeff.to_string(), diagram: DiagramJson::from_diagram(&t.diagram) })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self.to_json_struct()).expect("sum serializes")
    }

    /// Terms only, as a JSON array.
    pub fn terms_json(&self) -> Value {
        serde_json::to_value(self.to_json_struct().terms).expect("terms serialize")
    }

    pub fn from_json_struct(raw: &SumJson) -> Result<Self> {
        let mut s = DiagramSum::with_truncation(raw.truncation);
        for (i, t) in raw.terms.iter().enumerate() {
            let coeff: Rational = parse_rational(&t.coeff).ok_or_else(|| Error::Parse {
                path: format!("terms[{i}].coeff"),
                message: format!("not a rational: {:?}", t.coeff),
            })?;
            let d = t.diagram.to_diagram().map_err(|e| Error::Parse {
                path: format!("terms[{i}].diagram"),
                message: e.to_string(),
            })?;
            s.add_diagram(&d, coeff)?;
        }
        Ok(s)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: SumJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse { path: "sum".into(), message: e.to_string() })?;
        Self::from_json_struct(&raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::strut;
    use crate::linalg::{rat, ratio};

    #[test]
    fn diagram_schema() {
        let v: Value = serde_json::from_str(
            r#"{"legs":[{"he":"a","color":{"base":"x","flavor":"plain"}},
                        {"he":"b","color":{"base":"y","flavor":"dual"}}],
                "edges":[["a","b"]],"circles":0}"#,
        )
        .unwrap();
        let d = Diagram::from_json(&v).unwrap();
        assert_eq!(d.grade().twice_degree, 2);
        assert_eq!(d.legs()[1].color, Color::dual("y"));
    }

    #[test]
    fn missing_half_edge_is_named() {
        let v: Value = serde_json::from_str(
            r#"{"legs":[{"he":"h1","color":{"base":"x","flavor":"plain"}}],"edges":[["h1","h9"]]}"#,
        )
        .unwrap();
        let err = Diagram::from_json(&v).unwrap_err();
        assert!(err.to_string().contains("h9"), "{err}");
    }

    #[test]
    fn canonical_round_trip() {
        let mut s = DiagramSum::new();
        s.add_diagram(&strut(Color::plain("x"), Color::plain("y")), ratio(-1, 2)).unwrap();
        s.add_diagram(&Diagram::circles_only(1), rat(3)).unwrap();
        let text = s.to_json().to_string();
        let back = DiagramSum::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json().to_string(), text);
    }
}
