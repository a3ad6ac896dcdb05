//! Named (domain, target, map) scenes with evaluation points, built from
//! registry entries.

use serde::{Deserialize, Serialize};

use crate::geometry::MetricField;
use crate::maps::HolomorphicMapField;
use crate::registry::{build_map, build_metric, Params};
use crate::wirtinger::ChartPoint;
use crate::{Error, Result, C64};

/// A registry entry with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRef {
    pub id: String,
    #[serde(default)]
    pub params: Params,
}

impl EntryRef {
    pub fn new(id: &str, params_json: &str) -> Self {
        Self {
            id: id.to_string(),
            params: serde_json::from_str(params_json).expect("valid parameter literal"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub name: String,
    pub domain: EntryRef,
    pub target: EntryRef,
    pub map: EntryRef,
    /// Points as lists of `[re, im]` pairs.
    pub points: Vec<Vec<[f64; 2]>>,
    /// Values of `ℓ` to check.
    pub ells: Vec<usize>,
}

pub struct Scene {
    pub g: MetricField,
    pub h: MetricField,
    pub f: HolomorphicMapField,
    pub points: Vec<ChartPoint>,
}

impl SceneSpec {
    pub fn build(&self) -> Result<Scene> {
        let g = build_metric(&self.domain.id, &self.domain.params)?;
        let h = build_metric(&self.target.id, &self.target.params)?;
        let f = build_map(&self.map.id, &self.map.params)?;
        if f.dim_in() != g.dim() || f.dim_out() != h.dim() {
            return Err(Error::invalid(format!(
                "scene '{}': map is C^{} → C^{}, metrics have dimensions {} and {}",
                self.name,
                f.dim_in(),
                f.dim_out(),
                g.dim(),
                h.dim()
            )));
        }
        let points = self
            .points
            .iter()
            .map(|p| {
                if p.len() != g.dim() {
                    return Err(Error::invalid(format!("scene '{}': point has wrong dimension", self.name)));
                }
                ChartPoint::new(p.iter().map(|&[re, im]| C64::new(re, im)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        if points.is_empty() {
            return Err(Error::invalid(format!("scene '{}' has no points", self.name)));
        }
        if self.ells.iter().any(|&l| l == 0 || l > g.dim()) {
            return Err(Error::invalid(format!("scene '{}': ℓ must lie in 1..={}", self.name, g.dim())));
        }
        Ok(Scene { g, h, f, points })
    }
}

/// The scenes on which both Bochner identities are cross-checked.
pub fn bochner_scenes() -> Vec<SceneSpec> {
    let spec = |name: &str, domain: EntryRef, target: EntryRef, map: EntryRef, points: Vec<Vec<[f64; 2]>>, ells: Vec<usize>| SceneSpec {
        name: name.to_string(),
        domain,
        target,
        map,
        points,
        ells,
    };
    vec![
        spec(
            "flat_linear",
            EntryRef::new("constant", r#"{"matrix": [[2, [0.5, 0.5]], [[0.5, -0.5], 1]]}"#),
            EntryRef::new("constant", r#"{"matrix": [[1, 0.2, 0], [0.2, 1.5, [0, 0.3]], [0, [0, -0.3], 0.8]]}"#),
            EntryRef::new("linear", r#"{"matrix": [[1, [0.5, -0.2]], [0.3, 2], [[0, 1], 0.4]]}"#),
            vec![vec![[0.1, 0.2], [-0.3, 0.05]], vec![[1.5, -0.7], [0.2, 0.9]]],
            vec![1, 2],
        ),
        spec(
            "poincare_square",
            EntryRef::new("poincare_disk", "{}"),
            EntryRef::new("poincare_disk", "{}"),
            EntryRef::new("power", r#"{"k": 2}"#),
            vec![vec![[0.5, 0.0]], vec![[-0.3, 0.4]], vec![[0.1, -0.6]]],
            vec![1],
        ),
        spec(
            "sphere_to_disk",
            EntryRef::new("fubini_study_m", r#"{"m": 1}"#),
            EntryRef::new("poincare_disk", "{}"),
            EntryRef::new("polynomial", r#"{"coeffs": [0, 0.3, 0.2]}"#),
            vec![vec![[0.4, 0.2]], vec![[-0.5, 0.3]], vec![[0.8, -0.6]]],
            vec![1],
        ),
        spec(
            "polydisk_product",
            EntryRef::new("poincare_polydisk_m", r#"{"m": 2}"#),
            EntryRef::new("poincare_polydisk_m", r#"{"m": 2}"#),
            EntryRef::new("product_power", r#"{"m": 2, "k": 2}"#),
            vec![vec![[0.5, 0.0], [0.0, 0.3]], vec![[-0.2, 0.4], [0.35, -0.1]]],
            vec![1],
        ),
        spec(
            "kahler_to_hopf",
            EntryRef::new("fubini_study_m", r#"{"m": 2}"#),
            EntryRef::new("hopf_m", r#"{"m": 3}"#),
            EntryRef::new(
                "quadratic",
                r#"{"linear": [[1, [0.2, 0.1]], [0.3, 0.8], [[0, 0.5], 0.2]],
                    "quad": [[[0.4, 0.1], [0.1, 0]], [[0, [0, 0.3]], [[0, 0.3], 0.2]], [[0.1, 0], [0, -0.3]]],
                    "offset": [1, 0.5, [0, 0.2]]}"#,
            ),
            vec![vec![[0.1, 0.05], [-0.2, 0.15]], vec![[0.3, -0.2], [0.1, 0.25]]],
            vec![1, 2],
        ),
    ]
}

pub fn bochner_scene(name: &str) -> Option<SceneSpec> {
    bochner_scenes().into_iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registered_scenes_build() {
        let scenes = bochner_scenes();
        assert_eq!(scenes.len(), 5);
        for s in &scenes {
            let built = s.build().unwrap();
            for p in &built.points {
                built.g.at(p.coords()).unwrap();
                built.h.at(&built.f.value_at(p.coords()).unwrap()).unwrap();
            }
        }
        assert!(bochner_scene("poincare_square").is_some());
        assert!(bochner_scene("nope").is_none());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let s = bochner_scene("kahler_to_hopf").unwrap();
        let back: SceneSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }
}
