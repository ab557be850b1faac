//! JSON file formats for predicate families and instances.
//!
//! Family: `{"q": 2, "k": 2, "predicates": [{"name": "cut", "table": [0,1,1,0]}]}`.
//! Instance: `{"family": <path or inline family>, "n": 5,
//! "constraints": [{"f": "cut", "vars": [1, 2], "w": 1}]}` with 1-based
//! variables. Zero-weight constraints are dropped with a warning.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::csp::family::{Predicate, PredicateFamily};
use crate::csp::instance::{Constraint, Instance};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateFile {
    pub name: String,
    pub table: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub q: usize,
    pub k: usize,
    pub predicates: Vec<PredicateFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyRef {
    Path(String),
    Inline(FamilyFile),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintFile {
    pub f: String,
    pub vars: Vec<usize>,
    #[serde(default = "unit_weight")]
    pub w: u64,
}

fn unit_weight() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub family: FamilyRef,
    pub n: usize,
    pub constraints: Vec<ConstraintFile>,
}

impl FamilyFile {
    pub fn from_family(fam: &PredicateFamily) -> Self {
        FamilyFile {
            q: fam.q(),
            k: fam.k(),
            predicates: fam
                .predicates()
                .iter()
                .map(|p| PredicateFile {
                    name: p.name().to_string(),
                    table: p.table().iter().map(|&b| b as u8).collect(),
                })
                .collect(),
        }
    }

    pub fn to_family(&self) -> Result<PredicateFamily> {
        let preds = self
            .predicates
            .iter()
            .map(|p| {
                let table = p
                    .table
                    .iter()
                    .map(|&v| match v {
                        0 => Ok(false),
                        1 => Ok(true),
                        other => Err(Error::InvalidFamily(format!(
                            "predicate {:?}: table entry {other} is not 0 or 1",
                            p.name
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Predicate::new(p.name.clone(), table))
            })
            .collect::<Result<Vec<_>>>()?;
        PredicateFamily::new(self.q, self.k, preds)
    }
}

impl InstanceFile {
    /// Serialises `inst` with its family inlined.
    pub fn from_instance(inst: &Instance) -> Self {
        let fam = inst.family();
        InstanceFile {
            family: FamilyRef::Inline(FamilyFile::from_family(fam)),
            n: inst.n(),
            constraints: inst
                .constraints()
                .iter()
                .map(|c| ConstraintFile {
                    f: fam.predicate(c.predicate).name().to_string(),
                    vars: c.vars.iter().map(|v| v + 1).collect(),
                    w: c.weight,
                })
                .collect(),
        }
    }

    /// Resolves the family (relative paths against `base_dir`) and validates.
    pub fn to_instance(&self, base_dir: Option<&Path>) -> Result<Instance> {
        let family = match &self.family {
            FamilyRef::Inline(f) => f.to_family()?,
            FamilyRef::Path(p) => {
                let path = match base_dir {
                    Some(dir) if Path::new(p).is_relative() => dir.join(p),
                    _ => PathBuf::from(p),
                };
                load_family(&path)?
            }
        };
        self.to_instance_with(Arc::new(family))
    }

    pub fn to_instance_with(&self, family: Arc<PredicateFamily>) -> Result<Instance> {
        let mut constraints = Vec::with_capacity(self.constraints.len());
        for (idx, c) in self.constraints.iter().enumerate() {
            let at = idx + 1;
            let predicate = family.index_of(&c.f).ok_or_else(|| {
                Error::InvalidInstance(format!("constraint {at}: unknown predicate {:?}", c.f))
            })?;
            if c.w == 0 {
                log::warn!("constraint {at} ({}) has zero weight; dropped", c.f);
                continue;
            }
            if let Some(&v) = c.vars.iter().find(|&&v| v == 0 || v > self.n) {
                return Err(Error::InvalidInstance(format!(
                    "constraint {at}: variable {v} outside [1, {}]",
                    self.n
                )));
            }
            constraints.push(Constraint::new(
                predicate,
                c.vars.iter().map(|v| v - 1).collect(),
                c.w,
            ));
        }
        Instance::new(family, self.n, constraints)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_family(text: &str, origin: &str) -> Result<PredicateFamily> {
    let file: FamilyFile = serde_json::from_str(text).map_err(|source| Error::Json {
        path: origin.to_string(),
        source,
    })?;
    file.to_family()
}

pub fn load_family(path: &Path) -> Result<PredicateFamily> {
    parse_family(&read(path)?, &path.display().to_string())
}

pub fn parse_instance(text: &str, origin: &str, base_dir: Option<&Path>) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|source| Error::Json {
        path: origin.to_string(),
        source,
    })?;
    file.to_instance(base_dir)
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?, &path.display().to_string(), path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::builders::cycle;
    use crate::csp::family::families;

    #[test]
    fn family_round_trip() {
        let fam = families::dicut();
        let text = serde_json::to_string(&FamilyFile::from_family(&fam)).unwrap();
        assert_eq!(text, r#"{"q":2,"k":2,"predicates":[{"name":"dicut","table":[0,0,1,0]}]}"#);
        assert_eq!(parse_family(&text, "mem").unwrap(), fam);
    }

    #[test]
    fn instance_round_trip_inline() {
        let inst = cycle(5);
        let text = serde_json::to_string(&InstanceFile::from_instance(&inst)).unwrap();
        assert_eq!(parse_instance(&text, "mem", None).unwrap(), inst);
    }

    #[test]
    fn instance_with_family_path() {
        let dir = tempfile::tempdir().unwrap();
        let fam_path = dir.path().join("cut.json");
        fs::write(&fam_path, serde_json::to_string(&FamilyFile::from_family(&families::cut())).unwrap()).unwrap();
        let inst_path = dir.path().join("edge.json");
        fs::write(
            &inst_path,
            r#"{"family": "cut.json", "n": 2, "constraints": [{"f": "cut", "vars": [1, 2], "w": 3}]}"#,
        )
        .unwrap();
        let inst = load_instance(&inst_path).unwrap();
        assert_eq!(inst.total_weight(), 3);
        assert_eq!(inst.constraints()[0].vars, vec![0, 1]);
    }

    #[test]
    fn zero_weights_are_dropped() {
        let text = r#"{"family": {"q":2,"k":2,"predicates":[{"name":"cut","table":[0,1,1,0]}]},
            "n": 3, "constraints": [{"f":"cut","vars":[1,2],"w":0},{"f":"cut","vars":[2,3],"w":2}]}"#;
        let inst = parse_instance(text, "mem", None).unwrap();
        assert_eq!(inst.m(), 1);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_family("{\"q\": 2,\n \"k\": }", "bad.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.json") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn rejects_bad_tables_and_names() {
        assert!(parse_family(r#"{"q":2,"k":1,"predicates":[{"name":"a","table":[0,2]}]}"#, "m").is_err());
        let text = r#"{"family": {"q":2,"k":2,"predicates":[{"name":"cut","table":[0,1,1,0]}]},
            "n": 2, "constraints": [{"f":"nope","vars":[1,2]}]}"#;
        assert!(parse_instance(text, "m", None).is_err());
        let text = r#"{"family": {"q":2,"k":2,"predicates":[{"name":"cut","table":[0,1,1,0]}]},
            "n": 2, "constraints": [{"f":"cut","vars":[0,2]}]}"#;
        assert!(parse_instance(text, "m", None).is_err());
    }
}
