//! Landmark file format.
//!
//! The native format is JSON: dimension, pairing scheme, a registration
//! flag (raw coordinates, axis-registered, or basis-registered), subjects
//! with id, group label, and a K x M coordinate row list, plus an optional
//! frame label and, once registered, the midplane and symmetric mean
//! shape. Landmark indices on disk are 1-based. Floats survive a
//! write/read cycle bit-exactly (shortest round-trip decimal encoding).
//!
//! A CSV import shim accepts long-format tables (subject, group, one row
//! per landmark) plus a JSON sidecar carrying the non-tabular fields.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Configuration, PairingScheme};

/// Registration state of the coordinates in a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegistrationFlag {
    /// Arbitrary frames; registration must be estimated.
    Raw,
    /// Midplane at {x_1 = 0}, in-plane axes arbitrary.
    Axis,
    /// Midplane at {x_1 = 0} and in-plane axes pinned.
    Basis,
}

impl std::fmt::Display for RegistrationFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegistrationFlag::Raw => "raw",
            RegistrationFlag::Axis => "axis",
            RegistrationFlag::Basis => "basis",
        })
    }
}

/// Pairing scheme as stored on disk: 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub pairs: Vec<[usize; 2]>,
    pub solos: Vec<usize>,
}

impl SchemeSpec {
    pub fn from_scheme(scheme: &PairingScheme) -> Self {
        Self {
            pairs: scheme
                .pairs()
                .iter()
                .map(|&(l, r)| [l + 1, r + 1])
                .collect(),
            solos: scheme.solos().iter().map(|&s| s + 1).collect(),
        }
    }

    pub fn to_scheme(&self) -> Result<PairingScheme> {
        let pairs: Vec<(usize, usize)> = self.pairs.iter().map(|p| (p[0], p[1])).collect();
        PairingScheme::from_one_based(&pairs, &self.solos)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectRecord {
    pub id: String,
    pub group: String,
    pub coords: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkFile {
    pub dimension: usize,
    pub scheme: SchemeSpec,
    pub registration: RegistrationFlag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
    pub subjects: Vec<SubjectRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane: Option<PlaneSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_shape: Option<Vec<Vec<f64>>>,
}

/// A parsed and validated cohort, ready for the model layer.
#[derive(Debug, Clone)]
pub struct Cohort {
    pub scheme: PairingScheme,
    pub ids: Vec<String>,
    pub groups: Vec<String>,
    pub configs: Vec<Configuration>,
    pub registration: RegistrationFlag,
    pub frame: Option<String>,
    /// Symmetric mean shape stored by the register command, if any.
    pub mean_shape: Option<Configuration>,
}

impl Cohort {
    /// Distinct group labels in order of first appearance.
    pub fn group_labels(&self) -> Vec<String> {
        let mut labels = Vec::new();
        for g in &self.groups {
            if !labels.contains(g) {
                labels.push(g.clone());
            }
        }
        labels
    }

    /// Splits subject positions into two groups. Without an explicit
    /// order, the group of the first subject is group 1 and the other is
    /// group 2 (the one hypothesized more asymmetric). Exactly two
    /// distinct labels must be present.
    pub fn two_groups(
        &self,
        order: Option<(&str, &str)>,
    ) -> Result<(String, String, Vec<usize>, Vec<usize>)> {
        let labels = self.group_labels();
        if labels.len() != 2 {
            return Err(Error::GroupCount {
                found: labels.len(),
            });
        }
        let (g1, g2) = match order {
            Some((a, b)) => {
                if !labels.iter().any(|l| l == a) || !labels.iter().any(|l| l == b) {
                    return Err(Error::UnknownName {
                        what: "group label",
                        name: format!("{a},{b} (file has {})", labels.join(",")),
                    });
                }
                (a.to_string(), b.to_string())
            }
            None => (labels[0].clone(), labels[1].clone()),
        };
        let idx1: Vec<usize> = (0..self.groups.len())
            .filter(|&i| self.groups[i] == g1)
            .collect();
        let idx2: Vec<usize> = (0..self.groups.len())
            .filter(|&i| self.groups[i] == g2)
            .collect();
        Ok((g1, g2, idx1, idx2))
    }
}

impl LandmarkFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: LandmarkFile = serde_json::from_str(&text)?;
        Ok(file)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Validates the structure and converts to model types.
    pub fn parse(&self) -> Result<Cohort> {
        if self.dimension == 0 {
            return Err(Error::FileFormat {
                detail: "dimension must be at least 1".into(),
            });
        }
        let scheme = self.scheme.to_scheme()?;
        let k = scheme.landmark_count();
        scheme.validate(k)?;
        if self.subjects.is_empty() {
            return Err(Error::EmptyInput { what: "subjects" });
        }
        let mut ids = Vec::with_capacity(self.subjects.len());
        let mut groups = Vec::with_capacity(self.subjects.len());
        let mut configs = Vec::with_capacity(self.subjects.len());
        for s in &self.subjects {
            if s.group.is_empty() {
                return Err(Error::FileFormat {
                    detail: format!("subject '{}' has an empty group label", s.id),
                });
            }
            if s.coords.len() != k {
                return Err(Error::FileFormat {
                    detail: format!(
                        "subject '{}' has {} landmarks, the scheme describes {}",
                        s.id,
                        s.coords.len(),
                        k
                    ),
                });
            }
            for (row_idx, row) in s.coords.iter().enumerate() {
                if row.len() != self.dimension {
                    return Err(Error::FileFormat {
                        detail: format!(
                            "subject '{}', landmark {}: {} coordinates, expected {}",
                            s.id,
                            row_idx + 1,
                            row.len(),
                            self.dimension
                        ),
                    });
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::FileFormat {
                        detail: format!(
                            "subject '{}', landmark {}: non-finite coordinate",
                            s.id,
                            row_idx + 1
                        ),
                    });
                }
            }
            ids.push(s.id.clone());
            groups.push(s.group.clone());
            configs.push(Configuration::from_rows(&s.coords)?);
        }
        let mean_shape = match &self.mean_shape {
            Some(rows) => {
                if rows.len() != k || rows.iter().any(|r| r.len() != self.dimension) {
                    return Err(Error::FileFormat {
                        detail: "mean_shape does not match the scheme and dimension".into(),
                    });
                }
                Some(Configuration::from_rows(rows)?)
            }
            None => None,
        };
        Ok(Cohort {
            scheme,
            ids,
            groups,
            configs,
            registration: self.registration,
            frame: self.frame.clone(),
            mean_shape,
        })
    }
}

/// Sidecar for the CSV import shim: everything the table cannot carry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvSidecar {
    pub dimension: usize,
    pub scheme: SchemeSpec,
    pub registration: RegistrationFlag,
    #[serde(default)]
    pub frame: Option<String>,
}

/// Reads a long-format CSV (header: subject, group, then one column per
/// coordinate; K consecutive rows per subject in landmark order) together
/// with its JSON sidecar.
pub fn read_csv_cohort(csv_path: &Path, sidecar_path: &Path) -> Result<LandmarkFile> {
    let sidecar: CsvSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path)?)?;
    let mut reader = csv::Reader::from_path(csv_path)?;
    let headers = reader.headers()?.clone();
    if headers.len() != 2 + sidecar.dimension {
        return Err(Error::FileFormat {
            detail: format!(
                "csv has {} columns, expected subject, group and {} coordinates",
                headers.len(),
                sidecar.dimension
            ),
        });
    }
    if headers.get(0) != Some("subject") || headers.get(1) != Some("group") {
        return Err(Error::FileFormat {
            detail: "csv header must start with 'subject,group'".into(),
        });
    }

    let mut subjects: Vec<SubjectRecord> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let id = record.get(0).unwrap_or("").to_string();
        let group = record.get(1).unwrap_or("").to_string();
        let mut row = Vec::with_capacity(sidecar.dimension);
        for c in 0..sidecar.dimension {
            let cell = record.get(2 + c).unwrap_or("");
            let value: f64 = cell.parse().map_err(|_| Error::FileFormat {
                detail: format!(
                    "csv row {}: coordinate column {} is not a number: '{}'",
                    line + 2,
                    c + 1,
                    cell
                ),
            })?;
            row.push(value);
        }
        match subjects.last_mut() {
            Some(last) if last.id == id => {
                if last.group != group {
                    return Err(Error::FileFormat {
                        detail: format!("subject '{id}' appears with two group labels"),
                    });
                }
                last.coords.push(row);
            }
            _ => {
                if subjects.iter().any(|s| s.id == id) {
                    return Err(Error::FileFormat {
                        detail: format!("subject '{id}' rows are not contiguous"),
                    });
                }
                subjects.push(SubjectRecord {
                    id,
                    group,
                    coords: vec![row],
                });
            }
        }
    }

    let file = LandmarkFile {
        dimension: sidecar.dimension,
        scheme: sidecar.scheme,
        registration: sidecar.registration,
        frame: sidecar.frame,
        subjects,
        plane: None,
        mean_shape: None,
    };
    file.parse()?;
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_file() -> LandmarkFile {
        LandmarkFile {
            dimension: 2,
            scheme: SchemeSpec {
                pairs: vec![[1, 3]],
                solos: vec![2, 4],
            },
            registration: RegistrationFlag::Basis,
            frame: Some("first".into()),
            subjects: vec![
                SubjectRecord {
                    id: "a".into(),
                    group: "control".into(),
                    coords: vec![
                        vec![-0.95, 0.36],
                        vec![-0.28, 2.11],
                        vec![0.99, 0.54],
                        vec![-0.31, -1.37],
                    ],
                },
                SubjectRecord {
                    id: "b".into(),
                    group: "case".into(),
                    coords: vec![
                        vec![0.1 + 0.2, 1e-17],
                        vec![std::f64::consts::PI, -too_precise()],
                        vec![1.0, 0.5],
                        vec![0.25, -1.0],
                    ],
                },
            ],
            plane: None,
            mean_shape: None,
        }
    }

    fn too_precise() -> f64 {
        2.2250738585072014e-308
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cohort.json");
        let file = sample_file();
        file.write(&path).unwrap();
        let back = LandmarkFile::read(&path).unwrap();
        assert_eq!(back, file);
        for (s1, s2) in file.subjects.iter().zip(&back.subjects) {
            for (r1, r2) in s1.coords.iter().zip(&s2.coords) {
                for (a, b) in r1.iter().zip(r2) {
                    assert_eq!(a.to_bits(), b.to_bits());
                }
            }
        }
    }

    #[test]
    fn parse_validates_subject_shapes() {
        let mut file = sample_file();
        file.subjects[1].coords.pop();
        let err = file.parse().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("'b'"), "message should name the subject: {msg}");

        let mut file = sample_file();
        file.subjects[0].coords[2] = vec![1.0];
        let err = file.parse().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("landmark 3"), "message should name the landmark: {msg}");
    }

    #[test]
    fn parse_rejects_bad_scheme_indices() {
        let mut file = sample_file();
        file.scheme.solos = vec![2, 5];
        assert!(file.parse().is_err());
        let mut file = sample_file();
        file.scheme.pairs = vec![[0, 3]];
        assert!(matches!(file.parse(), Err(Error::FileFormat { .. })));
    }

    #[test]
    fn cohort_group_handling() {
        let cohort = sample_file().parse().unwrap();
        assert_eq!(cohort.group_labels(), vec!["control", "case"]);
        let (g1, g2, i1, i2) = cohort.two_groups(None).unwrap();
        assert_eq!((g1.as_str(), g2.as_str()), ("control", "case"));
        assert_eq!((i1, i2), (vec![0], vec![1]));
        let (g1, g2, i1, i2) = cohort.two_groups(Some(("case", "control"))).unwrap();
        assert_eq!((g1.as_str(), g2.as_str()), ("case", "control"));
        assert_eq!((i1, i2), (vec![1], vec![0]));
        assert!(cohort.two_groups(Some(("case", "nope"))).is_err());
    }

    #[test]
    fn csv_shim_reads_long_format() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("cohort.csv");
        let sidecar_path = dir.path().join("cohort.scheme.json");
        std::fs::write(
            &csv_path,
            "subject,group,x1,x2\n\
             a,control,-0.95,0.36\n\
             a,control,-0.28,2.11\n\
             a,control,0.99,0.54\n\
             a,control,-0.31,-1.37\n\
             b,case,0.3,0.0\n\
             b,case,3.14,-0.5\n\
             b,case,1.0,0.5\n\
             b,case,0.25,-1.0\n",
        )
        .unwrap();
        std::fs::write(
            &sidecar_path,
            r#"{"dimension":2,"scheme":{"pairs":[[1,3]],"solos":[2,4]},"registration":"basis"}"#,
        )
        .unwrap();
        let file = read_csv_cohort(&csv_path, &sidecar_path).unwrap();
        assert_eq!(file.subjects.len(), 2);
        assert_eq!(file.subjects[0].coords.len(), 4);
        assert_eq!(file.subjects[1].group, "case");
        assert_eq!(file.registration, RegistrationFlag::Basis);
    }

    #[test]
    fn csv_shim_rejects_split_subjects() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("bad.csv");
        let sidecar_path = dir.path().join("bad.scheme.json");
        std::fs::write(
            &csv_path,
            "subject,group,x1\n\
             a,g,0.0\n\
             b,g,1.0\n\
             a,g,2.0\n",
        )
        .unwrap();
        std::fs::write(
            &sidecar_path,
            r#"{"dimension":1,"scheme":{"pairs":[],"solos":[1]},"registration":"raw"}"#,
        )
        .unwrap();
        let err = read_csv_cohort(&csv_path, &sidecar_path).unwrap_err();
        assert!(err.to_string().contains("not contiguous"));
    }
}
