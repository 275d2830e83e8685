//! Input documents: one JSON object with optional `fibration`, `spinc`,
//! `morse_cycle`, `query` and `cz` sections.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exterior::{H1Vector, SpMatrix, SymplecticLattice};
use crate::spinc::cz::SymplecticPath;
use crate::spinc::{taubes_convert, FibrationDescriptor, SpinC};
use crate::tqft::{ElementaryMove, MorseCycle};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub version: u32,
    #[serde(default)]
    pub fibration: Option<FibrationDescriptor>,
    #[serde(default)]
    pub spinc: Vec<SpincEntry>,
    #[serde(default)]
    pub morse_cycle: Option<CycleDoc>,
    #[serde(default)]
    pub query: Option<GradingQuery>,
    #[serde(default)]
    pub cz: Option<CzDoc>,
}

/// A spin-c structure given either by `c1` or by its Taubes class `beta`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpincEntry {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub c1: Option<Vec<i64>>,
    #[serde(default)]
    pub beta: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleDoc {
    pub genus: usize,
    pub points: u32,
    pub moves: Vec<MoveDoc>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum MoveDoc {
    Twist(Vec<Vec<i64>>),
    Down(CircleDoc),
    Up(CircleDoc),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleDoc {
    pub circle: Vec<i64>,
    #[serde(default)]
    pub basis_change: Option<Vec<Vec<i64>>>,
}

/// Parameters of the `gradings` command.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradingQuery {
    pub n: u32,
    pub g: u32,
    #[serde(default)]
    pub c1: Option<Vec<i64>>,
    #[serde(default)]
    pub n_gamma: Option<i64>,
    #[serde(default)]
    pub g1: Option<u32>,
    #[serde(default)]
    pub g2: Option<u32>,
    /// Exact rational written as `"p"` or `"p/q"`.
    #[serde(default)]
    pub lambda: Option<String>,
    #[serde(default)]
    pub gamma: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CzDoc {
    /// Each path is a list of square matrices given by rows.
    pub paths: Vec<Vec<Vec<Vec<f64>>>>,
}

/// A spin-c structure with its label and, when given that way, its Taubes class.
#[derive(Clone, Debug)]
pub struct LabelledSpinC {
    pub label: String,
    pub spinc: SpinC,
    pub beta: Option<Vec<i64>>,
}

pub fn parse(text: &str) -> Result<Document> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if doc.version != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "unsupported version {}, expected {SCHEMA_VERSION}",
            doc.version
        )));
    }
    Ok(doc)
}

impl Document {
    pub fn fibration(&self) -> Result<&FibrationDescriptor> {
        let f = self
            .fibration
            .as_ref()
            .ok_or_else(|| Error::Schema("missing 'fibration' section".to_string()))?;
        f.validate()?;
        Ok(f)
    }

    /// Labelled spin-c structures, converting `beta` entries through the Taubes map.
    pub fn spinc_structures(&self) -> Result<Vec<LabelledSpinC>> {
        let d = self.fibration()?;
        if self.spinc.is_empty() {
            return Err(Error::Schema("missing 'spinc' entries".to_string()));
        }
        self.spinc
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let label = e.label.clone().unwrap_or_else(|| format!("s{i}"));
                let spinc = match (&e.c1, &e.beta) {
                    (Some(c1), None) => SpinC::new(c1.clone(), &d.h2)?,
                    (None, Some(beta)) => taubes_convert(beta, d)?,
                    _ => {
                        return Err(Error::Schema(format!(
                            "spinc entry {i} needs exactly one of 'c1' and 'beta'"
                        )))
                    }
                };
                Ok(LabelledSpinC {
                    label,
                    spinc,
                    beta: e.beta.clone(),
                })
            })
            .collect()
    }

    pub fn morse_cycle(&self) -> Result<MorseCycle> {
        let c = self
            .morse_cycle
            .as_ref()
            .ok_or_else(|| Error::Schema("missing 'morse_cycle' section".to_string()))?;
        let mut g = c.genus;
        let mut moves = Vec::with_capacity(c.moves.len());
        for (k, m) in c.moves.iter().enumerate() {
            let mv = match m {
                MoveDoc::Twist(rows) => ElementaryMove::Twist(sp_matrix(rows, g, k)?),
                MoveDoc::Down(circle) => {
                    let (circle, basis_change) = circle_doc(circle, g, k)?;
                    g = g.saturating_sub(1);
                    ElementaryMove::Down {
                        circle,
                        basis_change,
                    }
                }
                MoveDoc::Up(circle) => {
                    let (circle, basis_change) = circle_doc(circle, g + 1, k)?;
                    g += 1;
                    ElementaryMove::Up {
                        circle,
                        basis_change,
                    }
                }
            };
            moves.push(mv);
        }
        MorseCycle::new(c.genus, c.points, moves)
    }

    pub fn query(&self) -> Result<&GradingQuery> {
        self.query
            .as_ref()
            .ok_or_else(|| Error::Schema("missing 'query' section".to_string()))
    }

    pub fn cz_paths(&self) -> Result<Vec<SymplecticPath>> {
        let cz = self
            .cz
            .as_ref()
            .ok_or_else(|| Error::Schema("missing 'cz' section".to_string()))?;
        if cz.paths.is_empty() {
            return Err(Error::Schema("'cz.paths' is empty".to_string()));
        }
        cz.paths
            .iter()
            .map(|p| SymplecticPath::from_rows(p))
            .collect()
    }
}

fn sp_matrix(rows: &[Vec<i64>], genus: usize, k: usize) -> Result<SpMatrix> {
    if rows.len() != 2 * genus {
        return Err(Error::NonClosingCycle(format!(
            "move {k}: matrix has size {}, fiber genus there is {genus}",
            rows.len()
        )));
    }
    SpMatrix::from_rows(rows)
}

fn circle_doc(c: &CircleDoc, genus: usize, k: usize) -> Result<(H1Vector, Option<SpMatrix>)> {
    if c.circle.len() != 2 * genus {
        return Err(Error::NonClosingCycle(format!(
            "move {k}: circle has {} coordinates, expected {} for genus {genus}",
            c.circle.len(),
            2 * genus
        )));
    }
    let circle = H1Vector::new(SymplecticLattice::new(genus), c.circle.clone())?;
    let basis_change = c
        .basis_change
        .as_ref()
        .map(|rows| sp_matrix(rows, genus, k))
        .transpose()?;
    Ok((circle, basis_change))
}
