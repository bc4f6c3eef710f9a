//! JSON formats for games and strategies. Complex scalars are `[re, im]`
//! pairs and matrices are arrays of rows.
//!
//! ```text
//! {"n": 2, "strict": true, "matrix": [[[0.25, 0], ...], ...]}
//! {"n": 2, "outcomes": [{"state": [[1, 0], ...], "p": 0.25, "c": 0}, ...]}
//! {"model": "tensor", "n": 2, "dA": 1, "dB": 1, "U": ..., "V": ..., "psi": ...}
//! {"model": "commuting", "n": 2, "d": 1, "U": ..., "V": ..., "psi": ...}
//! ```

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{game_from_outcomes, validate_game, Outcome, OutcomeSpec, QuantumXorGame, INPUT_TOL};
use crate::linalg::{CMatrix, CVector};
use crate::scalar::Real;
use crate::strategy::{CommutingStrategy, Correlation, Model, Strategy, TensorStrategy};

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

fn default_strict() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub n: usize,
    #[serde(default = "default_strict")]
    pub strict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<OutcomeFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<JsonMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeFile {
    pub state: Vec<JsonComplex>,
    pub p: f64,
    /// `1` when the answers must differ.
    pub c: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum StrategyFile {
    Tensor {
        n: usize,
        #[serde(rename = "dA")]
        da: usize,
        #[serde(rename = "dB")]
        db: usize,
        #[serde(rename = "U")]
        u: JsonMatrix,
        #[serde(rename = "V")]
        v: JsonMatrix,
        psi: Vec<JsonComplex>,
    },
    Commuting {
        n: usize,
        d: usize,
        #[serde(rename = "U")]
        u: JsonMatrix,
        #[serde(rename = "V")]
        v: JsonMatrix,
        psi: Vec<JsonComplex>,
    },
}

fn complex_from_json<T: Real>(z: JsonComplex) -> Complex<T> {
    Complex::new(T::lit(z[0]), T::lit(z[1]))
}

fn complex_to_json<T: Real>(z: Complex<T>) -> JsonComplex {
    [z.re.as_f64(), z.im.as_f64()]
}

pub fn matrix_from_json<T: Real>(rows: &JsonMatrix, what: &str) -> Result<CMatrix<T>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != ncols) {
        return Err(Error::Shape(format!(
            "{what}: row {r} has {} entries, row 0 has {ncols}",
            row.len()
        )));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |r, col| complex_from_json(rows[r][col])))
}

pub fn matrix_to_json<T: Real>(m: &CMatrix<T>) -> JsonMatrix {
    m.row_iter()
        .map(|row| row.iter().map(|z| complex_to_json(*z)).collect())
        .collect()
}

fn vector_from_json<T: Real>(v: &[JsonComplex]) -> CVector<T> {
    CVector::from_iterator(v.len(), v.iter().map(|z| complex_from_json(*z)))
}

fn vector_to_json<T: Real>(v: &CVector<T>) -> Vec<JsonComplex> {
    v.iter().map(|z| complex_to_json(*z)).collect()
}

fn parse<'a, D: Deserialize<'a>>(text: &'a str, what: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

impl GameFile {
    pub fn into_game<T: Real>(self) -> Result<QuantumXorGame<T>> {
        match (self.outcomes, self.matrix) {
            (Some(_), Some(_)) => Err(Error::Parse(
                "game: exactly one of \"outcomes\" and \"matrix\" may be given, found both".into(),
            )),
            (None, None) => Err(Error::Parse(
                "game: exactly one of \"outcomes\" and \"matrix\" must be given, found neither".into(),
            )),
            (None, Some(rows)) => {
                let m = matrix_from_json(&rows, "game matrix")?;
                validate_game(m, self.n, self.strict, T::lit(INPUT_TOL))
            }
            (Some(outcomes), None) => {
                let outcomes = outcomes
                    .into_iter()
                    .enumerate()
                    .map(|(i, o)| {
                        let differ = match o.c {
                            0 => false,
                            1 => true,
                            other => return Err(Error::Parse(format!("outcome {i}: bit c must be 0 or 1, got {other}"))),
                        };
                        Ok(Outcome { state: vector_from_json(&o.state), probability: T::lit(o.p), differ })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let game = game_from_outcomes(&OutcomeSpec { n: self.n, outcomes })?;
                QuantumXorGame::new(game.matrix().clone(), self.n, self.strict)
            }
        }
    }

    /// Matrix form of a game.
    pub fn from_game<T: Real>(game: &QuantumXorGame<T>) -> Self {
        GameFile {
            n: game.n(),
            strict: game.strict(),
            outcomes: None,
            matrix: Some(matrix_to_json(game.matrix())),
        }
    }
}

pub fn parse_game<T: Real>(text: &str) -> Result<QuantumXorGame<T>> {
    parse::<GameFile>(text, "game")?.into_game()
}

pub fn game_to_json<T: Real>(game: &QuantumXorGame<T>) -> String {
    serde_json::to_string_pretty(&GameFile::from_game(game)).expect("game serializes")
}

/// A strategy of either model, as read from or written to JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyStrategy<T: Real> {
    Tensor(TensorStrategy<T>),
    Commuting(CommutingStrategy<T>),
}

impl<T: Real> AnyStrategy<T> {
    pub fn model(&self) -> Model {
        match self {
            AnyStrategy::Tensor(_) => Model::Tensor,
            AnyStrategy::Commuting(_) => Model::Commuting,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyStrategy::Tensor(s) => s.n(),
            AnyStrategy::Commuting(s) => s.n(),
        }
    }

    pub fn correlation(&self) -> Correlation<T> {
        match self {
            AnyStrategy::Tensor(s) => s.correlation(),
            AnyStrategy::Commuting(s) => s.correlation(),
        }
    }

    pub fn to_file(&self) -> StrategyFile {
        match self {
            AnyStrategy::Tensor(s) => StrategyFile::Tensor {
                n: s.n(),
                da: s.da(),
                db: s.db(),
                u: matrix_to_json(s.alice()),
                v: matrix_to_json(s.bob()),
                psi: vector_to_json(s.state()),
            },
            AnyStrategy::Commuting(s) => StrategyFile::Commuting {
                n: s.n(),
                d: s.d(),
                u: matrix_to_json(s.alice()),
                v: matrix_to_json(s.bob()),
                psi: vector_to_json(s.state()),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("strategy serializes")
    }
}

impl<T: Real> From<TensorStrategy<T>> for AnyStrategy<T> {
    fn from(s: TensorStrategy<T>) -> Self {
        AnyStrategy::Tensor(s)
    }
}

impl<T: Real> From<CommutingStrategy<T>> for AnyStrategy<T> {
    fn from(s: CommutingStrategy<T>) -> Self {
        AnyStrategy::Commuting(s)
    }
}

impl StrategyFile {
    pub fn into_strategy<T: Real>(self) -> Result<AnyStrategy<T>> {
        match self {
            StrategyFile::Tensor { n, da, db, u, v, psi } => Ok(AnyStrategy::Tensor(TensorStrategy::new(
                n,
                da,
                db,
                matrix_from_json(&u, "U")?,
                matrix_from_json(&v, "V")?,
                vector_from_json(&psi),
            )?)),
            StrategyFile::Commuting { n, d, u, v, psi } => Ok(AnyStrategy::Commuting(CommutingStrategy::new(
                n,
                d,
                matrix_from_json(&u, "U")?,
                matrix_from_json(&v, "V")?,
                vector_from_json(&psi),
            )?)),
        }
    }
}

pub fn parse_strategy<T: Real>(text: &str) -> Result<AnyStrategy<T>> {
    parse::<StrategyFile>(text, "strategy")?.into_strategy()
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_game<T: Real>(path: &Path) -> Result<QuantumXorGame<T>> {
    parse_game(&read_text(path)?).map_err(|e| locate(e, path))
}

pub fn read_strategy<T: Real>(path: &Path) -> Result<AnyStrategy<T>> {
    parse_strategy(&read_text(path)?).map_err(|e| locate(e, path))
}

fn locate(e: Error, path: &Path) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    }
}
