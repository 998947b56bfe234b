//! The six four-point model spaces used as landmarks.
//!
//! `X4` and `Y4` are the two forbidden patterns (diametrical graph `C4`),
//! `W4` has diametrical graph `K_{1,1,2}`, `S4` and `Z4` have `K_{1,3}` and
//! `E4` is equidistant.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::space::FiniteMetricSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelName {
    X4,
    Y4,
    W4,
    S4,
    Z4,
    E4,
}

impl ModelName {
    pub const ALL: [ModelName; 6] =
        [ModelName::X4, ModelName::Y4, ModelName::W4, ModelName::S4, ModelName::Z4, ModelName::E4];

    pub fn space(self) -> FiniteMetricSpace {
        match self {
            ModelName::X4 => x4(),
            ModelName::Y4 => y4(),
            ModelName::W4 => w4(),
            ModelName::S4 => s4(),
            ModelName::Z4 => z4(),
            ModelName::E4 => e4(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::X4 => "X4",
            ModelName::Y4 => "Y4",
            ModelName::W4 => "W4",
            ModelName::S4 => "S4",
            ModelName::Z4 => "Z4",
            ModelName::E4 => "E4",
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelName::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown model `{s}`"))
    }
}

/// Four points `a1..a4` with the 4-cycle `a1 a2 a3 a4` at `cycle` and the
/// chords `a1a3`, `a2a4` at the given values.
fn quad(prefix: char, cycle: i64, chord13: i64, chord24: i64) -> FiniteMetricSpace {
    quad_full(prefix, [cycle, cycle, cycle, cycle, chord13, chord24])
}

/// Distances in the order `12, 23, 34, 41, 13, 24`.
fn quad_full(prefix: char, d: [i64; 6]) -> FiniteMetricSpace {
    let points = (1..=4).map(|i| format!("{prefix}{i}")).collect();
    FiniteMetricSpace::from_fn(points, |i, j| {
        let v = match (i, j) {
            (0, 1) => d[0],
            (1, 2) => d[1],
            (2, 3) => d[2],
            (0, 3) => d[3],
            (0, 2) => d[4],
            (1, 3) => d[5],
            _ => unreachable!(),
        };
        v.into()
    })
    .expect("model spaces are valid")
}

pub fn x4() -> FiniteMetricSpace {
    quad('x', 3, 1, 2)
}

pub fn y4() -> FiniteMetricSpace {
    quad('y', 3, 2, 2)
}

pub fn w4() -> FiniteMetricSpace {
    quad('w', 3, 1, 3)
}

pub fn z4() -> FiniteMetricSpace {
    // z1z2 = z2z3 = z2z4 = 3; z3z4 = z4z1 = z1z3 = 1
    quad_full('z', [3, 3, 1, 1, 1, 3])
}

pub fn s4() -> FiniteMetricSpace {
    // s1s2 = s2s3 = s2s4 = 3; s3s4 = s4s1 = 2; s1s3 = 1
    quad_full('s', [3, 3, 2, 2, 1, 3])
}

pub fn e4() -> FiniteMetricSpace {
    quad('p', 1, 1, 1)
}

pub fn all() -> Vec<(ModelName, FiniteMetricSpace)> {
    ModelName::ALL.into_iter().map(|m| (m, m.space())).collect()
}
