//! Labelings of the six coin states by multi-particle registers.
//!
//! A three-qubit register uses six of its eight computational states, a
//! qubit-qutrit register uses all six. Each encoding fixes which register
//! state stands for which `ζ`, and therefore which pairs the sector coins
//! couple and which states the shift moves right (↑) or left (↓).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{coin_block, shift_phases, WalkParams, COIN_DIM};
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    #[default]
    SixLevel,
    ThreeQubit,
    QubitQutrit,
}

impl Encoding {
    pub const ALL: [Encoding; 3] = [
        Encoding::SixLevel,
        Encoding::ThreeQubit,
        Encoding::QubitQutrit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Encoding::SixLevel => "six-level",
            Encoding::ThreeQubit => "three-qubit",
            Encoding::QubitQutrit => "qubit-qutrit",
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Encoding::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| Error::UnknownEncoding(s.to_string()))
    }
}

/// Label bijection between register states and `ζ1..ζ6`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoinBasisEncoding {
    pub encoding: Encoding,
    /// `labels[i]` is the register state standing for `ζ_{i+1}`.
    pub labels: [&'static str; COIN_DIM],
    /// Dimension of the register's full state space.
    pub register_dim: usize,
    /// `register_index[i]` is the computational-basis index of `labels[i]`.
    pub register_index: [usize; COIN_DIM],
}

impl CoinBasisEncoding {
    /// The `ζ` index (1-based) a register label stands for.
    pub fn zeta_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|&l| l == label).map(|i| i + 1)
    }

    /// Embeds a 6x6 operator on `ζ1..ζ6` into the register space.
    pub fn to_register(&self, canonical: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.register_dim, self.register_dim);
        for (i, &ri) in self.register_index.iter().enumerate() {
            for (j, &rj) in self.register_index.iter().enumerate() {
                out[(ri, rj)] = canonical[(i, j)];
            }
        }
        out
    }

    /// Reads the `ζ1..ζ6` block back out of a register-space operator.
    pub fn to_canonical(&self, register: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(COIN_DIM, COIN_DIM, |i, j| {
            register[(self.register_index[i], self.register_index[j])]
        })
    }
}

pub fn encoding_table(name: &str) -> Result<CoinBasisEncoding> {
    Ok(table(name.parse()?))
}

pub(crate) fn table(encoding: Encoding) -> CoinBasisEncoding {
    match encoding {
        Encoding::SixLevel => CoinBasisEncoding {
            encoding,
            labels: ["ζ1", "ζ2", "ζ3", "ζ4", "ζ5", "ζ6"],
            register_dim: 6,
            register_index: [0, 1, 2, 3, 4, 5],
        },
        Encoding::ThreeQubit => CoinBasisEncoding {
            encoding,
            labels: ["000", "001", "010", "011", "100", "101"],
            register_dim: 8,
            register_index: [0b000, 0b001, 0b010, 0b011, 0b100, 0b101],
        },
        Encoding::QubitQutrit => CoinBasisEncoding {
            encoding,
            labels: ["00", "01", "02", "10", "11", "12"],
            register_dim: 6,
            register_index: [0, 1, 2, 3, 4, 5],
        },
    }
}

/// One walk step written directly in register space: the coin couples the
/// two register states of each sector, the shift multiplies the ↑ states by
/// `e^{-ik̃}` and the ↓ states by `e^{+ik̃}`. Unused register states
/// (`110`, `111`) get zero operators.
pub fn encoded_walk(encoding: Encoding, params: &WalkParams) -> ComplexMatrix {
    let enc = table(encoding);
    let n = enc.register_dim;
    let zero = Complex64::new(0.0, 0.0);

    let mut coin = ComplexMatrix::zeros(n, n);
    for (j, &theta) in params.theta.iter().enumerate() {
        let up = enc.register_index[2 * j];
        let down = enc.register_index[2 * j + 1];
        let c = coin_block(theta);
        coin[(up, up)] = Complex64::new(c[(0, 0)], 0.0);
        coin[(up, down)] = Complex64::new(c[(0, 1)], 0.0);
        coin[(down, up)] = Complex64::new(c[(1, 0)], 0.0);
        coin[(down, down)] = Complex64::new(c[(1, 1)], 0.0);
    }

    let (right, left) = shift_phases(params.ktilde);
    let mut shift = vec![zero; n];
    for (i, &r) in enc.register_index.iter().enumerate() {
        shift[r] = if i % 2 == 0 { right } else { left };
    }

    // S is diagonal, so S·C scales row r of C by shift[r].
    ComplexMatrix::from_fn(n, n, |r, col| shift[r] * coin[(r, col)])
}
