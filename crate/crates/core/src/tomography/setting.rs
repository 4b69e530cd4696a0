//! Measurement settings, outcome statistics and finite-shot sampling.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{BlochVector, CausalMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn bloch(self) -> BlochVector {
        match self {
            PauliAxis::X => BlochVector::X,
            PauliAxis::Y => BlochVector::Y,
            PauliAxis::Z => BlochVector::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            PauliAxis::X => 'x',
            PauliAxis::Y => 'y',
            PauliAxis::Z => 'z',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'x' => Some(PauliAxis::X),
            'y' => Some(PauliAxis::Y),
            'z' => Some(PauliAxis::Z),
            _ => None,
        }
    }
}

/// One of the six Pauli eigenstates used as a repreparation of D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliState {
    pub axis: PauliAxis,
    pub sign: i8,
}

impl PauliState {
    pub const ALL: [PauliState; 6] = [
        PauliState {
            axis: PauliAxis::X,
            sign: 1,
        },
        PauliState {
            axis: PauliAxis::X,
            sign: -1,
        },
        PauliState {
            axis: PauliAxis::Y,
            sign: 1,
        },
        PauliState {
            axis: PauliAxis::Y,
            sign: -1,
        },
        PauliState {
            axis: PauliAxis::Z,
            sign: 1,
        },
        PauliState {
            axis: PauliAxis::Z,
            sign: -1,
        },
    ];

    pub fn density(&self) -> ComplexMatrix {
        self.axis.bloch().projector(self.sign)
    }
}

impl fmt::Display for PauliState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign >= 0 { '+' } else { '-' };
        write!(f, "{s}{}", self.axis.letter())
    }
}

impl FromStr for PauliState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let sign = match chars.next() {
            Some('+') => 1,
            Some('-') => -1,
            _ => return Err(Error::Parse(format!("bad preparation label `{s}`"))),
        };
        let axis = chars
            .next()
            .and_then(PauliAxis::from_letter)
            .filter(|_| chars.next().is_none())
            .ok_or_else(|| Error::Parse(format!("bad preparation label `{s}`")))?;
        Ok(PauliState { axis, sign })
    }
}

/// Label of a measurement basis: `x`, `y`, `z` for Pauli axes, otherwise the
/// three Bloch components separated by colons.
pub fn basis_label(n: &BlochVector) -> String {
    for axis in PauliAxis::ALL {
        if *n == axis.bloch() {
            return axis.letter().to_string();
        }
    }
    let [x, y, z] = n.components();
    format!("{x}:{y}:{z}")
}

pub fn parse_basis_label(s: &str) -> Result<BlochVector> {
    let mut chars = s.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if let Some(axis) = PauliAxis::from_letter(c) {
            return Ok(axis.bloch());
        }
    }
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("bad basis label `{s}`")))?;
    match parts[..] {
        [x, y, z] => BlochVector::new(x, y, z),
        _ => Err(Error::Parse(format!("bad basis label `{s}`"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographySetting {
    pub c_basis: BlochVector,
    pub d_prep: PauliState,
    pub b_basis: BlochVector,
}

impl TomographySetting {
    pub fn pauli(c: PauliAxis, d: PauliState, b: PauliAxis) -> Self {
        Self {
            c_basis: c.bloch(),
            d_prep: d,
            b_basis: b.bloch(),
        }
    }

    /// `(setting_c, setting_d, setting_b)` labels as written to count files.
    pub fn labels(&self) -> (String, String, String) {
        (
            basis_label(&self.c_basis),
            self.d_prep.to_string(),
            basis_label(&self.b_basis),
        )
    }
}

impl fmt::Display for TomographySetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, d, b) = self.labels();
        write!(f, "(c={c}, d={d}, b={b})")
    }
}

/// The 3 × 6 × 3 Pauli grid, C basis outermost and B basis innermost.
pub fn pauli_grid() -> Vec<TomographySetting> {
    let mut out = Vec::with_capacity(54);
    for c in PauliAxis::ALL {
        for d in PauliState::ALL {
            for b in PauliAxis::ALL {
                out.push(TomographySetting::pauli(c, d, b));
            }
        }
    }
    out
}

/// Outcome cells in storage order: `(c, b)` = `(+,+), (+,-), (-,+), (-,-)`.
pub const OUTCOMES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

pub(crate) fn outcome_index(c: i8, b: i8) -> usize {
    (usize::from(c < 0) << 1) | usize::from(b < 0)
}

/// `P(c, b | d) = Tr[(Π^c_C ⊗ Π^b_B) E(ρ_d)]` in [`OUTCOMES`] order.
pub fn outcome_probabilities(map: &CausalMap, setting: &TomographySetting) -> [f64; 4] {
    let out = map.apply_unchecked(&setting.d_prep.density());
    OUTCOMES.map(|(c, b)| {
        let effect = setting
            .c_basis
            .projector(c)
            .kron(&setting.b_basis.projector(b));
        out.trace_product(&effect).re
    })
}

/// Counts of one setting. Counts are real so that exact probabilities can be
/// fed through the same path as pseudo-counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    pub setting: TomographySetting,
    pub counts: [f64; 4],
    pub shots: f64,
}

impl CountRecord {
    pub fn new(setting: TomographySetting, counts: [f64; 4], shots: f64) -> Result<Self> {
        if counts.iter().any(|&c| !(c.is_finite() && c >= 0.0)) {
            return Err(Error::Argument(format!(
                "negative or non-finite counts at {setting}"
            )));
        }
        if !(shots.is_finite() && shots > 0.0) {
            return Err(Error::Argument(format!(
                "shots must be positive at {setting}"
            )));
        }
        let total: f64 = counts.iter().sum();
        if (total - shots).abs() > 1e-9 * shots.max(1.0) {
            return Err(Error::Argument(format!(
                "counts at {setting} sum to {total}, expected {shots}"
            )));
        }
        Ok(Self {
            setting,
            counts,
            shots,
        })
    }

    /// Exact probabilities as counts of a single unit-weight shot.
    pub fn pseudo(map: &CausalMap, setting: TomographySetting) -> Self {
        // round-off can leave impossible cells a hair below zero
        let probs = outcome_probabilities(map, &setting).map(|p| p.max(0.0));
        let total: f64 = probs.iter().sum();
        Self {
            setting,
            counts: probs,
            shots: total,
        }
    }

    pub fn frequencies(&self) -> [f64; 4] {
        self.counts.map(|c| c / self.shots)
    }
}

/// Draws a multinomial sample as a chain of conditional binomials.
pub(crate) fn draw_multinomial<R: Rng>(
    rng: &mut R,
    probabilities: &[f64; 4],
    shots: u64,
) -> [f64; 4] {
    let clipped = probabilities.map(|p| if p.is_finite() { p.max(0.0) } else { 0.0 });
    let mut remaining_mass: f64 = clipped.iter().sum();
    let mut remaining = shots;
    let mut out = [0.0; 4];
    for (i, &p) in clipped.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let k = if i == 3 || remaining_mass <= p {
            remaining
        } else {
            let ratio = (p / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining, ratio)
                .expect("ratio in [0, 1]")
                .sample(rng)
        };
        out[i] = k as f64;
        remaining -= k;
        remaining_mass -= p;
    }
    out
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Multinomial sample of `shots` outcomes, deterministic in `seed`.
pub fn sample_counts(
    setting: TomographySetting,
    probabilities: &[f64; 4],
    shots: u64,
    seed: u64,
) -> Result<CountRecord> {
    if shots == 0 {
        return Err(Error::Argument("shots must be positive".into()));
    }
    let counts = draw_multinomial(&mut stream_rng(seed, 0), probabilities, shots);
    CountRecord::new(setting, counts, shots as f64)
}

/// Simulates every setting with its own random stream (stream = setting index).
pub fn simulate_counts(
    map: &CausalMap,
    settings: &[TomographySetting],
    shots: u64,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    if shots == 0 {
        return Err(Error::Argument("shots must be positive".into()));
    }
    settings
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let probs = outcome_probabilities(map, s);
            let counts = draw_multinomial(&mut stream_rng(seed, i as u64), &probs, shots);
            CountRecord::new(*s, counts, shots as f64)
        })
        .collect()
}

/// Noiseless records holding the exact probabilities of every setting.
pub fn pseudo_counts(map: &CausalMap, settings: &[TomographySetting]) -> Vec<CountRecord> {
    settings
        .iter()
        .map(|s| CountRecord::pseudo(map, *s))
        .collect()
}

pub(crate) fn resample_rng(seed: u64, resample: u64) -> ChaCha20Rng {
    stream_rng(seed, (1 << 32) | resample)
}
