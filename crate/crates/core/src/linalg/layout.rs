//! Named qubit subsystems and the index bookkeeping that goes with them.
//!
//! Every multi-qubit matrix in the crate uses one ordering convention: for
//! labels `[l0, l1, ..., l(n-1)]` the basis index is `Σ b_k 2^(n-1-k)`, so the
//! first label is the most significant bit (the slowest-varying factor of a
//! Kronecker product).

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    labels: Vec<String>,
}

impl SubsystemLayout {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|l| l.as_ref().to_owned()).collect();
        if labels.is_empty() {
            return Err(Error::Argument(
                "layout needs at least one subsystem".into(),
            ));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Argument(format!("duplicate subsystem label `{l}`")));
            }
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| {
            Error::Argument(format!(
                "unknown subsystem label `{label}` in {:?}",
                self.labels
            ))
        })
    }

    fn check_matrix(&self, m: &ComplexMatrix) -> Result<()> {
        if m.dim() != self.dim() {
            return Err(Error::Argument(format!(
                "matrix of dimension {} does not match layout {:?} (dimension {})",
                m.dim(),
                self.labels,
                self.dim()
            )));
        }
        Ok(())
    }
}

#[inline]
fn bit(index: usize, pos: usize, n: usize) -> usize {
    (index >> (n - 1 - pos)) & 1
}

/// Gathers the bits of `index` at `positions` into a compact index (first position most significant).
#[inline]
fn gather(index: usize, positions: &[usize], n: usize) -> usize {
    positions
        .iter()
        .fold(0, |acc, &p| (acc << 1) | bit(index, p, n))
}

/// Inverse of [`gather`]: places the bits of `compact` at `positions`.
#[inline]
fn scatter(compact: usize, positions: &[usize], n: usize) -> usize {
    let k = positions.len();
    positions.iter().enumerate().fold(0, |acc, (i, &p)| {
        acc | (((compact >> (k - 1 - i)) & 1) << (n - 1 - p))
    })
}

/// Reduced matrix on the `keep` subsystems, listed in their original layout order.
pub fn partial_trace<S: AsRef<str>>(
    m: &ComplexMatrix,
    layout: &SubsystemLayout,
    keep: &[S],
) -> Result<ComplexMatrix> {
    layout.check_matrix(m)?;
    let n = layout.len();
    let mut kept = Vec::with_capacity(keep.len());
    for k in keep {
        let pos = layout.position(k.as_ref())?;
        if !kept.contains(&pos) {
            kept.push(pos);
        }
    }
    kept.sort_unstable();
    if kept.is_empty() {
        let t = m.trace();
        return ComplexMatrix::from_vec(1, vec![t]);
    }
    let traced: Vec<usize> = (0..n).filter(|p| !kept.contains(p)).collect();
    let kd = 1 << kept.len();
    let td = 1 << traced.len();
    let mut out = ComplexMatrix::zeros(kd);
    for i in 0..kd {
        let bi = scatter(i, &kept, n);
        for j in 0..kd {
            let bj = scatter(j, &kept, n);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..td {
                let bt = scatter(t, &traced, n);
                acc += m[(bi | bt, bj | bt)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the indices of subsystem `on` only.
pub fn partial_transpose(
    m: &ComplexMatrix,
    layout: &SubsystemLayout,
    on: &str,
) -> Result<ComplexMatrix> {
    layout.check_matrix(m)?;
    let n = layout.len();
    let pos = layout.position(on)?;
    let mask = 1 << (n - 1 - pos);
    let d = m.dim();
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            // swap the `on` bits between row and column
            let (bi, bj) = (i & mask, j & mask);
            let ni = (i & !mask) | bj;
            let nj = (j & !mask) | bi;
            out[(ni, nj)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// A density operator (or any operator) tagged with its subsystem layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    layout: SubsystemLayout,
    matrix: ComplexMatrix,
}

impl LabeledState {
    pub fn new<S: AsRef<str>>(labels: &[S], matrix: ComplexMatrix) -> Result<Self> {
        let layout = SubsystemLayout::new(labels)?;
        layout.check_matrix(&matrix)?;
        Ok(Self { layout, matrix })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `self ⊗ other`, labels concatenated.
    pub fn tensor(&self, other: &LabeledState) -> Result<Self> {
        let labels: Vec<&String> = self
            .layout
            .labels
            .iter()
            .chain(&other.layout.labels)
            .collect();
        Self::new(&labels, self.matrix.kron(&other.matrix))
    }

    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let m = partial_trace(&self.matrix, &self.layout, keep)?;
        let labels: Vec<&String> = self
            .layout
            .labels
            .iter()
            .filter(|l| keep.iter().any(|k| k.as_ref() == l.as_str()))
            .collect();
        Self::new(&labels, m)
    }

    pub fn partial_transpose(&self, on: &str) -> Result<Self> {
        Ok(Self {
            layout: self.layout.clone(),
            matrix: partial_transpose(&self.matrix, &self.layout, on)?,
        })
    }

    /// Permutes subsystems into `order`, which must be a permutation of the current labels.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let n = self.layout.len();
        if order.len() != n {
            return Err(Error::Argument(format!(
                "reorder needs all {n} labels, got {}",
                order.len()
            )));
        }
        let new_layout = SubsystemLayout::new(order)?;
        let src: Vec<usize> = order
            .iter()
            .map(|l| self.layout.position(l.as_ref()))
            .collect::<Result<_>>()?;
        let d = self.matrix.dim();
        // new index -> old index
        let map: Vec<usize> = (0..d).map(|i| scatter(i, &src, n)).collect();
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = self.matrix[(map[i], map[j])];
            }
        }
        Ok(Self {
            layout: new_layout,
            matrix: out,
        })
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        let pos = self.layout.position(from)?;
        let mut labels = self.layout.labels.clone();
        labels[pos] = to.to_owned();
        Self::new(&labels, self.matrix.clone())
    }

    /// Full-space matrix of `op` acting on `targets` (in that order), identity elsewhere.
    pub fn embed_operator<S: AsRef<str>>(
        &self,
        op: &ComplexMatrix,
        targets: &[S],
    ) -> Result<ComplexMatrix> {
        let n = self.layout.len();
        let pos: Vec<usize> = targets
            .iter()
            .map(|t| self.layout.position(t.as_ref()))
            .collect::<Result<_>>()?;
        if op.dim() != 1 << pos.len() {
            return Err(Error::Argument(format!(
                "operator of dimension {} cannot act on {} qubits",
                op.dim(),
                pos.len()
            )));
        }
        let rest: Vec<usize> = (0..n).filter(|p| !pos.contains(p)).collect();
        let d = self.matrix.dim();
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            let (si, ri) = (gather(i, &pos, n), gather(i, &rest, n));
            for j in 0..d {
                if gather(j, &rest, n) == ri {
                    out[(i, j)] = op[(si, gather(j, &pos, n))];
                }
            }
        }
        Ok(out)
    }

    /// `U ρ U†` with `U` acting on `targets`.
    pub fn apply_unitary<S: AsRef<str>>(&self, u: &ComplexMatrix, targets: &[S]) -> Result<Self> {
        let full = self.embed_operator(u, targets)?;
        Ok(Self {
            layout: self.layout.clone(),
            matrix: self.matrix.conjugate_by(&full),
        })
    }

    /// Applies the single-qubit channel with trace-one Choi matrix `choi`
    /// (layout output ⊗ input) to subsystem `label`.
    pub fn apply_qubit_choi(&self, choi: &ComplexMatrix, label: &str) -> Result<Self> {
        if choi.dim() != 4 {
            return Err(Error::Argument(
                "qubit channel Choi matrix must be 4x4".into(),
            ));
        }
        let n = self.layout.len();
        let pos = self.layout.position(label)?;
        let shift = n - 1 - pos;
        let mask = 1 << shift;
        let d = self.matrix.dim();
        let mut out = ComplexMatrix::zeros(d);
        // E(X)_{ab} = 2 Σ_{ij} choi[(a,i),(b,j)] X_{ij}
        for r in 0..d {
            if r & mask != 0 {
                continue;
            }
            for s in 0..d {
                if s & mask != 0 {
                    continue;
                }
                for a in 0..2 {
                    for b in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for i in 0..2 {
                            for j in 0..2 {
                                let c = choi[(a * 2 + i, b * 2 + j)];
                                if c != Complex64::new(0.0, 0.0) {
                                    acc += c * self.matrix[(r | (i << shift), s | (j << shift))];
                                }
                            }
                        }
                        out[(r | (a << shift), s | (b << shift))] = acc * 2.0;
                    }
                }
            }
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: out,
        })
    }
}
