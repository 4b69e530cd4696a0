//! Independent reference implementations used by the integration tests.
//!
//! The oracles never call into the crate's linear algebra: states are evolved
//! qubit by qubit on nalgebra matrices with explicit index arithmetic, and
//! eigenvalues come from Sturm-sequence bisection on a Householder
//! tridiagonalization of the real embedding.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use qcausal::linalg::ComplexMatrix;

pub type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_na(m: &ComplexMatrix) -> CMat {
    let n = m.dim();
    CMat::from_fn(n, n, |i, j| m[(i, j)])
}

pub fn from_na(m: &CMat) -> ComplexMatrix {
    let n = m.nrows();
    let rows: Vec<Complex64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| m[(i, j)]))
        .collect();
    ComplexMatrix::from_vec(n, rows).expect("square")
}

pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn sigma(k: usize) -> CMat {
    match k {
        0 => CMat::identity(2, 2),
        1 => CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        2 => CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        3 => CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => panic!("no Pauli {k}"),
    }
}

pub fn n_sigma(n: [f64; 3]) -> CMat {
    sigma(1) * c(n[0], 0.0) + sigma(2) * c(n[1], 0.0) + sigma(3) * c(n[2], 0.0)
}

pub fn projector(n: [f64; 3], sign: f64) -> CMat {
    (CMat::identity(2, 2) + n_sigma(n) * c(sign, 0.0)) * c(0.5, 0.0)
}

pub fn phi_plus() -> CMat {
    let mut m = CMat::zeros(4, 4);
    for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] = c(0.5, 0.0);
    }
    m
}

/// Applies a single-qubit Kraus set to qubit `k` of an `n`-qubit state (MSB first).
pub fn apply_kraus_1q(rho: &CMat, n: usize, k: usize, kraus: &[CMat]) -> CMat {
    let dim = 1 << n;
    let shift = n - 1 - k;
    let mut out = CMat::zeros(dim, dim);
    for op in kraus {
        // (K ρ K†)[r, s] = Σ K[a, a'] ρ[r', s'] conj(K[b, b'])
        for r in 0..dim {
            let a = (r >> shift) & 1;
            for s in 0..dim {
                let b = (s >> shift) & 1;
                let mut acc = ZERO;
                for ap in 0..2 {
                    let rp = (r & !(1 << shift)) | (ap << shift);
                    for bp in 0..2 {
                        let sp = (s & !(1 << shift)) | (bp << shift);
                        acc += op[(a, ap)] * rho[(rp, sp)] * op[(b, bp)].conj();
                    }
                }
                out[(r, s)] += acc;
            }
        }
    }
    out
}

/// Applies `U` (4x4, first factor on qubit `k1`) to qubits `k1, k2`.
pub fn apply_2q(rho: &CMat, n: usize, k1: usize, k2: usize, u: &CMat) -> CMat {
    let dim = 1 << n;
    let (s1, s2) = (n - 1 - k1, n - 1 - k2);
    let local = |x: usize| (((x >> s1) & 1) << 1) | ((x >> s2) & 1);
    let with = |x: usize, l: usize| {
        (x & !(1 << s1) & !(1 << s2)) | (((l >> 1) & 1) << s1) | ((l & 1) << s2)
    };
    let mut full = CMat::zeros(dim, dim);
    for r in 0..dim {
        for lp in 0..4 {
            let cp = with(r, lp);
            full[(r, cp)] = u[(local(r), lp)];
        }
    }
    &full * rho * full.adjoint()
}

/// Traces out qubit `k`.
pub fn trace_qubit(rho: &CMat, n: usize, k: usize) -> CMat {
    let shift = n - 1 - k;
    let dim = 1 << (n - 1);
    let expand = |x: usize, bit: usize| {
        let hi = (x >> shift) << (shift + 1);
        let lo = x & ((1 << shift) - 1);
        hi | (bit << shift) | lo
    };
    CMat::from_fn(dim, dim, |r, s| {
        (0..2).map(|b| rho[(expand(r, b), expand(s, b))]).sum()
    })
}

pub fn dephasing_kraus(n: [f64; 3], p: f64) -> Vec<CMat> {
    vec![
        CMat::identity(2, 2) * c((1.0 - p / 2.0).sqrt(), 0.0),
        n_sigma(n) * c((p / 2.0).sqrt(), 0.0),
    ]
}

pub fn swap4() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}

pub fn partial_swap(theta: f64) -> CMat {
    CMat::identity(4, 4) * c((theta / 2.0).cos(), 0.0) + swap4() * c(0.0, (theta / 2.0).sin())
}

/// Raw ingredients of a fragment, independent of the crate's types.
#[derive(Debug, Clone)]
pub struct OracleSpec {
    pub rho_ce: CMat,
    pub deph_d: ([f64; 3], f64),
    pub deph_e: ([f64; 3], f64),
    /// Weighted unitaries acting on `(D, E)`.
    pub gate: Vec<(f64, CMat)>,
    pub deph_b: ([f64; 3], f64),
}

impl OracleSpec {
    pub fn ideal(theta: f64, p: f64, q: f64, axes: ([f64; 3], [f64; 3], [f64; 3])) -> Self {
        let (n_e, n_d, n_b) = axes;
        let u = partial_swap(theta);
        let gate = if q == 1.0 {
            vec![(1.0, u)]
        } else {
            vec![
                (q, u),
                ((1.0 - q) / 2.0, CMat::identity(4, 4)),
                ((1.0 - q) / 2.0, swap4()),
            ]
        };
        Self {
            rho_ce: phi_plus(),
            deph_d: (n_d, p),
            deph_e: (n_e, p),
            gate,
            deph_b: (n_b, p),
        }
    }
}

pub fn eta_axes(eta: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let (s, co) = (2.0 * eta).sin_cos();
    ([co, 0.0, s], [co * s, -co, s * s], [0.0, 0.0, 1.0])
}

/// `τ_CBD` by evolving `ρ_CE ⊗ Φ⁺_DD'` on qubits `[C, E, D, D']`.
pub fn choi(spec: &OracleSpec) -> CMat {
    const E_: usize = 1;
    const D_: usize = 2;
    let mut rho = spec.rho_ce.kronecker(&phi_plus());
    rho = apply_kraus_1q(&rho, 4, D_, &dephasing_kraus(spec.deph_d.0, spec.deph_d.1));
    rho = apply_kraus_1q(&rho, 4, E_, &dephasing_kraus(spec.deph_e.0, spec.deph_e.1));
    let mut mixed = CMat::zeros(16, 16);
    for (w, u) in &spec.gate {
        mixed += apply_2q(&rho, 4, D_, E_, u) * c(*w, 0.0);
    }
    // B now lives on the D wire and F on the E wire: [C, F, B, D']
    rho = apply_kraus_1q(
        &mixed,
        4,
        D_,
        &dephasing_kraus(spec.deph_b.0, spec.deph_b.1),
    );
    trace_qubit(&rho, 4, E_)
}

/// Output on `C ⊗ B` for input `ρ` on D: `2 Tr_D[τ (I ⊗ ρᵀ)]`.
pub fn apply(tau: &CMat, rho: &CMat) -> CMat {
    CMat::from_fn(4, 4, |x, y| {
        let mut acc = ZERO;
        for d in 0..2 {
            for f in 0..2 {
                acc += tau[(2 * x + d, 2 * y + f)] * rho[(d, f)];
            }
        }
        acc * c(2.0, 0.0)
    })
}

/// Unnormalized state left after projecting qubit `k` (0 = C, 1 = B) on `proj`.
pub fn condition(tau: &CMat, k: usize, proj: &CMat) -> CMat {
    let mut op = [
        CMat::identity(2, 2),
        CMat::identity(2, 2),
        CMat::identity(2, 2),
    ];
    op[k] = proj.clone();
    let full = op[0].kronecker(&op[1]).kronecker(&op[2]);
    trace_qubit(&(full * tau), 3, k)
}

pub fn partial_transpose_second(rho: &CMat) -> CMat {
    CMat::from_fn(4, 4, |r, s| {
        let (a, b) = (r >> 1, r & 1);
        let (cc, d) = (s >> 1, s & 1);
        rho[((a << 1) | d, (cc << 1) | b)]
    })
}

/// Eigenvalues of a Hermitian matrix via nalgebra on the real embedding.
pub fn eigenvalues_nalgebra(h: &CMat) -> Vec<f64> {
    let n = h.nrows();
    let real = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(real)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}

pub fn negativity(rho: &CMat) -> f64 {
    let ev = eigenvalues_nalgebra(&partial_transpose_second(rho));
    let n = (ev.iter().map(|x| x.abs()).sum::<f64>() - 1.0) / 2.0;
    if n < 1e-12 {
        0.0
    } else {
        n
    }
}

pub fn covariance_xy(rho: &CMat) -> f64 {
    let e = |op: CMat| (rho * op).trace().re;
    e(sigma(1).kronecker(&sigma(2)))
        - e(sigma(1).kronecker(&sigma(0))) * e(sigma(0).kronecker(&sigma(2)))
}

pub fn c_cd(tau: &CMat) -> f64 {
    let mut total = 0.0;
    for b in [1.0, -1.0] {
        let raw = condition(tau, 1, &projector([0.0, 0.0, 1.0], b));
        let p = raw.trace().re;
        if p > 1e-12 {
            total += b * p * p * covariance_xy(&(raw / c(p, 0.0)));
        }
    }
    2.0 * total
}

/// Per-outcome negativities for conditioning on C (`k = 0`), B (`k = 1`) or
/// preparing D (`k = 2`) along `n`.
pub fn outcome_negativities(tau: &CMat, k: usize, n: [f64; 3]) -> [f64; 2] {
    [1.0, -1.0].map(|s| {
        let proj = projector(n, s);
        let state = if k == 2 {
            apply(tau, &proj)
        } else {
            let raw = condition(tau, k, &proj);
            let p = raw.trace().re;
            if p < 1e-12 {
                return 0.0;
            }
            raw / c(p, 0.0)
        };
        negativity(&state)
    })
}

/// Seeded random fragment: random initial state, dephasing axes and strengths,
/// and a delay gate, kept both as an oracle spec and as parameters for the crate.
pub struct RandomFragment {
    pub oracle: OracleSpec,
    pub theta: f64,
    pub q: f64,
}

impl RandomFragment {
    pub fn build(&self) -> qcausal::model::CausalMap {
        use qcausal::model::{delay_gate, Dephasing, FragmentSpec};
        let bloch = |n: [f64; 3]| qcausal::model::BlochVector::new(n[0], n[1], n[2]).unwrap();
        let deph = |(n, p): ([f64; 3], f64)| Dephasing::new(bloch(n), p).unwrap();
        let spec = FragmentSpec::new(
            from_na(&self.oracle.rho_ce),
            deph(self.oracle.deph_d),
            deph(self.oracle.deph_e),
            delay_gate(self.theta, self.q).unwrap(),
            deph(self.oracle.deph_b),
        )
        .unwrap();
        qcausal::model::build_causal_map(&spec).unwrap()
    }
}

pub fn random_fragment<R: rand::Rng>(rng: &mut R) -> RandomFragment {
    let theta = rng.random_range(0.0..PI);
    let q = rng.random_range(0.0..=1.0);
    let mut oracle = OracleSpec::ideal(theta, 0.0, q, eta_axes(0.0));
    // the oracle always uses the three-term mixture so the q = 1 shortcut is not exercised
    oracle.gate = vec![
        (q, partial_swap(theta)),
        ((1.0 - q) / 2.0, CMat::identity(4, 4)),
        ((1.0 - q) / 2.0, swap4()),
    ];
    oracle.rho_ce = random_density(rng, 4);
    oracle.deph_d = (random_axis(rng), rng.random_range(0.0..=1.0));
    oracle.deph_e = (random_axis(rng), rng.random_range(0.0..=1.0));
    oracle.deph_b = (random_axis(rng), rng.random_range(0.0..=1.0));
    RandomFragment { oracle, theta, q }
}

// Eigenvalue oracle: Householder tridiagonalization and Sturm bisection.

fn real_embedding(h: &ComplexMatrix) -> Vec<Vec<f64>> {
    let n = h.dim();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    a
}

/// Reduces a real symmetric matrix to tridiagonal form `(diag, offdiag)`.
fn householder_tridiagonal(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum();
        if alpha_sq < 1e-300 {
            continue;
        }
        let alpha = -a[k + 1][k].signum() * alpha_sq.sqrt();
        let alpha = if a[k + 1][k] == 0.0 {
            -alpha_sq.sqrt()
        } else {
            alpha
        };
        let mut v = vec![0.0; n];
        v[k + 1] = a[k + 1][k] - alpha;
        for i in k + 2..n {
            v[i] = a[i][k];
        }
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq < 1e-300 {
            continue;
        }
        // A <- H A H with H = I - 2 v vᵀ / |v|²
        let p: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i][j] * v[j]).sum::<f64>() * 2.0 / vnorm_sq)
            .collect();
        let kk: f64 = (0..n).map(|i| v[i] * p[i]).sum::<f64>() / vnorm_sq;
        let q: Vec<f64> = (0..n).map(|i| p[i] - kk * v[i]).collect();
        for i in 0..n {
            for j in 0..n {
                a[i][j] -= v[i] * q[j] + q[i] * v[j];
            }
        }
    }
    let diag = (0..n).map(|i| a[i][i]).collect();
    let off = (0..n.saturating_sub(1)).map(|i| a[i + 1][i]).collect();
    (diag, off)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q.abs() < 1e-300 { 1e-300 } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Ascending eigenvalues of a Hermitian matrix by bisection on the
/// characteristic polynomial's Sturm sequence.
pub fn sturm_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let (diag, off) = householder_tridiagonal(real_embedding(h));
    let m = diag.len();
    let radius = (0..m)
        .map(|i| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = if i + 1 < m { off[i].abs() } else { 0.0 };
            diag[i].abs() + l + r
        })
        .fold(0.0, f64::max)
        + 1.0;
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let (mut lo, mut hi) = (-radius, radius);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sturm_count(&diag, &off, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-14 * radius {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out.into_iter().step_by(2).collect()
}

/// Characteristic polynomial coefficients `c_0..c_n` of `det(λI - A)` by
/// Faddeev-LeVerrier, highest degree first.
pub fn characteristic_polynomial(a: &CMat) -> Vec<Complex64> {
    let n = a.nrows();
    let mut coeffs = vec![ONE];
    let mut m = CMat::zeros(n, n);
    for k in 1..=n {
        m = a * &m + CMat::identity(n, n) * coeffs[k - 1];
        let ck = -(a * &m).trace() / c(k as f64, 0.0);
        coeffs.push(ck);
    }
    coeffs
}

pub fn eval_poly(coeffs: &[Complex64], x: f64) -> Complex64 {
    coeffs.iter().fold(ZERO, |acc, &k| acc * x + k)
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian<R: rand::Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = c(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random density matrix `G G† / Tr` with a complex Gaussian-ish `G`.
pub fn random_density<R: rand::Rng>(rng: &mut R, n: usize) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn random_axis<R: rand::Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0f64),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}
