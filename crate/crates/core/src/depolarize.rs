//! Depolarizing-channel simulation with `m` bits.
//!
//! Sender and receiver share a uniformly random rotation `R` of the Bloch
//! sphere. The sender announces the codeword `ω̂_i` whose rotated image
//! `Rω̂_i` is closest to her Bloch vector, and the receiver prepares the
//! state along `Rω̂_i`. Averaged over `R` this prepares `D_η(ψ)` with `η`
//! depending on the codebook only.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{chunk_rng, CHUNK};
use crate::qmath::{bloch_to_density, density_to_bloch, BlochVector, DensityMatrix};

const UNIT_TOL: f64 = 1e-12;

/// Unit Bloch vectors shared in advance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BlochVector>", into = "Vec<BlochVector>")]
pub struct Codebook {
    vectors: Vec<BlochVector>,
}

impl TryFrom<Vec<BlochVector>> for Codebook {
    type Error = Error;
    fn try_from(v: Vec<BlochVector>) -> Result<Self> {
        Codebook::new(v)
    }
}

impl From<Codebook> for Vec<BlochVector> {
    fn from(c: Codebook) -> Self {
        c.vectors
    }
}

impl Codebook {
    pub fn new(vectors: Vec<BlochVector>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::OutOfRange("empty codebook".into()));
        }
        for v in &vectors {
            if (v.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidBlochVector(v.norm()));
            }
        }
        for (i, a) in vectors.iter().enumerate() {
            if vectors[..i].iter().any(|b| a.sub(*b).norm() < 1e-9) {
                return Err(Error::OutOfRange(format!("codeword {i} repeats an earlier one")));
            }
        }
        Ok(Codebook { vectors })
    }

    pub fn antipodal() -> Self {
        Codebook { vectors: vec![BlochVector::new(0.0, 0.0, 1.0), BlochVector::new(0.0, 0.0, -1.0)] }
    }

    pub fn tetrahedron() -> Self {
        let s = 1.0 / 3f64.sqrt();
        let vectors = [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)]
            .into_iter()
            .map(|(x, y, z)| BlochVector::new(x * s, y * s, z * s))
            .collect();
        Codebook { vectors }
    }

    pub fn cube() -> Self {
        let s = 1.0 / 3f64.sqrt();
        let mut vectors = Vec::with_capacity(8);
        for i in 0..8 {
            let sign = |b: usize| if i >> b & 1 == 0 { s } else { -s };
            vectors.push(BlochVector::new(sign(2), sign(1), sign(0)));
        }
        Codebook { vectors }
    }

    /// `2^m` spherical Fibonacci points.
    pub fn fibonacci(m: u32) -> Result<Self> {
        if m == 0 || m > 20 {
            return Err(Error::OutOfRange(format!("bit count {m} outside 1..=20")));
        }
        let n = 1usize << m;
        let golden = PI * (3.0 - 5f64.sqrt());
        let vectors = (0..n)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / n as f64;
                let r = (1.0 - z * z).sqrt();
                let a = golden * i as f64;
                BlochVector::new(r * a.cos(), r * a.sin(), z).normalized()
            })
            .collect();
        Codebook::new(vectors)
    }

    /// `antipodal`, `tetrahedron`, `cube`, or `fibonacci<m>`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "antipodal" => Ok(Self::antipodal()),
            "tetrahedron" => Ok(Self::tetrahedron()),
            "cube" => Ok(Self::cube()),
            _ => match name.strip_prefix("fibonacci").and_then(|m| m.parse().ok()) {
                Some(m) => Self::fibonacci(m),
                None => Err(Error::UnknownName(name.to_string())),
            },
        }
    }

    /// Named codebook for `m ≤ 3`, Fibonacci points beyond.
    pub fn for_bits(m: u32) -> Result<Self> {
        match m {
            1 => Ok(Self::antipodal()),
            2 => Ok(Self::tetrahedron()),
            3 => Ok(Self::cube()),
            _ => Self::fibonacci(m),
        }
    }

    pub fn vectors(&self) -> &[BlochVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Proper rotation of the Bloch sphere, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rotation([[f64; 3]; 3]);

impl Rotation {
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let r = Rotation(m);
        for i in 0..3 {
            for j in 0..3 {
                let g: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - want).abs() > UNIT_TOL {
                    return Err(Error::OutOfRange("matrix is not orthogonal".into()));
                }
            }
        }
        if (r.det() - 1.0).abs() > UNIT_TOL {
            return Err(Error::OutOfRange("rotation must have determinant +1".into()));
        }
        Ok(r)
    }

    pub fn identity() -> Self {
        Rotation([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Rotation of the unit quaternion `(w, x, y, z)`, normalising first.
    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let [w, x, y, z] = q.map(|v| v / n);
        Rotation([
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ])
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.0
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn apply(&self, v: BlochVector) -> BlochVector {
        let r = |i: usize| self.0[i][0] * v.x + self.0[i][1] * v.y + self.0[i][2] * v.z;
        BlochVector::new(r(0), r(1), r(2))
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Rotation(m)
    }
}

/// Haar-random rotation from a Gaussian quaternion.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        if q.iter().map(|v| v * v).sum::<f64>() > 1e-12 {
            return Rotation::from_quaternion(q);
        }
    }
}

pub fn sample_rotation(seed: u64) -> Rotation {
    random_rotation(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Index maximising `ψ̂ · Rω̂_i`; ties go to the lowest index.
pub fn alice_index(psi: BlochVector, r: &Rotation, c: &Codebook) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, w) in c.vectors.iter().enumerate() {
        let v = psi.dot(r.apply(*w));
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Sample mean with per-component standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageBloch {
    pub mean: BlochVector,
    pub std_errors: [f64; 3],
    pub samples: u64,
}

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: [f64; 3],
    sq: [f64; 3],
}

impl Moments {
    fn push(&mut self, v: [f64; 3]) {
        for k in 0..3 {
            self.sum[k] += v[k];
            self.sq[k] += v[k] * v[k];
        }
    }

    fn merge(mut self, o: Moments) -> Moments {
        for k in 0..3 {
            self.sum[k] += o.sum[k];
            self.sq[k] += o.sq[k];
        }
        self
    }

    fn finish(&self, n: u64) -> ([f64; 3], [f64; 3]) {
        let nf = n as f64;
        let mean = self.sum.map(|s| s / nf);
        let se = std::array::from_fn(|k| {
            if n < 2 {
                return 0.0;
            }
            let var = (self.sq[k] - nf * mean[k] * mean[k]) / (nf - 1.0);
            (var.max(0.0) / nf).sqrt()
        });
        (mean, se)
    }
}

fn accumulate<F>(n: u64, seed: u64, f: F) -> Result<Moments>
where
    F: Fn(&Rotation) -> [f64; 3] + Sync,
{
    if n == 0 {
        return Err(Error::OutOfRange("sample count must be at least 1".into()));
    }
    let chunks = n.div_ceil(CHUNK as u64);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let size = (n - c * CHUNK as u64).min(CHUNK as u64);
            let mut m = Moments::default();
            for _ in 0..size {
                m.push(f(&random_rotation(&mut rng)));
            }
            m
        })
        .reduce(Moments::default, Moments::merge))
}

/// Average Bloch vector the receiver prepares for input `ψ̂`.
pub fn simulate_average_bloch(psi: BlochVector, c: &Codebook, n: u64, seed: u64) -> Result<AverageBloch> {
    let psi = psi.validate_unit()?;
    let m = accumulate(n, seed, |r| {
        let v = r.apply(c.vectors[alice_index(psi, r, c)]);
        [v.x, v.y, v.z]
    })?;
    let (mean, std_errors) = m.finish(n);
    Ok(AverageBloch { mean: BlochVector::new(mean[0], mean[1], mean[2]), std_errors, samples: n })
}

/// Average state the receiver prepares for pure input `ψ`.
pub fn simulate_average_state(psi: &DensityMatrix, c: &Codebook, n: u64, seed: u64) -> Result<DensityMatrix> {
    let b = density_to_bloch(psi)?;
    if (b.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState("input state must be pure".into()));
    }
    bloch_to_density(simulate_average_bloch(b.normalized(), c, n, seed)?.mean)
}

/// Monte Carlo estimate of `η` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaEstimate {
    pub eta: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Mean of `max_i ẑ · Rω̂_i` over random rotations.
pub fn estimate_eta(c: &Codebook, n: u64, seed: u64) -> Result<EtaEstimate> {
    let z = BlochVector::new(0.0, 0.0, 1.0);
    let m = accumulate(n, seed, |r| [z.dot(r.apply(c.vectors[alice_index(z, r, c)])), 0.0, 0.0])?;
    let (mean, se) = m.finish(n);
    Ok(EtaEstimate { eta: mean[0], std_error: se[0], samples: n, seed })
}

/// `¼(1 − cos 2θ)/(1 − cos θ)`, the cap-model value; `θ = 0` returns the limit 1.
pub fn eta_cap(theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::OutOfRange(format!("cap angle {theta} outside [0, π]")));
    }
    if theta == 0.0 {
        return Ok(1.0);
    }
    // 1 − cos 2θ = 2 sin²θ and 1 − cos θ = 2 sin²(θ/2) avoid cancellation near 0.
    Ok(0.25 * (theta.sin() / (0.5 * theta).sin()).powi(2))
}

/// Values quoted for one, two and three bits.
pub fn reference_eta(m: u32) -> Option<f64> {
    match m {
        1 => Some(0.5),
        2 => Some((3.0 + 3f64.sqrt()) / 6.0),
        3 => Some((3.0 + 6f64.sqrt()) / 6.0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::catalog::ket_z;
    use crate::qmath::random::unit_bloch;
    use crate::qmath::{sigma_x, sigma_y, sigma_z, ComplexMatrix, C64};

    /// Exact `E[max_i ω̂_i · u]` for the named codebooks.
    fn exact_eta(name: &str) -> f64 {
        match name {
            "antipodal" => 0.5,
            "tetrahedron" => 3.0 / (2.0 * PI) * (2.0f64 / 3.0).sqrt() * (-1.0f64 / 3.0).acos(),
            "cube" => 3f64.sqrt() / 2.0,
            _ => unreachable!(),
        }
    }

    /// Midpoint quadrature of `E[max_i ω̂_i · u]` for uniform `u`.
    fn quadrature_eta(c: &Codebook, n: usize) -> f64 {
        let mut total = 0.0;
        for i in 0..n {
            let z = -1.0 + (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).sqrt();
            for j in 0..n {
                let a = 2.0 * PI * (j as f64 + 0.5) / n as f64;
                let u = BlochVector::new(r * a.cos(), r * a.sin(), z);
                total += c.vectors().iter().map(|w| w.dot(u)).fold(f64::NEG_INFINITY, f64::max);
            }
        }
        total / (n * n) as f64
    }

    fn unitary(q: [f64; 4]) -> ComplexMatrix {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let [w, x, y, z] = q.map(|v| v / n);
        let gen = &(&sigma_x().scale(x) + &sigma_y().scale(y)) + &sigma_z().scale(z);
        let minus_i = ComplexMatrix::from_inner(gen.inner() * C64::new(0.0, -1.0));
        &ComplexMatrix::identity(2).scale(w) + &minus_i
    }

    #[test]
    fn named_codebooks() {
        assert_eq!(Codebook::antipodal().vectors(), &[BlochVector::new(0.0, 0.0, 1.0), BlochVector::new(0.0, 0.0, -1.0)]);
        let t = Codebook::tetrahedron();
        for i in 0..4 {
            for j in 0..i {
                assert!((t.vectors()[i].dot(t.vectors()[j]) + 1.0 / 3.0).abs() < 1e-15);
            }
        }
        let c = Codebook::cube();
        assert_eq!(c.len(), 8);
        for v in c.vectors() {
            assert!((v.x.abs() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
            assert!((v.x.abs() - v.y.abs()).abs() < 1e-15 && (v.y.abs() - v.z.abs()).abs() < 1e-15);
        }
        assert_eq!(Codebook::named("fibonacci5").unwrap().len(), 32);
        assert!(matches!(Codebook::named("octahedron"), Err(Error::UnknownName(_))));
        assert!(Codebook::new(vec![BlochVector::new(0.0, 0.0, 1.0); 2]).is_err());
        assert!(Codebook::new(vec![BlochVector::new(0.0, 0.0, 0.5)]).is_err());
    }

    #[test]
    fn quadrature_confirms_exact_values() {
        for name in ["antipodal", "tetrahedron", "cube"] {
            let q = quadrature_eta(&Codebook::named(name).unwrap(), 1500);
            assert!((q - exact_eta(name)).abs() < 2e-4, "{name}: {q}");
        }
    }

    #[test]
    fn rotations_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let r = random_rotation(&mut rng);
            Rotation::new(r.matrix()).unwrap();
        }
        assert_eq!(sample_rotation(9), sample_rotation(9));
        assert!(Rotation::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]).is_err());
    }

    #[test]
    fn quaternion_matches_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let r = Rotation::from_quaternion(q);
            let u = unitary(q);
            let n = unit_bloch(&mut rng);
            let rho = bloch_to_density(n).unwrap();
            let rotated = DensityMatrix::new(rho.matrix().sandwich(&u)).unwrap();
            let got = density_to_bloch(&rotated).unwrap();
            assert!(got.sub(r.apply(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn rotated_axis_is_isotropic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let z = BlochVector::new(0.0, 0.0, 1.0);
        let mut mean = BlochVector::new(0.0, 0.0, 0.0);
        let mut heights = Vec::with_capacity(n);
        for _ in 0..n {
            let v = random_rotation(&mut rng).apply(z);
            mean = mean.add(v);
            heights.push(v.z);
        }
        let mean = mean.scale(1.0 / n as f64);
        assert!(mean.x.abs() < 0.01 && mean.y.abs() < 0.01 && mean.z.abs() < 0.01);
        heights.sort_by(f64::total_cmp);
        let ks = heights
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let f = (h + 1.0) / 2.0;
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS statistic {ks}");
    }

    #[test]
    fn alice_index_contracts() {
        let c = Codebook::antipodal();
        assert_eq!(alice_index(BlochVector::new(0.0, 0.0, 1.0), &Rotation::identity(), &c), 0);
        assert_eq!(alice_index(BlochVector::new(0.0, 0.0, -1.0), &Rotation::identity(), &c), 1);
        assert_eq!(alice_index(BlochVector::new(1.0, 0.0, 0.0), &Rotation::identity(), &c), 0);
        let two = Codebook::new(vec![BlochVector::new(1.0, 0.0, 0.0), BlochVector::new(0.0, 1.0, 0.0)]).unwrap();
        let mid = BlochVector::new(1.0, 1.0, 0.0).normalized();
        assert_eq!(alice_index(mid, &Rotation::identity(), &two), 0);
    }

    #[test]
    fn alice_index_matches_trace_overlaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = Codebook::cube();
        for _ in 0..1000 {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let psi = unit_bloch(&mut rng);
            let u = unitary(q);
            let p_psi = bloch_to_density(psi).unwrap();
            let overlaps: Vec<f64> = c
                .vectors()
                .iter()
                .map(|w| bloch_to_density(*w).unwrap().matrix().sandwich(&u).trace_product(p_psi.matrix()).re)
                .collect();
            let best = (0..overlaps.len()).fold(0, |b, i| if overlaps[i] > overlaps[b] { i } else { b });
            assert_eq!(alice_index(psi, &Rotation::from_quaternion(q), &c), best);
        }
    }

    #[test]
    fn estimates_match_exact_values() {
        for name in ["antipodal", "tetrahedron", "cube"] {
            let e = estimate_eta(&Codebook::named(name).unwrap(), 200_000, 11).unwrap();
            assert!((e.eta - exact_eta(name)).abs() < 4.0 * e.std_error, "{name}: {e:?}");
        }
        let single = Codebook::new(vec![BlochVector::new(0.0, 0.0, 1.0)]).unwrap();
        let e = estimate_eta(&single, 200_000, 12).unwrap();
        assert!(e.eta.abs() < 3.0 * e.std_error);
    }

    #[test]
    fn estimate_is_reproducible_and_validates() {
        let c = Codebook::tetrahedron();
        assert_eq!(estimate_eta(&c, 70_000, 5).unwrap(), estimate_eta(&c, 70_000, 5).unwrap());
        assert!(estimate_eta(&c, 0, 5).is_err());
    }

    #[test]
    fn average_state_points_along_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for name in ["antipodal", "tetrahedron", "cube"] {
            let c = Codebook::named(name).unwrap();
            let psi = unit_bloch(&mut rng);
            let a = simulate_average_bloch(psi, &c, 100_000, 7).unwrap();
            let along = a.mean.dot(psi);
            let perp = a.mean.sub(psi.scale(along));
            let se = a.std_errors.iter().cloned().fold(0.0, f64::max);
            assert!(perp.norm() < 5.0 * se * 3f64.sqrt(), "{name}: {a:?}");
            assert!((along - exact_eta(name)).abs() < 5.0 * se * 3f64.sqrt());
        }
        let rho = simulate_average_state(&DensityMatrix::from_pure(&ket_z()), &Codebook::antipodal(), 100_000, 8).unwrap();
        let b = density_to_bloch(&rho).unwrap();
        assert!((b.z - 0.5).abs() < 0.01);
        assert!(simulate_average_state(&DensityMatrix::maximally_mixed(2), &Codebook::antipodal(), 10, 8).is_err());
    }

    #[test]
    fn eta_independent_of_input_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = Codebook::tetrahedron();
        let runs: Vec<(f64, f64)> = (0..5)
            .map(|k| {
                let psi = unit_bloch(&mut rng);
                let a = simulate_average_bloch(psi, &c, 100_000, 100 + k).unwrap();
                let se = (a.std_errors.iter().map(|s| s * s).sum::<f64>()).sqrt();
                (a.mean.dot(psi), se)
            })
            .collect();
        for (i, a) in runs.iter().enumerate() {
            for b in &runs[..i] {
                assert!((a.0 - b.0).abs() < 4.0 * (a.1 * a.1 + b.1 * b.1).sqrt());
            }
        }
    }

    #[test]
    fn fibonacci_family_refines() {
        let etas: Vec<EtaEstimate> = (1..=7).map(|m| estimate_eta(&Codebook::fibonacci(m).unwrap(), 100_000, 20).unwrap()).collect();
        for w in etas.windows(2) {
            assert!(w[1].eta + 3.0 * w[1].std_error >= w[0].eta - 3.0 * w[0].std_error);
        }
        let cube = estimate_eta(&Codebook::cube(), 100_000, 21).unwrap();
        let fib6 = estimate_eta(&Codebook::fibonacci(6).unwrap(), 100_000, 22).unwrap();
        assert!(fib6.eta > cube.eta);
        assert!(1.0 - etas[6].eta < 0.05);
    }

    #[test]
    fn cap_formula() {
        assert!((eta_cap(PI / 2.0).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(eta_cap(0.0).unwrap(), 1.0);
        assert!((eta_cap(1e-6).unwrap() - 1.0).abs() < 1e-9);
        assert!(eta_cap(PI).unwrap().abs() < 1e-14);
        assert!(eta_cap(-0.1).is_err());
        for k in 1..=1000 {
            let t = PI * k as f64 / 1000.0;
            assert!((eta_cap(t).unwrap() - 0.5 * (1.0 + t.cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn quoted_values_equal_cap_at_inscribed_radius() {
        let t2 = (1.0 / 3f64.sqrt()).acos();
        let t3 = (2.0f64 / 3.0).sqrt().acos();
        assert!((eta_cap(t2).unwrap() - reference_eta(2).unwrap()).abs() < 1e-14);
        assert!((eta_cap(t3).unwrap() - reference_eta(3).unwrap()).abs() < 1e-14);
    }
}
