//! The 2↦1 random access code and its reduction to simulating the twisted
//! measurement with the sender's factor measured last.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use super::{Encoder, OneRoundProtocol, SharedRandomness, Simulator};
use crate::error::{Error, Result};
use crate::qmath::catalog::{ket_z, ket_z_perp};
use crate::qmath::{bloch_to_density, BlochVector, DensityMatrix, Effect, Povm};

/// Instance `(x₀x₁, y)`: two bits and the index of the bit asked for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RacInstance {
    pub x0: u8,
    pub x1: u8,
    pub y: u8,
}

impl RacInstance {
    pub fn all() -> Vec<RacInstance> {
        let mut v = Vec::with_capacity(8);
        for x0 in 0..2 {
            for x1 in 0..2 {
                for y in 0..2 {
                    v.push(RacInstance { x0, x1, y });
                }
            }
        }
        v
    }

    pub fn target(&self) -> u8 {
        if self.y == 0 {
            self.x0
        } else {
            self.x1
        }
    }

    fn word(&self) -> usize {
        (2 * self.x0 + self.x1) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RacClassical {
    /// Correct answers of the best strategy out of `instances`.
    pub best_correct: u32,
    pub instances: u32,
    pub best_success: f64,
    /// `(encoding, decoding)` truth tables attaining the maximum. Bit `w` of
    /// the encoding is the message for word `2x₀ + x₁`; bit `2y + m` of the
    /// decoding is the guess.
    pub argmax: Vec<(u8, u8)>,
}

/// Success count of a deterministic one-bit strategy over the eight
/// instances.
pub fn rac_classical_count(encoding: u8, decoding: u8) -> u32 {
    RacInstance::all()
        .iter()
        .filter(|i| {
            let m = (encoding >> i.word()) & 1;
            let guess = (decoding >> (2 * i.y + m)) & 1;
            guess == i.target()
        })
        .count() as u32
}

/// Exhausts the 16 × 16 deterministic one-bit strategies.
pub fn rac_classical_exhaustive() -> RacClassical {
    let mut best = 0;
    let mut argmax = Vec::new();
    for e in 0u8..16 {
        for d in 0u8..16 {
            let c = rac_classical_count(e, d);
            if c > best {
                best = c;
                argmax.clear();
            }
            if c == best {
                argmax.push((e, d));
            }
        }
    }
    RacClassical { best_correct: best, instances: 8, best_success: best as f64 / 8.0, argmax }
}

/// Preparation `½[I + a((−1)^{x₀}σ_z + (−1)^{x₁}σ_x)]`; `a = 1/√2` is optimal.
pub fn rac_preparation(x0: u8, x1: u8, amplitude: f64) -> Result<DensityMatrix> {
    let sx = if x1 == 0 { 1.0 } else { -1.0 };
    let sz = if x0 == 0 { 1.0 } else { -1.0 };
    bloch_to_density(BlochVector::new(amplitude * sx, 0.0, amplitude * sz))
}

/// Per-instance success of the qubit strategy with preparation amplitude `a`
/// and measurements `σ_z` (y = 0) and `σ_x` (y = 1).
pub fn rac_qubit_instances(amplitude: f64) -> Result<Vec<(RacInstance, f64)>> {
    let x = crate::qmath::catalog::ket_x();
    let xp = crate::qmath::catalog::ket_x_perp();
    RacInstance::all()
        .into_iter()
        .map(|i| {
            let rho = rac_preparation(i.x0, i.x1, amplitude)?;
            let (k0, k1) = if i.y == 0 { (ket_z(), ket_z_perp()) } else { (x.clone(), xp.clone()) };
            let right = if i.target() == 0 { k0 } else { k1 };
            Ok((i, rho.overlap_with(&right)))
        })
        .collect()
}

pub fn rac_qubit_with_amplitude(amplitude: f64) -> Result<f64> {
    let v = rac_qubit_instances(amplitude)?;
    Ok(v.iter().map(|(_, p)| p).sum::<f64>() / v.len() as f64)
}

/// Average success of the optimal qubit strategy.
pub fn rac_qubit() -> f64 {
    rac_qubit_with_amplitude(std::f64::consts::FRAC_1_SQRT_2).expect("optimal preparations are states")
}

/// Receiver state for question `y`: `½[I + (−1)^y σ_z]`.
pub fn rac_probe(y: u8) -> DensityMatrix {
    DensityMatrix::from_pure(&if y == 0 { ket_z() } else { ket_z_perp() })
}

/// Coarse-graining of the twisted measurement's four outcomes into the
/// guessed bit: outcomes 0 and 2 answer 0, outcomes 1 and 3 answer 1.
pub const RAC_COARSE: [u8; 4] = [0, 1, 0, 1];

/// Runs the random access code through a simulator of the four-outcome
/// twisted measurement and returns the average success.
pub fn rac_via_simulator(sim: &dyn Simulator) -> Result<f64> {
    let mut total = 0.0;
    for i in RacInstance::all() {
        let psi = rac_preparation(i.x0, i.x1, std::f64::consts::FRAC_1_SQRT_2)?;
        let p = sim.distribution(&psi, &rac_probe(i.y))?;
        if p.len() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: p.len() });
        }
        total += p
            .iter()
            .zip(RAC_COARSE)
            .filter(|(_, b)| *b == i.target())
            .map(|(v, _)| v)
            .sum::<f64>();
    }
    Ok(total / 8.0)
}

/// Best one-bit protocol for the reduction, searched over deterministic
/// encoder tables on the four preparations with receiver effects chosen by
/// linear programming.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RacOneBitSearch {
    pub best_success: f64,
    /// Encoding table (bit `w` is the message for word `w`) of the best atom.
    pub best_encoding: u8,
    /// Best value achievable with `k` atoms, for `k = 1..=max_atoms`.
    pub by_atoms: Vec<f64>,
    /// Protocol realising the best value, evaluated through the reduction.
    pub protocol: OneRoundProtocol,
}

/// Only the diagonal of the receiver's effects is probed, so each decoder
/// is a diagonal four-outcome POVM `E_k = diag(e_{k0}, e_{k1})`. For a fixed
/// atom the value is linear in the decoders of the two messages, and mixing
/// atoms averages atom values, so the best mixture over any number of atoms
/// equals the best single atom.
pub fn rac_one_bit_search(max_atoms: usize) -> Result<RacOneBitSearch> {
    if max_atoms == 0 {
        return Err(Error::OutOfRange("need at least one atom".into()));
    }
    let mut best = (f64::NEG_INFINITY, 0u8, Vec::new());
    for enc in 0u8..16 {
        let (v, decoders) = best_decoders(enc)?;
        if v > best.0 + 1e-12 {
            best = (v, enc, decoders);
        }
    }
    let (value, enc, dec) = best;
    let states = (0..4u8)
        .map(|w| rac_preparation(w >> 1, w & 1, std::f64::consts::FRAC_1_SQRT_2))
        .collect::<Result<Vec<_>>>()?;
    let rows = (0..4).map(|w| if (enc >> w) & 1 == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] }).collect();
    let protocol = OneRoundProtocol::new(
        SharedRandomness::single(),
        vec![Encoder::Table { states, rows }],
        dec,
    )?;
    Ok(RacOneBitSearch { best_success: value, best_encoding: enc, by_atoms: vec![value; max_atoms], protocol })
}

/// LP over diagonal decoders `e[m][k][j] ≥ 0`, `Σ_k e[m][k][j] = 1`.
fn best_decoders(enc: u8) -> Result<(f64, Vec<Povm>)> {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let mut obj = [[[0.0f64; 2]; 4]; 2];
    for i in RacInstance::all() {
        let m = ((enc >> i.word()) & 1) as usize;
        for (k, &b) in RAC_COARSE.iter().enumerate() {
            if b == i.target() {
                obj[m][k][i.y as usize] += 1.0 / 8.0;
            }
        }
    }
    let mut vars = Vec::new();
    for m in 0..2 {
        for k in 0..4 {
            for j in 0..2 {
                vars.push(p.add_var(obj[m][k][j], (0.0, 1.0)));
            }
        }
    }
    let idx = |m: usize, k: usize, j: usize| m * 8 + k * 2 + j;
    for m in 0..2 {
        for j in 0..2 {
            let expr: Vec<_> = (0..4).map(|k| (vars[idx(m, k, j)], 1.0)).collect();
            p.add_constraint(expr, ComparisonOp::Eq, 1.0);
        }
    }
    let sol = p
        .solve()
        .map_err(|e| Error::OutOfRange(format!("decoder program failed: {e}")))?;
    let decoders = (0..2)
        .map(|m| {
            let effects = (0..4)
                .map(|k| {
                    let d = [*sol.var_value(vars[idx(m, k, 0)]), *sol.var_value(vars[idx(m, k, 1)])];
                    Effect::new(crate::qmath::ComplexMatrix::diag(&[d[0].clamp(0.0, 1.0), d[1].clamp(0.0, 1.0)]))
                })
                .collect::<Result<Vec<_>>>()?;
            Povm::new(effects)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sol.objective(), decoders))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::ExtremalFamily;
    use crate::protocols::{theorem4_protocol, BornOracle};
    use crate::qmath::catalog::{catalog_measurement, catalog_product, CatalogName};

    const QUBIT: f64 = 0.853_553_390_593_273_8;

    #[test]
    fn classical_maximum_is_three_quarters() {
        let r = rac_classical_exhaustive();
        assert_eq!((r.best_correct, r.instances), (6, 8));
        assert_eq!(r.best_success, 0.75);
        assert!(!r.argmax.is_empty());
    }

    #[test]
    fn send_first_bit_strategy() {
        // Message x₀ (words 2 and 3 send 1); always guess the message.
        let enc = 0b1100;
        let dec = 0b1010;
        assert_eq!(rac_classical_count(enc, dec), 6);
    }

    #[test]
    fn constant_strategy_is_coin_flip() {
        assert_eq!(rac_classical_count(0, 0), 4);
    }

    #[test]
    fn qubit_success() {
        assert!((rac_qubit() - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
        assert!((rac_qubit() - QUBIT).abs() < 1e-12);
    }

    #[test]
    fn qubit_success_is_uniform_over_instances() {
        for (_, p) in rac_qubit_instances(std::f64::consts::FRAC_1_SQRT_2).unwrap() {
            assert!((p - QUBIT).abs() < 1e-12);
        }
    }

    #[test]
    fn weaker_preparations_do_worse() {
        assert!((rac_qubit_with_amplitude(0.5).unwrap() - 0.75).abs() < 1e-12);
        assert!(rac_qubit_with_amplitude(1.0).is_err());
    }

    #[test]
    fn oracle_simulator_reaches_qubit_value() {
        let oracle = BornOracle { measurement: catalog_measurement("twistA").unwrap() };
        assert!((rac_via_simulator(&oracle).unwrap() - QUBIT).abs() < 1e-12);
    }

    #[test]
    fn two_bit_protocol_reaches_qubit_value() {
        let joint = catalog_product(CatalogName::TwistA).unwrap();
        let family = ExtremalFamily::for_joint(&joint).unwrap();
        let p = theorem4_protocol(&joint, &family).unwrap();
        assert_eq!(p.cost_bits, 2);
        assert!((rac_via_simulator(&p.protocol).unwrap() - QUBIT).abs() < 1e-10);
    }

    #[test]
    fn one_bit_search_stays_classical() {
        let s = rac_one_bit_search(8).unwrap();
        assert!(s.best_success <= 0.75 + 1e-9);
        assert!((s.best_success - 0.75).abs() < 1e-9);
        assert_eq!(s.by_atoms.len(), 8);
        assert_eq!(s.protocol.cost_bits(), 1);
        let via = rac_via_simulator(&s.protocol).unwrap();
        assert!((via - s.best_success).abs() < 1e-9);
    }

    #[test]
    fn wrong_outcome_count_rejected() {
        let oracle = BornOracle { measurement: catalog_measurement("comp").unwrap() };
        assert!(rac_via_simulator(&oracle).is_ok());
        let singlet = BornOracle { measurement: catalog_measurement("singlet").unwrap() };
        assert!(matches!(rac_via_simulator(&singlet), Err(Error::DimensionMismatch { .. })));
    }
}
