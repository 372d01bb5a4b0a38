//! Named states and measurements: the computational, twisted,
//! twisted-butterfly, singlet and Shift measurements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::measure::{product_povm, Povm, ProductRank1Effect};
use super::state::{Effect, PureState};
use crate::error::{Error, Result};

/// Weight of the non-trivial twisted-butterfly effects.
pub const KAPPA: f64 = 0.75;

pub fn ket_z() -> PureState {
    PureState::basis(2, 0)
}

pub fn ket_z_perp() -> PureState {
    PureState::basis(2, 1)
}

pub fn ket_x() -> PureState {
    PureState::from_real(&[1.0, 1.0]).unwrap()
}

pub fn ket_x_perp() -> PureState {
    PureState::from_real(&[1.0, -1.0]).unwrap()
}

/// `|α⟩ = √(2/3)|1⟩ + (1/√3)|0⟩`.
pub fn ket_alpha() -> PureState {
    PureState::from_real(&[(1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt()]).unwrap()
}

pub fn ket_alpha_perp() -> PureState {
    ket_alpha().qubit_perp().unwrap()
}

/// `|β⟩ = √(2/3)|0⟩ + (1/√3)|1⟩`.
pub fn ket_beta() -> PureState {
    PureState::from_real(&[(2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()]).unwrap()
}

pub fn ket_beta_perp() -> PureState {
    ket_beta().qubit_perp().unwrap()
}

/// Catalog of named measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CatalogName {
    #[serde(rename = "comp")]
    Comp,
    #[serde(rename = "twistA")]
    TwistA,
    #[serde(rename = "twistB")]
    TwistB,
    #[serde(rename = "tb")]
    Tb,
    #[serde(rename = "singlet")]
    Singlet,
    #[serde(rename = "shift")]
    Shift,
}

impl CatalogName {
    pub const ALL: [CatalogName; 6] = [
        CatalogName::Comp,
        CatalogName::TwistA,
        CatalogName::TwistB,
        CatalogName::Tb,
        CatalogName::Singlet,
        CatalogName::Shift,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogName::Comp => "comp",
            CatalogName::TwistA => "twistA",
            CatalogName::TwistB => "twistB",
            CatalogName::Tb => "tb",
            CatalogName::Singlet => "singlet",
            CatalogName::Shift => "shift",
        }
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CatalogName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CatalogName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

fn pe(weight: f64, factors: &[PureState]) -> ProductRank1Effect {
    ProductRank1Effect::new(weight, factors.to_vec()).expect("catalog weights are valid")
}

/// Product form of a catalog measurement; the singlet measurement has none.
pub fn catalog_product(name: CatalogName) -> Result<Vec<ProductRank1Effect>> {
    let (z, zp, x, xp) = (ket_z(), ket_z_perp(), ket_x(), ket_x_perp());
    Ok(match name {
        CatalogName::Comp => vec![
            pe(1.0, &[z.clone(), z.clone()]),
            pe(1.0, &[z.clone(), zp.clone()]),
            pe(1.0, &[zp.clone(), z]),
            pe(1.0, &[zp.clone(), zp]),
        ],
        CatalogName::TwistB => vec![
            pe(1.0, &[z.clone(), z.clone()]),
            pe(1.0, &[z, zp.clone()]),
            pe(1.0, &[zp.clone(), x]),
            pe(1.0, &[zp, xp]),
        ],
        CatalogName::TwistA => vec![
            pe(1.0, &[z.clone(), z.clone()]),
            pe(1.0, &[zp.clone(), z]),
            pe(1.0, &[x, zp.clone()]),
            pe(1.0, &[xp, zp]),
        ],
        CatalogName::Tb => vec![
            pe(1.0, &[z.clone(), zp.clone()]),
            pe(KAPPA, &[ket_alpha_perp(), z.clone()]),
            pe(KAPPA, &[zp.clone(), ket_alpha()]),
            pe(KAPPA, &[ket_beta(), z]),
            pe(KAPPA, &[zp, ket_beta_perp()]),
        ],
        CatalogName::Shift => {
            let b = |bits: [&PureState; 3]| pe(1.0, &[bits[0].clone(), bits[1].clone(), bits[2].clone()]);
            let (k0, k1) = (ket_z(), ket_z_perp());
            vec![
                b([&k0, &k0, &k0]),
                b([&k1, &k1, &k1]),
                b([&x, &k0, &k1]),
                b([&xp, &k0, &k1]),
                b([&k0, &k1, &x]),
                b([&k0, &k1, &xp]),
                b([&k1, &x, &k0]),
                b([&k1, &xp, &k0]),
            ]
        }
        CatalogName::Singlet => {
            return Err(Error::NonProduct("the singlet projector is entangled".into()))
        }
    })
}

/// Outcome labels of a catalog measurement.
pub fn catalog_labels(name: CatalogName) -> Vec<String> {
    let l: &[&str] = match name {
        CatalogName::Comp => &["z,z", "z,z_perp", "z_perp,z", "z_perp,z_perp"],
        CatalogName::TwistB => &["z,z", "z,z_perp", "z_perp,x", "z_perp,x_perp"],
        CatalogName::TwistA => &["z,z", "z_perp,z", "x,z_perp", "x_perp,z_perp"],
        CatalogName::Tb => &["Pi1", "Pi21", "Pi22", "Pi31", "Pi32"],
        CatalogName::Singlet => &["singlet", "not_singlet"],
        CatalogName::Shift => &["000", "111", "+01", "-01", "01+", "01-", "1+0", "1-0"],
    };
    l.iter().map(|s| s.to_string()).collect()
}

/// Singlet state `(|01⟩ − |10⟩)/√2`.
pub fn singlet_state() -> PureState {
    PureState::from_real(&[0.0, 1.0, -1.0, 0.0]).unwrap()
}

pub fn singlet_povm() -> Povm {
    let p = singlet_state().projector();
    let rest = &ComplexMatrix::identity(4) - &p;
    Povm::with_labels(
        vec![Effect::new(p).unwrap(), Effect::new(rest).unwrap()],
        catalog_labels(CatalogName::Singlet),
    )
    .unwrap()
}

/// Named measurement as a full POVM.
pub fn catalog_measurement(name: &str) -> Result<Povm> {
    let name: CatalogName = name.parse()?;
    if name == CatalogName::Singlet {
        return Ok(singlet_povm());
    }
    let product = catalog_product(name)?;
    let povm = product_povm(&product)?;
    Povm::with_labels(povm.effects().to_vec(), catalog_labels(name))
}

/// Grouping of the twisted-butterfly outcomes into `{Π₁}, {Π₂₁, Π₂₂}, {Π₃₁, Π₃₂}`.
pub fn tb_grouping() -> Vec<Vec<ProductRank1Effect>> {
    let e = catalog_product(CatalogName::Tb).unwrap();
    vec![vec![e[0].clone()], vec![e[1].clone(), e[2].clone()], vec![e[3].clone(), e[4].clone()]]
}

/// The three two-qubit states perfectly distinguished by the
/// twisted-butterfly measurement.
pub fn s3_states() -> [PureState; 3] {
    let r2 = std::f64::consts::SQRT_2;
    [
        PureState::basis(4, 1),
        PureState::from_real(&[0.5, 0.0, -r2 / 2.0, -0.5]).unwrap(),
        PureState::from_real(&[0.5, 0.0, r2 / 2.0, -0.5]).unwrap(),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct S3Row {
    pub effect: String,
    pub state: usize,
    pub value: f64,
    pub expected: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct S3Report {
    pub rows: Vec<S3Row>,
    pub max_deviation: f64,
}

/// Evaluates `Tr[Π₁ P_{ψ_j}]` and `Tr[(Π_{i1}+Π_{i2}) P_{ψ_j}]` on the three
/// distinguished states; every value must be a Kronecker delta.
pub fn verify_s3_identities() -> S3Report {
    let groups = tb_grouping();
    let names = ["Pi1", "Pi21+Pi22", "Pi31+Pi32"];
    let states = s3_states();
    let mut rows = Vec::new();
    for (i, group) in groups.iter().enumerate() {
        let mut op = ComplexMatrix::zeros(4);
        for e in group {
            op = &op + &e.matrix();
        }
        for (j, s) in states.iter().enumerate() {
            rows.push(S3Row {
                effect: names[i].to_string(),
                state: j + 1,
                value: s.expectation(&op),
                expected: if i == j { 1.0 } else { 0.0 },
            });
        }
    }
    let max_deviation = rows.iter().map(|r| (r.value - r.expected).abs()).fold(0.0, f64::max);
    S3Report { rows, max_deviation }
}
