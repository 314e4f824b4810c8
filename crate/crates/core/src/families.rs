//! Named state families, their closed-form measures, and the analytic
//! boundary curves of the R₁₂–C₁₂ and R₁₂–N₁₂ diagrams.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{self, ComplexMatrix};
use crate::measures;
use crate::qstate::{DensityMatrix, PartialTrace, PureState};

/// Σλᵢ² must equal one to within this.
pub const PARAM_TOL: f64 = 1e-10;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The four Bell vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bell {
    PhiPlus,
    PsiPlus,
    PsiMinus,
    PhiMinus,
}

impl Bell {
    pub fn vector(self) -> Vec<Complex64> {
        let s = FRAC_1_SQRT_2;
        match self {
            Bell::PhiPlus => vec![c(s), c(0.0), c(0.0), c(s)],
            Bell::PsiPlus => vec![c(0.0), c(s), c(s), c(0.0)],
            Bell::PsiMinus => vec![c(0.0), c(s), c(-s), c(0.0)],
            Bell::PhiMinus => vec![c(s), c(0.0), c(0.0), c(-s)],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.vector())
    }
}

/// Canonical three-qubit amplitudes
/// λ₀|000⟩ + λ₁e^{iθ}|100⟩ + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub lambda: [f64; 5],
    pub theta: f64,
}

impl CanonicalParams {
    pub fn new(lambda: [f64; 5], theta: f64) -> Result<Self> {
        if lambda.iter().any(|&l| !(0.0..=1.0).contains(&l)) {
            return Err(Error::Domain(format!(
                "canonical coefficients must lie in [0, 1], got {lambda:?}"
            )));
        }
        let norm2: f64 = lambda.iter().map(|l| l * l).sum();
        if (norm2 - 1.0).abs() > PARAM_TOL {
            return Err(Error::Domain(format!(
                "sum of squared canonical coefficients is {norm2}, expected 1"
            )));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("theta must lie in [0, pi], got {theta}")));
        }
        Ok(Self { lambda, theta })
    }

    pub fn state(&self) -> PureState {
        let [l0, l1, l2, l3, l4] = self.lambda;
        let mut a = vec![c(0.0); 8];
        a[0] = c(l0);
        a[4] = Complex64::from_polar(l1, self.theta);
        a[5] = c(l2);
        a[6] = c(l3);
        a[7] = c(l4);
        PureState::normalized(&[2, 2, 2], a).expect("canonical amplitudes are normalised")
    }
}

/// A named family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Weights of φ⁺, ψ⁺, ψ⁻, φ⁻ in that order.
    BellDiagonal {
        p: [f64; 4],
    },
    Werner {
        p: f64,
        fiducial: Bell,
    },
    Mems1 {
        c: f64,
    },
    Mems2 {
        c: f64,
    },
    XState {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        w: (f64, f64),
        z: (f64, f64),
    },
    WClass {
        lambda: [f64; 4],
        theta: f64,
    },
    Canonical3 {
        params: CanonicalParams,
    },
    M3ts {
        c12: f64,
    },
    M3tsGeneral {
        c12: f64,
        c13: f64,
    },
    Ansatz1 {
        p: f64,
    },
    /// `beta = None` selects the branch that minimises N₁₂ at fixed R₁₂.
    Ansatz2 {
        alpha: f64,
        beta: Option<f64>,
    },
    Mems1Purification {
        c: f64,
    },
    /// p|0⟩⟨0| ⊗ ρ₀ + (1−p)|1⟩⟨1| ⊗ ρ₁ with Bloch vectors for ρ₀, ρ₁.
    CqState {
        p: f64,
        bloch0: [f64; 3],
        bloch1: [f64; 3],
    },
}

pub const FAMILY_TAGS: [&str; 13] = [
    "bell_diagonal",
    "werner",
    "mems1",
    "mems2",
    "x_state",
    "w_class",
    "canonical3",
    "m3ts",
    "m3ts_general",
    "ansatz1",
    "ansatz2",
    "mems1_purification",
    "cq_state",
];

struct Params {
    family: &'static str,
    values: BTreeMap<String, String>,
}

impl Params {
    fn parse(family: &'static str, text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("parameter `{item}` is not of the form key=value")))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Domain(format!("parameter `{}` given twice", k.trim())));
            }
        }
        Ok(Self { family, values })
    }

    fn check_known(&self, known: &[&str]) -> Result<()> {
        for k in self.values.keys() {
            if !known.contains(&k.as_str()) {
                return Err(Error::UnknownTag {
                    kind: "parameter",
                    tag: format!("{k} (family {})", self.family),
                });
            }
        }
        Ok(())
    }

    fn opt(&self, key: &str) -> Result<Option<f64>> {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Domain(format!("parameter {key}={v} is not a finite number")))
            })
            .transpose()
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.opt(key)?
            .ok_or_else(|| Error::Domain(format!("family {} needs parameter `{key}`", self.family)))
    }

    fn or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.opt(key)?.unwrap_or(default))
    }
}

fn in_range(name: &str, x: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo..=hi).contains(&x) {
        return Err(Error::Domain(format!("{name} = {x} must lie in [{lo}, {hi}]")));
    }
    Ok(())
}

fn dirichlet<const N: usize>(rng: &mut impl Rng) -> [f64; N] {
    let mut w = [0.0; N];
    for x in &mut w {
        *x = rng.sample(Exp1);
    }
    let s: f64 = w.iter().sum();
    w.map(|x| x / s)
}

fn sphere_orthant<const N: usize>(rng: &mut impl Rng) -> [f64; N] {
    let mut v = [0.0f64; N];
    for x in &mut v {
        let g: f64 = rng.sample(StandardNormal);
        *x = g.abs();
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / n)
}

fn ball(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        ];
        if v.iter().map(|x: &f64| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

fn bloch_state(r: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = r;
    ComplexMatrix::from_rows(&[
        vec![c((1.0 + z) / 2.0), Complex64::new(x / 2.0, -y / 2.0)],
        vec![Complex64::new(x / 2.0, y / 2.0), c((1.0 - z) / 2.0)],
    ])
    .expect("2x2")
}

/// β, γ on the negativity-minimising branch of ansatz-II.
pub fn ansatz2_branch(alpha: f64) -> (f64, f64) {
    let root = ((1.0 - alpha) * (1.0 - 3.0 * alpha)).max(0.0).sqrt();
    (0.5 * (1.0 - alpha + root), 0.5 * (1.0 - alpha - root))
}

impl FamilySpec {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilySpec::BellDiagonal { .. } => "bell_diagonal",
            FamilySpec::Werner { .. } => "werner",
            FamilySpec::Mems1 { .. } => "mems1",
            FamilySpec::Mems2 { .. } => "mems2",
            FamilySpec::XState { .. } => "x_state",
            FamilySpec::WClass { .. } => "w_class",
            FamilySpec::Canonical3 { .. } => "canonical3",
            FamilySpec::M3ts { .. } => "m3ts",
            FamilySpec::M3tsGeneral { .. } => "m3ts_general",
            FamilySpec::Ansatz1 { .. } => "ansatz1",
            FamilySpec::Ansatz2 { .. } => "ansatz2",
            FamilySpec::Mems1Purification { .. } => "mems1_purification",
            FamilySpec::CqState { .. } => "cq_state",
        }
    }

    /// Parses `k=v,k=v` parameters for the family `tag`.
    ///
    /// Parameter names: bell_diagonal `p1..p4`; werner `p` and optional
    /// `fiducial` (`phi_plus` or `psi_minus`); mems1, mems2 and
    /// mems1_purification `c`; x_state `a,b,c,d` and optional
    /// `w_re,w_im,z_re,z_im`; w_class `l0..l3,theta`; canonical3
    /// `l0..l4,theta`; m3ts `c12`; m3ts_general `c12,c13`; ansatz1 `p`;
    /// ansatz2 `alpha` and optional `beta`; cq_state `p` and optional Bloch
    /// components `r0x,r0y,r0z,r1x,r1y,r1z`.
    pub fn parse(tag: &str, params: &str) -> Result<Self> {
        let family = FAMILY_TAGS
            .iter()
            .copied()
            .find(|t| *t == tag)
            .ok_or_else(|| Error::UnknownTag {
                kind: "family",
                tag: tag.to_string(),
            })?;
        let p = Params::parse(family, params)?;
        let spec = match family {
            "bell_diagonal" => {
                p.check_known(&["p1", "p2", "p3", "p4"])?;
                FamilySpec::BellDiagonal {
                    p: [p.get("p1")?, p.get("p2")?, p.get("p3")?, p.get("p4")?],
                }
            }
            "werner" => {
                p.check_known(&["p", "fiducial"])?;
                let fiducial = match p.values.get("fiducial").map(String::as_str) {
                    None | Some("phi_plus") => Bell::PhiPlus,
                    Some("psi_minus") => Bell::PsiMinus,
                    Some(other) => {
                        return Err(Error::UnknownTag {
                            kind: "Werner fiducial",
                            tag: other.to_string(),
                        })
                    }
                };
                FamilySpec::Werner {
                    p: p.get("p")?,
                    fiducial,
                }
            }
            "mems1" => {
                p.check_known(&["c"])?;
                FamilySpec::Mems1 { c: p.get("c")? }
            }
            "mems2" => {
                p.check_known(&["c"])?;
                FamilySpec::Mems2 { c: p.get("c")? }
            }
            "x_state" => {
                p.check_known(&["a", "b", "c", "d", "w_re", "w_im", "z_re", "z_im"])?;
                FamilySpec::XState {
                    a: p.get("a")?,
                    b: p.get("b")?,
                    c: p.get("c")?,
                    d: p.get("d")?,
                    w: (p.or("w_re", 0.0)?, p.or("w_im", 0.0)?),
                    z: (p.or("z_re", 0.0)?, p.or("z_im", 0.0)?),
                }
            }
            "w_class" => {
                p.check_known(&["l0", "l1", "l2", "l3", "theta"])?;
                FamilySpec::WClass {
                    lambda: [p.get("l0")?, p.or("l1", 0.0)?, p.get("l2")?, p.get("l3")?],
                    theta: p.or("theta", 0.0)?,
                }
            }
            "canonical3" => {
                p.check_known(&["l0", "l1", "l2", "l3", "l4", "theta"])?;
                FamilySpec::Canonical3 {
                    params: CanonicalParams {
                        lambda: [
                            p.get("l0")?,
                            p.or("l1", 0.0)?,
                            p.or("l2", 0.0)?,
                            p.get("l3")?,
                            p.get("l4")?,
                        ],
                        theta: p.or("theta", 0.0)?,
                    },
                }
            }
            "m3ts" => {
                p.check_known(&["c12"])?;
                FamilySpec::M3ts { c12: p.get("c12")? }
            }
            "m3ts_general" => {
                p.check_known(&["c12", "c13"])?;
                FamilySpec::M3tsGeneral {
                    c12: p.get("c12")?,
                    c13: p.get("c13")?,
                }
            }
            "ansatz1" => {
                p.check_known(&["p"])?;
                FamilySpec::Ansatz1 { p: p.get("p")? }
            }
            "ansatz2" => {
                p.check_known(&["alpha", "beta"])?;
                FamilySpec::Ansatz2 {
                    alpha: p.get("alpha")?,
                    beta: p.opt("beta")?,
                }
            }
            "mems1_purification" => {
                p.check_known(&["c"])?;
                FamilySpec::Mems1Purification { c: p.get("c")? }
            }
            "cq_state" => {
                p.check_known(&["p", "r0x", "r0y", "r0z", "r1x", "r1y", "r1z"])?;
                FamilySpec::CqState {
                    p: p.get("p")?,
                    bloch0: [p.or("r0x", 0.0)?, p.or("r0y", 0.0)?, p.or("r0z", 0.0)?],
                    bloch1: [p.or("r1x", 0.0)?, p.or("r1y", 0.0)?, p.or("r1z", 0.0)?],
                }
            }
            _ => unreachable!("tag list and match are in sync"),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniform draw over the family's parameter domain.
    pub fn random(tag: &str, rng: &mut impl Rng) -> Result<Self> {
        let spec = match tag {
            "bell_diagonal" => FamilySpec::BellDiagonal { p: dirichlet::<4>(rng) },
            "werner" => FamilySpec::Werner {
                p: rng.random_range(0.0..=1.0),
                fiducial: if rng.random_bool(0.5) {
                    Bell::PhiPlus
                } else {
                    Bell::PsiMinus
                },
            },
            "mems1" => FamilySpec::Mems1 {
                c: rng.random_range(0.0..=1.0),
            },
            "mems2" => FamilySpec::Mems2 {
                c: rng.random_range(0.0..=2.0 / 3.0),
            },
            "x_state" => {
                let [a, b, c, d] = dirichlet::<4>(rng);
                let w = Complex64::from_polar(
                    (a * d).sqrt() * rng.random_range(0.0..=1.0),
                    rng.random_range(0.0..2.0 * PI),
                );
                let z = Complex64::from_polar(
                    (b * c).sqrt() * rng.random_range(0.0..=1.0),
                    rng.random_range(0.0..2.0 * PI),
                );
                FamilySpec::XState {
                    a,
                    b,
                    c,
                    d,
                    w: (w.re, w.im),
                    z: (z.re, z.im),
                }
            }
            "w_class" => FamilySpec::WClass {
                lambda: sphere_orthant::<4>(rng),
                theta: rng.random_range(0.0..=PI),
            },
            "canonical3" => FamilySpec::Canonical3 {
                params: CanonicalParams {
                    lambda: sphere_orthant::<5>(rng),
                    theta: rng.random_range(0.0..=PI),
                },
            },
            "m3ts" => FamilySpec::M3ts {
                c12: rng.random_range(0.0..=1.0),
            },
            "m3ts_general" => loop {
                let (c12, c13): (f64, f64) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
                if c12 * c12 + c13 * c13 <= 1.0 {
                    break FamilySpec::M3tsGeneral { c12, c13 };
                }
            },
            "ansatz1" => FamilySpec::Ansatz1 {
                p: rng.random_range(0.0..=1.0),
            },
            "ansatz2" => {
                let [alpha, beta, _] = dirichlet::<3>(rng);
                FamilySpec::Ansatz2 {
                    alpha,
                    beta: Some(beta),
                }
            }
            "mems1_purification" => FamilySpec::Mems1Purification {
                c: rng.random_range(0.0..=1.0),
            },
            "cq_state" => FamilySpec::CqState {
                p: rng.random_range(0.0..=1.0),
                bloch0: ball(rng),
                bloch1: ball(rng),
            },
            other => {
                return Err(Error::UnknownTag {
                    kind: "family",
                    tag: other.to_string(),
                })
            }
        };
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::BellDiagonal { p } => {
                for (i, &x) in p.iter().enumerate() {
                    in_range(&format!("p{}", i + 1), x, 0.0, 1.0)?;
                }
                let s: f64 = p.iter().sum();
                if (s - 1.0).abs() > PARAM_TOL {
                    return Err(Error::Domain(format!("Bell weights sum to {s}, expected 1")));
                }
            }
            FamilySpec::Werner { p, fiducial } => {
                in_range("p", p, 0.0, 1.0)?;
                if !matches!(fiducial, Bell::PhiPlus | Bell::PsiMinus) {
                    return Err(Error::Domain("Werner fiducial must be phi_plus or psi_minus".into()));
                }
            }
            FamilySpec::Mems1 { c } | FamilySpec::Mems1Purification { c } => in_range("c", c, 0.0, 1.0)?,
            FamilySpec::Mems2 { c } => in_range("c", c, 0.0, 2.0 / 3.0)?,
            FamilySpec::XState { a, b, c, d, .. } => {
                for (name, x) in [("a", a), ("b", b), ("c", c), ("d", d)] {
                    in_range(name, x, 0.0, 1.0)?;
                }
                if (a + b + c + d - 1.0).abs() > PARAM_TOL {
                    return Err(Error::Domain(format!("a+b+c+d = {}, expected 1", a + b + c + d)));
                }
                let min = matkernel::eig_hermitian(&self.x_matrix())?[0];
                if min < -PARAM_TOL {
                    return Err(Error::Domain(format!(
                        "X state is not positive (eigenvalue {min:e}); need sqrt(bc) >= |z| and sqrt(ad) >= |w|"
                    )));
                }
            }
            FamilySpec::WClass { lambda, theta } => {
                CanonicalParams::new([lambda[0], lambda[1], lambda[2], lambda[3], 0.0], theta)?;
            }
            FamilySpec::Canonical3 { params } => {
                CanonicalParams::new(params.lambda, params.theta)?;
            }
            FamilySpec::M3ts { c12 } => in_range("c12", c12, 0.0, 1.0)?,
            FamilySpec::M3tsGeneral { c12, c13 } => {
                in_range("c12", c12, 0.0, 1.0)?;
                in_range("c13", c13, 0.0, 1.0)?;
                if c12 * c12 + c13 * c13 > 1.0 + PARAM_TOL {
                    return Err(Error::Domain(format!(
                        "c12^2 + c13^2 = {} exceeds 1",
                        c12 * c12 + c13 * c13
                    )));
                }
            }
            FamilySpec::Ansatz1 { p } => in_range("p", p, 0.0, 1.0)?,
            FamilySpec::Ansatz2 { alpha, beta } => match beta {
                None => in_range("alpha", alpha, 0.0, 1.0 / 3.0)?,
                Some(beta) => {
                    in_range("alpha", alpha, 0.0, 1.0)?;
                    in_range("beta", beta, 0.0, 1.0)?;
                    in_range("gamma = 1 - alpha - beta", 1.0 - alpha - beta, -PARAM_TOL, 1.0)?;
                }
            },
            FamilySpec::CqState { p, bloch0, bloch1 } => {
                in_range("p", p, 0.0, 1.0)?;
                for (name, r) in [("r0", bloch0), ("r1", bloch1)] {
                    let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if n > 1.0 + PARAM_TOL {
                        return Err(Error::Domain(format!("Bloch vector {name} has length {n} > 1")));
                    }
                }
            }
        }
        Ok(())
    }

    fn x_matrix(&self) -> ComplexMatrix {
        let FamilySpec::XState { a, b, c: cc, d, w, z } = *self else {
            unreachable!("x_matrix on a non-X family")
        };
        let w = Complex64::new(w.0, w.1);
        let z = Complex64::new(z.0, z.1);
        let zero = c(0.0);
        ComplexMatrix::from_rows(&[
            vec![c(a), zero, zero, w],
            vec![zero, c(b), z, zero],
            vec![zero, z.conj(), c(cc), zero],
            vec![w.conj(), zero, zero, c(d)],
        ])
        .expect("4x4")
    }

    fn ansatz2_weights(alpha: f64, beta: Option<f64>) -> (f64, f64, f64) {
        match beta {
            Some(beta) => (alpha, beta, (1.0 - alpha - beta).max(0.0)),
            None => {
                let (beta, gamma) = ansatz2_branch(alpha);
                (alpha, beta, gamma)
            }
        }
    }
}

/// Output of [`make_state`].
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    /// Three-qubit pure state; measures refer to qubits 1 and 2.
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    /// The two-qubit state the pairwise measures are evaluated on.
    pub fn pair(&self) -> Result<DensityMatrix> {
        match self {
            State::Pure(psi) => psi.reduce(&[0, 1]),
            State::Mixed(rho) => Ok(rho.clone()),
        }
    }
}

fn mixed(weights: &[f64], bells: &[Bell]) -> DensityMatrix {
    let m = weights
        .iter()
        .zip(bells)
        .fold(ComplexMatrix::zeros(4, 4), |acc, (&w, b)| {
            &acc + &b.projector().scale(w)
        });
    DensityMatrix::new(&[2, 2], m).expect("Bell mixtures are states")
}

fn three_qubit(amps: [(usize, f64); 4]) -> PureState {
    let mut a = vec![c(0.0); 8];
    for (i, x) in amps {
        a[i] += c(x);
    }
    PureState::normalized(&[2, 2, 2], a).expect("nonzero amplitudes")
}

pub fn make_state(spec: &FamilySpec) -> Result<State> {
    spec.validate()?;
    let state = match *spec {
        FamilySpec::BellDiagonal { p } => State::Mixed(mixed(
            &p,
            &[Bell::PhiPlus, Bell::PsiPlus, Bell::PsiMinus, Bell::PhiMinus],
        )),
        FamilySpec::Werner { p, fiducial } => {
            let m = &fiducial.projector().scale(p) + &ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
            State::Mixed(DensityMatrix::new(&[2, 2], m)?)
        }
        FamilySpec::Mems1 { c: cc } => {
            let h = cc / 2.0;
            let m = ComplexMatrix::from_real(
                4,
                4,
                &[
                    h,
                    0.0,
                    0.0,
                    h,
                    0.0,
                    1.0 - cc,
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    h,
                    0.0,
                    0.0,
                    h,
                ],
            )?;
            State::Mixed(DensityMatrix::new(&[2, 2], m)?)
        }
        FamilySpec::Mems2 { c: cc } => {
            let t = 1.0 / 3.0;
            let h = cc / 2.0;
            let m = ComplexMatrix::from_real(
                4,
                4,
                &[t, 0.0, 0.0, h, 0.0, t, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, h, 0.0, 0.0, t],
            )?;
            State::Mixed(DensityMatrix::new(&[2, 2], m)?)
        }
        FamilySpec::XState { .. } => State::Mixed(DensityMatrix::new(&[2, 2], spec.x_matrix())?),
        FamilySpec::WClass { lambda, theta } => {
            State::Pure(CanonicalParams::new([lambda[0], lambda[1], lambda[2], lambda[3], 0.0], theta)?.state())
        }
        FamilySpec::Canonical3 { params } => State::Pure(CanonicalParams::new(params.lambda, params.theta)?.state()),
        FamilySpec::M3ts { c12 } => State::Pure(three_qubit([
            (0b000, FRAC_1_SQRT_2),
            (0b110, c12 * FRAC_1_SQRT_2),
            (0b111, (1.0 - c12 * c12).max(0.0).sqrt() * FRAC_1_SQRT_2),
            (0b101, 0.0),
        ])),
        FamilySpec::M3tsGeneral { c12, c13 } => State::Pure(three_qubit([
            (0b000, FRAC_1_SQRT_2),
            (0b101, c13 * FRAC_1_SQRT_2),
            (0b110, c12 * FRAC_1_SQRT_2),
            (0b111, (1.0 - c12 * c12 - c13 * c13).max(0.0).sqrt() * FRAC_1_SQRT_2),
        ])),
        FamilySpec::Ansatz1 { p } => State::Mixed(mixed(
            &[(1.0 - p) / 2.0, (1.0 - p) / 2.0, p],
            &[Bell::PsiPlus, Bell::PsiMinus, Bell::PhiPlus],
        )),
        FamilySpec::Ansatz2 { alpha, beta } => {
            let (alpha, beta, gamma) = FamilySpec::ansatz2_weights(alpha, beta);
            let mut ket01 = vec![c(0.0); 4];
            ket01[1] = c(1.0);
            let m = &(&ComplexMatrix::projector(&ket01).scale(alpha) + &Bell::PhiPlus.projector().scale(beta))
                + &Bell::PhiMinus.projector().scale(gamma);
            State::Mixed(DensityMatrix::new(&[2, 2], m)?)
        }
        FamilySpec::Mems1Purification { c: cc } => State::Pure(three_qubit([
            (0b000, (cc / 2.0).sqrt()),
            (0b101, (1.0 - cc).sqrt()),
            (0b110, (cc / 2.0).sqrt()),
            (0b111, 0.0),
        ])),
        FamilySpec::CqState { p, bloch0, bloch1 } => {
            let k0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
            let k1 = ComplexMatrix::diag_real(&[0.0, 1.0]);
            let m = &matkernel::kron(&k0, &bloch_state(bloch0)).scale(p)
                + &matkernel::kron(&k1, &bloch_state(bloch1)).scale(1.0 - p);
            State::Mixed(DensityMatrix::new(&[2, 2], m)?)
        }
    };
    Ok(state)
}

/// Pairwise and tripartite measures of a family member. Fields are `None`
/// where no value is defined (closed form) or applicable (numeric).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyMeasures {
    pub c12: Option<f64>,
    pub n12: Option<f64>,
    pub r12: Option<f64>,
    pub tau: Option<f64>,
    pub c13: Option<f64>,
    pub c23: Option<f64>,
    pub r13: Option<f64>,
    pub r23: Option<f64>,
}

impl FamilyMeasures {
    fn fields(&self) -> [(&'static str, Option<f64>); 8] {
        [
            ("c12", self.c12),
            ("n12", self.n12),
            ("r12", self.r12),
            ("tau", self.tau),
            ("c13", self.c13),
            ("c23", self.c23),
            ("r13", self.r13),
            ("r23", self.r23),
        ]
    }

    /// Largest |self − other| over fields defined in both; the field name is
    /// returned with it.
    pub fn max_difference(&self, other: &Self) -> (f64, Option<&'static str>) {
        let mut worst = (0.0, None);
        for ((name, a), (_, b)) in self.fields().into_iter().zip(other.fields()) {
            if let (Some(a), Some(b)) = (a, b) {
                let d = (a - b).abs();
                if d > worst.0 || worst.1.is_none() {
                    worst = (d, Some(name));
                }
            }
        }
        worst
    }

    pub fn defined(&self) -> Vec<(&'static str, f64)> {
        self.fields()
            .into_iter()
            .filter_map(|(n, v)| v.map(|v| (n, v)))
            .collect()
    }
}

/// Values predicted by the family's analytic formulas.
pub fn closed_form_measures(spec: &FamilySpec) -> Result<FamilyMeasures> {
    spec.validate()?;
    let m = match *spec {
        FamilySpec::BellDiagonal { p } => {
            let pmax = p.iter().copied().fold(0.0, f64::max);
            let cc = (2.0 * pmax - 1.0).max(0.0);
            let [_, p2, p3, p4] = p;
            let r = (8.0 * (p2 + p3 - 0.5) * (p2 + p4 - 0.5) * (p3 + p4 - 0.5))
                .abs()
                .powf(0.25);
            FamilyMeasures {
                c12: Some(cc),
                n12: Some(cc),
                r12: Some(r),
                ..Default::default()
            }
        }
        FamilySpec::Werner { p, .. } => {
            let cc = ((3.0 * p - 1.0) / 2.0).max(0.0);
            FamilyMeasures {
                c12: Some(cc),
                n12: Some(cc),
                r12: Some(p.powf(0.75)),
                ..Default::default()
            }
        }
        FamilySpec::Mems1 { c: cc } => FamilyMeasures {
            c12: Some(cc),
            n12: Some(nr_rank2_lower(cc)),
            r12: Some(cc),
            ..Default::default()
        },
        FamilySpec::Mems2 { c: cc } => FamilyMeasures {
            c12: Some(cc),
            n12: Some((1.0 / 9.0 + cc * cc).sqrt() - 1.0 / 3.0),
            r12: Some((2.0 * cc / 3.0).sqrt()),
            ..Default::default()
        },
        FamilySpec::XState { a, b, c: cc, d, w, z } => {
            let w = Complex64::new(w.0, w.1).norm();
            let z = Complex64::new(z.0, z.1).norm();
            let conc = 2.0 * (z - (a * d).sqrt()).max(w - (b * cc).sqrt()).max(0.0);
            let r = 2.0 * (a * d - b * cc).abs().powf(0.25) * (z * z - w * w).abs().powf(0.25);
            let mu_outer = (b + cc) / 2.0 - (((b - cc) / 2.0).powi(2) + w * w).sqrt();
            let mu_inner = (a + d) / 2.0 - (((a - d) / 2.0).powi(2) + z * z).sqrt();
            FamilyMeasures {
                c12: Some(conc),
                n12: Some((-2.0 * mu_outer.min(mu_inner)).max(0.0)),
                r12: Some(r),
                ..Default::default()
            }
        }
        FamilySpec::WClass { lambda, .. } => {
            let [l0, _, l2, l3] = lambda;
            FamilyMeasures {
                c12: Some(2.0 * l0 * l3),
                r12: Some(2.0 * l0 * l3),
                c13: Some(2.0 * l0 * l2),
                r13: Some(2.0 * l0 * l2),
                c23: Some(2.0 * l2 * l3),
                r23: Some(2.0 * l2 * l3),
                tau: Some(0.0),
                ..Default::default()
            }
        }
        FamilySpec::Canonical3 { params } => {
            let [l0, _, l2, l3, l4] = params.lambda;
            FamilyMeasures {
                c12: Some(2.0 * l0 * l3),
                r12: Some(2.0 * l0 * l3.sqrt() * (l3 * l3 + l4 * l4).powf(0.25)),
                c13: Some(2.0 * l0 * l2),
                r13: Some(2.0 * l0 * l2.sqrt() * (l2 * l2 + l4 * l4).powf(0.25)),
                tau: Some(4.0 * (l0 * l4).powi(2)),
                ..Default::default()
            }
        }
        FamilySpec::M3ts { c12 } => FamilyMeasures {
            c12: Some(c12),
            n12: Some(c12),
            r12: Some(c12.sqrt()),
            tau: Some(1.0 - c12 * c12),
            c13: Some(0.0),
            c23: Some(0.0),
            r13: Some(0.0),
            r23: Some(0.0),
        },
        FamilySpec::M3tsGeneral { c12, c13 } => {
            let r12 = c12.sqrt() * (1.0 - c13 * c13).powf(0.25);
            let r13 = c13.sqrt() * (1.0 - c12 * c12).powf(0.25);
            FamilyMeasures {
                c12: Some(c12),
                r12: Some(r12),
                c13: Some(c13),
                r13: Some(r13),
                c23: Some(c12 * c13),
                r23: Some(r12 * r13),
                tau: Some((1.0 - c12 * c12 - c13 * c13).max(0.0)),
                ..Default::default()
            }
        }
        FamilySpec::Ansatz1 { p } => {
            let cc = (2.0 * p - 1.0).max(0.0);
            FamilyMeasures {
                c12: Some(cc),
                n12: Some(cc),
                r12: Some(p.sqrt() * (2.0 * p - 1.0).abs().powf(0.25)),
                ..Default::default()
            }
        }
        FamilySpec::Ansatz2 { alpha, beta } => {
            let (alpha, beta, gamma) = FamilySpec::ansatz2_weights(alpha, beta);
            FamilyMeasures {
                r12: Some((beta * beta - gamma * gamma).abs().sqrt()),
                n12: Some((alpha * alpha + (beta - gamma).powi(2)).sqrt() - alpha),
                ..Default::default()
            }
        }
        FamilySpec::Mems1Purification { c: cc } => {
            let (l0, l2, l3) = ((cc / 2.0).sqrt(), (1.0 - cc).sqrt(), (cc / 2.0).sqrt());
            FamilyMeasures {
                c12: Some(cc),
                n12: Some(nr_rank2_lower(cc)),
                r12: Some(cc),
                c13: Some(2.0 * l0 * l2),
                r13: Some(2.0 * l0 * l2),
                c23: Some(2.0 * l2 * l3),
                r23: Some(2.0 * l2 * l3),
                tau: Some(0.0),
            }
        }
        FamilySpec::CqState { .. } => FamilyMeasures {
            c12: Some(0.0),
            n12: Some(0.0),
            r12: Some(0.0),
            ..Default::default()
        },
    };
    Ok(m)
}

/// Measures evaluated numerically on [`make_state`]. Pairwise measures
/// between qubits 1–3 and 2–3 and τ are filled in for three-qubit states.
pub fn numeric_measures(state: &State) -> Result<FamilyMeasures> {
    let rho12 = state.pair()?;
    let mut m = FamilyMeasures {
        c12: Some(measures::concurrence(&rho12)?),
        n12: Some(measures::negativity(&rho12)?),
        r12: Some(measures::r12(&rho12)?),
        ..Default::default()
    };
    if let State::Pure(psi) = state {
        let rho13 = psi.reduce(&[0, 2])?;
        let rho23 = psi.reduce(&[1, 2])?;
        m.tau = Some(measures::three_tangle(psi)?);
        m.c13 = Some(measures::concurrence(&rho13)?);
        m.r13 = Some(measures::r12(&rho13)?);
        m.c23 = Some(measures::concurrence(&rho23)?);
        m.r23 = Some(measures::r12(&rho23)?);
    }
    Ok(m)
}

/// N on the MEMS-I (rank-2 lower) curve at abscissa x.
fn nr_rank2_lower(x: f64) -> f64 {
    ((1.0 - x).powi(2) + x * x).sqrt() - (1.0 - x)
}

/// The analytic boundary curves. Each is returned as (R₁₂, y) pairs where y
/// is C₁₂ for `Cr*` curves and N₁₂ for `Nr*` curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curve {
    /// C = R.
    CrRank2Upper,
    /// C = R².
    CrRank2Lower,
    /// R = C^{1/4} √((1+C)/2), parametrised by C.
    CrRank3,
    /// C = max{0, (3R^{4/3} − 1)/2}.
    CrRank4,
    /// N = R.
    NrRank2Upper,
    /// N = √((1−R)² + R²) − (1−R).
    NrRank2Lower,
    /// R = N^{1/4} ((2+N)/3)^{3/4}, parametrised by N.
    NrRank3,
    /// N = max{0, (3R^{4/3} − 1)/2}.
    NrRank4,
}

pub const CURVE_TAGS: [&str; 8] = [
    "cr_rank2_upper",
    "cr_rank2_lower",
    "cr_rank3",
    "cr_rank4",
    "nr_rank2_upper",
    "nr_rank2_lower",
    "nr_rank3",
    "nr_rank4",
];

impl Curve {
    pub const ALL: [Curve; 8] = [
        Curve::CrRank2Upper,
        Curve::CrRank2Lower,
        Curve::CrRank3,
        Curve::CrRank4,
        Curve::NrRank2Upper,
        Curve::NrRank2Lower,
        Curve::NrRank3,
        Curve::NrRank4,
    ];

    pub fn tag(self) -> &'static str {
        CURVE_TAGS[Self::ALL.iter().position(|&c| c == self).expect("listed")]
    }

    pub fn parse(tag: &str) -> Result<Self> {
        CURVE_TAGS
            .iter()
            .position(|&t| t == tag)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| Error::UnknownTag {
                kind: "curve",
                tag: tag.to_string(),
            })
    }

    /// Whether the ordinate is negativity rather than concurrence.
    pub fn is_negativity(self) -> bool {
        matches!(
            self,
            Curve::NrRank2Upper | Curve::NrRank2Lower | Curve::NrRank3 | Curve::NrRank4
        )
    }

    /// Name of the grid variable: `c12` or `n12` for the rank-3 curves,
    /// `r12` otherwise.
    pub fn parameter(self) -> &'static str {
        match self {
            Curve::CrRank3 => "c12",
            Curve::NrRank3 => "n12",
            _ => "r12",
        }
    }

    /// Grid range where the curve is informative. For the rank-4 curves this
    /// starts at (1/3)^{3/4}, below which the ordinate is identically zero.
    pub fn default_domain(self) -> (f64, f64) {
        match self {
            Curve::CrRank4 | Curve::NrRank4 => (measures::separable_r12_max(), 1.0),
            _ => (0.0, 1.0),
        }
    }

    /// Evaluates the curve at one grid value.
    pub fn point(self, x: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!(
                "curve {} is defined for {} in [0, 1], got {x}",
                self.tag(),
                self.parameter()
            )));
        }
        let werner = |r: f64| ((3.0 * r.powf(4.0 / 3.0) - 1.0) / 2.0).max(0.0);
        Ok(match self {
            Curve::CrRank2Upper | Curve::NrRank2Upper => (x, x),
            Curve::CrRank2Lower => (x, x * x),
            Curve::CrRank3 => (x.powf(0.25) * ((1.0 + x) / 2.0).sqrt(), x),
            Curve::CrRank4 | Curve::NrRank4 => (x, werner(x)),
            Curve::NrRank2Lower => (x, nr_rank2_lower(x)),
            Curve::NrRank3 => (x.powf(0.25) * ((2.0 + x) / 3.0).powf(0.75), x),
        })
    }
}

/// Evaluates `curve` on every grid value.
pub fn boundary_curve(curve: Curve, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter().map(|&x| curve.point(x)).collect()
}

/// `points` equally spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::StreamSeed;

    fn check(spec: &FamilySpec, tol: f64) {
        let closed = closed_form_measures(spec).unwrap();
        let numeric = numeric_measures(&make_state(spec).unwrap()).unwrap();
        let (diff, field) = closed.max_difference(&numeric);
        assert!(
            diff <= tol,
            "{spec:?}: {field:?} differs by {diff:e}\n{closed:?}\n{numeric:?}"
        );
    }

    #[test]
    fn every_family_matches_its_closed_form() {
        for (k, tag) in FAMILY_TAGS.iter().enumerate() {
            let mut rng = StreamSeed::new(50, k as u64).rng();
            for _ in 0..100 {
                check(&FamilySpec::random(tag, &mut rng).unwrap(), 1e-9);
            }
        }
    }

    #[test]
    fn published_examples() {
        let w = closed_form_measures(&FamilySpec::parse("werner", "p=0.5").unwrap()).unwrap();
        assert!((w.c12.unwrap() - 0.25).abs() < 1e-15);
        assert!((w.r12.unwrap() - 0.5946035575).abs() < 1e-10);
        let m = FamilySpec::parse("m3ts", "c12=0.6").unwrap();
        let cf = closed_form_measures(&m).unwrap();
        assert!((cf.r12.unwrap() - 0.7745966692).abs() < 1e-10);
        assert!((cf.tau.unwrap() - 0.64).abs() < 1e-12);
        check(&m, 1e-9);
        let a1 = closed_form_measures(&FamilySpec::Ansatz1 { p: 1.0 / 3.0 }).unwrap();
        assert!((a1.r12.unwrap() - 0.4386913376).abs() < 1e-10);
        assert_eq!(a1.c12, Some(0.0));
        let a2 = closed_form_measures(&FamilySpec::Ansatz2 { alpha: 0.0, beta: None }).unwrap();
        assert!((a2.r12.unwrap() - 1.0).abs() < 1e-15 && (a2.n12.unwrap() - 1.0).abs() < 1e-15);
        let canon = FamilySpec::parse("canonical3", &format!("l0=0.6,l3=0.5,l4={}", 0.39f64.sqrt())).unwrap();
        let cf = closed_form_measures(&canon).unwrap();
        assert!((cf.tau.unwrap() - 0.5616).abs() < 1e-12);
        assert!((cf.r12.unwrap() - 0.7589466).abs() < 1e-7);
        check(&canon, 1e-9);
        let bd =
            closed_form_measures(&FamilySpec::parse("bell_diagonal", "p1=0.7,p2=0.1,p3=0.1,p4=0.1").unwrap()).unwrap();
        assert!((bd.c12.unwrap() - 0.4).abs() < 1e-12);
        assert!((bd.r12.unwrap() - 0.216f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn constructors_match_printed_forms() {
        let State::Pure(psi) = make_state(&FamilySpec::M3ts { c12: 1.0 }).unwrap() else {
            panic!()
        };
        let s = FRAC_1_SQRT_2;
        let expect = [s, 0.0, 0.0, 0.0, 0.0, 0.0, s, 0.0];
        for (a, e) in psi.amplitudes().iter().zip(expect) {
            assert!((a - c(e)).norm() < 1e-15);
        }
        let State::Mixed(rho) = make_state(&FamilySpec::Werner {
            p: 1.0,
            fiducial: Bell::PhiPlus,
        })
        .unwrap() else {
            panic!()
        };
        assert!(rho.matrix().max_abs_diff(&Bell::PhiPlus.projector()) < 1e-15);
        let State::Mixed(rho) = make_state(&FamilySpec::Ansatz2 {
            alpha: 1.0 / 3.0,
            beta: None,
        })
        .unwrap() else {
            panic!()
        };
        let expect = ComplexMatrix::diag_real(&[1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0]);
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn mems1_purification_reduces_to_mems1() {
        for cc in [0.0, 0.3, 2.0 / 3.0, 0.9, 1.0] {
            let State::Pure(psi) = make_state(&FamilySpec::Mems1Purification { c: cc }).unwrap() else {
                panic!()
            };
            let State::Mixed(mems) = make_state(&FamilySpec::Mems1 { c: cc }).unwrap() else {
                panic!()
            };
            let swapped = psi.reduce(&[1, 0]).unwrap();
            assert!(swapped.matrix().max_abs_diff(mems.matrix()) < 1e-10);
        }
    }

    #[test]
    fn discriminant_solutions_sit_on_parabola() {
        for cc in linspace(0.0, 1.0, 21) {
            let l3 = cc * FRAC_1_SQRT_2;
            let l4 = (0.5 - l3 * l3).max(0.0).sqrt();
            let spec = FamilySpec::Canonical3 {
                params: CanonicalParams {
                    lambda: [FRAC_1_SQRT_2, 0.0, 0.0, l3, l4],
                    theta: 0.0,
                },
            };
            let m = closed_form_measures(&spec).unwrap();
            assert!((m.c12.unwrap() - m.r12.unwrap().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn ansatz2_branch_lies_on_rank3_curve() {
        for alpha in linspace(0.0, 1.0 / 3.0, 101) {
            let m = closed_form_measures(&FamilySpec::Ansatz2 { alpha, beta: None }).unwrap();
            let n = m.n12.unwrap();
            assert!((n - (1.0 - 3.0 * alpha)).abs() < 1e-12);
            let (r, _) = Curve::NrRank3.point(n.clamp(0.0, 1.0)).unwrap();
            assert!((r - m.r12.unwrap()).abs() < 1e-10, "alpha={alpha}");
        }
    }

    #[test]
    fn curve_examples() {
        assert_eq!(Curve::CrRank2Lower.point(0.5).unwrap(), (0.5, 0.25));
        let (r, cc) = Curve::CrRank3.point(1.0).unwrap();
        assert!((r - 1.0).abs() < 1e-15 && cc == 1.0);
        assert!((Curve::NrRank3.point(1.0).unwrap().0 - 1.0).abs() < 1e-15);
        let t = measures::separable_r12_max();
        assert!(Curve::CrRank4.point(t).unwrap().1.abs() < 1e-15);
        assert!((Curve::CrRank4.point(1.0).unwrap().1 - 1.0).abs() < 1e-15);
        assert!(matches!(Curve::CrRank2Upper.point(1.5), Err(Error::Domain(_))));
        for tag in CURVE_TAGS {
            assert_eq!(Curve::parse(tag).unwrap().tag(), tag);
        }
        assert!(Curve::parse("nope").is_err());
    }

    #[test]
    fn parse_errors_name_the_problem() {
        assert!(matches!(FamilySpec::parse("nope", ""), Err(Error::UnknownTag { .. })));
        assert!(matches!(
            FamilySpec::parse("werner", "q=1"),
            Err(Error::UnknownTag { .. })
        ));
        let e = FamilySpec::parse("werner", "").unwrap_err().to_string();
        assert!(e.contains("`p`"), "{e}");
        let e = FamilySpec::parse("werner", "p=1.5").unwrap_err().to_string();
        assert!(e.contains("p = 1.5"), "{e}");
        assert!(FamilySpec::parse("mems2", "c=0.7").is_err());
        assert!(FamilySpec::parse("m3ts_general", "c12=0.8,c13=0.8").is_err());
        assert!(FamilySpec::parse("x_state", "a=0.25,b=0.25,c=0.25,d=0.25,w_re=0.3").is_err());
        assert!(FamilySpec::parse("bell_diagonal", "p1=0.5,p2=0.5,p3=0.5,p4=0").is_err());
        assert!(FamilySpec::parse("werner", "p=0.5,fiducial=psi_minus").is_ok());
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(0.2, 0.9, 1), vec![0.2]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
