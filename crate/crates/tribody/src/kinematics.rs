//! Masses, charges and couplings; Jacobi coordinates for the three pairings;
//! momenta bookkeeping; asymptotic-domain predicates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: Vec3, c: f64) -> Vec3 {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn unit(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// Unit vector from polar and azimuthal angles.
pub fn direction(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    [st * phi.cos(), st * phi.sin(), ct]
}

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Masses and charges of the three particles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub masses: [f64; 3],
    pub charges: [f64; 3],
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            masses: [1.0, 1.0, 1.0],
            charges: [1.0, 2.0, -3.0],
        }
    }
}

/// Pair couplings α_l = √(2μ_ij) Z_i Z_j for {i j l} an even permutation, and
/// the effective spectator coupling near each screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub alpha: [f64; 3],
    /// alpha_eff[j] = 2(α_{j+1} + α_{j+2})/√3, indices cyclic.
    pub alpha_eff: [f64; 3],
    pub attractive: [bool; 3],
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::Domain {
                op: "kinematics::couplings",
                detail: format!("masses must be positive, got {:?}", self.masses),
            });
        }
        if self.charges.iter().any(|z| !z.is_finite()) {
            return Err(Error::Domain {
                op: "kinematics::couplings",
                detail: format!("charges must be finite, got {:?}", self.charges),
            });
        }
        Ok(())
    }

    pub fn equal_masses(&self) -> bool {
        let m = self.masses;
        m[0] == m[1] && m[1] == m[2]
    }

    pub fn couplings(&self) -> Result<Couplings> {
        couplings(self)
    }

    fn require_equal_masses(&self, op: &'static str) -> Result<()> {
        if self.equal_masses() {
            Ok(())
        } else {
            Err(Error::Unsupported {
                op,
                detail: format!("pairing rotations need equal masses, got {:?}", self.masses),
            })
        }
    }
}

pub fn couplings(config: &SystemConfig) -> Result<Couplings> {
    config.validate()?;
    let m = config.masses;
    let z = config.charges;
    let mut alpha = [0.0; 3];
    for l in 0..3 {
        let i = (l + 1) % 3;
        let j = (l + 2) % 3;
        let mu = m[i] * m[j] / (m[i] + m[j]);
        alpha[l] = (2.0 * mu).sqrt() * z[i] * z[j];
    }
    let mut alpha_eff = [0.0; 3];
    for j in 0..3 {
        alpha_eff[j] = 2.0 * (alpha[(j + 1) % 3] + alpha[(j + 2) % 3]) / 3f64.sqrt();
    }
    Ok(Couplings {
        alpha,
        alpha_eff,
        attractive: [alpha[0] < 0.0, alpha[1] < 0.0, alpha[2] < 0.0],
    })
}

/// Rotation taking the pair-j Jacobi pair (x_j, y_j) to pair j+1.
fn rotate_once(x: Vec3, y: Vec3) -> (Vec3, Vec3) {
    let xn = sub(scale(x, -0.5), scale(y, SQRT3_2));
    let yn = sub(scale(x, SQRT3_2), scale(y, 0.5));
    (xn, yn)
}

/// A point on the centre-of-mass plane in the Jacobi coordinates of one pairing.
/// `pair` is 1, 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiState {
    pub pair: usize,
    pub x: Vec3,
    pub y: Vec3,
}

impl JacobiState {
    pub fn new(pair: usize, x: Vec3, y: Vec3) -> Result<Self> {
        if !(1..=3).contains(&pair) {
            return Err(Error::Domain {
                op: "kinematics::JacobiState",
                detail: format!("pair index {pair} not in 1..=3"),
            });
        }
        Ok(Self { pair, x, y })
    }

    /// Jacobi coordinates from mass-scaled positions z_1, z_2, z_3 with Σz_j = 0:
    /// x_1 = (z_3 − z_2)/√2 and cyclic, y_j = −√(3/2) z_j.
    pub fn from_positions(z: [Vec3; 3], pair: usize) -> Result<Self> {
        let j = pair.checked_sub(1).filter(|j| *j < 3).ok_or_else(|| Error::Domain {
            op: "kinematics::JacobiState",
            detail: format!("pair index {pair} not in 1..=3"),
        })?;
        let a = z[(j + 2) % 3];
        let b = z[(j + 1) % 3];
        let x = scale(sub(a, b), std::f64::consts::FRAC_1_SQRT_2);
        let y = scale(z[j], -(1.5f64).sqrt());
        Ok(Self { pair, x, y })
    }

    /// Mass-scaled positions z_1, z_2, z_3 of the same point.
    pub fn positions(&self) -> [Vec3; 3] {
        let s = self.canonical();
        let z1 = scale(s.y, -(2.0f64 / 3.0).sqrt());
        let half = scale(z1, -0.5);
        let d = scale(s.x, std::f64::consts::FRAC_1_SQRT_2);
        [z1, sub(half, d), add(half, d)]
    }

    fn canonical(&self) -> Self {
        let mut s = *self;
        while s.pair != 1 {
            let (x, y) = rotate_once(s.x, s.y);
            s = Self {
                pair: s.pair % 3 + 1,
                x,
                y,
            };
        }
        s
    }

    pub fn z_squared(&self) -> f64 {
        dot(self.x, self.x) + dot(self.y, self.y)
    }

    /// The same point in another pairing; requires equal masses.
    pub fn to_pairing(&self, target: usize, config: &SystemConfig) -> Result<Self> {
        config.require_equal_masses("kinematics::to_pairing")?;
        self.rotate_to(target)
    }

    fn rotate_to(&self, target: usize) -> Result<Self> {
        if !(1..=3).contains(&target) {
            return Err(Error::Domain {
                op: "kinematics::to_pairing",
                detail: format!("target pair {target} not in 1..=3"),
            });
        }
        let mut s = *self;
        while s.pair != target {
            let (x, y) = rotate_once(s.x, s.y);
            s = Self {
                pair: s.pair % 3 + 1,
                x,
                y,
            };
        }
        Ok(s)
    }

    /// Coordinates of all three pairings, indexed by pair − 1.
    pub fn all_pairings(&self, config: &SystemConfig) -> Result<[Self; 3]> {
        Ok([
            self.to_pairing(1, config)?,
            self.to_pairing(2, config)?,
            self.to_pairing(3, config)?,
        ])
    }
}

pub fn to_pairing(state: &JacobiState, target: usize, config: &SystemConfig) -> Result<JacobiState> {
    state.to_pairing(target, config)
}

/// Total momentum q = (k, p) in pairing 1 with the derived per-pair quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Momenta {
    pub k: Vec3,
    pub p: Vec3,
    /// E = k² + p²
    pub energy: f64,
    /// (k_j, p_j) for pairings 1..3, indexed by j − 1.
    pub k_pair: [Vec3; 3],
    pub p_pair: [Vec3; 3],
    /// η_j = α_j / (2 k_j)
    pub eta: [f64; 3],
    /// ω = η_2 + η_3
    pub omega: f64,
    /// η_eff = α_eff / (2p) near screen 1
    pub eta_eff: f64,
    /// b = η_eff − ω
    pub b: f64,
}

impl Momenta {
    pub fn new(config: &SystemConfig, k: Vec3, p: Vec3) -> Result<Self> {
        config.require_equal_masses("kinematics::Momenta")?;
        let c = couplings(config)?;
        let mut k_pair = [k; 3];
        let mut p_pair = [p; 3];
        for j in 1..3 {
            let (kn, pn) = rotate_once(k_pair[j - 1], p_pair[j - 1]);
            k_pair[j] = kn;
            p_pair[j] = pn;
        }
        let mut eta = [0.0; 3];
        for j in 0..3 {
            let kj = norm(k_pair[j]);
            if kj == 0.0 {
                if c.alpha[j] != 0.0 {
                    return Err(Error::Kinematics {
                        op: "kinematics::Momenta",
                        detail: format!("pair {} has zero relative momentum", j + 1),
                    });
                }
            } else {
                eta[j] = c.alpha[j] / (2.0 * kj);
            }
        }
        let pn = norm(p);
        let eta_eff = if pn == 0.0 { 0.0 } else { c.alpha_eff[0] / (2.0 * pn) };
        let omega = eta[1] + eta[2];
        Ok(Self {
            k,
            p,
            energy: dot(k, k) + dot(p, p),
            k_pair,
            p_pair,
            eta,
            omega,
            eta_eff,
            b: eta_eff - omega,
        })
    }

    /// Effective spectator momentum in channel n: √(E + α_1²/(4n²)).
    pub fn p_prime(&self, n: usize, alpha1: f64) -> f64 {
        let nf = n as f64;
        (self.energy + alpha1 * alpha1 / (4.0 * nf * nf)).sqrt()
    }
}

/// Exponents of the asymptotic domains, 1/2 < μ < ν < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainSpec {
    pub mu: f64,
    pub nu: f64,
}

impl Default for DomainSpec {
    fn default() -> Self {
        Self { mu: 0.6, nu: 0.9 }
    }
}

impl DomainSpec {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(0.5 < mu && mu < nu && nu < 1.0) {
            return Err(Error::Domain {
                op: "kinematics::DomainSpec",
                detail: format!("need 1/2 < mu < nu < 1, got mu = {mu}, nu = {nu}"),
            });
        }
        Ok(Self { mu, nu })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// y^μ < x < y
    OmegaMu,
    /// x ≤ y^ν
    OmegaPlus,
    /// y^μ < x < y^ν
    OmegaMuNu,
}

pub fn in_domain(state: &JacobiState, spec: DomainSpec, which: Domain) -> bool {
    in_domain_radii(norm(state.x), norm(state.y), spec, which)
}

pub fn in_domain_radii(x: f64, y: f64, spec: DomainSpec, which: Domain) -> bool {
    match which {
        Domain::OmegaMu => y.powf(spec.mu) < x && x < y,
        Domain::OmegaPlus => x <= y.powf(spec.nu),
        Domain::OmegaMuNu => y.powf(spec.mu) < x && x < y.powf(spec.nu),
    }
}
