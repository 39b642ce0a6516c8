//! Quadrature rules shared by the integral modules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::amplitude::ComplexAmplitude;
use crate::error::{Error, Result};

/// Nodes and weights of a rule on a fixed reference interval.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Nodes and weights mapped affinely from [-1, 1] to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Legendre P_n and P_{n-1} at x by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// n-point Gauss–Legendre rule on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n > 0, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, x);
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, x);
        dp = if p.is_finite() { nf * (x * p - pm1) / (x * x - 1.0) } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Gauss–Laguerre rule for the weight e^{-t} on [0, ∞). Weights are stored as
/// logarithms because they underflow long before the nodes stop mattering.
#[derive(Debug, Clone)]
pub struct LaguerreRule {
    pub nodes: Vec<f64>,
    pub log_weights: Vec<f64>,
}

/// L_n(x) and L_{n-1}(x) as mantissas with a shared natural-log scale.
fn laguerre_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = 1.0 - x;
    let mut scale = 0.0;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0 - x) * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
        if p1.abs() > 1e150 {
            p0 *= 1e-150;
            p1 *= 1e-150;
            scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (p1, p0, scale)
}

impl LaguerreRule {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "gauss_laguerre needs at least one node");
        // Jacobi matrix of the Laguerre recurrence: diagonal 2i+1, off-diagonal i.
        let mut j = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            j[(i, i)] = 2.0 * i as f64 + 1.0;
            if i + 1 < n {
                j[(i, i + 1)] = (i + 1) as f64;
                j[(i + 1, i)] = (i + 1) as f64;
            }
        }
        let mut nodes: Vec<f64> = j.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        let nf = n as f64;
        let mut log_weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            for _ in 0..6 {
                let (p, pm1, _) = laguerre_scaled(n, *x);
                let dp = nf * (p - pm1) / *x;
                let dx = p / dp;
                *x -= dx;
                if dx.abs() <= 1e-15 * x.abs() {
                    break;
                }
            }
            let (p, pm1, s) = laguerre_scaled(n + 1, *x);
            let _ = pm1;
            let ln_l = p.abs().ln() + s;
            log_weights.push(x.ln() - 2.0 * (nf + 1.0).ln() - 2.0 * ln_l);
        }
        Self { nodes, log_weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Product grid on the unit sphere: Gauss–Legendre in cos θ, uniform in φ.
/// Weights sum to 4π; polynomials of degree < min(2 n_theta, n_phi) integrate exactly.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereGrid {
    pub fn product(n_theta: usize, n_phi: usize) -> Self {
        let gl = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (&ct, &w) in gl.nodes.iter().zip(&gl.weights) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = (j as f64 + 0.5) * dphi;
                points.push([st * phi.cos(), st * phi.sin(), ct]);
                weights.push(w * dphi);
            }
        }
        Self { points, weights }
    }

    /// Product grid whose polar axis is `axis` instead of ẑ.
    pub fn product_about(n_theta: usize, n_phi: usize, axis: [f64; 3]) -> Self {
        let base = Self::product(n_theta, n_phi);
        let (e1, e2) = orthonormal_frame(axis);
        let points = base
            .points
            .iter()
            .map(|p| {
                let mut q = [0.0; 3];
                for k in 0..3 {
                    q[k] = p[0] * e1[k] + p[1] * e2[k] + p[2] * axis[k];
                }
                q
            })
            .collect();
        Self {
            points,
            weights: base.weights,
        }
    }

    pub fn integrate<F: Fn([f64; 3]) -> Complex64>(&self, f: F) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, &w) in self.points.iter().zip(&self.weights) {
            acc += f(*p) * w;
        }
        acc
    }
}

/// Two unit vectors completing `axis` to a right-handed orthonormal frame.
pub fn orthonormal_frame(axis: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = helper[0] * axis[0] + helper[1] * axis[1] + helper[2] * axis[2];
    let mut e1 = [helper[0] - d * axis[0], helper[1] - d * axis[1], helper[2] - d * axis[2]];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    for c in e1.iter_mut() {
        *c /= n;
    }
    let e2 = [
        axis[1] * e1[2] - axis[2] * e1[1],
        axis[2] * e1[0] - axis[0] * e1[2],
        axis[0] * e1[1] - axis[1] * e1[0],
    ];
    (e1, e2)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value, QUADPACK error estimate and the roundoff floor 50ε∫|f| for one panel.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[7] = f(c);
    for i in 0..7 {
        let dx = h * XGK[i];
        fv[i] = f(c - dx);
        fv[14 - i] = f(c + dx);
    }
    let w = |i: usize| WGK[if i <= 7 { i } else { 14 - i }];
    let mut k = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (i, v) in fv.iter().enumerate() {
        k += v * w(i);
        abs += v.norm() * w(i);
    }
    let mut g = fv[7] * WG[3];
    for j in 0..3 {
        let i = 2 * j + 1;
        g += (fv[i] + fv[14 - i]) * WG[j];
    }
    let mean = k * 0.5;
    let asc: f64 = fv.iter().enumerate().map(|(i, v)| (v - mean).norm() * w(i)).sum();
    let h = h.abs();
    let (resabs, resasc) = (abs * h, asc * h);
    let mut err = ((k - g) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    (k * (0.5 * (b - a)), err.max(floor), floor)
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    id: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Tolerances and limits for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOpts {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOpts {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_panels: 4000,
        }
    }
}

impl AdaptiveOpts {
    pub fn rel(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of a complex integrand
/// over [a, b] starting from the given breakpoints. Panels are refined worst
/// first; ties break on creation order so results are reproducible.
pub fn adaptive_with_breaks<F: Fn(f64) -> Complex64>(
    f: F,
    breaks: &[f64],
    opts: AdaptiveOpts,
) -> Result<ComplexAmplitude> {
    // panels whose estimate is at the roundoff floor are settled and never split
    let mut heap = BinaryHeap::new();
    let mut settled = Vec::new();
    let mut id = 0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut active_err = 0.0;
    let mut push = |heap: &mut BinaryHeap<Panel>, p: Panel, floor: f64, active_err: &mut f64| {
        if p.err <= floor {
            settled.push(Panel { err: floor, ..p });
        } else {
            *active_err += p.err;
            heap.push(p);
        }
    };
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (v, e, floor) = gk15(&f, w[0], w[1]);
        total += v;
        push(&mut heap, Panel { a: w[0], b: w[1], value: v, err: e, id }, floor, &mut active_err);
        id += 1;
    }
    let mut previous = total;
    while active_err > opts.abs_tol.max(opts.rel_tol * total.norm()) {
        if heap.len() >= opts.max_panels {
            return Err(Error::Quadrature {
                op: "quad::adaptive",
                last: total.norm(),
                previous: previous.norm(),
            });
        }
        let Some(worst) = heap.pop() else { break };
        active_err -= worst.err;
        let m = 0.5 * (worst.a + worst.b);
        let (v1, e1, f1) = gk15(&f, worst.a, m);
        let (v2, e2, f2) = gk15(&f, m, worst.b);
        previous = total;
        total += v1 + v2 - worst.value;
        push(&mut heap, Panel { a: worst.a, b: m, value: v1, err: e1, id }, f1, &mut active_err);
        push(&mut heap, Panel { a: m, b: worst.b, value: v2, err: e2, id: id + 1 }, f2, &mut active_err);
        id += 2;
    }
    // Re-add in interval order so the returned sum does not depend on refinement history.
    let mut panels = heap.into_vec();
    panels.append(&mut settled);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in &panels {
        sum += p.value;
        err += p.err;
    }
    Ok(ComplexAmplitude::new(sum, err))
}

pub fn adaptive<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    opts: AdaptiveOpts,
) -> Result<ComplexAmplitude> {
    adaptive_with_breaks(f, &[a, b], opts)
}

pub fn adaptive_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: AdaptiveOpts) -> Result<(f64, f64)> {
    let r = adaptive(|x| Complex64::new(f(x), 0.0), a, b, opts)?;
    Ok((r.value.re, r.err))
}

/// Composite fixed-order Gauss–Legendre over equal panels.
pub fn composite<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize, rule: &Rule) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (x, w) in rule.mapped(lo, lo + h) {
            acc += f(x) * w;
        }
    }
    acc
}

/// Integral along the straight segment z0 → z1 in the complex plane.
pub fn segment<F: Fn(Complex64) -> Complex64>(
    f: F,
    z0: Complex64,
    z1: Complex64,
    opts: AdaptiveOpts,
) -> Result<ComplexAmplitude> {
    let dz = z1 - z0;
    let r = adaptive(|s| f(z0 + dz * s) * dz, 0.0, 1.0, opts)?;
    Ok(r)
}
