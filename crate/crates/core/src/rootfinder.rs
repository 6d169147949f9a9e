//! Zeros of `g(z) - 1` in a right strip: argument-principle counting on
//! rectangles, recursive bisection, Newton refinement, and the real
//! Lundberg exponent of a risk model.

use crate::cmath::{c, re, C};
use crate::error::{Error, Result};
use crate::models::{integrated_tail, DistributionModel, Family};
use crate::quad::integrate_complex;
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::PI;

const BOUNDARY_TOL: f64 = 1e-8;
const SPLIT_TOL: f64 = 1e-14;
const NODE_CAP: usize = 1 << 16;
const WINDING_TOL: f64 = 1e-3;
const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX: usize = 100;
const SNAP: f64 = 1e-9;
const IM_START: f64 = 32.0;
const IM_CAP: f64 = 1024.0;
const MAX_NUDGES: usize = 5;
// Off-axis offsets keep contour edges away from real roots and the line Im = π.
const LOWER_OFFSET: f64 = 0.012_345_678_9;
const LEFT_EDGE: f64 = -0.253_141_592_6;

/// Closed axis-aligned rectangle `[re_lo, re_hi] × [im_lo, im_hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Self {
        Self { re_lo, re_hi, im_lo, im_hi }
    }

    fn width(&self) -> f64 {
        self.re_hi - self.re_lo
    }

    fn height(&self) -> f64 {
        self.im_hi - self.im_lo
    }

    fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    fn center(&self) -> C {
        c(0.5 * (self.re_lo + self.re_hi), 0.5 * (self.im_lo + self.im_hi))
    }

    fn contains(&self, z: C, slack: f64) -> bool {
        z.re >= self.re_lo - slack
            && z.re <= self.re_hi + slack
            && z.im >= self.im_lo - slack
            && z.im <= self.im_hi + slack
    }

    fn corners(&self) -> [C; 4] {
        [
            c(self.re_lo, self.im_lo),
            c(self.re_hi, self.im_lo),
            c(self.re_hi, self.im_hi),
            c(self.re_lo, self.im_hi),
        ]
    }

    fn split(&self, frac: f64) -> (Rect, Rect) {
        if self.width() >= self.height() {
            let m = self.re_lo + frac * self.width();
            (Rect { re_hi: m, ..*self }, Rect { re_lo: m, ..*self })
        } else {
            let m = self.im_lo + frac * self.height();
            (Rect { im_hi: m, ..*self }, Rect { im_lo: m, ..*self })
        }
    }
}

/// A zero of `g(z) - 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Root {
    pub location: C,
    pub multiplicity: u32,
    pub g_prime: C,
    /// Index of the complex-conjugate partner in the same root list.
    pub conjugate_of: Option<usize>,
}

impl Root {
    pub fn is_real(&self) -> bool {
        self.location.im == 0.0
    }
}

/// Strip (non-lattice) or fundamental domain (lattice) to search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchRegion {
    pub r0: f64,
    pub lattice: bool,
    /// Initial half-height for non-lattice searches; ignored on a lattice.
    pub im_bound: Option<f64>,
}

impl SearchRegion {
    pub fn for_model(model: &DistributionModel, r0: f64) -> Self {
        Self { r0, lattice: model.is_lattice(), im_bound: None }
    }

    pub fn with_im_bound(mut self, im: f64) -> Self {
        self.im_bound = Some(im);
        self
    }
}

/// Roots in the searched region plus the region actually used.
#[derive(Clone, Debug, Serialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Abscissa after any boundary nudges.
    pub r0: f64,
    pub im_bound: f64,
    /// Zero count (with multiplicity) over the full, unfolded region.
    pub total_count: u32,
}

/// Number of zeros of `g - 1` inside `rect`, with multiplicity.
pub fn count_zeros(model: &DistributionModel, rect: Rect) -> Result<u32> {
    count_with_tol(model, rect, BOUNDARY_TOL)
}

fn count_with_tol(model: &DistributionModel, rect: Rect, zero_tol: f64) -> Result<u32> {
    let w = winding(model, rect, zero_tol)?;
    let poles: u32 = model
        .poles_in(rect.re_lo, rect.re_hi, rect.im_lo, rect.im_hi)
        .iter()
        .map(|p| {
            if rect.contains(p.location, 0.0) && !rect.contains(p.location, -1e-12) {
                // pole on the contour: treat like a boundary zero
                u32::MAX
            } else {
                p.order
            }
        })
        .fold(0u32, |a, o| a.saturating_add(o));
    if poles == u32::MAX {
        return Err(Error::BoundaryZero { nudges: 0 });
    }
    let total = w + poles as f64;
    let rounded = total.round();
    if (total - rounded).abs() > WINDING_TOL || rounded < 0.0 {
        return Err(Error::NonIntegerWinding { value: total });
    }
    Ok(rounded as u32)
}

/// `(1/2πi) ∮ g'/(g - 1) dz` over the boundary of `rect`.
fn winding(model: &DistributionModel, rect: Rect, zero_tol: f64) -> Result<f64> {
    let corners = rect.corners();
    let mut total = C::new(0.0, 0.0);
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let d = b - a;
        let len = d.norm();
        let pieces = ((len / 0.25).ceil() as usize).clamp(1, 1024);
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let f = |t: f64| -> C {
            if failure.borrow().is_some() {
                return C::new(0.0, 0.0);
            }
            let z = a + d * t;
            let val = model.mgf(z).and_then(|g| Ok((g, model.mgf_derivative(z, 1)?)));
            match val {
                Ok((g, gp)) => {
                    let h = g - 1.0;
                    if h.norm() <= zero_tol {
                        *failure.borrow_mut() = Some(Error::BoundaryZero { nudges: 0 });
                        return C::new(0.0, 0.0);
                    }
                    gp / h * d
                }
                Err(Error::PoleEvaluation { .. }) => {
                    *failure.borrow_mut() = Some(Error::BoundaryZero { nudges: 0 });
                    C::new(0.0, 0.0)
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    C::new(0.0, 0.0)
                }
            }
        };
        let res = integrate_complex(f, pieces, 1e-7, NODE_CAP);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        match res {
            Some((v, _)) => total += v,
            None => return Err(Error::QuadratureDivergence { nodes: NODE_CAP }),
        }
    }
    Ok(total.im / (2.0 * PI))
}

/// All roots of `g(z) = 1` with `Re z ≤ r0`, upper half searched and
/// conjugates mirrored. On a lattice the search covers `|Im z| ≤ π`.
pub fn find_roots(model: &DistributionModel, region: &SearchRegion) -> Result<RootSet> {
    if !(region.r0 > 0.0 && region.r0.is_finite()) {
        return Err(Error::InvalidModel(format!("r0 must be positive, got {}", region.r0)));
    }
    let mut r0 = region.r0;
    for nudge in 0..=MAX_NUDGES {
        match search(model, region, r0) {
            Err(Error::BoundaryZero { .. }) | Err(Error::NonIntegerWinding { .. }) if nudge < MAX_NUDGES => {
                r0 += 1e-6;
            }
            Err(Error::BoundaryZero { .. }) => return Err(Error::BoundaryZero { nudges: MAX_NUDGES }),
            other => return other,
        }
    }
    Err(Error::BoundaryZero { nudges: MAX_NUDGES })
}

fn search(model: &DistributionModel, region: &SearchRegion, r0: f64) -> Result<RootSet> {
    let (rect, im_bound) = if region.lattice {
        (Rect::new(LEFT_EDGE, r0, -LOWER_OFFSET, PI + LOWER_OFFSET), PI)
    } else {
        let mut m = region.im_bound.unwrap_or(IM_START).max(1.0);
        let mut prev = count_zeros(model, Rect::new(LEFT_EDGE, r0, -LOWER_OFFSET, m))?;
        loop {
            if 2.0 * m > IM_CAP {
                return Err(Error::NoConvergence { change: f64::INFINITY });
            }
            let next = count_zeros(model, Rect::new(LEFT_EDGE, r0, -LOWER_OFFSET, 2.0 * m))?;
            if next == prev {
                break;
            }
            prev = next;
            m *= 2.0;
        }
        (Rect::new(LEFT_EDGE, r0, -LOWER_OFFSET, m), m)
    };
    let n = count_zeros(model, rect)?;
    let mut raw: Vec<(C, u32)> = Vec::new();
    isolate(model, rect, n, &mut raw)?;
    let roots = canonicalize(model, raw, region.lattice)?;
    let total = roots.iter().map(|r| r.multiplicity).sum();
    Ok(RootSet { roots, r0, im_bound, total_count: total })
}

const SPLIT_FRACTIONS: [f64; 6] = [0.5, 0.4871, 0.5173, 0.4533, 0.5419, 0.3917];

fn isolate(model: &DistributionModel, rect: Rect, n: u32, out: &mut Vec<(C, u32)>) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    let diam = rect.diameter();
    if n == 1 {
        if let Some(z) = newton(model, rect.center(), 1) {
            if rect.contains(z, 1e-12 * z.norm().max(1.0)) {
                out.push((z, 1));
                return Ok(());
            }
        }
        if diam < 1e-9 {
            return Err(Error::NewtonFailure { at: rect.center() });
        }
    } else if diam < 1e-3 {
        if let Some(z) = newton(model, rect.center(), n).map(|z| polish_multiple(model, z, n)) {
            if rect.contains(z, diam) && multiplicity_at(model, z, n)? {
                out.push((z, n));
                return Ok(());
            }
        }
        if diam < 1e-9 {
            return Err(Error::MultiplicityUnresolved { at: rect.center() });
        }
    }
    let mut last_err = None;
    for frac in SPLIT_FRACTIONS {
        let (a, b) = rect.split(frac);
        // near clustered zeros |g - 1| is tiny on any nearby line, so split
        // lines only reject exact hits
        let counts = count_with_tol(model, a, SPLIT_TOL)
            .and_then(|na| Ok((na, count_with_tol(model, b, SPLIT_TOL)?)));
        match counts {
            Ok((na, nb)) if na + nb == n => {
                isolate(model, a, na, out)?;
                return isolate(model, b, nb, out);
            }
            Ok((na, nb)) => last_err = Some(Error::NonIntegerWinding { value: (na + nb) as f64 }),
            Err(e @ (Error::BoundaryZero { .. } | Error::NonIntegerWinding { .. })) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::NewtonFailure { at: rect.center() }))
}

/// Confirms a cluster of `n` zeros sits at `z` by counting on a small box.
fn multiplicity_at(model: &DistributionModel, z: C, n: u32) -> Result<bool> {
    for rho in [2e-4, 5e-4, 1e-3] {
        let r = Rect::new(z.re - rho, z.re + rho, z.im - rho * 1.0137, z.im + rho * 0.9871);
        match count_with_tol(model, r, 0.0) {
            Ok(k) => return Ok(k == n),
            Err(Error::NonIntegerWinding { .. }) | Err(Error::BoundaryZero { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(false)
}

/// (Modified) Newton iteration `z ← z - m (g - 1)/g'`.
pub(crate) fn newton(model: &DistributionModel, start: C, m: u32) -> Option<C> {
    let mut z = start;
    for _ in 0..NEWTON_MAX {
        let g = model.mgf(z).ok()?;
        let gp = model.mgf_derivative(z, 1).ok()?;
        if gp.norm() == 0.0 {
            return None;
        }
        let step = (g - 1.0) / gp * m as f64;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        if step.norm() <= NEWTON_TOL * z.norm().max(1.0) {
            return Some(z);
        }
    }
    // accept a slowly converging multiple root if the residual is tiny
    let g = model.mgf(z).ok()?;
    if (g - 1.0).norm() < 1e-12 {
        Some(z)
    } else {
        None
    }
}

/// A zero of multiplicity `m` is a simple zero of `g^{(m-1)}`; Newton on
/// that derivative restores full precision where it is available.
fn polish_multiple(model: &DistributionModel, start: C, m: u32) -> C {
    if !(2..=3).contains(&m) {
        return start;
    }
    let mut z = start;
    for _ in 0..20 {
        let (Ok(f), Ok(fp)) = (model.mgf_derivative(z, m - 1), model.mgf_derivative(z, m)) else {
            return start;
        };
        if fp.norm() == 0.0 {
            break;
        }
        let step = f / fp;
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    if (z - start).norm() < 1e-6 {
        z
    } else {
        start
    }
}

fn canonicalize(model: &DistributionModel, raw: Vec<(C, u32)>, lattice: bool) -> Result<Vec<Root>> {
    let mut upper: Vec<(C, u32)> = Vec::new();
    for (mut z, m) in raw {
        if z.im.abs() < SNAP {
            z.im = 0.0;
        }
        if z.norm() < 1e-10 {
            z = C::new(0.0, 0.0);
        }
        if lattice && (z.im - PI).abs() < SNAP {
            z.im = PI;
        }
        if z.im < 0.0 || (lattice && z.im > PI) {
            continue;
        }
        if upper.iter().any(|(w, _)| (*w - z).norm() < 1e-10 * z.norm().max(1.0)) {
            continue;
        }
        upper.push((z, m));
    }
    upper.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap()
            .then(a.0.im.abs().partial_cmp(&b.0.im.abs()).unwrap())
    });
    let mut roots = Vec::new();
    for (z, m) in upper {
        let gp = model.mgf_derivative(z, 1)?;
        let self_conjugate = z.im == 0.0 || (lattice && z.im == PI);
        if self_conjugate {
            roots.push(Root { location: z, multiplicity: m, g_prime: gp, conjugate_of: None });
        } else {
            let i = roots.len();
            roots.push(Root { location: z, multiplicity: m, g_prime: gp, conjugate_of: Some(i + 1) });
            roots.push(Root {
                location: z.conj(),
                multiplicity: m,
                g_prime: gp.conj(),
                conjugate_of: Some(i),
            });
        }
    }
    Ok(roots)
}

/// Positive root `κ` of `(α/c) ∫ e^{κy} Ḡ(y) dy = 1` for continuous claims.
pub fn lundberg_root_continuous(claims: &DistributionModel, alpha: f64, premium: f64) -> Result<f64> {
    if claims.is_lattice() {
        return Err(Error::InvalidModel("continuous risk model needs a non-lattice claim law".into()));
    }
    if !(alpha > 0.0 && premium > 0.0) {
        return Err(Error::InvalidModel("alpha and premium must be positive".into()));
    }
    let loading = premium - alpha * claims.moments().mu;
    if loading <= 0.0 {
        return Err(Error::NegativeLoading { loading });
    }
    let scale = alpha / premium;
    let h = |k: f64| -> Result<(f64, f64)> {
        let v = integrated_tail(claims, re(k), 0)?.re * scale - 1.0;
        let d = integrated_tail(claims, re(k), 1)?.re * scale;
        Ok((v, d))
    };
    solve_increasing(h, claims.moments().mgf_radius)
}

/// Positive root `κ` of `Σ_k e^{κk} P(Z > k) = 1` for lattice claims.
pub fn lundberg_root_discrete(claims: &DistributionModel) -> Result<f64> {
    if !claims.is_lattice() {
        return Err(Error::InvalidModel("discrete risk model needs a lattice claim law".into()));
    }
    let m = claims.moments().mu;
    if m >= 1.0 {
        return Err(Error::NegativeLoading { loading: 1.0 - m });
    }
    if claims.tail(1.0) <= 0.0 {
        return Err(Error::NoFiniteRoot("claims never exceed one unit; ruin is impossible".into()));
    }
    let h = |k: f64| -> Result<(f64, f64)> {
        match claims.family() {
            Family::DiscretePmf { pmf } => {
                let mut tail = 0.0;
                let mut v = 0.0;
                let mut d = 0.0;
                for j in (0..pmf.len()).rev() {
                    // tail = P(Z > j)
                    let t = (k * j as f64).exp() * tail;
                    v += t;
                    d += j as f64 * t;
                    tail += pmf[j];
                }
                Ok((v - 1.0, d))
            }
            _ => {
                let mz = claims.mgf(re(k))?.re;
                let mp = claims.mgf_derivative(re(k), 1)?.re;
                let em1 = k.exp_m1();
                let v = (mz - 1.0) / em1;
                let d = (mp * em1 - (mz - 1.0) * k.exp()) / (em1 * em1);
                Ok((v - 1.0, d))
            }
        }
    };
    solve_increasing(h, claims.moments().mgf_radius)
}

/// Root in `(0, radius)` of an increasing function with `h(0+) < 0`:
/// geometric bracketing from `[1e-8, 1]`, bisection, Newton polish.
fn solve_increasing<H>(h: H, radius: f64) -> Result<f64>
where
    H: Fn(f64) -> Result<(f64, f64)>,
{
    let mut lo = 1e-8;
    if h(lo)?.0 >= 0.0 {
        return Err(Error::NoFiniteRoot("Lundberg function is non-negative near zero".into()));
    }
    let mut hi = if radius.is_finite() { 1f64.min(0.5 * radius) } else { 1.0 };
    let mut steps = 0;
    loop {
        let v = h(hi)?.0;
        if v.is_finite() && v > 0.0 {
            break;
        }
        if !v.is_finite() && radius.is_finite() {
            break;
        }
        lo = hi;
        hi = if radius.is_finite() { (2.0 * hi).min(0.5 * (hi + radius)) } else { 2.0 * hi };
        steps += 1;
        if hi > 700.0 || steps > 200 {
            return Err(Error::NoFiniteRoot(format!("no Lundberg root below {hi}")));
        }
    }
    while hi - lo > 1e-10 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        let v = h(mid)?.0;
        if v > 0.0 || !v.is_finite() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut k = 0.5 * (lo + hi);
    for _ in 0..50 {
        let (v, d) = h(k)?;
        let step = v / d;
        let next = k - step;
        if !(next > lo - 1e-9 && next < hi + 1e-9) {
            break;
        }
        k = next;
        if step.abs() < 1e-16 * k.max(1.0) {
            break;
        }
    }
    Ok(k)
}

/// Outcome of the growth heuristic for `|1/(1 - g)|` along vertical lines.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub applicable: bool,
    /// Grid maximum of `|1/(1 - g(r + iθ))|`.
    pub sup: f64,
    /// Fitted slope of `log sup_r` against `log θ` on the upper half of the θ-range.
    pub slope: f64,
    pub likely_violation: bool,
    /// `(θ, sup over r)` samples.
    pub profile: Vec<(f64, f64)>,
}

/// Advisory check that `1/(1 - g)` stays bounded as `|Im z|` grows in the
/// strip `0 ≤ Re z ≤ r0`. Lattice laws are periodic and are not diagnosed.
pub fn diagnose_growth(model: &DistributionModel, r0: f64, theta_max: f64) -> GrowthReport {
    if model.is_lattice() {
        return GrowthReport { applicable: false, sup: f64::NAN, slope: 0.0, likely_violation: false, profile: Vec::new() };
    }
    let theta_probe = 0.1;
    let (nr, nt) = (64, 256);
    let mut profile = Vec::with_capacity(nt);
    let mut sup = 0.0f64;
    for j in 0..nt {
        let th = theta_probe + (theta_max - theta_probe) * j as f64 / (nt - 1) as f64;
        let mut row = 0.0f64;
        for i in 0..nr {
            let r = r0 * i as f64 / (nr - 1) as f64;
            if let Ok(g) = model.mgf(c(r, th)) {
                let v = (re(1.0) - g).inv().norm();
                if v.is_finite() {
                    row = row.max(v);
                }
            }
        }
        sup = sup.max(row);
        profile.push((th, row));
    }
    let half = &profile[nt / 2..];
    let pts: Vec<(f64, f64)> = half
        .iter()
        .filter(|(t, v)| *t > 0.0 && *v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    GrowthReport { applicable: true, sup, slope, likely_violation: slope > 0.25, profile }
}
