//! Young functions: evaluation, generalized inverses, complementary
//! functions and the built-in families.
//!
//! A [`YoungFunction`] is a cheap-to-clone handle. Closed forms are used
//! whenever the family permits (monomials have closed inverse, closed
//! complementary function and closed `h_B`); everything else falls back to
//! bisection, golden-section search or grid scans.

mod checks;
mod conjugate;
mod text;

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::grid::GeomGrid;

pub use checks::{
    check_bp, check_submultiplicative, compare_on_grid, h_b, h_b_detail, phi1, BpStatus, BpVerdict,
    GridComparison, HbEstimate, SubmultiplicativeReport,
};
pub use conjugate::ConjugateTable;

/// Signature of a user-supplied Young function.
pub type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Family of a Young function. `coef` on [`YoungFunction`] multiplies the
/// whole family expression.
#[derive(Clone)]
pub enum Family {
    /// `t^p`
    Power { p: f64 },
    /// `(t log(e+t)^k)^p`
    PowerLog { p: f64, k: f64 },
    /// `t log(e+t)^k`
    LinearLog { k: f64 },
    /// `B(t)^r`
    PowerScaled { base: YoungFunction, r: f64 },
    /// `B(t^r)`
    PreComposed { base: YoungFunction, r: f64 },
    /// Anything else, including numerically conjugated functions.
    Custom { name: String, eval: EvalFn },
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Power { p } => write!(f, "Power {{ p: {p} }}"),
            Family::PowerLog { p, k } => write!(f, "PowerLog {{ p: {p}, k: {k} }}"),
            Family::LinearLog { k } => write!(f, "LinearLog {{ k: {k} }}"),
            Family::PowerScaled { base, r } => write!(f, "PowerScaled {{ base: {base:?}, r: {r} }}"),
            Family::PreComposed { base, r } => write!(f, "PreComposed {{ base: {base:?}, r: {r} }}"),
            Family::Custom { name, .. } => write!(f, "Custom {{ name: {name:?} }}"),
        }
    }
}

struct Inner {
    family: Family,
    coef: f64,
    submultiplicative_claim: bool,
    complementary: OnceLock<Result<YoungFunction>>,
}

/// A convex, nondecreasing `B: [0, ∞) → [0, ∞)` with `B(0) = 0` and
/// `B(t) → ∞`.
#[derive(Clone)]
pub struct YoungFunction(Arc<Inner>);

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_spec() {
            Ok(s) => write!(f, "YoungFunction({s})"),
            Err(_) => write!(f, "YoungFunction({:?}, coef={})", self.0.family, self.0.coef),
        }
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_spec() {
            Ok(s) => f.write_str(&s),
            Err(_) => match &self.0.family {
                Family::Custom { name, .. } => f.write_str(name),
                other => write!(f, "{other:?}"),
            },
        }
    }
}

/// Grid used to validate the Young axioms at construction.
pub(crate) fn axiom_grid() -> GeomGrid {
    GeomGrid::pow2(-20, 20, 256).expect("static grid")
}

/// Grid for the default numerical complementary function.
pub fn default_conjugate_grid() -> GeomGrid {
    GeomGrid::pow2(-30, 30, 512).expect("static grid")
}

fn ln_e_plus(t: f64) -> f64 {
    (std::f64::consts::E + t).ln()
}

impl YoungFunction {
    fn from_parts(family: Family, coef: f64, claim: bool) -> Self {
        YoungFunction(Arc::new(Inner {
            family,
            coef,
            submultiplicative_claim: claim,
            complementary: OnceLock::new(),
        }))
    }

    /// `t^p`, `p ≥ 1`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Construction(format!("power family needs p >= 1, got {p}")));
        }
        Ok(Self::from_parts(Family::Power { p }, 1.0, true))
    }

    /// `t log(e+t)^k`, `k ≥ 0`.
    pub fn linear_log(k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::Construction(format!("linlog family needs k >= 0, got {k}")));
        }
        Ok(Self::from_parts(Family::LinearLog { k }, 1.0, true))
    }

    /// `(t log(e+t)^k)^p`, `p ≥ 1`, `k ≥ 0`.
    pub fn power_log(p: f64, k: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Construction(format!("powerlog family needs p >= 1, got {p}")));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::Construction(format!("powerlog family needs k >= 0, got {k}")));
        }
        Ok(Self::from_parts(Family::PowerLog { p, k }, 1.0, true))
    }

    /// `B(t)^r`; convexity is checked on the axiom grid.
    pub fn power_scaled(base: &YoungFunction, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Construction(format!("scaled family needs r > 0, got {r}")));
        }
        let claim = base.submultiplicative_claim() && base.coef() >= 1.0;
        let f = Self::from_parts(Family::PowerScaled { base: base.clone(), r }, 1.0, claim);
        f.validate_axioms(&axiom_grid())?;
        Ok(f)
    }

    /// `B(t^r)`; convexity is checked on the axiom grid.
    pub fn pre_composed(base: &YoungFunction, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Construction(format!("precomposed family needs r > 0, got {r}")));
        }
        let claim = base.submultiplicative_claim();
        let f = Self::from_parts(Family::PreComposed { base: base.clone(), r }, 1.0, claim);
        f.validate_axioms(&axiom_grid())?;
        Ok(f)
    }

    /// Arbitrary user function; the Young axioms are checked on the axiom grid.
    pub fn custom<F>(name: &str, eval: F, submultiplicative_claim: bool) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f = Self::from_parts(
            Family::Custom {
                name: name.to_string(),
                eval: Arc::new(eval),
            },
            1.0,
            submultiplicative_claim,
        );
        f.validate_axioms(&axiom_grid())?;
        Ok(f)
    }

    /// Custom function without axiom validation; used for tabulated
    /// conjugates whose convexity holds only up to interpolation error.
    pub(crate) fn custom_unchecked(name: String, eval: EvalFn) -> Self {
        Self::from_parts(Family::Custom { name, eval }, 1.0, false)
    }

    /// `c·B(t)`. The submultiplicativity claim survives only for `c ≥ 1`.
    pub fn with_coef(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Construction(format!("coefficient must be positive, got {c}")));
        }
        let claim = self.submultiplicative_claim() && self.coef() * c >= 1.0;
        Ok(Self::from_parts(self.0.family.clone(), self.coef() * c, claim))
    }

    /// `A(t) = t^{r p'}`.
    pub fn weight_pair_a(r: f64, p: f64) -> Result<Self> {
        check_exponent(p)?;
        Self::power(r * conjugate_exponent(p))
    }

    /// `C(t) = (t log(e+t)^k)^{(r p')'}`; plain power when `k = 0`.
    pub fn weight_pair_c(r: f64, p: f64, k: f64) -> Result<Self> {
        check_exponent(p)?;
        let rp = r * conjugate_exponent(p);
        if rp <= 1.0 {
            return Err(Error::Construction(format!("need r·p' > 1, got {rp}")));
        }
        let e = conjugate_exponent(rp);
        if k == 0.0 {
            Self::power(e)
        } else {
            Self::power_log(e, k)
        }
    }

    /// `φ(t) = (t log(e+t)^k)^{n/(n-α)}`, written with `a = α/n`.
    pub fn phi_for_linear_log(k: f64, alpha_over_n: f64) -> Result<Self> {
        check_ratio(alpha_over_n)?;
        let e = 1.0 / (1.0 - alpha_over_n);
        if k == 0.0 {
            Self::power(e)
        } else {
            Self::power_log(e, k)
        }
    }

    /// `ψ(t) = φ(t^{1-α/n})`; returns `φ` itself when `α = 0`.
    pub fn psi_from_phi(phi: &YoungFunction, alpha_over_n: f64) -> Result<Self> {
        check_ratio(alpha_over_n)?;
        if alpha_over_n == 0.0 {
            return Ok(phi.clone());
        }
        Self::pre_composed(phi, 1.0 - alpha_over_n)
    }

    /// A `φ` with `φ^{-1}(t) t^{α/n} ≈ B^{-1}(t)` for the closed families.
    pub fn default_phi(b: &YoungFunction, alpha_over_n: f64) -> Result<Self> {
        check_ratio(alpha_over_n)?;
        let (p, k) = match b.family() {
            Family::Power { p } => (*p, 0.0),
            Family::LinearLog { k } => (1.0, *k),
            Family::PowerLog { p, k } => (*p, *k),
            _ => {
                return Err(Error::Config(format!(
                    "no default phi for {b}; supply one explicitly"
                )))
            }
        };
        let inv = 1.0 / p - alpha_over_n;
        if inv <= 0.0 {
            return Err(Error::Config(format!(
                "no Young phi with phi^-1(t) t^(a) ~ B^-1(t) for B={b}, a={alpha_over_n}"
            )));
        }
        let e = 1.0 / inv;
        if k == 0.0 {
            Self::power(e)
        } else {
            Self::power_log(e, k)
        }
    }

    pub fn family(&self) -> &Family {
        &self.0.family
    }

    pub fn coef(&self) -> f64 {
        self.0.coef
    }

    pub fn submultiplicative_claim(&self) -> bool {
        self.0.submultiplicative_claim
    }

    fn kernel(&self, t: f64) -> f64 {
        match &self.0.family {
            Family::Power { p } => t.powf(*p),
            Family::LinearLog { k } => t * ln_e_plus(t).powf(*k),
            Family::PowerLog { p, k } => (t * ln_e_plus(t).powf(*k)).powf(*p),
            Family::PowerScaled { base, r } => base.value(t).powf(*r),
            Family::PreComposed { base, r } => base.value(t.powf(*r)),
            Family::Custom { eval, .. } => eval(t),
        }
    }

    /// `B(t)` without the domain check; callers guarantee `t ≥ 0`.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "Young function evaluated at {t}");
        if t == 0.0 {
            return 0.0;
        }
        self.0.coef * self.kernel(t)
    }

    /// `B(t)`; negative `t` is a domain error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("Young function evaluated at t = {t}")));
        }
        Ok(self.value(t))
    }

    /// `Some((c, p))` when the function is exactly `c·t^p`.
    pub fn monomial(&self) -> Option<(f64, f64)> {
        let (c, p) = match &self.0.family {
            Family::Power { p } => (1.0, *p),
            Family::PowerScaled { base, r } => {
                let (c0, p0) = base.monomial()?;
                (c0.powf(*r), p0 * r)
            }
            Family::PreComposed { base, r } => {
                let (c0, p0) = base.monomial()?;
                (c0, p0 * r)
            }
            Family::PowerLog { p, k } if *k == 0.0 => (1.0, *p),
            Family::LinearLog { k } if *k == 0.0 => (1.0, 1.0),
            _ => return None,
        };
        Some((self.0.coef * c, p))
    }

    /// True when the inverse is available without bisection.
    pub fn has_closed_inverse(&self) -> bool {
        self.monomial().is_some()
    }

    /// True when the complementary function has a closed form.
    pub fn has_closed_complementary(&self) -> bool {
        matches!(self.monomial(), Some((_, p)) if p > 1.0)
    }

    /// Generalized inverse `inf{t ≥ 0 : B(t) ≥ y}`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::Domain(format!("inverse requested at y = {y}")));
        }
        Ok(self.inverse_value(y))
    }

    pub(crate) fn inverse_value(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if let Some((c, p)) = self.monomial() {
            return (y / c).powf(1.0 / p);
        }
        let y_kernel = y / self.0.coef;
        match &self.0.family {
            Family::PowerScaled { base, r } => base.inverse_value(y_kernel.powf(1.0 / r)),
            Family::PreComposed { base, r } => base.inverse_value(y_kernel).powf(1.0 / r),
            Family::PowerLog { p, k } => {
                let inner = y_kernel.powf(1.0 / p);
                let k = *k;
                bisect_inverse(|t| t * ln_e_plus(t).powf(k), inner)
            }
            _ => bisect_inverse(|t| self.value(t), y),
        }
    }

    /// Complementary function `B̃(t) = sup_{s>0} (st − B(s))`, cached on
    /// first use. Closed form for monomials, numerical Legendre transform on
    /// the default 512-node grid otherwise.
    pub fn complementary(&self) -> Result<YoungFunction> {
        self.0
            .complementary
            .get_or_init(|| self.complementary_on(&default_conjugate_grid()))
            .clone()
    }

    /// Complementary function on an explicit grid (never cached).
    pub fn complementary_on(&self, grid: &GeomGrid) -> Result<YoungFunction> {
        if grid.nodes < 8 {
            return Err(Error::Config(format!(
                "complementary needs at least 8 grid nodes, got {}",
                grid.nodes
            )));
        }
        if let Some((c, p)) = self.monomial() {
            if p <= 1.0 {
                return Err(Error::Domain(
                    "complementary of a linear function is not finite-valued".into(),
                ));
            }
            let q = conjugate_exponent(p);
            let coef = (c * p).powf(-1.0 / (p - 1.0)) / q;
            return YoungFunction::power(q)?.with_coef(coef);
        }
        let table = ConjugateTable::build(self, grid)?;
        let name = format!("conj({self})");
        let table = Arc::new(table);
        Ok(YoungFunction::custom_unchecked(
            name,
            Arc::new(move |t| table.eval(t)),
        ))
    }

    /// Check `B(0) = 0`, monotonicity, midpoint convexity (relative slack
    /// 1e-9) and unbounded growth on `grid`.
    pub fn validate_axioms(&self, grid: &GeomGrid) -> Result<()> {
        let zero = self.kernel(0.0) * self.0.coef;
        if zero != 0.0 && !(zero.abs() < 1e-300) {
            return Err(Error::Construction(format!("{self}: B(0) = {zero}, expected 0")));
        }
        let pts = grid.points();
        let vals: Vec<f64> = pts.iter().map(|&t| self.value(t)).collect();
        for (i, v) in vals.iter().enumerate() {
            if v.is_nan() || *v < 0.0 {
                return Err(Error::Construction(format!(
                    "{self}: invalid value {v} at t = {}",
                    pts[i]
                )));
            }
        }
        for i in 1..pts.len() {
            if vals[i] < vals[i - 1] {
                return Err(Error::Construction(format!(
                    "{self}: not monotone between t = {} and t = {}",
                    pts[i - 1],
                    pts[i]
                )));
            }
        }
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let mid = self.value(0.5 * (pts[i] + pts[j]));
                let chord = 0.5 * (vals[i] + vals[j]);
                if mid > chord * (1.0 + 1e-9) + 1e-300 {
                    return Err(Error::Construction(format!(
                        "{self}: midpoint convexity fails for the pair ({}, {}): {mid} > {chord}",
                        pts[i], pts[j]
                    )));
                }
            }
        }
        let top = *vals.last().unwrap();
        let below = self.value(0.5 * grid.hi);
        if !(top > below || top == f64::INFINITY) {
            return Err(Error::Construction(format!(
                "{self}: not increasing at the top of the grid, cannot tend to infinity"
            )));
        }
        Ok(())
    }
}

/// `p' = p/(p-1)`.
pub fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Construction(format!("exponent must satisfy 1 < p < inf, got {p}")))
    }
}

fn check_ratio(a: f64) -> Result<()> {
    if (0.0..1.0).contains(&a) {
        Ok(())
    } else {
        Err(Error::Construction(format!("alpha/n must lie in [0, 1), got {a}")))
    }
}

/// `inf{t : f(t) ≥ y}` for nondecreasing `f` with `f(0) = 0`, computed to
/// machine precision in `t`.
pub(crate) fn bisect_inverse<F: Fn(f64) -> f64>(f: F, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0f64;
    let mut lo;
    if f(hi) >= y {
        loop {
            let half = 0.5 * hi;
            if half == 0.0 {
                return hi;
            }
            if f(half) < y {
                lo = half;
                break;
            }
            hi = half;
        }
    } else {
        loop {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
            if f(hi) >= y {
                break;
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= y {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
