//! Hecke algebra of the extended affine Weyl group, Kazhdan-Lusztig bases,
//! the spherical/antispherical parabolic modules, the periodic module,
//! Bernstein elements and generic polynomials.
//!
//! Normalization: `(H_s - v^{-1})(H_s + v) = 0`, `H̲_s = H_s + v`.

use crate::alcoves::Alcove;
use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::rootdata::{Affine, CartanType, RootDatum, Vector, MAXR};
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

pub const DEFAULT_BUDGET: i64 = 10;

/// Finite sum `Σ c_x H_x` over the extended affine Weyl group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeElt {
    terms: BTreeMap<Affine, Laurent>,
}

impl HeckeElt {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn std(x: Affine) -> Self {
        Self::monomial(x, Laurent::one())
    }
    pub fn monomial(x: Affine, c: Laurent) -> Self {
        let mut h = Self::zero();
        h.add_term(x, &c);
        h
    }
    pub fn coeff(&self, x: &Affine) -> Laurent {
        self.terms.get(x).cloned().unwrap_or_default()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Affine, &Laurent)> {
        self.terms.iter()
    }
    pub fn support(&self) -> Vec<Affine> {
        self.terms.keys().copied().collect()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add_term(&mut self, x: Affine, c: &Laurent) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(x).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&x);
        }
    }
    pub fn add(&mut self, other: &HeckeElt) {
        for (x, c) in &other.terms {
            self.add_term(*x, c);
        }
    }
    pub fn sub(&mut self, other: &HeckeElt) {
        for (x, c) in &other.terms {
            self.add_term(*x, &-c.clone());
        }
    }
    pub fn scale(&self, c: &Laurent) -> HeckeElt {
        let mut out = HeckeElt::zero();
        for (x, d) in &self.terms {
            out.add_term(*x, &(d * c));
        }
        out
    }
}

/// Basis of the spherical (`triv`) or antispherical (`sgn`) module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    /// `H_s` acts on the base vector by `v^{-1}`.
    Spherical,
    /// `H_s` acts by `-v`.
    Antispherical,
}

/// Finite sum of alcoves with Laurent coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicElt {
    terms: BTreeMap<Alcove, Laurent>,
}

impl PeriodicElt {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn alcove(a: Alcove) -> Self {
        Self::monomial(a, Laurent::one())
    }
    pub fn monomial(a: Alcove, c: Laurent) -> Self {
        let mut p = Self::zero();
        p.add_term(a, &c);
        p
    }
    pub fn add_term(&mut self, a: Alcove, c: &Laurent) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(a).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&a);
        }
    }
    pub fn add(&mut self, other: &PeriodicElt) {
        for (a, c) in &other.terms {
            self.add_term(*a, c);
        }
    }
    pub fn coeff(&self, a: &Alcove) -> Laurent {
        self.terms.get(a).cloned().unwrap_or_default()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Alcove, &Laurent)> {
        self.terms.iter()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn scale(&self, c: &Laurent) -> PeriodicElt {
        let mut out = PeriodicElt::zero();
        for (a, d) in &self.terms {
            out.add_term(*a, &(d * c));
        }
        out
    }
}

fn v(e: i32) -> Laurent {
    Laurent::v_pow(e)
}

fn quad() -> Laurent {
    // v^{-1} - v
    Laurent::from_terms([(-1, 1), (1, -1)])
}

/// Hecke algebra computations over a fixed root datum, with memoized
/// Kazhdan-Lusztig elements.
pub struct Hecke {
    rd: Arc<RootDatum>,
    budget: i64,
    kl: HashMap<Affine, HeckeElt>,
    par: HashMap<(Flavor, Affine), HeckeElt>,
}

impl Hecke {
    pub fn new(rd: Arc<RootDatum>) -> Self {
        Self::with_budget(rd, DEFAULT_BUDGET)
    }

    pub fn with_budget(rd: Arc<RootDatum>, budget: i64) -> Self {
        Hecke { rd, budget, kl: HashMap::new(), par: HashMap::new() }
    }

    pub fn root_datum(&self) -> &RootDatum {
        &self.rd
    }

    pub fn budget(&self) -> i64 {
        self.budget
    }

    pub fn len(&self, x: &Affine) -> i64 {
        self.rd.coxeter_length(x)
    }

    fn check_budget(&self, x: &Affine) -> Result<()> {
        let l = self.len(x);
        if l > self.budget {
            return Err(Error::Budget { needed: l, budget: self.budget });
        }
        Ok(())
    }

    /// `h · H_s`.
    pub fn mul_s(&self, h: &HeckeElt, s: usize) -> Result<HeckeElt> {
        let ws = self.rd.wall(s)?;
        let mut out = HeckeElt::zero();
        for (x, c) in h.terms() {
            let xs = self.rd.mul(x, &ws);
            out.add_term(xs, c);
            if self.len(&xs) < self.len(x) {
                out.add_term(*x, &(c * &quad()));
            }
        }
        Ok(out)
    }

    /// `h · H_s^{-1} = h · (H_s + v - v^{-1})`.
    pub fn mul_s_inv(&self, h: &HeckeElt, s: usize) -> Result<HeckeElt> {
        let mut out = self.mul_s(h, s)?;
        out.sub(&h.scale(&quad()));
        Ok(out)
    }

    fn mul_omega_right(&self, h: &HeckeElt, om: &Affine) -> HeckeElt {
        let mut out = HeckeElt::zero();
        for (x, c) in h.terms() {
            out.add_term(self.rd.mul(x, om), c);
        }
        out
    }


    /// `a · H_x`.
    pub fn mul_std(&self, a: &HeckeElt, x: &Affine) -> Result<HeckeElt> {
        let (om, word) = self.rd.reduced_word(x);
        let mut cur = self.mul_omega_right(a, &om);
        for s in word {
            cur = self.mul_s(&cur, s)?;
        }
        Ok(cur)
    }

    pub fn mul(&self, a: &HeckeElt, b: &HeckeElt) -> Result<HeckeElt> {
        let mut out = HeckeElt::zero();
        for (x, c) in b.terms() {
            out.add(&self.mul_std(a, x)?.scale(c));
        }
        Ok(out)
    }

    /// `H_x^{-1}`.
    pub fn inv_std(&self, x: &Affine) -> Result<HeckeElt> {
        let (om, word) = self.rd.reduced_word(x);
        let mut cur = HeckeElt::std(self.rd.id());
        for &s in word.iter().rev() {
            cur = self.mul_s_inv(&cur, s)?;
        }
        Ok(self.mul_omega_right(&cur, &self.rd.inv(&om)))
    }

    /// The bar involution: `H_x ↦ H_{x^{-1}}^{-1}`, `v ↦ v^{-1}`.
    pub fn bar(&self, h: &HeckeElt) -> Result<HeckeElt> {
        let mut out = HeckeElt::zero();
        for (x, c) in h.terms() {
            out.add(&self.inv_std(&self.rd.inv(x))?.scale(&c.bar()));
        }
        Ok(out)
    }

    /// The Kazhdan-Lusztig element `H̲_x`.
    pub fn kl(&mut self, x: &Affine) -> Result<HeckeElt> {
        if let Some(h) = self.kl.get(x) {
            return Ok(h.clone());
        }
        self.check_budget(x)?;
        let (om, word) = self.rd.reduced_word(x);
        let res = if word.is_empty() {
            HeckeElt::std(om)
        } else {
            let s = *word.last().unwrap();
            let xs = self.rd.mul(x, &self.rd.wall(s)?);
            let prev = self.kl(&xs)?;
            let mut c = self.mul_s(&prev, s)?;
            c.add(&prev.scale(&v(1)));
            self.reduce_constant_terms(&mut c, x, |me, y| me.kl(y))?;
            c
        };
        self.kl.insert(*x, res.clone());
        Ok(res)
    }

    /// Subtract `c_0 · B_y` for every `y ≠ top` whose coefficient has a
    /// constant term, longest first.
    fn reduce_constant_terms<F>(&mut self, c: &mut HeckeElt, top: &Affine, mut basis: F) -> Result<()>
    where
        F: FnMut(&mut Self, &Affine) -> Result<HeckeElt>,
    {
        loop {
            let cand = c
                .terms()
                .filter(|(y, p)| *y != top && !p.coeff(0).is_zero())
                .map(|(y, p)| (self.len(y), *y, p.coeff(0)))
                .max_by_key(|(l, y, _)| (*l, *y));
            let Some((_, y, c0)) = cand else { break };
            let by = basis(self, &y)?;
            c.sub(&by.scale(&Laurent::monomial(c0, 0)));
        }
        Ok(())
    }

    /// `h_{y,x}`.
    pub fn kl_h(&mut self, y: &Affine, x: &Affine) -> Result<Laurent> {
        Ok(self.kl(x)?.coeff(y))
    }

    fn check_min(&self, x: &Affine) -> Result<()> {
        if !self.rd.is_min_coset_rep(x) {
            return Err(Error::NotMinimal(self.rd.coord_string(x)));
        }
        Ok(())
    }

    /// Right action of `H_s` on the parabolic module.
    pub fn par_mul_s(&self, m: &HeckeElt, s: usize, flavor: Flavor) -> Result<HeckeElt> {
        let ws = self.rd.wall(s)?;
        let mut out = HeckeElt::zero();
        for (y, c) in m.terms() {
            let ys = self.rd.mul(y, &ws);
            if self.len(&ys) > self.len(y) {
                if self.rd.is_min_coset_rep(&ys) {
                    out.add_term(ys, c);
                } else {
                    let f = match flavor {
                        Flavor::Spherical => v(-1),
                        Flavor::Antispherical => -v(1),
                    };
                    out.add_term(*y, &(c * &f));
                }
            } else {
                out.add_term(ys, c);
                out.add_term(*y, &(c * &quad()));
            }
        }
        Ok(out)
    }

    /// The self-dual element `M̲_x` (spherical) or `N̲_x` (antispherical).
    pub fn par_kl(&mut self, x: &Affine, flavor: Flavor) -> Result<HeckeElt> {
        self.check_min(x)?;
        if let Some(h) = self.par.get(&(flavor, *x)) {
            return Ok(h.clone());
        }
        self.check_budget(x)?;
        let (om, word) = self.rd.reduced_word(x);
        let res = if word.is_empty() {
            HeckeElt::std(om)
        } else {
            let s = *word.last().unwrap();
            let xs = self.rd.mul(x, &self.rd.wall(s)?);
            let prev = self.par_kl(&xs, flavor)?;
            let mut c = self.par_mul_s(&prev, s, flavor)?;
            c.add(&prev.scale(&v(1)));
            self.reduce_constant_terms(&mut c, x, |me, y| me.par_kl(y, flavor))?;
            c
        };
        self.par.insert((flavor, *x), res.clone());
        Ok(res)
    }

    /// `m_{y,x}` or `n_{y,x}`.
    pub fn parabolic_mn(&mut self, y: &Affine, x: &Affine, flavor: Flavor) -> Result<Laurent> {
        self.check_min(y)?;
        Ok(self.par_kl(x, flavor)?.coeff(y))
    }

    /// `p · H_s` in the periodic module.
    pub fn periodic_mul_s(&self, p: &PeriodicElt, s: usize) -> Result<PeriodicElt> {
        let mut out = PeriodicElt::zero();
        for (a, c) in p.terms() {
            let as_ = self.rd.right_act(*a, s)?;
            out.add_term(as_, c);
            if self.rd.length(as_) > self.rd.length(*a) {
                out.add_term(*a, &(c * &quad()));
            }
        }
        Ok(out)
    }

    /// `p · h` for `h` in the non-extended Hecke algebra.
    pub fn periodic_act(&self, p: &PeriodicElt, h: &HeckeElt) -> Result<PeriodicElt> {
        let mut out = PeriodicElt::zero();
        for (x, c) in h.terms() {
            let (om, word) = self.rd.reduced_word(x);
            if om != self.rd.id() {
                return Err(Error::Unsupported(format!(
                    "periodic action of the extended element {}",
                    self.rd.coord_string(x)
                )));
            }
            let mut cur = p.clone();
            for s in word {
                cur = self.periodic_mul_s(&cur, s)?;
            }
            out.add(&cur.scale(c));
        }
        Ok(out)
    }

    /// `t⁰_λ`, the translation as an element of the extended group.
    pub fn t0(&self, lam: &Vector) -> Affine {
        self.rd.translation(*lam)
    }

    fn is_antidominant(&self, lam: &Vector) -> bool {
        (0..self.rd.rank()).all(|i| lam[i] <= 0)
    }

    /// Smallest `k` with `λ - 2kρ∨` antidominant.
    fn theta_shift(&self, lam: &Vector) -> i64 {
        let rc = self.rd.rho_check();
        (0..)
            .find(|&k| {
                let mut l = *lam;
                for j in 0..self.rd.rank() {
                    l[j] -= 2 * k * rc[j];
                }
                self.is_antidominant(&l)
            })
            .unwrap()
    }

    /// `(λ1, λ2)` with `λ = λ1 - λ2`, `λ2 = -2kρ∨`, `k >= k_min + extra`.
    fn theta_parts(&self, lam: &Vector, extra: i64) -> (Vector, Vector) {
        let k = self.theta_shift(lam) + extra;
        let rc = self.rd.rho_check();
        let mut l1 = *lam;
        let mut l2 = [0; MAXR];
        for j in 0..self.rd.rank() {
            l2[j] = -2 * k * rc[j];
            l1[j] += l2[j];
        }
        (l1, l2)
    }

    /// `θ_λ = H_{t⁰_{λ1}} H_{t⁰_{λ2}}^{-1}` with `λ2 = -2kρ∨`, `k >= k_min + extra`.
    pub fn theta_with(&self, lam: &Vector, extra: i64) -> Result<HeckeElt> {
        let (l1, l2) = self.theta_parts(lam, extra);
        let a = HeckeElt::std(self.t0(&l1));
        let b = self.inv_std(&self.t0(&l2))?;
        self.mul(&a, &b)
    }

    pub fn theta(&self, lam: &Vector) -> Result<HeckeElt> {
        self.theta_with(lam, 0)
    }

    /// `p · H_x` or `p · H_x^{-1}`, one simple reflection at a time.
    pub fn periodic_mul_std(&self, p: &PeriodicElt, x: &Affine, inverse: bool) -> Result<PeriodicElt> {
        let (om, word) = self.rd.reduced_word(x);
        if om != self.rd.id() {
            return Err(Error::Unsupported(format!("periodic action of the extended element {}", self.rd.coord_string(x))));
        }
        let mut cur = p.clone();
        if inverse {
            // H_s^{-1} = H_s - (v^{-1} - v)
            for &s in word.iter().rev() {
                let mut next = self.periodic_mul_s(&cur, s)?;
                next.add(&cur.scale(&-quad()));
                cur = next;
            }
        } else {
            for &s in &word {
                cur = self.periodic_mul_s(&cur, s)?;
            }
        }
        Ok(cur)
    }

    /// Both sides of `A₀⁺ θ_λ H_w = A₀⁺ t⁰_λ w`.
    pub fn kato_sides(&self, lam: &Vector, w: u8) -> Result<(PeriodicElt, PeriodicElt)> {
        if !self.rd.in_coroot_lattice(lam) {
            return Err(Error::Invalid("λ must lie in the coroot lattice".into()));
        }
        let (l1, l2) = self.theta_parts(lam, 0);
        let mut lhs = PeriodicElt::alcove(self.rd.fundamental_alcove());
        lhs = self.periodic_mul_std(&lhs, &self.t0(&l1), false)?;
        lhs = self.periodic_mul_std(&lhs, &self.t0(&l2), true)?;
        lhs = self.periodic_mul_std(&lhs, &self.rd.finite(w), false)?;
        let rhs = PeriodicElt::alcove(self.rd.alcove(&Affine::new(w, *lam)));
        Ok((lhs, rhs))
    }

    pub fn kato_check(&self, lam: &Vector, w: u8) -> Result<bool> {
        let (l, r) = self.kato_sides(lam, w)?;
        Ok(l == r)
    }

    /// Coefficient of `A` in `η Σ_z v^{ℓ(z)} (A₀⁺z + λ)`.
    pub fn generic_q(&self, a: Alcove, lam: &Vector) -> Laurent {
        let rd = &*self.rd;
        let ac = a.coord();
        let mut out = Laurent::zero();
        for z in rd.weyl().elements() {
            let c = rd.alcove(&Affine::new(z, *lam)).coord();
            if c.w != ac.w {
                continue;
            }
            let mut nu = [0; MAXR];
            for k in 0..rd.rank() {
                nu[k] = c.t[k] - ac.t[k];
            }
            let parts = self.kostant(&nu);
            for (n, count) in parts {
                out.add_term(rd.weyl().len(z) as i32 + 2 * n as i32, &count.into());
            }
        }
        out
    }

    /// Number of ways to write `ν` as a nonnegative combination of positive
    /// coroots, by total count of summands.
    pub fn kostant(&self, nu: &Vector) -> BTreeMap<i64, i64> {
        let rd = &*self.rd;
        let pos: Vec<Vector> = rd.positive_roots().iter().map(|&p| rd.root(p).coroot).collect();
        let mut out = BTreeMap::new();
        fn rec(rd: &RootDatum, pos: &[Vector], i: usize, nu: Vector, n: i64, out: &mut BTreeMap<i64, i64>) {
            let Some(c) = rd.coroot_coords(&nu) else { return };
            if (0..rd.rank()).any(|k| c[k] < 0) {
                return;
            }
            if i == pos.len() {
                if c.iter().all(|&x| x == 0) {
                    *out.entry(n).or_insert(0) += 1;
                }
                return;
            }
            let mut cur = nu;
            let mut m = 0;
            loop {
                let Some(cc) = rd.coroot_coords(&cur) else { return };
                if (0..rd.rank()).any(|k| cc[k] < 0) {
                    return;
                }
                rec(rd, pos, i + 1, cur, n + m, out);
                for k in 0..rd.rank() {
                    cur[k] -= pos[i][k];
                }
                m += 1;
            }
        }
        rec(rd, &pos, 0, *nu, 0, &mut out);
        out
    }

    /// Weight multiplicities of the irreducible representation of the dual
    /// group with highest weight `λ` (a dominant coweight), by Freudenthal.
    pub fn weight_multiplicities(&self, lam: &Vector) -> Result<BTreeMap<Vector, i64>> {
        let rd = &*self.rd;
        if (0..rd.rank()).any(|i| lam[i] < 0) {
            return Err(Error::Invalid("highest weight must be dominant".into()));
        }
        let rc = rd.rho_check();
        let mut lr = *lam;
        for k in 0..rd.rank() {
            lr[k] += rc[k];
        }
        let norm_lr = rd.form(&lr, &lr);
        let norm_l = rd.form(lam, lam);
        let dominant = |mu: &Vector| -> Vector {
            let mut best = *mu;
            for w in rd.weyl().elements() {
                let x = rd.act_cov(w, mu);
                if (0..rd.rank()).all(|i| x[i] >= 0) {
                    best = x;
                }
            }
            best
        };
        // dominant weights below λ, by depth
        let mut dom: BTreeMap<Vector, i64> = BTreeMap::new();
        let mut layer = vec![*lam];
        dom.insert(*lam, 1);
        let mut order = vec![*lam];
        let mut seen = std::collections::HashSet::from([*lam]);
        while !layer.is_empty() {
            let mut next = Vec::new();
            for mu in &layer {
                for i in 0..rd.rank() {
                    let a = rd.simple_coroot(i);
                    let mut nu = *mu;
                    for k in 0..rd.rank() {
                        nu[k] -= a[k];
                    }
                    if rd.form(&nu, &nu) <= norm_l && seen.insert(nu) {
                        next.push(nu);
                    }
                }
            }
            order.extend(next.iter().copied().filter(|nu| (0..rd.rank()).all(|j| nu[j] >= 0)));
            layer = next;
        }
        for mu in order.iter().skip(1) {
            let mut mr = *mu;
            for k in 0..rd.rank() {
                mr[k] += rc[k];
            }
            let denom = norm_lr - rd.form(&mr, &mr);
            let mut num = Rational64::zero();
            for &p in rd.positive_roots() {
                let a = rd.root(p).coroot;
                let mut x = *mu;
                loop {
                    for k in 0..rd.rank() {
                        x[k] += a[k];
                    }
                    let d = dominant(&x);
                    let m = match dom.get(&d) {
                        Some(m) => *m,
                        None => {
                            if seen.contains(&d) {
                                0
                            } else {
                                break;
                            }
                        }
                    };
                    num += Rational64::from_integer(2 * m) * rd.form(&x, &a);
                    // stop once far outside the dominant region
                    if rd.form(&x, &x) > norm_lr {
                        break;
                    }
                }
            }
            let m = if denom.is_zero() { Rational64::zero() } else { num / denom };
            if !m.is_integer() {
                return Err(Error::Invalid("Freudenthal produced a non-integer".into()));
            }
            dom.insert(*mu, m.to_integer());
        }
        let mut out = BTreeMap::new();
        for (mu, m) in dom {
            if m == 0 {
                continue;
            }
            for w in rd.weyl().elements() {
                out.insert(rd.act_cov(w, &mu), m);
            }
        }
        Ok(out)
    }

    /// Coefficients of `H̲_{w₀ t⁰_λ}` in the basis `θ_μ H_w`, read off from
    /// the periodic module.
    pub fn bernstein_expand(&mut self, lam: &Vector) -> Result<BTreeMap<(Vector, u8), Laurent>> {
        let rd = self.rd.clone();
        match rd.cartan_type() {
            CartanType::A1 | CartanType::A2 | CartanType::A1Power(_) => {}
            t => return Err(Error::Unsupported(format!("bernstein_expand for type {}", t))),
        }
        if !rd.in_coroot_lattice(lam) || (0..rd.rank()).any(|i| lam[i] <= 0) {
            return Err(Error::Invalid("λ must be a dominant regular element of the coroot lattice".into()));
        }
        let top = rd.mul(&rd.finite(rd.weyl().longest()), &self.t0(lam));
        let h = self.kl(&top)?;
        let p = self.periodic_act(&PeriodicElt::alcove(rd.fundamental_alcove()), &h)?;
        let mut out = BTreeMap::new();
        for (a, c) in p.terms() {
            let g = a.coord();
            out.insert((g.t, g.w), c.clone());
        }
        Ok(out)
    }

    /// `Σ c_{μ,w} θ_μ H_w`.
    pub fn from_bernstein(&self, coeffs: &BTreeMap<(Vector, u8), Laurent>) -> Result<HeckeElt> {
        let mut out = HeckeElt::zero();
        for ((mu, w), c) in coeffs {
            let th = self.theta(mu)?;
            out.add(&self.mul(&th, &HeckeElt::std(self.rd.finite(*w)))?.scale(c));
        }
        Ok(out)
    }

    /// Rows `(y, x, h_{y,x})` for all `y <= x`, `x` up to `top` in length.
    pub fn kl_table(&mut self, max_len: i64) -> Result<Vec<(Affine, Affine, Laurent)>> {
        let rd = self.rd.clone();
        let mut rows = Vec::new();
        for x in rd.waff_up_to(max_len) {
            let h = self.kl(&x)?;
            let mut ys: Vec<(&Affine, &Laurent)> = h.terms().collect();
            ys.sort_by_key(|(y, _)| (rd.coxeter_length(y), **y));
            for (y, c) in ys {
                rows.push((*y, x, c.clone()));
            }
        }
        Ok(rows)
    }

    pub fn format_elt(&self, h: &HeckeElt) -> String {
        if h.is_zero() {
            return "0".into();
        }
        let mut keys: Vec<&Affine> = h.terms.keys().collect();
        keys.sort_by_key(|x| (self.len(x), **x));
        keys.iter()
            .map(|x| format!("({})H_{}", h.terms[x], self.rd.word_string(x)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn format_periodic(&self, p: &PeriodicElt) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut keys: Vec<&Alcove> = p.terms.keys().collect();
        keys.sort_by_key(|a| (self.rd.length(**a), **a));
        keys.iter()
            .map(|a| format!("({}){}", p.terms[a], self.rd.alcove_string(**a)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for PeriodicElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(a, c)| format!("({})[{:?}]", c, a.coord())).collect();
        write!(f, "{}", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
    }
}

/// Helper for tests and tables: evaluate a Laurent polynomial at `v = 1` as `i64`.
pub fn at_one(p: &Laurent) -> i64 {
    p.at_one().to_i64().unwrap_or(i64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hk(label: &str) -> Hecke {
        Hecke::new(Arc::new(RootDatum::from_label(label).unwrap()))
    }

    #[test]
    fn quadratic_relation() {
        let h = hk("A1");
        let rd = h.root_datum().clone();
        let s = HeckeElt::std(rd.wall(1).unwrap());
        let ss = h.mul(&s, &s).unwrap();
        let mut expect = HeckeElt::std(rd.id());
        expect.add(&s.scale(&quad()));
        assert_eq!(ss, expect);
        let inv = h.inv_std(&rd.wall(1).unwrap()).unwrap();
        assert_eq!(h.mul(&inv, &s).unwrap(), HeckeElt::std(rd.id()));
        let st = h.mul(&s, &HeckeElt::std(rd.wall(0).unwrap())).unwrap();
        assert_eq!(st, HeckeElt::std(rd.from_word(&[1, 0]).unwrap()));
    }

    #[test]
    fn a1_kl_monomials() {
        let mut h = hk("A1");
        let rd = h.root_datum().clone();
        for x in rd.waff_up_to(8) {
            let k = h.kl(&x).unwrap();
            assert_eq!(h.bar(&k).unwrap(), k);
            for y in rd.waff_up_to(8) {
                let c = k.coeff(&y);
                if rd.bruhat_leq(&y, &x) {
                    assert_eq!(c, Laurent::v_pow((rd.coxeter_length(&x) - rd.coxeter_length(&y)) as i32));
                } else {
                    assert!(c.is_zero());
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let mut h = Hecke::with_budget(Arc::new(RootDatum::from_label("A1").unwrap()), 3);
        let rd = h.root_datum().clone();
        let x = rd.from_word(&[0, 1, 0, 1]).unwrap();
        assert!(matches!(h.kl(&x), Err(Error::Budget { .. })));
    }

    /// Brute force: the unique bar-invariant element `H_x + Σ_{y<x} vZ[v] H_y`.
    fn brute_kl(h: &Hecke, x: &Affine) -> HeckeElt {
        let rd = h.root_datum();
        let lower: Vec<Affine> =
            rd.bruhat_lower(x).into_iter().filter(|y| y != x).collect::<Vec<_>>().into_iter().rev().collect();
        // unknown coefficients a_{y,i} v^i, 1 <= i <= l(x)-l(y); solve by
        // increasing depth using bar(H_x) expansions
        let mut cur = HeckeElt::std(*x);
        for y in lower {
            let mut test = h.bar(&cur).unwrap();
            test.sub(&cur);
            // coefficient at y must be killed by choosing p_y with p_y - bar(p_y) = test_y
            let d = test.coeff(&y);
            let mut p = Laurent::zero();
            for (e, c) in d.terms() {
                if e > 0 {
                    p.add_term(e, c);
                }
            }
            cur.add(&HeckeElt::monomial(y, p));
        }
        cur
    }

    #[test]
    fn a2_kl_against_brute_force() {
        let mut h = hk("A2");
        let rd = h.root_datum().clone();
        for x in rd.waff_up_to(3) {
            assert_eq!(h.kl(&x).unwrap(), brute_kl(&h, &x));
        }
        let x = rd.from_word(&[0, 1, 2]).unwrap();
        assert_eq!(h.kl_h(&rd.id(), &x).unwrap(), Laurent::v_pow(3));
    }

    #[test]
    fn parabolic_oracles() {
        let mut h = hk("A1");
        let rd = h.root_datum().clone();
        let w0 = rd.finite(rd.weyl().longest());
        let mins: Vec<Affine> = rd.waff_up_to(6).into_iter().filter(|x| rd.is_min_coset_rep(x)).collect();
        for x in &mins {
            assert_eq!(h.parabolic_mn(x, x, Flavor::Spherical).unwrap(), Laurent::one());
            for y in &mins {
                let m = h.parabolic_mn(y, x, Flavor::Spherical).unwrap();
                let hh = h.kl_h(&rd.mul(&w0, y), &rd.mul(&w0, x)).unwrap();
                assert_eq!(m, hh);
                let n = h.parabolic_mn(y, x, Flavor::Antispherical).unwrap();
                let mut expect = Laurent::zero();
                for z in rd.weyl().elements() {
                    let sign = Laurent::monomial(if rd.weyl().len(z).is_multiple_of(2) { 1 } else { -1 }, rd.weyl().len(z) as i32);
                    expect += &(&sign * &h.kl_h(&rd.mul(&rd.finite(z), y), x).unwrap());
                }
                assert_eq!(n, expect);
                if !rd.bruhat_leq(y, x) {
                    assert!(n.is_zero());
                }
            }
        }
        let nonmin = rd.wall(1).unwrap();
        assert!(h.parabolic_mn(&nonmin, &rd.id(), Flavor::Spherical).is_err());
    }

    #[test]
    fn periodic_examples() {
        let h = hk("A1");
        let rd = h.root_datum().clone();
        let a0 = rd.fundamental_alcove();
        let a1 = rd.right_act(a0, 0).unwrap();
        let p = h.periodic_mul_s(&PeriodicElt::alcove(a0), 0).unwrap();
        let mut expect = PeriodicElt::alcove(a1);
        expect.add_term(a0, &quad());
        assert_eq!(p, expect);
        assert_eq!(h.periodic_mul_s(&PeriodicElt::alcove(a1), 0).unwrap(), PeriodicElt::alcove(a0));
        // module law for the quadratic relation
        let mut q = PeriodicElt::alcove(a1);
        q.add_term(rd.right_act(a1, 1).unwrap(), &v(2));
        for s in 0..2 {
            let lhs = h.periodic_mul_s(&h.periodic_mul_s(&q, s).unwrap(), s).unwrap();
            let hs = HeckeElt::std(rd.wall(s).unwrap());
            let rhs = h.periodic_act(&q, &h.mul(&hs, &hs).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn theta_properties() {
        let h = hk("A1");
        let rd = h.root_datum().clone();
        assert_eq!(h.theta(&[0; MAXR]).unwrap(), HeckeElt::std(rd.id()));
        assert_eq!(h.theta(&[-2, 0, 0, 0]).unwrap(), HeckeElt::std(h.t0(&[-2, 0, 0, 0])));
        let a = h.theta(&[2, 0, 0, 0]).unwrap();
        let b = h.theta(&[-2, 0, 0, 0]).unwrap();
        assert_eq!(h.mul(&a, &b).unwrap(), HeckeElt::std(rd.id()));
        for lam in [[2, 0, 0, 0], [1, 0, 0, 0], [-3, 0, 0, 0]] {
            let t0 = h.theta_with(&lam, 0).unwrap();
            assert_eq!(h.theta_with(&lam, 1).unwrap(), t0);
            assert_eq!(h.theta_with(&lam, 2).unwrap(), t0);
        }
    }

    #[test]
    fn sequential_action_matches_product() {
        let h = hk("A2");
        let rd = h.root_datum().clone();
        let a0 = PeriodicElt::alcove(rd.fundamental_alcove());
        let c = rd.simple_coroot(0);
        let lam = [c[0], c[1], 0, 0];
        let w = rd.weyl().simple(1);
        let prod = h.mul(&h.theta(&lam).unwrap(), &HeckeElt::std(rd.finite(w))).unwrap();
        assert_eq!(h.periodic_act(&a0, &prod).unwrap(), h.kato_sides(&lam, w).unwrap().0);
        let x = rd.from_word(&[0, 1, 2, 0]).unwrap();
        let there = h.periodic_mul_std(&a0, &x, false).unwrap();
        assert_eq!(h.periodic_mul_std(&there, &x, true).unwrap(), a0);
    }

    #[test]
    fn kato_small() {
        let h = hk("A1");
        let rd = h.root_datum().clone();
        assert!(h.kato_check(&[0; MAXR], 0).unwrap());
        assert!(h.kato_check(&[-2, 0, 0, 0], 0).unwrap());
        assert!(h.kato_check(&[-2, 0, 0, 0], rd.weyl().simple(0)).unwrap());
    }

    #[test]
    fn generic_q_a1() {
        let h = hk("A1");
        let rd = h.root_datum().clone();
        let a0 = rd.fundamental_alcove();
        for n in 0..=5i64 {
            let a = if n % 2 == 0 {
                rd.alcove(&Affine::new(0, [-n, 0, 0, 0]))
            } else {
                rd.alcove(&Affine::new(rd.weyl().simple(0), [-n + 1, 0, 0, 0]))
            };
            assert_eq!(rd.length(a), -n);
            assert_eq!(h.generic_q(a, &[0; MAXR]), Laurent::v_pow(n as i32));
        }
        assert!(h.generic_q(rd.right_act(a0, 0).unwrap(), &[0; MAXR]).is_zero());
    }

    #[test]
    fn multiplicities() {
        let h = hk("A2");
        let m = h.weight_multiplicities(&[1, 1, 0, 0]).unwrap();
        assert_eq!(m.len(), 7);
        assert_eq!(m[&[0, 0, 0, 0]], 2);
        let h1 = hk("A1");
        let m = h1.weight_multiplicities(&[2, 0, 0, 0]).unwrap();
        assert_eq!(m.len(), 3);
        assert!(m.values().all(|&x| x == 1));
    }

    #[test]
    fn bernstein_a1() {
        let mut h = hk("A1");
        let rd = h.root_datum().clone();
        let lam = [2, 0, 0, 0];
        let coeffs = h.bernstein_expand(&lam).unwrap();
        let mults = h.weight_multiplicities(&lam).unwrap();
        assert_eq!(coeffs.len(), mults.len() * rd.weyl().order());
        let l0 = rd.weyl().len(rd.weyl().longest()) as i32;
        for ((mu, w), c) in &coeffs {
            let e = l0 - rd.weyl().len(*w) as i32;
            assert_eq!(*c, Laurent::monomial(mults[mu], e));
        }
        assert_eq!(coeffs[&(lam, rd.weyl().longest())], Laurent::one());
        let top = rd.mul(&rd.finite(rd.weyl().longest()), &h.t0(&lam));
        assert_eq!(h.from_bernstein(&coeffs).unwrap(), h.kl(&top).unwrap());
        assert!(Hecke::new(Arc::new(RootDatum::from_label("G2").unwrap())).bernstein_expand(&[2, 2, 0, 0]).is_err());
    }

    #[test]
    fn bernstein_a2() {
        let mut h = hk("A2");
        let rd = h.root_datum().clone();
        let lam = [1, 1, 0, 0];
        let coeffs = h.bernstein_expand(&lam).unwrap();
        let mults = h.weight_multiplicities(&lam).unwrap();
        let l0 = rd.weyl().len(rd.weyl().longest()) as i32;
        assert_eq!(coeffs.len(), mults.len() * rd.weyl().order());
        for ((mu, w), c) in &coeffs {
            assert_eq!(*c, Laurent::monomial(mults[mu], l0 - rd.weyl().len(*w) as i32));
        }
        let top = rd.mul(&rd.finite(rd.weyl().longest()), &h.t0(&lam));
        assert_eq!(h.from_bernstein(&coeffs).unwrap(), h.kl(&top).unwrap());
    }
}
