//! Alcoves as elements of `W_f ⋉ ZΦ∨`, the two commuting actions, the
//! periodic order and lengths. Elements of `W_aff` are identified with
//! alcoves through the fundamental alcove, so `W_aff` arithmetic is just
//! multiplication of [`Affine`] values.

use crate::error::{Error, Result};
use crate::rootdata::{Affine, RootDatum, Vector, MAXR};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

/// An alcove `t_λ w A₀⁺` with `λ` in the coroot lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Alcove(Affine);

impl Alcove {
    pub fn coord(&self) -> Affine {
        self.0
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

impl RootDatum {
    /// The alcove `g A₀⁺` for any extended element `g`.
    pub fn alcove(&self, g: &Affine) -> Alcove {
        if self.in_coroot_lattice(&g.t) {
            return Alcove(*g);
        }
        for om in self.omega() {
            let h = self.mul(g, &self.inv(om));
            if self.in_coroot_lattice(&h.t) {
                return Alcove(h);
            }
        }
        unreachable!("Omega meets every coset of the coroot lattice")
    }

    pub fn fundamental_alcove(&self) -> Alcove {
        Alcove(self.id())
    }

    /// Walls of the fundamental alcove: 0 is the affine wall of the first
    /// component, `1..=r` the finite simple walls, then the affine walls of
    /// the remaining components.
    pub fn nwalls(&self) -> usize {
        self.rank() + self.components().len()
    }

    pub fn wall(&self, s: usize) -> Result<Affine> {
        let r = self.rank();
        if s >= self.nwalls() {
            return Err(Error::BadWall { index: s, count: self.nwalls() });
        }
        if (1..=r).contains(&s) {
            return Ok(self.finite(self.weyl().simple(s - 1)));
        }
        let comp = if s == 0 { 0 } else { s - r };
        let th = self.highest_roots()[comp];
        Ok(self.affine_reflection(th, -1))
    }

    pub fn walls(&self) -> Vec<Affine> {
        (0..self.nwalls()).map(|s| self.wall(s).unwrap()).collect()
    }

    pub fn right_act(&self, a: Alcove, s: usize) -> Result<Alcove> {
        Ok(Alcove(self.mul(&a.0, &self.wall(s)?)))
    }

    pub fn left_act(&self, h: &Affine, a: Alcove) -> Alcove {
        self.alcove(&self.mul(h, &a.0))
    }

    /// `A + λ`.
    pub fn translate(&self, a: Alcove, lam: &Vector) -> Alcove {
        self.left_act(&self.translation(*lam), a)
    }

    /// The element of Ω whose translation part is congruent to `λ`.
    pub fn omega_of(&self, lam: &Vector) -> Affine {
        for om in self.omega() {
            let mut d = [0; MAXR];
            for k in 0..self.rank() {
                d[k] = lam[k] - om.t[k];
            }
            if self.in_coroot_lattice(&d) {
                return *om;
            }
        }
        unreachable!()
    }

    /// Barycenter of `g A₀⁺`, scaled by the barycenter denominator.
    pub fn scaled_bary(&self, g: &Affine) -> Vector {
        let (b, den) = self.barycenter();
        let wb = self.act_cov(g.w, &b);
        let mut out = [0; MAXR];
        for k in 0..self.rank() {
            out[k] = den * g.t[k] + wb[k];
        }
        out
    }

    /// `k_α` with `k_α < <α, a> < k_α + 1` on `g A₀⁺`.
    pub fn k_alpha(&self, g: &Affine, root: usize) -> i64 {
        let (_, den) = self.barycenter();
        let b = self.scaled_bary(g);
        floor_div(self.pairing(&self.root(root).root, &b), den)
    }

    pub fn kvec(&self, g: &Affine) -> Vec<i64> {
        let (_, den) = self.barycenter();
        let b = self.scaled_bary(g);
        self.positive_roots().iter().map(|&p| floor_div(self.pairing(&self.root(p).root, &b), den)).collect()
    }

    /// Periodic length, normalized so the fundamental alcove has length 0.
    pub fn length(&self, a: Alcove) -> i64 {
        self.kvec(&a.0).iter().sum()
    }

    /// Coxeter length of an extended element (hyperplanes separating `A₀⁺`
    /// and `g A₀⁺`).
    pub fn coxeter_length(&self, g: &Affine) -> i64 {
        self.kvec(g).iter().map(|k| k.abs()).sum()
    }

    /// Length via the closed formula in terms of `g = t_μ w`.
    pub fn length_formula(&self, g: &Affine) -> i64 {
        let winv = self.weyl().inv(g.w);
        let mut s = 0;
        for &p in self.positive_roots() {
            let a = &self.root(p).root;
            let wa = self.act_x(winv, a);
            let positive = wa.iter().any(|&c| c > 0);
            let m = self.pairing(a, &g.t);
            s += if positive { m.abs() } else { (m - 1).abs() };
        }
        s
    }

    pub fn is_dominant(&self, a: Alcove) -> bool {
        let b = self.scaled_bary(&a.0);
        (0..self.rank()).all(|i| b[i] > 0)
    }

    /// `α↑A` for a positive root index.
    pub fn up(&self, root: usize, a: Alcove) -> Alcove {
        let k = self.k_alpha(&a.0, root);
        Alcove(self.mul(&self.affine_reflection(root, -(k + 1)), &a.0))
    }

    pub fn down(&self, root: usize, a: Alcove) -> Alcove {
        let k = self.k_alpha(&a.0, root);
        Alcove(self.mul(&self.affine_reflection(root, -k), &a.0))
    }

    /// `det * C^{-1}(bary(b) - bary(a)) >= 0`, a necessary condition for `a <= b`.
    pub fn in_cone(&self, a: &Affine, b: &Affine) -> bool {
        let (ba, bb) = (self.scaled_bary(a), self.scaled_bary(b));
        let mut d = [0; MAXR];
        for k in 0..self.rank() {
            d[k] = bb[k] - ba[k];
        }
        let c = self.coroot_coords_scaled(&d);
        (0..self.rank()).all(|k| c[k] >= 0)
    }

    /// The periodic order.
    pub fn leq(&self, a: Alcove, b: Alcove) -> bool {
        if a == b {
            return true;
        }
        if !self.in_cone(&a.0, &b.0) {
            return false;
        }
        let lb = self.length(b);
        let mut seen = HashSet::from([a]);
        let mut queue = VecDeque::from([a]);
        while let Some(c) = queue.pop_front() {
            for &p in self.positive_roots() {
                let u = self.up(p, c);
                if u == b {
                    return true;
                }
                if self.length(u) < lb && self.in_cone(&u.0, &b.0) && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        false
    }

    /// `{C : A <= C <= B}`, sorted by (length, coordinate).
    pub fn interval(&self, a: Alcove, b: Alcove) -> Vec<Alcove> {
        if !self.leq(a, b) {
            return Vec::new();
        }
        let mut fwd = HashSet::from([a]);
        let mut queue = VecDeque::from([a]);
        while let Some(c) = queue.pop_front() {
            for &p in self.positive_roots() {
                let u = self.up(p, c);
                if self.in_cone(&u.0, &b.0) && fwd.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        let mut bwd = HashSet::from([b]);
        let mut queue = VecDeque::from([b]);
        while let Some(c) = queue.pop_front() {
            for &p in self.positive_roots() {
                let d = self.down(p, c);
                if self.in_cone(&a.0, &d.0) && bwd.insert(d) {
                    queue.push_back(d);
                }
            }
        }
        let mut out: Vec<Alcove> = fwd.intersection(&bwd).copied().collect();
        self.sort_alcoves(&mut out);
        out
    }

    /// Everything `<= b` of length `>= min_len`.
    pub fn lower_set(&self, b: Alcove, min_len: i64) -> Vec<Alcove> {
        let mut seen = HashSet::from([b]);
        let mut queue = VecDeque::from([b]);
        while let Some(c) = queue.pop_front() {
            for &p in self.positive_roots() {
                let d = self.down(p, c);
                if self.length(d) >= min_len && seen.insert(d) {
                    queue.push_back(d);
                }
            }
        }
        let mut out: Vec<Alcove> = seen.into_iter().collect();
        self.sort_alcoves(&mut out);
        out
    }

    pub fn sort_alcoves(&self, v: &mut [Alcove]) {
        v.sort_by_cached_key(|a| (self.length(*a), a.0));
    }

    /// Alcoves containing `ν` in their closure.
    fn around(&self, nu: &Vector) -> Vec<Alcove> {
        self.weyl().elements().map(|u| self.alcove(&Affine::new(u, *nu))).collect()
    }

    /// The maximal alcove containing `ν` in its closure.
    pub fn a_plus(&self, nu: &Vector) -> Alcove {
        self.around(nu).into_iter().max_by_key(|a| self.length(*a)).unwrap()
    }

    pub fn a_minus(&self, nu: &Vector) -> Alcove {
        self.around(nu).into_iter().min_by_key(|a| self.length(*a)).unwrap()
    }

    /// `w ↦ w^A` with `A = h A₀⁺`: the element `x` with `w A = A x`.
    pub fn to_waff(&self, w: &Affine, base: Alcove) -> Affine {
        let h = base.0;
        self.mul(&self.mul(&self.inv(&h), w), &h)
    }

    pub fn from_waff(&self, x: &Affine, base: Alcove) -> Affine {
        let h = base.0;
        self.mul(&self.mul(&h, x), &self.inv(&h))
    }

    /// Walls `s` with `g σ_s < g` in the Coxeter length.
    pub fn right_descents(&self, g: &Affine) -> Vec<usize> {
        let l = self.coxeter_length(g);
        (0..self.nwalls())
            .filter(|&s| self.coxeter_length(&self.mul(g, &self.wall(s).unwrap())) < l)
            .collect()
    }

    /// `g = ω σ_{s_1} ... σ_{s_k}`, a reduced expression.
    pub fn reduced_word(&self, g: &Affine) -> (Affine, Vec<usize>) {
        let mut word = Vec::new();
        let mut cur = *g;
        loop {
            let l = self.coxeter_length(&cur);
            if l == 0 {
                break;
            }
            let s = (0..self.nwalls())
                .find(|&s| self.coxeter_length(&self.mul(&cur, &self.wall(s).unwrap())) < l)
                .expect("nonzero length has a descent");
            word.push(s);
            cur = self.mul(&cur, &self.wall(s).unwrap());
        }
        word.reverse();
        (cur, word)
    }

    /// Product of walls.
    pub fn from_word(&self, word: &[usize]) -> Result<Affine> {
        let mut g = self.id();
        for &s in word {
            g = self.mul(&g, &self.wall(s)?);
        }
        Ok(g)
    }

    /// Bruhat order on the extended group.
    pub fn bruhat_leq(&self, x: &Affine, y: &Affine) -> bool {
        let mut memo = HashMap::new();
        self.bruhat_rec(*x, *y, &mut memo)
    }

    fn bruhat_rec(&self, x: Affine, y: Affine, memo: &mut HashMap<(Affine, Affine), bool>) -> bool {
        if let Some(&b) = memo.get(&(x, y)) {
            return b;
        }
        let (lx, ly) = (self.coxeter_length(&x), self.coxeter_length(&y));
        let res = if lx > ly {
            false
        } else if lx == ly {
            x == y
        } else {
            let s = *self.right_descents(&y).first().unwrap();
            let ws = self.wall(s).unwrap();
            let ys = self.mul(&y, &ws);
            let xs = self.mul(&x, &ws);
            let xmin = if self.coxeter_length(&xs) < lx { xs } else { x };
            self.bruhat_rec(xmin, ys, memo)
        };
        memo.insert((x, y), res);
        res
    }

    /// All elements of `W_aff` of length at most `n`, by (length, coordinate).
    pub fn waff_up_to(&self, n: i64) -> Vec<Affine> {
        let mut seen = HashSet::from([self.id()]);
        let mut frontier = vec![self.id()];
        let mut out = vec![self.id()];
        for _ in 0..n {
            let mut next = Vec::new();
            for g in &frontier {
                for s in 0..self.nwalls() {
                    let h = self.mul(g, &self.wall(s).unwrap());
                    if seen.insert(h) {
                        next.push(h);
                    }
                }
            }
            next.sort_by_key(|h| (self.coxeter_length(h), *h));
            out.extend(next.iter().copied());
            frontier = next;
        }
        out.sort_by_key(|h| (self.coxeter_length(h), *h));
        out
    }

    /// `{y <= top}` in the Bruhat order, sorted by (length, coordinate).
    pub fn bruhat_lower(&self, top: &Affine) -> Vec<Affine> {
        let (om, _) = self.reduced_word(top);
        let l = self.coxeter_length(top);
        let mut out: Vec<Affine> = self
            .waff_up_to(l)
            .into_iter()
            .map(|x| self.mul(&om, &x))
            .filter(|x| self.bruhat_leq(x, top))
            .collect();
        out.sort_by_key(|h| (self.coxeter_length(h), *h));
        out
    }

    /// Minimal representative of `W_f x`: its alcove is dominant.
    pub fn is_min_coset_rep(&self, x: &Affine) -> bool {
        let b = self.scaled_bary(x);
        (0..self.rank()).all(|i| b[i] > 0)
    }

    /// The minimal representative of `W_f x`.
    pub fn min_coset_rep(&self, x: &Affine) -> Affine {
        self.weyl()
            .elements()
            .map(|u| self.mul(&self.finite(u), x))
            .find(|y| self.is_min_coset_rep(y))
            .unwrap()
    }

    /// Human-readable alcove: `(n,n+1)` in rank one, the k-vector in rank
    /// two, `t[λ]·w` otherwise.
    pub fn alcove_string(&self, a: Alcove) -> String {
        match self.rank() {
            1 => {
                let k = self.kvec(&a.0)[0];
                format!("({},{})", k, k + 1)
            }
            2 => {
                let k = self.kvec(&a.0);
                let parts: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                format!("[{}]", parts.join(","))
            }
            _ => self.coord_string(&a.0),
        }
    }

    /// `t[λ]·w` with `w` a reduced word in finite simple reflections.
    pub fn coord_string(&self, g: &Affine) -> String {
        let mut s = String::from("t[");
        let parts: Vec<String> = g.t[..self.rank()].iter().map(|x| x.to_string()).collect();
        s.push_str(&parts.join(","));
        s.push_str("]·");
        let word = self.weyl().word(g.w);
        if word.is_empty() {
            s.push('e');
        } else {
            for i in word {
                let _ = write!(s, "s{}", i + 1);
            }
        }
        s
    }

    /// Reduced word of a `W_aff` element, e.g. `s0s1`, or `e`.
    pub fn word_string(&self, g: &Affine) -> String {
        let (om, word) = self.reduced_word(g);
        let mut s = String::new();
        if om != self.id() {
            s.push_str(&format!("w{}", self.omega().iter().position(|o| *o == om).unwrap_or(0)));
        }
        for w in &word {
            let _ = write!(s, "s{}", w);
        }
        if s.is_empty() {
            s.push('e');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a1() -> RootDatum {
        RootDatum::from_label("A1").unwrap()
    }

    fn a1_alcove(rd: &RootDatum, n: i64) -> Alcove {
        // (n, n+1) = t_n A₀⁺ for even n, t_{n+1} s A₀⁺ for odd n
        if n % 2 == 0 {
            rd.alcove(&Affine::new(0, [n, 0, 0, 0]))
        } else {
            rd.alcove(&Affine::new(rd.weyl().simple(0), [n + 1, 0, 0, 0]))
        }
    }

    fn random_alcove(rd: &RootDatum, rng: &mut ChaCha8Rng, steps: usize) -> Alcove {
        let mut a = rd.fundamental_alcove();
        for _ in 0..steps {
            a = rd.right_act(a, rng.gen_range(0..rd.nwalls())).unwrap();
        }
        a
    }

    #[test]
    fn a1_walls() {
        let rd = a1();
        let a0 = rd.fundamental_alcove();
        assert_eq!(rd.alcove_string(a0), "(0,1)");
        assert_eq!(rd.alcove_string(rd.right_act(a0, 0).unwrap()), "(1,2)");
        assert_eq!(rd.alcove_string(rd.right_act(a0, 1).unwrap()), "(-1,0)");
        assert!(rd.right_act(a0, 2).is_err());
        for n in -5..5 {
            assert_eq!(rd.alcove_string(a1_alcove(&rd, n)), format!("({},{})", n, n + 1));
        }
    }

    #[test]
    fn a1_up_down_and_length() {
        let rd = a1();
        let p = rd.positive_roots()[0];
        let a0 = rd.fundamental_alcove();
        assert_eq!(rd.alcove_string(rd.up(p, a0)), "(1,2)");
        assert_eq!(rd.up(p, rd.up(p, a0)), rd.translate(a0, &[2, 0, 0, 0]));
        for n in -3..=3 {
            assert_eq!(rd.length(a1_alcove(&rd, n)), n);
        }
        assert!(rd.leq(a0, a1_alcove(&rd, 3)));
        assert_eq!(rd.interval(a0, a1_alcove(&rd, 3)).len(), 4);
        assert!(!rd.leq(a0, a1_alcove(&rd, -1)));
        assert_eq!(rd.a_plus(&[0; MAXR]), a0);
        assert_eq!(rd.alcove_string(rd.a_minus(&[0; MAXR])), "(-1,0)");
    }

    #[test]
    fn omega_a1() {
        let rd = a1();
        let om = rd.omega_of(&[1, 0, 0, 0]);
        assert_ne!(om, rd.id());
        assert_eq!(rd.mul(&om, &om), rd.id());
        assert_eq!(rd.coxeter_length(&om), 0);
        assert_eq!(rd.omega_of(&[2, 0, 0, 0]), rd.id());
        let t = rd.translation([2, 0, 0, 0]);
        assert_eq!(rd.coxeter_length(&t), 2);
        assert_eq!(rd.reduced_word(&t).1.len(), 2);
    }

    #[test]
    fn lengths_agree_and_translate() {
        for label in ["A1", "A2", "B2", "G2", "A1xA1"] {
            let rd = RootDatum::from_label(label).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..100 {
                let a = random_alcove(&rd, &mut rng, 12);
                let g = a.coord();
                assert_eq!(rd.length_formula(&g), rd.coxeter_length(&g));
                let (om, word) = rd.reduced_word(&g);
                assert_eq!(om, rd.id());
                assert_eq!(word.len() as i64, rd.coxeter_length(&g));
                let mut lam = [0; MAXR];
                for x in lam.iter_mut().take(rd.rank()) {
                    *x = rng.gen_range(-3..=3);
                }
                let b = rd.translate(a, &lam);
                assert_eq!(rd.length(b) - rd.length(a), rd.pairing(&rd.two_rho(), &lam));
                let p = rd.positive_roots()[rng.gen_range(0..rd.positive_roots().len())];
                assert_eq!(rd.down(p, rd.up(p, a)), a);
                let s = rng.gen_range(0..rd.nwalls());
                assert_eq!(rd.right_act(rd.right_act(a, s).unwrap(), s).unwrap(), a);
                assert!((rd.length(rd.right_act(a, s).unwrap()) - rd.length(a)).abs() == 1);
            }
        }
    }

    #[test]
    fn a_plus_is_translate() {
        for label in ["A1", "A2", "B2"] {
            let rd = RootDatum::from_label(label).unwrap();
            for k in -2..=2 {
                let mut nu = rd.rho_check();
                for x in nu.iter_mut() {
                    *x *= k;
                }
                let ap = rd.a_plus(&nu);
                assert_eq!(rd.alcove(&rd.translation(nu)), ap);
                for c in rd.around(&nu) {
                    assert!(rd.leq(c, ap));
                    assert!(rd.leq(rd.a_minus(&nu), c));
                }
            }
        }
    }

    #[test]
    fn conjugation_rule() {
        let rd = RootDatum::from_label("A2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = random_alcove(&rd, &mut rng, 6);
            let x = random_alcove(&rd, &mut rng, 5).coord();
            let w = random_alcove(&rd, &mut rng, 5).coord();
            let ax = Alcove(rd.mul(&a.coord(), &x));
            let lhs = rd.to_waff(&w, ax);
            let rhs = rd.mul(&rd.mul(&rd.inv(&x), &rd.to_waff(&w, a)), &x);
            assert_eq!(lhs, rhs);
            assert_eq!(rd.from_waff(&rd.to_waff(&w, a), a), w);
        }
        assert_eq!(rd.to_waff(&rd.id(), rd.fundamental_alcove()), rd.id());
    }

    #[test]
    fn bruhat_dihedral() {
        let rd = a1();
        let top = rd.from_word(&[0, 1]).unwrap();
        assert_eq!(rd.bruhat_lower(&top).len(), 4);
        let elems = rd.waff_up_to(4);
        assert_eq!(elems.len(), 9);
    }
}
