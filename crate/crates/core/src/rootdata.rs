//! Root data of small crystallographic types, the finite Weyl group, and the
//! affine (co)weight spaces with the extended affine Weyl group action.
//!
//! `X` is the root lattice and `X∨` the coweight lattice, both written in
//! coordinates so that the pairing is the dot product.

use crate::error::{Error, Result};
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

pub const MAXR: usize = 4;
pub type Vector = [i64; MAXR];
pub(crate) type Mat = [[i64; MAXR]; MAXR];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CartanType {
    A1,
    A2,
    B2,
    G2,
    /// Product of `n >= 2` copies of A1.
    A1Power(u8),
}

impl FromStr for CartanType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        Ok(match t.as_str() {
            "A1" => CartanType::A1,
            "A2" => CartanType::A2,
            "B2" | "C2" => CartanType::B2,
            "G2" => CartanType::G2,
            _ => {
                let n = if let Some(rest) = t.strip_prefix("A1^") {
                    rest.parse::<u8>().ok()
                } else if t.split('X').all(|p| p == "A1") {
                    Some(t.split('X').count() as u8)
                } else {
                    None
                };
                match n {
                    Some(1) => CartanType::A1,
                    Some(n) if (2..=MAXR as u8).contains(&n) => CartanType::A1Power(n),
                    _ => return Err(Error::UnknownType(s.to_string())),
                }
            }
        })
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanType::A1 => write!(f, "A1"),
            CartanType::A2 => write!(f, "A2"),
            CartanType::B2 => write!(f, "B2"),
            CartanType::G2 => write!(f, "G2"),
            CartanType::A1Power(n) => {
                let parts: Vec<&str> = (0..*n).map(|_| "A1").collect();
                write!(f, "{}", parts.join("x"))
            }
        }
    }
}

impl CartanType {
    /// `cartan[i][j] = <alpha_i, alpha_j^vee>`.
    fn cartan(self) -> Vec<Vec<i64>> {
        match self {
            CartanType::A1 => vec![vec![2]],
            CartanType::A2 => vec![vec![2, -1], vec![-1, 2]],
            CartanType::B2 => vec![vec![2, -2], vec![-1, 2]],
            CartanType::G2 => vec![vec![2, -3], vec![-1, 2]],
            CartanType::A1Power(n) => {
                let n = n as usize;
                (0..n)
                    .map(|i| (0..n).map(|j| if i == j { 2 } else { 0 }).collect())
                    .collect()
            }
        }
    }
}

/// An element `t_t w` of `W_f ⋉ X∨`, acting on `X∨ ⊗ R` by `v ↦ w v + t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Affine {
    pub w: u8,
    pub t: Vector,
}

impl Affine {
    pub fn new(w: u8, t: Vector) -> Self {
        Affine { w, t }
    }
}

#[derive(Clone, Debug)]
pub struct Root {
    /// In `X`.
    pub root: Vector,
    /// In `X∨`.
    pub coroot: Vector,
    pub positive: bool,
    pub height: i64,
    /// Index of `s_alpha` in the Weyl group.
    pub reflection: u8,
    /// `(alpha∨, alpha∨)`, always even.
    pub norm: i64,
}

#[derive(Clone, Debug)]
pub struct WeylGroup {
    cov: Vec<Mat>,
    words: Vec<Vec<u8>>,
    mul: Vec<Vec<u8>>,
    inv: Vec<u8>,
    det: Vec<i64>,
    simple: Vec<u8>,
    longest: u8,
}

impl WeylGroup {
    pub fn order(&self) -> usize {
        self.cov.len()
    }
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize][b as usize]
    }
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }
    pub fn len(&self, a: u8) -> usize {
        self.words[a as usize].len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Reduced word in finite simple indices `0..r`.
    pub fn word(&self, a: u8) -> &[u8] {
        &self.words[a as usize]
    }
    pub fn simple(&self, i: usize) -> u8 {
        self.simple[i]
    }
    pub fn det(&self, a: u8) -> i64 {
        self.det[a as usize]
    }
    pub fn longest(&self) -> u8 {
        self.longest
    }
    pub fn identity(&self) -> u8 {
        0
    }
    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.cov.len() as u8
    }
    pub(crate) fn matrix(&self, a: u8) -> &Mat {
        &self.cov[a as usize]
    }
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    ty: CartanType,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    components: Vec<Vec<usize>>,
    sym: Vec<i64>,
    form: Vec<Vec<Rational64>>,
    form_den: i64,
    form_int: Vec<Vec<i64>>,
    weyl: WeylGroup,
    roots: Vec<Root>,
    positive: Vec<usize>,
    root_index: HashMap<Vector, usize>,
    highest: Vec<usize>,
    rho2: Vector,
    rho_check: Vector,
    bary: Vector,
    bary_den: i64,
    omega: Vec<Affine>,
    adj: Mat,
    det: i64,
}

fn mat_identity(r: usize) -> Mat {
    let mut m = [[0; MAXR]; MAXR];
    for (i, row) in m.iter_mut().enumerate().take(r) {
        row[i] = 1;
    }
    m
}

fn mat_mul(a: &Mat, b: &Mat, r: usize) -> Mat {
    let mut m = [[0; MAXR]; MAXR];
    for i in 0..r {
        for j in 0..r {
            m[i][j] = (0..r).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

fn mat_vec(a: &Mat, v: &Vector, r: usize) -> Vector {
    let mut out = [0; MAXR];
    for i in 0..r {
        out[i] = (0..r).map(|k| a[i][k] * v[k]).sum();
    }
    out
}

fn det_and_adj(c: &[Vec<i64>]) -> (i64, Mat) {
    let r = c.len();
    let minor_det = |skip_r: usize, skip_c: usize| -> i64 {
        let rows: Vec<usize> = (0..r).filter(|&i| i != skip_r).collect();
        let cols: Vec<usize> = (0..r).filter(|&j| j != skip_c).collect();
        det_small(&rows.iter().map(|&i| cols.iter().map(|&j| c[i][j]).collect()).collect::<Vec<Vec<i64>>>())
    };
    let det = det_small(c);
    let mut adj = [[0; MAXR]; MAXR];
    if r == 1 {
        adj[0][0] = 1;
        return (det, adj);
    }
    for i in 0..r {
        for j in 0..r {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = sign * minor_det(i, j);
        }
    }
    (det, adj)
}

fn det_small(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let sub: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).collect())
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det_small(&sub)
        })
        .sum()
}

impl RootDatum {
    pub fn new(ty: CartanType) -> Self {
        let cartan = ty.cartan();
        let r = cartan.len();

        // connected components of the Dynkin diagram
        let mut comp_of = vec![usize::MAX; r];
        let mut components: Vec<Vec<usize>> = Vec::new();
        for start in 0..r {
            if comp_of[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            comp_of[start] = id;
            while let Some(i) = stack.pop() {
                members.push(i);
                for j in 0..r {
                    if cartan[i][j] != 0 && comp_of[j] == usize::MAX {
                        comp_of[j] = id;
                        stack.push(j);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }

        // symmetrizer: c_i cartan[i][j] = c_j cartan[j][i], min 2 per component
        let mut symq = vec![Rational64::zero(); r];
        for comp in &components {
            symq[comp[0]] = Rational64::one();
            let mut stack = vec![comp[0]];
            while let Some(i) = stack.pop() {
                for &j in comp {
                    if cartan[i][j] != 0 && symq[j].is_zero() {
                        symq[j] = symq[i] * Rational64::new(cartan[i][j], cartan[j][i]);
                        stack.push(j);
                    }
                }
            }
            let min = comp.iter().map(|&i| symq[i]).min().unwrap();
            for &i in comp {
                symq[i] = symq[i] / min * Rational64::from_integer(2);
            }
        }
        let sym: Vec<i64> = symq.iter().map(|q| q.to_integer()).collect();

        let (det, adj) = det_and_adj(&cartan);

        // form on X∨: C^{-T} G C^{-1}, G[i][j] = cartan[i][j] c_i / 2
        let cinv = |i: usize, j: usize| Rational64::new(adj[i][j], det);
        let g = |i: usize, j: usize| Rational64::new(cartan[i][j] * sym[i], 2);
        let mut form = vec![vec![Rational64::zero(); r]; r];
        for a in 0..r {
            for b in 0..r {
                let mut s = Rational64::zero();
                for i in 0..r {
                    for j in 0..r {
                        s += cinv(i, a) * g(i, j) * cinv(j, b);
                    }
                }
                form[a][b] = s;
            }
        }
        let mut den = 1i64;
        for row in &form {
            for q in row {
                den = den.lcm(q.denom());
            }
        }
        let form_den = 2 * den;
        let form_int: Vec<Vec<i64>> = form
            .iter()
            .map(|row| row.iter().map(|q| (*q * Rational64::from_integer(form_den)).to_integer()).collect())
            .collect();

        // Weyl group via its action on X∨: s_i(v) = v - v_i alpha_i∨, alpha_i∨ = column i
        let gens: Vec<Mat> = (0..r)
            .map(|i| {
                let mut m = mat_identity(r);
                for k in 0..r {
                    m[k][i] -= cartan[k][i];
                }
                m
            })
            .collect();
        let mut cov: Vec<Mat> = vec![mat_identity(r)];
        let mut words: Vec<Vec<u8>> = vec![vec![]];
        let mut index: HashMap<Mat, u8> = HashMap::new();
        index.insert(mat_identity(r), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for (i, gm) in gens.iter().enumerate() {
                let m = mat_mul(gm, &cov[a], r);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(m) {
                    e.insert(cov.len() as u8);
                    let mut w = vec![i as u8];
                    w.extend_from_slice(&words[a]);
                    cov.push(m);
                    words.push(w);
                    queue.push_back(cov.len() - 1);
                }
            }
        }
        let n = cov.len();
        let mul: Vec<Vec<u8>> = (0..n)
            .map(|a| (0..n).map(|b| index[&mat_mul(&cov[a], &cov[b], r)]).collect())
            .collect();
        let inv: Vec<u8> = (0..n).map(|a| (0..n).find(|&b| mul[a][b] == 0).unwrap() as u8).collect();
        let dets: Vec<i64> = words.iter().map(|w| if w.len() % 2 == 0 { 1 } else { -1 }).collect();
        let simple: Vec<u8> = (0..r).map(|i| index[&gens[i]]).collect();
        let longest = (0..n).max_by_key(|&a| words[a].len()).unwrap() as u8;
        let weyl = WeylGroup { cov, words, mul, inv, det: dets, simple, longest };

        // roots: orbit of simple roots; the action on X is transpose of cov(w^{-1})
        let act_x = |w: u8, x: &Vector| -> Vector {
            let m = weyl.matrix(weyl.inv(w));
            let mut out = [0; MAXR];
            for (i, o) in out.iter_mut().enumerate().take(r) {
                *o = (0..r).map(|k| m[k][i] * x[k]).sum();
            }
            out
        };
        let mut roots: Vec<Root> = Vec::new();
        let mut root_index: HashMap<Vector, usize> = HashMap::new();
        for w in weyl.elements() {
            for i in 0..r {
                let mut e = [0; MAXR];
                e[i] = 1;
                let x = act_x(w, &e);
                if root_index.contains_key(&x) {
                    continue;
                }
                let mut ci = [0; MAXR];
                for (k, c) in ci.iter_mut().enumerate().take(r) {
                    *c = cartan[k][i];
                }
                let cor = mat_vec(weyl.matrix(w), &ci, r);
                let positive = x.iter().any(|&c| c > 0);
                let height = x.iter().sum();
                root_index.insert(x, roots.len());
                roots.push(Root { root: x, coroot: cor, positive, height, reflection: 0, norm: sym[i] });
            }
        }
        for root in roots.iter_mut() {
            let mut m = mat_identity(r);
            for k in 0..r {
                for j in 0..r {
                    m[k][j] -= root.coroot[k] * root.root[j];
                }
            }
            root.reflection = index[&m];
        }
        let mut positive: Vec<usize> = (0..roots.len()).filter(|&i| roots[i].positive).collect();
        positive.sort_by_key(|&i| (roots[i].height, std::cmp::Reverse(roots[i].root)));

        let highest: Vec<usize> = components
            .iter()
            .map(|comp| {
                *positive
                    .iter()
                    .filter(|&&p| (0..r).all(|k| roots[p].root[k] == 0 || comp.contains(&k)))
                    .max_by_key(|&&p| roots[p].height)
                    .unwrap()
            })
            .collect();

        let mut rho2 = [0; MAXR];
        let mut cor_sum = [0; MAXR];
        for &p in &positive {
            for k in 0..r {
                rho2[k] += roots[p].root[k];
                cor_sum[k] += roots[p].coroot[k];
            }
        }
        let mut rho_check = [0; MAXR];
        for k in 0..r {
            assert!(cor_sum[k] % 2 == 0, "half sum of positive coroots must be integral");
            rho_check[k] = cor_sum[k] / 2;
        }

        // barycenter of the fundamental alcove, coordinate i = 1/((|I|+1) m_i)
        let mut bary_den = 1i64;
        let mut denoms = [1i64; MAXR];
        for (ci, comp) in components.iter().enumerate() {
            let theta = &roots[highest[ci]].root;
            for &i in comp {
                denoms[i] = (comp.len() as i64 + 1) * theta[i];
                bary_den = bary_den.lcm(&denoms[i]);
            }
        }
        let mut bary = [0; MAXR];
        for i in 0..r {
            bary[i] = bary_den / denoms[i];
        }

        let mut rd = RootDatum {
            ty,
            rank: r,
            cartan,
            components,
            sym,
            form,
            form_den,
            form_int,
            weyl,
            roots,
            positive,
            root_index,
            highest,
            rho2,
            rho_check,
            bary,
            bary_den,
            omega: Vec::new(),
            adj,
            det,
        };
        let mut omega = Vec::new();
        for w in rd.weyl.elements() {
            let wb = rd.act_cov(w, &rd.bary);
            let mut t = [0; MAXR];
            let mut ok = true;
            for k in 0..r {
                let diff = rd.bary[k] - wb[k];
                if diff % rd.bary_den != 0 {
                    ok = false;
                }
                t[k] = diff / rd.bary_den;
            }
            if ok {
                omega.push(Affine::new(w, t));
            }
        }
        rd.omega = omega;
        rd
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Ok(RootDatum::new(label.parse()?))
    }

    pub fn cartan_type(&self) -> CartanType {
        self.ty
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }
    pub fn weyl(&self) -> &WeylGroup {
        &self.weyl
    }
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }
    pub fn root(&self, i: usize) -> &Root {
        &self.roots[i]
    }
    /// Indices of positive roots, by increasing height.
    pub fn positive_roots(&self) -> &[usize] {
        &self.positive
    }
    pub fn root_index(&self, x: &Vector) -> Option<usize> {
        self.root_index.get(x).copied()
    }
    /// Highest root of each irreducible component.
    pub fn highest_roots(&self) -> &[usize] {
        &self.highest
    }
    pub fn simple_root(&self, i: usize) -> Vector {
        let mut e = [0; MAXR];
        e[i] = 1;
        e
    }
    pub fn simple_coroot(&self, i: usize) -> Vector {
        let mut e = [0; MAXR];
        for (k, x) in e.iter_mut().enumerate().take(self.rank) {
            *x = self.cartan[k][i];
        }
        e
    }
    /// Twice the half sum of positive roots.
    pub fn two_rho(&self) -> Vector {
        self.rho2
    }
    pub fn rho_check(&self) -> Vector {
        self.rho_check
    }
    /// Symmetrizing integers `(alpha_i∨, alpha_i∨)`.
    pub fn coroot_norms(&self) -> &[i64] {
        &self.sym
    }
    pub fn form_matrix(&self) -> &[Vec<Rational64>] {
        &self.form
    }
    /// `D` such that `D * form` is integral and `D/2 * form` is too.
    pub fn form_scale(&self) -> i64 {
        self.form_den
    }
    /// `D * form`.
    pub fn form_scaled(&self) -> &[Vec<i64>] {
        &self.form_int
    }
    /// Barycenter of the fundamental alcove over `bary_den`.
    pub fn barycenter(&self) -> (Vector, i64) {
        (self.bary, self.bary_den)
    }
    /// Length zero elements of the extended group.
    pub fn omega(&self) -> &[Affine] {
        &self.omega
    }
    pub fn det_cartan(&self) -> i64 {
        self.det
    }

    pub fn pairing(&self, x: &Vector, v: &Vector) -> i64 {
        (0..self.rank).map(|k| x[k] * v[k]).sum()
    }

    pub fn form(&self, a: &Vector, b: &Vector) -> Rational64 {
        let mut s = Rational64::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += self.form[i][j] * Rational64::from_integer(a[i] * b[j]);
            }
        }
        s
    }

    /// `D * (a, b)`, an integer.
    pub fn form_times_scale(&self, a: &Vector, b: &Vector) -> i64 {
        let mut s = 0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += self.form_int[i][j] * a[i] * b[j];
            }
        }
        s
    }

    /// Action of `w` on `X∨`.
    pub fn act_cov(&self, w: u8, v: &Vector) -> Vector {
        mat_vec(self.weyl.matrix(w), v, self.rank)
    }

    /// Action of `w` on `X`.
    pub fn act_x(&self, w: u8, x: &Vector) -> Vector {
        let m = self.weyl.matrix(self.weyl.inv(w));
        let mut out = [0; MAXR];
        for (i, o) in out.iter_mut().enumerate().take(self.rank) {
            *o = (0..self.rank).map(|k| m[k][i] * x[k]).sum();
        }
        out
    }

    /// Coordinates of `v` in the basis of simple coroots, if integral.
    pub fn coroot_coords(&self, v: &Vector) -> Option<Vector> {
        let a = mat_vec(&self.adj, v, self.rank);
        let mut out = [0; MAXR];
        for k in 0..self.rank {
            if a[k] % self.det != 0 {
                return None;
            }
            out[k] = a[k] / self.det;
        }
        Some(out)
    }

    /// `det * C^{-1} v`, used for cone tests.
    pub fn coroot_coords_scaled(&self, v: &Vector) -> Vector {
        let mut a = mat_vec(&self.adj, v, self.rank);
        if self.det < 0 {
            for x in a.iter_mut() {
                *x = -*x;
            }
        }
        a
    }

    pub fn in_coroot_lattice(&self, v: &Vector) -> bool {
        self.coroot_coords(v).is_some()
    }

    /// `N_1 = max(max <rho, alpha∨>, 1)` as a rational.
    pub fn n1(&self) -> Rational64 {
        let m = self
            .positive
            .iter()
            .map(|&p| Rational64::new(self.pairing(&self.rho2, &self.roots[p].coroot), 2))
            .max()
            .unwrap_or_else(Rational64::zero);
        m.max(Rational64::one())
    }

    pub fn info(&self) -> RootDatumInfo {
        RootDatumInfo {
            label: self.ty.to_string(),
            rank: self.rank,
            cartan: self.cartan.clone(),
            simple_roots: (0..self.rank).map(|i| self.simple_root(i)[..self.rank].to_vec()).collect(),
            simple_coroots: (0..self.rank).map(|i| self.simple_coroot(i)[..self.rank].to_vec()).collect(),
            form: self.form.iter().map(|row| row.iter().map(|q| q.to_string()).collect()).collect(),
            rho_check: self.rho_check[..self.rank].to_vec(),
            form_normalization: "(a∨,a∨) = 2 for short coroots, scaled by symmetrizing integers".into(),
            length_normalization: "hyperplane count, length of the fundamental alcove = 0".into(),
        }
    }
}

/// JSON description of a root datum.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RootDatumInfo {
    pub label: String,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub simple_roots: Vec<Vec<i64>>,
    pub simple_coroots: Vec<Vec<i64>>,
    pub form: Vec<Vec<String>>,
    pub rho_check: Vec<i64>,
    pub form_normalization: String,
    pub length_normalization: String,
}

// ---------------------------------------------------------------------------
// group arithmetic in W_f ⋉ X∨

impl RootDatum {
    pub fn id(&self) -> Affine {
        Affine::new(0, [0; MAXR])
    }

    pub fn mul(&self, a: &Affine, b: &Affine) -> Affine {
        let wt = self.act_cov(a.w, &b.t);
        let mut t = [0; MAXR];
        for k in 0..self.rank {
            t[k] = a.t[k] + wt[k];
        }
        Affine::new(self.weyl.mul(a.w, b.w), t)
    }

    pub fn inv(&self, a: &Affine) -> Affine {
        let wi = self.weyl.inv(a.w);
        let mut t = self.act_cov(wi, &a.t);
        for x in t.iter_mut() {
            *x = -*x;
        }
        Affine::new(wi, t)
    }

    pub fn translation(&self, t: Vector) -> Affine {
        Affine::new(0, t)
    }

    pub fn finite(&self, w: u8) -> Affine {
        Affine::new(w, [0; MAXR])
    }

    /// The affine reflection `s_(alpha, n)` in the hyperplane `<alpha, v> + n = 0`.
    pub fn affine_reflection(&self, root: usize, n: i64) -> Affine {
        let ro = &self.roots[root];
        let mut t = [0; MAXR];
        for k in 0..self.rank {
            t[k] = -n * ro.coroot[k];
        }
        Affine::new(ro.reflection, t)
    }

    /// If `g` is an affine reflection `s_(gamma, n)` with `gamma > 0`, return `(gamma, n)`.
    pub fn as_reflection(&self, g: &Affine) -> Option<(usize, i64)> {
        if self.weyl.det(g.w) != -1 || self.weyl.mul(g.w, g.w) != 0 {
            return None;
        }
        let &p = self.positive.iter().find(|&&p| self.roots[p].reflection == g.w)?;
        let cor = &self.roots[p].coroot;
        // t = -n gamma∨
        let k = (0..self.rank).find(|&k| cor[k] != 0)?;
        if g.t[k] % cor[k] != 0 {
            return None;
        }
        let n = -g.t[k] / cor[k];
        if (0..self.rank).all(|j| g.t[j] == -n * cor[j]) {
            Some((p, n))
        } else {
            None
        }
    }
}

// ---------------------------------------------------------------------------
// affine weights and coweights

/// A vector `(finite, r, s)` of `X ⊗ Q ⊕ Q ⊕ Q` or `X∨ ⊗ Q ⊕ Q ⊕ Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffVec {
    pub datum: CartanType,
    pub finite: Vec<Rational64>,
    pub delta: Rational64,
    pub grading: Rational64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineWeight(pub AffVec);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineCoweight(pub AffVec);

fn qvec(v: &Vector, r: usize) -> Vec<Rational64> {
    v[..r].iter().map(|&x| Rational64::from_integer(x)).collect()
}

impl AffVec {
    pub fn new(rd: &RootDatum, finite: &Vector, delta: Rational64, grading: Rational64) -> Self {
        AffVec { datum: rd.ty, finite: qvec(finite, rd.rank), delta, grading }
    }

    fn scaled(&self, c: Rational64) -> AffVec {
        AffVec {
            datum: self.datum,
            finite: self.finite.iter().map(|x| *x * c).collect(),
            delta: self.delta * c,
            grading: self.grading * c,
        }
    }

    fn sub(&self, o: &AffVec) -> AffVec {
        AffVec {
            datum: self.datum,
            finite: self.finite.iter().zip(&o.finite).map(|(a, b)| *a - *b).collect(),
            delta: self.delta - o.delta,
            grading: self.grading - o.grading,
        }
    }
}

impl AffineWeight {
    pub fn new(rd: &RootDatum, finite: &Vector, delta: i64, grading: i64) -> Self {
        AffineWeight(AffVec::new(rd, finite, delta.into(), grading.into()))
    }
}

impl AffineCoweight {
    pub fn new(rd: &RootDatum, finite: &Vector, delta: i64, grading: i64) -> Self {
        AffineCoweight(AffVec::new(rd, finite, delta.into(), grading.into()))
    }
    pub fn sub(&self, o: &AffineCoweight) -> AffineCoweight {
        AffineCoweight(self.0.sub(&o.0))
    }
    pub fn scaled(&self, c: Rational64) -> AffineCoweight {
        AffineCoweight(self.0.scaled(c))
    }
}

/// An affine root `(alpha, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineRoot {
    pub root: usize,
    pub level: i64,
}

impl RootDatum {
    fn rmat_vec_cov(&self, w: u8, v: &[Rational64]) -> Vec<Rational64> {
        let m = self.weyl.matrix(w);
        (0..self.rank)
            .map(|i| (0..self.rank).fold(Rational64::zero(), |s, k| s + v[k] * m[i][k]))
            .collect()
    }

    fn rmat_vec_x(&self, w: u8, x: &[Rational64]) -> Vec<Rational64> {
        let m = self.weyl.matrix(self.weyl.inv(w));
        (0..self.rank)
            .map(|i| (0..self.rank).fold(Rational64::zero(), |s, k| s + x[k] * m[k][i]))
            .collect()
    }

    fn qform(&self, a: &[Rational64], b: &[Rational64]) -> Rational64 {
        let mut s = Rational64::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += self.form[i][j] * a[i] * b[j];
            }
        }
        s
    }

    fn check(&self, v: &AffVec) -> Result<()> {
        if v.datum != self.ty || v.finite.len() != self.rank {
            return Err(Error::RootDatumMismatch(self.ty.to_string(), v.datum.to_string()));
        }
        Ok(())
    }

    /// Extended pairing, componentwise on the two extra coordinates.
    pub fn affine_pairing(&self, w: &AffineWeight, c: &AffineCoweight) -> Result<Rational64> {
        self.check(&w.0)?;
        self.check(&c.0)?;
        let fin = w.0.finite.iter().zip(&c.0.finite).fold(Rational64::zero(), |s, (a, b)| s + *a * *b);
        Ok(fin + w.0.delta * c.0.delta + w.0.grading * c.0.grading)
    }

    pub fn affine_root_weight(&self, ar: AffineRoot) -> AffineWeight {
        AffineWeight::new(self, &self.roots[ar.root].root, ar.level, 0)
    }

    /// `(alpha∨, 0, n (alpha∨, alpha∨)/2)`.
    pub fn affine_coroot(&self, ar: AffineRoot) -> AffineCoweight {
        let ro = &self.roots[ar.root];
        AffineCoweight(AffVec::new(self, &ro.coroot, Rational64::zero(), Rational64::from_integer(ar.level * ro.norm / 2)))
    }

    /// `(w t_lambda)(nu, r, s) = (w(nu + s lambda'), r - <nu, lambda> - (lambda,lambda) s/2, s)`
    /// where `g = t_t w = w t_lambda`.
    pub fn act_weight(&self, g: &Affine, x: &AffineWeight) -> Result<AffineWeight> {
        self.check(&x.0)?;
        let lam = self.act_cov(self.weyl.inv(g.w), &g.t);
        let lq = qvec(&lam, self.rank);
        let s = x.0.grading;
        let lam_prime: Vec<Rational64> =
            (0..self.rank).map(|i| (0..self.rank).fold(Rational64::zero(), |acc, j| acc + self.form[i][j] * lq[j])).collect();
        let shifted: Vec<Rational64> = (0..self.rank).map(|i| x.0.finite[i] + s * lam_prime[i]).collect();
        let nu_lam = x.0.finite.iter().zip(&lq).fold(Rational64::zero(), |a, (p, q)| a + *p * *q);
        let ll = self.qform(&lq, &lq);
        Ok(AffineWeight(AffVec {
            datum: self.ty,
            finite: self.rmat_vec_x(g.w, &shifted),
            delta: x.0.delta - nu_lam - ll * s / Rational64::from_integer(2),
            grading: s,
        }))
    }

    /// `(w t_lambda)(mu, r, s) = (w(mu + r lambda), r, s - (mu, lambda) - r (lambda,lambda)/2)`.
    pub fn act_coweight(&self, g: &Affine, x: &AffineCoweight) -> Result<AffineCoweight> {
        self.check(&x.0)?;
        let lam = self.act_cov(self.weyl.inv(g.w), &g.t);
        let lq = qvec(&lam, self.rank);
        let r = x.0.delta;
        let shifted: Vec<Rational64> = (0..self.rank).map(|i| x.0.finite[i] + r * lq[i]).collect();
        let ml = self.qform(&x.0.finite, &lq);
        let ll = self.qform(&lq, &lq);
        Ok(AffineCoweight(AffVec {
            datum: self.ty,
            finite: self.rmat_vec_cov(g.w, &shifted),
            delta: r,
            grading: x.0.grading - ml - r * ll / Rational64::from_integer(2),
        }))
    }

    /// Recognize an affine weight as an affine root.
    pub fn as_affine_root(&self, x: &AffineWeight) -> Option<AffineRoot> {
        if !x.0.grading.is_zero() || !x.0.delta.is_integer() {
            return None;
        }
        let mut v = [0; MAXR];
        for k in 0..self.rank {
            if !x.0.finite[k].is_integer() {
                return None;
            }
            v[k] = x.0.finite[k].to_integer();
        }
        let root = self.root_index(&v)?;
        Some(AffineRoot { root, level: x.0.delta.to_integer() })
    }
}

impl fmt::Display for AffVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.finite.iter().map(|q| q.to_string()).collect();
        write!(f, "([{}], {}, {})", parts.join(","), self.delta, self.grading)
    }
}

/// Sign of the first nonzero entry.
#[cfg(test)]
mod tests {
    use super::*;

    fn all_types() -> Vec<RootDatum> {
        ["A1", "A2", "B2", "G2", "A1xA1"].iter().map(|s| RootDatum::from_label(s).unwrap()).collect()
    }

    #[test]
    fn cartan_is_reproduced() {
        for rd in all_types() {
            for i in 0..rd.rank() {
                for j in 0..rd.rank() {
                    assert_eq!(rd.pairing(&rd.simple_root(i), &rd.simple_coroot(j)), rd.cartan()[i][j]);
                }
            }
        }
    }

    #[test]
    fn group_orders_and_roots() {
        let expect = [(2, 2), (6, 6), (8, 8), (12, 12), (4, 4)];
        for (rd, (order, nroots)) in all_types().iter().zip(expect) {
            assert_eq!(rd.weyl().order(), order);
            assert_eq!(rd.roots().len(), nroots);
            assert_eq!(rd.weyl().len(rd.weyl().longest()), nroots / 2);
        }
    }

    #[test]
    fn form_properties() {
        for rd in all_types() {
            for ro in rd.roots() {
                // <alpha, nu> = 2 (alpha∨, nu) / (alpha∨, alpha∨)
                for i in 0..rd.rank() {
                    let mut e = [0; MAXR];
                    e[i] = 1;
                    let lhs = Rational64::from_integer(rd.pairing(&ro.root, &e));
                    let rhs = rd.form(&ro.coroot, &e) * Rational64::from_integer(2) / Rational64::from_integer(ro.norm);
                    assert_eq!(lhs, rhs);
                }
                assert_eq!(rd.form(&ro.coroot, &ro.coroot), Rational64::from_integer(ro.norm));
                assert_eq!(ro.norm % 2, 0);
            }
            // W-invariance
            for w in rd.weyl().elements() {
                for i in 0..rd.rank() {
                    for j in 0..rd.rank() {
                        let (a, b) = (rd.simple_root(i), rd.simple_root(j));
                        assert_eq!(rd.form(&rd.act_cov(w, &a), &rd.act_cov(w, &b)), rd.form(&a, &b));
                    }
                }
            }
        }
    }

    #[test]
    fn a1_realization() {
        let rd = RootDatum::from_label("A1").unwrap();
        assert_eq!(rd.simple_coroot(0)[0], 2);
        assert_eq!(rd.rho_check()[0], 1);
        assert_eq!(rd.omega().len(), 2);
        assert_eq!(rd.form(&[1, 0, 0, 0], &[1, 0, 0, 0]), Rational64::new(1, 2));
        assert_eq!(rd.n1(), Rational64::one());
    }

    #[test]
    fn pairing_examples() {
        let a1 = RootDatum::from_label("A1").unwrap();
        let w = AffineWeight::new(&a1, &[1, 0, 0, 0], 0, 0);
        let c = AffineCoweight::new(&a1, &[2, 0, 0, 0], 0, 0);
        assert_eq!(a1.affine_pairing(&w, &c).unwrap(), Rational64::from_integer(2));
        let a2 = RootDatum::from_label("A2").unwrap();
        let w = AffineWeight::new(&a2, &a2.simple_root(0), 0, 0);
        let c = AffineCoweight::new(&a2, &a2.simple_coroot(1), 0, 0);
        assert_eq!(a2.affine_pairing(&w, &c).unwrap(), Rational64::from_integer(-1));
        assert!(a2.affine_pairing(&AffineWeight::new(&a1, &[1, 0, 0, 0], 0, 0), &c).is_err());
    }

    #[test]
    fn affine_coroot_examples() {
        let a1 = RootDatum::from_label("A1").unwrap();
        let p = a1.positive_roots()[0];
        let c = a1.affine_coroot(AffineRoot { root: p, level: 1 });
        assert_eq!(c, AffineCoweight::new(&a1, &[2, 0, 0, 0], 0, 1));
        for rd in all_types() {
            for (i, _) in rd.roots().iter().enumerate() {
                for n in -3..=3 {
                    let ar = AffineRoot { root: i, level: n };
                    let pr = rd.affine_pairing(&rd.affine_root_weight(ar), &rd.affine_coroot(ar)).unwrap();
                    assert_eq!(pr, Rational64::from_integer(2));
                }
            }
        }
    }

    #[test]
    fn reflection_formula() {
        for rd in all_types() {
            for (i, _) in rd.roots().iter().enumerate() {
                for n in -2..=2 {
                    let ar = AffineRoot { root: i, level: n };
                    let g = rd.affine_reflection(i, n);
                    let x = AffineCoweight::new(&rd, &[1, -2, 3, 0], 5, -1);
                    let lhs = rd.act_coweight(&g, &x).unwrap();
                    let k = rd.affine_pairing(&rd.affine_root_weight(ar), &x).unwrap();
                    let rhs = x.sub(&rd.affine_coroot(ar).scaled(k));
                    assert_eq!(lhs, rhs);
                    assert_eq!(rd.act_coweight(&g, &lhs).unwrap(), x);
                }
            }
        }
    }

    #[test]
    fn translation_drops_delta() {
        let a1 = RootDatum::from_label("A1").unwrap();
        let g = a1.translation([2, 0, 0, 0]);
        let x = AffineWeight::new(&a1, &[1, 0, 0, 0], 0, 0);
        let y = a1.act_weight(&g, &x).unwrap();
        assert_eq!(y, AffineWeight::new(&a1, &[1, 0, 0, 0], -2, 0));
    }

    #[test]
    fn parse_labels() {
        assert_eq!("A1xA1".parse::<CartanType>().unwrap(), CartanType::A1Power(2));
        assert_eq!("a1^3".parse::<CartanType>().unwrap(), CartanType::A1Power(3));
        assert!("E8".parse::<CartanType>().is_err());
        assert_eq!(CartanType::A1Power(2).to_string(), "A1xA1");
    }
}
