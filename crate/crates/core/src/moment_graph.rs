//! Finite moment graphs: alcove windows, Bruhat intervals in `W_aff`, and
//! Bruhat intervals of minimal coset representatives.
//!
//! Vertices are stored sorted by `(length, coordinate)`, which is a linear
//! extension of the order. Edge labels are affine coroots written in the
//! coordinates `(simple coroot coefficients, grading part)` and made
//! primitive with a positive leading entry. Both parts are integral on the
//! coroot lattice, so coefficients stay small.

use crate::alcoves::Alcove;
use crate::error::{Error, Result};
use crate::linalg::Coef;
use crate::rootdata::{Affine, RootDatum, Vector, MAXR};
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

pub const VERTEX_CAP: usize = 5000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Builder {
    /// Alcoves with the periodic order.
    Alcove,
    /// Elements of the affine Weyl group with the Bruhat order.
    Bruhat,
    /// Minimal representatives of `W_λ \ W_aff` with the Bruhat order.
    Coset { lambda: Vector },
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    /// Lower endpoint.
    pub lo: usize,
    /// Upper endpoint.
    pub hi: usize,
    pub label: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct MomentGraph {
    rd: Arc<RootDatum>,
    builder: Builder,
    coords: Vec<Affine>,
    lengths: Vec<i64>,
    index: HashMap<Affine, usize>,
    edges: Vec<Edge>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    above: Vec<Vec<u64>>,
}

fn bit(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

/// Primitive representative with positive leading entry.
pub fn normalize_label(v: &mut [i64]) {
    let g = v.iter().fold(0i64, |g, x| g.gcd(x));
    if g == 0 {
        return;
    }
    let s = v.iter().find(|x| **x != 0).map(|x| x.signum()).unwrap_or(1);
    for x in v.iter_mut() {
        *x = *x / g * s;
    }
}

/// Inverse of the matrix whose columns are the simple coroots in
/// fundamental coweight coordinates.
fn coroot_basis_inverse(rd: &RootDatum) -> Vec<Vec<Rational64>> {
    let r = rd.rank();
    let mut a: Vec<Vec<Rational64>> =
        (0..r).map(|k| (0..2 * r).map(|j| Rational64::from_integer(if j < r { rd.cartan()[k][j] } else { (j - r == k) as i64 })).collect()).collect();
    for c in 0..r {
        let p = (c..r).find(|&i| !a[i][c].is_zero()).expect("Cartan matrix is invertible");
        a.swap(c, p);
        let piv = a[c][c];
        for x in a[c].iter_mut() {
            *x /= piv;
        }
        for i in 0..r {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c];
                let row = a[c].clone();
                for (x, y) in a[i].iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
    }
    a.into_iter().map(|row| row[r..].to_vec()).collect()
}

/// Coefficients of a coweight in the simple coroot basis.
fn in_coroot_basis(inv: &[Vec<Rational64>], v: &Vector) -> Vec<Rational64> {
    inv.iter().map(|row| row.iter().zip(v.iter()).map(|(a, &b)| *a * b).sum()).collect()
}

fn integral(v: Rational64) -> i64 {
    debug_assert!(v.is_integer(), "non-integral label coordinate {}", v);
    v.to_integer()
}

/// Scale of the level variable: clears the denominators that length-zero
/// elements introduce.
pub fn level_scale(rd: &RootDatum) -> i64 {
    let r = rd.rank();
    let inv = coroot_basis_inverse(rd);
    let mut l = 1i64;
    for row in &inv {
        for x in row {
            l = l.lcm(x.denom());
        }
    }
    for i in 0..r {
        for j in 0..r {
            let (mut a, mut b) = ([0; MAXR], [0; MAXR]);
            a[i] = 1;
            b[j] = 1;
            let f = rd.form(&a, &b);
            let f = if i == j { f / 2 } else { f };
            l = l.lcm(f.denom());
        }
    }
    l
}

/// Label of the affine reflection `s_(γ, n)`: the coroot `(γ∨, 0, n (γ∨,γ∨)/2)`.
pub fn reflection_label(rd: &RootDatum, root: usize, n: i64) -> Vec<i64> {
    let ro = rd.root(root);
    let inv = coroot_basis_inverse(rd);
    let mut v: Vec<i64> = in_coroot_basis(&inv, &ro.coroot).into_iter().map(integral).collect();
    v.push(n * ro.norm / 2);
    normalize_label(&mut v);
    v
}

/// Finite part of a label in fundamental coweight coordinates.
pub fn label_coweight(rd: &RootDatum, label: &[i64]) -> Vec<i64> {
    let r = rd.rank();
    (0..r).map(|k| (0..r).map(|j| rd.cartan()[k][j] * label[j]).sum()).collect()
}

/// The linear automorphism of the label space (and of the extra coordinate)
/// induced by `g`: images of the coordinate vectors, as ring substitution
/// data for `nvars` variables. Variables: simple coroot part, grading, then
/// the level scaled by [`level_scale`].
pub fn label_automorphism(rd: &RootDatum, g: &Affine, nvars: usize) -> Vec<Vec<Coef>> {
    let r = rd.rank();
    let inv = coroot_basis_inverse(rd);
    let lam = rd.act_cov(rd.weyl().inv(g.w), &g.t);
    let mut imgs = vec![vec![0 as Coef; nvars]; nvars];
    for k in 0..r {
        let cor = rd.simple_coroot(k);
        let moved = in_coroot_basis(&inv, &rd.act_cov(g.w, &cor));
        for i in 0..r {
            imgs[k][i] = integral(moved[i]) as Coef;
        }
        imgs[k][r] = -integral(rd.form(&cor, &lam)) as Coef;
    }
    imgs[r][r] = 1;
    if nvars > r + 1 {
        let l = Rational64::from_integer(level_scale(rd));
        let wl = in_coroot_basis(&inv, &rd.act_cov(g.w, &lam));
        for i in 0..r {
            imgs[r + 1][i] = integral(wl[i] * l) as Coef;
        }
        imgs[r + 1][r] = -integral(rd.form(&lam, &lam) / 2 * l) as Coef;
        imgs[r + 1][r + 1] = 1;
    }
    imgs
}

/// Apply a substitution matrix (images of basis vectors) to a label.
pub fn act_on_label(imgs: &[Vec<Coef>], label: &[i64]) -> Vec<i64> {
    let n = label.len();
    let mut out = vec![0i64; n];
    for (k, &a) in label.iter().enumerate() {
        for i in 0..n {
            out[i] += a * imgs[k][i] as i64;
        }
    }
    out
}

/// The finite Weyl group elements fixing `lambda`.
pub fn stabilizer(rd: &RootDatum, lambda: &Vector) -> Vec<u8> {
    rd.weyl().elements().filter(|&w| rd.act_cov(w, lambda) == *lambda).collect()
}

/// Minimal representative of `W_λ x`, with `stab` the elements of `W_λ`.
pub fn coset_rep(rd: &RootDatum, stab: &[u8], x: &Affine) -> Affine {
    stab.iter()
        .map(|&z| rd.mul(&rd.finite(z), x))
        .min_by_key(|y| (rd.coxeter_length(y), *y))
        .unwrap()
}

impl MomentGraph {
    fn assemble(rd: Arc<RootDatum>, builder: Builder, mut verts: Vec<(i64, Affine)>, mut edges: Vec<(Affine, Affine, Vec<i64>)>) -> Result<Self> {
        if verts.len() > VERTEX_CAP {
            return Err(Error::WindowTooLarge { size: verts.len(), cap: VERTEX_CAP });
        }
        verts.sort();
        verts.dedup();
        let coords: Vec<Affine> = verts.iter().map(|v| v.1).collect();
        let lengths: Vec<i64> = verts.iter().map(|v| v.0).collect();
        let index: HashMap<Affine, usize> = coords.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let n = coords.len();
        let mut es = Vec::with_capacity(edges.len());
        for (a, b, label) in edges.drain(..) {
            let (ia, ib) = (index[&a], index[&b]);
            let (lo, hi) = if lengths[ia] < lengths[ib] {
                (ia, ib)
            } else if lengths[ib] < lengths[ia] {
                (ib, ia)
            } else {
                return Err(Error::Invalid("edge between vertices of equal length".into()));
            };
            es.push(Edge { lo, hi, label });
        }
        es.sort_by_key(|e| (e.lo, e.hi));
        es.dedup_by_key(|e| (e.lo, e.hi));
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for (k, e) in es.iter().enumerate() {
            up[e.lo].push(k);
            down[e.hi].push(k);
        }
        let words = n.div_ceil(64).max(1);
        let mut above = vec![vec![0u64; words]; n];
        for x in (0..n).rev() {
            let mut set = vec![0u64; words];
            set[x / 64] |= 1 << (x % 64);
            for &k in &up[x] {
                let h = es[k].hi;
                for (s, t) in set.iter_mut().zip(&above[h]) {
                    *s |= t;
                }
            }
            above[x] = set;
        }
        Ok(MomentGraph { rd, builder, coords, lengths, index, edges: es, up, down, above })
    }

    /// Alcove graph on an explicit finite set of alcoves.
    pub fn alcove_window(rd: Arc<RootDatum>, alcoves: &[Alcove]) -> Result<Self> {
        if alcoves.len() > VERTEX_CAP {
            return Err(Error::WindowTooLarge { size: alcoves.len(), cap: VERTEX_CAP });
        }
        let verts: Vec<(i64, Affine)> = alcoves.iter().map(|a| (rd.length(*a), a.coord())).collect();
        let gs: Vec<Affine> = alcoves.iter().map(|a| a.coord()).collect();
        let edges = reflection_edges(&rd, &gs, |a, b| Some(rd.mul(&rd.inv(a), b)));
        Self::assemble(rd, Builder::Alcove, verts, edges)
    }

    /// Alcove graph on the interval `[a, b]` of the periodic order.
    pub fn alcove_interval(rd: Arc<RootDatum>, a: Alcove, b: Alcove) -> Result<Self> {
        let iv = rd.interval(a, b);
        Self::alcove_window(rd, &iv)
    }

    /// Bruhat graph of an explicit set of `W_aff` elements.
    pub fn bruhat_window(rd: Arc<RootDatum>, elems: &[Affine]) -> Result<Self> {
        if elems.len() > VERTEX_CAP {
            return Err(Error::WindowTooLarge { size: elems.len(), cap: VERTEX_CAP });
        }
        let verts: Vec<(i64, Affine)> = elems.iter().map(|g| (rd.coxeter_length(g), *g)).collect();
        let edges = reflection_edges(&rd, elems, |a, b| Some(rd.mul(&rd.inv(a), b)));
        Self::assemble(rd, Builder::Bruhat, verts, edges)
    }

    /// Bruhat graph on `{y <= top}`.
    pub fn bruhat_interval(rd: Arc<RootDatum>, top: &Affine, budget: i64) -> Result<Self> {
        let l = rd.coxeter_length(top);
        if l > budget {
            return Err(Error::Budget { needed: l, budget });
        }
        let elems = rd.bruhat_lower(top);
        Self::bruhat_window(rd, &elems)
    }

    /// Coset graph on minimal representatives of `W_λ \ W_aff` below `top`,
    /// where `W_λ` is the stabilizer of `λ` in the finite Weyl group.
    pub fn coset_interval(rd: Arc<RootDatum>, lambda: &Vector, top: &Affine, budget: i64) -> Result<Self> {
        let stab = stabilizer(&rd, lambda);
        let rep = |x: &Affine| coset_rep(&rd, &stab, x);
        let top = rep(top);
        let l = rd.coxeter_length(&top);
        if l > budget {
            return Err(Error::Budget { needed: l, budget });
        }
        let mut elems: Vec<Affine> = rd.bruhat_lower(&top).iter().filter(|y| rep(y) == **y).copied().collect();
        elems.sort_by_key(|y| (rd.coxeter_length(y), *y));
        elems.dedup();
        let verts: Vec<(i64, Affine)> = elems.iter().map(|g| (rd.coxeter_length(g), *g)).collect();
        let stab_aff: Vec<Affine> = stab.iter().map(|&z| rd.finite(z)).collect();
        let edges = reflection_edges(&rd, &elems, |a, b| {
            let ai = rd.inv(a);
            stab_aff.iter().map(|z| rd.mul(&ai, &rd.mul(z, b))).find(|r| rd.as_reflection(r).is_some())
        });
        Self::assemble(rd, Builder::Coset { lambda: *lambda }, verts, edges)
    }

    /// A graph given by hand: vertex lengths and labeled edges.
    pub fn custom(rd: Arc<RootDatum>, lengths: &[i64], edges: &[(usize, usize, Vec<i64>)]) -> Result<Self> {
        let verts: Vec<(i64, Affine)> =
            lengths.iter().enumerate().map(|(i, &l)| (l, Affine::new(0, [i as i64, 0, 0, 0]))).collect();
        let es = edges
            .iter()
            .map(|(a, b, l)| (verts[*a].1, verts[*b].1, l.clone()))
            .collect();
        Self::assemble(rd, Builder::Custom, verts, es)
    }

    pub fn root_datum(&self) -> &Arc<RootDatum> {
        &self.rd
    }
    pub fn builder(&self) -> &Builder {
        &self.builder
    }
    pub fn len(&self) -> usize {
        self.coords.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
    pub fn coords(&self) -> &[Affine] {
        &self.coords
    }
    pub fn coord(&self, i: usize) -> Affine {
        self.coords[i]
    }
    pub fn length(&self, i: usize) -> i64 {
        self.lengths[i]
    }
    pub fn lengths(&self) -> &[i64] {
        &self.lengths
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn edge(&self, k: usize) -> &Edge {
        &self.edges[k]
    }
    /// Edges to larger vertices.
    pub fn up_edges(&self, x: usize) -> &[usize] {
        &self.up[x]
    }
    /// Edges to smaller vertices.
    pub fn down_edges(&self, x: usize) -> &[usize] {
        &self.down[x]
    }
    pub fn find(&self, g: &Affine) -> Option<usize> {
        self.index.get(g).copied()
    }
    pub fn find_alcove(&self, a: Alcove) -> Option<usize> {
        self.find(&a.coord())
    }
    pub fn vertex(&self, g: &Affine) -> Result<usize> {
        self.find(g).ok_or_else(|| Error::MissingVertex(self.rd.coord_string(g)))
    }
    /// Number of variables spanned by labels.
    pub fn label_dim(&self) -> usize {
        self.rd.rank() + 1
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.up[lo].iter().copied().find(|&k| self.edges[k].hi == hi)
    }

    /// `a <= b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        bit(&self.above[a], b)
    }

    /// `{y >= a}`.
    pub fn open_bb(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq(a, y)).collect()
    }

    /// `{y <= a}`.
    pub fn closed_below(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq(y, a)).collect()
    }

    pub fn is_open(&self, set: &[usize]) -> bool {
        let mut mark = vec![false; self.len()];
        for &x in set {
            mark[x] = true;
        }
        set.iter().all(|&x| (0..self.len()).all(|y| !self.leq(x, y) || mark[y]))
    }

    /// Induced subgraph; vertex order and builder kept.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self> {
        let verts: Vec<(i64, Affine)> = subset.iter().map(|&i| (self.lengths[i], self.coords[i])).collect();
        let mut mark = vec![false; self.len()];
        for &i in subset {
            mark[i] = true;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| mark[e.lo] && mark[e.hi])
            .map(|e| (self.coords[e.lo], self.coords[e.hi], e.label.clone()))
            .collect();
        let mut g = Self::assemble(self.rd.clone(), self.builder.clone(), verts, edges)?;
        // keep the ambient order, not just what the induced edges generate
        for &a in subset {
            let ia = g.index[&self.coords[a]];
            for &b in subset {
                if self.leq(a, b) {
                    let ib = g.index[&self.coords[b]];
                    g.above[ia][ib / 64] |= 1 << (ib % 64);
                }
            }
        }
        Ok(g)
    }

    /// Same vertices, alcove edges and periodic order: the graph on which
    /// sheaves pulled back along `W_aff → alcoves` live.
    pub fn as_alcove_graph(&self) -> Result<Self> {
        let alcoves: Vec<Alcove> = self.coords.iter().map(|g| self.rd.alcove(g)).collect();
        Self::alcove_window(self.rd.clone(), &alcoves)
    }

    /// Pairs of edges at a common vertex with proportional labels.
    pub fn check_gkm(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            let inc: Vec<usize> = self.up[x].iter().chain(&self.down[x]).copied().collect();
            for (i, &a) in inc.iter().enumerate() {
                for &b in &inc[i + 1..] {
                    if !independent(&self.edges[a].label, &self.edges[b].label) {
                        out.push((x, a.min(b), a.max(b)));
                    }
                }
            }
        }
        out
    }

    pub fn vertex_name(&self, i: usize) -> String {
        match self.builder {
            Builder::Alcove => self.rd.alcove_string(self.rd.alcove(&self.coords[i])),
            Builder::Bruhat | Builder::Coset { .. } => self.rd.word_string(&self.coords[i]),
            Builder::Custom => format!("v{}", i),
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph moment {\n");
        for i in 0..self.len() {
            let _ = writeln!(s, "  {} [label=\"{}\\nl={}\"];", i, self.vertex_name(i), self.lengths[i]);
        }
        for e in &self.edges {
            let lab: Vec<String> = e.label.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "  {} -- {} [label=\"{}\"];", e.lo, e.hi, lab.join(","));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> GraphJson {
        let d = self.rd.form_scale();
        GraphJson {
            root_type: self.rd.cartan_type().to_string(),
            builder: self.builder.clone(),
            form_scale: d,
            vertices: (0..self.len())
                .map(|i| VertexJson {
                    id: i,
                    name: self.vertex_name(i),
                    coord: CoordJson { w: self.rd.weyl().word(self.coords[i].w).iter().map(|&x| x as usize + 1).collect(), t: self.coords[i].t[..self.rd.rank()].to_vec() },
                    length: self.lengths[i],
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    let r = self.rd.rank();
                    let mut label: Vec<String> = label_coweight(&self.rd, &e.label).iter().map(|x| x.to_string()).collect();
                    label.push("0".into());
                    label.push(e.label[r].to_string());
                    EdgeJson { u: e.lo, v: e.hi, label }
                })
                .collect(),
            order: (0..self.len())
                .flat_map(|a| (0..self.len()).filter(move |&b| a != b).map(move |b| (a, b)))
                .filter(|&(a, b)| self.leq(a, b))
                .map(|(a, b)| [a, b])
                .collect(),
        }
    }
}

fn independent(a: &[i64], b: &[i64]) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] as i128 * b[j] as i128 - a[j] as i128 * b[i] as i128 != 0 {
                return true;
            }
        }
    }
    false
}

/// Edges between pairs whose connecting element (as computed by `conn`) is
/// an affine reflection; the label is that reflection's.
fn reflection_edges<F>(rd: &RootDatum, elems: &[Affine], conn: F) -> Vec<(Affine, Affine, Vec<i64>)>
where
    F: Fn(&Affine, &Affine) -> Option<Affine>,
{
    let id = rd.weyl().identity();
    let refl: Vec<bool> = (0..rd.weyl().order() as u8).map(|w| rd.weyl().det(w) == -1 && rd.weyl().mul(w, w) == id).collect();
    let mut out = Vec::new();
    for (i, a) in elems.iter().enumerate() {
        for b in &elems[i + 1..] {
            let Some(r) = conn(a, b) else { continue };
            if !refl[r.w as usize] {
                continue;
            }
            if let Some((root, n)) = rd.as_reflection(&r) {
                out.push((*a, *b, reflection_label(rd, root, n)));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoordJson {
    /// Reduced word of the finite part, 1-based simple reflections.
    pub w: Vec<usize>,
    /// Translation part in fundamental coweight coordinates.
    pub t: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub name: String,
    pub coord: CoordJson,
    pub length: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: usize,
    pub v: usize,
    /// `(finite coweight coords, level, grading)` as rationals.
    pub label: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub root_type: String,
    pub builder: Builder,
    pub form_scale: i64,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub order: Vec<[usize; 2]>,
}
