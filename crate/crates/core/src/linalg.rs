//! Exact graded linear algebra over a polynomial ring with generators in
//! degree 2.
//!
//! Everything is reduced to finite-dimensional slices: a graded free module
//! in degree `d` is a rational vector space with a monomial basis, and all
//! operations are fraction-free integer row reduction with overflow checks.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

pub type Coef = i128;

const BITS: u32 = 8;
pub const MAX_VARS: usize = 7;

fn gcd(a: Coef, b: Coef) -> Coef {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn cmul(a: Coef, b: Coef) -> Result<Coef> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

fn cadd(a: Coef, b: Coef) -> Result<Coef> {
    a.checked_add(b).ok_or(Error::Overflow)
}

/// Divide by the content, first nonzero entry made positive.
pub fn normalize(v: &mut [Coef]) {
    let mut g = 0;
    for &x in v.iter() {
        if x != 0 {
            g = gcd(g, x);
            if g == 1 {
                break;
            }
        }
    }
    if g == 0 {
        return;
    }
    let first = v.iter().find(|&&x| x != 0).copied().unwrap_or(1);
    let g = if first < 0 { -g } else { g };
    if g != 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

pub fn is_zero(v: &[Coef]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// `a += c * b`
pub fn axpy(a: &mut [Coef], c: Coef, b: &[Coef]) -> Result<()> {
    if c == 0 {
        return Ok(());
    }
    for (x, &y) in a.iter_mut().zip(b) {
        if y != 0 {
            *x = cadd(*x, cmul(c, y)?)?;
        }
    }
    Ok(())
}

/// Polynomial ring `Q[x_0..x_{n-1}]` truncated at polynomial degree `hmax`.
/// Polynomial degree `h` is cohomological degree `2h`.
#[derive(Debug)]
pub struct PolyRing {
    nvars: usize,
    hmax: usize,
    monos: Vec<Vec<u64>>,
    index: Vec<HashMap<u64, u32>>,
    mulvar: Vec<Vec<Vec<u32>>>,
}

impl PolyRing {
    pub fn new(nvars: usize, hmax: usize) -> Result<Self> {
        if nvars > MAX_VARS {
            return Err(Error::Unsupported(format!("{} variables", nvars)));
        }
        if hmax >= (1 << BITS) {
            return Err(Error::Unsupported(format!("degree bound {}", hmax)));
        }
        let mut monos = Vec::with_capacity(hmax + 1);
        let mut index = Vec::with_capacity(hmax + 1);
        for h in 0..=hmax {
            let mut list = Vec::new();
            let mut exps = vec![0u64; nvars];
            gen_monos(nvars, h as u64, 0, &mut exps, &mut list);
            let map: HashMap<u64, u32> = list.iter().enumerate().map(|(i, k)| (*k, i as u32)).collect();
            monos.push(list);
            index.push(map);
        }
        let mut mulvar = Vec::with_capacity(hmax);
        for h in 0..hmax {
            let per: Vec<Vec<u32>> = (0..nvars)
                .map(|i| monos[h].iter().map(|k: &u64| index[h + 1][&(k + (1u64 << (BITS * i as u32)))]).collect())
                .collect();
            mulvar.push(per);
        }
        Ok(PolyRing { nvars, hmax, monos, index, mulvar })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn hmax(&self) -> usize {
        self.hmax
    }

    /// Dimension of the degree `h` part; zero outside `0..=hmax`.
    pub fn dim(&self, h: i64) -> usize {
        if h < 0 || h as usize > self.hmax {
            0
        } else {
            self.monos[h as usize].len()
        }
    }

    pub fn check(&self, h: i64) -> Result<()> {
        if h as usize > self.hmax && h >= 0 {
            return Err(Error::Cutoff { cutoff: 2 * self.hmax as i32, degree: 2 * h as i32 });
        }
        Ok(())
    }

    pub fn exponents(&self, h: usize, m: usize) -> Vec<u32> {
        let k = self.monos[h][m];
        (0..self.nvars).map(|i| ((k >> (BITS * i as u32)) & 0xff) as u32).collect()
    }

    pub fn mono_string(&self, h: usize, m: usize, names: &[&str]) -> String {
        let e = self.exponents(h, m);
        let mut parts = Vec::new();
        for (i, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => parts.push(names[i].to_string()),
                _ => parts.push(format!("{}^{}", names[i], x)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Index of `x_i * m` for `m` of degree `h`.
    pub fn times_var(&self, h: usize, i: usize, m: usize) -> usize {
        self.mulvar[h][i][m] as usize
    }

    /// Index of the product of two monomials.
    pub fn times_mono(&self, h1: usize, m1: usize, h2: usize, m2: usize) -> usize {
        let k = self.monos[h1][m1] + self.monos[h2][m2];
        self.index[h1 + h2][&k] as usize
    }

    pub fn zero(&self, h: usize) -> Poly {
        Poly { h, c: vec![0; self.monos[h].len()] }
    }

    pub fn one(&self) -> Poly {
        Poly { h: 0, c: vec![1] }
    }

    pub fn var(&self, i: usize) -> Poly {
        let mut p = self.zero(1);
        p.c[self.mulvar[0][i][0] as usize] = 1;
        p
    }

    /// The linear form `Σ a_i x_i`.
    pub fn linear(&self, a: &[Coef]) -> Poly {
        let mut p = self.zero(1);
        for (i, &x) in a.iter().enumerate().take(self.nvars) {
            p.c[self.mulvar[0][i][0] as usize] = x;
        }
        p
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        let h = a.h + b.h;
        self.check(h as i64)?;
        let mut out = self.zero(h);
        for (i, &x) in a.c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.c.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let k = self.times_mono(a.h, i, b.h, j);
                out.c[k] = cadd(out.c[k], cmul(x, y)?)?;
            }
        }
        Ok(out)
    }

    /// Multiply a dense coefficient vector of degree `h` by a monomial.
    pub fn mul_mono_into(&self, p: &Poly, h2: usize, m: usize, scale: Coef, out: &mut [Coef]) -> Result<()> {
        for (i, &x) in p.c.iter().enumerate() {
            if x != 0 {
                let k = self.times_mono(p.h, i, h2, m);
                out[k] = cadd(out[k], cmul(x, scale)?)?;
            }
        }
        Ok(())
    }

    /// `l * v` for a linear form `l` (given by variable coefficients) and a
    /// degree-`h` coefficient vector.
    pub fn mul_linear(&self, lin: &[Coef], h: usize, v: &[Coef], out: &mut [Coef]) -> Result<()> {
        for (m, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (i, &a) in lin.iter().enumerate() {
                if a != 0 {
                    let k = self.mulvar[h][i][m] as usize;
                    out[k] = cadd(out[k], cmul(a, x)?)?;
                }
            }
        }
        Ok(())
    }
}

fn gen_monos(n: usize, h: u64, i: usize, exps: &mut Vec<u64>, out: &mut Vec<u64>) {
    if n == 0 {
        if h == 0 {
            out.push(0);
        }
        return;
    }
    if i == n - 1 {
        exps[i] = h;
        let key = exps.iter().enumerate().fold(0u64, |k, (j, e)| k | (e << (BITS * j as u32)));
        out.push(key);
        return;
    }
    for e in (0..=h).rev() {
        exps[i] = e;
        gen_monos(n, h - e, i + 1, exps, out);
    }
}

/// Homogeneous polynomial: dense coefficients over the monomials of degree `h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    pub h: usize,
    pub c: Vec<Coef>,
}

impl Poly {
    pub fn is_zero(&self) -> bool {
        is_zero(&self.c)
    }
    pub fn scaled(&self, s: Coef) -> Result<Poly> {
        Ok(Poly { h: self.h, c: self.c.iter().map(|&x| cmul(x, s)).collect::<Result<_>>()? })
    }
}

/// A ring map sending each variable to a linear form of another ring,
/// with per-degree matrices cached.
#[derive(Debug)]
pub struct Subst {
    images: Vec<Vec<Coef>>,
    cache: Mutex<Vec<Arc<Vec<Vec<Coef>>>>>,
}

impl Subst {
    /// `images[i]` = coefficients of the image of `x_i`.
    pub fn new(images: Vec<Vec<Coef>>) -> Self {
        Subst { images, cache: Mutex::new(Vec::new()) }
    }

    pub fn images(&self) -> &[Vec<Coef>] {
        &self.images
    }

    /// Row `m` = image of monomial `m` of degree `h`.
    pub fn matrix(&self, src: &PolyRing, dst: &PolyRing, h: usize) -> Result<Arc<Vec<Vec<Coef>>>> {
        let mut cache = self.cache.lock().unwrap();
        while cache.len() <= h {
            let k = cache.len();
            let mat = if k == 0 {
                vec![vec![1]]
            } else {
                let prev = cache[k - 1].clone();
                let mut rows = Vec::with_capacity(src.dim(k as i64));
                for m in 0..src.dim(k as i64) {
                    let e = src.exponents(k, m);
                    let i = e.iter().position(|&x| x > 0).unwrap();
                    // m = x_i * m', find m'
                    let mut key = src.monos[k][m];
                    key -= 1u64 << (BITS * i as u32);
                    let mp = src.index[k - 1][&key] as usize;
                    let mut row = vec![0; dst.dim(k as i64)];
                    dst.mul_linear(&self.images[i], k - 1, &prev[mp], &mut row)?;
                    rows.push(row);
                }
                rows
            };
            cache.push(Arc::new(mat));
        }
        Ok(cache[h].clone())
    }

    pub fn apply(&self, src: &PolyRing, dst: &PolyRing, p: &Poly) -> Result<Poly> {
        dst.check(p.h as i64)?;
        let mat = self.matrix(src, dst, p.h)?;
        let mut out = dst.zero(p.h);
        for (m, &x) in p.c.iter().enumerate() {
            axpy(&mut out.c, x, &mat[m])?;
        }
        Ok(out)
    }

    /// Apply to a raw coefficient vector of degree `h`, accumulating `scale * image`.
    pub fn apply_into(&self, src: &PolyRing, dst: &PolyRing, h: usize, v: &[Coef], scale: Coef, out: &mut [Coef]) -> Result<()> {
        let mat = self.matrix(src, dst, h)?;
        for (m, &x) in v.iter().enumerate() {
            if x != 0 {
                axpy(out, cmul(x, scale)?, &mat[m])?;
            }
        }
        Ok(())
    }
}

/// Reduction modulo a primitive integral linear form, via a unimodular
/// change of variables `y = M x` with `y_0 = α`.
#[derive(Debug)]
pub struct Reduction {
    pub label: Vec<i64>,
    /// `S -> S/α ≅ Q[y_1..]`
    pub red: Subst,
    /// `Q[y_1..] -> S`, a section of `red`.
    pub lift: Subst,
}

/// Unimodular `U` (and inverse) with `a · U = e_0`, for primitive `a`.
fn complete_unimodular(a: &[i64]) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let n = a.len();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut ui = u.clone();
    let mut row: Vec<i64> = a.to_vec();
    // column operations: col_j -= q col_i applied to row, u (columns); inverse gets row ops
    loop {
        let nz: Vec<usize> = (0..n).filter(|&j| row[j] != 0).collect();
        if nz.len() <= 1 {
            break;
        }
        let i = *nz.iter().min_by_key(|&&j| row[j].abs()).unwrap();
        for &j in &nz {
            if j == i {
                continue;
            }
            let q = row[j].div_euclid(row[i]);
            row[j] -= q * row[i];
            for r in 0..n {
                u[r][j] -= q * u[r][i];
            }
            // inverse: row_i += q row_j
            for c in 0..n {
                ui[i][c] += q * ui[j][c];
            }
        }
    }
    let i = (0..n).find(|&j| row[j] != 0).ok_or_else(|| Error::Invalid("zero label".into()))?;
    if row[i].abs() != 1 {
        return Err(Error::Invalid("label is not primitive".into()));
    }
    if row[i] < 0 {
        for r in 0..n {
            u[r][i] = -u[r][i];
        }
        for c in 0..n {
            ui[i][c] = -ui[i][c];
        }
    }
    if i != 0 {
        for r in 0..n {
            u[r].swap(0, i);
        }
        ui.swap(0, i);
    }
    Ok((u, ui))
}

impl Reduction {
    pub fn new(label: &[i64], nvars: usize) -> Result<Self> {
        let mut a = label.to_vec();
        a.resize(nvars, 0);
        let (u, ui) = complete_unimodular(&a)?;
        // x = U y, so red(x_i) = Σ_{k>=1} U[i][k] y_k
        let red = (0..nvars).map(|i| (1..nvars).map(|k| u[i][k] as Coef).collect()).collect();
        // y_k = Σ_i M[k][i] x_i with M = U^{-1}
        let lift = (1..nvars).map(|k| (0..nvars).map(|i| ui[k][i] as Coef).collect()).collect();
        Ok(Reduction { label: a, red: Subst::new(red), lift: Subst::new(lift) })
    }
}

/// The ambient ring together with its quotient rings by edge labels.
#[derive(Debug)]
pub struct Ambient {
    pub s: PolyRing,
    pub q: PolyRing,
    reductions: Mutex<HashMap<Vec<i64>, Arc<Reduction>>>,
    substs: Mutex<HashMap<Vec<Vec<Coef>>, Arc<Subst>>>,
}

impl Ambient {
    pub fn new(nvars: usize, hmax: usize) -> Result<Arc<Self>> {
        Ok(Arc::new(Ambient {
            s: PolyRing::new(nvars, hmax)?,
            q: PolyRing::new(nvars - 1, hmax)?,
            reductions: Mutex::new(HashMap::new()),
            substs: Mutex::new(HashMap::new()),
        }))
    }

    pub fn nvars(&self) -> usize {
        self.s.nvars
    }

    pub fn hmax(&self) -> usize {
        self.s.hmax
    }

    /// Cohomological degree cutoff.
    pub fn cutoff(&self) -> i32 {
        2 * self.s.hmax as i32
    }

    pub fn reduction(&self, label: &[i64]) -> Result<Arc<Reduction>> {
        let mut key = label.to_vec();
        key.resize(self.nvars(), 0);
        let mut m = self.reductions.lock().unwrap();
        if let Some(r) = m.get(&key) {
            return Ok(r.clone());
        }
        let r = Arc::new(Reduction::new(&key, self.nvars())?);
        m.insert(key, r.clone());
        Ok(r)
    }

    /// A linear automorphism `x_i ↦ Σ_k t[i][k] x_k`, cached.
    pub fn automorphism(&self, t: Vec<Vec<Coef>>) -> Arc<Subst> {
        let mut m = self.substs.lock().unwrap();
        m.entry(t.clone()).or_insert_with(|| Arc::new(Subst::new(t))).clone()
    }

    /// `f mod α` in quotient coordinates.
    pub fn reduce(&self, label: &[i64], p: &Poly) -> Result<Poly> {
        let r = self.reduction(label)?;
        r.red.apply(&self.s, &self.q, p)
    }

    pub fn lift(&self, label: &[i64], p: &Poly) -> Result<Poly> {
        let r = self.reduction(label)?;
        r.lift.apply(&self.q, &self.s, p)
    }
}

/// Degree-`d` slice of a graded free module with generators in degrees
/// `degs` over a ring: blocks `(generator, polynomial degree, offset)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub blocks: Vec<(usize, usize, usize)>,
    pub dim: usize,
}

impl Layout {
    pub fn new(ring: &PolyRing, degs: &[i32], d: i32) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut off = 0;
        for (j, &g) in degs.iter().enumerate() {
            let diff = d - g;
            if diff < 0 || diff % 2 != 0 {
                continue;
            }
            let h = (diff / 2) as i64;
            ring.check(h)?;
            blocks.push((j, h as usize, off));
            off += ring.dim(h);
        }
        Ok(Layout { blocks, dim: off })
    }

    /// Offset and polynomial degree of generator `j`, if present in this slice.
    pub fn block(&self, j: usize) -> Option<(usize, usize)> {
        self.blocks.iter().find(|b| b.0 == j).map(|b| (b.1, b.2))
    }
}

/// `dim` of the degree-`d` part of `⊕ S(-g)`.
pub fn free_dim(ring: &PolyRing, degs: &[i32], d: i32) -> usize {
    degs.iter()
        .map(|&g| {
            let diff = d - g;
            if diff < 0 || diff % 2 != 0 {
                0
            } else {
                ring.dim((diff / 2) as i64)
            }
        })
        .sum()
}

/// Row echelon form built by insertion. Only the first `key` columns are
/// used for pivots; trailing columns are carried along.
#[derive(Clone, Debug)]
pub struct Echelon {
    key: usize,
    width: usize,
    rows: Vec<Vec<Coef>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(key: usize, width: usize) -> Self {
        Echelon { key, width, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn square(n: usize) -> Self {
        Self::new(n, n)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Coef>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Reduce `v` against the stored rows in place.
    pub fn reduce(&self, v: &mut [Coef]) -> Result<()> {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c == 0 {
                continue;
            }
            let a = row[p];
            let g = gcd(a, c);
            let (fa, fc) = (a / g, c / g);
            for (x, &y) in v.iter_mut().zip(row) {
                let t = cmul(*x, fa)?;
                *x = if y == 0 { t } else { t.checked_sub(cmul(fc, y)?).ok_or(Error::Overflow)? };
            }
            normalize_keep_sign(v);
        }
        Ok(())
    }

    /// Insert `v`; returns true if the rank went up. Existing rows are
    /// cleared in the new pivot column, so rows stay fully reduced.
    pub fn insert(&mut self, mut v: Vec<Coef>) -> Result<bool> {
        debug_assert_eq!(v.len(), self.width);
        self.reduce(&mut v)?;
        let Some(p) = v[..self.key].iter().position(|&x| x != 0) else { return Ok(false) };
        normalize(&mut v);
        let a = v[p];
        for row in self.rows.iter_mut() {
            let c = row[p];
            if c == 0 {
                continue;
            }
            let g = gcd(a, c);
            let (fa, fc) = (a / g, c / g);
            for (x, &y) in row.iter_mut().zip(&v) {
                let t = cmul(*x, fa)?;
                *x = if y == 0 { t } else { t.checked_sub(cmul(fc, y)?).ok_or(Error::Overflow)? };
            }
            normalize_keep_sign(row);
        }
        self.rows.push(v);
        self.pivots.push(p);
        Ok(true)
    }

    pub fn contains(&self, v: &[Coef]) -> Result<bool> {
        let mut w = v.to_vec();
        self.reduce(&mut w)?;
        Ok(is_zero(&w[..self.key]))
    }
}

/// Divide by the content without changing the sign.
fn normalize_keep_sign(v: &mut [Coef]) {
    let mut g = 0;
    for &x in v.iter() {
        if x != 0 {
            g = gcd(g, x);
            if g == 1 {
                return;
            }
        }
    }
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

fn lcm(a: Coef, b: Coef) -> Result<Coef> {
    cmul(a / gcd(a, b), b)
}

/// Rows of the matrix with columns `cols` (each of length `m`), reduced.
fn row_reduce(cols: &[Vec<Coef>], m: usize, extra: &[Vec<Coef>]) -> Result<(Echelon, Vec<bool>)> {
    let n = cols.len();
    let k = extra.len();
    let mut ech = Echelon::new(n, n + k);
    let mut bad = vec![false; k];
    for r in 0..m {
        let mut v: Vec<Coef> = cols.iter().map(|c| c[r]).chain(extra.iter().map(|b| b[r])).collect();
        ech.reduce(&mut v)?;
        if is_zero(&v[..n]) {
            for j in 0..k {
                bad[j] |= v[n + j] != 0;
            }
        } else {
            ech.insert(v)?;
        }
    }
    Ok((ech, bad))
}

/// Kernel of the map whose columns are `cols` (each of length `m`): one
/// vector per free column of the reduced row form.
pub fn kernel(cols: &[Vec<Coef>], m: usize) -> Result<Vec<Vec<Coef>>> {
    let (ech, _) = row_reduce(cols, m, &[])?;
    kernel_of(&ech)
}

/// Kernel of the matrix whose rows have been inserted into `ech`.
pub fn kernel_of(ech: &Echelon) -> Result<Vec<Vec<Coef>>> {
    let n = ech.key;
    let mut is_pivot = vec![false; n];
    for &p in ech.pivots() {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for f in (0..n).filter(|&f| !is_pivot[f]) {
        let mut l: Coef = 1;
        for (row, &p) in ech.rows().iter().zip(ech.pivots()) {
            if row[f] != 0 {
                l = lcm(l, row[p])?;
            }
        }
        let mut x = vec![0; n];
        x[f] = l;
        for (row, &p) in ech.rows().iter().zip(ech.pivots()) {
            if row[f] != 0 {
                x[p] = -cmul(row[f], l / row[p])?;
            }
        }
        normalize(&mut x);
        out.push(x);
    }
    Ok(out)
}

/// Rank of the span of `vs`.
pub fn rank(vs: &[Vec<Coef>], m: usize) -> Result<usize> {
    let mut ech = Echelon::square(m);
    for v in vs {
        ech.insert(v.clone())?;
    }
    Ok(ech.rank())
}

/// Solve `Σ x_i cols_i = s * b` for all right-hand sides at once. Returns
/// `(x, s)` per right-hand side with `s > 0`, or `None` if unsolvable.
pub fn solve(cols: &[Vec<Coef>], m: usize, rhs: &[Vec<Coef>]) -> Result<Vec<Option<(Vec<Coef>, Coef)>>> {
    let n = cols.len();
    let (ech, bad) = row_reduce(cols, m, rhs)?;
    let mut out = Vec::with_capacity(rhs.len());
    for j in 0..rhs.len() {
        if bad[j] {
            out.push(None);
            continue;
        }
        let mut s: Coef = 1;
        for (row, &p) in ech.rows().iter().zip(ech.pivots()) {
            if row[n + j] != 0 {
                s = lcm(s, row[p])?;
            }
        }
        let mut x = vec![0; n];
        for (row, &p) in ech.rows().iter().zip(ech.pivots()) {
            if row[n + j] != 0 {
                x[p] = cmul(row[n + j], s / row[p])?;
            }
        }
        out.push(Some((x, s)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn monomial_counts() {
        let r = PolyRing::new(3, 6).unwrap();
        for h in 0..=6 {
            assert_eq!(r.dim(h as i64), binom(h + 2, 2));
        }
        assert_eq!(r.dim(7), 0);
        assert_eq!(r.dim(-1), 0);
    }

    #[test]
    fn principal_ideal_slice() {
        let r = PolyRing::new(2, 4).unwrap();
        let a = r.linear(&[1, -1]);
        let mut ech = Echelon::square(r.dim(1));
        for m in 0..r.dim(0) {
            let mut out = vec![0; r.dim(1)];
            r.mul_mono_into(&a, 0, m, 1, &mut out).unwrap();
            ech.insert(out).unwrap();
        }
        assert_eq!(ech.rank(), 1);
        // S_1 * α in degree 4: dimension 2 of 3
        let mut ech = Echelon::square(r.dim(2));
        for m in 0..r.dim(1) {
            let mut out = vec![0; r.dim(2)];
            r.mul_mono_into(&a, 1, m, 1, &mut out).unwrap();
            ech.insert(out).unwrap();
        }
        assert_eq!(ech.rank(), 2);
    }

    #[test]
    fn reduction_kills_label() {
        let amb = Ambient::new(3, 4).unwrap();
        for label in [vec![1, 0, 0], vec![2, -1, 3], vec![0, 3, 2], vec![-1, 1, 0]] {
            let a = amb.s.linear(&label.iter().map(|&x| x as Coef).collect::<Vec<_>>());
            assert!(amb.reduce(&label, &a).unwrap().is_zero());
            let x = amb.s.var(1);
            let p = amb.s.mul(&x, &x).unwrap();
            let back = amb.lift(&label, &amb.reduce(&label, &p).unwrap()).unwrap();
            // back - p is divisible by α: reduces to zero
            let mut d = back.clone();
            axpy(&mut d.c, -1, &p.c).unwrap();
            assert!(amb.reduce(&label, &d).unwrap().is_zero());
            // red ∘ lift = id on the quotient
            let q = amb.q.var(0);
            let q2 = amb.q.mul(&q, &amb.q.var(1)).unwrap();
            assert_eq!(amb.reduce(&label, &amb.lift(&label, &q2).unwrap()).unwrap(), q2);
        }
    }

    #[test]
    fn kernel_of_zero_and_solve() {
        let k = kernel(&[vec![0, 0], vec![0, 0]], 2).unwrap();
        assert_eq!(k.len(), 2);
        let cols = vec![vec![2, 0], vec![0, 3]];
        let sol = solve(&cols, 2, &[vec![1, 1], vec![0, 0]]).unwrap();
        let (x, s) = sol[0].clone().unwrap();
        assert_eq!(x[0] * 2, s);
        assert_eq!(x[1] * 3, s);
        assert!(solve(&[vec![1, 0]], 2, &[vec![0, 1]]).unwrap()[0].is_none());
    }

    proptest! {
        #[test]
        fn rank_nullity(entries in proptest::collection::vec(-3i64..4, 12)) {
            let cols: Vec<Vec<Coef>> = entries.chunks(3).map(|c| c.iter().map(|&x| x as Coef).collect()).collect();
            let k = kernel(&cols, 3).unwrap();
            let r = rank(&cols, 3).unwrap();
            prop_assert_eq!(k.len() + r, cols.len());
            for v in &k {
                let mut img = vec![0; 3];
                for (c, &x) in cols.iter().zip(v) {
                    axpy(&mut img, x, c).unwrap();
                }
                prop_assert!(is_zero(&img));
            }
        }

        #[test]
        fn substitution_is_multiplicative(a in proptest::collection::vec(-2i64..3, 9), i in 0usize..3, j in 0usize..3) {
            let r = PolyRing::new(3, 3).unwrap();
            let t: Vec<Vec<Coef>> = a.chunks(3).map(|c| c.iter().map(|&x| x as Coef).collect()).collect();
            let s = Subst::new(t);
            let xi = r.var(i);
            let xj = r.var(j);
            let lhs = s.apply(&r, &r, &r.mul(&xi, &xj).unwrap()).unwrap();
            let rhs = r.mul(&s.apply(&r, &r, &xi).unwrap(), &s.apply(&r, &r, &xj).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
