//! Graded free modules, homogeneous matrices between them, and submodules
//! known degree by degree.
//!
//! A free module is a list of generator degrees; a generator in degree `g`
//! contributes `v^{-g}` to the graded rank, so `grk S(n) = v^n`.

use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::linalg::{is_zero, Coef, Echelon, Layout, Poly, PolyRing, Subst};
use std::collections::BTreeMap;

/// `Σ v^{-g}` over generator degrees.
pub fn grk(degs: &[i32]) -> Laurent {
    let mut p = Laurent::zero();
    for &g in degs {
        p += &Laurent::v_pow(-g);
    }
    p
}

/// Generator degrees with graded rank `p`; fails on negative coefficients.
pub fn degs_of(p: &Laurent) -> Result<Vec<i32>> {
    let mut out = Vec::new();
    for (e, c) in p.terms() {
        let n: i64 = c.try_into().map_err(|_| Error::Overflow)?;
        if n < 0 {
            return Err(Error::NotFree(format!("negative coefficient in {}", p)));
        }
        for _ in 0..n {
            out.push(-e);
        }
    }
    out.sort();
    Ok(out)
}

/// Dimension of the degree-`d` part of the free module with graded rank `p`.
pub fn slice_dim_of(ring: &PolyRing, p: &Laurent, d: i32) -> usize {
    p.terms()
        .map(|(e, c)| {
            let n: i64 = c.try_into().unwrap_or(0);
            let diff = d + e;
            if diff < 0 || diff % 2 != 0 {
                0
            } else {
                n as usize * ring.dim((diff / 2) as i64)
            }
        })
        .sum()
}

fn zero_poly() -> Poly {
    Poly { h: 0, c: Vec::new() }
}

/// A degree-0 map between graded free modules: `cols[j][i]` is the
/// coefficient of target generator `i` in the image of source generator `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMat {
    pub src: Vec<i32>,
    pub dst: Vec<i32>,
    pub cols: Vec<Vec<Poly>>,
}

impl PolyMat {
    pub fn zero(src: &[i32], dst: &[i32]) -> Self {
        PolyMat { src: src.to_vec(), dst: dst.to_vec(), cols: vec![vec![zero_poly(); dst.len()]; src.len()] }
    }

    /// `scale` times the identity; requires `src == dst`.
    pub fn identity(degs: &[i32], scale: Coef) -> Self {
        let mut m = Self::zero(degs, degs);
        for j in 0..degs.len() {
            m.cols[j][j] = Poly { h: 0, c: vec![scale] };
        }
        m
    }

    /// Polynomial degree of entry `(j, i)`, if the degrees allow one.
    pub fn entry_h(&self, j: usize, i: usize) -> Option<usize> {
        let diff = self.src[j] - self.dst[i];
        (diff >= 0 && diff % 2 == 0).then_some((diff / 2) as usize)
    }

    pub fn entry(&self, j: usize, i: usize) -> &Poly {
        &self.cols[j][i]
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.iter().all(|p| p.is_zero()))
    }

    /// Diagonal with constant nonzero entries; returns them.
    pub fn scalar_diagonal(&self) -> Option<Vec<Coef>> {
        if self.src != self.dst {
            return None;
        }
        let mut out = Vec::with_capacity(self.src.len());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, p) in col.iter().enumerate() {
                if i != j && !p.is_zero() {
                    return None;
                }
            }
            let d = &col[j];
            if d.h != 0 || d.is_zero() {
                return None;
            }
            out.push(d.c[0]);
        }
        Some(out)
    }

    /// Build from slice columns: column `j` lives in the degree-`src[j]`
    /// slice of the target.
    pub fn from_slices(ring: &PolyRing, src: &[i32], dst: &[i32], cols: &[Vec<Coef>]) -> Result<Self> {
        let mut m = Self::zero(src, dst);
        for (j, v) in cols.iter().enumerate() {
            m.cols[j] = slice_to_polys(ring, dst, src[j], v)?;
        }
        Ok(m)
    }

    /// Apply a ring map to every entry.
    pub fn map_entries<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&Poly) -> Result<Poly>,
    {
        let mut m = self.clone();
        for col in m.cols.iter_mut() {
            for p in col.iter_mut() {
                if !p.is_zero() {
                    *p = f(p)?;
                }
            }
        }
        Ok(m)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &PolyMat) -> Self {
        let mut src = self.src.clone();
        src.extend(&other.src);
        let mut dst = self.dst.clone();
        dst.extend(&other.dst);
        let mut m = Self::zero(&src, &dst);
        for (j, col) in self.cols.iter().enumerate() {
            for (i, p) in col.iter().enumerate() {
                m.cols[j][i] = p.clone();
            }
        }
        let (a, b) = (self.src.len(), self.dst.len());
        for (j, col) in other.cols.iter().enumerate() {
            for (i, p) in col.iter().enumerate() {
                m.cols[a + j][b + i] = p.clone();
            }
        }
        m
    }

    /// Shift all degrees by `-n` (the module `M(n)`).
    pub fn shifted(&self, n: i32) -> Self {
        let mut m = self.clone();
        m.src.iter_mut().for_each(|g| *g -= n);
        m.dst.iter_mut().for_each(|g| *g -= n);
        m
    }

    /// Keep only the given source columns.
    pub fn select_src(&self, keep: &[usize]) -> Self {
        PolyMat {
            src: keep.iter().map(|&j| self.src[j]).collect(),
            dst: self.dst.clone(),
            cols: keep.iter().map(|&j| self.cols[j].clone()).collect(),
        }
    }
}

/// Degree-`d` slice layout of `⊕ R(-g)`.
pub fn layout(ring: &PolyRing, degs: &[i32], d: i32) -> Result<Layout> {
    Layout::new(ring, degs, d)
}

/// Per-generator homogeneous polynomials to a slice vector.
pub fn polys_to_slice(ring: &PolyRing, degs: &[i32], d: i32, polys: &[Poly]) -> Result<Vec<Coef>> {
    let lay = layout(ring, degs, d)?;
    let mut out = vec![0; lay.dim];
    for &(j, h, off) in &lay.blocks {
        let p = &polys[j];
        if p.is_zero() {
            continue;
        }
        if p.h != h {
            return Err(Error::Invalid(format!("entry of degree {} where {} was expected", p.h, h)));
        }
        out[off..off + p.c.len()].copy_from_slice(&p.c);
    }
    Ok(out)
}

pub fn slice_to_polys(ring: &PolyRing, degs: &[i32], d: i32, v: &[Coef]) -> Result<Vec<Poly>> {
    let lay = layout(ring, degs, d)?;
    let mut out = vec![zero_poly(); degs.len()];
    for &(j, h, off) in &lay.blocks {
        let n = ring.dim(h as i64);
        let c = &v[off..off + n];
        if !is_zero(c) {
            out[j] = Poly { h, c: c.to_vec() };
        }
    }
    Ok(out)
}

/// Multiply a degree-`d` slice vector by the linear form `lin`.
pub fn mul_linear_slice(ring: &PolyRing, degs: &[i32], d: i32, lin: &[Coef], v: &[Coef]) -> Result<Vec<Coef>> {
    let src = layout(ring, degs, d)?;
    let dst = layout(ring, degs, d + 2)?;
    let mut out: Vec<Coef> = vec![0; dst.dim];
    for &(j, h, off) in &src.blocks {
        let (_, doff) = dst.block(j).ok_or(Error::Cutoff { cutoff: 2 * ring.hmax() as i32, degree: d + 2 })?;
        let n = ring.dim(h as i64);
        let m = ring.dim(h as i64 + 1);
        let mut tmp = vec![0; m];
        ring.mul_linear(lin, h, &v[off..off + n], &mut tmp)?;
        for (o, t) in out[doff..doff + m].iter_mut().zip(tmp) {
            *o = o.checked_add(t).ok_or(Error::Overflow)?;
        }
    }
    Ok(out)
}

/// Multiply a degree-`d` slice vector by a homogeneous polynomial.
pub fn mul_poly_slice(ring: &PolyRing, degs: &[i32], d: i32, p: &Poly, v: &[Coef]) -> Result<Vec<Coef>> {
    let d2 = d + 2 * p.h as i32;
    let src = layout(ring, degs, d)?;
    let dst = layout(ring, degs, d2)?;
    let mut out: Vec<Coef> = vec![0; dst.dim];
    if p.is_zero() {
        return Ok(out);
    }
    for &(j, h, off) in &src.blocks {
        let n = ring.dim(h as i64);
        let block = Poly { h, c: v[off..off + n].to_vec() };
        if block.is_zero() {
            continue;
        }
        let prod = ring.mul(&block, p)?;
        let (_, doff) = dst.block(j).unwrap();
        for (o, t) in out[doff..doff + prod.c.len()].iter_mut().zip(prod.c) {
            *o = o.checked_add(t).ok_or(Error::Overflow)?;
        }
    }
    Ok(out)
}

/// Columns of `mat` on degree-`d` slices. Source coefficients live in
/// `src`, target in `dst`; `phi` maps the source ring to the target ring
/// (None when they coincide).
pub fn map_slice(src: &PolyRing, dst: &PolyRing, phi: Option<&Subst>, mat: &PolyMat, d: i32) -> Result<Vec<Vec<Coef>>> {
    let slay = layout(src, &mat.src, d)?;
    let dlay = layout(dst, &mat.dst, d)?;
    let mut cols = Vec::with_capacity(slay.dim);
    for &(j, h, _) in &slay.blocks {
        let red = match phi {
            Some(s) => Some(s.matrix(src, dst, h)?),
            None => None,
        };
        for m in 0..src.dim(h as i64) {
            let mut out: Vec<Coef> = vec![0; dlay.dim];
            for (i, p) in mat.cols[j].iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let (_, off) = dlay.block(i).ok_or(Error::Invalid("entry outside target slice".into()))?;
                match &red {
                    None => {
                        let n = dst.dim(p.h as i64 + h as i64);
                        let mut tmp = vec![0; n];
                        dst.mul_mono_into(p, h, m, 1, &mut tmp)?;
                        for (o, t) in out[off..off + n].iter_mut().zip(tmp) {
                            *o = o.checked_add(t).ok_or(Error::Overflow)?;
                        }
                    }
                    Some(r) => {
                        let img = Poly { h, c: r[m].clone() };
                        if img.is_zero() {
                            continue;
                        }
                        let prod = dst.mul(&img, p)?;
                        for (o, t) in out[off..off + prod.c.len()].iter_mut().zip(prod.c) {
                            *o = o.checked_add(t).ok_or(Error::Overflow)?;
                        }
                    }
                }
            }
            cols.push(out);
        }
    }
    Ok(cols)
}

/// Image of a vector under a list of slice columns.
pub fn apply_cols(cols: &[Vec<Coef>], rows: usize, v: &[Coef]) -> Result<Vec<Coef>> {
    let mut out = vec![0; rows];
    for (c, &x) in cols.iter().zip(v) {
        if x != 0 {
            crate::linalg::axpy(&mut out, x, c)?;
        }
    }
    Ok(out)
}

/// A graded submodule of `⊕ R(-g)`, known slice by slice through `cutoff`.
#[derive(Clone, Debug)]
pub struct TruncModule {
    pub degs: Vec<i32>,
    pub cutoff: i32,
    pub slices: BTreeMap<i32, Vec<Vec<Coef>>>,
}

impl TruncModule {
    pub fn dim(&self, d: i32) -> usize {
        self.slices.get(&d).map_or(0, |s| s.len())
    }

    /// Minimal homogeneous generators. New generators within two degrees
    /// of the cutoff mean the cutoff is too small.
    pub fn min_generators(&self, ring: &PolyRing) -> Result<Vec<(i32, Vec<Coef>)>> {
        let mut out = Vec::new();
        for (&d, basis) in &self.slices {
            if basis.is_empty() {
                continue;
            }
            let dim = layout(ring, &self.degs, d)?.dim;
            let mut ech = Echelon::square(dim);
            if let Some(prev) = self.slices.get(&(d - 2)) {
                for v in prev {
                    for i in 0..ring.nvars() {
                        let mut lin = vec![0; ring.nvars()];
                        lin[i] = 1;
                        ech.insert(mul_linear_slice(ring, &self.degs, d - 2, &lin, v)?)?;
                    }
                }
            }
            for v in basis {
                if ech.insert(v.clone())? {
                    if d > self.cutoff - 2 {
                        return Err(Error::Cutoff { cutoff: self.cutoff, degree: d });
                    }
                    out.push((d, v.clone()));
                }
            }
        }
        Ok(out)
    }

    /// Graded rank, certified by comparing every slice dimension with the
    /// free module on the minimal generators.
    pub fn free_grk(&self, ring: &PolyRing) -> Result<Laurent> {
        let gens = self.min_generators(ring)?;
        let degs: Vec<i32> = gens.iter().map(|g| g.0).collect();
        let p = grk(&degs);
        for (&d, basis) in &self.slices {
            if slice_dim_of(ring, &p, d) != basis.len() {
                return Err(Error::NotFree(format!("slice {} has dimension {}, free model {}", d, basis.len(), slice_dim_of(ring, &p, d))));
            }
        }
        Ok(p)
    }
}

/// Kernel of a slicewise map, as a truncated module: `cols(d)` gives the
/// columns of the map on the degree-`d` slice of the source.
pub fn kernel_module<F>(ring: &PolyRing, degs: &[i32], dmin: i32, cutoff: i32, mut cols: F) -> Result<TruncModule>
where
    F: FnMut(i32) -> Result<(Vec<Vec<Coef>>, usize)>,
{
    let mut slices = BTreeMap::new();
    for d in dmin..=cutoff {
        if layout(ring, degs, d)?.dim == 0 {
            continue;
        }
        let (c, rows) = cols(d)?;
        slices.insert(d, crate::linalg::kernel(&c, rows)?);
    }
    Ok(TruncModule { degs: degs.to_vec(), cutoff, slices })
}

/// Image of a slicewise map.
pub fn image_module<F>(degs: &[i32], dmin: i32, cutoff: i32, mut cols: F) -> Result<TruncModule>
where
    F: FnMut(i32) -> Result<(Vec<Vec<Coef>>, usize)>,
{
    let mut slices = BTreeMap::new();
    for d in dmin..=cutoff {
        let (c, rows) = cols(d)?;
        let mut ech = Echelon::square(rows);
        for v in c {
            ech.insert(v)?;
        }
        slices.insert(d, ech.rows().to_vec());
    }
    Ok(TruncModule { degs: degs.to_vec(), cutoff, slices })
}
