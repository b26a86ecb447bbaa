//! Homomorphisms of sheaves, the graded rank of `Hom`, restriction to
//! shrinking windows and the exponent bounds behind finiteness.
//!
//! A morphism of degree `n` is a family of vertex maps `φ^x` with
//! `φ^x(e_j) ∈ G^x` in degree `deg e_j + n`. Edge maps are not unknowns:
//! when the upper edge maps of `F` are onto, compatibility on an edge is
//! the condition `ρ^G_lo φ^lo a = ρ^G_hi φ^hi b` for generators `(a, b)` of
//! the sections of `F` over that edge.

use crate::alcoves::Alcove;
use crate::error::{Error, Result};
use crate::graded::{layout, map_slice, mul_poly_slice, slice_dim_of, PolyMat};
use crate::laurent::Laurent;
use crate::linalg::{kernel_of, Coef, Echelon, Poly};
use crate::moment_graph::MomentGraph;
use crate::rootdata::{Affine, RootDatum, Vector};
use crate::sheaf::{ambient_for, bm_build, RingMode, Sheaf};
use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Morphisms `F → G` of one degree.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub degree: i32,
    pub dimension: usize,
    /// One family of vertex maps per basis element, indexed like the graph.
    pub basis: Vec<Vec<PolyMat>>,
    /// Coordinates of the graph vertices.
    pub window: Vec<Affine>,
    flat: Vec<Vec<Coef>>,
    blocks: Vec<Vec<(usize, usize)>>,
}

impl HomSpace {
    /// Rank of the restrictions of this basis to the vertices of `small`,
    /// laid out as unknowns of `small`.
    pub fn restriction_rank(&self, small: &HomSpace) -> Result<usize> {
        let pos: Vec<usize> = small
            .window
            .iter()
            .map(|c| self.window.iter().position(|d| d == c).ok_or_else(|| Error::Invalid("window is not a subset".into())))
            .collect::<Result<_>>()?;
        let width: usize = small.blocks.iter().flatten().map(|b| b.1).sum();
        let mut ech = Echelon::square(width);
        for v in &self.flat {
            let mut w = Vec::with_capacity(width);
            for (xs, &xb) in pos.iter().enumerate() {
                if small.blocks[xs].len() != self.blocks[xb].len() {
                    return Err(Error::Invalid("stalks differ on the smaller window".into()));
                }
                for &(off, len) in &self.blocks[xb] {
                    w.extend_from_slice(&v[off..off + len]);
                }
            }
            ech.insert(w)?;
        }
        Ok(ech.rank())
    }
}

/// A generator of the sections over one edge: a scaled generator of the
/// lower stalk (or nothing) and a polynomial combination in the upper one.
struct EdgeSection {
    deg: i32,
    lower: Option<(usize, Coef)>,
    upper: Vec<(usize, Poly)>,
}

fn edge_sections(f: &Sheaf, k: usize) -> Result<Vec<EdgeSection>> {
    let amb = f.ambient();
    let e = f.graph().edge(k);
    let m = f.edge_module(k);
    let (lo, hi) = (f.stalk(e.lo), f.stalk(e.hi));
    let mut out = Vec::new();
    if m.degs.is_empty() {
        for (j, &d) in lo.iter().enumerate() {
            out.push(EdgeSection { deg: d, lower: Some((j, 1)), upper: vec![] });
        }
        for (i, &d) in hi.iter().enumerate() {
            out.push(EdgeSection { deg: d, lower: None, upper: vec![(i, amb.s.one())] });
        }
        return Ok(out);
    }
    let diag = m
        .hi
        .scalar_diagonal()
        .ok_or_else(|| Error::Hypothesis(format!("upper map on {} is not in normal form", f.edge_name(k))))?;
    let l = diag.iter().fold(1 as Coef, |a, &b| a.lcm(&b));
    let label = f.label(k);
    for (j, &d) in lo.iter().enumerate() {
        let mut upper = Vec::new();
        for (i, &c) in diag.iter().enumerate() {
            let q = m.lo.entry(j, i);
            if q.is_zero() {
                continue;
            }
            upper.push((i, amb.lift(&label, q)?.scaled(l / c)?));
        }
        out.push(EdgeSection { deg: d, lower: Some((j, l)), upper });
    }
    let alpha = amb.s.linear(&label.iter().map(|&x| x as Coef).collect::<Vec<_>>());
    for (i, &d) in hi.iter().enumerate() {
        out.push(EdgeSection { deg: d + 2, lower: None, upper: vec![(i, alpha.clone())] });
    }
    Ok(out)
}

/// All degree-`degree` morphisms `F → G`. `F` needs onto upper edge maps
/// in normal form.
pub fn hom_space(f: &Sheaf, g: &Sheaf, degree: i32) -> Result<HomSpace> {
    f.same_graph(g)?;
    let graph = f.graph();
    let amb = f.ambient();
    let ring = &amb.s;
    let mut blocks = Vec::with_capacity(graph.len());
    let mut total = 0;
    for x in 0..graph.len() {
        let mut bx = Vec::new();
        for &d in f.stalk(x) {
            let n = layout(ring, g.stalk(x), d + degree)?.dim;
            bx.push((total, n));
            total += n;
        }
        blocks.push(bx);
    }
    let mut ech = Echelon::square(total);
    for k in 0..graph.edges().len() {
        let gm = g.edge_module(k);
        if gm.degs.is_empty() {
            continue;
        }
        let e = graph.edge(k);
        let red = g.reduction(k)?;
        for sec in edge_sections(f, k)? {
            let d = sec.deg + degree;
            let rows = layout(&amb.q, &gm.degs, d)?.dim;
            if rows == 0 {
                continue;
            }
            let mut eqs = vec![vec![0 as Coef; total]; rows];
            if let Some((j, c)) = sec.lower {
                let cols = map_slice(ring, &amb.q, Some(&red.red), &gm.lo, d)?;
                let (off, n) = blocks[e.lo][j];
                for t in 0..n {
                    for (r, eq) in eqs.iter_mut().enumerate() {
                        eq[off + t] += c * cols[t][r];
                    }
                }
            }
            if !sec.upper.is_empty() {
                let cols = map_slice(ring, &amb.q, Some(&red.red), &gm.hi, d)?;
                let gdeg = g.stalk(e.hi);
                for (i, q) in &sec.upper {
                    let (off, n) = blocks[e.hi][*i];
                    let src = f.stalk(e.hi)[*i] + degree;
                    for t in 0..n {
                        let mut unit = vec![0 as Coef; n];
                        unit[t] = 1;
                        let v = mul_poly_slice(ring, gdeg, src, q, &unit)?;
                        let img = crate::graded::apply_cols(&cols, rows, &v)?;
                        for (r, eq) in eqs.iter_mut().enumerate() {
                            eq[off + t] -= img[r];
                        }
                    }
                }
            }
            for eq in eqs {
                ech.insert(eq)?;
            }
        }
    }
    let flat = kernel_of(&ech)?;
    let mut basis = Vec::with_capacity(flat.len());
    for v in &flat {
        let mut maps = Vec::with_capacity(graph.len());
        for x in 0..graph.len() {
            let src: Vec<i32> = f.stalk(x).iter().map(|d| d + degree).collect();
            let cols: Vec<Vec<Coef>> = blocks[x].iter().map(|&(off, n)| v[off..off + n].to_vec()).collect();
            maps.push(PolyMat::from_slices(ring, &src, g.stalk(x), &cols)?);
        }
        basis.push(maps);
    }
    Ok(HomSpace { degree, dimension: flat.len(), basis, window: graph.coords().to_vec(), flat, blocks })
}

/// `Σ_x conj(grk F^x) · grk G^{[x]}`. Requires `F` to satisfy the axioms
/// and `G` to have free costalks and satisfy BM3 and BM4.
pub fn hom_grk_formula(f: &Sheaf, g: &Sheaf) -> Result<Laurent> {
    f.same_graph(g)?;
    let rf = f.verify_axioms()?;
    if !rf.all_ok() {
        return Err(Error::Hypothesis(format!("source is not a BM sheaf: {}", rf)));
    }
    let rg = g.verify_axioms()?;
    if !(rg.bm3.ok && rg.bm4.ok) {
        return Err(Error::Hypothesis(format!("target fails BM3/BM4: {}", rg)));
    }
    let mut out = Laurent::zero();
    for x in 0..f.graph().len() {
        if f.stalk(x).is_empty() || g.stalk(x).is_empty() {
            continue;
        }
        out += &(&f.stalk_grk(x).bar() * &g.costalk_grk(x)?);
    }
    Ok(out)
}

/// Dimension of the degree-`degree` part of a free module with graded rank
/// `p` over the ring of `sheaf`.
pub fn degree_dim(sheaf: &Sheaf, p: &Laurent, degree: i32) -> usize {
    slice_dim_of(&sheaf.ambient().s, p, degree)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Dimensions agree from this step to the end of the scan.
    Stabilized { from_step: usize },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub step: usize,
    pub lower_alcove: String,
    pub vertices: usize,
    pub dimension: usize,
    /// Restriction from this window onto the previous one is onto.
    pub onto_previous: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scan {
    pub rows: Vec<ScanRow>,
    pub verdict: Verdict,
}

impl Scan {
    pub fn to_csv(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Stabilized { from_step } => format!("stabilized@{}", from_step),
            Verdict::Inconclusive => "inconclusive".into(),
        };
        let mut s = String::from("step,lower_alcove,vertices,dimension,onto_previous,verdict\n");
        for r in &self.rows {
            let onto = r.onto_previous.map_or(String::new(), |b| b.to_string());
            s.push_str(&format!("{},\"{}\",{},{},{},{}\n", r.step, r.lower_alcove, r.vertices, r.dimension, onto, verdict));
        }
        s
    }
}

fn verdict_of(dims: &[usize]) -> Verdict {
    if dims.len() < 2 {
        return Verdict::Inconclusive;
    }
    let last = dims[dims.len() - 1];
    let mut from = dims.len() - 1;
    while from > 0 && dims[from - 1] == last {
        from -= 1;
    }
    if from + 1 < dims.len() {
        Verdict::Stabilized { from_step: from }
    } else {
        Verdict::Inconclusive
    }
}

/// Alcoves `≥ lower` and below one of `tops`.
fn window_below(rd: &RootDatum, lower: Alcove, tops: &[Alcove]) -> Vec<Alcove> {
    let mut v: Vec<Alcove> = tops.iter().flat_map(|&t| rd.interval(lower, t)).collect();
    rd.sort_alcoves(&mut v);
    v.dedup();
    v
}

fn indecomposable_on(graph: &Arc<MomentGraph>, amb: &Arc<crate::linalg::Ambient>, top: Alcove) -> Result<Sheaf> {
    match graph.find_alcove(top) {
        Some(x) => bm_build(graph.clone(), amb.clone(), x),
        None => Ok(Sheaf::zero(graph.clone(), amb.clone())),
    }
}

/// Degree-zero `Hom(B(f_top), B(g_top))` on the windows `{A ≥ base − kρ∨}`
/// for `k = 0..=steps`, with the restriction map checked to be onto at
/// every step.
pub fn stability_scan(rd: Arc<RootDatum>, f_top: Alcove, g_top: Alcove, base: Alcove, steps: usize, mode: RingMode) -> Result<Scan> {
    let rho = rd.rho_check();
    let mut rows: Vec<ScanRow> = Vec::new();
    let mut prev: Option<Vec<Affine>> = None;
    for k in 0..=steps {
        let mut shift: Vector = [0; crate::rootdata::MAXR];
        for i in 0..rd.rank() {
            shift[i] = -(k as i64) * rho[i];
        }
        let lower = rd.translate(base, &shift);
        let alcoves = window_below(&rd, lower, &[f_top, g_top]);
        let graph = Arc::new(MomentGraph::alcove_window(rd.clone(), &alcoves)?);
        let amb = ambient_for(&graph, mode)?;
        let f = indecomposable_on(&graph, &amb, f_top)?;
        let g = indecomposable_on(&graph, &amb, g_top)?;
        let hom = hom_space(&f, &g, 0)?;
        let onto = match &prev {
            None => None,
            Some(coords) => {
                let sub: Vec<usize> = coords.iter().map(|c| graph.vertex(c)).collect::<Result<_>>()?;
                let small = hom_space(&f.restrict(&sub)?, &g.restrict(&sub)?, 0)?;
                Some(hom.restriction_rank(&small)? == small.dimension)
            }
        };
        rows.push(ScanRow { step: k, lower_alcove: rd.alcove_string(lower), vertices: graph.len(), dimension: hom.dimension, onto_previous: onto });
        prev = Some(graph.coords().to_vec());
    }
    let dims: Vec<usize> = rows.iter().map(|r| r.dimension).collect();
    Ok(Scan { verdict: verdict_of(&dims), rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Stalk,
    CostalkUpper,
    CostalkLower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub vertex: String,
    pub kind: BoundKind,
    pub exponent: i32,
}

/// Constants of the exponent bounds for `B(A_λ⁺)`, with `k` an exponent of
/// the graded rank at `A`:
/// stalks `k - ℓ(A) ≥ c1 - ℓ(A)/n1`, costalks
/// `c2 - 2ℓ(w₀) ≤ k - ℓ(A) ≤ c2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub c1: Rational64,
    pub n1: Rational64,
    pub c2: Rational64,
    pub c2_lower: Rational64,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

/// Check the stalk and costalk exponent bounds of a sheaf `B(A_λ⁺)` on an
/// alcove window.
pub fn finiteness_bounds(f: &Sheaf, lambda: &Vector) -> Result<Bounds> {
    let graph = f.graph();
    let rd = graph.root_datum();
    let len_top = rd.length(rd.a_plus(lambda));
    let len_base = rd.length(rd.a_plus(&[0; crate::rootdata::MAXR]));
    let len_w0 = rd.weyl().len(rd.weyl().longest()) as i64;
    let n1 = rd.n1();
    let c1 = (Rational64::from_integer(1) / n1 - 1) * len_top;
    let c2 = Rational64::from_integer(len_base - len_top);
    let c2_lower = c2 - 2 * len_w0;
    let mut violations = Vec::new();
    let mut checked = 0;
    for x in 0..graph.len() {
        if f.stalk(x).is_empty() {
            continue;
        }
        let l = rd.length(rd.alcove(&graph.coord(x)));
        let lr = Rational64::from_integer(l);
        for (k, _) in f.stalk_grk(x).terms() {
            checked += 1;
            if Rational64::from_integer(k as i64) - lr < c1 - lr / n1 {
                violations.push(Violation { vertex: graph.vertex_name(x), kind: BoundKind::Stalk, exponent: k });
            }
        }
        for (k, _) in f.costalk_grk(x)?.terms() {
            checked += 1;
            let e = Rational64::from_integer(k as i64 - l);
            if e > c2 {
                violations.push(Violation { vertex: graph.vertex_name(x), kind: BoundKind::CostalkUpper, exponent: k });
            }
            if e < c2_lower {
                violations.push(Violation { vertex: graph.vertex_name(x), kind: BoundKind::CostalkLower, exponent: k });
            }
        }
    }
    Ok(Bounds { c1, n1, c2, c2_lower, checked, violations })
}

/// `B(A_λ⁺)` on the window `{A ≥ A_λ⁺ − kρ∨} ∩ {A ≤ A_λ⁺}`.
pub fn dominant_indecomposable(rd: Arc<RootDatum>, lambda: &Vector, steps: i64, mode: RingMode) -> Result<Sheaf> {
    let top = rd.a_plus(lambda);
    let rho = rd.rho_check();
    let mut shift: Vector = [0; crate::rootdata::MAXR];
    for i in 0..rd.rank() {
        shift[i] = -steps * rho[i];
    }
    let lower = rd.translate(top, &shift);
    let graph = Arc::new(MomentGraph::alcove_interval(rd, lower, top)?);
    let amb = ambient_for(&graph, mode)?;
    let x = graph.find_alcove(top).ok_or_else(|| Error::MissingVertex("top alcove".into()))?;
    bm_build(graph, amb, x)
}
