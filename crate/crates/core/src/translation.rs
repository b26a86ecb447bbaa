//! Wall-crossing, Bott-Samelson words, translation by coweights, characters
//! and decomposition into indecomposables.

use crate::alcoves::Alcove;
use crate::error::{Error, Result};
use crate::graded::PolyMat;
use crate::hecke::{Hecke, PeriodicElt};
use crate::laurent::Laurent;
use crate::linalg::{axpy, Ambient, Coef, Poly};
use crate::moment_graph::{act_on_label, label_automorphism, normalize_label, Builder, MomentGraph, VERTEX_CAP};
use crate::rootdata::{Affine, RootDatum, Vector};
use crate::sheaf::{bm_build, normalize_edge, EdgeModule, Sheaf};
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

/// Index of `x·s` in the graph, if present.
pub fn partner(graph: &MomentGraph, x: usize, s: usize) -> Result<Option<usize>> {
    let rd = graph.root_datum();
    Ok(graph.find(&rd.mul(&graph.coord(x), &rd.wall(s)?)))
}

pub fn is_wall_stable(graph: &MomentGraph, s: usize) -> Result<bool> {
    for x in 0..graph.len() {
        if partner(graph, x, s)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn add_poly(acc: &mut Poly, p: &Poly) -> Result<()> {
    if p.is_zero() {
        return Ok(());
    }
    if acc.c.is_empty() {
        *acc = p.clone();
        return Ok(());
    }
    axpy(&mut acc.c, 1, &p.c)
}

/// `ρ ∘ P` where `P` has entries in `S` and `ρ` entries in the quotient by
/// `label`; the result has quotient entries.
fn compose(amb: &Ambient, label: &[i64], rho: &PolyMat, p: &PolyMat) -> Result<PolyMat> {
    let mut out = PolyMat::zero(&p.src, &rho.dst);
    for (j, col) in p.cols.iter().enumerate() {
        for (t, a) in col.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ra = amb.reduce(label, a)?;
            for i in 0..rho.dst.len() {
                let b = rho.entry(t, i);
                if b.is_zero() {
                    continue;
                }
                let prod = amb.q.mul(&ra, b)?;
                add_poly(&mut out.cols[j][i], &prod)?;
            }
        }
    }
    Ok(out)
}

/// Stack the targets of two maps with the same source.
fn stack(a: &PolyMat, b: &PolyMat) -> PolyMat {
    let mut dst = a.dst.clone();
    dst.extend(&b.dst);
    let cols = a
        .cols
        .iter()
        .zip(&b.cols)
        .map(|(x, y)| {
            let mut c = x.clone();
            c.extend(y.iter().cloned());
            c
        })
        .collect();
    PolyMat { src: a.src.clone(), dst, cols }
}

/// Move quotient entries from the coordinates of `from` to those of `to`
/// through the ring automorphism given by `imgs`.
fn transport(amb: &Ambient, imgs: &[Vec<Coef>], from: &[i64], to: &[i64], m: &PolyMat) -> Result<PolyMat> {
    let sigma = amb.automorphism(imgs.to_vec());
    m.map_entries(|p| {
        let lifted = amb.lift(from, p)?;
        let moved = sigma.apply(&amb.s, &amb.s, &lifted)?;
        amb.reduce(to, &moved)
    })
}

fn proportional(a: &[i64], b: &[i64]) -> bool {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    normalize_label(&mut x);
    normalize_label(&mut y);
    x == y
}

/// Sections over an `s`-pair, as maps into the two stalks.
#[derive(Clone)]
struct PairBasis {
    degs: Vec<i32>,
    own: PolyMat,
    other: PolyMat,
}

/// The wall-crossing functor for the wall `s`. The graph must be closed
/// under right multiplication by `s`, and the edges joining `s`-pairs must
/// be in normal form.
pub fn theta_s(f: &Sheaf, s: usize) -> Result<Sheaf> {
    let g = f.graph().clone();
    let amb = f.ambient().clone();
    let rd = g.root_datum().clone();
    let n = g.len();
    let mut pair = Vec::with_capacity(n);
    for x in 0..n {
        pair.push(partner(&g, x, s)?.ok_or(Error::NotWallStable(s))?);
    }
    let imgs = label_automorphism(&rd, &rd.wall(s)?, amb.nvars());

    let mut local: Vec<Option<PairBasis>> = vec![None; n];
    for l in 0..n {
        let u = pair[l];
        if g.length(l) > g.length(u) {
            continue;
        }
        let k = g.edge_between(l, u).ok_or_else(|| Error::Invalid(format!("no edge between {} and its wall partner", g.vertex_name(l))))?;
        let e = f.edge_module(k);
        let (sl, su) = (f.stalk(l).to_vec(), f.stalk(u).to_vec());
        if e.degs != su {
            return Err(Error::Hypothesis(format!("edge {} is not the upper stalk mod its label", f.edge_name(k))));
        }
        let m = if su.is_empty() {
            1
        } else {
            match e.hi.scalar_diagonal() {
                Some(d) if d.iter().all(|&c| c == d[0]) => d[0],
                _ => return Err(Error::Hypothesis(format!("edge {} is not in normal form", f.edge_name(k)))),
            }
        };
        let label = f.label(k);
        let mut degs = sl.clone();
        degs.extend(su.iter().map(|d| d + 2));
        let mut pl = PolyMat::zero(&degs, &sl);
        let mut pu = PolyMat::zero(&degs, &su);
        for i in 0..sl.len() {
            pl.cols[i][i] = Poly { h: 0, c: vec![m] };
            for t in 0..su.len() {
                let q = e.lo.entry(i, t);
                if !q.is_zero() {
                    pu.cols[i][t] = amb.lift(&label, q)?;
                }
            }
        }
        let alpha: Vec<Coef> = label.iter().map(|&c| c as Coef).collect();
        for t in 0..su.len() {
            pu.cols[sl.len() + t][t] = amb.s.linear(&alpha);
        }
        local[l] = Some(PairBasis { degs: degs.clone(), own: pl.clone(), other: pu.clone() });
        local[u] = Some(PairBasis { degs, own: pu, other: pl });
    }
    let local: Vec<PairBasis> = local.into_iter().map(|p| p.unwrap()).collect();
    let stalks: Vec<Vec<i32>> = local.iter().map(|p| p.degs.iter().map(|d| d - 1).collect()).collect();

    let mut edges = Vec::with_capacity(g.edges().len());
    for k in 0..g.edges().len() {
        let ge = g.edge(k);
        let (lo, hi) = (ge.lo, ge.hi);
        if stalks[hi].is_empty() {
            edges.push(EdgeModule::zero(&stalks[lo], &[]));
            continue;
        }
        if pair[lo] == hi {
            edges.push(EdgeModule { degs: stalks[hi].clone(), hi: PolyMat::identity(&stalks[hi], 1), lo: PolyMat::identity(&stalks[lo], 1) });
            continue;
        }
        let ks = g.edge_between(pair[lo], pair[hi]).ok_or_else(|| Error::Invalid(format!("edge {} has no wall partner", f.edge_name(k))))?;
        let (lab, lab_s) = (f.label(k), f.label(ks));
        if !proportional(&act_on_label(&imgs, &lab_s), &lab) {
            return Err(Error::Invalid(format!("labels of {} and its wall partner are not conjugate", f.edge_name(k))));
        }
        let image = |x: usize| -> Result<PolyMat> {
            let ek = f.edge_module(k);
            let rho = if x == hi { &ek.hi } else { &ek.lo };
            let a = compose(&amb, &lab, rho, &local[x].own)?;
            let es = f.edge_module(ks);
            let rho_s = if pair[x] == g.edge(ks).hi { &es.hi } else { &es.lo };
            let b = compose(&amb, &lab_s, rho_s, &local[x].other)?;
            let b = transport(&amb, &imgs, &lab_s, &lab, &b)?;
            Ok(stack(&a, &b).shifted(1))
        };
        let (mh, ml) = (image(hi)?, image(lo)?);
        edges.push(normalize_edge(&amb, &mh, &ml).map_err(|e| match e {
            Error::Hypothesis(m) => Error::Hypothesis(format!("edge {}: {}", f.edge_name(k), m)),
            other => other,
        })?);
    }
    Sheaf::from_parts(g, amb, stalks, edges)
}

fn indices(graph: &MomentGraph, coords: &[Affine]) -> Result<Vec<usize>> {
    coords.iter().map(|c| graph.find(c).ok_or_else(|| Error::MissingVertex(graph.root_datum().coord_string(c)))).collect()
}

/// Windows on which the letters of `word` act, first letter first. The
/// last one is `target ∪ target·s_l`, and each earlier one is the next
/// one closed under its letter.
pub fn working_windows(graph: &MomentGraph, target: &[Affine], word: &[usize]) -> Result<Vec<Vec<Affine>>> {
    let rd = graph.root_datum();
    let mut cur: BTreeSet<Affine> = target.iter().copied().collect();
    let mut out = Vec::with_capacity(word.len());
    for &s in word.iter().rev() {
        let w = rd.wall(s)?;
        let moved: Vec<Affine> = cur.iter().map(|c| rd.mul(c, &w)).collect();
        cur.extend(moved);
        if cur.len() > VERTEX_CAP {
            return Err(Error::WindowTooLarge { size: cur.len(), cap: VERTEX_CAP });
        }
        out.push(cur.iter().copied().collect());
    }
    out.reverse();
    Ok(out)
}

/// Alcoves `≥ lo` below `hi` or below an alcove that can carry a nonzero
/// stalk of `B(x) ⋆ B_{s_1} ⋆ … ⋆ B_{s_l}`. Dropping the alcoves outside
/// this set only drops zero stalks and zero edge modules.
pub fn support_window(rd: &RootDatum, lo: Alcove, hi: Alcove, x: Alcove, word: &[usize]) -> Result<Vec<Alcove>> {
    let mut tops: BTreeSet<Alcove> = BTreeSet::from([x]);
    for &s in word {
        let moved: Vec<Alcove> = tops.iter().map(|&t| rd.right_act(t, s)).collect::<Result<_>>()?;
        tops.extend(moved);
    }
    tops.insert(hi);
    let mut out: BTreeSet<Alcove> = BTreeSet::new();
    for t in tops.into_iter().filter(|&t| rd.leq(lo, t)) {
        out.extend(rd.interval(lo, t));
        if out.len() > VERTEX_CAP {
            return Err(Error::WindowTooLarge { size: out.len(), cap: VERTEX_CAP });
        }
    }
    let mut v: Vec<Alcove> = out.into_iter().collect();
    rd.sort_alcoves(&mut v);
    Ok(v)
}

/// `F ⋆ B_{s_1} ⋆ … ⋆ B_{s_l}` on `target`, through iterated wall-crossing
/// on the working windows.
pub fn star(f: &Sheaf, word: &[usize], target: &[Affine]) -> Result<Sheaf> {
    let g = f.graph();
    if word.is_empty() {
        return f.restrict(&indices(g, target)?);
    }
    let wins = working_windows(g, target, word)?;
    let mut cur = f.restrict(&indices(g, &wins[0])?)?;
    for (i, &s) in word.iter().enumerate() {
        cur = theta_s(&cur, s)?;
        let next = if i + 1 < word.len() { &wins[i + 1] } else { target };
        cur = cur.restrict(&indices(cur.graph(), next)?)?;
    }
    Ok(cur)
}

/// `T_λ*`: the sheaf moved to the translated alcove window.
pub fn translate_sheaf(f: &Sheaf, lambda: &Vector) -> Result<Sheaf> {
    let g = f.graph();
    if *g.builder() != Builder::Alcove {
        return Err(Error::Unsupported("translation acts on alcove graphs only".into()));
    }
    let rd = g.root_datum().clone();
    let amb = f.ambient().clone();
    let moved: Vec<Alcove> = g.coords().iter().map(|c| rd.translate(rd.alcove(c), lambda)).collect();
    let g2 = Arc::new(MomentGraph::alcove_window(rd.clone(), &moved)?);
    let map: Vec<usize> = moved.iter().map(|a| g2.find_alcove(*a).unwrap()).collect();
    let om = rd.omega_of(lambda);
    let cands = [label_automorphism(&rd, &om, amb.nvars()), label_automorphism(&rd, &rd.inv(&om), amb.nvars())];
    let pad = |mut l: Vec<i64>| {
        l.resize(amb.nvars(), 0);
        l
    };
    let mut chosen: Option<usize> = None;
    let mut edges = vec![EdgeModule::zero(&[], &[]); g2.edges().len()];
    let mut stalks = vec![Vec::new(); g2.len()];
    for x in 0..g.len() {
        stalks[map[x]] = f.stalk(x).to_vec();
    }
    for k in 0..g.edges().len() {
        let e = g.edge(k);
        let k2 = g2.edge_between(map[e.lo], map[e.hi]).ok_or_else(|| Error::Invalid("translated edge missing".into()))?;
        let (from, to) = (f.label(k), pad(g2.edge(k2).label.clone()));
        let c = match chosen {
            Some(c) => c,
            None => {
                let c = (0..2).find(|&c| proportional(&act_on_label(&cands[c], &from), &to)).ok_or_else(|| Error::Invalid("translated labels do not match".into()))?;
                chosen = Some(c);
                c
            }
        };
        if !proportional(&act_on_label(&cands[c], &from), &to) {
            return Err(Error::Invalid("translated labels do not match".into()));
        }
        let m = f.edge_module(k);
        edges[k2] = EdgeModule {
            degs: m.degs.clone(),
            hi: transport(&amb, &cands[c], &from, &to, &m.hi)?,
            lo: transport(&amb, &cands[c], &from, &to, &m.lo)?,
        };
    }
    Sheaf::from_parts(g2, amb, stalks, edges)
}

/// `Σ_A v^{-ℓ(A)} grk F^{[A]} A` with the periodic length of alcoves.
pub fn ch(f: &Sheaf) -> Result<PeriodicElt> {
    let g = f.graph();
    let rd = g.root_datum();
    let mut out = PeriodicElt::zero();
    for x in 0..g.len() {
        if f.stalk(x).is_empty() {
            continue;
        }
        let a = rd.alcove(&g.coord(x));
        let c = f.costalk_grk(x)?.shift(-(rd.length(a) as i32));
        out.add_term(a, &c);
    }
    Ok(out)
}

/// `p · (H_s + v)`.
pub fn ch_times_bs(hecke: &Hecke, p: &PeriodicElt, s: usize) -> Result<PeriodicElt> {
    let mut out = hecke.periodic_mul_s(p, s)?;
    out.add(&p.scale(&Laurent::v_pow(1)));
    Ok(out)
}

/// Multiset of summands `B(x)(n)` as `(vertex, n)`, by peeling off
/// indecomposables from the top.
pub fn decompose(f: &Sheaf) -> Result<Vec<(usize, i32)>> {
    let g = f.graph().clone();
    let amb = f.ambient().clone();
    let mut resid: Vec<Laurent> = (0..g.len()).map(|x| f.stalk_grk(x)).collect();
    let mut tables: HashMap<usize, Vec<Laurent>> = HashMap::new();
    let mut out = Vec::new();
    for x in (0..g.len()).rev() {
        if resid[x].is_zero() {
            continue;
        }
        if !resid[x].is_nonnegative() {
            return Err(Error::Decomposition(g.vertex_name(x)));
        }
        if let std::collections::hash_map::Entry::Vacant(e) = tables.entry(x) {
            let b = bm_build(g.clone(), amb.clone(), x)?;
            e.insert((0..g.len()).map(|y| b.stalk_grk(y)).collect());
        }
        let tab = &tables[&x];
        let top = resid[x].clone();
        for (e, c) in top.terms() {
            let c: i64 = c.try_into().map_err(|_| Error::Overflow)?;
            for _ in 0..c {
                out.push((x, e));
            }
        }
        for y in 0..g.len() {
            if !tab[y].is_zero() {
                resid[y] = &resid[y] - &(&top * &tab[y]);
            }
        }
        if !resid[x].is_zero() {
            return Err(Error::Decomposition(g.vertex_name(x)));
        }
    }
    for x in 0..g.len() {
        if !resid[x].is_zero() {
            return Err(Error::Decomposition(g.vertex_name(x)));
        }
    }
    out.sort();
    Ok(out)
}

/// Outcome of comparing `θ_sF` with `F` vertex by vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankLawReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

/// Stalk law `grk (θ_sF)^A = v⁻¹ grk F^A + v grk F^{As}` for `A > As`, and
/// costalk law `grk (θ_sF)^{[A]} = v^{±1}(grk F^{[A]} + grk F^{[As]})`, sign
/// `+` when `A > As`. `t` must be `theta_s(f, s)`.
pub fn theta_rank_laws(f: &Sheaf, t: &Sheaf, s: usize) -> Result<RankLawReport> {
    let g = f.graph();
    let tg = t.graph();
    let lens = g.lengths();
    let mut rep = RankLawReport::default();
    for x in 0..g.len() {
        let y = partner(g, x, s)?.ok_or(Error::NotWallStable(s))?;
        let tx = tg.find(&g.coord(x)).ok_or_else(|| Error::MissingVertex(g.vertex_name(x)))?;
        let up = lens[x] > lens[y];
        let (big, small) = if up { (x, y) } else { (y, x) };
        let stalk = f.stalk_grk(big).shift(-1) + f.stalk_grk(small).shift(1);
        if t.stalk_grk(tx) != stalk {
            rep.failures.push(format!("stalk at {}: {} != {}", g.vertex_name(x), t.stalk_grk(tx), stalk));
        }
        let sum = f.costalk_grk(x)? + f.costalk_grk(y)?;
        let costalk = sum.shift(if up { 1 } else { -1 });
        let got = t.costalk_grk(tx)?;
        if got != costalk {
            rep.failures.push(format!("costalk at {}: {} != {}", g.vertex_name(x), got, costalk));
        }
        rep.checked += 1;
    }
    Ok(rep)
}
