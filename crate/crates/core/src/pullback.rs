//! Moving sheaves between the coset graph, the Bruhat graph of `W_aff` and
//! alcove graphs.
//!
//! All three maps copy stalks along a vertex map and edge modules along the
//! induced edge map. Edges whose endpoints land on the same vertex get the
//! stalk modulo the edge label.

use crate::error::{Error, Result};
use crate::graded::PolyMat;
use crate::laurent::Laurent;
use crate::moment_graph::{coset_rep, normalize_label, stabilizer, Builder, MomentGraph};
use crate::sheaf::{EdgeModule, Sheaf};
use std::sync::Arc;

fn same_line(a: &[i64], b: &[i64]) -> bool {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    let n = x.len().max(y.len());
    x.resize(n, 0);
    y.resize(n, 0);
    normalize_label(&mut x);
    normalize_label(&mut y);
    x == y
}

/// Sheaf on `target` with `(π^* F)^v = F^{vmap[v]}`.
fn transfer(f: &Sheaf, target: Arc<MomentGraph>, vmap: &[usize]) -> Result<Sheaf> {
    let src = f.graph();
    let stalks: Vec<Vec<i32>> = vmap.iter().map(|&x| f.stalk(x).to_vec()).collect();
    let mut edges = Vec::with_capacity(target.edges().len());
    for e in target.edges() {
        let (a, b) = (vmap[e.lo], vmap[e.hi]);
        if a == b {
            let degs = f.stalk(a);
            edges.push(EdgeModule { degs: degs.to_vec(), hi: PolyMat::identity(degs, 1), lo: PolyMat::identity(degs, 1) });
            continue;
        }
        let k = src.edge_between(a, b).ok_or_else(|| {
            Error::Invalid(format!("no edge between {} and {} in the source graph", src.vertex_name(a), src.vertex_name(b)))
        })?;
        if !same_line(&f.label(k), &e.label) {
            return Err(Error::Invalid(format!("labels of {} and its image differ", f.edge_name(k))));
        }
        let m = f.edge_module(k).clone();
        if src.edge(k).hi == b {
            edges.push(m);
        } else {
            edges.push(EdgeModule { degs: m.degs, hi: m.lo, lo: m.hi });
        }
    }
    Sheaf::from_parts(target, f.ambient().clone(), stalks, edges)
}

/// `π_M^*`: pull a sheaf on a coset graph back to a Bruhat graph of `W_aff`.
/// Every vertex of `target` must map to a vertex of the coset graph.
pub fn pullback_pi_star(f: &Sheaf, target: Arc<MomentGraph>) -> Result<Sheaf> {
    let Builder::Coset { lambda } = f.graph().builder().clone() else {
        return Err(Error::Invalid("source is not a coset graph".into()));
    };
    if *target.builder() != Builder::Bruhat {
        return Err(Error::Invalid("target is not a Bruhat graph".into()));
    }
    let rd = target.root_datum().clone();
    let stab = stabilizer(&rd, &lambda);
    let vmap: Vec<usize> = target
        .coords()
        .iter()
        .map(|x| {
            let r = coset_rep(&rd, &stab, x);
            f.graph().find(&r).ok_or_else(|| Error::MissingVertex(rd.coord_string(&r)))
        })
        .collect::<Result<_>>()?;
    transfer(f, target, &vmap)
}

/// `φ^*`: the same sheaf on the alcoves `A₀⁺x`, with the alcove order.
pub fn relabel_phi_star(f: &Sheaf) -> Result<Sheaf> {
    if *f.graph().builder() != Builder::Bruhat {
        return Err(Error::Invalid("source is not a Bruhat graph".into()));
    }
    let target = Arc::new(f.graph().as_alcove_graph()?);
    let vmap: Vec<usize> = target.coords().iter().map(|c| f.graph().vertex(c)).collect::<Result<_>>()?;
    transfer(f, target, &vmap)
}

/// `φ₊^*`: a sheaf on the coset graph of `W_f \ W_aff` moved to the
/// dominant alcoves `A₀⁺x` of its minimal representatives.
pub fn pull_to_dominant(f: &Sheaf) -> Result<Sheaf> {
    let g = f.graph();
    let rd = g.root_datum();
    let Builder::Coset { lambda } = g.builder().clone() else {
        return Err(Error::Invalid("source is not a coset graph".into()));
    };
    if stabilizer(rd, &lambda).len() != rd.weyl().order() {
        return Err(Error::Invalid("the coset graph must be taken for the whole finite Weyl group".into()));
    }
    let target = Arc::new(g.as_alcove_graph()?);
    let vmap: Vec<usize> = target.coords().iter().map(|c| g.vertex(c)).collect::<Result<_>>()?;
    transfer(f, target, &vmap)
}

/// Outcome of one restriction experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionRun {
    pub top: String,
    pub lower: String,
    pub vertices: usize,
    pub axioms_ok: bool,
    pub summands: Vec<(String, i32)>,
    /// `B(A + λ)` occurs with shift zero.
    pub contains_top: bool,
}

/// Pull `B(x_λ)` from the coset graph to the dominant alcoves, restrict to
/// `{A'' ≥ lower + λ}` and decompose. `A + λ = A₀⁺x_λ` must be dominant.
pub fn restriction_experiment(
    rd: Arc<crate::rootdata::RootDatum>,
    alcove: crate::alcoves::Alcove,
    lower: crate::alcoves::Alcove,
    lambda: &crate::rootdata::Vector,
    mode: crate::sheaf::RingMode,
) -> Result<RestrictionRun> {
    let top = rd.translate(alcove, lambda);
    let low = rd.translate(lower, lambda);
    if !rd.is_dominant(top) {
        return Err(Error::Invalid(format!("{} is not dominant", rd.alcove_string(top))));
    }
    let x = top.coord();
    let zero = [0; crate::rootdata::MAXR];
    let coset = Arc::new(MomentGraph::coset_interval(rd.clone(), &zero, &x, i64::MAX)?);
    let amb = crate::sheaf::ambient_for(&coset, mode)?;
    let b = crate::sheaf::bm_build(coset.clone(), amb, coset.vertex(&x)?)?;
    let pulled = pull_to_dominant(&b)?;
    let pg = pulled.graph().clone();
    let keep: Vec<usize> = (0..pg.len()).filter(|&v| rd.leq(low, rd.alcove(&pg.coord(v)))).collect();
    let restricted = pulled.restrict(&keep)?;
    let axioms_ok = restricted.verify_axioms()?.all_ok();
    let parts = crate::translation::decompose(&restricted)?;
    let rg = restricted.graph();
    let ti = rg.find_alcove(top);
    let contains_top = parts.iter().any(|&(v, n)| Some(v) == ti && n == 0);
    Ok(RestrictionRun {
        top: rd.alcove_string(top),
        lower: rd.alcove_string(low),
        vertices: rg.len(),
        axioms_ok,
        summands: parts.iter().map(|&(v, n)| (rg.vertex_name(v), n)).collect(),
        contains_top,
    })
}

/// Stalk graded ranks, for comparing sheaves on different graphs by vertex
/// coordinates.
pub fn stalk_table(f: &Sheaf) -> Vec<(crate::rootdata::Affine, Laurent)> {
    let g = f.graph();
    (0..g.len()).map(|x| (g.coord(x), f.stalk_grk(x))).collect()
}
