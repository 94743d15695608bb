//! Puncture and handle stabilization, dilation, surjectivity certificates and
//! the stable-range prober.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::covers::{enumeration_estimate, BranchData, BranchedTuple, CoverError, EnumOptions, Puncture, Sign};
use crate::group::{ClassSet, Elem, FiniteGroup};
use crate::homology::{n_lattice, HomologyError};
use crate::mcg::{induced_orbit_map, level_orbits, CatalogOptions, McgError, OrbitCache, OrbitTable};
use crate::schur::{SchurContext, SchurError, TorsorReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabError {
    #[error("factorization of handle {0} is invalid")]
    BadFactorization(usize),
    #[error("branch type {0:?} is not in N, so no tuple has this branch data")]
    NotInN(Vec<i64>),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Mcg(#[from] McgError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Schur(#[from] SchurError),
}

/// p_c̄: appends (x, +1), (x⁻¹, −1); x defaults to the class representative.
pub fn puncture_stabilize(
    t: &BranchedTuple,
    class_id: usize,
    x: Option<Elem>,
    c: &ClassSet,
) -> Result<BranchedTuple, CoverError> {
    let g = t.group();
    if class_id >= g.num_classes() || !c.contains_class(class_id) {
        return Err(CoverError::ClassOutsideC(class_id));
    }
    if class_id == g.class_of(0) {
        return Err(CoverError::IdentityClass);
    }
    let x = x.unwrap_or(g.class(class_id).representative);
    if x >= g.order() {
        return Err(CoverError::ElementOutOfRange(x));
    }
    if g.class_of(x) != class_id {
        return Err(CoverError::LetterOutsideC(t.num_punctures()));
    }
    let mut punctures = t.punctures().to_vec();
    punctures.push(Puncture::new(x, Sign::Pos));
    punctures.push(Puncture::new(g.inv(x), Sign::Neg));
    Ok(BranchedTuple::from_parts_unchecked(g.clone(), t.handles().to_vec(), punctures))
}

/// h: appends the trivial handle (1, 1).
pub fn handle_stabilize(t: &BranchedTuple) -> BranchedTuple {
    let mut handles = t.handles().to_vec();
    handles.push((0, 0));
    BranchedTuple::from_parts_unchecked(t.group().clone(), handles, t.punctures().to_vec())
}

/// dil: each (x, −1) becomes ord(x) − 1 copies of (x⁻¹, +1).
pub fn dilate(t: &BranchedTuple) -> BranchedTuple {
    let g = t.group();
    let mut punctures = Vec::with_capacity(t.num_punctures());
    for p in t.punctures() {
        match p.sign {
            Sign::Pos => punctures.push(*p),
            Sign::Neg => {
                let c = g.inv(p.letter);
                punctures.extend(std::iter::repeat(Puncture::new(c, Sign::Pos)).take(g.elem_order(c) - 1));
            }
        }
    }
    BranchedTuple::from_parts_unchecked(g.clone(), t.handles().to_vec(), punctures)
}

/// dil ∘ p_c̄: appends ord(x) copies of (x, +1), staying within positive branch data.
pub fn positive_puncture_stabilize(t: &BranchedTuple, class_id: usize, c: &ClassSet) -> Result<BranchedTuple, CoverError> {
    let p = puncture_stabilize(t, class_id, None, c)?;
    let x = p.punctures()[t.num_punctures()].letter;
    let mut punctures = t.punctures().to_vec();
    punctures.extend(std::iter::repeat(Puncture::new(x, Sign::Pos)).take(t.group().elem_order(x)));
    Ok(BranchedTuple::from_parts_unchecked(t.group().clone(), t.handles().to_vec(), punctures))
}

/// Branch data of dil(t) computed from that of t.
pub fn dilated_branch_data(g: &FiniteGroup, v: &BranchData) -> BranchData {
    let mut out = BranchData::new();
    for (cl, s, k) in v.iter() {
        let mult = match s {
            Sign::Pos => 1,
            Sign::Neg => g.elem_order(g.class(cl).representative) - 1,
        };
        out.add(cl, Sign::Pos, k * mult);
    }
    out
}

/// U^c̄ = |c̄| · |Inn_c̄(c)| · δ_(c̄,+1).
pub fn u_threshold(g: &FiniteGroup, class_id: usize) -> BranchData {
    let cl = g.class(class_id);
    BranchData::new().with(class_id, Sign::Pos, cl.size * g.inn_order_on_class(cl.representative))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PunctureFlag {
    pub class: usize,
    pub threshold: usize,
    pub value: usize,
    pub surjective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilizationCertificate {
    pub genus: usize,
    pub group_order: usize,
    /// h into genus `genus` is surjective
    pub handle_surjective: bool,
    /// p_c̄ out of this level is surjective
    pub puncture: Vec<PunctureFlag>,
    /// dil out of this level is surjective
    pub dilation_surjective: bool,
    /// w with w_dil equal to this level's data and satisfying the dilation inequality
    pub dilation_witness: Option<BranchData>,
}

impl StabilizationCertificate {
    pub fn puncture_surjective(&self, class_id: usize) -> bool {
        self.puncture.iter().any(|f| f.class == class_id && f.surjective)
    }
}

pub fn certificate(g: &FiniteGroup, c: &ClassSet, genus: usize, v: &BranchData) -> StabilizationCertificate {
    let puncture = c
        .classes()
        .iter()
        .map(|&cl| {
            let threshold = u_threshold(g, cl).get(cl, Sign::Pos);
            let value = v.get(cl, Sign::Pos);
            PunctureFlag { class: cl, threshold, value, surjective: value > threshold }
        })
        .collect();
    let dilation_surjective = c.classes().iter().all(|&cl| {
        let size = g.class(cl).size;
        let ord = g.elem_order(g.class(cl).representative);
        let (pos, neg) = (v.get(cl, Sign::Pos), v.get(cl, Sign::Neg));
        pos + (ord - 1) * neg > size * (ord - 1) * neg
    });
    let dilation_witness = if v.is_positive() {
        let mut w = BranchData::new();
        let mut ok = true;
        for &cl in c.classes() {
            let size = g.class(cl).size;
            let ord = g.elem_order(g.class(cl).representative);
            let total = v.get(cl, Sign::Pos);
            if total == 0 {
                ok = false;
                break;
            }
            let k = (total - 1) / (size * (ord - 1));
            w.add(cl, Sign::Pos, total - (ord - 1) * k);
            w.add(cl, Sign::Neg, k);
        }
        ok.then_some(w)
    } else {
        None
    };
    StabilizationCertificate {
        genus,
        group_order: g.order(),
        handle_surjective: genus > g.order(),
        puncture,
        dilation_surjective,
        dilation_witness,
    }
}

/// Replaces each handle (a, b) by punctures built from factorizations into C.
///
/// `factorizations[i] = (xs, ys)` with Π xs = aᵢ and Π ys = bᵢ, read left to right
/// (so xs = [x_k, …, x₁] for a = x_k⋯x₁). Handle i contributes xs (+), ys (+),
/// then the inverses of xs and ys in reverse order (−); these blocks precede the
/// original punctures.
pub fn surger_handles(
    t: &BranchedTuple,
    factorizations: &[(Vec<Elem>, Vec<Elem>)],
    c: &ClassSet,
) -> Result<BranchedTuple, StabError> {
    let g = t.group();
    if factorizations.len() != t.genus() {
        return Err(StabError::BadFactorization(factorizations.len().min(t.genus())));
    }
    let mut punctures = Vec::new();
    for (i, ((xs, ys), &(a, b))) in factorizations.iter().zip(t.handles()).enumerate() {
        let valid = |f: &[Elem], target: Elem| {
            f.iter().all(|&x| x < g.order() && x != 0 && c.contains(g, x)) && g.product(f.iter().copied()) == target
        };
        if !valid(xs, a) || !valid(ys, b) {
            return Err(StabError::BadFactorization(i));
        }
        punctures.extend(xs.iter().chain(ys).map(|&x| Puncture::new(x, Sign::Pos)));
        punctures.extend(xs.iter().rev().chain(ys.iter().rev()).map(|&x| Puncture::new(g.inv(x), Sign::Neg)));
    }
    punctures.extend_from_slice(t.punctures());
    Ok(BranchedTuple::new(g.clone(), vec![], punctures, Some(c))?)
}

/// Shortest factorization of x into elements of C (breadth-first, smallest letters first).
pub fn factor_into_c(g: &FiniteGroup, c: &ClassSet, x: Elem) -> Option<Vec<Elem>> {
    let letters = c.elements(g);
    let mut prev: Vec<Option<(Elem, Elem)>> = vec![None; g.order()];
    let mut seen = vec![false; g.order()];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(y) = queue.pop_front() {
        for &l in &letters {
            let z = g.mul(y, l);
            if !seen[z] {
                seen[z] = true;
                prev[z] = Some((y, l));
                queue.push_back(z);
            }
        }
    }
    if !seen[x] {
        return None;
    }
    let mut word = Vec::new();
    let mut y = x;
    while let Some((p, l)) = prev[y] {
        word.push(l);
        y = p;
    }
    word.reverse();
    Some(word)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Track {
    Main,
    GenusZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrackSelection {
    /// main track, plus the genus-0 track when ⟨C⟩ = G
    #[default]
    Auto,
    Main,
    GenusZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Mismatch,
    Inconclusive,
    EmpiricalMatch,
    CertifiedMatch,
}

#[derive(Debug, Clone)]
pub struct StableOptions {
    pub start_genus: usize,
    /// cap on the enumeration estimate of any single level
    pub level_budget: u128,
    pub max_rounds: usize,
    pub tracks: TrackSelection,
    pub catalog: CatalogOptions,
    pub cache: Option<OrbitCache>,
}

impl Default for StableOptions {
    fn default() -> Self {
        StableOptions {
            start_genus: 1,
            level_budget: 500_000,
            max_rounds: 6,
            tracks: TrackSelection::Auto,
            catalog: CatalogOptions::default(),
            cache: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub genus: usize,
    pub branch: BranchData,
    pub tuples: u64,
    pub orbits: usize,
    pub certificate: StabilizationCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionReport {
    pub from: usize,
    pub to: usize,
    pub map: String,
    pub injective: bool,
    pub surjective: bool,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrackReport {
    pub track: Track,
    pub levels: Vec<LevelReport>,
    pub transitions: Vec<TransitionReport>,
    pub stable_count: Option<usize>,
    pub torsor: Option<TorsorReport>,
    pub verdict: Verdict,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableRangeReport {
    pub group_order: usize,
    pub classes: Vec<usize>,
    pub seed: BranchData,
    pub move_set: String,
    pub m_order: u128,
    pub m_invariant_factors: Vec<i64>,
    pub tracks: Vec<TrackReport>,
    pub stable_count: Option<usize>,
    pub verdict: Verdict,
    pub label: &'static str,
}

impl StableRangeReport {
    /// track,genus,branch,tuples,orbits
    pub fn grid_csv(&self) -> String {
        let mut s = String::from("track,genus,branch,tuples,orbits\n");
        for t in &self.tracks {
            let name = match t.track {
                Track::Main => "main",
                Track::GenusZero => "genus-zero",
            };
            for l in &t.levels {
                s.push_str(&format!("{name},{},\"{}\",{},{}\n", l.genus, l.branch, l.tuples, l.orbits));
            }
        }
        s
    }
}

enum StepMap {
    Handle,
    Puncture(usize),
}

struct Prober<'a> {
    group: &'a Arc<FiniteGroup>,
    c: &'a ClassSet,
    opts: &'a StableOptions,
    enum_opts: EnumOptions,
}

impl Prober<'_> {
    fn level(&self, genus: usize, v: &BranchData) -> Result<Option<(OrbitTable, LevelReport)>, StabError> {
        if enumeration_estimate(self.group, genus, v) > self.opts.level_budget {
            return Ok(None);
        }
        let table = level_orbits(self.group, self.c, genus, v, &self.opts.catalog, &self.enum_opts, self.opts.cache.as_ref())?;
        let report = LevelReport {
            genus,
            branch: v.clone(),
            tuples: table.total(),
            orbits: table.num_orbits(),
            certificate: certificate(self.group, self.c, genus, v),
        };
        Ok(Some((table, report)))
    }

    fn run(&self, track: Track, seed: &BranchData, ctx: &SchurContext) -> Result<TrackReport, StabError> {
        let g = self.group;
        let mut round: Vec<StepMap> = self.c.classes().iter().map(|&cl| StepMap::Puncture(cl)).collect();
        if track == Track::Main {
            round.push(StepMap::Handle);
        }
        let genus0 = if track == Track::Main { self.opts.start_genus } else { 0 };
        let mut report = TrackReport {
            track,
            levels: Vec::new(),
            transitions: Vec::new(),
            stable_count: None,
            torsor: None,
            verdict: Verdict::Inconclusive,
            note: String::new(),
        };
        let Some((mut table, first)) = self.level(genus0, seed)? else {
            report.note = "first level exceeds the level budget".into();
            return Ok(report);
        };
        let (mut genus, mut v) = (genus0, seed.clone());
        report.levels.push(first);
        let mut quiet_rounds = 0;
        let mut certified_rounds = 0;
        for _ in 0..self.opts.max_rounds {
            let mut quiet = true;
            let mut certified = true;
            for step in &round {
                let (next_genus, next_v, name) = match *step {
                    StepMap::Handle => (genus + 1, v.clone(), "h".to_string()),
                    StepMap::Puncture(cl) => {
                        let ord = g.elem_order(g.class(cl).representative);
                        (genus, v.clone().with(cl, Sign::Pos, ord), format!("q[{cl}]"))
                    }
                };
                let Some((next_table, next_report)) = self.level(next_genus, &next_v)? else {
                    report.note = format!("level (g={next_genus}, v={next_v}) exceeds the level budget");
                    return Ok(report);
                };
                let step_certified = match *step {
                    StepMap::Handle => next_report.certificate.handle_surjective,
                    StepMap::Puncture(cl) => {
                        let cert = report.levels.last().expect("level").certificate.clone();
                        let mid = v.clone().with(cl, Sign::Pos, 1).with(cl, Sign::Neg, 1);
                        cert.puncture_surjective(cl) && certificate(g, self.c, genus, &mid).dilation_surjective
                    }
                };
                let map = match *step {
                    StepMap::Handle => induced_orbit_map(g, &table, &next_table, &handle_stabilize, false)?,
                    StepMap::Puncture(cl) => {
                        let c = self.c;
                        let f = move |t: &BranchedTuple| positive_puncture_stabilize(t, cl, c).expect("class in C");
                        induced_orbit_map(g, &table, &next_table, &f, false)?
                    }
                };
                let from = report.levels.len() - 1;
                if !(map.bijective() && table.num_orbits() > 0) {
                    quiet = false;
                }
                certified &= step_certified;
                report.transitions.push(TransitionReport {
                    from,
                    to: from + 1,
                    map: name,
                    injective: map.injective,
                    surjective: map.surjective,
                    certified: step_certified,
                });
                report.levels.push(next_report);
                table = next_table;
                genus = next_genus;
                v = next_v;
            }
            if quiet {
                quiet_rounds += 1;
                certified_rounds += certified as usize;
            } else {
                quiet_rounds = 0;
                certified_rounds = 0;
            }
            if quiet_rounds >= 2 {
                break;
            }
        }
        if quiet_rounds < 2 {
            report.note = "no plateau within the round limit".into();
            return Ok(report);
        }
        let count = table.num_orbits();
        report.stable_count = Some(count);
        let torsor = ctx.torsor_check(&table.reps(g))?;
        report.verdict = if count as u128 != ctx.m_order() || !torsor.passed {
            Verdict::Mismatch
        } else if certified_rounds >= 2 {
            Verdict::CertifiedMatch
        } else {
            Verdict::EmpiricalMatch
        };
        report.torsor = Some(torsor);
        Ok(report)
    }
}

/// Follows stabilization tracks from `seed` until orbit counts plateau, then
/// compares the plateau with |M(G)_C|.
pub fn stable_orbits(
    group: &Arc<FiniteGroup>,
    c: &ClassSet,
    seed: &BranchData,
    opts: &StableOptions,
) -> Result<StableRangeReport, StabError> {
    seed.check_supported(group, c)?;
    if !seed.is_positive() {
        return Err(StabError::Cover(CoverError::BadSign(-1)));
    }
    let hom = seed.hom_branch_type(c);
    if !n_lattice(group, c)?.contains(&hom) {
        return Err(StabError::NotInN(hom));
    }
    let mut ctx = SchurContext::new(group.clone(), c.clone())?;
    ctx.catalog = opts.catalog;
    let prober = Prober { group, c, opts, enum_opts: EnumOptions { surjective_only: true, budget: opts.level_budget } };
    let generates = c.generated_subgroup(group).iter().all(|&b| b);
    let tracks: Vec<Track> = match opts.tracks {
        TrackSelection::Main => vec![Track::Main],
        TrackSelection::GenusZero => vec![Track::GenusZero],
        TrackSelection::Auto if generates && !c.is_empty() => vec![Track::Main, Track::GenusZero],
        TrackSelection::Auto => vec![Track::Main],
    };
    let mut reports = Vec::new();
    for t in tracks {
        reports.push(prober.run(t, seed, &ctx)?);
    }
    let verdict = if reports.iter().any(|r| r.verdict == Verdict::Mismatch) {
        Verdict::Mismatch
    } else {
        reports.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Inconclusive)
    };
    let stable_count = reports
        .iter()
        .find(|r| r.verdict == verdict)
        .and_then(|r| r.stable_count)
        .or_else(|| reports.iter().find_map(|r| r.stable_count));
    Ok(StableRangeReport {
        group_order: group.order(),
        classes: c.classes().to_vec(),
        seed: seed.clone(),
        move_set: opts.catalog.tag(),
        m_order: ctx.m_order(),
        m_invariant_factors: ctx.mgc.group.torsion().to_vec(),
        tracks: reports,
        stable_count,
        verdict,
        label: "empirical onset; no upper bound on the stable range is known",
    })
}
