//! (1+√3)-approximation for Euclidean k-supplier with outliers by round-or-cut.
//!
//! At a guessed radius an LP over supplier variables `y` and outlier variables
//! `z` is re-solved over a growing pool of cuts. Each LP point is either cut
//! off (by a basic row or a well-separated set row) or rounded through a
//! cardinality-constrained edge cover on representative clients. An
//! infeasible pool certifies that the optimum exceeds the radius.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{min_weight_cc_edge_cover_with, most_violated_set, EdgeClass, EdgeLabel, LoopGraph, SeparationMode, EXACT_SEPARATION_CAP};
use crate::instance::{candidate_radii, guess_loop, Instance, ScaledInstance, Tolerance, APPROX_RATIO, SQRT_3};
use crate::lp::{self, Constraint, FarkasCertificate, FractionalPoint, LinearProgram, LpOutcome, Relation};

/// A basic row counts as violated above this amount.
pub const BASIC_TOL: f64 = lp::FEAS_TOL;
/// A well-separated row counts as violated above this amount.
pub const CUT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CutKind {
    SupplierBudget,
    Coverage { client: usize },
    OutlierBudget,
    Bound { var: usize, upper: bool },
    WellSeparated { clients: Vec<usize> },
}

impl CutKind {
    pub fn name(&self) -> &'static str {
        match self {
            CutKind::SupplierBudget => "supplier_budget",
            CutKind::Coverage { .. } => "coverage",
            CutKind::OutlierBudget => "outlier_budget",
            CutKind::Bound { .. } => "bound",
            CutKind::WellSeparated { .. } => "well_separated",
        }
    }
}

/// A row over `(y_0..y_{|I|-1}, z_0..z_{|J|-1})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub kind: CutKind,
    pub row: Constraint,
}

impl Cut {
    pub fn violation(&self, p: &FractionalPoint) -> f64 {
        self.row.violation(&p.values)
    }

    /// Whether the 0/1 point of `(suppliers, outliers)` satisfies the row.
    pub fn holds_for(&self, suppliers: &[usize], outliers: &[usize], num_suppliers: usize) -> bool {
        let mut x = vec![0.0; self.row.coeffs.len()];
        suppliers.iter().for_each(|&i| x[i] = 1.0);
        outliers.iter().for_each(|&j| x[num_suppliers + j] = 1.0);
        self.row.violation(&x) <= 1e-12
    }
}

/// Rows accumulated by one round-or-cut run; rows are never removed.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CutPool {
    num_suppliers: usize,
    num_clients: usize,
    cuts: Vec<Cut>,
}

impl CutPool {
    pub fn new(num_suppliers: usize, num_clients: usize) -> Self {
        CutPool {
            num_suppliers,
            num_clients,
            cuts: Vec::new(),
        }
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn contains(&self, kind: &CutKind) -> bool {
        self.cuts.iter().any(|c| &c.kind == kind)
    }

    pub fn push(&mut self, cut: Cut) {
        self.cuts.push(cut);
    }

    /// `min Σ z` over the pool and the box `0 ≤ y, z ≤ 1`.
    pub fn to_lp(&self) -> LinearProgram {
        let n = self.num_suppliers + self.num_clients;
        let mut model = LinearProgram::new(n);
        let mut obj = vec![0.0; n];
        obj[self.num_suppliers..].iter_mut().for_each(|c| *c = 1.0);
        model.set_objective(obj);
        model.set_all_bounds(0.0, 1.0);
        for c in &self.cuts {
            model.add_constraint(c.row.coeffs.clone(), c.row.relation, c.row.rhs);
        }
        model
    }
}

fn coverage_row(inst: &ScaledInstance<'_>, j: usize) -> Constraint {
    let ni = inst.num_suppliers();
    let mut coeffs = vec![0.0; ni + inst.num_clients()];
    for (i, c) in coeffs.iter_mut().enumerate().take(ni) {
        if inst.serves(i, j) {
            *c = 1.0;
        }
    }
    coeffs[ni + j] = 1.0;
    Constraint::new(coeffs, Relation::Ge, 1.0)
}

/// `z(S) + y(f(S)) ≥ ⌈|S|/2⌉` where `f(S)` is every supplier serving a member of `S`.
pub fn well_separated_row(inst: &ScaledInstance<'_>, clients: &[usize]) -> Constraint {
    let ni = inst.num_suppliers();
    let mut coeffs = vec![0.0; ni + inst.num_clients()];
    for (i, c) in coeffs.iter_mut().enumerate().take(ni) {
        if clients.iter().any(|&j| inst.serves(i, j)) {
            *c = 1.0;
        }
    }
    for &j in clients {
        coeffs[ni + j] = 1.0;
    }
    Constraint::new(coeffs, Relation::Ge, clients.len().div_ceil(2) as f64)
}

/// First row among supplier budget, per-client coverage, outlier budget and
/// box bounds violated by more than [`BASIC_TOL`].
pub fn basic_violation(inst: &ScaledInstance<'_>, p: &FractionalPoint) -> Option<Cut> {
    let (ni, nj) = (inst.num_suppliers(), inst.num_clients());
    let n = ni + nj;
    let sum_row = |range: std::ops::Range<usize>, rhs: f64| {
        let mut coeffs = vec![0.0; n];
        coeffs[range].iter_mut().for_each(|c| *c = 1.0);
        Constraint::new(coeffs, Relation::Le, rhs)
    };
    let mut rows = vec![Cut {
        kind: CutKind::SupplierBudget,
        row: sum_row(0..ni, inst.k() as f64),
    }];
    rows.extend((0..nj).map(|j| Cut {
        kind: CutKind::Coverage { client: j },
        row: coverage_row(inst, j),
    }));
    rows.push(Cut {
        kind: CutKind::OutlierBudget,
        row: sum_row(ni..n, inst.ell() as f64),
    });
    if let Some(cut) = rows.into_iter().find(|c| c.violation(p) > BASIC_TOL) {
        return Some(cut);
    }
    for var in 0..n {
        for (upper, rel, rhs) in [(false, Relation::Ge, 0.0), (true, Relation::Le, 1.0)] {
            let mut coeffs = vec![0.0; n];
            coeffs[var] = 1.0;
            let cut = Cut {
                kind: CutKind::Bound { var, upper },
                row: Constraint::new(coeffs, rel, rhs),
            };
            if cut.violation(p) > BASIC_TOL {
                return Some(cut);
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representatives {
    /// Representative clients in selection order (nondecreasing `z`).
    pub reps: Vec<usize>,
    /// `clusters[t]` holds the clients assigned to `reps[t]`, ascending.
    pub clusters: Vec<Vec<usize>>,
}

impl Representatives {
    /// `a(j)` for the representative at position `t`.
    pub fn weight(&self, t: usize) -> usize {
        self.clusters[t].len()
    }
}

/// Repeatedly takes the remaining client with the lowest `z` (lowest index on
/// ties) and assigns it every remaining client within distance √3.
pub fn pick_representatives(inst: &ScaledInstance<'_>, z: &[f64]) -> Representatives {
    let n = inst.num_clients();
    let mut alive = vec![true; n];
    let mut reps = Vec::new();
    let mut clusters = Vec::new();
    while let Some(rep) = (0..n)
        .filter(|&j| alive[j])
        .min_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)))
    {
        let cluster: Vec<usize> = (0..n)
            .filter(|&j| alive[j] && inst.tol.le(inst.cc(j, rep), SQRT_3))
            .collect();
        cluster.iter().for_each(|&j| alive[j] = false);
        reps.push(rep);
        clusters.push(cluster);
    }
    Representatives { reps, clusters }
}

/// Node `t` is `reps.reps[t]`. One zero-weight budgeted edge per supplier
/// serving a representative (2-edge on the first two, loop if only one), and
/// a free loop of weight `a(j)` at every node.
pub fn build_outlier_graph(inst: &ScaledInstance<'_>, reps: &Representatives) -> LoopGraph {
    let mut g = LoopGraph::with_node_ids(reps.reps.clone());
    for i in 0..inst.num_suppliers() {
        let near: Vec<usize> = (0..reps.reps.len()).filter(|&t| inst.serves(i, reps.reps[t])).collect();
        let (u, v) = match near.as_slice() {
            [] => continue,
            [only] => (*only, *only),
            [a, b, ..] => (*a, *b),
        };
        g.add_budgeted(u, v, EdgeLabel::Supplier(i)).expect("valid node positions");
    }
    for t in 0..reps.reps.len() {
        g.add_edge(t, t, EdgeLabel::Outlier, reps.weight(t) as f64, EdgeClass::Free)
            .expect("valid node position");
    }
    g
}

/// Minimizes `z(S) + y(f(S)) − ⌈|S|/2⌉` over nonempty sets of representatives
/// and returns the row when the point violates it by more than [`CUT_TOL`].
pub fn separate_wellsep(
    inst: &ScaledInstance<'_>,
    g: &LoopGraph,
    reps: &Representatives,
    p: &FractionalPoint,
    mode: SeparationMode,
    cap: usize,
) -> Result<Option<Cut>> {
    let (y, z) = (p.y(), p.z());
    let values: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| match e.label {
            EdgeLabel::Supplier(i) => y[i],
            EdgeLabel::Outlier => z[reps.reps[e.u]],
        })
        .collect();
    let Some(set) = most_violated_set(g, &values, mode, cap)? else {
        return Ok(None);
    };
    let mut clients: Vec<usize> = set.nodes.iter().map(|&t| reps.reps[t]).collect();
    clients.sort_unstable();
    let cut = Cut {
        row: well_separated_row(inst, &clients),
        kind: CutKind::WellSeparated { clients },
    };
    // The row carries all of f(S); it can only be weaker than the edge view.
    Ok((cut.violation(p) > CUT_TOL).then_some(cut))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutlierOptions {
    pub mode: SeparationMode,
    pub separation_cap: usize,
    /// Iteration limit per radius; `None` uses `|J|·2^min(|J|,16)` plus the basic rows.
    pub max_iters: Option<usize>,
    pub tol: Tolerance,
}

impl Default for OutlierOptions {
    fn default() -> Self {
        OutlierOptions {
            mode: SeparationMode::Exact,
            separation_cap: EXACT_SEPARATION_CAP,
            max_iters: None,
            tol: Tolerance::default(),
        }
    }
}

impl OutlierOptions {
    pub fn iteration_cap(&self, num_suppliers: usize, num_clients: usize) -> usize {
        self.max_iters.unwrap_or_else(|| {
            num_clients.max(1) * (1usize << num_clients.min(16)) + num_clients + 2 * (num_suppliers + num_clients) + 2
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub radius: f64,
    pub iteration: usize,
    /// Cut name, or `duplicate`, `round`, `infeasible`.
    pub cut: String,
    pub set_size: Option<usize>,
    pub lp_value: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutlierSolution {
    pub suppliers: Vec<usize>,
    pub outliers: Vec<usize>,
    /// Achieved scaled radius `max_{j ∉ O} d(j, C)/B`.
    pub radius: f64,
    pub reps: Representatives,
    /// Total free-loop weight in the cover.
    pub loop_weight: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RoundOrCut {
    Solved(OutlierSolution),
    /// The pool became infeasible; the certificate refers to `pool.to_lp()`.
    Infeasible { certificate: FarkasCertificate },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundOrCutRun {
    pub radius: f64,
    pub outcome: RoundOrCut,
    pub pool: CutPool,
    pub transcript: Vec<TranscriptEntry>,
    /// Separation hits whose set was already in the pool; treated as satisfied.
    pub duplicate_cuts: usize,
}

impl RoundOrCutRun {
    pub fn solution(&self) -> Option<&OutlierSolution> {
        match &self.outcome {
            RoundOrCut::Solved(s) => Some(s),
            RoundOrCut::Infeasible { .. } => None,
        }
    }
}

/// Runs round-or-cut at a fixed radius.
pub fn round_or_cut(inst: &ScaledInstance<'_>, opts: &OutlierOptions) -> Result<RoundOrCutRun> {
    let (ni, nj) = (inst.num_suppliers(), inst.num_clients());
    let cap = opts.iteration_cap(ni, nj);
    let mut pool = CutPool::new(ni, nj);
    let mut transcript = Vec::new();
    let mut duplicate_cuts = 0;
    let log = |transcript: &mut Vec<TranscriptEntry>, iteration, cut: &str, set_size, lp_value| {
        transcript.push(TranscriptEntry {
            radius: inst.radius,
            iteration,
            cut: cut.to_string(),
            set_size,
            lp_value,
        })
    };

    for iteration in 0..cap {
        let model = pool.to_lp();
        let sol = match lp::solve(&model)? {
            LpOutcome::Optimal(s) => s,
            LpOutcome::Infeasible(certificate) => {
                log(&mut transcript, iteration, "infeasible", None, None);
                return Ok(RoundOrCutRun {
                    radius: inst.radius,
                    outcome: RoundOrCut::Infeasible { certificate },
                    pool,
                    transcript,
                    duplicate_cuts,
                });
            }
            LpOutcome::Unbounded => return Err(Error::invariant("bounded LP reported unbounded")),
        };
        let value = Some(sol.value);
        let p = FractionalPoint::new(sol.x, ni);

        if let Some(cut) = basic_violation(inst, &p) {
            if pool.contains(&cut.kind) {
                return Err(Error::invariant(format!(
                    "LP point violates pooled row {:?} by {:e}",
                    cut.kind,
                    cut.violation(&p)
                )));
            }
            log(&mut transcript, iteration, cut.kind.name(), None, value);
            pool.push(cut);
            continue;
        }

        let reps = pick_representatives(inst, p.z());
        for (a, &u) in reps.reps.iter().enumerate() {
            for &v in &reps.reps[a + 1..] {
                if !inst.tol.gt(inst.cc(u, v), SQRT_3) {
                    return Err(Error::invariant(format!("representatives {u} and {v} are not well-separated")));
                }
            }
        }
        let g = build_outlier_graph(inst, &reps);
        let cut = separate_wellsep(inst, &g, &reps, &p, opts.mode, opts.separation_cap)?;
        if let Some(cut) = cut {
            let size = match &cut.kind {
                CutKind::WellSeparated { clients } => clients.len(),
                _ => unreachable!("separation yields set rows"),
            };
            if !pool.contains(&cut.kind) {
                log(&mut transcript, iteration, cut.kind.name(), Some(size), value);
                pool.push(cut);
                continue;
            }
            duplicate_cuts += 1;
            log(&mut transcript, iteration, "duplicate", Some(size), value);
        }

        let cover = min_weight_cc_edge_cover_with(&g, inst.k(), opts.mode, opts.separation_cap)?
            .ok_or_else(|| {
                Error::invariant(format!(
                    "LP point satisfies all set rows ({:?} separation) yet no cover within budget {} exists",
                    opts.mode,
                    inst.k()
                ))
            })?;
        let loop_weight = cover
            .edges
            .iter()
            .filter(|&&e| g.edge(e).class == EdgeClass::Free)
            .map(|&e| g.edge(e).weight)
            .sum::<f64>();
        if loop_weight > inst.ell() as f64 + 1e-6 {
            return Err(Error::invariant(format!(
                "cover loop weight {loop_weight} exceeds the outlier budget {}",
                inst.ell()
            )));
        }
        let mut covered = vec![false; reps.reps.len()];
        for &e in &cover.edges {
            let edge = g.edge(e);
            if edge.class == EdgeClass::Budgeted {
                covered[edge.u] = true;
                covered[edge.v] = true;
            }
        }
        let mut outliers: Vec<usize> = (0..reps.reps.len())
            .filter(|&t| !covered[t])
            .flat_map(|t| reps.clusters[t].iter().copied())
            .collect();
        outliers.sort_unstable();
        let suppliers = cover.suppliers(&g);
        let mut is_out = vec![false; nj];
        outliers.iter().for_each(|&j| is_out[j] = true);
        let radius = (0..nj)
            .filter(|&j| !is_out[j])
            .map(|j| suppliers.iter().map(|&i| inst.cs(j, i)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        if suppliers.len() > inst.k() || outliers.len() > inst.ell() || !inst.tol.le(radius, APPROX_RATIO) {
            return Err(Error::invariant(format!(
                "rounded solution breaks a guarantee: |C|={} (k={}), |O|={} (ell={}), radius {radius}",
                suppliers.len(),
                inst.k(),
                outliers.len(),
                inst.ell()
            )));
        }
        log(&mut transcript, iteration, "round", None, value);
        return Ok(RoundOrCutRun {
            radius: inst.radius,
            outcome: RoundOrCut::Solved(OutlierSolution {
                suppliers,
                outliers,
                radius,
                reps,
                loop_weight,
            }),
            pool,
            transcript,
            duplicate_cuts,
        });
    }
    Err(Error::invariant(format!(
        "round-or-cut exceeded {cap} iterations at radius {}",
        inst.radius
    )))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutlierReport {
    /// Smallest accepted radius, or `None` if even the largest was rejected.
    pub radius: Option<f64>,
    pub solution: Option<OutlierSolution>,
    /// Every probed radius in probing order.
    pub runs: Vec<RoundOrCutRun>,
}

impl OutlierReport {
    /// Writes the transcript of every run as JSON lines.
    pub fn write_transcript<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for run in &self.runs {
            for entry in &run.transcript {
                serde_json::to_writer(&mut out, entry)?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    pub fn total_iterations(&self) -> usize {
        self.runs.iter().map(|r| r.transcript.len()).sum()
    }
}

/// Candidate radii for the outlier objective: all supplier–client distances
/// plus 0 (reached when every uncovered client can be an outlier).
pub fn outlier_radii(inst: &Instance) -> Result<Vec<f64>> {
    let mut radii = if inst.num_suppliers() > 0 && inst.num_clients() > 0 {
        candidate_radii(inst, false)?
    } else {
        Vec::new()
    };
    if radii.first() != Some(&0.0) {
        radii.insert(0, 0.0);
    }
    Ok(radii)
}

/// Binary search over [`outlier_radii`] with [`round_or_cut`] at each guess.
pub fn approximate(inst: &Instance, opts: &OutlierOptions) -> Result<OutlierReport> {
    inst.validate()?;
    let radii = outlier_radii(inst)?;
    let mut runs = Vec::new();
    let found = guess_loop(inst, &radii, opts.tol, |s| {
        let run = round_or_cut(s, opts)?;
        let sol = run.solution().cloned();
        runs.push(run);
        Ok(sol)
    });
    match found {
        Ok(g) => Ok(OutlierReport {
            radius: Some(g.radius),
            solution: Some(g.solution),
            runs,
        }),
        Err(Error::Infeasible(_)) => Ok(OutlierReport {
            radius: None,
            solution: None,
            runs,
        }),
        Err(e) => Err(e),
    }
}
