//! Randomized sweeps over all small finite abelian groups and their automorphisms.

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::DualDomain;
use crate::endo::{all_automorphisms, check_condition_d1, Endo};
use crate::error::{Error, Result};
use crate::group::{abelian_groups_up_to, all_subgroups, torsion_subgroup_order2, FiniteGroup, GroupSpec};
use crate::heyde::{
    brute_force_conditional_symmetry, charfn_table, check_independence_sum_difference, check_symmetry_charfn, decompose_a,
    derive_a_b, sum_difference_forms, factorization_report, joint_linear_forms, kernel_witness, membership_finite,
    quadratic_functional_kernel_dim, verify_eq9_eq10, VANISHING_TOL,
};
use crate::measure::FiniteMeasure;

/// Deliberate defects for exercising the violation path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Replaces `μ1 * μ2` by `μ1 * μ2 * E_g` for a nonzero `g`.
    Convolution,
}

fn default_max_order() -> u64 {
    12
}
fn default_pairs() -> usize {
    200
}
fn default_tol() -> f64 {
    crate::heyde::FINITE_TOL
}
fn default_difference_cases() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_max_order")]
    pub max_order: u64,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    /// Symmetric cases per automorphism that also run the difference-equation chain.
    #[serde(default = "default_difference_cases")]
    pub difference_cases: usize,
    #[serde(default)]
    pub fault: Option<Fault>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_order: default_max_order(),
            pairs: default_pairs(),
            seed: 0,
            tolerance: default_tol(),
            difference_cases: default_difference_cases(),
            fault: None,
        }
    }
}

/// How a measure pair was drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Dense,
    Sparse,
    Dirac,
    ShiftedHaar,
    TorsionCoset,
    DegenerateSymmetric,
    KernelWitness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseRow {
    pub group: String,
    pub alpha: String,
    pub case: usize,
    pub generator1: Generator,
    pub generator2: Generator,
    pub charfn_residual: f64,
    pub charfn_symmetric: bool,
    pub brute_symmetric: bool,
    pub independence_residual: f64,
    pub factorization_residual: f64,
    pub convolution_residual: f64,
    pub nonvanishing: bool,
    pub d1: bool,
    /// Both measures lie in `Γ(X) * M¹(G)`.
    pub members: bool,
    pub violation: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepSummary {
    pub groups: usize,
    pub automorphisms: usize,
    pub cases: usize,
    pub symmetric_cases: usize,
    pub oracle_agreement: usize,
    pub factorization_checked: usize,
    pub factorization_violations: usize,
    pub converse_violations: usize,
    pub convolution_violations: usize,
    pub theorem_checked: usize,
    pub theorem_violations: usize,
    pub difference_checked: usize,
    pub difference_violations: usize,
    pub max_symmetric_charfn_residual: f64,
    pub max_factorization_residual_when_symmetric: f64,
    pub max_independence_residual_when_symmetric: f64,
    pub max_convolution_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub summary: SweepSummary,
    /// First violating cases, serialized in full.
    pub violations: Vec<CaseRow>,
    #[serde(skip)]
    pub rows: Vec<CaseRow>,
}

fn weights_dense(rng: &mut ChaCha8Rng, n: usize) -> Vec<u64> {
    loop {
        let w: Vec<u64> = (0..n).map(|_| rng.random_range(0..10)).collect();
        if w.iter().any(|&x| x > 0) {
            return w;
        }
    }
}

fn indicator(n: usize, idx: impl IntoIterator<Item = usize>, rng: &mut ChaCha8Rng, random: bool) -> Vec<u64> {
    let mut w = vec![0u64; n];
    for i in idx {
        w[i] = if random { rng.random_range(1..10) } else { 1 };
    }
    w
}

fn shift_weights(g: &FiniteGroup, w: &[u64], by: usize) -> Vec<u64> {
    let mut out = vec![0u64; w.len()];
    for (i, &x) in w.iter().enumerate() {
        out[g.add_idx(i, by)] = x;
    }
    out
}

struct Sampler<'a> {
    group: &'a FiniteGroup,
    subgroups: &'a [crate::group::FiniteSubgroup],
    torsion: &'a crate::group::FiniteSubgroup,
}

impl Sampler<'_> {
    fn single(&self, rng: &mut ChaCha8Rng) -> (Generator, Vec<u64>) {
        let n = self.group.order();
        let x = rng.random_range(0..n);
        match rng.random_range(0..5) {
            0 => (Generator::Dense, weights_dense(rng, n)),
            1 => {
                let a = rng.random_range(0..n);
                (Generator::Sparse, indicator(n, [a, x], rng, true))
            }
            2 => (Generator::Dirac, indicator(n, [x], rng, false)),
            3 => {
                let k = &self.subgroups[rng.random_range(0..self.subgroups.len())];
                let w = indicator(n, k.indices().iter().copied(), rng, false);
                (Generator::ShiftedHaar, shift_weights(self.group, &w, x))
            }
            _ => {
                let w = indicator(n, self.torsion.indices().iter().copied(), rng, true);
                (Generator::TorsionCoset, shift_weights(self.group, &w, x))
            }
        }
    }

    fn pair(&self, alpha: &Endo, kernel: &[usize], rng: &mut ChaCha8Rng) -> ((Generator, Vec<u64>), (Generator, Vec<u64>)) {
        let g = self.group;
        let n = g.order();
        match rng.random_range(0..8) {
            0 if kernel.len() > 1 => {
                let w = indicator(n, kernel.iter().copied(), rng, true);
                ((Generator::KernelWitness, w.clone()), (Generator::KernelWitness, w))
            }
            1 => {
                // E_a, E_b with a + αb ∈ G: the conditional law of L2 is a point of G
                let b = rng.random_range(0..n);
                let t = self.torsion.indices()[rng.random_range(0..self.torsion.order())];
                let ab = g.index_of(&alpha.apply(&g.element(b)));
                let a = g.sub_idx(t, ab);
                (
                    (Generator::DegenerateSymmetric, indicator(n, [a], rng, false)),
                    (Generator::DegenerateSymmetric, indicator(n, [b], rng, false)),
                )
            }
            _ => (self.single(rng), self.single(rng)),
        }
    }
}

fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Runs every check on every sampled pair. Errors only on invalid configuration.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    if cfg.max_order < 2 || cfg.pairs == 0 {
        return Err(Error::Config("empty sweep: need max_order >= 2 and pairs >= 1".into()));
    }
    if cfg.max_order > 64 {
        return Err(Error::Config("max_order is capped at 64".into()));
    }
    if !(cfg.tolerance > 0.0) {
        return Err(Error::Config("tolerance must be positive".into()));
    }
    let tol = cfg.tolerance;
    let mut summary = SweepSummary::default();
    let mut rows = Vec::new();
    for (gi, spec) in abelian_groups_up_to(cfg.max_order).into_iter().enumerate() {
        summary.groups += 1;
        let g = spec.finite_group()?;
        let subgroups = all_subgroups(&g)?;
        let torsion = torsion_subgroup_order2(&spec)?;
        let sampler = Sampler { group: &g, subgroups: &subgroups, torsion: &torsion };
        let dom = DualDomain::Finite(g.clone());
        for (ai, alpha) in all_automorphisms(&spec)?.into_iter().enumerate() {
            summary.automorphisms += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((gi as u64) << 40) ^ ((ai as u64) << 20));
            let ipa = Endo::identity(&spec).add(&alpha)?;
            let kernel: Vec<usize> = ipa.kernel()?.iter().map(|x| g.index_of(x)).collect();
            let d1 = check_condition_d1(&alpha)?.is_trivial;
            let forms = sum_difference_forms(&alpha)?;
            let forms = [&forms[0], &forms[1], &forms[2], &forms[3]];
            let mut difference_budget = cfg.difference_cases;
            for case in 0..cfg.pairs {
                let ((gen1, w1), (gen2, w2)) = sampler.pair(&alpha, &kernel, &mut rng);
                let q1 = FiniteMeasure::<BigRational>::from_weights(&spec, &w1)?;
                let q2 = FiniteMeasure::<BigRational>::from_weights(&spec, &w2)?;
                let (m1, m2) = (q1.to_f64(), q2.to_f64());
                let (c1, c2) = (charfn_table(&m1), charfn_table(&m2));

                let charfn = check_symmetry_charfn(&c1, &c2, &alpha, &dom, tol)?;
                let brute = brute_force_conditional_symmetry(&q1, &q2, &alpha, tol)?;
                let independence = check_independence_sum_difference(&c1, &c2, &alpha, &dom, tol)?;
                let fact = factorization_report(&g, &joint_linear_forms(&q1, &q2, forms)?, tol);

                let mut conv = m1.convolve(&m2)?;
                if cfg.fault == Some(Fault::Convolution) {
                    conv = conv.shift(&g.element(g.order() - 1))?;
                }
                let (t1, t2) = (m1.charfn_table(), m2.charfn_table());
                let product: Vec<Complex64> = t1.iter().zip(&t2).map(|(a, b)| a * b).collect();
                let conv_res = max_dev(&conv.charfn_table(), &product);

                let nonvanishing = t1.iter().chain(&t2).all(|c| c.norm() > VANISHING_TOL);
                let members = membership_finite(&q1)?.member && membership_finite(&q2)?.member;

                let mut problems = Vec::new();
                if charfn.verdict != brute.verdict {
                    problems.push("oracle disagreement");
                } else {
                    summary.oracle_agreement += 1;
                }
                if brute.verdict {
                    summary.symmetric_cases += 1;
                    summary.factorization_checked += 1;
                    summary.max_symmetric_charfn_residual = summary.max_symmetric_charfn_residual.max(charfn.max_residual);
                    summary.max_factorization_residual_when_symmetric =
                        summary.max_factorization_residual_when_symmetric.max(fact.max_residual);
                    summary.max_independence_residual_when_symmetric = summary.max_independence_residual_when_symmetric.max(independence.max_residual);
                    if !fact.verdict || !independence.verdict {
                        summary.factorization_violations += 1;
                        problems.push("symmetric but P1, P2 not independent");
                    }
                }
                if independence.verdict != fact.verdict {
                    summary.converse_violations += 1;
                    problems.push("independence residual and joint factorization disagree");
                }
                summary.max_convolution_residual = summary.max_convolution_residual.max(conv_res);
                if !(conv_res < tol) {
                    summary.convolution_violations += 1;
                    problems.push("convolution theorem");
                }
                if brute.verdict && d1 && nonvanishing {
                    summary.theorem_checked += 1;
                    if !members {
                        summary.theorem_violations += 1;
                        problems.push("symmetric pair outside Gamma * M1(G)");
                    }
                    if difference_budget > 0 {
                        difference_budget -= 1;
                        summary.difference_checked += 1;
                        let psi = derive_a_b(&c1, &c2, &alpha, &dom)?;
                        let diff = verify_eq9_eq10(&psi.a, &alpha, 0, 1e-10)?;
                        let dec = decompose_a(&psi.a, 1e-10)?;
                        let repeated_ok = diff.repeated.as_ref().map_or(true, |r| r.verdict);
                        if !diff.mixed.verdict || !repeated_ok || (diff.repeated_asserted && !dec.certified) {
                            summary.difference_violations += 1;
                            problems.push("difference equations");
                        }
                    }
                }
                summary.cases += 1;
                rows.push(CaseRow {
                    group: format!("{:?}", g.orders()),
                    alpha: format!("{:?}", alpha.matrix().rows()),
                    case,
                    generator1: gen1,
                    generator2: gen2,
                    charfn_residual: charfn.max_residual,
                    charfn_symmetric: charfn.verdict,
                    brute_symmetric: brute.verdict,
                    independence_residual: independence.max_residual,
                    factorization_residual: fact.max_residual,
                    convolution_residual: conv_res,
                    nonvanishing,
                    d1,
                    members,
                    violation: (!problems.is_empty()).then(|| problems.join("; ")),
                });
            }
        }
    }
    summary.passed = summary.oracle_agreement == summary.cases
        && summary.factorization_violations == 0
        && summary.converse_violations == 0
        && summary.convolution_violations == 0
        && summary.theorem_violations == 0
        && summary.difference_violations == 0;
    let violations = rows.iter().filter(|r| r.violation.is_some()).take(20).cloned().collect();
    Ok(SweepResult { config: cfg.clone(), summary, violations, rows })
}

/// Writes the per-case rows as CSV.
pub fn write_csv(rows: &[CaseRow], w: impl std::io::Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    out.flush().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyRow {
    pub group: Vec<u64>,
    pub order: u64,
    pub kernel_dim: usize,
}

/// Dimension of the solution space of the quadratic-functional equation, per group.
pub fn degeneracy_sweep(max_order: u64) -> Result<Vec<DegeneracyRow>> {
    abelian_groups_up_to(max_order)
        .into_iter()
        .map(|spec| {
            Ok(DegeneracyRow {
                order: spec.order().unwrap_or(0),
                kernel_dim: quadratic_functional_kernel_dim(&spec)?,
                group: match spec {
                    GroupSpec::Finite { orders } => orders,
                    GroupSpec::Torus { .. } => unreachable!("finite list"),
                },
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelWitnessRow {
    pub group: Vec<u64>,
    pub alpha: Vec<Vec<i64>>,
    pub kernel_order: usize,
    pub masses: Vec<f64>,
    pub symmetric: bool,
}

/// Random `(group, α, μ on Ker(I+α))` triples with nontrivial kernel.
pub fn kernel_witness_sweep(seed: u64, count: usize, max_order: u64) -> Result<Vec<KernelWitnessRow>> {
    let mut candidates = Vec::new();
    for spec in abelian_groups_up_to(max_order) {
        for alpha in all_automorphisms(&spec)? {
            let ipa = Endo::identity(&spec).add(&alpha)?;
            if ipa.kernel()?.len() > 1 {
                candidates.push(alpha);
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::Config("no automorphism with nontrivial Ker(I+alpha)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..count {
        let alpha = &candidates[rng.random_range(0..candidates.len())];
        let spec = alpha.spec().clone();
        let g = spec.finite_group()?;
        let ipa = Endo::identity(&spec).add(alpha)?;
        let kernel: Vec<usize> = ipa.kernel()?.iter().map(|x| g.index_of(x)).collect();
        let w = indicator(g.order(), kernel.iter().copied(), &mut rng, true);
        let mu = FiniteMeasure::<BigRational>::from_weights(&spec, &w)?;
        let (a, b) = kernel_witness(alpha, &mu)?;
        let symmetric = brute_force_conditional_symmetry(&a, &b, alpha, 0.0)?.verdict;
        out.push(KernelWitnessRow {
            group: g.orders().iter().map(|&n| n as u64).collect(),
            alpha: alpha.matrix().rows(),
            kernel_order: kernel.len(),
            masses: mu.to_f64().masses().to_vec(),
            symmetric,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainRow {
    pub x1: Vec<i64>,
    pub x2: Vec<i64>,
    pub brute_symmetric: bool,
    pub mixed_residual: f64,
    pub repeated_residual: Option<f64>,
    pub cosets: usize,
    pub decomposition_residual: f64,
    pub certified: bool,
}

/// `Z_2 × Z_2 × Z_3` with `α = [[0,1],[1,1]] ⊕ 1` and pairs `E_x * ω`, `ω` on `G` with `ω(0) > 1/2`.
pub fn difference_chain_sweep(seed: u64, count: usize) -> Result<Vec<ChainRow>> {
    let spec = GroupSpec::finite(&[2, 2, 3])?;
    let g = spec.finite_group()?;
    let alpha = Endo::from_rows(&spec, vec![vec![0, 1, 0], vec![1, 1, 0], vec![0, 0, 1]])?;
    let torsion = torsion_subgroup_order2(&spec)?;
    let dom = DualDomain::Finite(g.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = |rng: &mut ChaCha8Rng| -> Vec<u64> {
        let mut w = vec![0u64; g.order()];
        let mut rest = 0;
        for &i in torsion.indices().iter().skip(1) {
            w[i] = rng.random_range(0..5);
            rest += w[i];
        }
        w[0] = rest + rng.random_range(1..5);
        w
    };
    let mut out = Vec::new();
    while out.len() < count {
        let x1 = g.element(rng.random_range(0..g.order()));
        let mut x2 = g.element(rng.random_range(0..g.order()));
        x2[2] = (-x1[2]).rem_euclid(3);
        let mu1 = FiniteMeasure::<BigRational>::from_weights(&spec, &omega(&mut rng))?.shift(&x1)?;
        let mu2 = FiniteMeasure::<BigRational>::from_weights(&spec, &omega(&mut rng))?.shift(&x2)?;
        let brute = brute_force_conditional_symmetry(&mu1, &mu2, &alpha, 0.0)?;
        let (c1, c2) = (charfn_table(&mu1), charfn_table(&mu2));
        let psi = derive_a_b(&c1, &c2, &alpha, &dom)?;
        let diff = verify_eq9_eq10(&psi.a, &alpha, 0, 1e-10)?;
        let dec = decompose_a(&psi.a, 1e-10)?;
        out.push(ChainRow {
            x1,
            x2,
            brute_symmetric: brute.verdict,
            mixed_residual: diff.mixed.max_residual,
            repeated_residual: diff.repeated.map(|r| r.max_residual),
            cosets: dec.constants.len(),
            decomposition_residual: dec.residual,
            certified: dec.certified,
        });
    }
    Ok(out)
}
