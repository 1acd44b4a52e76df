//! Randomized property suite over curvature functions, symmetric polynomials and the
//! integral geometry of convex graphs.
//!
//! Every invariant draws its inputs from a ChaCha stream seeded with the master seed,
//! so a report is reproducible from `(seed, samples)`. Margins are reported in the
//! units of each tolerance: a margin `>= 0` passes.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functionals::{
    af_slack, applicable_inequalities, ball_mixed_volume, odd_quermass_explicit, FunctionalRecord,
};
use crate::geometry::{enclosed_volume, off_centre_sphere, Chart, GraphField, ShapeData};
use crate::numerics::{sin_power_integral, sphere_area};
use crate::symfunc::{
    binomial, cone_membership, elementary_all, elementary_partial, inverse_concavity_form, CurvatureSpec, Family,
    KappaVector, SymmetricMatrix,
};

pub const DERIVATIVE_IDENTITY_TOL: f64 = 1e-10;
pub const FINITE_DIFFERENCE_STEP: f64 = 1e-5;
pub const FINITE_DIFFERENCE_TOL: f64 = 1e-6;
pub const INVERSE_CONCAVITY_TOL: f64 = 1e-10;
pub const HOMOGENEITY_TOL: f64 = 1e-12;
const ROUNDOFF_TOL: f64 = 1e-12;
const MAX_DIM: usize = 6;
const GEOMETRY_NODES: usize = 64;
const UMBILIC_NODES: usize = 256;
const PROFILE_NODES: usize = 128;

/// A curvature function together with the structural claims the suite checks for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyUnderTest {
    pub family: Family,
    pub concave: bool,
    pub inverse_concave: bool,
}

impl FamilyUnderTest {
    /// Claims taken from the validated flags of the family.
    pub fn flagged(family: Family) -> Result<Self> {
        let spec = CurvatureSpec::new(min_dim(family), family, 1.0)?;
        Ok(Self { family, concave: spec.is_concave(), inverse_concave: spec.is_inverse_concave() })
    }

    fn fits(&self, n: usize) -> bool {
        n >= min_dim(self.family)
    }
}

fn min_dim(family: Family) -> usize {
    match family {
        Family::Mean | Family::PowerMean(_) => 1,
        Family::NormalizedRoot(k) | Family::Quotient(k, _) => k.max(1),
    }
}

/// The admissible families exercised by default.
pub fn standard_families() -> Vec<FamilyUnderTest> {
    let mut families = vec![Family::Mean];
    families.extend((1..=MAX_DIM).map(Family::NormalizedRoot));
    families.extend([1.0, 0.5, -0.5, -1.0].map(Family::PowerMean));
    families.extend([(2, 0), (2, 1), (3, 1), (3, 2), (4, 2), (5, 3)].map(|(k, l)| Family::Quotient(k, l)));
    families.into_iter().map(|f| FamilyUnderTest::flagged(f).expect("standard family")).collect()
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub samples: usize,
    pub families: Vec<FamilyUnderTest>,
    /// Also run the sphere-geometry and functional invariants.
    pub geometry: bool,
}

impl SuiteOptions {
    pub fn new(seed: u64, samples: usize) -> Self {
        Self { seed, samples, families: standard_families(), geometry: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub input: String,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantStats {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    pub worst_margin: f64,
    /// First violating input.
    pub first_violation: Option<Violation>,
}

impl InvariantStats {
    fn new(name: &'static str) -> Self {
        Self { name, checked: 0, failures: 0, worst_margin: f64::INFINITY, first_violation: None }
    }

    fn record(&mut self, margin: f64, input: impl FnOnce() -> String) {
        self.checked += 1;
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        self.worst_margin = self.worst_margin.min(margin);
        if margin < 0.0 {
            self.failures += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(Violation { input: input(), margin });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub samples: usize,
    pub invariants: Vec<InvariantStats>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.invariants.iter().all(|s| s.failures == 0)
    }

    pub fn get(&self, name: &str) -> Option<&InvariantStats> {
        self.invariants.iter().find(|s| s.name == name)
    }

    pub fn write_summary<W: Write + ?Sized>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "property suite: seed {}, samples {}", self.seed, self.samples)?;
        for s in &self.invariants {
            writeln!(
                out,
                "{:<24} checked {:>7}  failures {:>5}  worst margin {:.3e}",
                s.name, s.checked, s.failures, s.worst_margin
            )?;
        }
        for s in &self.invariants {
            if let Some(v) = &s.first_violation {
                writeln!(out, "FAIL {}: margin {:.3e} at {}", s.name, v.margin, v.input)?;
            }
        }
        writeln!(out, "result: {}", if self.passed() { "pass" } else { "fail" })?;
        Ok(())
    }
}

pub fn run_suite(options: &SuiteOptions) -> Result<SuiteReport> {
    if options.samples == 0 {
        return Err(Error::Argument("the property suite needs at least one sample".into()));
    }
    if options.families.is_empty() {
        return Err(Error::Argument("the property suite needs at least one family".into()));
    }
    let mut ctx = Context { rng: ChaCha8Rng::seed_from_u64(options.seed), stats: Vec::new() };
    for _ in 0..options.samples {
        ctx.curvature_sample(&options.families)?;
        ctx.polynomial_sample()?;
    }
    if options.geometry {
        for _ in 0..options.samples {
            ctx.geometry_sample()?;
        }
    }
    Ok(SuiteReport { seed: options.seed, samples: options.samples, invariants: ctx.stats })
}

struct Context {
    rng: ChaCha8Rng,
    stats: Vec<InvariantStats>,
}

impl Context {
    fn check(&mut self, name: &'static str, margin: f64, input: impl FnOnce() -> String) {
        let idx = match self.stats.iter().position(|s| s.name == name) {
            Some(i) => i,
            None => {
                self.stats.push(InvariantStats::new(name));
                self.stats.len() - 1
            }
        };
        self.stats[idx].record(margin, input);
    }

    /// Entries log-uniform in `[0.1, 10]`.
    fn positive_kappa(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| 10f64.powf(self.rng.gen_range(-1.0..1.0))).collect()
    }

    fn orthogonal(&mut self, n: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| self.rng.gen_range(-1.0..1.0));
        a.qr().q()
    }

    fn symmetric(&mut self, n: usize) -> SymmetricMatrix {
        let a = DMatrix::from_fn(n, n, |_, _| self.rng.gen_range(-1.0..1.0));
        SymmetricMatrix::new((&a + a.transpose()) * 0.5).expect("symmetrized matrix")
    }

    fn curvature_sample(&mut self, families: &[FamilyUnderTest]) -> Result<()> {
        let n = self.rng.gen_range(1..=MAX_DIM);
        let fits: Vec<_> = families.iter().filter(|f| f.fits(n)).copied().collect();
        let Some(&fam) = fits.choose(&mut self.rng) else {
            return Ok(());
        };
        let spec = CurvatureSpec::unchecked(n, fam.family, 1.0);
        let raw = self.positive_kappa(n);
        let kappa = KappaVector::positive(raw.clone())?;
        let label = spec.label();
        let show = |extra: &str| format!("{label}, n={n}, kappa={raw:?}{extra}");

        let f = spec.value(&kappa)?;
        let g = spec.gradient(&kappa)?.into_inner();
        let g_norm = norm(&g);

        let ones = KappaVector::positive(vec![1.0; n])?;
        let f1 = spec.value(&ones)?;
        let g1 = spec.gradient(&ones)?.into_inner();
        let err = (f1 - n as f64).abs() / n as f64 + g1.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
        self.check("normalization", ROUNDOFF_TOL - err, || format!("{label}, n={n}"));

        let lambda = 10f64.powf(self.rng.gen_range(-1.0..1.0));
        let scaled = KappaVector::positive(raw.iter().map(|x| lambda * x).collect())?;
        let err = (spec.value(&scaled)? - lambda * f).abs();
        self.check("homogeneity", HOMOGENEITY_TOL * lambda * f - err, || show(&format!(", lambda={lambda}")));

        let mut perm = raw.clone();
        perm.shuffle(&mut self.rng);
        let diff = (spec.value(&KappaVector::positive(perm.clone())?)? - f).abs();
        self.check("symmetry", 0.0 - diff, || show(&format!(", permuted={perm:?}")));

        let euler: f64 = g.iter().zip(&raw).map(|(a, b)| a * b).sum();
        self.check("euler", ROUNDOFF_TOL * f - (euler - f).abs(), || show(""));

        let g_min = g.iter().copied().fold(f64::INFINITY, f64::min);
        self.check("monotonicity", g_min / g_norm, || show(""));

        let h = FINITE_DIFFERENCE_STEP;
        let mut fd = vec![0.0; n];
        let mut hess_fd = DMatrix::zeros(n, n);
        for i in 0..n {
            let (mut plus, mut minus) = (raw.clone(), raw.clone());
            plus[i] += h;
            minus[i] -= h;
            let (plus, minus) = (KappaVector::positive(plus)?, KappaVector::positive(minus)?);
            fd[i] = (spec.value(&plus)? - spec.value(&minus)?) / (2.0 * h);
            let (gp, gm) = (spec.gradient(&plus)?.into_inner(), spec.gradient(&minus)?.into_inner());
            for j in 0..n {
                hess_fd[(i, j)] = (gp[j] - gm[j]) / (2.0 * h);
            }
        }
        let err = norm(&g.iter().zip(&fd).map(|(a, b)| a - b).collect::<Vec<_>>()) / g_norm;
        self.check("gradient_fd", FINITE_DIFFERENCE_TOL - err, || show(""));

        let hess = spec.hessian(&kappa)?;
        let kmax = raw.iter().copied().fold(0.0, f64::max);
        // second derivatives of a degree-one function are naturally of size |DF| / kappa
        let scale = hess.matrix().norm() + g_norm / kmax;
        let err = (hess.matrix() - &hess_fd).norm() / scale;
        self.check("hessian_fd", FINITE_DIFFERENCE_TOL - err, || show(""));

        if fam.concave {
            let mean: f64 = raw.iter().sum();
            self.check("f_le_h", ROUNDOFF_TOL * mean - (f - mean), || show(""));
            let trace: f64 = g.iter().sum();
            self.check("gradient_trace_ge_n", trace - n as f64 * (1.0 - ROUNDOFF_TOL), || show(""));
            let top = hess.eigenvalues().into_iter().fold(f64::NEG_INFINITY, f64::max);
            self.check("hessian_nsd", ROUNDOFF_TOL * scale - top, || show(""));
        }

        if fam.inverse_concave {
            let q = self.orthogonal(n);
            let m = &q * DMatrix::from_diagonal(&DVector::from_vec(raw.clone())) * q.transpose();
            let hmat = SymmetricMatrix::new((&m + m.transpose()) * 0.5)?;
            let eta = self.symmetric(n);
            let form = inverse_concavity_form(&spec, &hmat, &eta)?;
            self.check("inverse_concavity_form", form + INVERSE_CONCAVITY_TOL, || {
                show(&format!(", h={:?}, eta={:?}", hmat.matrix().as_slice(), eta.matrix().as_slice()))
            });
        }
        Ok(())
    }

    fn polynomial_sample(&mut self) -> Result<()> {
        let n = self.rng.gen_range(1..=MAX_DIM);
        let raw: Vec<f64> = if self.rng.gen_bool(0.5) {
            self.positive_kappa(n)
        } else {
            (0..n).map(|_| self.rng.gen_range(-1.0..3.0)).collect()
        };
        let kappa = KappaVector::new(raw.clone())?;
        let show = || format!("n={n}, kappa={raw:?}");

        let e = elementary_all(&raw);
        for k in 0..n {
            for i in 0..n {
                let upper = elementary_partial(&kappa, k + 1, i)?;
                let lower = elementary_partial(&kappa, k, i)?;
                let rhs = upper + raw[i] * lower;
                let scale = 1.0 + e[k].abs() + upper.abs() + (raw[i] * lower).abs();
                self.check("derivative_identity", DERIVATIVE_IDENTITY_TOL * scale - (e[k] - rhs).abs(), || {
                    format!("{}, k={k}, i={i}", show())
                });
            }
        }

        let top = (1..=n).take_while(|&t| cone_membership(&kappa, t)).last().unwrap_or(0);
        let roots: Vec<f64> = (1..=top).map(|t| (e[t] / binomial(n, t)).powf(1.0 / t as f64)).collect();
        for t in 2..=top {
            for s in 1..t {
                let (lo, hi) = (roots[t - 1], roots[s - 1]);
                self.check("maclaurin_chain", ROUNDOFF_TOL * hi.abs() - (lo - hi), || {
                    format!("{}, s={s}, t={t}", show())
                });
            }
        }
        Ok(())
    }

    fn geometry_sample(&mut self) -> Result<()> {
        let n = self.rng.gen_range(1..=5);
        let chart = if n == 1 { Chart::Circle } else { Chart::Axisym };

        let rho = self.rng.gen_range(0.1..1.5);
        let ball = GraphField::ball(chart, n, GEOMETRY_NODES, rho)?;
        let shape = ShapeData::compute(&ball)?;
        let rec = FunctionalRecord::geometric(0.0, &ball, &shape, &[])?;
        for k in 0..=n {
            let exact = ball_mixed_volume(n, k, rho)?;
            self.check("ball_mixed_volume", 1e-10 * exact.abs().max(1e-3) - (rec.v[k] - exact).abs(), || {
                format!("n={n}, rho={rho}, k={k}")
            });
        }
        let vol = sphere_area(n) * sin_power_integral(n, rho);
        self.check("ball_volume", 1e-12 * vol - (enclosed_volume(&ball) - vol).abs(), || format!("n={n}, rho={rho}"));

        let alpha = self.rng.gen_range(0.0..0.4);
        let radius = self.rng.gen_range(alpha + 0.3..1.4);
        let field = GraphField::from_fn(chart, n, UMBILIC_NODES, off_centre_sphere(alpha, radius))?;
        let shape = ShapeData::compute(&field)?;
        let cot = radius.cos() / radius.sin();
        let err = shape.kappa.iter().flat_map(|k| k.values().to_vec()).map(|x| (x - cot).abs()).fold(0.0, f64::max);
        self.check("off_centre_umbilic", 1e-5 * (1.0 + cot) - err, || format!("n={n}, alpha={alpha}, rho={radius}"));
        let area = sphere_area(n) * radius.sin().powi(n as i32);
        self.check("off_centre_area", 1e-6 * area - (shape.area - area).abs(), || {
            format!("n={n}, alpha={alpha}, rho={radius}")
        });

        let (field, desc) = self.convex_profile(chart, n)?;
        let shape = ShapeData::compute(&field)?;
        let rec = FunctionalRecord::geometric(0.0, &field, &shape, &[])?;
        for k in (0..).take_while(|k| 2 * k + 1 <= n + 1) {
            let explicit = odd_quermass_explicit(&rec.v, n, k)?;
            let recursive = rec.w[2 * k + 1];
            self.check("quermass_dual_path", ROUNDOFF_TOL * recursive.abs() - (explicit - recursive).abs(), || {
                format!("{desc}, k={k}")
            });
        }
        for which in applicable_inequalities(n) {
            let slack = af_slack(&rec, which)?;
            self.check("af_slack_nonnegative", slack.value + 1e-8 * slack.scale, || {
                format!("{desc}, inequality {}", which.name())
            });
        }
        Ok(())
    }

    /// A strictly convex, hemisphere-contained profile `b + a1 cos t + a2 cos 2t + a3 cos 3t`.
    fn convex_profile(&mut self, chart: Chart, n: usize) -> Result<(GraphField, String)> {
        let mut amp = 0.1;
        loop {
            let b = self.rng.gen_range(0.3..1.2);
            let a: Vec<f64> = (1..=3).map(|m| self.rng.gen_range(-amp..amp) * b / m as f64).collect();
            let profile = |t: f64| b + a[0] * t.cos() + a[1] * (2.0 * t).cos() + a[2] * (3.0 * t).cos();
            let field = GraphField::from_fn(chart, n, PROFILE_NODES, profile)?;
            if field.u_max() < FRAC_PI_2 && ShapeData::compute(&field)?.strictly_convex() {
                return Ok((field, format!("n={n}, base={b}, amplitudes={a:?}")));
            }
            amp *= 0.5;
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
