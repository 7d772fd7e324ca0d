//! Closed-form eigenvalue intervals for `A3`, `A2` and `A1`, the
//! alternative intervals, per-eigenvalue bands, and
//! verdicts on how the bounds move when observations are added.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{Formulation, ObservationNetwork};
use crate::spectral::{AlternativeInputs, SpectralSummary, Spectrum};

/// Containment slack relative to `||A||`.
pub const CONTAINMENT_SLACK: f64 = 1e-10;
/// Slack relative to the matrix scale for monotonicity comparisons.
pub const MONOTONICITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }

    /// `self` inside `other`, up to `slack`.
    pub fn is_within(&self, other: &Interval, slack: f64) -> bool {
        self.lo >= other.lo - slack && self.hi <= other.hi + slack
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Standard,
    Alternative,
}

/// Which term gave the `A2` negative upper bound `min{b1, max{b2, b3}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaTerm {
    Beta1,
    Beta2,
    Beta3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Betas {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub decided_by: BetaTerm,
}

impl Betas {
    pub fn upper(&self) -> f64 {
        match self.decided_by {
            BetaTerm::Beta1 => self.beta1,
            BetaTerm::Beta2 => self.beta2,
            BetaTerm::Beta3 => self.beta3,
        }
    }
}

/// Computed eigenvalues checked against a report's intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    pub contained: bool,
    pub slack: f64,
    pub eigenvalue_count: usize,
    /// Extreme negative eigenvalues `(min, max)`, if any.
    pub negative_extremes: Option<(f64, f64)>,
    /// Extreme positive eigenvalues `(min, max)`.
    pub positive_extremes: Option<(f64, f64)>,
    /// Eigenvalues outside every interval (at most 20 listed).
    pub violations: Vec<f64>,
    pub violation_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub formulation: Formulation,
    pub kind: BoundKind,
    /// `None` for `A1`, which has no negative eigenvalues.
    pub negative: Option<Interval>,
    pub positive: Interval,
    pub betas: Option<Betas>,
    pub xi: Option<f64>,
    pub containment: Option<Containment>,
}

impl BoundsReport {
    fn new(formulation: Formulation, kind: BoundKind, negative: Option<Interval>, positive: Interval) -> Self {
        Self {
            formulation,
            kind,
            negative,
            positive,
            betas: None,
            xi: None,
            containment: None,
        }
    }

    /// Check every eigenvalue of `spectrum` against `I- ∪ I+` with slack
    /// `1e-10 ||A||`, store the verdict and return it.
    pub fn check(&mut self, spectrum: &Spectrum) -> &Containment {
        let slack = CONTAINMENT_SLACK * spectrum.norm();
        let inside = |x: f64| {
            self.positive.contains(x, slack) || self.negative.is_some_and(|i| i.contains(x, slack))
        };
        let outside: Vec<f64> = spectrum.values().iter().copied().filter(|&x| !inside(x)).collect();
        let extremes = |v: &[f64]| (!v.is_empty()).then(|| (v[0], v[v.len() - 1]));
        self.containment = Some(Containment {
            contained: outside.is_empty(),
            slack,
            eigenvalue_count: spectrum.len(),
            negative_extremes: extremes(spectrum.negative()),
            positive_extremes: extremes(spectrum.positive()),
            violation_count: outside.len(),
            violations: outside.into_iter().take(20).collect(),
        });
        self.containment.as_ref().expect("just set")
    }

    pub fn is_contained(&self) -> Option<bool> {
        self.containment.as_ref().map(|c| c.contained)
    }
}

fn half(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

/// Intervals for the eigenvalues of `A3`.
pub fn bounds_a3(s: &SpectralSummary) -> BoundsReport {
    let negative = Interval::new(
        half(s.tau_min, -(s.tau_min.powi(2) + 4.0 * s.theta_max.powi(2)).sqrt()),
        half(s.tau_max, -(s.tau_max.powi(2) + 4.0 * s.theta_min.powi(2)).sqrt()),
    );
    let positive = Interval::new(
        s.tau_min,
        half(s.tau_max, (s.tau_max.powi(2) + 4.0 * s.theta_max.powi(2)).sqrt()),
    );
    BoundsReport::new(Formulation::A3, BoundKind::Standard, Some(negative), positive)
}

/// `beta_1`, `beta_2`, `beta_3` and the term that gives `min{b1, max{b2, b3}}`.
pub fn betas(s: &SpectralSummary) -> Betas {
    let beta1 = half(
        s.psi_max - s.nu_min,
        -((s.psi_max + s.nu_min).powi(2) + 4.0 * s.sigma_min.powi(2)).sqrt(),
    );
    let beta2 = -s.theta_min.powi(2) / s.rho_max;
    let beta3 = half(s.psi_max, -(s.psi_max.powi(2) + 4.0 * s.theta_min.powi(2)).sqrt());
    let (inner, inner_term) = if beta3 >= beta2 {
        (beta3, BetaTerm::Beta3)
    } else {
        (beta2, BetaTerm::Beta2)
    };
    let decided_by = if beta1 <= inner { BetaTerm::Beta1 } else { inner_term };
    Betas {
        beta1,
        beta2,
        beta3,
        decided_by,
    }
}

/// The closed-form test for `max{b2, b3} = b3`:
/// `rho_max <= (psi_max + sqrt(psi_max^2 + 4 theta_min^2)) / 2`.
pub fn beta3_dominates_criterion(s: &SpectralSummary) -> bool {
    s.rho_max <= half(s.psi_max, (s.psi_max.powi(2) + 4.0 * s.theta_min.powi(2)).sqrt())
}

/// Intervals for the eigenvalues of `A2`.
pub fn bounds_a2(s: &SpectralSummary) -> BoundsReport {
    let b = betas(s);
    let negative = Interval::new(
        half(
            s.psi_min - s.nu_max,
            -((s.psi_min + s.nu_max).powi(2) + 4.0 * s.sigma_max.powi(2)).sqrt(),
        ),
        b.upper(),
    );
    let positive = Interval::new(
        half(
            s.psi_min - s.nu_max,
            ((s.psi_min + s.nu_max).powi(2) + 4.0 * s.sigma_min.powi(2)).sqrt(),
        ),
        half(
            s.psi_max - s.nu_min,
            ((s.psi_max + s.nu_min).powi(2) + 4.0 * s.sigma_max.powi(2)).sqrt(),
        ),
    );
    let mut report = BoundsReport::new(Formulation::A2, BoundKind::Standard, Some(negative), positive);
    report.betas = Some(b);
    report
}

/// Interval for the eigenvalues of `A1`.
pub fn bounds_a1(s: &SpectralSummary) -> BoundsReport {
    let positive = Interval::new(
        s.theta_min.powi(2) / s.tau_max,
        s.theta_max.powi(2) / s.tau_min,
    );
    BoundsReport::new(Formulation::A1, BoundKind::Standard, None, positive)
}

pub fn bounds_for(formulation: Formulation, s: &SpectralSummary) -> BoundsReport {
    match formulation {
        Formulation::A3 => bounds_a3(s),
        Formulation::A2 => bounds_a2(s),
        Formulation::A1 => bounds_a1(s),
    }
}

/// Alternative intervals for `A3` or `A2`; `A1` has none.
pub fn bounds_alternative(formulation: Formulation, s: &SpectralSummary, alt: &AlternativeInputs) -> Result<BoundsReport> {
    let report = match formulation {
        Formulation::A3 => {
            let root = |t: f64, l: f64| (t * t + 4.0 * t * l).sqrt();
            let negative = Interval::new(
                half(s.tau_max, -root(s.tau_max, alt.a1_max)),
                half(s.tau_min, -root(s.tau_min, alt.a1_min)),
            );
            let positive = Interval::new(s.tau_min, half(s.tau_max, root(s.tau_max, alt.a1_max)));
            BoundsReport::new(formulation, BoundKind::Alternative, Some(negative), positive)
        }
        Formulation::A2 => {
            let negative = Interval::new(
                -alt.a1_max,
                -alt.a1_min / (1.0 + alt.xi * alt.a1_min / s.psi_min),
            );
            let positive = Interval::new(
                s.psi_min,
                half(
                    s.psi_max,
                    (s.psi_max.powi(2) + 4.0 * s.psi_max * alt.ltdinvl_max).sqrt(),
                ),
            );
            let mut r = BoundsReport::new(formulation, BoundKind::Alternative, Some(negative), positive);
            r.xi = Some(alt.xi);
            r
        }
        Formulation::A1 => {
            return Err(Error::Config(
                "alternative bounds exist only for the saddle point formulations".into(),
            ))
        }
    };
    Ok(report)
}

/// Band for the `k`-th largest eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualBands {
    pub formulation: Formulation,
    /// `bands[k]` bounds the `(k+1)`-th largest eigenvalue.
    pub bands: Vec<Interval>,
}

impl IndividualBands {
    /// Indices (in descending order) whose eigenvalue falls outside its band.
    pub fn violations(&self, spectrum: &Spectrum) -> Result<Vec<usize>> {
        if spectrum.len() != self.bands.len() {
            return Err(Error::Dimension {
                context: "individual bands vs spectrum",
                expected: self.bands.len(),
                got: spectrum.len(),
            });
        }
        let slack = CONTAINMENT_SLACK * spectrum.norm();
        Ok(spectrum
            .values()
            .iter()
            .rev()
            .zip(&self.bands)
            .enumerate()
            .filter(|(_, (&x, band))| !band.contains(x, slack))
            .map(|(k, _)| k)
            .collect())
    }
}

fn descending(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Weyl bands for `A3` from the eigenvalues of `D` and `R`.
///
/// The `s + p` largest eigenvalues lie within `theta_max` of the
/// correspondingly ordered eigenvalues of `D` and `R`; the remaining `s`
/// lie in `[-theta_max, 0)`.
pub fn individual_bounds_a3(s: &SpectralSummary, d_eigs: &[f64], r_eigs: &[f64]) -> IndividualBands {
    let mut omega = d_eigs.to_vec();
    omega.extend_from_slice(r_eigs);
    let omega = descending(&omega);
    let mut bands: Vec<Interval> = omega
        .iter()
        .map(|w| Interval::new(w - s.theta_max, w + s.theta_max))
        .collect();
    bands.extend(std::iter::repeat_n(Interval::new(-s.theta_max, 0.0), d_eigs.len()));
    IndividualBands {
        formulation: Formulation::A3,
        bands,
    }
}

/// Weyl bands for `A2` from the eigenvalues of `D` and `H^T R^{-1} H`.
///
/// The `s` largest eigenvalues lie within `sigma_max` of the ordered
/// eigenvalues of `D`; the others within `sigma_max` of `-nu_k`, taking the
/// `nu_k` ascending. Zero `nu_k` (unobserved directions) give `[-sigma_max, 0]`.
pub fn individual_bounds_a2(s: &SpectralSummary, d_eigs: &[f64], nu_eigs: &[f64]) -> Result<IndividualBands> {
    if d_eigs.len() != nu_eigs.len() {
        return Err(Error::Dimension {
            context: "individual_bounds_a2: nu list",
            expected: d_eigs.len(),
            got: nu_eigs.len(),
        });
    }
    let mut bands: Vec<Interval> = descending(d_eigs)
        .iter()
        .map(|w| Interval::new(w - s.sigma_max, w + s.sigma_max))
        .collect();
    let mut nu = nu_eigs.to_vec();
    nu.sort_by(f64::total_cmp);
    bands.extend(nu.iter().map(|&v| {
        if v == 0.0 {
            Interval::new(-s.sigma_max, 0.0)
        } else {
            Interval::new(-v - s.sigma_max, -v + s.sigma_max)
        }
    }));
    Ok(IndividualBands {
        formulation: Formulation::A2,
        bands,
    })
}

/// Everything measured for one network of a nested chain.
#[derive(Debug, Clone)]
pub struct ChainStep {
    pub network: ObservationNetwork,
    pub summary: SpectralSummary,
    pub a3: Spectrum,
    pub a2: Spectrum,
    pub a1: Spectrum,
    /// Whether `R` is diagonal (needed by some claims).
    pub diagonal_r: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Claim {
    /// theta_min and theta_max do not decrease.
    ThetaGrows,
    /// rho_min does not increase, rho_max does not decrease.
    RhoSpreads,
    /// nu_max does not decrease (diagonal R).
    NuMaxGrows,
    /// A3 negative extremes and largest positive move away from zero,
    /// smallest positive moves towards zero.
    A3Extremes,
    /// A2 negative extremes move away from zero, positive extremes move
    /// towards zero (diagonal R).
    A2Extremes,
    /// Every A1 eigenvalue does not decrease (diagonal R).
    A1Eigenvalues,
    /// A3 positive interval expands.
    A3PositiveBoundsWiden,
    /// A3 negative bounds move away from zero when tau is set by psi.
    A3NegativeBoundsMoveOut,
    /// A2 negative upper bound moves away from zero when set by beta1 or beta3.
    A2NegativeUpperMovesOut,
    /// A2 negative lower bound moves away from zero (diagonal R).
    A2NegativeLowerMovesOut,
    /// A2 positive interval inside A3 positive interval.
    A2PositiveInsideA3,
    /// A1 upper bound moves away from zero.
    A1UpperBoundGrows,
}

impl Claim {
    pub const ALL: [Claim; 12] = [
        Claim::ThetaGrows,
        Claim::RhoSpreads,
        Claim::NuMaxGrows,
        Claim::A3Extremes,
        Claim::A2Extremes,
        Claim::A1Eigenvalues,
        Claim::A3PositiveBoundsWiden,
        Claim::A3NegativeBoundsMoveOut,
        Claim::A2NegativeUpperMovesOut,
        Claim::A2NegativeLowerMovesOut,
        Claim::A2PositiveInsideA3,
        Claim::A1UpperBoundGrows,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Violated,
    NotApplicable,
}

/// Outcome for one claim over a whole chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: Claim,
    pub status: Status,
    /// Transitions (or steps, for the interval inclusion claim) where the claim was tested.
    pub checked: usize,
    pub skipped: usize,
    /// Largest movement in the forbidden direction, in units of the slack
    /// scale; negative when every check had room to spare.
    pub worst_excess: f64,
    pub first_violation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub steps: usize,
    pub verdicts: Vec<Verdict>,
}

impl MonotonicityReport {
    pub fn verdict(&self, claim: Claim) -> &Verdict {
        self.verdicts.iter().find(|v| v.claim == claim).expect("all claims reported")
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.status != Status::Violated)
    }
}

struct Tally {
    checked: usize,
    skipped: usize,
    worst: f64,
    first_violation: Option<usize>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checked: 0,
            skipped: 0,
            worst: f64::NEG_INFINITY,
            first_violation: None,
        }
    }

    /// Record `excess` (positive means the claim failed by that much)
    /// against `slack`.
    fn record(&mut self, step: usize, excess: f64, slack: f64) {
        self.checked += 1;
        self.worst = self.worst.max(excess - slack);
        if excess > slack && self.first_violation.is_none() {
            self.first_violation = Some(step);
        }
    }

    /// `new <= old` expected.
    fn non_increasing(&mut self, step: usize, old: f64, new: f64, scale: f64) {
        self.record(step, new - old, MONOTONICITY_SLACK * scale);
    }

    /// `new >= old` expected.
    fn non_decreasing(&mut self, step: usize, old: f64, new: f64, scale: f64) {
        self.record(step, old - new, MONOTONICITY_SLACK * scale);
    }

    fn into_verdict(self, claim: Claim) -> Verdict {
        let status = if self.checked == 0 {
            Status::NotApplicable
        } else if self.first_violation.is_some() {
            Status::Violated
        } else {
            Status::Holds
        };
        Verdict {
            claim,
            status,
            checked: self.checked,
            skipped: self.skipped,
            worst_excess: if self.checked == 0 { 0.0 } else { self.worst },
            first_violation: self.first_violation,
        }
    }
}

fn extreme_pair(v: &[f64]) -> Option<(f64, f64)> {
    (!v.is_empty()).then(|| (v[0], v[v.len() - 1]))
}

/// Evaluate every [`Claim`] along `chain`, whose networks must be nested
/// (each a subset of the next).
pub fn monotonicity_report(chain: &[ChainStep]) -> Result<MonotonicityReport> {
    for (k, w) in chain.windows(2).enumerate() {
        if !w[0].network.is_subset_of(&w[1].network) {
            return Err(Error::NotNested { step: k + 1 });
        }
    }
    let mut t: std::collections::HashMap<Claim, Tally> = Claim::ALL.iter().map(|&c| (c, Tally::new())).collect();

    for (k, step) in chain.iter().enumerate() {
        let b3 = bounds_a3(&step.summary);
        let b2 = bounds_a2(&step.summary);
        let scale = step.a3.norm().max(1.0);
        t.get_mut(&Claim::A2PositiveInsideA3).expect("claim").record(
            k,
            (b3.positive.lo - b2.positive.lo).max(b2.positive.hi - b3.positive.hi),
            MONOTONICITY_SLACK * scale,
        );
    }

    for (k, w) in chain.windows(2).enumerate() {
        let step = k + 1;
        let (a, b) = (&w[0], &w[1]);
        let (sa, sb) = (&a.summary, &b.summary);
        let diagonal = a.diagonal_r && b.diagonal_r;

        let gram_scale = sb.theta_max.powi(2).max(1.0);
        let l1 = t.get_mut(&Claim::ThetaGrows).expect("claim");
        l1.non_decreasing(step, sa.theta_min.powi(2), sb.theta_min.powi(2), gram_scale);
        l1.non_decreasing(step, sa.theta_max.powi(2), sb.theta_max.powi(2), gram_scale);

        // With no observations R is empty and has no extremes.
        if a.network.p() > 0 {
            let l2 = t.get_mut(&Claim::RhoSpreads).expect("claim");
            l2.non_increasing(step, sa.rho_min, sb.rho_min, sb.rho_max);
            l2.non_decreasing(step, sa.rho_max, sb.rho_max, sb.rho_max);
        } else {
            t.get_mut(&Claim::RhoSpreads).expect("claim").skipped += 1;
        }

        let l3 = t.get_mut(&Claim::NuMaxGrows).expect("claim");
        if diagonal {
            l3.non_decreasing(step, sa.nu_max, sb.nu_max, sb.nu_max.max(1.0));
        } else {
            l3.skipped += 1;
        }

        if a.network.p() > 0 {
            let scale = a.a3.norm().max(b.a3.norm());
            let th3 = t.get_mut(&Claim::A3Extremes).expect("claim");
            if let (Some(na), Some(nb)) = (extreme_pair(a.a3.negative()), extreme_pair(b.a3.negative())) {
                th3.non_increasing(step, na.0, nb.0, scale);
                th3.non_increasing(step, na.1, nb.1, scale);
            }
            if let (Some(pa), Some(pb)) = (extreme_pair(a.a3.positive()), extreme_pair(b.a3.positive())) {
                th3.non_increasing(step, pa.0, pb.0, scale);
                th3.non_decreasing(step, pa.1, pb.1, scale);
            }
        } else {
            t.get_mut(&Claim::A3Extremes).expect("claim").skipped += 1;
        }

        let th5 = t.get_mut(&Claim::A2Extremes).expect("claim");
        if diagonal && a.network.p() > 0 {
            let scale = a.a2.norm().max(b.a2.norm());
            if let (Some(na), Some(nb)) = (extreme_pair(a.a2.negative()), extreme_pair(b.a2.negative())) {
                th5.non_increasing(step, na.0, nb.0, scale);
                th5.non_increasing(step, na.1, nb.1, scale);
            }
            if let (Some(pa), Some(pb)) = (extreme_pair(a.a2.positive()), extreme_pair(b.a2.positive())) {
                th5.non_increasing(step, pa.0, pb.0, scale);
                th5.non_increasing(step, pa.1, pb.1, scale);
            }
        } else {
            th5.skipped += 1;
        }

        let th7 = t.get_mut(&Claim::A1Eigenvalues).expect("claim");
        if diagonal {
            let scale = a.a1.norm().max(b.a1.norm());
            for (&x, &y) in a.a1.values().iter().zip(b.a1.values()) {
                th7.non_decreasing(step, x, y, scale);
            }
        } else {
            th7.skipped += 1;
        }

        let (b3a, b3b) = (bounds_a3(sa), bounds_a3(sb));
        let (b2a, b2b) = (bounds_a2(sa), bounds_a2(sb));
        let scale3 = b3b.positive.hi.abs().max(b3b.negative.map_or(0.0, |i| i.lo.abs()));
        let c1 = t.get_mut(&Claim::A3PositiveBoundsWiden).expect("claim");
        if a.network.p() > 0 {
            c1.non_increasing(step, b3a.positive.lo, b3b.positive.lo, scale3);
            c1.non_decreasing(step, b3a.positive.hi, b3b.positive.hi, scale3);
        } else {
            c1.skipped += 1;
        }

        let c2 = t.get_mut(&Claim::A3NegativeBoundsMoveOut).expect("claim");
        let (na, nb) = (b3a.negative.expect("A3"), b3b.negative.expect("A3"));
        let tau_max_is_psi = |s: &SpectralSummary| s.tau_max == s.psi_max && s.psi_max > s.rho_max;
        let tau_min_is_psi = |s: &SpectralSummary| s.tau_min == s.psi_min && s.psi_min < s.rho_min;
        if a.network.p() > 0 && tau_max_is_psi(sa) && tau_max_is_psi(sb) {
            c2.non_increasing(step, na.hi, nb.hi, scale3);
        } else {
            c2.skipped += 1;
        }
        if a.network.p() > 0 && tau_min_is_psi(sa) && tau_min_is_psi(sb) {
            c2.non_increasing(step, na.lo, nb.lo, scale3);
        } else {
            c2.skipped += 1;
        }

        let c5 = t.get_mut(&Claim::A2NegativeUpperMovesOut).expect("claim");
        let (ba, bb) = (b2a.betas.expect("A2"), b2b.betas.expect("A2"));
        let scale2 = b2b.negative.expect("A2").lo.abs();
        if a.network.p() > 0 && ba.decided_by != BetaTerm::Beta2 && bb.decided_by != BetaTerm::Beta2 {
            c5.non_increasing(step, ba.upper(), bb.upper(), scale2);
        } else {
            c5.skipped += 1;
        }

        let c6 = t.get_mut(&Claim::A2NegativeLowerMovesOut).expect("claim");
        if diagonal {
            c6.non_increasing(
                step,
                b2a.negative.expect("A2").lo,
                b2b.negative.expect("A2").lo,
                scale2,
            );
        } else {
            c6.skipped += 1;
        }

        let (b1a, b1b) = (bounds_a1(sa), bounds_a1(sb));
        t.get_mut(&Claim::A1UpperBoundGrows).expect("claim").non_decreasing(
            step,
            b1a.positive.hi,
            b1b.positive.hi,
            b1b.positive.hi,
        );
    }

    let verdicts = Claim::ALL
        .iter()
        .map(|c| t.remove(c).expect("claim").into_verdict(*c))
        .collect();
    Ok(MonotonicityReport {
        steps: chain.len(),
        verdicts,
    })
}
