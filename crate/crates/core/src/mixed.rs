//! Mixed volumes by interpolation of the volume polynomial and by polarization.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::VPolytope;
use crate::linalg;
use crate::report::CheckReport;
use crate::scalar::{binomial, factorial, Mode, Scalar};

/// Largest dimension accepted by the polarization formula.
pub const POLARIZATION_MAX_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Interpolation,
    Polarization,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplicities {
    /// `j` copies of the first body and `n - j` of the second.
    Pair(usize, usize),
    /// One copy of each listed body.
    General(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedVolumeResult<S> {
    pub value: S,
    pub method: Method,
    pub bodies: Vec<String>,
    pub multiplicities: Multiplicities,
    /// Infinity-norm condition number of the interpolation system (float mode).
    pub condition_estimate: Option<f64>,
}

fn scaled_sum<S: Scalar>(k: &VPolytope<S>, s: &S, t: &VPolytope<S>) -> Result<S> {
    if s.is_zero_tol(0.0) {
        return Ok(t.volume());
    }
    let mut pts = Vec::with_capacity(k.num_vertices() * t.num_vertices());
    for a in k.vertices() {
        for b in t.vertices() {
            pts.push(a.iter().zip(b).map(|(x, y)| x.clone() * s + y).collect());
        }
    }
    Ok(VPolytope::convex_hull_in(k.dim(), &pts)?.volume())
}

fn interpolation_nodes<S: Scalar>(n: usize) -> Vec<S> {
    match S::MODE {
        Mode::Exact => (0..=n).map(|i| S::from_i64(i as i64)).collect(),
        Mode::Float => (0..=n)
            .map(|i| {
                let c = ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * (n + 1)) as f64).cos();
                S::from_f64((1.0 - c) / 2.0)
            })
            .collect(),
    }
}

/// All mixed volumes `V(K[j], T[n-j])` for `j = 0..=n`, plus the interpolation
/// condition number in float mode.
pub fn mixed_volume_profile<S: Scalar>(k: &VPolytope<S>, t: &VPolytope<S>) -> Result<(Vec<S>, Option<f64>)> {
    if k.dim() != t.dim() {
        return Err(GeomError::DimensionMismatch(k.dim(), t.dim()));
    }
    let n = k.dim();
    let nodes = interpolation_nodes::<S>(n);
    let vander: Vec<Vec<S>> = nodes.iter().map(|s| (0..=n).map(|p| s.powi(p as u32)).collect()).collect();
    let values = nodes.iter().map(|s| scaled_sum(k, s, t)).collect::<Result<Vec<S>>>()?;
    let coeffs = linalg::solve(&vander, &values, 0.0)
        .ok_or_else(|| GeomError::InvalidArgument("singular interpolation system".into()))?;
    let cond = match S::MODE {
        Mode::Exact => None,
        Mode::Float => {
            let m: Vec<Vec<f64>> = vander.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect();
            Some(linalg::condition_number(&m))
        }
    };
    let out = coeffs
        .into_iter()
        .enumerate()
        .map(|(j, c)| c / &binomial::<S>(n as u32, j as u32))
        .collect();
    Ok((out, cond))
}

/// `V(K[j], T[n-j])` from the volume polynomial `s -> Vol(sK + T)`.
pub fn mixed_volume_pair<S: Scalar>(k: &VPolytope<S>, t: &VPolytope<S>, j: usize) -> Result<MixedVolumeResult<S>> {
    let n = k.dim();
    if j > n {
        return Err(GeomError::InvalidArgument(format!("multiplicity {j} exceeds dimension {n}")));
    }
    let (profile, cond) = mixed_volume_profile(k, t)?;
    Ok(MixedVolumeResult {
        value: profile[j].clone(),
        method: Method::Interpolation,
        bodies: vec!["K".into(), "T".into()],
        multiplicities: Multiplicities::Pair(j, n - j),
        condition_estimate: cond,
    })
}

/// `V(K_1, ..., K_n)` by inclusion–exclusion over all nonempty Minkowski sums.
pub fn mixed_volume_general<S: Scalar>(bodies: &[VPolytope<S>]) -> Result<MixedVolumeResult<S>> {
    let n = bodies.len();
    if n == 0 || n > POLARIZATION_MAX_DIM {
        return Err(GeomError::UnsupportedDimension(n));
    }
    if let Some(b) = bodies.iter().find(|b| b.dim() != n) {
        return Err(GeomError::DimensionMismatch(n, b.dim()));
    }
    let mut acc = S::zero();
    for mask in 1usize..(1 << n) {
        let members: Vec<&VPolytope<S>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| &bodies[i]).collect();
        let mut sum = members[0].clone();
        for b in &members[1..] {
            sum = sum.minkowski_sum(b)?;
        }
        let vol = sum.volume();
        if (n - members.len()).is_multiple_of(2) {
            acc = acc + &vol;
        } else {
            acc = acc - &vol;
        }
    }
    Ok(MixedVolumeResult {
        value: acc / &factorial::<S>(n as u32),
        method: Method::Polarization,
        bodies: (1..=n).map(|i| format!("K{i}")).collect(),
        multiplicities: Multiplicities::General(n),
        condition_estimate: None,
    })
}

/// `V(K[j], T[n-j])` through [`mixed_volume_general`] with repeated arguments.
pub fn mixed_volume_pair_polarized<S: Scalar>(
    k: &VPolytope<S>,
    t: &VPolytope<S>,
    j: usize,
) -> Result<MixedVolumeResult<S>> {
    let n = k.dim();
    if j > n {
        return Err(GeomError::InvalidArgument(format!("multiplicity {j} exceeds dimension {n}")));
    }
    let mut list = vec![k.clone(); j];
    list.extend(std::iter::repeat_n(t.clone(), n - j));
    let mut r = mixed_volume_general(&list)?;
    r.bodies = vec!["K".into(), "T".into()];
    r.multiplicities = Multiplicities::Pair(j, n - j);
    Ok(r)
}

/// The bound `n^n / (j^j (n-j)^(n-j))` on `V(K[j], -K[n-j]) / Vol(K)`.
pub fn proved_bound<S: Scalar>(n: usize, j: usize) -> S {
    let p = |b: usize, e: usize| S::from_i64(b as i64).powi(e as u32);
    p(n, n) / &(p(j, j) * &p(n - j, n - j))
}

/// Compares `V(K[j], -K[n-j]) / Vol(K)` with the proved bound; the binomial
/// value (conjectured sharp bound) is recorded in the metadata.
pub fn godbersen_ratio<S: Scalar>(k: &VPolytope<S>, j: usize) -> Result<CheckReport> {
    let n = k.dim();
    if j == 0 || j >= n {
        return Err(GeomError::InvalidArgument(format!("need 1 <= j <= n-1, got j = {j}, n = {n}")));
    }
    let (profile, cond) = mixed_volume_profile(k, &k.reflect())?;
    Ok(godbersen_report(k, &profile, j, cond))
}

/// All `j` at once, sharing one interpolation.
pub fn godbersen_ratios<S: Scalar>(k: &VPolytope<S>) -> Result<Vec<CheckReport>> {
    let (profile, cond) = mixed_volume_profile(k, &k.reflect())?;
    Ok((1..k.dim()).map(|j| godbersen_report(k, &profile, j, cond)).collect())
}

fn godbersen_report<S: Scalar>(k: &VPolytope<S>, profile: &[S], j: usize, cond: Option<f64>) -> CheckReport {
    let n = k.dim();
    let vol = k.volume();
    let lhs = profile[j].clone() / &vol;
    let conj = binomial::<S>(n as u32, j as u32);
    let conj_ratio = (lhs.clone() / &conj).to_f64();
    let holds = CheckReport::le("conjecture", &lhs, &conj).pass;
    let mut rep = CheckReport::le("godbersen-bound", &lhs, &proved_bound::<S>(n, j))
        .with_meta("n", n)
        .with_meta("j", j)
        .with_meta("rhs_conjectured", conj.to_f64())
        .with_meta("conjecture_ratio", conj_ratio)
        .with_meta("conjecture_holds", holds);
    if let Some(c) = cond {
        rep = rep.with_meta("condition_estimate", c);
    }
    rep
}

/// `Vol(K - K) / Vol(K)` against `C(2n, n)`, with the expansion
/// `Vol(K - K) = sum_j C(n, j) V(K[j], -K[n-j])` recorded as `expansion_holds`.
pub fn difference_body_check<S: Scalar>(k: &VPolytope<S>) -> Result<CheckReport> {
    let n = k.dim();
    let minus = k.reflect();
    let diff = k.minkowski_sum(&minus)?.volume();
    let (profile, _) = mixed_volume_profile(k, &minus)?;
    let mut expansion = S::zero();
    for (j, v) in profile.iter().enumerate() {
        expansion = expansion + &(binomial::<S>(n as u32, j as u32) * v);
    }
    let identity = CheckReport::eq("expansion", &diff, &expansion);
    let vol = k.volume();
    let rep = CheckReport::le("difference-body", &(diff / &vol), &binomial::<S>(2 * n as u32, n as u32))
        .with_meta("n", n)
        .with_meta("expansion_holds", identity.pass)
        .with_meta("expansion_value", expansion.to_f64() / vol.to_f64());
    Ok(rep)
}

/// The links of the proof of the bound for a body containing the origin:
///
/// 1. `V(K[j], -K[n-j]) <= Vol((1-l)K v -lK) / ((1-l)^j l^(n-j))` with `l = (n-j)/n`,
/// 2. `Vol((1-l)K v -lK) <= Vol(K)`,
/// 3. `V(K[j], -K[n-j]) <= n^min(j, n-j) Vol(K)` (only asserted when `K` is centered).
pub fn godbersen_proof_chain<S: Scalar>(k: &VPolytope<S>, j: usize) -> Result<Vec<CheckReport>> {
    let n = k.dim();
    if j == 0 || j >= n {
        return Err(GeomError::InvalidArgument(format!("need 1 <= j <= n-1, got j = {j}, n = {n}")));
    }
    if !k.contains_origin() {
        return Err(GeomError::OriginNotContained);
    }
    let minus = k.reflect();
    let mv = mixed_volume_pair(k, &minus, j)?.value;
    let lam = S::from_ratio((n - j) as i64, n as i64);
    let one_minus = S::one() - &lam;
    let joined = k.scale(&one_minus)?.hull_union(&minus.scale(&lam)?)?.volume();
    let weight = one_minus.powi(j as u32) * &lam.powi((n - j) as u32);
    let vol = k.volume();
    let mut out = vec![
        CheckReport::le("chain-mixed-vs-hull", &mv, &(joined.clone() / &weight)).with_meta("j", j),
        CheckReport::le("chain-hull-vs-body", &joined, &vol).with_meta("j", j),
    ];
    let centroid = k.centroid();
    if centroid.iter().all(|c| c.is_zero_tol(1e-9)) {
        let m = j.min(n - j) as u32;
        out.push(
            CheckReport::le("chain-min-bound", &mv, &(S::from_i64(n as i64).powi(m) * &vol)).with_meta("j", j),
        );
    }
    Ok(out)
}
