//! Sample paths of the compound Poisson surplus process and the treaty
//! functionals on them.
//!
//! The retained loss D(t) = A(t) - R(t) is a nondecreasing pure-jump process
//! for both treaties (LCR retains everything but the running top r; ECOMOR
//! retains sum_i min(X_i, X_(r+1)) once r+1 claims have arrived). Between
//! arrivals the surplus drifts linearly, so the supremum of A(t) - q t - R(t)
//! over [0, T] is attained at an arrival epoch, at t = 0, or at t = T; the
//! evaluation below scans exactly those candidates and is exact.

use std::io::Write;

use crate::claims::ClaimModel;
use crate::error::Error;
use crate::rng::Stream;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreatyKind {
    Lcr,
    Ecomor,
}

impl TreatyKind {
    pub fn label(&self) -> &'static str {
        match self {
            TreatyKind::Lcr => "lcr",
            TreatyKind::Ecomor => "ecomor",
        }
    }
}

/// Treaty kind plus the number of reinsured claims r (r = 0 means no
/// reinsurance for either treaty).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreatySpec {
    pub kind: TreatyKind,
    pub r: usize,
}

impl TreatySpec {
    pub fn new(kind: TreatyKind, r: usize) -> Self {
        TreatySpec { kind, r }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Claim {
    pub epoch: f64,
    pub size: f64,
}

/// One realization on [0, horizon]: claims sorted by strictly increasing
/// epoch in (0, horizon], all sizes positive.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SamplePath {
    pub horizon: f64,
    pub claims: Vec<Claim>,
}

impl SamplePath {
    pub fn new(horizon: f64, claims: Vec<Claim>) -> Result<Self> {
        let p = SamplePath { horizon, claims };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) {
            return Err(Error::domain("path horizon must be positive"));
        }
        let mut prev = 0.0;
        for c in &self.claims {
            if !(c.epoch > prev) || c.epoch > self.horizon {
                return Err(Error::domain(format!(
                    "epochs must be strictly increasing in (0, horizon], got {}",
                    c.epoch
                )));
            }
            if !(c.size > 0.0) {
                return Err(Error::domain(format!("claim sizes must be positive, got {}", c.size)));
            }
            prev = c.epoch;
        }
        Ok(())
    }
}

/// Bounded min-heap holding the `cap` largest claim sizes seen so far,
/// together with their running sum. Push is O(log cap), so a whole path
/// costs O(N log(r+2)).
#[derive(Debug, Clone)]
struct TopClaims {
    cap: usize,
    heap: Vec<f64>,
    sum: f64,
}

impl TopClaims {
    fn new(cap: usize) -> Self {
        TopClaims {
            cap,
            heap: Vec::with_capacity(cap.min(1024)),
            sum: 0.0,
        }
    }

    #[inline]
    fn len(&self) -> usize {
        self.heap.len()
    }

    /// Smallest of the retained top values, i.e. the (cap)-th largest claim
    /// once the heap is full.
    #[inline]
    fn min(&self) -> f64 {
        self.heap[0]
    }

    #[inline]
    fn push(&mut self, x: f64) {
        if self.heap.len() < self.cap {
            self.sum += x;
            self.heap.push(x);
            let mut i = self.heap.len() - 1;
            while i > 0 {
                let parent = (i - 1) / 2;
                if self.heap[parent] <= self.heap[i] {
                    break;
                }
                self.heap.swap(parent, i);
                i = parent;
            }
        } else if x > self.heap[0] {
            self.sum += x - self.heap[0];
            self.heap[0] = x;
            let mut i = 0;
            loop {
                let (l, r) = (2 * i + 1, 2 * i + 2);
                let mut smallest = i;
                if l < self.heap.len() && self.heap[l] < self.heap[smallest] {
                    smallest = l;
                }
                if r < self.heap.len() && self.heap[r] < self.heap[smallest] {
                    smallest = r;
                }
                if smallest == i {
                    break;
                }
                self.heap.swap(i, smallest);
                i = smallest;
            }
        }
    }
}

/// Generate one unconditional path: Poisson(lambda * horizon) claims, epochs
/// sorted iid uniforms on (0, horizon], sizes iid from the model.
pub fn generate_path(
    rng: &mut Stream,
    lambda: f64,
    horizon: f64,
    model: &ClaimModel,
) -> SamplePath {
    let mut path = SamplePath::default();
    generate_path_into(rng, lambda, horizon, model, &mut path);
    path
}

/// Same as [`generate_path`] but reuses the allocation of `out`.
pub fn generate_path_into(
    rng: &mut Stream,
    lambda: f64,
    horizon: f64,
    model: &ClaimModel,
    out: &mut SamplePath,
) {
    debug_assert!(lambda > 0.0 && horizon > 0.0);
    let count = rng.poisson(lambda * horizon);
    out.horizon = horizon;
    out.claims.clear();
    out.claims.reserve(count as usize);
    for _ in 0..count {
        let epoch = horizon * rng.uniform_oc();
        let size = model.sample(rng);
        out.claims.push(Claim { epoch, size });
    }
    sort_by_epoch(&mut out.claims);
}

/// Sort claims chronologically. Positive finite f64 epochs order identically
/// to their IEEE bit patterns, which lets the sort run on u64 keys.
pub(crate) fn sort_by_epoch(claims: &mut [Claim]) {
    claims.sort_unstable_by_key(|c| c.epoch.to_bits());
}

#[inline]
fn retained_after(total: f64, top: &TopClaims, treaty: &TreatySpec) -> f64 {
    let n = top.len();
    if n <= treaty.r {
        return 0.0; // reinsurer pays everything while at most r claims exist
    }
    match treaty.kind {
        TreatyKind::Lcr => total - (top.sum - top.min()),
        TreatyKind::Ecomor => total - (top.sum - (treaty.r as f64 + 1.0) * top.min()),
    }
}

/// Reinsured amount R(t_i) just after each arrival.
///
/// LCR: sum of the r largest claims so far (all of them if fewer than r).
/// ECOMOR: sum of (X_j - X_(r+1))_+ with retention zero while at most r
/// claims have arrived; the retention increase can shrink R between epochs.
pub fn reinsured_series(path: &SamplePath, treaty: &TreatySpec) -> Vec<(f64, f64)> {
    let mut top = TopClaims::new(treaty.r + 1);
    let mut total = 0.0;
    let mut out = Vec::with_capacity(path.claims.len());
    for c in &path.claims {
        total += c.size;
        top.push(c.size);
        let retained = retained_after(total, &top, treaty);
        out.push((c.epoch, total - retained));
    }
    out
}

/// Exact supremum of A(t) - q t - R(t) over t in [0, horizon].
pub fn ruin_functional(path: &SamplePath, treaty: &TreatySpec, premium_rate: f64) -> f64 {
    let mut top = TopClaims::new(treaty.r + 1);
    let mut total = 0.0;
    let mut retained = 0.0;
    let mut best = 0.0f64; // t = 0 candidate
    for c in &path.claims {
        total += c.size;
        top.push(c.size);
        retained = retained_after(total, &top, treaty);
        let cand = retained - premium_rate * c.epoch;
        if cand > best {
            best = cand;
        }
    }
    let endpoint = retained - premium_rate * path.horizon;
    if endpoint > best {
        best = endpoint;
    }
    best
}

/// Ruin indicator: true iff the loss process reaches the initial capital u.
/// Short-circuits at the first epoch whose candidate already crosses; the
/// verdict is identical to evaluating the full supremum because D(t) is
/// nondecreasing.
pub fn is_ruin(path: &SamplePath, treaty: &TreatySpec, premium_rate: f64, u: f64) -> bool {
    debug_assert!(u >= 0.0);
    let mut top = TopClaims::new(treaty.r + 1);
    let mut total = 0.0;
    let mut retained = 0.0;
    if 0.0 >= u {
        return true;
    }
    for c in &path.claims {
        total += c.size;
        top.push(c.size);
        retained = retained_after(total, &top, treaty);
        if retained - premium_rate * c.epoch >= u {
            return true;
        }
    }
    retained - premium_rate * path.horizon >= u
}

/// Closed-form value of the scaled ruin functional on a step path with
/// k <= r+1 jumps (the minimal configurations of the rate-function lemma),
/// used as an independent oracle against [`ruin_functional`].
///
/// With c_+ = max(c, 0), c_- = max(-c, 0) and jump sizes y_1 >= ... >= y_k
/// at distinct times in (0, 1):
///   k <= r          ->  c_-           (all jumps are absorbed by the treaty)
///   k = r + 1, LCR  ->  max(y_(r+1) - c_+ t_max + c_-, c_-)
///   k = r + 1, ECOM ->  max((r+1) y_(r+1) - c_+ t_max + c_-, c_-)
/// The outer max is the t = 0 / pre-jump part of the supremum, which the
/// closed form omits on the hitting set where it is never binding.
pub fn step_path_phi_oracle(
    sizes_desc: &[f64],
    times: &[f64],
    r: usize,
    c: f64,
    kind: TreatyKind,
) -> Result<f64> {
    let k = sizes_desc.len();
    if k != times.len() {
        return Err(Error::domain("sizes and times must have equal length"));
    }
    if k > r + 1 {
        return Err(Error::domain(
            "the closed form is stated only for k <= r+1 jumps",
        ));
    }
    for w in sizes_desc.windows(2) {
        if w[0] < w[1] {
            return Err(Error::domain("sizes must be nonincreasing"));
        }
    }
    if sizes_desc.last().is_some_and(|&y| y <= 0.0) {
        return Err(Error::domain("jump sizes must be positive"));
    }
    for (i, &t) in times.iter().enumerate() {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::domain("times must lie in (0, 1)"));
        }
        if times[..i].contains(&t) {
            return Err(Error::domain("times must be distinct"));
        }
    }
    let c_plus = c.max(0.0);
    let c_minus = (-c).max(0.0);
    if k <= r {
        return Ok(c_minus);
    }
    let t_max = times.iter().fold(0.0f64, |m, &t| m.max(t));
    let y = sizes_desc[r];
    let jump = match kind {
        TreatyKind::Lcr => y,
        TreatyKind::Ecomor => (r as f64 + 1.0) * y,
    };
    Ok((jump - c_plus * t_max + c_minus).max(c_minus))
}

/// Debug dump: one CSV line per arrival with the running aggregate claim
/// amount, reinsured amount and net loss A - q t - R.
pub fn dump_path_csv<W: Write>(
    path: &SamplePath,
    treaty: &TreatySpec,
    premium_rate: f64,
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "epoch,size,A,R,loss")?;
    let mut top = TopClaims::new(treaty.r + 1);
    let mut total = 0.0;
    for c in &path.claims {
        total += c.size;
        top.push(c.size);
        let retained = retained_after(total, &top, treaty);
        let reinsured = total - retained;
        writeln!(
            out,
            "{},{},{},{},{}",
            crate::fmt_e(c.epoch),
            crate::fmt_e(c.size),
            crate::fmt_e(total),
            crate::fmt_e(reinsured),
            crate::fmt_e(retained - premium_rate * c.epoch),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcr(r: usize) -> TreatySpec {
        TreatySpec::new(TreatyKind::Lcr, r)
    }

    fn ecomor(r: usize) -> TreatySpec {
        TreatySpec::new(TreatyKind::Ecomor, r)
    }

    fn path_of(horizon: f64, events: &[(f64, f64)]) -> SamplePath {
        SamplePath::new(
            horizon,
            events
                .iter()
                .map(|&(epoch, size)| Claim { epoch, size })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn validate_rejects_bad_paths() {
        assert!(SamplePath::new(1.0, vec![Claim { epoch: 0.0, size: 1.0 }]).is_err());
        assert!(SamplePath::new(1.0, vec![Claim { epoch: 1.5, size: 1.0 }]).is_err());
        assert!(SamplePath::new(
            1.0,
            vec![
                Claim { epoch: 0.5, size: 1.0 },
                Claim { epoch: 0.5, size: 2.0 }
            ]
        )
        .is_err());
        assert!(SamplePath::new(1.0, vec![Claim { epoch: 0.5, size: 0.0 }]).is_err());
    }

    #[test]
    fn reinsured_series_empty_path() {
        let p = path_of(1.0, &[]);
        assert!(reinsured_series(&p, &lcr(2)).is_empty());
    }

    #[test]
    fn reinsured_series_lcr_top1() {
        let p = path_of(1.0, &[(0.1, 5.0), (0.2, 3.0)]);
        let s = reinsured_series(&p, &lcr(1));
        assert_eq!(s, vec![(0.1, 5.0), (0.2, 5.0)]);
    }

    #[test]
    fn reinsured_series_ecomor_retention_can_cut_r_both_ways() {
        // claims 5, 3, 4: retention X_(2) moves 0 -> 3 -> 4 and R moves 5 -> 2 -> 1
        let p = path_of(1.0, &[(0.1, 5.0), (0.2, 3.0), (0.3, 4.0)]);
        let s = reinsured_series(&p, &ecomor(1));
        let values: Vec<f64> = s.iter().map(|x| x.1).collect();
        assert_eq!(values, vec![5.0, 2.0, 1.0]);
    }

    #[test]
    fn ecomor_equals_lcr_for_r0() {
        // r = 0 means no reinsurance under either treaty
        let p = path_of(1.0, &[(0.2, 7.0), (0.6, 2.0)]);
        for treaty in [lcr(0), ecomor(0)] {
            let s = reinsured_series(&p, &treaty);
            assert!(s.iter().all(|x| x.1 == 0.0), "{treaty:?}");
        }
    }

    #[test]
    fn ruin_functional_empty_path_is_drift_only() {
        let p = path_of(2.0, &[]);
        assert_eq!(ruin_functional(&p, &lcr(1), 3.0), 0.0);
        assert_eq!(ruin_functional(&p, &lcr(1), -3.0), 6.0);
    }

    #[test]
    fn ruin_functional_lemma_example() {
        // jumps 10 at t=0.2 and 8 at t=0.5, drift 4, horizon 1
        let p = path_of(1.0, &[(0.2, 10.0), (0.5, 8.0)]);
        assert_eq!(ruin_functional(&p, &lcr(1), 4.0), 6.0);
        assert_eq!(ruin_functional(&p, &ecomor(1), 4.0), 14.0);
    }

    #[test]
    fn is_ruin_thresholds() {
        let p = path_of(1.0, &[(0.2, 10.0), (0.5, 8.0)]);
        assert!(is_ruin(&p, &lcr(1), 4.0, 5.0));
        assert!(!is_ruin(&p, &lcr(1), 4.0, 7.0));
        assert!(is_ruin(&p, &lcr(1), 4.0, 0.0));
        // single claim fully reinsured: no ruin for any positive capital
        let single = path_of(1.0, &[(0.3, 50.0)]);
        assert!(!is_ruin(&single, &lcr(1), 4.0, 1e-9));
    }

    #[test]
    fn short_circuit_matches_full_evaluation() {
        let mut rng = Stream::new(11);
        let model = ClaimModel::shifted_pareto(1.5).unwrap();
        for i in 0..500 {
            let path = generate_path(&mut rng, 6.0, 3.0, &model);
            let treaty = if i % 2 == 0 { lcr(i % 4) } else { ecomor(i % 4) };
            let q = (i % 7) as f64 - 3.0;
            let u = (i % 9) as f64 + 0.25;
            let phi = ruin_functional(&path, &treaty, q);
            assert_eq!(is_ruin(&path, &treaty, q, u), phi >= u);
        }
    }

    #[test]
    fn step_path_oracle_examples() {
        // k <= r collapses to c_-
        assert_eq!(
            step_path_phi_oracle(&[10.0], &[0.3], 1, 4.0, TreatyKind::Lcr).unwrap(),
            0.0
        );
        assert_eq!(
            step_path_phi_oracle(&[10.0], &[0.3], 1, -4.0, TreatyKind::Lcr).unwrap(),
            4.0
        );
        let v = step_path_phi_oracle(&[10.0, 8.0], &[0.2, 0.5], 1, 4.0, TreatyKind::Lcr).unwrap();
        assert_eq!(v, 6.0);
        let v =
            step_path_phi_oracle(&[10.0, 8.0], &[0.2, 0.5], 1, 4.0, TreatyKind::Ecomor).unwrap();
        assert_eq!(v, 14.0);
        assert!(step_path_phi_oracle(&[1.0, 2.0], &[0.2, 0.5], 1, 0.0, TreatyKind::Lcr).is_err());
        assert!(step_path_phi_oracle(&[3.0, 2.0, 1.0], &[0.1, 0.2, 0.3], 1, 0.0, TreatyKind::Lcr)
            .is_err());
    }

    #[test]
    fn oracle_matches_functional_on_random_step_paths() {
        let mut rng = Stream::new(42);
        let model = ClaimModel::shifted_pareto(1.5).unwrap();
        for case in 0..20_000 {
            let r = case % 4;
            let kind = if case % 2 == 0 {
                TreatyKind::Lcr
            } else {
                TreatyKind::Ecomor
            };
            let k = (rng.next_u64() % (r as u64 + 2)) as usize; // 0..=r+1
            let c = (rng.uniform_co() - 0.5) * 10.0;
            let mut sizes: Vec<f64> = (0..k)
                .map(|_| (model.sample(&mut rng) + 0.01).min(1e3))
                .collect();
            sizes.sort_unstable_by(|a, b| b.total_cmp(a));
            let mut times: Vec<f64> = Vec::with_capacity(k);
            while times.len() < k {
                let t = 0.999 * rng.uniform_oc();
                if !times.contains(&t) {
                    times.push(t);
                }
            }
            let oracle = step_path_phi_oracle(&sizes, &times, r, c, kind).unwrap();
            let mut claims: Vec<Claim> = sizes
                .iter()
                .zip(&times)
                .map(|(&size, &epoch)| Claim { epoch, size })
                .collect();
            sort_by_epoch(&mut claims);
            let path = SamplePath::new(1.0, claims).unwrap();
            let got = ruin_functional(&path, &TreatySpec::new(kind, r), c);
            assert!(
                (got - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()),
                "case {case}: r={r} kind={kind:?} c={c} k={k}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn functional_matches_dense_grid_scan() {
        // brute force: evaluate A(t) - q t - R(t) on a dense grid plus all
        // epochs, using an independent O(N^2 log N) re-evaluation at each t
        let model = ClaimModel::shifted_pareto(1.5).unwrap();
        let mut rng = Stream::new(5150);
        for case in 0..12 {
            let path = generate_path(&mut rng, 10.0, 2.5, &model);
            if path.claims.len() > 50 || path.claims.is_empty() {
                continue;
            }
            let r = case % 4;
            let treaty = if case % 2 == 0 { lcr(r) } else { ecomor(r) };
            let q = [3.0, -2.0, 0.0, 17.0][case % 4];
            let eval_at = |t: f64| -> f64 {
                let mut sizes: Vec<f64> = path
                    .claims
                    .iter()
                    .filter(|c| c.epoch <= t)
                    .map(|c| c.size)
                    .collect();
                sizes.sort_unstable_by(|a, b| b.total_cmp(a));
                let total: f64 = sizes.iter().sum();
                let reins = match treaty.kind {
                    TreatyKind::Lcr => sizes.iter().take(r).sum::<f64>(),
                    TreatyKind::Ecomor => {
                        let retention = if sizes.len() > r { sizes[r] } else { 0.0 };
                        sizes.iter().map(|x| (x - retention).max(0.0)).sum()
                    }
                };
                total - reins - q * t
            };
            let mut best = 0.0f64;
            let grid = 100_000;
            for i in 0..=grid {
                best = best.max(eval_at(path.horizon * i as f64 / grid as f64));
            }
            for c in &path.claims {
                best = best.max(eval_at(c.epoch));
            }
            let got = ruin_functional(&path, &treaty, q);
            assert!(
                (got - best).abs() < 1e-9 * (1.0 + best.abs()),
                "case {case}: {got} vs grid {best}"
            );
        }
    }

    #[test]
    fn ecomor_identity_on_random_multisets() {
        // sum of top r minus r times the (r+1)-st largest equals
        // sum of positive parts of (X_i - X_(r+1))
        let model = ClaimModel::shifted_pareto(1.5).unwrap();
        let mut rng = Stream::new(314);
        for case in 0..20_000 {
            let r = case % 5;
            let n = 1 + (rng.next_u64() % 12) as usize;
            let xs: Vec<f64> = (0..n).map(|_| model.sample(&mut rng)).collect();
            let mut sorted = xs.clone();
            sorted.sort_unstable_by(|a, b| b.total_cmp(a));
            let retention = if sorted.len() > r { sorted[r] } else { 0.0 };
            let lhs: f64 = sorted.iter().take(r).sum::<f64>() - r as f64 * retention;
            let rhs: f64 = xs.iter().map(|x| (x - retention).max(0.0)).sum();
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            assert!(
                (lhs - rhs).abs() <= 1e-12 * scale,
                "case {case}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn retained_loss_is_nondecreasing_and_lcr_dominates() {
        let model = ClaimModel::shifted_pareto(1.3).unwrap();
        let mut rng = Stream::new(777);
        for case in 0..300 {
            let path = generate_path(&mut rng, 8.0, 2.0, &model);
            let r = case % 4;
            let sl = reinsured_series(&path, &lcr(r));
            let se = reinsured_series(&path, &ecomor(r));
            let mut total = 0.0;
            let (mut prev_l, mut prev_e) = (0.0, 0.0);
            for (i, c) in path.claims.iter().enumerate() {
                total += c.size;
                let dl = total - sl[i].1;
                let de = total - se[i].1;
                assert!(dl >= prev_l - 1e-9, "LCR D decreased");
                assert!(de >= prev_e - 1e-9, "ECOMOR D decreased");
                assert!(sl[i].1 >= se[i].1 - 1e-9, "LCR covers at least ECOMOR");
                prev_l = dl;
                prev_e = de;
            }
        }
    }

    #[test]
    fn phi_ordering_between_treaties() {
        let model = ClaimModel::shifted_pareto(1.5).unwrap();
        let mut rng = Stream::new(2718);
        for case in 0..500 {
            let path = generate_path(&mut rng, 10.0, 1.0, &model);
            let r = case % 4;
            let q = (case % 11) as f64 - 5.0;
            let phi_l = ruin_functional(&path, &lcr(r), q);
            let phi_e = ruin_functional(&path, &ecomor(r), q);
            assert!(phi_l <= phi_e + 1e-9, "case {case}: {phi_l} > {phi_e}");
        }
    }

    #[test]
    fn ties_are_resolved_by_arrival_order_and_do_not_change_phi() {
        // same multiset with tied sizes, permuted arrival order
        let base = [(0.1, 4.0), (0.3, 4.0), (0.5, 2.0), (0.7, 4.0)];
        let perm = [(0.1, 4.0), (0.3, 2.0), (0.5, 4.0), (0.7, 4.0)];
        for treaty in [lcr(1), ecomor(1), lcr(2), ecomor(2)] {
            let a = ruin_functional(&path_of(1.0, &base), &treaty, 0.0);
            let b = ruin_functional(&path_of(1.0, &perm), &treaty, 0.0);
            assert_eq!(a, b, "{treaty:?}");
        }
    }

    #[test]
    fn scaled_and_unscaled_functionals_correspond() {
        // dividing epochs and sizes by n maps the supremum over [0, n] to the
        // scaled functional over [0, 1]: Phi(scaled path) = Phi(path) / n,
        // with the same premium rate q on both sides (q = c + lambda E[X])
        let model = ClaimModel::shifted_pareto(1.5).unwrap();
        let lambda = 10.0;
        let mut rng = Stream::new(99);
        for case in 0..200 {
            let n = [5.0, 20.0, 80.0][case % 3];
            let path = generate_path(&mut rng, lambda, n, &model);
            let scaled = SamplePath::new(
                1.0,
                path.claims
                    .iter()
                    .map(|c| Claim {
                        epoch: c.epoch / n,
                        size: c.size / n,
                    })
                    .collect(),
            );
            let scaled = match scaled {
                Ok(s) => s,
                Err(_) => continue, // coincident scaled epochs; skip
            };
            let r = case % 3;
            let treaty = if case % 2 == 0 { lcr(r) } else { ecomor(r) };
            let q = -1.89 + lambda * model.mean();
            let want = ruin_functional(&path, &treaty, q) / n;
            let got = ruin_functional(&scaled, &treaty, q);
            assert!(
                (got - want).abs() <= 1e-9 * (1.0 + want.abs()),
                "case {case}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn generated_paths_have_poisson_counts() {
        let model = ClaimModel::shifted_pareto(1.5).unwrap();
        let mut rng = Stream::new(8);
        let reps = 20_000;
        let lt = 200.0f64;
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..reps {
            let p = generate_path(&mut rng, 10.0, 20.0, &model);
            p.validate().unwrap();
            let n = p.claims.len() as f64;
            sum += n;
            sumsq += n * n;
        }
        let mean = sum / reps as f64;
        let var = sumsq / reps as f64 - mean * mean;
        let se_mean = (lt / reps as f64).sqrt();
        assert!((mean - lt).abs() < 4.0 * se_mean, "mean {mean}");
        let se_var = (lt * (1.0 + 2.0 * lt) / reps as f64).sqrt();
        assert!((var - lt).abs() < 5.0 * se_var, "var {var}");
    }

    #[test]
    fn dump_csv_shape() {
        let p = path_of(1.0, &[(0.25, 2.0)]);
        let mut buf = Vec::new();
        dump_path_csv(&p, &lcr(1), 1.0, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("epoch,size,A,R,loss"));
        assert_eq!(lines.next().unwrap().split(',').count(), 5);
    }
}
