use rand::Rng;
use rand_distr::StandardNormal;

use super::hermitian::Hermitian2;
use super::problems::RANK_ONE_THRESHOLD;
use crate::{CVec2, Complex};

#[derive(Debug, Clone, PartialEq)]
pub struct RankOne {
    /// `√λ1 · u1`.
    pub vector: CVec2,
    /// `λ2/λ1`, zero for the zero matrix.
    pub eigen_ratio: f64,
}

impl RankOne {
    pub fn is_rank_one(&self) -> bool {
        self.eigen_ratio <= RANK_ONE_THRESHOLD
    }
}

pub fn extract_rank_one(s: &Hermitian2) -> RankOne {
    let (l1, l2) = s.eigenvalues();
    if l1 <= 0.0 {
        return RankOne { vector: CVec2::zeros(), eigen_ratio: 0.0 };
    }
    let u = s.dominant_eigenvector();
    RankOne {
        vector: u * Complex::new(l1.sqrt(), 0.0),
        eigen_ratio: (l2.max(0.0) / l1).min(1.0),
    }
}

/// Scales `v` so that the tightest per-element cap `|v_i|² ≤ caps[i]` is met
/// with equality.
pub fn fit_to_caps(v: &CVec2, caps: [f64; 2]) -> CVec2 {
    let t = (0..2)
        .filter(|&i| v[i].norm() > 0.0)
        .map(|i| caps[i].max(0.0).sqrt() / v[i].norm())
        .fold(f64::INFINITY, f64::min);
    if t.is_finite() {
        v * Complex::new(t, 0.0)
    } else {
        *v
    }
}

/// Scales `v` down only if it violates a cap.
pub(crate) fn clip_to_caps(v: &CVec2, caps: [f64; 2]) -> CVec2 {
    let t = (0..2)
        .filter(|&i| v[i].norm_sqr() > caps[i])
        .map(|i| (caps[i].max(0.0) / v[i].norm_sqr()).sqrt())
        .fold(1.0, f64::min);
    v * Complex::new(t, 0.0)
}

/// Gaussian randomization around a relaxed solution `S`.
///
/// Candidates are drawn as `ξ = U Λ^½ r` with `r ~ CN(0, I)` and fitted to
/// the caps. The dominant eigenvector (clipped and fitted) is always among the
/// candidates and wins ties. `objective` should return `-inf` for candidates
/// it deems infeasible.
pub fn gaussian_randomization<R, F>(
    s: &Hermitian2,
    caps: [f64; 2],
    objective: F,
    n_samples: usize,
    rng: &mut R,
) -> CVec2
where
    R: Rng + ?Sized,
    F: Fn(&CVec2) -> f64,
{
    let principal = extract_rank_one(s).vector;
    let mut best = clip_to_caps(&principal, caps);
    let mut best_val = objective(&best);
    let consider = |cand: CVec2, best: &mut CVec2, best_val: &mut f64| {
        let val = objective(&cand);
        if val > *best_val {
            *best = cand;
            *best_val = val;
        }
    };
    consider(fit_to_caps(&principal, caps), &mut best, &mut best_val);

    let (l1, l2) = s.eigenvalues();
    let u1 = s.dominant_eigenvector();
    // Second eigenvector is orthogonal to the first.
    let u2 = CVec2::new(-u1[1].conj(), u1[0].conj());
    let (s1, s2) = (l1.max(0.0).sqrt(), l2.max(0.0).sqrt());
    for _ in 0..n_samples.max(1) {
        let mut draw = || {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(re, im) / 2f64.sqrt()
        };
        let (r1, r2) = (draw(), draw());
        let xi = u1 * (r1 * s1) + u2 * (r2 * s2);
        consider(fit_to_caps(&xi, caps), &mut best, &mut best_val);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::secrecy_ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn rank_one_matrix_returns_its_factor() {
        let v = CVec2::new(c(0.3, -1.2), c(2.0, 0.5));
        let r = extract_rank_one(&Hermitian2::outer(&v));
        assert!(r.is_rank_one());
        // equal up to a global phase
        let phase = crate::link::inner(&r.vector, &v);
        let aligned = r.vector * (phase / phase.norm());
        assert!((aligned - v).norm() < 1e-12);
    }

    #[test]
    fn identity_is_flagged() {
        let r = extract_rank_one(&Hermitian2::identity());
        assert_eq!(r.eigen_ratio, 1.0);
        assert!(!r.is_rank_one());
    }

    #[test]
    fn zero_matrix_gives_zero_vector() {
        let r = extract_rank_one(&Hermitian2::zero());
        assert_eq!(r.vector, CVec2::zeros());
    }

    #[test]
    fn fitting_hits_the_tightest_cap() {
        let v = CVec2::new(c(1.0, 1.0), c(0.0, 0.5));
        let f = fit_to_caps(&v, [4.0, 4.0]);
        assert!((f[0].norm_sqr() - 4.0).abs() < 1e-12);
        assert!(f[1].norm_sqr() < 4.0);
    }

    #[test]
    fn randomization_on_exact_rank_one_keeps_the_eigenvector() {
        let h_d = CVec2::new(c(1.0, 0.2), c(-0.4, 0.9));
        let h_e = CVec2::new(c(0.3, 0.1), c(0.2, -0.2));
        let caps = [1.0, 2.0];
        let obj = |w: &CVec2| secrecy_ratio(w, &h_d, &h_e, 0.1);
        let v = fit_to_caps(&CVec2::new(c(0.8, 0.1), c(0.3, 0.7)), caps);
        let s = Hermitian2::outer(&v);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = gaussian_randomization(&s, caps, obj, 1000, &mut rng);
        // all candidates are the same direction up to a random phase
        assert!((obj(&w) - obj(&v)).abs() < 1e-12 * obj(&v));
    }

    #[test]
    fn randomization_never_loses_to_the_eigenvector() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut g = || c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let h_d = CVec2::new(g(), g());
            let h_e = CVec2::new(g(), g());
            let s = Hermitian2 { a: 0.7, d: 0.4, b: g() * 0.5 };
            let caps = [0.5, 0.8];
            let obj = |w: &CVec2| secrecy_ratio(w, &h_d, &h_e, 0.05);
            let base = obj(&clip_to_caps(&extract_rank_one(&s).vector, caps));
            let mut r2 = ChaCha8Rng::seed_from_u64(3);
            let w = gaussian_randomization(&s, caps, obj, 1000, &mut r2);
            assert!(obj(&w) >= base);
            assert!(w[0].norm_sqr() <= caps[0] * (1.0 + 1e-12));
            assert!(w[1].norm_sqr() <= caps[1] * (1.0 + 1e-12));
            let mut r3 = ChaCha8Rng::seed_from_u64(3);
            assert_eq!(w, gaussian_randomization(&s, caps, obj, 1000, &mut r3));
        }
    }
}
