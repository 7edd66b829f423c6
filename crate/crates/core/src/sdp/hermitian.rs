use nalgebra::Matrix4;

use crate::{CVec2, Complex};

/// 2×2 complex Hermitian matrix `[[a, b], [b*, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2 {
    pub a: f64,
    pub d: f64,
    pub b: Complex,
}

impl Hermitian2 {
    pub fn zero() -> Self {
        Self { a: 0.0, d: 0.0, b: Complex::new(0.0, 0.0) }
    }

    pub fn identity() -> Self {
        Self { a: 1.0, d: 1.0, b: Complex::new(0.0, 0.0) }
    }

    /// Selector `E_i` with a single one on diagonal entry `i`.
    pub fn selector(i: usize) -> Self {
        match i {
            0 => Self { a: 1.0, ..Self::zero() },
            _ => Self { d: 1.0, ..Self::zero() },
        }
    }

    /// `v v^H`.
    pub fn outer(v: &CVec2) -> Self {
        Self {
            a: v[0].norm_sqr(),
            d: v[1].norm_sqr(),
            b: v[0] * v[1].conj(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// `tr(self · other)`.
    pub fn trace_product(&self, other: &Hermitian2) -> f64 {
        self.a * other.a + self.d * other.d + 2.0 * (self.b * other.b.conj()).re
    }

    /// `v^H self v`.
    pub fn quadratic_form(&self, v: &CVec2) -> f64 {
        self.a * v[0].norm_sqr() + self.d * v[1].norm_sqr() + 2.0 * (v[0].conj() * self.b * v[1]).re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { a: self.a * s, d: self.d * s, b: self.b * s }
    }

    /// `D self D` for a real diagonal `D = diag(d0, d1)`.
    pub fn congruence_diag(&self, d0: f64, d1: f64) -> Self {
        Self { a: self.a * d0 * d0, d: self.d * d1 * d1, b: self.b * (d0 * d1) }
    }

    pub fn is_hermitian_finite(&self) -> bool {
        self.a.is_finite() && self.d.is_finite() && self.b.re.is_finite() && self.b.im.is_finite()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.a + self.d);
        let half_diff = 0.5 * (self.a - self.d);
        let r = half_diff.hypot(self.b.norm());
        (mean + r, mean - r)
    }

    /// Unit eigenvector of the largest eigenvalue.
    pub fn dominant_eigenvector(&self) -> CVec2 {
        let (l1, _) = self.eigenvalues();
        // Rows of (S - λI) v = 0 give two candidate directions; take the
        // better-conditioned one.
        let u = CVec2::new(self.b, Complex::new(l1 - self.a, 0.0));
        let v = CVec2::new(Complex::new(l1 - self.d, 0.0), self.b.conj());
        let pick = if u.norm() >= v.norm() { u } else { v };
        let n = pick.norm();
        if n == 0.0 {
            if self.a >= self.d {
                CVec2::new(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0))
            } else {
                CVec2::new(Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
            }
        } else {
            pick / Complex::new(n, 0.0)
        }
    }

    /// Real symmetric embedding `[[Re S, -Im S], [Im S, Re S]]`; satisfies
    /// `tr(S H) = ½⟨embed(S), embed(H)⟩`.
    pub fn embed(&self) -> Matrix4<f64> {
        let (br, bi) = (self.b.re, self.b.im);
        Matrix4::new(
            self.a, br, 0.0, -bi, //
            br, self.d, bi, 0.0, //
            0.0, bi, self.a, br, //
            -bi, 0.0, br, self.d,
        )
    }

    /// Projects a real symmetric 4×4 matrix onto the embedded-Hermitian
    /// subspace. Preserves positive semidefiniteness and every inner product
    /// with embedded Hermitian matrices.
    pub fn from_embedding(x: &Matrix4<f64>) -> Self {
        let a = 0.5 * (x[(0, 0)] + x[(2, 2)]);
        let d = 0.5 * (x[(1, 1)] + x[(3, 3)]);
        let re = 0.5 * (x[(0, 1)] + x[(2, 3)]);
        // Im S = B, stored as X21 = B, X12 = -B.
        let im = 0.5 * (x[(2, 1)] - x[(0, 3)]);
        Self { a, d, b: Complex::new(re, im) }
    }
}

impl std::ops::Add for Hermitian2 {
    type Output = Hermitian2;
    fn add(self, o: Hermitian2) -> Hermitian2 {
        Hermitian2 { a: self.a + o.a, d: self.d + o.d, b: self.b + o.b }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_c() -> impl Strategy<Value = Complex> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(r, i)| Complex::new(r, i))
    }

    fn arb_v() -> impl Strategy<Value = CVec2> {
        (arb_c(), arb_c()).prop_map(|(a, b)| CVec2::new(a, b))
    }

    fn arb_h() -> impl Strategy<Value = Hermitian2> {
        (-3.0..3.0f64, -3.0..3.0f64, arb_c()).prop_map(|(a, d, b)| Hermitian2 { a, d, b })
    }

    proptest! {
        #[test]
        fn embedding_preserves_trace_products(s in arb_h(), h in arb_h()) {
            let lhs = s.trace_product(&h);
            let rhs = 0.5 * s.embed().dot(&h.embed());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            let back = Hermitian2::from_embedding(&s.embed());
            prop_assert!((back.a - s.a).abs() < 1e-15 && (back.b - s.b).norm() < 1e-15);
        }

        #[test]
        fn outer_product_quadratic_form(v in arb_v(), x in arb_v()) {
            let s = Hermitian2::outer(&v);
            let direct = crate::link::inner(&v, &x).norm_sqr();
            prop_assert!((s.quadratic_form(&x) - direct).abs() <= 1e-10 * (1.0 + direct));
        }

        #[test]
        fn dominant_eigenpair(s in arb_h()) {
            let (l1, l2) = s.eigenvalues();
            prop_assert!(l1 >= l2);
            let u = s.dominant_eigenvector();
            prop_assert!((u.norm() - 1.0).abs() < 1e-12);
            prop_assert!((s.quadratic_form(&u) - l1).abs() < 1e-9 * (1.0 + l1.abs()));
            prop_assert!((l1 + l2 - s.trace()).abs() < 1e-12 * (1.0 + s.trace().abs()));
        }
    }
}
