//! Dense primal-dual interior-point method for SDPs with one 4×4 real
//! symmetric PSD block and a handful of nonnegative scalars.
//!
//! Primal:  min ⟨C,X⟩ + cᵀx  s.t.  ⟨A_k,X⟩ + (A_l x)_k = b_k,  X ⪰ 0, x ≥ 0
//! Dual:    max bᵀy          s.t.  C − Σ y_k A_k = Z ⪰ 0,  c − A_lᵀy = z ≥ 0
//!
//! Search directions are HKM with a Mehrotra predictor-corrector.

use nalgebra::{DMatrix, DVector, Matrix4};

use super::Hermitian2;

pub type Sym4 = Matrix4<f64>;

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub c_mat: Sym4,
    pub c_lin: DVector<f64>,
    pub a_mat: Vec<Sym4>,
    /// m × l coefficients of the nonnegative scalars.
    pub a_lin: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl SdpProblem {
    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn num_scalars(&self) -> usize {
        self.c_lin.len()
    }

    fn op(&self, x: &Sym4, xl: &DVector<f64>) -> DVector<f64> {
        let mut out = &self.a_lin * xl;
        for (k, a) in self.a_mat.iter().enumerate() {
            out[k] += a.dot(x);
        }
        out
    }

    fn adjoint_mat(&self, y: &DVector<f64>) -> Sym4 {
        self.a_mat
            .iter()
            .zip(y.iter())
            .fold(Sym4::zeros(), |acc, (a, &yk)| acc + a * yk)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IpmSettings {
    pub max_iters: usize,
    /// Relative duality gap `|p − d| / (1 + |p| + |d|)` at convergence.
    pub gap_tol: f64,
    /// Relative primal and dual residuals at convergence.
    pub feas_tol: f64,
    pub step_fraction: f64,
    /// Keep the matrix iterates on the real embedding of 2×2 Hermitian
    /// matrices. Only valid when every `A_k` and `C` is such an embedding.
    pub hermitian_embedding: bool,
}

impl Default for IpmSettings {
    fn default() -> Self {
        Self {
            max_iters: 100,
            gap_tol: 1e-10,
            feas_tol: 1e-9,
            step_fraction: 0.98,
            hermitian_embedding: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpmStatus {
    Converged,
    MaxIterations,
    /// Cholesky or Schur-complement factorization broke down; the last
    /// iterate is returned.
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct IpmSolution {
    pub x: Sym4,
    pub x_lin: DVector<f64>,
    pub y: DVector<f64>,
    pub z: Sym4,
    pub z_lin: DVector<f64>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub rel_gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub status: IpmStatus,
}

struct Iterate {
    x: Sym4,
    xl: DVector<f64>,
    y: DVector<f64>,
    z: Sym4,
    zl: DVector<f64>,
}

struct Direction {
    dx: Sym4,
    dxl: DVector<f64>,
    dy: DVector<f64>,
    dz: Sym4,
    dzl: DVector<f64>,
}

fn symmetrize(m: &Sym4) -> Sym4 {
    (m + m.transpose()) * 0.5
}

/// Largest step `α` keeping `x + α·dx` positive definite (may be infinite).
/// Falls back to an eigendecomposition of `x` when its Cholesky factor breaks
/// down near a rank-deficient optimum.
fn max_step_psd(x: &Sym4, dx: &Sym4) -> Option<f64> {
    let m = match x.cholesky().and_then(|c| c.l().try_inverse()) {
        Some(l_inv) => symmetrize(&(l_inv * dx * l_inv.transpose())),
        None => {
            let eig = x.symmetric_eigen();
            let floor = eig.eigenvalues.max() * f64::EPSILON;
            if !(floor > 0.0) {
                return None;
            }
            let s = Sym4::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.max(floor).sqrt()));
            let q = s * eig.eigenvectors.transpose();
            symmetrize(&(q * dx * q.transpose()))
        }
    };
    let min_eig = m.symmetric_eigenvalues().min();
    Some(if min_eig < 0.0 { -1.0 / min_eig } else { f64::INFINITY })
}

/// Inverse of a symmetric positive definite matrix, with eigenvalues floored
/// at machine precision when the direct inverse breaks down.
fn spd_inverse(m: &Sym4) -> Option<Sym4> {
    if let Some(inv) = m.try_inverse() {
        return Some(inv);
    }
    let eig = m.symmetric_eigen();
    let floor = eig.eigenvalues.max() * f64::EPSILON;
    if !(floor > 0.0) {
        return None;
    }
    let inv = Sym4::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.max(floor)));
    Some(eig.eigenvectors * inv * eig.eigenvectors.transpose())
}

fn max_step_lin(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    x.iter()
        .zip(dx.iter())
        .filter(|(_, &d)| d < 0.0)
        .map(|(&v, &d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

struct Residuals {
    rp: DVector<f64>,
    rd: Sym4,
    rdl: DVector<f64>,
}

struct Newton<'a> {
    p: &'a SdpProblem,
    it: &'a Iterate,
    z_inv: Sym4,
    /// Cholesky (or LU fallback) of the Schur complement.
    schur: DMatrix<f64>,
    embedded: bool,
}

impl<'a> Newton<'a> {
    fn new(p: &'a SdpProblem, it: &'a Iterate, embedded: bool) -> Option<Self> {
        let z_inv = symmetrize(&spd_inverse(&it.z)?);
        let m = p.num_constraints();
        let mut schur = DMatrix::zeros(m, m);
        let xa: Vec<Sym4> = p.a_mat.iter().map(|a| it.x * a * z_inv).collect();
        for i in 0..m {
            for k in i..m {
                let mut v = p.a_mat[i].dot(&xa[k].transpose());
                for l in 0..p.num_scalars() {
                    v += p.a_lin[(i, l)] * p.a_lin[(k, l)] * it.xl[l] / it.zl[l];
                }
                schur[(i, k)] = v;
                schur[(k, i)] = v;
            }
        }
        Some(Self { p, it, z_inv, schur, embedded })
    }

    /// Solves the Newton system for a complementarity target `rc` (matrix)
    /// and `rcl` (scalars).
    fn solve(&self, r: &Residuals, rc: &Sym4, rcl: &DVector<f64>) -> Option<Direction> {
        let (p, it) = (self.p, self.it);
        let t = (rc - it.x * r.rd) * self.z_inv;
        let mut rhs = r.rp.clone();
        for (k, a) in p.a_mat.iter().enumerate() {
            rhs[k] -= a.dot(&t.transpose());
        }
        let lin_term = DVector::from_fn(p.num_scalars(), |l, _| {
            (rcl[l] - it.xl[l] * r.rdl[l]) / it.zl[l]
        });
        rhs -= &p.a_lin * lin_term;

        let dy = match self.schur.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => self.schur.clone().lu().solve(&rhs)?,
        };
        let dz = r.rd - p.adjoint_mat(&dy);
        let dzl = &r.rdl - p.a_lin.transpose() * &dy;
        let mut dx = symmetrize(&((rc - it.x * dz) * self.z_inv));
        if self.embedded {
            dx = Hermitian2::from_embedding(&dx).embed();
        }
        let dxl = DVector::from_fn(p.num_scalars(), |l, _| {
            (rcl[l] - it.xl[l] * dzl[l]) / it.zl[l]
        });
        Some(Direction { dx, dxl, dy, dz, dzl })
    }
}

fn step_lengths(it: &Iterate, d: &Direction) -> Option<(f64, f64)> {
    let ap = max_step_psd(&it.x, &d.dx)?.min(max_step_lin(&it.xl, &d.dxl));
    let ad = max_step_psd(&it.z, &d.dz)?.min(max_step_lin(&it.zl, &d.dzl));
    Some((ap, ad))
}

pub fn solve(p: &SdpProblem, settings: &IpmSettings) -> IpmSolution {
    let n = 4.0;
    let l = p.num_scalars();
    let dim = n + l as f64;

    // Scaled identity start.
    let norm_a = p
        .a_mat
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let row = p.a_lin.row(k).norm();
            (a.norm().powi(2) + row * row).sqrt()
        })
        .collect::<Vec<_>>();
    let xi = p
        .b
        .iter()
        .zip(&norm_a)
        .map(|(&b, &a)| (1.0 + b.abs()) / (1.0 + a))
        .fold(n.sqrt(), f64::max)
        .max(10.0);
    let eta = norm_a
        .iter()
        .copied()
        .fold(p.c_mat.norm().max(p.c_lin.norm()), f64::max)
        .max(n.sqrt())
        .max(10.0);
    let mut it = Iterate {
        x: Sym4::identity() * xi,
        xl: DVector::from_element(l, xi),
        y: DVector::zeros(p.num_constraints()),
        z: Sym4::identity() * eta,
        zl: DVector::from_element(l, eta),
    };

    let b_norm = 1.0 + p.b.norm();
    let c_norm = 1.0 + p.c_mat.norm() + p.c_lin.norm();
    let mut status = IpmStatus::MaxIterations;
    let mut iterations = 0;

    let residuals = |it: &Iterate| Residuals {
        rp: &p.b - p.op(&it.x, &it.xl),
        rd: p.c_mat - p.adjoint_mat(&it.y) - it.z,
        rdl: &p.c_lin - p.a_lin.transpose() * &it.y - &it.zl,
    };
    let objectives = |it: &Iterate| {
        let pobj = p.c_mat.dot(&it.x) + p.c_lin.dot(&it.xl);
        let dobj = p.b.dot(&it.y);
        (pobj, dobj)
    };

    for k in 0..settings.max_iters {
        iterations = k;
        let r = residuals(&it);
        let (pobj, dobj) = objectives(&it);
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = r.rp.norm() / b_norm;
        let dinf = (r.rd.norm() + r.rdl.norm()) / c_norm;
        if rel_gap <= settings.gap_tol && pinf <= settings.feas_tol && dinf <= settings.feas_tol {
            status = IpmStatus::Converged;
            break;
        }

        let mu = (it.x.dot(&it.z) + it.xl.dot(&it.zl)) / dim;
        let Some(newton) = Newton::new(p, &it, settings.hermitian_embedding) else {
            status = IpmStatus::NumericalFailure;
            break;
        };

        // Predictor.
        let rc_aff = -(it.x * it.z);
        let rcl_aff = -it.xl.component_mul(&it.zl);
        let Some(aff) = newton.solve(&r, &rc_aff, &rcl_aff) else {
            status = IpmStatus::NumericalFailure;
            break;
        };
        let Some((ap, ad)) = step_lengths(&it, &aff) else {
            status = IpmStatus::NumericalFailure;
            break;
        };
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let x_aff = it.x + aff.dx * ap;
        let z_aff = it.z + aff.dz * ad;
        let xl_aff = &it.xl + &aff.dxl * ap;
        let zl_aff = &it.zl + &aff.dzl * ad;
        let mu_aff = (x_aff.dot(&z_aff) + xl_aff.dot(&zl_aff)) / dim;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let rc = Sym4::identity() * (sigma * mu) - it.x * it.z - aff.dx * aff.dz;
        let rcl = DVector::from_fn(l, |i, _| {
            sigma * mu - it.xl[i] * it.zl[i] - aff.dxl[i] * aff.dzl[i]
        });
        let Some(d) = newton.solve(&r, &rc, &rcl) else {
            status = IpmStatus::NumericalFailure;
            break;
        };
        let Some((ap, ad)) = step_lengths(&it, &d) else {
            status = IpmStatus::NumericalFailure;
            break;
        };
        let ap = (settings.step_fraction * ap).min(1.0);
        let ad = (settings.step_fraction * ad).min(1.0);

        it.x = symmetrize(&(it.x + d.dx * ap));
        it.xl += &d.dxl * ap;
        it.y += &d.dy * ad;
        it.z = symmetrize(&(it.z + d.dz * ad));
        it.zl += &d.dzl * ad;
        iterations = k + 1;
    }

    let r = residuals(&it);
    let (pobj, dobj) = objectives(&it);
    IpmSolution {
        rel_gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        primal_residual: r.rp.norm() / b_norm,
        dual_residual: (r.rd.norm() + r.rdl.norm()) / c_norm,
        x: it.x,
        x_lin: it.xl,
        y: it.y,
        z: it.z,
        z_lin: it.zl,
        primal_obj: pobj,
        dual_obj: dobj,
        iterations,
        status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, j: usize) -> Sym4 {
        let mut m = Sym4::zeros();
        m[(i, j)] = 0.5;
        m[(j, i)] += 0.5;
        m
    }

    #[test]
    fn min_eigenvalue_as_sdp() {
        // min ⟨C,X⟩ s.t. tr X = 1 has value λ_min(C).
        let c = Sym4::new(
            2.0, 1.0, 0.0, 0.5, //
            1.0, 3.0, 0.2, 0.0, //
            0.0, 0.2, 1.0, -0.3, //
            0.5, 0.0, -0.3, 4.0,
        );
        let p = SdpProblem {
            c_mat: c,
            c_lin: DVector::zeros(0),
            a_mat: vec![Sym4::identity()],
            a_lin: DMatrix::zeros(1, 0),
            b: DVector::from_element(1, 1.0),
        };
        let sol = solve(&p, &IpmSettings::default());
        assert_eq!(sol.status, IpmStatus::Converged);
        let lmin = c.symmetric_eigenvalues().min();
        assert!((sol.primal_obj - lmin).abs() < 1e-8, "{} vs {lmin}", sol.primal_obj);
    }

    #[test]
    fn mixed_block_lp_part() {
        // min x0 - X00  s.t. X00 + x0 = 1 ... optimum X00 = 1, x0 = 0, other
        // diagonal entries pinned by trace.
        let mut a1 = Sym4::zeros();
        a1[(0, 0)] = 1.0;
        let p = SdpProblem {
            c_mat: -e(0, 0),
            c_lin: DVector::from_element(1, 1.0),
            a_mat: vec![a1, Sym4::identity()],
            a_lin: DMatrix::from_row_slice(2, 1, &[1.0, 0.0]),
            b: DVector::from_vec(vec![1.0, 2.0]),
        };
        let sol = solve(&p, &IpmSettings::default());
        assert_eq!(sol.status, IpmStatus::Converged);
        assert!((sol.primal_obj + 1.0).abs() < 1e-8);
        assert!(sol.x_lin[0].abs() < 1e-8);
    }
}
