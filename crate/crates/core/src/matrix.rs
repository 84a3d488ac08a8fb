//! The exact linear-algebra view of weight products.
//!
//! Dropping the constant term of a cubic `a3 n^3 + a2 n^2 + a1 n + a0`
//! leaves the column vector `V = (a1, a2, a3)`, and stacking the columns
//! `V(f(mn+i))` gives a 3-by-m matrix `M_m(f)` satisfying
//! `M_m(f) * U(alpha) = V(alpha x f)` for every weight alpha with m
//! entries. That identity turns "can this weight product be re-expressed
//! over a perturbed base?" into small exact linear systems, which is how
//! the bottom-degree pipeline works.

use serde::{Deserialize, Serialize};

use crate::exact::{Poly, Rat};
use crate::weight::{single_product_poly, Weight};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("polynomial has degree {0}, above the cubic ceiling")]
    DegreeTooHigh(i64),
    #[error("support must name 3 distinct in-range columns with positive vector entries")]
    BadSupport,
    #[error("perturbed support block is singular")]
    Singular,
    #[error("perturbation pushed a support entry to {0}, positivity lost")]
    PositivityLost(Rat),
    #[error("weight has {got} positive entries, need at least {need}")]
    NotEnoughPositives { got: usize, need: usize },
    #[error("q_eps must be a monic cubic with nonnegative sub-leading coefficients and zero constant term")]
    BadQEps,
}

/// Fixed-length vector of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactVector(pub Vec<Rat>);

impl ExactVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Rectangular matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        ExactMatrix { rows, cols, data }
    }

    pub fn from_columns(columns: &[ExactVector]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, ExactVector::len);
        assert!(columns.iter().all(|c| c.len() == rows));
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for col in columns {
                data.push(col.0[r].clone());
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> ExactVector {
        ExactVector((0..self.rows).map(|r| self.at(r, c).clone()).collect())
    }

    pub fn mul_vec(&self, v: &ExactVector) -> ExactVector {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        ExactVector(
            (0..self.rows)
                .map(|r| {
                    (0..self.cols)
                        .map(|c| self.at(r, c) * &v.0[c])
                        .sum::<Rat>()
                })
                .collect(),
        )
    }

    /// Cofactor-expansion determinant of a 3x3 matrix.
    pub fn det3(&self) -> Rat {
        assert!(self.rows == 3 && self.cols == 3, "det3 needs a 3x3 matrix");
        let a = |r: usize, c: usize| self.at(r, c);
        let minor = |r1: usize, c1: usize, r2: usize, c2: usize| {
            &(a(r1, c1) * a(r2, c2)) - &(a(r1, c2) * a(r2, c1))
        };
        &(&(a(0, 0) * &minor(1, 1, 2, 2)) - &(a(0, 1) * &minor(1, 0, 2, 2)))
            + &(a(0, 2) * &minor(1, 0, 2, 1))
    }

    /// Exact solve of a 3x3 system by Cramer's rule; None when singular.
    pub fn solve3(&self, rhs: &ExactVector) -> Option<ExactVector> {
        assert!(self.rows == 3 && self.cols == 3 && rhs.len() == 3);
        let det = self.det3();
        if det.is_zero() {
            return None;
        }
        let mut out = Vec::with_capacity(3);
        for c in 0..3 {
            let mut m = self.clone();
            for r in 0..3 {
                m.data[r * 3 + c] = rhs.0[r].clone();
            }
            out.push(&m.det3() / &det);
        }
        Some(ExactVector(out))
    }
}

/// The constant-dropping coefficient vector of a cubic-or-lower
/// polynomial: `(a1, a2, a3)`.
pub fn v_of(p: &Poly) -> Result<ExactVector, MatrixError> {
    if p.degree() > 3 {
        return Err(MatrixError::DegreeTooHigh(p.degree()));
    }
    Ok(ExactVector(vec![p.coeff(1), p.coeff(2), p.coeff(3)]))
}

/// The 3-by-m matrix whose 0-indexed column i is `V(f(mn+i))`.
pub fn m_of(f: &Poly, m: usize) -> Result<ExactMatrix, MatrixError> {
    assert!(m >= 1, "matrix needs at least one column");
    let mr = Rat::from_int(m as i64);
    let cols: Result<Vec<_>, _> = (0..m)
        .map(|i| v_of(&f.affine(&mr, &Rat::from_int(i as i64))))
        .collect();
    Ok(ExactMatrix::from_columns(&cols?))
}

/// The column vector of a weight's entries (its constant dropped, matching
/// what V drops on the polynomial side).
pub fn u_of(alpha: &Weight) -> ExactVector {
    ExactVector(alpha.entries().to_vec())
}

/// The bridging identity `M_m(f) U(alpha) = V(alpha x f)`, checked exactly.
pub fn check_matrix_identity(f: &Poly, alpha: &Weight) -> Result<bool, MatrixError> {
    let m = alpha.window();
    let lhs = m_of(f, m)?.mul_vec(&u_of(alpha));
    let rhs = v_of(&single_product_poly(alpha, f))?;
    Ok(lhs == rhs)
}

/// Both sides of the cubic determinant identity: the closed form
/// `9 m^6 (a-b)(b-c)(a-c)` and the cofactor-expansion determinant of
/// `[V((mn+a)^3) V((mn+b)^3) V((mn+c)^3)]`, for comparison.
pub fn det3_identity(m: i64, a: i64, b: i64, c: i64) -> (Rat, Rat) {
    assert!(m >= 1);
    let formula = Rat::from_int(9)
        * Rat::from_int(m).pow(6)
        * Rat::from_int(a - b)
        * Rat::from_int(b - c)
        * Rat::from_int(a - c);
    let col = |t: i64| v_of(&Poly::linear_cubed(m, t)).expect("cubic");
    let direct = ExactMatrix::from_columns(&[col(a), col(b), col(c)]).det3();
    (formula, direct)
}

/// Solution of a perturbed rank-3 system: the original vector's support
/// entries re-solved against the perturbed columns, everything else
/// untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbSolution {
    /// Full solution vector, same length as the input.
    pub u_eps: ExactVector,
    /// The three column indices that were re-solved.
    pub support: [usize; 3],
    /// The untouched entries, in column order (complement of the support).
    pub w_block: Vec<Rat>,
}

/// Given `M * U = P` with the three support columns of M independent and U
/// strictly positive there, finds `U_eps` with `M_eps * U_eps = P` exactly:
/// the support block is re-solved as `B_eps^-1 (P - C_eps W)` and the W
/// block kept. Fails with `PositivityLost` when the perturbation was too
/// large to keep the support entries positive, `Singular` when the
/// perturbed support block lost invertibility.
pub fn perturb_solve(
    m: &ExactMatrix,
    u: &ExactVector,
    support: [usize; 3],
    m_eps: &ExactMatrix,
) -> Result<PerturbSolution, MatrixError> {
    let n = m.cols();
    if m.rows() != 3 || m_eps.rows() != 3 || m_eps.cols() != n || u.len() != n || n < 3 {
        return Err(MatrixError::BadSupport);
    }
    let mut j = support;
    j.sort_unstable();
    if j[0] == j[1] || j[1] == j[2] || j[2] >= n {
        return Err(MatrixError::BadSupport);
    }
    if j.iter().any(|&c| !u.0[c].is_positive()) || u.0.iter().any(Rat::is_negative) {
        return Err(MatrixError::BadSupport);
    }
    let b = ExactMatrix::from_columns(&[m.column(j[0]), m.column(j[1]), m.column(j[2])]);
    if b.det3().is_zero() {
        return Err(MatrixError::BadSupport);
    }

    let p = m.mul_vec(u);
    let in_support = |c: usize| j.contains(&c);
    let w_cols: Vec<usize> = (0..n).filter(|c| !in_support(*c)).collect();
    let w_block: Vec<Rat> = w_cols.iter().map(|&c| u.0[c].clone()).collect();

    // rhs = P - C_eps * W
    let mut rhs = p;
    for (&c, w) in w_cols.iter().zip(&w_block) {
        if w.is_zero() {
            continue;
        }
        for r in 0..3 {
            rhs.0[r] = &rhs.0[r] - &(m_eps.at(r, c) * w);
        }
    }

    let b_eps = ExactMatrix::from_columns(&[
        m_eps.column(j[0]),
        m_eps.column(j[1]),
        m_eps.column(j[2]),
    ]);
    let solved = b_eps.solve3(&rhs).ok_or(MatrixError::Singular)?;
    if let Some(bad) = solved.0.iter().find(|x| !x.is_positive()) {
        return Err(MatrixError::PositivityLost(bad.clone()));
    }

    let mut u_eps = u.clone();
    for (slot, &c) in j.iter().enumerate() {
        u_eps.0[c] = solved.0[slot].clone();
    }
    Ok(PerturbSolution {
        u_eps,
        support: j,
        w_block,
    })
}

/// Outcome of the bottom-degree pipeline: a weight over the perturbed base
/// whose product matches the m-transform in its n^3, n^2, n coefficients,
/// plus the constant-term mismatch (degree-irrelevant, but recorded).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BottomWitness {
    pub weight: Weight,
    pub constant_delta: Rat,
}

fn is_q_eps_shape(q: &Poly) -> bool {
    q.degree() == 3
        && q.coeff(3).is_one()
        && !q.coeff(2).is_negative()
        && !q.coeff(1).is_negative()
        && q.coeff(0).is_zero()
}

/// The bottom-degree pipeline: given an m-transform weight alpha (at least
/// three positive entries) over `(n+t)^3` and a caller-supplied perturbed
/// monic cubic `q_eps`, re-solves the weight over `q_eps(n+t)` so that the
/// product agrees with `alpha x (n+t)^3` up to a constant. The support is
/// the first three strictly positive positions of alpha; the cubic
/// determinant identity guarantees the corresponding unperturbed columns
/// are independent.
pub fn bottom_witness(alpha: &Weight, t: i64, q_eps: &Poly) -> Result<BottomWitness, MatrixError> {
    if !is_q_eps_shape(q_eps) {
        return Err(MatrixError::BadQEps);
    }
    let positives = alpha.positive_positions();
    if positives.len() < 3 {
        return Err(MatrixError::NotEnoughPositives {
            got: positives.len(),
            need: 3,
        });
    }
    let support = [positives[0], positives[1], positives[2]];
    let k = alpha.window();
    let base = Poly::linear_cubed(1, t);
    let target = single_product_poly(alpha, &base);
    let m = m_of(&base, k)?;
    let m_eps = m_of(&q_eps.shift(t), k)?;
    let solution = perturb_solve(&m, &u_of(alpha), support, &m_eps)?;
    let weight = Weight::new(solution.u_eps.0, Rat::zero())
        .expect("perturb_solve returns nonnegative entries");
    let product = single_product_poly(&weight, &q_eps.shift(t));
    let diff = &target - &product;
    debug_assert!(diff.is_constant(), "non-constant residual in bottom witness");
    Ok(BottomWitness {
        weight,
        constant_delta: diff.constant_term(),
    })
}
