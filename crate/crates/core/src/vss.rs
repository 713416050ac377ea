// SPDX-License-Identifier: Apache-2.0

//! Feldman-style verifiable secret sharing.
//!
//! A dealer samples a random degree-t polynomial f; f(0) is the secret,
//! f(j) is participant j's share, and the published commitments
//! `C_k = c_k * G` let anyone check a share against `sum_k j^k * C_k`
//! without learning the polynomial.

use rand_core::RngCore;
use thiserror::Error;

use crate::group_math::{G1Point, NodeIndex, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VssError {
    #[error("threshold degree must be at least 1")]
    ThresholdTooSmall,
    #[error("polynomial needs at least one coefficient")]
    EmptyPolynomial,
    #[error("reconstruction needs at least one point")]
    NoPoints,
    #[error("duplicate evaluation point {0}")]
    DuplicatePoint(NodeIndex),
    #[error("evaluation point 0 is reserved for the secret")]
    ZeroPoint,
}

/// A dealer's secret polynomial; `coefficients[0]` is the shared secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharePolynomial {
    coefficients: Vec<Scalar>,
}

impl SharePolynomial {
    /// Samples `threshold_degree + 1` uniform coefficients, the constant
    /// term being the fresh secret.
    pub fn generate<R: RngCore + ?Sized>(
        threshold_degree: usize,
        rng: &mut R,
    ) -> Result<Self, VssError> {
        if threshold_degree < 1 {
            return Err(VssError::ThresholdTooSmall);
        }
        let coefficients = (0..=threshold_degree)
            .map(|_| Scalar::random(rng))
            .collect();
        Ok(SharePolynomial { coefficients })
    }

    /// Wraps explicit coefficients (degree = len - 1); used by tests and
    /// reconstruction oracles.
    pub fn from_coefficients(coefficients: Vec<Scalar>) -> Result<Self, VssError> {
        if coefficients.is_empty() {
            return Err(VssError::EmptyPolynomial);
        }
        Ok(SharePolynomial { coefficients })
    }

    pub fn secret(&self) -> Scalar {
        self.coefficients[0]
    }

    pub fn threshold_degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coefficients
    }

    /// Horner evaluation of `sum_k c_k x^k` mod q.
    pub fn evaluate(&self, x: u64) -> Scalar {
        let x = Scalar::from(x);
        let mut acc = Scalar::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * x + *c;
        }
        acc
    }

    /// Feldman commitments: `C_k = c_k * G` for every coefficient.
    pub fn commit(&self) -> CommitmentVector {
        let g = G1Point::generator();
        CommitmentVector {
            commitments: self.coefficients.iter().map(|c| g.mul_scalar(c)).collect(),
        }
    }
}

/// The public image of a share polynomial: one G1 point per coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitmentVector {
    commitments: Vec<G1Point>,
}

impl CommitmentVector {
    pub fn from_points(commitments: Vec<G1Point>) -> Self {
        CommitmentVector { commitments }
    }

    pub fn len(&self) -> usize {
        self.commitments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commitments.is_empty()
    }

    pub fn points(&self) -> &[G1Point] {
        &self.commitments
    }

    /// The public evaluation `sum_k j^k * C_k`, i.e. `f(j) * G`.
    pub fn evaluate_at(&self, j: NodeIndex) -> G1Point {
        let j = Scalar::from(u64::from(j));
        let mut power = Scalar::one();
        let mut acc = G1Point::identity();
        for c in &self.commitments {
            acc = acc + c.mul_scalar(&power);
            power = power * j;
        }
        acc
    }
}

/// A polynomial evaluation in transit from `issuer` to `receiver`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Share {
    pub issuer: NodeIndex,
    pub receiver: NodeIndex,
    pub value: Scalar,
}

/// Checks `share_value * G == sum_k j^k * C_k`.
pub fn verify_share(share_value: &Scalar, commitments: &CommitmentVector, j: NodeIndex) -> bool {
    G1Point::generator().mul_scalar(share_value) == commitments.evaluate_at(j)
}

/// The Lagrange basis weights at x = 0 for the given evaluation points:
/// `lambda_j = prod_{m != j} x_m / (x_m - x_j) mod q`.
///
/// Useful both for reconstructing scalars and for interpolating "in the
/// exponent" over public key shares.
pub fn lagrange_coefficients_at_zero(xs: &[NodeIndex]) -> Result<Vec<Scalar>, VssError> {
    if xs.is_empty() {
        return Err(VssError::NoPoints);
    }
    let mut seen = std::collections::BTreeSet::new();
    for x in xs {
        if *x == 0 {
            return Err(VssError::ZeroPoint);
        }
        if !seen.insert(*x) {
            return Err(VssError::DuplicatePoint(*x));
        }
    }

    let mut out = Vec::with_capacity(xs.len());
    for (j, xj) in xs.iter().enumerate() {
        let xj = Scalar::from(u64::from(*xj));
        let mut num = Scalar::one();
        let mut den = Scalar::one();
        for (m, xm) in xs.iter().enumerate() {
            if m == j {
                continue;
            }
            let xm = Scalar::from(u64::from(*xm));
            num = num * xm;
            den = den * (xm - xj);
        }
        out.push(
            num * den
                .inverse()
                .expect("distinct points give nonzero denominator"),
        );
    }
    Ok(out)
}

/// Standard Lagrange interpolation at x = 0 over Z_q.
///
/// The caller is responsible for supplying at least `t + 1` points of a
/// degree-t polynomial; duplicates and the reserved point 0 are rejected.
pub fn lagrange_reconstruct(points: &[(NodeIndex, Scalar)]) -> Result<Scalar, VssError> {
    let xs: Vec<NodeIndex> = points.iter().map(|(x, _)| *x).collect();
    let lambdas = lagrange_coefficients_at_zero(&xs)?;
    Ok(points
        .iter()
        .zip(lambdas)
        .fold(Scalar::zero(), |acc, ((_, y), lambda)| acc + *y * lambda))
}
