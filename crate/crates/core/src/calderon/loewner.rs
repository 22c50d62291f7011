//! Partial isometries built from squares: for `P = q^2` the map from the odd-indexed
//! coordinates to the even-indexed ones, and for `P = t q^2` the map back, obtained by
//! interpolating through `q`.

use nalgebra::DMatrix;

use super::polynomial::{shifted_product_derivative_at, RealPolynomial};
use crate::couple::{CoupleVector, OperatorMatrix, WeightVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoewnerCase {
    /// `P = q^2`, `x0` supported on the odd-indexed coordinates, `y0` on the even-indexed ones.
    Square,
    /// `P = t q^2`, `x0` on the even-indexed coordinates, `y0` on the odd-indexed ones.
    ShiftedSquare,
}

/// Output of [`loewner_maps`]. Indices are 0-based: the set `O` holds `0, 2, 4, ...` (weights
/// `xi`) and `E` holds `1, 3, 5, ...` (weights `eta`).
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerMaps {
    pub x0: CoupleVector,
    pub y0: CoupleVector,
    pub t: OperatorMatrix,
    /// The block `O -> E` (first case) or `E -> O` (second case), rows indexed by the target set.
    pub block: DMatrix<f64>,
    /// Whether `q` is small enough for the weighted (first case) or plain (second case)
    /// norm of `x0` to be preserved.
    pub isometric_on_data: bool,
}

fn odd_even(lambda: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let xi = lambda.iter().step_by(2).copied().collect();
    let eta = lambda.iter().skip(1).step_by(2).copied().collect();
    (xi, eta)
}

/// `L_lambda'(-lambda_j)` for every `j`.
fn full_derivatives(lambda: &[f64]) -> Vec<f64> {
    (0..lambda.len()).map(|j| shifted_product_derivative_at(j, lambda)).collect()
}

/// Lagrange weight `L_s(-u) / ((s_k - u) L_s'(-s_k))` of the node `-s_k` evaluated at `-u`.
fn lagrange(u: f64, k: usize, s: &[f64]) -> f64 {
    let others: f64 = s.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &sj)| sj - u).product();
    others / shifted_product_derivative_at(k, s)
}

/// Builds the data vectors from `q` (all signs `+1`) and the map carrying one to the other.
///
/// First case: `x0_k = q(-xi_k) / sqrt(xi_k L'(-xi_k))`, `y0_i = q(-eta_i) / sqrt(-eta_i L'(-eta_i))`,
/// and the block maps `x` to the values at `-eta` of the polynomial interpolating `x` at `-xi`.
/// Second case: `x0_k = -q(-eta_k) / sqrt(-L'(-eta_k))`, `y0_i = q(-xi_i) / sqrt(L'(-xi_i))`.
pub fn loewner_maps(case: LoewnerCase, q: &RealPolynomial, lambda: &WeightVector) -> Result<LoewnerMaps> {
    let lam = lambda.values();
    let n = lam.len();
    if !lambda.is_sorted_strict() {
        return Err(Error::InvalidArgument("weights must be strictly increasing".into()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("at least two weights are needed".into()));
    }
    let cap = match case {
        LoewnerCase::Square => (n - 1) / 2,
        LoewnerCase::ShiftedSquare => (n - 2) / 2,
    };
    if q.degree() > cap {
        return Err(Error::DegreeBound(format!("deg q = {} exceeds {cap}", q.degree())));
    }
    let (xi, eta) = odd_even(lam);
    let dl = full_derivatives(lam);
    let dl_xi: Vec<f64> = dl.iter().step_by(2).copied().collect();
    let dl_eta: Vec<f64> = dl.iter().skip(1).step_by(2).copied().collect();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut t = DMatrix::<f64>::zeros(n, n);
    let block;
    let isometric_on_data;
    match case {
        LoewnerCase::Square => {
            let sx: Vec<f64> = radicands(xi.iter().zip(&dl_xi).map(|(s, d)| s * d))?;
            let sy: Vec<f64> = radicands(eta.iter().zip(&dl_eta).map(|(s, d)| -s * d))?;
            for k in 0..xi.len() {
                x[2 * k] = q.eval(-xi[k]) / sx[k];
            }
            for i in 0..eta.len() {
                y[2 * i + 1] = q.eval(-eta[i]) / sy[i];
            }
            block = DMatrix::from_fn(eta.len(), xi.len(), |i, k| lagrange(eta[i], k, &xi) * sx[k] / sy[i]);
            for i in 0..eta.len() {
                for k in 0..xi.len() {
                    t[(2 * i + 1, 2 * k)] = block[(i, k)];
                }
            }
            isometric_on_data = 2 * q.degree() + 2 <= n;
        }
        LoewnerCase::ShiftedSquare => {
            let sx: Vec<f64> = radicands(dl_eta.iter().map(|d| -d))?;
            let sy: Vec<f64> = radicands(dl_xi.iter().copied())?;
            for k in 0..eta.len() {
                x[2 * k + 1] = -q.eval(-eta[k]) / sx[k];
            }
            for i in 0..xi.len() {
                y[2 * i] = q.eval(-xi[i]) / sy[i];
            }
            block = DMatrix::from_fn(xi.len(), eta.len(), |i, k| -lagrange(xi[i], k, &eta) * sx[k] / sy[i]);
            for i in 0..xi.len() {
                for k in 0..eta.len() {
                    t[(2 * i, 2 * k + 1)] = block[(i, k)];
                }
            }
            isometric_on_data = true;
        }
    }
    Ok(LoewnerMaps {
        x0: CoupleVector::from_real(&x)?,
        y0: CoupleVector::from_real(&y)?,
        t: OperatorMatrix::from_real(&t)?,
        block,
        isometric_on_data,
    })
}

fn radicands(values: impl Iterator<Item = f64>) -> Result<Vec<f64>> {
    values
        .map(|v| {
            if v > 0.0 {
                Ok(v.sqrt())
            } else {
                Err(Error::NegativeRadicand(format!("{v:e}: weights are not interlaced as expected")))
            }
        })
        .collect()
}

/// The block matrices in the closed form `eps zeta / (s_k - u_i) L_s(-u_i) / L_s'(-s_k)
/// (s_k L_s'(-s_k) L_u(-s_k) / (-u_i L_s(-u_i) L_u'(-u_i)))^{1/2}` (first case, `s = xi`,
/// `u = eta`) and its counterpart for the second case, with all signs `+1`.
pub fn loewner_closed_form(case: LoewnerCase, lambda: &WeightVector) -> DMatrix<f64> {
    let (xi, eta) = odd_even(lambda.values());
    let prod = |u: f64, s: &[f64]| -> f64 { s.iter().map(|v| v - u).product() };
    match case {
        LoewnerCase::Square => DMatrix::from_fn(eta.len(), xi.len(), |i, k| {
            let lxi_eta = prod(eta[i], &xi);
            let dxi = shifted_product_derivative_at(k, &xi);
            let deta = shifted_product_derivative_at(i, &eta);
            let ratio = xi[k] * dxi * prod(xi[k], &eta) / (-eta[i] * lxi_eta * deta);
            lxi_eta / ((xi[k] - eta[i]) * dxi) * ratio.sqrt()
        }),
        LoewnerCase::ShiftedSquare => DMatrix::from_fn(xi.len(), eta.len(), |i, k| {
            let leta_xi = prod(xi[i], &eta);
            let deta = shifted_product_derivative_at(k, &eta);
            let dxi = shifted_product_derivative_at(i, &xi);
            let ratio = -prod(eta[k], &xi) * deta / (dxi * leta_xi);
            leta_xi / ((eta[k] - xi[i]) * deta) * ratio.sqrt()
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couple::{k_functional, TimeGrid};

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_point_square_case() {
        let q = RealPolynomial::from_monomial(vec![1.0]).unwrap();
        let lam = wv(&[1.0, 2.0]);
        let m = loewner_maps(LoewnerCase::Square, &q, &lam).unwrap();
        let x = m.x0.moduli();
        let y = m.y0.moduli();
        assert!((x[0] - 1.0).abs() < 1e-15 && x[1] == 0.0);
        assert!(y[0] == 0.0 && (y[1] - 0.5f64.sqrt()).abs() < 1e-15);
        let tx = m.t.apply(&m.x0).unwrap();
        assert!((m.x0.norm1_sq(&lam).unwrap() - tx.norm1_sq(&lam).unwrap()).abs() < 1e-12);
        assert!(m.isometric_on_data);
    }

    #[test]
    fn blocks_match_closed_forms() {
        let lam = wv(&[0.3, 0.9, 2.0, 5.0, 11.0, 30.0]);
        let q = RealPolynomial::from_monomial(vec![1.0, 0.5]).unwrap();
        let m = loewner_maps(LoewnerCase::Square, &q, &lam).unwrap();
        let closed = loewner_closed_form(LoewnerCase::Square, &lam);
        assert!((&m.block - &closed).amax() < 1e-12 * closed.amax());
        let m = loewner_maps(LoewnerCase::ShiftedSquare, &q, &lam).unwrap();
        let closed = loewner_closed_form(LoewnerCase::ShiftedSquare, &lam);
        assert!((&m.block + &closed).amax() < 1e-12 * closed.amax());
    }

    #[test]
    fn maps_send_data_and_contract() {
        let lam = wv(&[0.3, 0.9, 2.0, 5.0, 11.0]);
        let q = RealPolynomial::from_monomial(vec![2.0, 1.0]).unwrap();
        for case in [LoewnerCase::Square, LoewnerCase::ShiftedSquare] {
            let q = if case == LoewnerCase::Square { q.clone() } else { RealPolynomial::from_monomial(vec![1.0]).unwrap() };
            let m = loewner_maps(case, &q, &lam).unwrap();
            let tx = m.t.apply(&m.x0).unwrap();
            let err = tx.coords().iter().zip(m.y0.coords()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "{case:?}: {err}");
            let mut rng = crate::random::rng(7);
            for _ in 0..20 {
                let z = CoupleVector::from_real(&crate::random::real_vector(&mut rng, 5)).unwrap();
                let tz = m.t.apply(&z).unwrap();
                for &t in TimeGrid::default().points() {
                    let (a, b) = (k_functional(t, &tz, &lam).unwrap(), k_functional(t, &z, &lam).unwrap());
                    assert!(a <= b * (1.0 + 1e-12), "{case:?} t = {t}");
                }
            }
        }
    }

    #[test]
    fn degree_bound() {
        let q = RealPolynomial::from_monomial(vec![1.0, 1.0]).unwrap();
        assert!(matches!(loewner_maps(LoewnerCase::ShiftedSquare, &q, &wv(&[1.0, 2.0, 3.0])), Err(Error::DegreeBound(_))));
    }
}
