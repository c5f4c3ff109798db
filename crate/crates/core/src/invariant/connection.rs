//! Levi-Civita connection of a left-invariant metric, straight from the Koszul formula.
//! Used as an independent check of the torsion-based curvature formulas.

use crate::error::{Error, Result};
use crate::exterior::Metric;
use crate::g2::SymTensor;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::LieAlgebra7;

/// Γ with ∇_{e_j} e_k = Σ_m Γ[j][k][m] e_m.
pub fn levi_civita<S: Scalar>(l: &LieAlgebra7<S>, g: &Metric<S>) -> Vec<Vec<Vec<S>>> {
    let c = l.structure_constants();
    let gm = g.matrix();
    let gi = g.inverse();
    // B[j][k][l] = ⟨[e_j, e_k], e_l⟩
    let mut b = vec![vec![vec![S::zero(); 7]; 7]; 7];
    for j in 0..7 {
        for k in 0..7 {
            for i in 0..7 {
                let cijk = &c[i][j][k];
                if cijk.is_zero() {
                    continue;
                }
                for m in 0..7 {
                    b[j][k][m] = b[j][k][m].clone() + cijk.clone() * gm[(i, m)].clone();
                }
            }
        }
    }
    let half = S::ratio(1, 2);
    let mut gamma = vec![vec![vec![S::zero(); 7]; 7]; 7];
    for j in 0..7 {
        for k in 0..7 {
            let low: Vec<S> = (0..7)
                .map(|m| {
                    half.clone() * (b[j][k][m].clone() - b[k][m][j].clone() + b[m][j][k].clone())
                })
                .collect();
            gamma[j][k] = gi.mul_vec(&low);
        }
    }
    gamma
}

/// Ric(e_b, e_c) = Σ_a ⟨R(e_a, e_b)e_c, e^a⟩ with R(x,y) = [∇_x, ∇_y] − ∇_{[x,y]}.
pub fn ricci_via_connection<S: Scalar>(l: &LieAlgebra7<S>, g: &Metric<S>) -> Result<SymTensor<S>> {
    let r = l.jacobi_residual();
    if if S::EXACT { r != 0.0 } else { r > 1e-9 } {
        return Err(Error::Jacobi(r));
    }
    let c = l.structure_constants();
    let gam = levi_civita(l, g);
    let mut ric = Matrix::zeros(7);
    for bb in 0..7 {
        for cc in 0..7 {
            let mut s = S::zero();
            for a in 0..7 {
                // component a of ∇_a∇_b e_c − ∇_b∇_a e_c − ∇_{[a,b]} e_c
                for m in 0..7 {
                    let t1 = gam[bb][cc][m].clone() * gam[a][m][a].clone();
                    let t2 = gam[a][cc][m].clone() * gam[bb][m][a].clone();
                    let t3 = c[m][a][bb].clone() * gam[m][cc][a].clone();
                    s = s + t1 - t2 - t3;
                }
            }
            ric[(bb, cc)] = s;
        }
    }
    Ok(SymTensor::new_unchecked(ric))
}
