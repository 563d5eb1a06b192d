use crate::error::{Error, Result};
use crate::gluing::GluingInvariants;

fn check_v1(p: usize, r: usize) -> Result<()> {
    if p < 5 || r < 2 || r + 3 > p {
        return Err(Error::OutOfRange(format!(
            "need p >= 5 and 2 <= r <= p - 3, got p = {p}, r = {r}"
        )));
    }
    Ok(())
}

/// Dimension of the interior part (functions untouched by the interface).
pub fn dim_v1(p: usize, r: usize, k: usize) -> Result<usize> {
    check_v1(p, r)?;
    let m = k * (p - r);
    Ok(2 * (p - 2 + m) * (p + 1 + m))
}

/// Dimensions of the three trace spaces `(Gamma_0, Gamma_1, Gamma_2)`.
pub fn dim_gamma_raw(
    p: usize,
    r: usize,
    k: usize,
    d_atilde: usize,
    d_h: usize,
    z_beta: usize,
) -> Result<(usize, usize, usize)> {
    let (p, r, k, da, dh, z) = (p as i64, r as i64, k as i64, d_atilde as i64, d_h as i64, z_beta as i64);
    if p - 2 * da < r + 1 || p - da - dh < r + 2 {
        return Err(Error::DegreeBudget(format!(
            "p = {p} is too small for d_atilde = {da}, d_h = {dh} at regularity {r}"
        )));
    }
    let g0 = k * (p - r - 1) + p + z + 1;
    let g1 = k * (p - da - dh - r - 1) + p - da - dh + z + 1;
    let g2 = k * (p - 2 * da - r) + p + 1 - 2 * da;
    Ok((g0 as usize, g1 as usize, g2 as usize))
}

pub fn dim_gamma(inv: &GluingInvariants, p: usize, r: usize, k: usize) -> Result<(usize, usize, usize)> {
    dim_gamma_raw(p, r, k, inv.d_atilde, inv.d_h, inv.z_beta)
}

/// Closed-form dimension of the interface part.
pub fn dim_v2_raw(p: usize, r: usize, k: usize, d_atilde: usize, d_h: usize, z_beta: usize) -> Result<usize> {
    dim_gamma_raw(p, r, k, d_atilde, d_h, z_beta)?;
    let (p, r, k, da, dh, z) = (p as i64, r as i64, k as i64, d_atilde as i64, d_h as i64, z_beta as i64);
    Ok(((k + 1) * (3 * (p + 1) - 3 * da - dh) - (3 * r + 5) * k + 2 * z) as usize)
}

pub fn dim_v2(inv: &GluingInvariants, p: usize, r: usize, k: usize) -> Result<usize> {
    dim_v2_raw(p, r, k, inv.d_atilde, inv.d_h, inv.z_beta)
}

/// Dimension of the uniformly constructed interface subspace.
pub fn dim_w2(p: usize, r: usize, k: usize, d_alpha: usize) -> Result<usize> {
    if p < r + 2 * d_alpha || r + 2 >= p {
        return Err(Error::DegreeBudget(format!(
            "p = {p} is too small for d_alpha = {d_alpha} at regularity {r}"
        )));
    }
    let (p, r, k, da) = (p as i64, r as i64, k as i64, d_alpha as i64);
    Ok(((k + 1) * (3 * p - 3 * da) + 3 * (1 - k - k * r)) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_dimension() {
        let dims: Vec<usize> = [0, 1, 3, 7, 15, 31].iter().map(|&k| dim_v1(5, 2, k).unwrap()).collect();
        assert_eq!(dims, vec![36, 108, 360, 1296, 4896, 19008]);
        assert_eq!(dim_v1(6, 3, 0).unwrap(), 56);
        assert!(dim_v1(4, 1, 0).is_err());
        assert!(dim_v1(5, 3, 0).is_err());
    }

    #[test]
    fn gamma_sum_matches_closed_form() {
        for p in 5..=7 {
            for r in 2..=p - 3 {
                for k in 0..=3 {
                    for (da, dh) in [(1, 0), (0, 0), (0, 1)] {
                        for z in [0, 1, 2] {
                            if z > k {
                                continue;
                            }
                            let (a, b, c) = dim_gamma_raw(p, r, k, da, dh, z).unwrap();
                            assert_eq!(a + b + c, dim_v2_raw(p, r, k, da, dh, z).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn examples() {
        // Symmetric pair without common root: d_atilde = 1.
        let a: Vec<usize> = [0, 1, 3, 7, 15, 31].iter().map(|&k| dim_v2_raw(5, 2, k, 1, 0, 0).unwrap()).collect();
        assert_eq!(a, vec![15, 19, 27, 43, 75, 139]);
        let b: Vec<usize> = [0, 1, 3, 7, 15, 31].iter().map(|&k| dim_v2_raw(5, 2, k, 0, 0, 0).unwrap()).collect();
        assert_eq!(b, vec![18, 25, 39, 67, 123, 235]);
        let w: Vec<usize> = [0, 1, 3, 7, 15, 31].iter().map(|&k| dim_w2(5, 2, k, 1).unwrap()).collect();
        assert_eq!(w, vec![15, 18, 24, 36, 60, 108]);
        assert_eq!(dim_w2(5, 2, 0, 0).unwrap(), 18);
    }

    #[test]
    fn beta_zero_collapses_gamma1() {
        for k in 0..4 {
            let (_, g1, _) = dim_gamma_raw(5, 2, k, 0, 0, k).unwrap();
            assert_eq!(g1, 5 + 1 + k * 3);
        }
    }
}
