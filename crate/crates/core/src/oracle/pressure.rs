//! Monomer-dimer pressure series from sources that share no code with the
//! cluster pipeline: the closed-form growth rate in one dimension, and exact
//! partition polynomials of small tori in two.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PressureOracleSeries {
    pub d: usize,
    /// `coefficients[k - 1]` multiplies `z^k`.
    pub coefficients: Vec<BigRational>,
}

fn rat(n: i64, m: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(m))
}

/// `ln p` for a series with `p[0] = 1`, through `z^(p.len()-1)`, from
/// `k·l_k = k·p_k − Σ_{j<k} j·l_j·p_{k−j}`.
pub fn log_series(p: &[BigRational]) -> Result<Vec<BigRational>> {
    if p.first().is_none_or(|c| !c.is_one()) {
        return Err(Error::OutOfRange {
            what: "series",
            detail: "logarithm needs constant term 1".into(),
        });
    }
    let mut l = vec![BigRational::zero(); p.len()];
    for k in 1..p.len() {
        let mut acc = p[k].clone() * BigRational::from_integer(k.into());
        for j in 1..k {
            acc -= &l[j] * &p[k - j] * BigRational::from_integer(j.into());
        }
        l[k] = acc / BigRational::from_integer(k.into());
    }
    Ok(l)
}

/// `√(1 + 4z)` through `z^(len-1)` by the binomial series.
fn sqrt_one_plus_4z(len: usize) -> Vec<BigRational> {
    let half = rat(1, 2);
    let mut out = Vec::with_capacity(len);
    let mut binom = BigRational::one();
    let mut four = BigRational::one();
    for k in 0..len {
        out.push(&binom * &four);
        let kk = BigRational::from_integer(k.into());
        binom = binom * (&half - &kk) / (&kk + BigRational::one());
        four *= BigRational::from_integer(4.into());
    }
    out
}

/// Pressure of the monomer-dimer chain, `ln((1+√(1+4z))/2)`.
pub fn chain_pressure(order: usize) -> Vec<BigRational> {
    let len = order + 1;
    let mut x: Vec<BigRational> = sqrt_one_plus_4z(len);
    x[0] += BigRational::one();
    for c in &mut x {
        *c /= BigRational::from_integer(2.into());
    }
    let l = log_series(&x).expect("constant term is 1");
    l.into_iter().skip(1).collect()
}

/// Edges of the periodic box `(Z/L)^d` as site-index pairs; sites are
/// numbered in mixed radix `L`.
fn torus_edges(d: usize, l: usize) -> Vec<(usize, usize)> {
    let n = l.pow(d as u32);
    let mut edges = Vec::with_capacity(n * d);
    for site in 0..n {
        let mut stride = 1;
        for _ in 0..d {
            let coord = (site / stride) % l;
            let next = site - coord * stride + ((coord + 1) % l) * stride;
            edges.push((site, next));
            stride *= l;
        }
    }
    edges
}

/// Number of `k`-matchings of the torus `(Z/L)^d` for `k = 0..=max_k`.
pub fn torus_matching_polynomial(d: usize, l: usize, max_k: usize) -> Result<Vec<u64>> {
    if l < 3 {
        return Err(Error::OutOfRange {
            what: "torus side",
            detail: format!("L={l}; needs L >= 3 for a simple graph"),
        });
    }
    let sites = l.checked_pow(d as u32).unwrap_or(usize::MAX);
    if sites > 128 {
        return Err(Error::CapExceeded {
            what: "torus sites",
            value: sites,
            max: 128,
        });
    }
    let edges: Vec<u128> = torus_edges(d, l)
        .into_iter()
        .map(|(a, b)| 1u128 << a | 1u128 << b)
        .collect();
    fn rec(edges: &[u128], from: usize, used: u128, depth: usize, max_k: usize, counts: &mut [u64]) {
        counts[depth] += 1;
        if depth == max_k {
            return;
        }
        for (i, &e) in edges.iter().enumerate().skip(from) {
            if used & e == 0 {
                rec(edges, i + 1, used | e, depth + 1, max_k, counts);
            }
        }
    }
    let mut counts = vec![0u64; max_k + 1];
    rec(&edges, 0, 0, 0, max_k, &mut counts);
    Ok(counts)
}

/// Per-site log of the torus partition polynomial, through `z^order`.
pub fn torus_pressure(d: usize, l: usize, order: usize) -> Result<Vec<BigRational>> {
    let min = 2 * order + 2;
    if l < min {
        return Err(Error::WindowTooSmall { window: l, min });
    }
    let poly: Vec<BigRational> = torus_matching_polynomial(d, l, order)?
        .into_iter()
        .map(|c| BigRational::from_integer(c.into()))
        .collect();
    let sites = BigRational::from_integer(l.pow(d as u32).into());
    Ok(log_series(&poly)?.into_iter().skip(1).map(|c| c / &sites).collect())
}

/// Pressure coefficients `b_1..b_order` of the monomer-dimer gas on `Z^d`.
pub fn monomer_dimer_pressure_oracle(d: usize, order: usize) -> Result<PressureOracleSeries> {
    let max = match d {
        1 => 4,
        2 => 3,
        _ => return Err(Error::InvalidDimension(d)),
    };
    if order > max {
        return Err(Error::CapExceeded {
            what: "oracle order",
            value: order,
            max,
        });
    }
    let coefficients = match d {
        1 => chain_pressure(order),
        _ => torus_pressure(2, 2 * order + 2, order)?,
    };
    Ok(PressureOracleSeries { d, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_closed_form() {
        let expect = [rat(1, 1), rat(-3, 2), rat(10, 3), rat(-35, 4)];
        assert_eq!(monomer_dimer_pressure_oracle(1, 4).unwrap().coefficients, expect);
        // (−1)^(k−1) C(2k,k)/(2k) in general
        let c = chain_pressure(8);
        assert_eq!(c[7], rat(-6435, 8));
    }

    #[test]
    fn chain_matches_cycle_polynomial() {
        assert_eq!(torus_pressure(1, 12, 5).unwrap(), chain_pressure(5));
    }

    #[test]
    fn square_lattice_low_orders() {
        let s = monomer_dimer_pressure_oracle(2, 3).unwrap().coefficients;
        assert_eq!(s[0], rat(2, 1));
        assert_eq!(s[1], rat(-7, 1));
        // larger windows agree once nothing wraps
        assert_eq!(torus_pressure(2, 9, 3).unwrap(), s);
    }

    #[test]
    fn small_polynomials() {
        // 3-cycle: one empty, three single edges, no pairs
        assert_eq!(torus_matching_polynomial(1, 3, 2).unwrap(), vec![1, 3, 0]);
        // 4×4 torus has 32 edges; 2-matchings = C(32,2) − 16·C(4,2)
        assert_eq!(torus_matching_polynomial(2, 4, 2).unwrap(), vec![1, 32, 496 - 96]);
    }

    #[test]
    fn domain_checks() {
        assert!(monomer_dimer_pressure_oracle(1, 5).is_err());
        assert!(monomer_dimer_pressure_oracle(2, 4).is_err());
        assert!(monomer_dimer_pressure_oracle(3, 1).is_err());
        assert!(matches!(torus_pressure(2, 6, 3), Err(Error::WindowTooSmall { .. })));
        assert!(log_series(&[rat(2, 1)]).is_err());
    }
}
