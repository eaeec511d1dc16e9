//! Quaternions and octonions with the multiplication table read off the G₂ form.
//!
//! For imaginary units, `e_i e_j = −δ_ij + Σ_k Ω_ijk e_k`, where `Ω_ijk` are the
//! signed coefficients of the 3-form returned by [`crate::vcp::g2_form`].

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::AlternatingTensor;

/// Product of two units: `e_i e_j = sign · e_k`, index 0 being the real unit.
#[derive(Clone, Copy, Debug, PartialEq)]
struct UnitProduct {
    sign: f64,
    k: usize,
}

fn table() -> &'static [[UnitProduct; 8]; 8] {
    static TABLE: OnceLock<[[UnitProduct; 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let omega = crate::vcp::g2_form();
        let mut t = [[UnitProduct { sign: 0.0, k: 0 }; 8]; 8];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = match (i, j) {
                    (0, _) => UnitProduct { sign: 1.0, k: j },
                    (_, 0) => UnitProduct { sign: 1.0, k: i },
                    _ if i == j => UnitProduct { sign: -1.0, k: 0 },
                    _ => {
                        let (k, c) = (1..=7)
                            .map(|k| (k, omega.coeff_seq(&[i - 1, j - 1, k - 1])))
                            .find(|&(_, c)| c != 0.0)
                            .expect("Ω has exactly one term through every index pair");
                        UnitProduct { sign: c, k }
                    }
                };
            }
        }
        t
    })
}

/// Element of 𝕆 with coordinates `(c₀; c₁,…,c₇)` in the basis `(1, e₁,…,e₇)`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub const ONE: Octonion = Octonion([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    /// Basis unit `e_i`, with `e_0 = 1`.
    pub fn unit(i: usize) -> Self {
        let mut c = [0.0; 8];
        c[i] = 1.0;
        Octonion(c)
    }

    pub fn from_slice(c: &[f64]) -> Result<Self> {
        let arr: [f64; 8] = c.try_into().map_err(|_| Error::DimensionMismatch {
            expected: 8,
            found: c.len(),
        })?;
        Ok(Octonion(arr))
    }

    /// Imaginary octonion from a vector of ℝ⁷ ≅ Im𝕆.
    pub fn from_imaginary(v: &DVector<f64>) -> Result<Self> {
        if v.len() != 7 {
            return Err(Error::DimensionMismatch {
                expected: 7,
                found: v.len(),
            });
        }
        let mut c = [0.0; 8];
        c[1..].copy_from_slice(v.as_slice());
        Ok(Octonion(c))
    }

    pub fn from_vector(v: &DVector<f64>) -> Result<Self> {
        Self::from_slice(v.as_slice())
    }

    pub fn to_vector(self) -> DVector<f64> {
        DVector::from_row_slice(&self.0)
    }

    pub fn imaginary_part(self) -> DVector<f64> {
        DVector::from_row_slice(&self.0[1..])
    }

    pub fn re(self) -> f64 {
        self.0[0]
    }

    pub fn im(self) -> Self {
        let mut c = self.0;
        c[0] = 0.0;
        Octonion(c)
    }

    pub fn conj(self) -> Self {
        let mut c = self.0.map(|x| -x);
        c[0] = self.0[0];
        Octonion(c)
    }

    pub fn dot(self, other: Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Octonion(self.0.map(|x| x * s))
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Octonion product.
pub fn oct_mul(a: Octonion, b: Octonion) -> Octonion {
    let t = table();
    let mut out = [0.0; 8];
    for (row, &x) in t.iter().zip(&a.0) {
        if x == 0.0 {
            continue;
        }
        for (p, &y) in row.iter().zip(&b.0) {
            out[p.k] += p.sign * x * y;
        }
    }
    Octonion(out)
}

/// Associator `(ab)c − a(bc)`.
pub fn associator(a: Octonion, b: Octonion, c: Octonion) -> Octonion {
    oct_mul(oct_mul(a, b), c) - oct_mul(a, oct_mul(b, c))
}

fn imaginary_check(a: Octonion) -> Result<()> {
    if a.0[0].abs() > 1e-12 {
        Err(Error::NotImaginary(a.0[0]))
    } else {
        Ok(())
    }
}

/// `a × b = Im(ab)` on imaginary octonions.
pub fn cross2(a: Octonion, b: Octonion) -> Result<Octonion> {
    imaginary_check(a)?;
    imaginary_check(b)?;
    Ok(oct_mul(a, b).im())
}

/// `a × b × c = ½(a(b̄c) − c(b̄a))`.
pub fn cross3(a: Octonion, b: Octonion, c: Octonion) -> Octonion {
    let bc = oct_mul(b.conj(), c);
    let ba = oct_mul(b.conj(), a);
    (oct_mul(a, bc) - oct_mul(c, ba)).scale(0.5)
}

/// The 4-form `(a,b,c,d) ↦ ⟨cross3(a,b,c), d⟩` on ℝ⁸ with `(1,e₁,…,e₇) ↦ (x₁,…,x₈)`.
pub fn cross3_form() -> AlternatingTensor {
    let mut terms = Vec::new();
    for s in crate::exterior::subsets(8, 4) {
        let v = cross3(Octonion::unit(s[0]), Octonion::unit(s[1]), Octonion::unit(s[2])).0[s[3]];
        if v != 0.0 {
            terms.push((s.iter().map(|i| i + 1).collect(), v));
        }
    }
    AlternatingTensor::from_terms(8, 4, terms).expect("valid 4-form on ℝ⁸")
}

/// Multiplication table of the units as signed labels (`"+e3"`, `"-1"`).
pub fn multiplication_table() -> Vec<Vec<String>> {
    let t = table();
    t.iter()
        .map(|row| {
            row.iter()
                .map(|p| {
                    let sign = if p.sign > 0.0 { '+' } else { '-' };
                    let unit = if p.k == 0 { "1".to_string() } else { format!("e{}", p.k) };
                    format!("{sign}{unit}")
                })
                .collect()
        })
        .collect()
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(rhs.0) {
            *x += y;
        }
        Octonion(c)
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Self {
        Octonion(self.0.map(|x| -x))
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Self) -> Self {
        oct_mul(self, rhs)
    }
}

/// Quaternion `w + x·i + y·j + z·k`, identified with `span(1, e₁, e₂, e₃) ⊂ 𝕆`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize)]
pub struct Quaternion(pub [f64; 4]);

impl Quaternion {
    pub fn unit(i: usize) -> Self {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        Quaternion(c)
    }

    pub fn conj(self) -> Self {
        let [w, x, y, z] = self.0;
        Quaternion([w, -x, -y, -z])
    }

    pub fn norm(self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_octonion(self) -> Octonion {
        let mut c = [0.0; 8];
        c[..4].copy_from_slice(&self.0);
        Octonion(c)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Self) -> Self {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = rhs.0;
        Quaternion([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_for;
    use rand::Rng;

    fn e(i: usize) -> Octonion {
        Octonion::unit(i)
    }

    fn random_oct(rng: &mut impl Rng) -> Octonion {
        let mut c = [0.0; 8];
        for x in &mut c {
            *x = rng.random_range(-1.0..1.0);
        }
        Octonion(c)
    }

    #[test]
    fn unit_products() {
        assert_eq!(oct_mul(e(1), e(2)), e(3));
        assert_eq!(oct_mul(e(1), e(6)), -e(7));
        assert_eq!(oct_mul(e(1), e(1)), -Octonion::ONE);
        assert_eq!(oct_mul(e(2), e(1)), -e(3));
    }

    #[test]
    fn cross2_examples() {
        assert_eq!(cross2(e(2), e(5)).unwrap(), e(7));
        assert_eq!(cross2(e(1), e(1)).unwrap(), Octonion::default());
        assert_eq!(cross2(e(3), e(4)).unwrap(), e(7));
        assert!(matches!(cross2(Octonion::ONE, e(1)), Err(Error::NotImaginary(_))));
    }

    #[test]
    fn cross3_examples() {
        // Oracle: explicit composition ½(a(b̄c) − c(b̄a)) with a = 1, b = e1, c = e2:
        // b̄c = −e1e2 = −e3, b̄a = −e1, c(b̄a) = −e2e1 = e3, so ½(−e3 − e3) = −e3.
        assert_eq!(cross3(Octonion::ONE, e(1), e(2)), -e(3));
        let r = cross3(e(1), e(1), e(2));
        assert_eq!(r.dot(e(1)), 0.0);
        let d = cross3(Octonion::ONE, e(1), e(1));
        assert_eq!(d.0[0], 0.0);
        assert_eq!(d.0[1], 0.0);
    }

    #[test]
    fn cross2_matches_g2_form_on_basis() {
        let omega = crate::vcp::g2_form();
        for i in 1..=7 {
            for j in 1..=7 {
                let c = cross2(e(i), e(j)).unwrap();
                for k in 1..=7 {
                    assert_eq!(c.0[k], omega.coeff(&[i, j, k]), "({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn alternativity_and_norm_multiplicativity() {
        let mut rng = rng_for(11, 0);
        for _ in 0..10_000 {
            let (a, b, c) = (random_oct(&mut rng), random_oct(&mut rng), random_oct(&mut rng));
            let abc = associator(a, b, c);
            assert!((abc + associator(b, a, c)).max_abs() < 1e-10);
            assert!((abc + associator(a, c, b)).max_abs() < 1e-10);
            let lhs = oct_mul(a, b).norm();
            let rhs = a.norm() * b.norm();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }

    #[test]
    fn quaternion_agrees_with_octonion_subalgebra() {
        let mut rng = rng_for(5, 0);
        for _ in 0..100 {
            let p = Quaternion([0, 1, 2, 3].map(|_| rng.random_range(-1.0..1.0)));
            let q = Quaternion([0, 1, 2, 3].map(|_| rng.random_range(-1.0..1.0)));
            let via_oct = oct_mul(p.to_octonion(), q.to_octonion());
            assert!((via_oct - (p * q).to_octonion()).max_abs() < 1e-14);
        }
        let (i, j, k) = (Quaternion::unit(1), Quaternion::unit(2), Quaternion::unit(3));
        assert_eq!(i * j, k);
        assert_eq!(i * j * k, Quaternion([-1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn table_json_labels() {
        let t = multiplication_table();
        assert_eq!(t[1][2], "+e3");
        assert_eq!(t[1][6], "-e7");
        assert_eq!(t[3][3], "-1");
    }
}
