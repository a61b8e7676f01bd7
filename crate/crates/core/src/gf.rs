//! Finite-field arithmetic over GF(2^m).
//!
//! Elements are stored as integers below `2^m` where each bit is a
//! coefficient of a polynomial over GF(2). Addition is XOR; multiplication
//! and inversion go through log/antilog tables built once per field.
//!
//! The default field is GF(2^8) with the reduction polynomial
//! x^8 + x^4 + x^3 + x^2 + 1 (0x11D), the conventional choice for 8-bit
//! erasure codes. Widths up to m = 16 are supported.

use thiserror::Error;

/// An element of GF(2^m), stored in the low `m` bits.
pub type FieldElement = u16;

/// Maximum supported symbol width in bits.
pub const MAX_WIDTH: u32 = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    #[error("symbol width {0} is out of range (1..={MAX_WIDTH})")]
    UnsupportedWidth(u32),
    #[error("reduction polynomial {poly:#x} does not have degree {m}")]
    DegreeMismatch { poly: u32, m: u32 },
    #[error("reduction polynomial {0:#x} is reducible over GF(2)")]
    ReduciblePolynomial(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// Parameters describing a binary extension field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    /// Symbol width in bits.
    pub m: u32,
    /// Integer encoding of the irreducible reduction polynomial, degree-m
    /// bit included (e.g. 0x11D for GF(2^8)).
    pub reduction_polynomial: u32,
}

impl FieldSpec {
    /// The default GF(2^8) spec.
    pub fn gf256() -> Self {
        FieldSpec { m: 8, reduction_polynomial: 0x11D }
    }

    /// A conventional irreducible polynomial for each supported width.
    pub fn default_for_width(m: u32) -> Option<Self> {
        // Low-weight irreducible polynomials over GF(2), degree-m bit included.
        let poly: u32 = match m {
            1 => 0x3,
            2 => 0x7,
            3 => 0xB,
            4 => 0x13,
            5 => 0x25,
            6 => 0x43,
            7 => 0x89,
            8 => 0x11D,
            9 => 0x211,
            10 => 0x409,
            11 => 0x805,
            12 => 0x1053,
            13 => 0x201B,
            14 => 0x4143,
            15 => 0x8003,
            16 => 0x1100B,
            _ => return None,
        };
        Some(FieldSpec { m, reduction_polynomial: poly })
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::gf256()
    }
}

/// A concrete GF(2^m) with precomputed log/antilog tables.
///
/// Construction validates the reduction polynomial (degree and
/// irreducibility). All operations after construction are pure lookups and
/// safe to share across threads.
#[derive(Debug, Clone)]
pub struct Field {
    m: u32,
    poly: u32,
    order: u32,
    log: Vec<u16>,
    // Doubled so exp[log a + log b] needs no modular reduction.
    exp: Vec<u16>,
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self, GfError> {
        let m = spec.m;
        let poly = spec.reduction_polynomial;
        if m == 0 || m > MAX_WIDTH {
            return Err(GfError::UnsupportedWidth(m));
        }
        if 32 - poly.leading_zeros() != m + 1 {
            return Err(GfError::DegreeMismatch { poly, m });
        }
        if !poly_is_irreducible(poly) {
            return Err(GfError::ReduciblePolynomial(poly));
        }
        let order: u32 = 1 << m;
        let group = order - 1;

        // The multiplicative group of a field is cyclic, so some element
        // generates all of it; search from 2 upward. GF(2) has the trivial
        // group, generated by 1.
        let mut generator = if group == 1 { 1 } else { 0 };
        'outer: for g in 2..order {
            let mut x = 1u32;
            for i in 1..=group {
                x = clmul_reduce(x, g, poly, m);
                if x == 1 {
                    if i == group {
                        generator = g;
                        break 'outer;
                    }
                    continue 'outer;
                }
            }
        }
        debug_assert!(generator != 0, "irreducible field must have a generator");

        let mut log = vec![0u16; order as usize];
        let mut exp = vec![0u16; 2 * group as usize];
        let mut x = 1u32;
        for i in 0..group {
            exp[i as usize] = x as u16;
            exp[(i + group) as usize] = x as u16;
            log[x as usize] = i as u16;
            x = clmul_reduce(x, generator, poly, m);
        }

        Ok(Field { m, poly, order, log, exp })
    }

    /// The default GF(2^8) field.
    pub fn gf256() -> Self {
        Field::new(FieldSpec::gf256()).expect("0x11D is irreducible")
    }

    pub fn width(&self) -> u32 {
        self.m
    }

    /// Number of field elements, 2^m.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { m: self.m, reduction_polynomial: self.poly }
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        (a as u32) < self.order
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        a ^ b
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        debug_assert!(self.contains(a));
        if a == 0 {
            return Err(GfError::ZeroInverse);
        }
        let group = (self.order - 1) as usize;
        Ok(self.exp[group - self.log[a as usize] as usize])
    }

    /// a / b; errors when b = 0.
    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u32) -> FieldElement {
        debug_assert!(self.contains(a));
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let group = self.order - 1;
        let l = (self.log[a as usize] as u64 * e as u64) % group as u64;
        self.exp[l as usize]
    }
}

/// Carry-less multiply of `a` and `b` reduced by `poly`; the table-free
/// reference route, also used during table construction.
fn clmul_reduce(a: u32, b: u32, poly: u32, m: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    let high = 1u32 << m;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & high != 0 {
            a ^= poly;
        }
    }
    acc
}

/// Trial division by every polynomial of degree 1..=deg/2.
fn poly_is_irreducible(poly: u32) -> bool {
    let deg = 31 - poly.leading_zeros();
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for q in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(poly, q) == 0 {
                return false;
            }
        }
    }
    true
}

/// Remainder of carry-less division of `a` by `b`.
fn poly_rem(a: u32, b: u32) -> u32 {
    let db = 31 - b.leading_zeros();
    let mut r = a;
    while r != 0 {
        let dr = 31 - r.leading_zeros();
        if dr < db {
            break;
        }
        r ^= b << (dr - db);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_is_xor() {
        let f = Field::gf256();
        assert_eq!(f.add(0x57, 0x83), 0xD4);
        assert_eq!(f.add(0x3A, 0), 0x3A);
        assert_eq!(f.add(0xFF, 0xFF), 0x00);
    }

    #[test]
    fn mul_identities() {
        let f = Field::gf256();
        for a in 0..256u16 {
            assert_eq!(f.mul(a, 0x01), a);
            assert_eq!(f.mul(a, 0x00), 0);
        }
    }

    #[test]
    fn mul_matches_shift_reduce_oracle() {
        // Independent Russian-peasant route over the full 256x256 grid.
        let f = Field::gf256();
        for a in 0..256u32 {
            for b in 0..256u32 {
                let expect = clmul_reduce(a, b, 0x11D, 8) as u16;
                assert_eq!(f.mul(a as u16, b as u16), expect, "a={a:#x} b={b:#x}");
            }
        }
        // Spot value from the reduction step: 0x02 * 0x80 overflows into the
        // degree-8 bit and reduces by 0x11D.
        assert_eq!(f.mul(0x02, 0x80), (0x11D ^ 0x100) as u16);
    }

    #[test]
    fn inverse_over_all_nonzero() {
        let f = Field::gf256();
        assert_eq!(f.inv(0x01).unwrap(), 0x01);
        for a in 1..256u16 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 0x01, "a={a:#x}");
        }
        assert_eq!(f.inv(0), Err(GfError::ZeroInverse));
    }

    #[test]
    fn distributivity_sampled() {
        let f = Field::gf256();
        for &a in &[0x02u16, 0x1D, 0x53, 0xC6, 0xFF] {
            for b in 0..256u16 {
                for c in 0..256u16 {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn multiplicative_order() {
        let f = Field::gf256();
        for a in 1..256u16 {
            assert_eq!(f.pow(a, 255), 1, "a={a:#x}");
        }
    }

    #[test]
    fn log_antilog_round_trip() {
        let f = Field::gf256();
        for a in 1..256usize {
            assert_eq!(f.exp[f.log[a] as usize], a as u16);
        }
    }

    #[test]
    fn other_widths() {
        for m in 1..=16 {
            let spec = FieldSpec::default_for_width(m).unwrap();
            let f = Field::new(spec).unwrap();
            let order = f.order();
            // Sampled inverse check; exhaustive for small fields.
            let step = if order > 1024 { 37 } else { 1 };
            let mut a = 1u32;
            while a < order {
                let e = a as u16;
                assert_eq!(f.mul(e, f.inv(e).unwrap()), 1, "m={m} a={a}");
                a += step;
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert_eq!(
            Field::new(FieldSpec { m: 8, reduction_polynomial: 0x1FF }).unwrap_err(),
            // x^8 + ... + 1 = (x+1)(...), reducible
            GfError::ReduciblePolynomial(0x1FF)
        );
        assert!(matches!(
            Field::new(FieldSpec { m: 8, reduction_polynomial: 0x3D }).unwrap_err(),
            GfError::DegreeMismatch { .. }
        ));
        assert_eq!(
            Field::new(FieldSpec { m: 17, reduction_polynomial: 0x2_0001 }).unwrap_err(),
            GfError::UnsupportedWidth(17)
        );
    }

    #[test]
    fn irreducibility_helper() {
        assert!(poly_is_irreducible(0x11D));
        assert!(poly_is_irreducible(0x11B)); // AES polynomial
        assert!(!poly_is_irreducible(0x100)); // x^8
        assert!(!poly_is_irreducible(0x101)); // x^8+1 = (x+1)^8
    }
}
