use std::fmt;

use super::MatError;

/// Largest supported field size.
pub const MAX_Q: u32 = 1 << 16;

/// Finite field GF(p^k). Elements are codes in `0..q`: the polynomial
/// `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` is stored as `sum c_i p^i`.
#[derive(Clone)]
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(q - 1)`.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// Full addition table for small extension fields.
    add_table: Option<Vec<u16>>,
    neg: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) modulus {:?}", self.q, self.modulus)
    }
}

/// Factors `q` as `p^k` for a prime `p`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..).find(|d| q.is_multiple_of(*d))?;
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// Polynomials over GF(p) as coefficient vectors, constant term first.
mod poly {
    pub(super) fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub(super) fn from_code(mut c: u32, p: u32, len: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(c % p);
            c /= p;
        }
        out
    }

    pub(super) fn to_code(a: &[u32], p: u32) -> u32 {
        a.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        super::pow_mod(a, p - 2, p)
    }

    /// Remainder of `a` modulo `m` (any nonzero `m`).
    pub(super) fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let m = trim(m.to_vec());
        let mut r = trim(a.to_vec());
        let lead_inv = inv_mod(*m.last().unwrap(), p);
        while r.len() >= m.len() {
            let shift = r.len() - m.len();
            let f = (r.last().unwrap() * lead_inv) % p;
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (f * c) % p) % p;
            }
            r = trim(r);
        }
        r
    }

    pub(super) fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    /// Irreducible iff no monic factor of degree `1..=deg/2`.
    pub(super) fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        for d in 1..=deg / 2 {
            let count = p.pow(d as u32);
            for low in 0..count {
                let mut g = from_code(low, p, d);
                g.push(1);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let m = p as u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u32
}

pub fn make_field(q: u32) -> Result<Field, MatError> {
    let (p, k) = prime_power(q).ok_or(MatError::NotPrimePower(q))?;
    if q > MAX_Q {
        return Err(MatError::FieldTooLarge(q));
    }
    // Smallest monic irreducible by code value of the lower coefficients.
    let modulus = (0..q)
        .map(|low| {
            let mut f = poly::from_code(low, p, k as usize);
            f.push(1);
            f
        })
        .find(|f| k == 1 || poly::is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree");
    let mul_codes = |a: u32, b: u32| -> u32 {
        let prod = poly::mul(
            &poly::trim(poly::from_code(a, p, k as usize)),
            &poly::trim(poly::from_code(b, p, k as usize)),
            p,
        );
        poly::to_code(&poly::rem(&prod, &modulus, p), p)
    };
    let n = q - 1;
    let mut exp = vec![0u32; 2 * n as usize];
    let mut log = vec![0u32; q as usize];
    let generator = (1..q)
        .find(|&g| {
            let mut x = 1;
            for i in 1..=n {
                x = mul_codes(x, g);
                if x == 1 {
                    return i == n;
                }
            }
            false
        })
        .expect("multiplicative group is cyclic");
    let mut x = 1;
    for i in 0..n {
        exp[i as usize] = x;
        exp[(i + n) as usize] = x;
        log[x as usize] = i;
        x = mul_codes(x, generator);
    }
    let add_codes = |a: u32, b: u32| -> u32 {
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        for _ in 0..k {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    };
    let neg = (0..q)
        .map(|a| {
            let (mut a, mut out, mut place) = (a, 0, 1);
            for _ in 0..k {
                out += ((p - a % p) % p) * place;
                a /= p;
                place *= p;
            }
            out
        })
        .collect();
    let add_table = (k > 1 && q <= 1024).then(|| {
        let mut t = vec![0u16; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                t[(a * q + b) as usize] = add_codes(a, b) as u16;
            }
        }
        t
    });
    Ok(Field {
        p,
        k,
        q,
        modulus,
        exp,
        log,
        add_table,
        neg,
    })
}

impl Field {
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Coefficients of the modulus, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if let Some(t) = &self.add_table {
            return t[(a * self.q + b) as usize] as u32;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.k == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert_ne!(a, 0, "zero has no inverse");
        let n = self.q - 1;
        self.exp[((n - self.log[a as usize]) % n) as usize]
    }

    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.q - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    pub fn is_square(&self, a: u32) -> bool {
        a == 0 || self.p == 2 || self.log[a as usize].is_multiple_of(2)
    }

    pub fn sqrt(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return Some(0);
        }
        if self.p == 2 {
            return Some(self.pow(a, (self.q / 2) as u64));
        }
        let l = self.log[a as usize];
        l.is_multiple_of(2).then(|| self.exp[(l / 2) as usize])
    }

    /// The fixed primitive element used for the log tables.
    pub fn primitive_element(&self) -> u32 {
        self.exp[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(125), Some((5, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert!(make_field(12).is_err());
        assert!(make_field(1 << 17).is_err());
    }

    #[test]
    fn gf8_modulus_and_axioms() {
        let f = make_field(8).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
        // x * x^2 = x^3 = x + 1
        assert_eq!(f.mul(2, 4), 3);
    }

    #[test]
    fn prime_field() {
        let f = make_field(7).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), 5);
        assert_eq!(f.neg(2), 5);
        assert!(f.is_square(2));
        assert!(!f.is_square(3));
        assert_eq!(f.sqrt(2).map(|r| f.mul(r, r)), Some(2));
        assert_eq!(f.sqrt(3), None);
        let f = make_field(8).unwrap();
        for a in 0..8 {
            let r = f.sqrt(a).unwrap();
            assert_eq!(f.mul(r, r), a);
        }
    }

    #[test]
    fn field_axioms_small_fields() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64] {
            let f = make_field(q).unwrap();
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "q={q} a={a}");
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    let c = (a * 7 + b * 3 + 1) % q;
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                }
            }
        }
    }
}
