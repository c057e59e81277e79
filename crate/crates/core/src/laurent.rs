//! Exact Laurent polynomials in the two skein variables `a` and `z`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite map `(i, j) ↦ c` standing for `Σ c·aⁱzʲ`. Zero coefficients are
/// never stored, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<(i32, i32), BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, a: i32, z: i32) -> Self {
        let mut p = Self::zero();
        p.add_term((a, z), c.into());
        p
    }

    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (i32, i32, C)>) -> Self {
        let mut p = Self::zero();
        for (a, z, c) in terms {
            p.add_term((a, z), c.into());
        }
        p
    }

    /// `δ = (a − a⁻¹)/z`, the value of a distant unknot.
    pub fn delta() -> Self {
        Self::from_terms([(1, -1, 1), (-1, -1, -1)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i32, &BigInt)> {
        self.terms.iter().map(|(&(a, z), c)| (a, z, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: i32, z: i32) -> BigInt {
        self.terms.get(&(a, z)).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, key: (i32, i32), c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Multiply by `aⁱzʲ`.
    pub fn shift(&self, a: i32, z: i32) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((i + a, j + z), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitution `(a, z) ↦ (a⁻¹, −z)`: the invariant of the mirror image.
    pub fn mirror(&self) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((-i, j), if j % 2 == 0 { c.clone() } else { -c }))
                .collect(),
        }
    }

    /// Max and min exponents of `a` and `z`, if nonzero.
    pub fn spans(&self) -> Option<((i32, i32), (i32, i32))> {
        if self.is_zero() {
            return None;
        }
        let amin = self.terms.keys().map(|k| k.0).min().unwrap();
        let amax = self.terms.keys().map(|k| k.0).max().unwrap();
        let zmin = self.terms.keys().map(|k| k.1).min().unwrap();
        let zmax = self.terms.keys().map(|k| k.1).max().unwrap();
        Some(((amin, amax), (zmin, zmax)))
    }

    pub fn to_json(&self) -> LaurentJson {
        LaurentJson {
            terms: self
                .terms
                .iter()
                .map(|(&(a, z), c)| TermJson {
                    a,
                    z,
                    c: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &LaurentJson) -> Result<Self> {
        let mut p = Self::zero();
        for (idx, t) in j.terms.iter().enumerate() {
            let c: BigInt = t.c.parse().map_err(|_| Error::Parse {
                pos: idx,
                msg: format!("bad integer coefficient '{}'", t.c),
            })?;
            p.add_term((t.a, t.z), c);
        }
        Ok(p)
    }

    /// Coefficients as `f64`; lossy only beyond 2⁵³.
    pub fn float_terms(&self) -> impl Iterator<Item = (i32, i32, f64)> + '_ {
        self.terms
            .iter()
            .map(|(&(a, z), c)| (a, z, c.to_f64().unwrap_or(f64::NAN)))
    }
}

/// Wire form `{"terms":[{"a":i,"z":j,"c":"integer-string"}]}`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct LaurentJson {
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct TermJson {
    pub a: i32,
    pub z: i32,
    pub c: String,
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (&k, c) in &rhs.terms {
            self.add_term(k, c.clone());
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, -c);
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // highest z-degree last, within a z-degree highest a-power first
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)));
        for (n, key) in keys.iter().enumerate() {
            let c = &self.terms[key];
            let (i, j) = *key;
            let neg = c.is_negative();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mag = c.abs();
            let bare = i == 0 && j == 0;
            if !mag.is_one() || bare {
                write!(f, "{mag}")?;
            }
            for (v, e) in [('a', i), ('z', j)] {
                match e {
                    0 => {}
                    1 => write!(f, "{v}")?,
                    _ => write!(f, "{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}
