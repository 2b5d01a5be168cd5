//! Exact arithmetic in a real quadratic field `Q(sqrt(D))`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `x + y sqrt(d)` with rational `x, y` and integer radicand `d > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSurd {
    pub x: BigRational,
    pub y: BigRational,
    pub d: BigInt,
}

impl QuadSurd {
    pub fn new(x: BigRational, y: BigRational, d: BigInt) -> Self {
        assert!(d.is_positive(), "radicand must be positive");
        QuadSurd { x, y, d }
    }

    pub fn rational(x: BigRational, d: BigInt) -> Self {
        Self::new(x, BigRational::zero(), d)
    }

    pub fn integer(v: impl Into<BigInt>, d: BigInt) -> Self {
        Self::rational(BigRational::from_integer(v.into()), d)
    }

    fn same_field(&self, other: &QuadSurd) {
        assert_eq!(self.d, other.d, "surds from different fields");
    }

    pub fn conj(&self) -> QuadSurd {
        QuadSurd::new(self.x.clone(), -self.y.clone(), self.d.clone())
    }

    /// `x^2 - d y^2`.
    pub fn norm(&self) -> BigRational {
        &self.x * &self.x - BigRational::from_integer(self.d.clone()) * &self.y * &self.y
    }

    pub fn add(&self, o: &QuadSurd) -> QuadSurd {
        self.same_field(o);
        QuadSurd::new(&self.x + &o.x, &self.y + &o.y, self.d.clone())
    }

    pub fn sub(&self, o: &QuadSurd) -> QuadSurd {
        self.same_field(o);
        QuadSurd::new(&self.x - &o.x, &self.y - &o.y, self.d.clone())
    }

    pub fn mul(&self, o: &QuadSurd) -> QuadSurd {
        self.same_field(o);
        let d = BigRational::from_integer(self.d.clone());
        QuadSurd::new(
            &self.x * &o.x + d * &self.y * &o.y,
            &self.x * &o.y + &self.y * &o.x,
            self.d.clone(),
        )
    }

    /// `1 / self`; `None` for zero.
    pub fn recip(&self) -> Option<QuadSurd> {
        let n = self.norm();
        if n.is_zero() {
            // zero norm with d a perfect square can hide a non-zero value
            let v = self.to_rational()?;
            return if v.is_zero() {
                None
            } else {
                Some(QuadSurd::rational(v.recip(), self.d.clone()))
            };
        }
        Some(QuadSurd::new(&self.x / &n, -(&self.y / &n), self.d.clone()))
    }

    /// Exact value when `sqrt(d)` is rational or `y = 0`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.y.is_zero() {
            return Some(self.x.clone());
        }
        let r = self.d.sqrt();
        if &r * &r == self.d {
            Some(&self.x + &self.y * BigRational::from_integer(r))
        } else {
            None
        }
    }

    /// Exact sign of the real number.
    pub fn signum(&self) -> Ordering {
        let sx = self.x.cmp(&BigRational::zero());
        let sy = self.y.cmp(&BigRational::zero());
        if sy == Ordering::Equal {
            return sx;
        }
        if sx == Ordering::Equal || sx == sy {
            return sy;
        }
        // opposite signs: compare x^2 with d y^2
        let x2 = &self.x * &self.x;
        let dy2 = BigRational::from_integer(self.d.clone()) * &self.y * &self.y;
        match x2.cmp(&dy2) {
            Ordering::Greater => sx,
            Ordering::Less => sy,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn cmp_value(&self, o: &QuadSurd) -> Ordering {
        self.sub(o).signum()
    }

    /// `(a + b sqrt(d)) / l` with integers and `l > 0`.
    pub fn integer_form(&self) -> (BigInt, BigInt, BigInt) {
        let l = self.x.denom().lcm(self.y.denom());
        let a = (&self.x * BigRational::from_integer(l.clone())).to_integer();
        let b = (&self.y * BigRational::from_integer(l.clone())).to_integer();
        let g = a.gcd(&b).gcd(&l);
        if g.is_zero() || g.is_one() {
            (a, b, l)
        } else {
            (a / &g, b / &g, l / &g)
        }
    }

    /// `floor(value * 10^digits)`.
    pub fn floor_scaled(&self, digits: u32) -> BigInt {
        let (a, b, l) = self.integer_form();
        let scale = BigInt::from(10).pow(digits);
        let n = &a * &scale;
        let v = &b * &b * &self.d * &scale * &scale;
        let r = v.sqrt();
        let t = if b.is_negative() {
            if &r * &r == v {
                -r
            } else {
                -(r + BigInt::one())
            }
        } else {
            r
        };
        (n + t).div_floor(&l)
    }

    /// Decimal truncated (toward negative infinity) to `digits` places.
    pub fn to_decimal(&self, digits: u32) -> String {
        format_scaled(&self.floor_scaled(digits), digits)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_decimal(20).parse().unwrap_or(f64::NAN)
    }
}

/// Formats `v / 10^digits` with exactly `digits` fractional digits.
pub fn format_scaled(v: &BigInt, digits: u32) -> String {
    if digits == 0 {
        return v.to_string();
    }
    let negative = v.is_negative();
    let s = v.abs().to_string();
    let digits = digits as usize;
    let s = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = s.split_at(s.len() - digits);
    format!("{}{}.{}", if negative { "-" } else { "" }, int, frac)
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, l) = self.integer_form();
        let rad = if b.is_zero() {
            String::new()
        } else {
            let coeff = match b.abs() {
                c if c.is_one() => String::new(),
                c => format!("{c}*"),
            };
            let sign = if b.is_negative() { "-" } else { "+" };
            format!("{sign}{coeff}sqrt({})", self.d)
        };
        let body = if a.is_zero() && !b.is_zero() {
            rad.trim_start_matches('+').to_string()
        } else {
            format!("{a}{rad}")
        };
        if l.is_one() {
            write!(f, "{body}")
        } else if b.is_zero() {
            write!(f, "{body}/{l}")
        } else {
            write!(f, "({body})/{l}")
        }
    }
}
