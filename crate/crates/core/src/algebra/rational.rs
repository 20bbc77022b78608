//! Exact rational arithmetic for slopes and bounds. Numerators and
//! denominators stay within i128 during reduction; desk-scale slopes are tiny
//! so overflow checks are plain assertions.

/// A reduced fraction num/den with den > 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Rational {
        assert!(den != 0, "zero denominator");
        let mut n = num as i128;
        let mut d = den as i128;
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_i128(n.unsigned_abs(), d.unsigned_abs()).max(1) as i128;
        Rational {
            num: (n / g) as i64,
            den: (d / g) as i64,
        }
    }

    pub fn integer(n: i64) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn zero() -> Rational {
        Rational { num: 0, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn add(&self, o: Rational) -> Rational {
        let n = self.num as i128 * o.den as i128 + o.num as i128 * self.den as i128;
        let d = self.den as i128 * o.den as i128;
        let g = gcd_i128(n.unsigned_abs(), d.unsigned_abs()).max(1) as i128;
        Rational {
            num: i64::try_from(n / g).expect("rational overflow"),
            den: i64::try_from(d / g).expect("rational overflow"),
        }
    }

    pub fn sub(&self, o: Rational) -> Rational {
        self.add(Rational {
            num: -o.num,
            den: o.den,
        })
    }

    pub fn mul(&self, o: Rational) -> Rational {
        let n = self.num as i128 * o.num as i128;
        let d = self.den as i128 * o.den as i128;
        let g = gcd_i128(n.unsigned_abs(), d.unsigned_abs()).max(1) as i128;
        Rational {
            num: i64::try_from(n / g).expect("rational overflow"),
            den: i64::try_from(d / g).expect("rational overflow"),
        }
    }

    pub fn min(self, o: Rational) -> Rational {
        if self <= o {
            self
        } else {
            o
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl core::fmt::Display for Rational {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd_i128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}
