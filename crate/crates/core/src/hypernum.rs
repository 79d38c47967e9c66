//! Exact numbers of the form `r + εs` with rational `r`, `s`.
//!
//! [`Lex`] is the ambient lexicographic group `ℚ ×lex ℚ`: values are compared
//! on the standard part first and on the infinitesimal coefficient only on ties.
//! [`DualRational`] is the unit interval `[(0,0), (1,0)]` of that group, the
//! codomain of hyperstates, equipped with the truncated MV operations.
//!
//! `ε` itself is never a number here; it is the position of the second
//! coordinate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    Rational::from_str(trimmed).map_err(|_| Error::Parse(format!("not an exact fraction: {text:?}")))
}

/// An element of `ℚ ×lex ℚ`. Field order makes the derived `Ord` lexicographic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lex {
    pub std: Rational,
    pub inf: Rational,
}

impl Lex {
    pub fn new(std: Rational, inf: Rational) -> Self {
        Lex { std, inf }
    }

    pub fn zero() -> Self {
        Lex::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Lex::new(Rational::one(), Rational::zero())
    }

    pub fn standard(std: Rational) -> Self {
        Lex::new(std, Rational::zero())
    }

    pub fn infinitesimal(inf: Rational) -> Self {
        Lex::new(Rational::zero(), inf)
    }

    pub fn is_zero(&self) -> bool {
        self.std.is_zero() && self.inf.is_zero()
    }

    /// True when the value lies in the interval `[0, 1]` of the lexicographic group.
    pub fn in_unit_interval(&self) -> bool {
        *self >= Lex::zero() && *self <= Lex::one()
    }
}

impl Add for Lex {
    type Output = Lex;
    fn add(self, rhs: Lex) -> Lex {
        Lex::new(self.std + rhs.std, self.inf + rhs.inf)
    }
}

impl AddAssign for Lex {
    fn add_assign(&mut self, rhs: Lex) {
        *self = *self + rhs;
    }
}

impl Sub for Lex {
    type Output = Lex;
    fn sub(self, rhs: Lex) -> Lex {
        Lex::new(self.std - rhs.std, self.inf - rhs.inf)
    }
}

impl Neg for Lex {
    type Output = Lex;
    fn neg(self) -> Lex {
        Lex::new(-self.std, -self.inf)
    }
}

impl fmt::Display for Lex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+e{}", self.std, self.inf)
    }
}

impl FromStr for Lex {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (std, inf) = text
            .split_once("+e")
            .ok_or_else(|| Error::Parse(format!("expected `r+es`, got {text:?}")))?;
        Ok(Lex::new(parse_rational(std)?, parse_rational(inf)?))
    }
}

/// A member of the MV-algebra `Γ(ℚ ×lex ℚ, (1,0))`.
///
/// Invariants: `0 <= std <= 1`; `std == 0` implies `inf >= 0`; `std == 1`
/// implies `inf <= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DualRational {
    std: Rational,
    inf: Rational,
}

impl DualRational {
    pub fn new(std: Rational, inf: Rational) -> Result<Self> {
        let candidate = Lex::new(std, inf);
        if !candidate.in_unit_interval() {
            return Err(Error::structural(
                "dual rational",
                format!("{candidate} lies outside [0, 1]"),
            ));
        }
        Ok(DualRational { std, inf })
    }

    pub fn zero() -> Self {
        DualRational {
            std: Rational::zero(),
            inf: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        DualRational {
            std: Rational::one(),
            inf: Rational::zero(),
        }
    }

    /// Returns `(x°, x*)`.
    pub fn parts(&self) -> (Rational, Rational) {
        (self.std, self.inf)
    }

    pub fn standard_part(&self) -> Rational {
        self.std
    }

    pub fn infinitesimal_part(&self) -> Rational {
        self.inf
    }

    pub fn to_lex(self) -> Lex {
        Lex::new(self.std, self.inf)
    }

    pub fn lex_compare(&self, other: &DualRational) -> Ordering {
        self.to_lex().cmp(&other.to_lex())
    }

    /// `(x + y) ∧ (1, 0)`.
    pub fn oplus(&self, other: &DualRational) -> DualRational {
        let sum = self.to_lex() + other.to_lex();
        Self::clamp(sum)
    }

    /// `(x + y - (1, 0)) ∨ (0, 0)`.
    pub fn otimes(&self, other: &DualRational) -> DualRational {
        let sum = self.to_lex() + other.to_lex() - Lex::one();
        Self::clamp(sum)
    }

    /// `(1, 0) - x`.
    pub fn mv_neg(&self) -> DualRational {
        let lex = Lex::one() - self.to_lex();
        DualRational {
            std: lex.std,
            inf: lex.inf,
        }
    }

    fn clamp(value: Lex) -> DualRational {
        let clamped = value.clamp(Lex::zero(), Lex::one());
        DualRational {
            std: clamped.std,
            inf: clamped.inf,
        }
    }
}

impl TryFrom<Lex> for DualRational {
    type Error = Error;

    fn try_from(value: Lex) -> Result<Self> {
        DualRational::new(value.std, value.inf)
    }
}

impl From<DualRational> for Lex {
    fn from(value: DualRational) -> Lex {
        value.to_lex()
    }
}

impl PartialOrd for DualRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DualRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_compare(other)
    }
}

impl fmt::Display for DualRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_lex().fmt(f)
    }
}

impl FromStr for DualRational {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        DualRational::try_from(text.parse::<Lex>()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn dr(s: Rational, i: Rational) -> DualRational {
        DualRational::new(s, i).unwrap()
    }

    #[test]
    fn lex_compare_examples() {
        let a = dr(q(1, 2), q(5, 1));
        assert_eq!(a.lex_compare(&a), Ordering::Equal);
        assert_eq!(
            dr(q(1, 2), q(-100, 1)).lex_compare(&dr(q(1, 3), q(100, 1))),
            Ordering::Greater
        );
        assert_eq!(
            dr(q(1, 2), q(1, 1)).lex_compare(&dr(q(1, 2), q(0, 1))),
            Ordering::Greater
        );
    }

    #[test]
    fn oplus_examples() {
        let top = dr(q(1, 1), q(-2, 1)).oplus(&dr(q(0, 1), q(3, 1)));
        assert_eq!(top, DualRational::one());
        let x = dr(q(2, 5), q(1, 3));
        assert_eq!(DualRational::zero().oplus(&x), x);
        assert_eq!(
            dr(q(1, 3), q(1, 1)).oplus(&dr(q(1, 3), q(-2, 1))),
            dr(q(2, 3), q(-1, 1))
        );
    }

    #[test]
    fn otimes_examples() {
        assert_eq!(
            dr(q(1, 2), q(1, 1)).otimes(&dr(q(1, 2), q(1, 1))),
            dr(q(0, 1), q(2, 1))
        );
        let x = dr(q(1, 3), q(7, 1));
        assert_eq!(DualRational::one().otimes(&x), x);
        assert_eq!(
            dr(q(1, 4), q(0, 1)).otimes(&dr(q(1, 4), q(0, 1))),
            DualRational::zero()
        );
    }

    #[test]
    fn negation_examples() {
        assert_eq!(dr(q(1, 2), q(3, 1)).mv_neg(), dr(q(1, 2), q(-3, 1)));
        assert_eq!(DualRational::one().mv_neg(), DualRational::zero());
        assert_eq!(dr(q(0, 1), q(2, 1)).mv_neg(), dr(q(1, 1), q(-2, 1)));
    }

    #[test]
    fn parts_examples() {
        assert_eq!(dr(q(1, 1), q(-7, 1)).parts(), (q(1, 1), q(-7, 1)));
        assert_eq!(DualRational::zero().parts(), (q(0, 1), q(0, 1)));
        assert_eq!(dr(q(2, 5), q(1, 3)).parts(), (q(2, 5), q(1, 3)));
    }

    #[test]
    fn boundary_invariants_rejected() {
        assert!(DualRational::new(q(0, 1), q(-1, 1)).is_err());
        assert!(DualRational::new(q(1, 1), q(1, 100)).is_err());
        assert!(DualRational::new(q(3, 2), q(0, 1)).is_err());
        assert!(DualRational::new(q(1, 2), q(-1000, 1)).is_ok());
    }

    #[test]
    fn text_form() {
        let x: DualRational = "1/2+e-3/4".parse().unwrap();
        assert_eq!(x.parts(), (q(1, 2), q(-3, 4)));
        assert_eq!(x.to_string(), "1/2+e-3/4");
        assert_eq!("1+e0".parse::<DualRational>().unwrap(), DualRational::one());
        assert!("1/2-e3".parse::<DualRational>().is_err());
        assert!("0+e-1".parse::<DualRational>().is_err());
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rational::new(n, d))
    }

    prop_compose! {
        fn arb_dual()(std in 0i64..=12, den in 1i64..=12, inf in arb_rational()) -> DualRational {
            let std = Rational::new(std.min(den), den);
            let inf = if std.is_zero() { inf.abs() } else if std.is_one() { -inf.abs() } else { inf };
            DualRational::new(std, inf).unwrap()
        }
    }

    proptest! {
        #[test]
        fn mv_operations_are_commutative_and_associative(x in arb_dual(), y in arb_dual(), z in arb_dual()) {
            prop_assert_eq!(x.oplus(&y), y.oplus(&x));
            prop_assert_eq!(x.otimes(&y), y.otimes(&x));
            prop_assert_eq!(x.oplus(&y).oplus(&z), x.oplus(&y.oplus(&z)));
            prop_assert_eq!(x.otimes(&y).otimes(&z), x.otimes(&y.otimes(&z)));
        }

        #[test]
        fn de_morgan_and_involution(x in arb_dual(), y in arb_dual()) {
            prop_assert_eq!(x.oplus(&y).mv_neg(), x.mv_neg().otimes(&y.mv_neg()));
            prop_assert_eq!(x.mv_neg().mv_neg(), x);
        }

        #[test]
        fn oplus_is_monotone(x in arb_dual(), y in arb_dual(), z in arb_dual()) {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            prop_assert!(lo.oplus(&z) <= hi.oplus(&z));
        }

        #[test]
        fn results_stay_normalized(x in arb_dual(), y in arb_dual()) {
            for r in [x.oplus(&y), x.otimes(&y), x.mv_neg()] {
                let (s, i) = r.parts();
                prop_assert!(DualRational::new(s, i).is_ok());
            }
        }

        #[test]
        fn text_roundtrip(x in arb_dual()) {
            let text = x.to_string();
            let back: DualRational = text.parse().unwrap();
            prop_assert_eq!(back, x);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
