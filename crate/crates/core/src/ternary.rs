//! The l/c/r addressing system for points of the unit interval.
//!
//! A point is written as an infinite word over `{l, c, r}` recording, at each
//! stage of the middle-third subdivision, whether the point falls in the
//! left, center or right subinterval.  Every point gets an infinite address:
//! points of the form `p/3^y` are always written with their non-terminating
//! expansion, so no address ends in all `l`s (except the address of 0).
//! Rational points have eventually periodic addresses, which is all this
//! module represents.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TernaryError {
    #[error("value {0} lies outside the unit interval")]
    OutOfRange(BigRational),
    #[error("empty period in address")]
    EmptyPeriod,
    #[error("invalid address syntax: {0}")]
    BadSyntax(String),
}

/// One character of an address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ch {
    L,
    C,
    R,
}

impl Ch {
    fn digit(self) -> u32 {
        match self {
            Ch::L => 0,
            Ch::C => 1,
            Ch::R => 2,
        }
    }

    fn from_digit(d: u32) -> Ch {
        match d {
            0 => Ch::L,
            1 => Ch::C,
            _ => Ch::R,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Ch::L => 'l',
            Ch::C => 'c',
            Ch::R => 'r',
        }
    }
}

/// An eventually periodic address: a finite preperiod followed by an
/// infinitely repeated primitive period.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Address {
    pub preperiod: Vec<Ch>,
    pub period: Vec<Ch>,
}

impl Address {
    pub fn new(preperiod: Vec<Ch>, period: Vec<Ch>) -> Result<Self, TernaryError> {
        if period.is_empty() {
            return Err(TernaryError::EmptyPeriod);
        }
        let mut addr = Address { preperiod, period };
        addr.canonicalize();
        Ok(addr)
    }

    /// Character at position `i` (0-based) of the infinite word.
    pub fn at(&self, i: usize) -> Ch {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Drop the first character; corresponds to x -> 3x mod 1 restricted to
    /// the third the point lies in.  Since no address terminates, a point
    /// landing exactly on an integer keeps the value 1 instead of wrapping
    /// to 0 (shift of l(r) is (r)).
    pub fn shift(&self) -> Address {
        if self.preperiod.is_empty() {
            let mut p = self.period.clone();
            p.rotate_left(1);
            Address::new(Vec::new(), p).expect("period stays nonempty")
        } else {
            Address::new(self.preperiod[1..].to_vec(), self.period.clone()).expect("nonempty")
        }
    }

    fn canonicalize(&mut self) {
        // Reduce the period to its primitive root.
        let n = self.period.len();
        for len in 1..n {
            if n.is_multiple_of(len) && self.period.chunks(len).all(|c| c == &self.period[..len]) {
                self.period.truncate(len);
                break;
            }
        }
        // Minimal preperiod: roll trailing characters that merely repeat the
        // period's tail.
        while let Some(&last) = self.preperiod.last() {
            if *self.period.last().expect("nonempty period") == last {
                self.preperiod.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
    }

    /// True when the word uses the character at least once.
    pub fn uses(&self, ch: Ch) -> bool {
        self.preperiod.contains(&ch) || self.period.contains(&ch)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ch in &self.preperiod {
            write!(f, "{}", ch.symbol())?;
        }
        write!(f, "(")?;
        for ch in &self.period {
            write!(f, "{}", ch.symbol())?;
        }
        write!(f, ")")
    }
}

/// Parse the textual syntax `c(rl)` for c followed by repeated rl.  A bare
/// word without parentheses is rejected: only eventually periodic addresses
/// are representable, and the period must be explicit.
pub fn parse_address(s: &str) -> Result<Address, TernaryError> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| TernaryError::BadSyntax(s.to_string()))?;
    if !s.ends_with(')') {
        return Err(TernaryError::BadSyntax(s.to_string()));
    }
    let pre = &s[..open];
    let per = &s[open + 1..s.len() - 1];
    let conv = |w: &str| -> Result<Vec<Ch>, TernaryError> {
        w.chars()
            .map(|c| match c {
                'l' => Ok(Ch::L),
                'c' => Ok(Ch::C),
                'r' => Ok(Ch::R),
                _ => Err(TernaryError::BadSyntax(s.to_string())),
            })
            .collect()
    };
    Address::new(conv(pre)?, conv(per)?)
}

/// The type of a ternary representation: which characters occur
/// infinitely often and which occur finitely often (absent characters appear
/// in neither set).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepType {
    pub infinitely_often: Vec<Ch>,
    pub finitely_often: Vec<Ch>,
}

impl RepType {
    fn from_sets(mut inf: Vec<Ch>, mut fin: Vec<Ch>) -> RepType {
        inf.sort();
        inf.dedup();
        fin.sort();
        fin.dedup();
        RepType {
            infinitely_often: inf,
            finitely_often: fin,
        }
    }

    /// Matches a pattern `[X, Y]` where `X` must equal the infinitely-often
    /// set and `Y` lists the characters *allowed* to occur finitely often.
    /// So `[c, {}]` matches the pattern `[c, lr]`.
    pub fn matches(&self, pattern_inf: &[Ch], pattern_fin_allowed: &[Ch]) -> bool {
        let mut pi = pattern_inf.to_vec();
        pi.sort();
        pi.dedup();
        if self.infinitely_often != pi {
            return false;
        }
        self.finitely_often
            .iter()
            .all(|c| pattern_fin_allowed.contains(c))
    }
}

impl fmt::Display for RepType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for c in &self.infinitely_often {
            write!(f, "{}", c.symbol())?;
        }
        write!(f, ",")?;
        if self.finitely_often.is_empty() {
            write!(f, "0")?;
        } else {
            for c in &self.finitely_often {
                write!(f, "{}", c.symbol())?;
            }
        }
        write!(f, "]")
    }
}

/// Address of a rational point of `[0, 1]`.
///
/// Points `p/3^y` receive their infinite expansion (the terminating one is
/// never produced), e.g. `1/3 -> l(r)`.
pub fn address_of(x: &BigRational) -> Result<Address, TernaryError> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if x < &zero || x > &one {
        return Err(TernaryError::OutOfRange(x.clone()));
    }
    if x == &zero {
        return Address::new(Vec::new(), vec![Ch::L]);
    }
    if x == &one {
        return Address::new(Vec::new(), vec![Ch::R]);
    }
    // Long division in base 3 on the fractional remainders p/q.
    let q = x.denom().clone();
    let mut p = x.numer().clone();
    let three = BigInt::from(3);
    let mut digits: Vec<Ch> = Vec::new();
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    loop {
        if p.is_zero() {
            // Terminating expansion: rewrite ...d000... as ...(d-1)(r).
            let last = digits.pop().expect("x > 0 has at least one digit");
            digits.push(Ch::from_digit(last.digit() - 1));
            return Address::new(digits, vec![Ch::R]);
        }
        if let Some(&start) = seen.get(&p) {
            let period = digits.split_off(start);
            return Address::new(digits, period);
        }
        seen.insert(p.clone(), digits.len());
        p *= &three;
        let (d, rem) = num_integer::Integer::div_rem(&p, &q);
        let d_u32 = u32::try_from(&d).expect("digit in 0..3");
        digits.push(Ch::from_digit(d_u32));
        p = rem;
    }
}

/// Exact value of an address.
pub fn value_of(a: &Address) -> BigRational {
    let three = BigInt::from(3);
    let mut pre_num = BigInt::zero();
    for ch in &a.preperiod {
        pre_num = &pre_num * &three + BigInt::from(ch.digit());
    }
    let k = a.preperiod.len() as u32;
    let m = a.period.len() as u32;
    let mut per_num = BigInt::zero();
    for ch in &a.period {
        per_num = &per_num * &three + BigInt::from(ch.digit());
    }
    let three_k = three.pow(k);
    let three_m = three.pow(m);
    // x = pre/3^k + per / (3^k (3^m - 1))
    let denom = &three_k * (&three_m - BigInt::one());
    let numer = pre_num * (&three_m - BigInt::one()) + per_num;
    BigRational::new(numer, denom)
}

/// The type of the (canonical) ternary representation.
pub fn rep_type(a: &Address) -> RepType {
    let inf: Vec<Ch> = [Ch::L, Ch::C, Ch::R]
        .into_iter()
        .filter(|c| a.period.contains(c))
        .collect();
    let fin: Vec<Ch> = [Ch::L, Ch::C, Ch::R]
        .into_iter()
        .filter(|c| a.preperiod.contains(c) && !a.period.contains(c))
        .collect();
    RepType::from_sets(inf, fin)
}

/// Membership in the ternary Cantor set: the point must admit *some* address
/// over `{l, r}` only.  The canonical address covers all points except the
/// ternary numbers whose terminating expansion must also be consulted
/// (e.g. `2/3 = c(r)` canonically, but also `r(l)`).
pub fn in_cantor(a: &Address) -> bool {
    if !a.uses(Ch::C) {
        return true;
    }
    // The only alternative expansion exists for ternary numbers, whose
    // canonical form is  w d (r)  with terminating form  w d' (l), d' = d+1.
    if a.period != vec![Ch::R] {
        return false;
    }
    let mut w = a.preperiod.clone();
    match w.pop() {
        Some(last) if last != Ch::R => {
            w.push(Ch::from_digit(last.digit() + 1));
            !w.contains(&Ch::C)
        }
        _ => false,
    }
}

/// True for ternary numbers `p/3^y` (those with two base-3 expansions).
pub fn is_ternary_number(x: &BigRational) -> bool {
    let mut d = x.denom().clone();
    let three = BigInt::from(3);
    while (&d % &three).is_zero() {
        d /= &three;
    }
    d.is_one() || d == -BigInt::one()
}
