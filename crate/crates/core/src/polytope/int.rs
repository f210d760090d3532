//! Integer back ends for the exact kernels: checked `i64` first, `BigInt`
//! when a computation overflows.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub(crate) trait Int: Clone + Eq + Ord + Hash + Debug + Send + Sync {
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
    fn gcd(&self, o: &Self) -> Self;
    fn signum(&self) -> i32;

    fn is_zero(&self) -> bool {
        self.signum() == 0
    }
}

impl Int for i64 {
    fn zero() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        // keep headroom so that negation never overflows
        v.to_i64().filter(|x| *x > i64::MIN)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn div_exact(&self, o: &Self) -> Self {
        *self / *o
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn signum(&self) -> i32 {
        i64::signum(*self) as i32
    }
}

impl Int for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn signum(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
}

pub(crate) fn dot<T: Int>(a: &[T], b: &[T]) -> Option<T> {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc.add(&x.mul(y)?)?;
    }
    Some(acc)
}

/// Divide by the (positive) gcd of all entries.
pub(crate) fn normalize<T: Int>(v: &mut [T]) {
    let mut g = T::zero();
    for x in v.iter() {
        g = g.gcd(x);
    }
    if g.signum() != 0 && g != T::from_i64(1) {
        for x in v.iter_mut() {
            *x = x.div_exact(&g);
        }
    }
}

pub(crate) fn convert<T: Int>(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<T>>> {
    rows.iter()
        .map(|r| r.iter().map(T::from_big).collect::<Option<Vec<T>>>())
        .collect()
}

/// Greedy row echelon selection: indices of a maximal linearly independent
/// subset of `rows` (scanned in order) and the pivot columns they produce.
pub(crate) fn independent_rows<T: Int>(rows: &[Vec<T>]) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut basis: Vec<(usize, Vec<T>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        for (pc, b) in &basis {
            if r[*pc].is_zero() {
                continue;
            }
            // r <- b[pc] * r - r[pc] * b
            let f1 = b[*pc].clone();
            let f2 = r[*pc].clone();
            for j in 0..r.len() {
                let a = f1.mul(&r[j])?;
                let c = f2.mul(&b[j])?;
                r[j] = a.sub(&c)?;
            }
            normalize(&mut r);
        }
        if let Some(pc) = r.iter().position(|x| !x.is_zero()) {
            basis.push((pc, r));
            chosen.push(idx);
        }
    }
    let pivots = basis.iter().map(|(pc, _)| *pc).collect();
    Some((chosen, pivots))
}
