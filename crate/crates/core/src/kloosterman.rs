//! Multi-dimensional Kloosterman sums over GF(2^r) for the canonical character.
//!
//! `K_m(a) = sum over (F_q^*)^m of lambda(x_1 + ... + x_m + a / (x_1 ... x_m))`,
//! with `K_0(a) = lambda(a)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;

use crate::error::{ensure_invariant, Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Work limit, in tuples per argument, for direct enumeration.
pub const DIRECT_GATE: u128 = 1 << 24;

/// `K_m(a)` for every `a` in `F_q^*`, built by the memoized recursion
/// `K_m(a) = sum_x lambda(x) K_{m-1}(a / x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KloostermanTable {
    spec: FieldSpec,
    m: u32,
    /// Indexed by element bits; slot 0 is unused and holds 0.
    values: Vec<i64>,
}

impl KloostermanTable {
    pub fn new(spec: &FieldSpec, m: u32) -> Result<Self> {
        check_magnitude(spec, m)?;
        let q = spec.order() as usize;
        let inverses = spec.inverse_table();
        let mut current: Vec<i64> = spec
            .elements()
            .map(|a| if a.is_zero() { 0 } else { spec.lambda(a) })
            .collect();
        let signs: Vec<i64> = spec.elements().map(|x| spec.lambda(x)).collect();
        for _ in 0..m {
            let prev = &current;
            let next: Vec<i64> = (0..q)
                .into_par_iter()
                .map(|a| {
                    if a == 0 {
                        return 0;
                    }
                    let a = FieldElement::from_bits(a as u32);
                    spec.nonzero()
                        .map(|x| {
                            let arg = spec.mul(a, inverses[x.bits() as usize]);
                            signs[x.bits() as usize] * prev[arg.bits() as usize]
                        })
                        .sum()
                })
                .collect();
            current = next;
        }
        Ok(KloostermanTable {
            spec: *spec,
            m,
            values: current,
        })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn dimension(&self) -> u32 {
        self.m
    }

    /// `K_m(a)`; `a` must be a nonzero element of the table's field.
    pub fn get(&self, a: FieldElement) -> Result<i64> {
        if a.is_zero() {
            return Err(Error::Domain(
                "Kloosterman sums are defined for a != 0".into(),
            ));
        }
        if !self.spec.contains(a) {
            return Err(Error::Usage(format!("{a} is not in {}", self.spec)));
        }
        Ok(self.values[a.bits() as usize])
    }

    /// `(a, K_m(a))` for `a` in increasing bit order.
    pub fn iter(&self) -> impl Iterator<Item = (FieldElement, i64)> + '_ {
        self.spec
            .nonzero()
            .map(move |a| (a, self.values[a.bits() as usize]))
    }

    /// Attained values with multiplicities.
    pub fn histogram(&self) -> BTreeMap<i64, u64> {
        let mut hist = BTreeMap::new();
        for (_, k) in self.iter() {
            *hist.entry(k).or_insert(0) += 1;
        }
        hist
    }

    /// `sum_a K_m(a)^h`.
    pub fn moment(&self, h: u32) -> BigInt {
        self.histogram()
            .into_iter()
            .map(|(t, mult)| BigInt::from(mult) * Pow::pow(BigInt::from(t), h))
            .sum()
    }
}

fn check_magnitude(spec: &FieldSpec, m: u32) -> Result<()> {
    // |K_m| <= (q-1)^m must fit comfortably in an i64 accumulator.
    let base = spec.order() as u128 - 1;
    let mut bound: u128 = 1;
    for _ in 0..m {
        bound = bound.saturating_mul(base.max(1));
        if bound > (1u128 << 62) {
            return Err(Error::Usage(format!(
                "K_{m} over GF({}) exceeds 64-bit range",
                spec.order()
            )));
        }
    }
    Ok(())
}

/// `K_m(a)` via the memoized recursion.
pub fn kloosterman(spec: &FieldSpec, m: u32, a: FieldElement) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::Domain(
            "Kloosterman sums are defined for a != 0".into(),
        ));
    }
    spec.element(a.bits())?;
    KloostermanTable::new(spec, m)?.get(a)
}

/// `K_m(a)` by enumerating all `(q-1)^m` tuples. Refuses work above [`DIRECT_GATE`].
pub fn kloosterman_direct(spec: &FieldSpec, m: u32, a: FieldElement) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::Domain(
            "Kloosterman sums are defined for a != 0".into(),
        ));
    }
    spec.element(a.bits())?;
    let base = spec.order() as u128 - 1;
    let work = (0..m)
        .try_fold(1u128, |acc, _| acc.checked_mul(base))
        .unwrap_or(u128::MAX);
    if work > DIRECT_GATE {
        return Err(Error::GateExceeded {
            work,
            gate: DIRECT_GATE,
        });
    }
    let inverses = spec.inverse_table();
    let mut total = 0i64;
    for_each_tuple(spec, m as usize, |sum, prod| {
        let arg = spec.add(sum, spec.mul(a, inverses[prod.bits() as usize]));
        total += spec.lambda(arg);
    });
    Ok(total)
}

/// Visits every tuple in `(F_q^*)^len` with the running sum and product.
pub(crate) fn for_each_tuple(
    spec: &FieldSpec,
    len: usize,
    mut visit: impl FnMut(FieldElement, FieldElement),
) {
    fn go(
        spec: &FieldSpec,
        depth: usize,
        sum: FieldElement,
        prod: FieldElement,
        visit: &mut dyn FnMut(FieldElement, FieldElement),
    ) {
        if depth == 0 {
            visit(sum, prod);
            return;
        }
        for x in spec.nonzero() {
            go(spec, depth - 1, spec.add(sum, x), spec.mul(prod, x), visit);
        }
    }
    go(spec, len, FieldElement::ZERO, FieldElement::ONE, &mut visit);
}

/// `K(a)^2 - q`, which equals `K_2(a)` in characteristic two.
pub fn k2_via_square(spec: &FieldSpec, a: FieldElement) -> Result<i64> {
    let k = kloosterman(spec, 1, a)?;
    Ok(k * k - spec.order() as i64)
}

/// `sum_{a != 0} K_m(a)^h` with exact accumulation.
pub fn brute_moment(spec: &FieldSpec, m: u32, h: u32) -> Result<BigInt> {
    Ok(KloostermanTable::new(spec, m)?.moment(h))
}

/// `sum_{a != 0} K_m(a)^h` for `h = 0..=max_h`.
pub fn brute_moments(spec: &FieldSpec, m: u32, max_h: u32) -> Result<Vec<BigInt>> {
    let hist = KloostermanTable::new(spec, m)?.histogram();
    let mut out = vec![BigInt::zero(); max_h as usize + 1];
    for (t, mult) in hist {
        let t = BigInt::from(t);
        let mut power = BigInt::from(mult);
        for slot in out.iter_mut() {
            *slot += &power;
            power *= &t;
        }
    }
    Ok(out)
}

/// Integers `t` with `|t| < 2 sqrt(q)` and `t = -1 (mod 4)`.
pub fn admissible_values(q: u32) -> Vec<i64> {
    let q = q as i64;
    let mut bound = 0i64;
    while (bound + 1) * (bound + 1) < 4 * q {
        bound += 1;
    }
    (-bound..=bound).filter(|t| t.rem_euclid(4) == 3).collect()
}

/// Observed distribution of `K(a)` over `F_q^*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeReport {
    pub q: u32,
    pub histogram: BTreeMap<i64, u64>,
    /// Every `t` allowed by the bound and congruence, attained or not.
    pub admissible: Vec<i64>,
}

impl RangeReport {
    pub fn total(&self) -> u64 {
        self.histogram.values().sum()
    }
}

/// Histogram of `K(a)` with the bound `|t| < 2 sqrt(q)` and the congruence
/// `t = -1 (mod 4)` checked on every value. Multiplicities are reported only.
pub fn range_report(spec: &FieldSpec) -> Result<RangeReport> {
    if spec.degree() < 2 {
        return Err(Error::NotApplicable(
            "the range of K is characterised only for r >= 2".into(),
        ));
    }
    let table = KloostermanTable::new(spec, 1)?;
    let histogram = table.histogram();
    let q = spec.order();
    let admissible = admissible_values(q);
    for (&t, &mult) in &histogram {
        ensure_invariant!(
            admissible.contains(&t),
            "K value {t} (x{mult}) violates |t| < 2 sqrt({q}) or t = -1 mod 4"
        );
    }
    ensure_invariant!(
        histogram.values().sum::<u64>() == q as u64 - 1,
        "histogram does not cover F_q^*"
    );
    Ok(RangeReport {
        q,
        histogram,
        admissible,
    })
}

/// `(q-1)^m` as a big integer.
pub(crate) fn tuple_count(spec: &FieldSpec, m: u32) -> BigInt {
    let base = BigInt::from(spec.order() - 1);
    if m == 0 {
        BigInt::one()
    } else {
        Pow::pow(base, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(r: u32) -> FieldSpec {
        FieldSpec::with_default_poly(r).unwrap()
    }

    #[test]
    fn q2_single_term() {
        let f = field(1);
        assert_eq!(kloosterman(&f, 1, FieldElement::ONE).unwrap(), 1);
        assert_eq!(kloosterman_direct(&f, 1, FieldElement::ONE).unwrap(), 1);
    }

    #[test]
    fn zero_dimension_is_lambda() {
        let f = field(3);
        assert_eq!(kloosterman(&f, 0, FieldElement::ONE).unwrap(), -1);
        for a in f.nonzero() {
            assert_eq!(kloosterman(&f, 0, a).unwrap(), f.lambda(a));
            assert_eq!(kloosterman_direct(&f, 0, a).unwrap(), f.lambda(a));
        }
    }

    #[test]
    fn gf8_histogram() {
        let table = KloostermanTable::new(&field(3), 1).unwrap();
        let expected: BTreeMap<i64, u64> = [(-5, 1), (-1, 3), (3, 3)].into_iter().collect();
        assert_eq!(table.histogram(), expected);
    }

    #[test]
    fn zero_argument_is_domain_error() {
        let f = field(3);
        assert!(matches!(
            kloosterman(&f, 1, FieldElement::ZERO),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            kloosterman_direct(&f, 2, FieldElement::ZERO),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            k2_via_square(&f, FieldElement::ZERO),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn direct_gate_refuses_large_work() {
        let f = field(4);
        assert!(matches!(
            kloosterman_direct(&f, 7, FieldElement::ONE),
            Err(Error::GateExceeded { .. })
        ));
    }

    #[test]
    fn recursion_matches_direct_enumeration() {
        for r in [2, 3] {
            let f = field(r);
            for m in [1, 2, 3] {
                let table = KloostermanTable::new(&f, m).unwrap();
                for a in f.nonzero() {
                    assert_eq!(
                        table.get(a).unwrap(),
                        kloosterman_direct(&f, m, a).unwrap(),
                        "r={r} m={m} a={a}"
                    );
                }
            }
        }
    }

    #[test]
    fn square_identity() {
        for r in [2, 3, 4] {
            let f = field(r);
            let k2 = KloostermanTable::new(&f, 2).unwrap();
            for a in f.nonzero() {
                assert_eq!(k2_via_square(&f, a).unwrap(), k2.get(a).unwrap());
            }
        }
        let f = field(3);
        let k1 = KloostermanTable::new(&f, 1).unwrap();
        for (a, k) in k1.iter() {
            match k {
                3 => assert_eq!(k2_via_square(&f, a).unwrap(), 1),
                -1 => assert_eq!(k2_via_square(&f, a).unwrap(), -7),
                _ => {}
            }
        }
    }

    #[test]
    fn low_moments() {
        for r in 1..=4 {
            let f = field(r);
            let q = f.order() as i64;
            assert_eq!(brute_moment(&f, 1, 0).unwrap(), BigInt::from(q - 1));
            assert_eq!(brute_moment(&f, 1, 1).unwrap(), BigInt::from(1));
        }
        let gf8 = field(3);
        assert_eq!(brute_moment(&gf8, 1, 0).unwrap(), BigInt::from(7));
        assert_eq!(brute_moment(&gf8, 1, 2).unwrap(), BigInt::from(55));
        assert_eq!(brute_moment(&field(4), 1, 3).unwrap(), BigInt::from(289));
        let all = brute_moments(&gf8, 1, 6).unwrap();
        for (h, v) in all.iter().enumerate() {
            assert_eq!(*v, brute_moment(&gf8, 1, h as u32).unwrap());
        }
    }

    #[test]
    fn range_reports() {
        let r8 = range_report(&field(3)).unwrap();
        let expected: BTreeMap<i64, u64> = [(-5, 1), (-1, 3), (3, 3)].into_iter().collect();
        assert_eq!(r8.histogram, expected);

        let r4 = range_report(&field(2)).unwrap();
        assert!(r4.histogram.keys().all(|t| [-1, 3].contains(t)));
        assert_eq!(r4.total(), 3);

        let r16 = range_report(&field(4)).unwrap();
        assert!(r16.histogram.keys().all(|t| [-5, -1, 3, 7].contains(t)));
        assert_eq!(r16.total(), 15);
        assert_eq!(r16.admissible, vec![-5, -1, 3, 7]);

        assert!(matches!(
            range_report(&field(1)),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn value_multiset_is_polynomial_independent() {
        let a = KloostermanTable::new(&FieldSpec::new(4, 0b10011).unwrap(), 1).unwrap();
        let b = KloostermanTable::new(&FieldSpec::new(4, 0b11001).unwrap(), 1).unwrap();
        assert_eq!(a.histogram(), b.histogram());
        let a3 = KloostermanTable::new(&FieldSpec::new(3, 0b1011).unwrap(), 2).unwrap();
        let b3 = KloostermanTable::new(&FieldSpec::new(3, 0b1101).unwrap(), 2).unwrap();
        assert_eq!(a3.histogram(), b3.histogram());
    }
}
