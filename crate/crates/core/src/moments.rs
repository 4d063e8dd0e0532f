//! Power moments `MK_m^h = sum_{a != 0} K_m(a)^h` by four routes: the Pless
//! recursion over the weight distribution of `C(SL(n, q))`, brute force, the
//! Salie counts, and Moisio's closed forms for `h <= 10`.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{ensure_invariant, Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::binomial;
use crate::sl_group::{trace_distribution_closed, GroupParams};
use crate::weights::{
    dual_weights_from_distribution, weight_distribution_direct, WeightDistribution,
};

/// Stirling number of the second kind,
/// `S(h, t) = (1/t!) sum_{j=0}^{t} (-1)^(t-j) binom(t, j) j^h`; zero for `t > h`.
pub fn stirling2(h: u32, t: u32) -> BigUint {
    if t > h {
        return BigUint::zero();
    }
    let mut sum = BigInt::zero();
    let mut binom = BigInt::one();
    for j in 0..=t {
        let term = &binom * Pow::pow(BigInt::from(j), h);
        if (t - j).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        binom = binom * (t - j) / (j + 1);
    }
    let (s, rem) = sum.div_rem(&BigInt::from(factorial(t)));
    assert!(
        rem.is_zero() && !s.is_negative(),
        "S({h}, {t}) is not an integer"
    );
    s.magnitude().clone()
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// `MK_{n-1}^0 ..= MK_{n-1}^H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentTable {
    params: GroupParams,
    values: Vec<BigInt>,
}

impl MomentTable {
    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    /// Dimension `m = n - 1` of the underlying sums.
    pub fn dimension(&self) -> u32 {
        self.params.n() - 1
    }

    pub fn max_h(&self) -> u32 {
        self.values.len() as u32 - 1
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn into_values(self) -> Vec<BigInt> {
        self.values
    }
}

/// Stirling numbers `S(h, t)` for `0 <= t <= h <= max_h`.
struct StirlingTable(Vec<Vec<BigUint>>);

impl StirlingTable {
    fn new(max_h: u32) -> Self {
        StirlingTable(
            (0..=max_h)
                .map(|h| (0..=h).map(|t| stirling2(h, t)).collect())
                .collect(),
        )
    }

    fn get(&self, h: u32, t: u32) -> &BigUint {
        &self.0[h as usize][t as usize]
    }
}

/// `sum_{t=i}^{h} t! S(h, t) 2^(shift - t) binom(N - i, N - t)`, with `binom(b, a) = 0`
/// for `t > N`. `shift` must be at least `h`.
fn pless_inner(stirling: &StirlingTable, len: &BigUint, h: u32, i: u32, shift: u32) -> BigUint {
    let mut acc = BigUint::zero();
    let mut fact = factorial(i);
    for t in i..=h {
        if t > i {
            fact *= t;
        }
        if BigUint::from(t) > *len {
            break;
        }
        let s = stirling.get(h, t);
        if s.is_zero() {
            continue;
        }
        let binom = binomial(&(len - i), (t - i) as u64);
        acc += (&fact * s * binom) << (shift - t) as usize;
    }
    acc
}

/// `MK_{n-1}^1..=MK_{n-1}^H` from `C_0..C_H` by
///
/// `q^(b h) MK^h = sum_{i<h} (-1)^(h+i+1) binom(h,i) N^(h-i) q^(b i) MK^i
///                + q sum_{i <= min(N,h)} (-1)^(h+i) C_i sum_{t=i}^{h} t! S(h,t) 2^(h-t) binom(N-i, N-t)`
///
/// with `b = binom(n, 2)` and `MK^0 = q - 1`. Every division by `q^(b h)` is checked.
pub fn recursive_moments(weights: &WeightDistribution, max_h: u32) -> Result<MomentTable> {
    let params = weights.params().clone();
    if weights.max_weight() < max_h as usize && !weights.is_full() {
        return Err(Error::Usage(format!(
            "recursion to h = {max_h} needs C_0..C_{max_h}, only {} weights known",
            weights.max_weight()
        )));
    }
    let len = params.order().clone();
    let n_big = BigInt::from(len.clone());
    let q = BigInt::from(params.q());
    let scale = BigInt::from(params.scale());
    let stirling = StirlingTable::new(max_h);
    let scale_pows: Vec<BigInt> = (0..=max_h).map(|i| Pow::pow(&scale, i)).collect();
    let n_pows: Vec<BigInt> = (0..=max_h).map(|i| Pow::pow(&n_big, i)).collect();

    let mut values = vec![q.clone() - 1];
    for h in 1..=max_h {
        let mut acc = BigInt::zero();
        for (i, mk) in values.iter().enumerate() {
            let i = i as u32;
            let term = BigInt::from(binomial(&BigUint::from(h), i as u64))
                * &n_pows[(h - i) as usize]
                * &scale_pows[i as usize]
                * mk;
            if (h + i + 1).is_multiple_of(2) {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let upper = BigUint::from(h).min(len.clone()).to_u32().unwrap_or(h);
        let mut code_sum = BigInt::zero();
        for i in 0..=upper {
            let c = &weights.counts()[i as usize];
            if c.is_zero() {
                continue;
            }
            let term = BigInt::from(c * pless_inner(&stirling, &len, h, i, h));
            if (h + i) % 2 == 0 {
                code_sum += term;
            } else {
                code_sum -= term;
            }
        }
        acc += &q * code_sum;
        let (mk, rem) = acc.div_rem(&scale_pows[h as usize]);
        ensure_invariant!(
            rem.is_zero(),
            "q^(binom(n,2) h) does not divide the recursion at h = {h}"
        );
        values.push(mk);
    }
    Ok(MomentTable { params, values })
}

/// Runs the whole pipeline for `(n, q)`: closed trace distribution, parity DP
/// truncated at `max(max_h, 32)` (capped at `N`, where the distribution is
/// complete), then the recursion.
pub fn moments_via_code(params: &GroupParams, max_h: u32) -> Result<MomentTable> {
    let dist = trace_distribution_closed(params)?;
    let mut w = default_truncation(max_h);
    if BigUint::from(w) > *params.order() {
        w = params
            .order()
            .to_usize()
            .expect("N below truncation fits usize");
    }
    let weights = weight_distribution_direct(&dist, w)?;
    recursive_moments(&weights, max_h)
}

/// Default weight truncation for a recursion up to `max_h`.
pub fn default_truncation(max_h: u32) -> usize {
    (max_h as usize).max(32)
}

/// One row of the Pless identity applied to the dual code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlessRow {
    pub h: u32,
    /// `sum over all q dual codewords of w^h` (the zero word contributes `0^0 = 1` at `h = 0`).
    pub lhs: BigInt,
    /// `sum_{a != 0} w(c(a))^h`.
    pub lhs_nonzero: BigInt,
    /// Right side as an exact rational.
    pub rhs: BigRational,
}

impl PlessRow {
    pub fn holds(&self) -> bool {
        BigRational::from_integer(self.lhs.clone()) == self.rhs
    }
}

/// Evaluates `sum_i i^h B_i = sum_{i <= min(N,h)} (-1)^i C_i sum_{t=i}^{h} t! S(h,t) 2^(r-t) binom(N-i, N-t)`
/// for the dual code `B` (dimension `r`) and `C = B^perp`, with the dual weights
/// counted from the trace distribution and `C_i` from the parity DP.
pub fn pless_lhs_check(params: &GroupParams, max_h: u32) -> Result<Vec<PlessRow>> {
    let dist = trace_distribution_closed(params)?;
    let dual = dual_weights_from_distribution(&dist);
    let w = (max_h as usize).min(params.order().to_usize().unwrap_or(usize::MAX));
    let code = weight_distribution_direct(&dist, w)?;
    let stirling = StirlingTable::new(max_h);
    let len = params.order();
    let r = params.spec().degree();
    let mut rows = Vec::with_capacity(max_h as usize + 1);
    for h in 0..=max_h {
        let lhs_nonzero: BigInt = dual
            .weights()
            .iter()
            .skip(1)
            .map(|x| Pow::pow(BigInt::from(x.clone()), h))
            .sum();
        let zero_word = if h == 0 {
            BigInt::one()
        } else {
            BigInt::zero()
        };
        let lhs = &lhs_nonzero + zero_word;
        // Scale by 2^h so that 2^(r - t) becomes the integer 2^(r + h - t).
        let upper = (h as usize).min(w);
        let mut scaled = BigInt::zero();
        for i in 0..=upper {
            let term =
                BigInt::from(&code.counts()[i] * pless_inner(&stirling, len, h, i as u32, r + h));
            if i % 2 == 0 {
                scaled += term;
            } else {
                scaled -= term;
            }
        }
        let rhs = BigRational::new(scaled, BigInt::one() << h as usize);
        rows.push(PlessRow {
            h,
            lhs,
            lhs_nonzero,
            rhs,
        });
    }
    Ok(rows)
}

/// Tuple counts over `(F_q^*)^h`: `A_h` with `sum x_j = 0 = sum x_j^{-1}` and
/// `M_h` with `sum x_j = 1 = sum x_j^{-1}` (`M_0 = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SalieCounts {
    pub spec: FieldSpec,
    pub a: Vec<BigUint>,
    pub m: Vec<BigUint>,
}

impl SalieCounts {
    /// `MK^h = q^2 M_{h-1} - (q-1)^(h-1) + 2 (-1)^(h-1)` for `h >= 1`; `MK^0 = q - 1`.
    pub fn moments(&self) -> Vec<BigInt> {
        let q = BigInt::from(self.spec.order());
        let mut out = vec![&q - 1];
        for h in 1..self.m.len() as u32 + 1 {
            let base =
                &q * &q * BigInt::from(self.m[(h - 1) as usize].clone()) - Pow::pow(&q - 1, h - 1);
            out.push(if (h - 1) % 2 == 0 { base + 2 } else { base - 2 });
        }
        out
    }
}

/// Counts `A_h`, `M_h` for `h = 0..=max_h` with a DP over the pair
/// `(sum x_j, sum x_j^{-1})`, and checks `(q - 1) M_{h-1} = A_h`.
pub fn salie_counts(spec: &FieldSpec, max_h: u32) -> Result<SalieCounts> {
    let q = spec.order() as usize;
    let inverses = spec.inverse_table();
    let mut states = vec![BigUint::zero(); q * q];
    states[0] = BigUint::one();
    let one = FieldElement::ONE.bits() as usize;
    let mut a = vec![BigUint::one()];
    let mut m = vec![BigUint::zero()];
    for _ in 1..=max_h {
        let mut next = vec![BigUint::zero(); q * q];
        for (idx, count) in states.iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            let (s, t) = (idx / q, idx % q);
            for x in spec.nonzero() {
                let xi = x.bits() as usize;
                let target = (s ^ xi) * q + (t ^ inverses[xi].bits() as usize);
                next[target] += count;
            }
        }
        states = next;
        a.push(states[0].clone());
        m.push(states[one * q + one].clone());
    }
    for h in 1..a.len() {
        ensure_invariant!(
            a[h] == &m[h - 1] * (q as u32 - 1),
            "(q-1) M_{} != A_{h}",
            h - 1
        );
    }
    Ok(SalieCounts { spec: *spec, a, m })
}

/// The four degree-dependent sequences in the closed forms for `h <= 10`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum USequence {
    U1,
    U2,
    U3,
    U4,
}

impl USequence {
    pub const ALL: [USequence; 4] = [USequence::U1, USequence::U2, USequence::U3, USequence::U4];

    /// Monic minimal polynomial `x^d + c_1 x^(d-1) + ... + c_d` as `[c_1, ..., c_d]`.
    ///
    /// Each conjugate pair `(A +- sqrt(-B)) / D` has sum `2A/D` and product
    /// `(A^2 + B)/D^2`; for `u_3` the two pairs have product 1 each and sums
    /// `(-3 +- sqrt(505)) / 16`, which multiply out to rational coefficients.
    pub fn min_poly(self) -> Vec<BigRational> {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        match self {
            USequence::U1 => vec![r(-1, 2), r(1, 1)],
            USequence::U2 => vec![r(5, 4), r(1, 1)],
            USequence::U3 => vec![r(3, 8), r(1, 16), r(3, 8), r(1, 1)],
            USequence::U4 => vec![r(24, 1), r(2048, 1)],
        }
    }

    /// Power sum of the roots, `p_k`, by Newton's identities.
    pub fn value(self, k: u32) -> BigRational {
        power_sums(&self.min_poly(), k).pop().expect("nonempty")
    }

    /// The same power sum evaluated in floating point from the radical form.
    /// `signs` selects the branch of `sqrt(505)` and of the two inner square
    /// roots (only `u_3` uses them).
    pub fn value_from_radicals(self, k: u32, signs: [f64; 3]) -> Complex64 {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let roots: Vec<Complex64> = match self {
            USequence::U1 => {
                let s = c(-15.0, 0.0).sqrt();
                vec![(c(1.0, 0.0) + s) / 4.0, (c(1.0, 0.0) - s) / 4.0]
            }
            USequence::U2 => {
                let s = c(-39.0, 0.0).sqrt();
                vec![(c(-5.0, 0.0) + s) / 8.0, (c(-5.0, 0.0) - s) / 8.0]
            }
            USequence::U3 => {
                let root505 = signs[0] * 505f64.sqrt();
                let inner1 = signs[1] * c(-510.0 - 6.0 * root505, 0.0).sqrt();
                let inner2 = signs[2] * c(-510.0 + 6.0 * root505, 0.0).sqrt();
                let a = c(-3.0 + root505, 0.0);
                let b = c(-3.0 - root505, 0.0);
                vec![
                    (a + inner1) / 32.0,
                    (a - inner1) / 32.0,
                    (b + inner2) / 32.0,
                    (b - inner2) / 32.0,
                ]
            }
            USequence::U4 => {
                let s = 4.0 * c(-119.0, 0.0).sqrt();
                vec![c(-12.0, 0.0) + s, c(-12.0, 0.0) - s]
            }
        };
        roots.into_iter().map(|z| z.powu(k)).sum()
    }
}

/// `p_0..=p_k` for the monic polynomial with lower coefficients `coeffs`.
fn power_sums(coeffs: &[BigRational], k: u32) -> Vec<BigRational> {
    let d = coeffs.len();
    let mut p: Vec<BigRational> = vec![BigRational::from_integer(BigInt::from(d))];
    for j in 1..=k as usize {
        let mut acc = BigRational::zero();
        for i in 1..j.min(d + 1) {
            acc -= &coeffs[i - 1] * &p[j - i];
        }
        if j <= d {
            acc -= &coeffs[j - 1] * BigRational::from_integer(BigInt::from(j));
        }
        p.push(acc);
    }
    p
}

/// Result of comparing the exact power sums with their radical forms.
#[derive(Clone, Debug, PartialEq)]
pub struct RadicalCheck {
    pub sequence: USequence,
    pub k: u32,
    pub exact: f64,
    /// Sign choices `[sqrt(505), inner_1, inner_2]` that reproduce `exact`.
    pub matching_signs: Vec<[f64; 3]>,
}

/// Floating-point cross-check of every `u_j(k)`, `1 <= k <= max_k`, against
/// the radicals at relative tolerance `1e-12`, over all branch choices.
pub fn check_u_sequences(max_k: u32) -> Vec<RadicalCheck> {
    let mut out = Vec::new();
    let branches: Vec<[f64; 3]> = (0..8)
        .map(|b| {
            let s = |bit: u32| if b >> bit & 1 == 0 { 1.0 } else { -1.0 };
            [s(0), s(1), s(2)]
        })
        .collect();
    for sequence in USequence::ALL {
        for k in 1..=max_k {
            let exact = sequence.value(k).to_f64().unwrap_or(f64::NAN);
            let matching_signs = branches
                .iter()
                .copied()
                .filter(|signs| {
                    let z = sequence.value_from_radicals(k, *signs);
                    let scale = exact.abs().max(1.0);
                    (z.re - exact).abs() <= 1e-12 * scale && z.im.abs() <= 1e-9 * scale
                })
                .collect();
            out.push(RadicalCheck {
                sequence,
                k,
                exact,
                matching_signs,
            });
        }
    }
    out
}

/// Largest order covered by the closed forms.
pub const MOISIO_MAX_H: u32 = 10;

/// Closed form for `MK^h` over `GF(2^r)`, `1 <= h <= 10`.
pub fn moisio_closed_form(spec: &FieldSpec, h: u32) -> Result<BigInt> {
    if h == 0 || h > MOISIO_MAX_H {
        return Err(Error::Usage(format!(
            "closed forms exist only for 1 <= h <= {MOISIO_MAX_H}, got {h}"
        )));
    }
    let r = spec.degree();
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let q = int(spec.order() as i64);
    let qp = |e: u32| Pow::pow(&q, e as i32);
    let eps = int(if r.is_multiple_of(2) { 1 } else { -1 });
    let u = |s: USequence| s.value(r);
    let (u1, u2, u3, u4) = (
        u(USequence::U1),
        u(USequence::U2),
        u(USequence::U3),
        u(USequence::U4),
    );
    let value: BigRational = match h {
        1 => int(1),
        2 => qp(2) - &q - int(1),
        3 => &eps * qp(2) + int(2) * &q + int(1),
        4 => int(2) * qp(3) - int(2) * qp(2) - int(3) * &q - int(1),
        5 => (&u1 + int(4) * &eps) * qp(3) + int(5) * qp(2) + int(4) * &q + int(1),
        6 => int(5) * qp(4) - (int(5) + &eps) * qp(3) - int(9) * qp(2) - int(5) * &q - int(1),
        7 => {
            (&u2 + int(6) * &u1 + int(14) * &eps + int(1)) * qp(4)
                + int(14) * qp(3)
                + int(14) * qp(2)
                + int(6) * &q
                + int(1)
        }
        8 => {
            int(14) * qp(5)
                - (int(15) + int(7) * &eps) * qp(4)
                - int(28) * qp(3)
                - int(20) * qp(2)
                - int(7) * &q
                - int(1)
        }
        9 => {
            (&u3 + int(8) * &u2 + int(27) * &u1 + int(8) + int(48) * &eps) * qp(5)
                + int(42) * qp(4)
                + int(48) * qp(3)
                + int(27) * qp(2)
                + int(8) * &q
                + int(1)
        }
        10 => {
            int(42) * qp(6)
                - (int(51) + int(35) * &eps) * qp(5)
                - int(90) * qp(4)
                - int(75) * qp(3)
                - int(35) * qp(2)
                - int(9) * &q
                - int(1)
                - &u4
        }
        _ => unreachable!(),
    };
    ensure_invariant!(
        value.is_integer(),
        "closed form for MK^{h} over GF(2^{r}) is not an integer: {value}"
    );
    Ok(value.to_integer())
}

/// `MK^1..=MK^max_h` from the closed forms, with `MK^0 = q - 1` prepended.
pub fn moisio_moments(spec: &FieldSpec, max_h: u32) -> Result<Vec<BigInt>> {
    let mut out = vec![BigInt::from(spec.order() - 1)];
    for h in 1..=max_h {
        out.push(moisio_closed_form(spec, h)?);
    }
    Ok(out)
}
