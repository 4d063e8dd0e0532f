//! SL(n, q) over GF(2^r): group order, the distribution of matrix traces,
//! the delta counts behind it, and the Gauss-sum identity.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Pow, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{ensure_invariant, Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::kloosterman::{for_each_tuple, tuple_count, KloostermanTable};

/// Largest number of matrices the enumeration oracle will sweep.
pub const MATRIX_GATE: u128 = 1 << 26;

/// Largest number of tuples the delta oracle will sweep.
pub const DELTA_GATE: u128 = 1 << 24;

/// Validated `(n, q)` with the group order precomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupParams {
    n: u32,
    spec: FieldSpec,
    order: BigUint,
}

impl GroupParams {
    /// `n` must be a power of two, at least 2.
    pub fn new(n: u32, spec: FieldSpec) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Usage(format!(
                "n must be a power of two >= 2, got {n}"
            )));
        }
        let q = BigUint::from(spec.order());
        let product: BigUint = (2..=n).map(|j| Pow::pow(&q, j) - 1u32).product();
        let order = Pow::pow(&q, binom2(n)) * product;
        Ok(GroupParams { n, spec, order })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn q(&self) -> u32 {
        self.spec.order()
    }

    /// `N = |SL(n, q)|`, also the length of the code.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// `N` as a machine integer, when it fits.
    pub fn order_usize(&self) -> Option<usize> {
        self.order.to_usize()
    }

    /// `binom(n, 2)`.
    pub fn half_dim(&self) -> u32 {
        binom2(self.n)
    }

    /// `q^binom(n, 2)`.
    pub fn scale(&self) -> BigUint {
        Pow::pow(BigUint::from(self.q()), self.half_dim())
    }

    /// `prod_{j=2}^{n} (q^j - 1)`.
    pub fn cyclotomic_product(&self) -> BigUint {
        let q = BigUint::from(self.q());
        (2..=self.n).map(|j| Pow::pow(&q, j) - 1u32).product()
    }
}

fn binom2(n: u32) -> u32 {
    n * (n - 1) / 2
}

/// `|SL(n, q)| = q^binom(n,2) prod_{j=2}^{n} (q^j - 1)`.
pub fn group_order(n: u32, spec: &FieldSpec) -> Result<BigUint> {
    Ok(GroupParams::new(n, *spec)?.order)
}

/// `beta -> n_beta`, the number of group elements with matrix trace `beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceDistribution {
    params: GroupParams,
    /// Indexed by element bits.
    counts: Vec<BigUint>,
}

impl TraceDistribution {
    pub fn from_counts(params: GroupParams, counts: Vec<BigUint>) -> Result<Self> {
        if counts.len() != params.q() as usize {
            return Err(Error::Usage(format!(
                "expected {} trace counts, got {}",
                params.q(),
                counts.len()
            )));
        }
        Ok(TraceDistribution { params, counts })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn count(&self, beta: FieldElement) -> &BigUint {
        &self.counts[beta.bits() as usize]
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn iter(&self) -> impl Iterator<Item = (FieldElement, &BigUint)> {
        self.params.spec.elements().zip(self.counts.iter())
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// `sum_beta n_beta * beta` evaluated in `F_q`.
    pub fn weighted_trace_sum(&self) -> FieldElement {
        let spec = &self.params.spec;
        self.iter()
            .filter(|(_, n)| n.is_odd())
            .fold(FieldElement::ZERO, |acc, (beta, _)| spec.add(acc, beta))
    }

    /// Checks total mass, the weighted trace sum and surjectivity.
    pub fn check(&self) -> Result<()> {
        ensure_invariant!(
            &self.total() == self.params.order(),
            "trace counts sum to {} instead of N = {}",
            self.total(),
            self.params.order()
        );
        ensure_invariant!(
            self.weighted_trace_sum().is_zero(),
            "sum of n_beta * beta is {} instead of 0",
            self.weighted_trace_sum()
        );
        ensure_invariant!(
            self.counts.iter().all(|n| !n.is_zero()),
            "matrix trace is not surjective"
        );
        Ok(())
    }
}

/// `theta(beta)`: `K_{n-2}(beta^{-1})` for `beta != 0` (with `K_0 = lambda`), and 0 at 0.
fn theta_values(params: &GroupParams) -> Result<Vec<i64>> {
    let spec = &params.spec;
    let table = KloostermanTable::new(spec, params.n - 2)?;
    let inverses = spec.inverse_table();
    spec.elements()
        .map(|beta| {
            if beta.is_zero() {
                Ok(0)
            } else {
                table.get(inverses[beta.bits() as usize])
            }
        })
        .collect()
}

/// Closed-form trace distribution
/// `n_beta = q^{binom(n,2)-1} (prod_{j=2}^{n} (q^j - 1) + 1 + q theta(beta))`.
pub fn trace_distribution_closed(params: &GroupParams) -> Result<TraceDistribution> {
    let q = BigInt::from(params.q());
    let prefactor = BigInt::from(Pow::pow(BigUint::from(params.q()), params.half_dim() - 1));
    let base = BigInt::from(params.cyclotomic_product()) + 1;
    let counts = theta_values(params)?
        .into_iter()
        .map(|theta| {
            let n = &prefactor * (&base + &q * theta);
            to_unsigned(n, "n_beta")
        })
        .collect::<Result<Vec<_>>>()?;
    TraceDistribution::from_counts(params.clone(), counts)
}

/// The same distribution written with the delta counts,
/// `n_beta = q^{binom(n,2)-1} (prod (q^j - 1) - (q-1)^{n-1} + q delta(n-1, q; beta))`.
pub fn trace_distribution_from_deltas(
    params: &GroupParams,
    deltas: &[BigUint],
) -> Result<TraceDistribution> {
    if deltas.len() != params.q() as usize {
        return Err(Error::Usage(
            "one delta count per field element required".into(),
        ));
    }
    let q = BigInt::from(params.q());
    let prefactor = BigInt::from(Pow::pow(BigUint::from(params.q()), params.half_dim() - 1));
    let base = BigInt::from(params.cyclotomic_product()) - tuple_count(&params.spec, params.n - 1);
    let counts = deltas
        .iter()
        .map(|d| {
            to_unsigned(
                &prefactor * (&base + &q * BigInt::from(d.clone())),
                "n_beta",
            )
        })
        .collect::<Result<Vec<_>>>()?;
    TraceDistribution::from_counts(params.clone(), counts)
}

fn to_unsigned(value: BigInt, what: &str) -> Result<BigUint> {
    match value.sign() {
        Sign::Minus => Err(Error::Invariant(format!("{what} is negative: {value}"))),
        _ => Ok(value.magnitude().clone()),
    }
}

fn matrix_work(params: &GroupParams) -> u128 {
    let entries = params.n as u128 * params.n as u128;
    let bits = entries * params.spec.degree() as u128;
    if bits >= 127 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

fn check_matrix_gate(params: &GroupParams) -> Result<u128> {
    let work = matrix_work(params);
    if work > MATRIX_GATE {
        return Err(Error::GateExceeded {
            work,
            gate: MATRIX_GATE,
        });
    }
    Ok(work)
}

/// Matrix with index `idx` in lexicographic order: entry `k` (row-major)
/// occupies bits `r*k .. r*(k+1)`, with entry 0 most significant.
fn decode_matrix(idx: u64, n: usize, r: u32, out: &mut [FieldElement]) {
    let mask = (1u64 << r) - 1;
    let entries = n * n;
    for (k, slot) in out.iter_mut().enumerate().take(entries) {
        let shift = r as usize * (entries - 1 - k);
        *slot = FieldElement::from_bits(((idx >> shift) & mask) as u32);
    }
}

/// Determinant by Gaussian elimination over the field. `m` is row-major and
/// is consumed as scratch space.
fn determinant(
    spec: &FieldSpec,
    inverses: &[FieldElement],
    m: &mut [FieldElement],
    n: usize,
) -> FieldElement {
    let mut det = FieldElement::ONE;
    for col in 0..n {
        let Some(pivot_row) = (col..n).find(|&row| !m[row * n + col].is_zero()) else {
            return FieldElement::ZERO;
        };
        if pivot_row != col {
            // Row swaps change no sign in characteristic two.
            for k in 0..n {
                m.swap(pivot_row * n + k, col * n + k);
            }
        }
        let pivot = m[col * n + col];
        det = spec.mul(det, pivot);
        let pivot_inv = inverses[pivot.bits() as usize];
        for row in col + 1..n {
            let lead = m[row * n + col];
            if lead.is_zero() {
                continue;
            }
            let factor = spec.mul(lead, pivot_inv);
            for k in col..n {
                let delta = spec.mul(factor, m[col * n + k]);
                m[row * n + k] = spec.add(m[row * n + k], delta);
            }
        }
    }
    det
}

/// Trace of every element of SL(n, q), in lexicographic matrix order.
/// This is the coordinate vector that defines the code.
pub fn trace_vector(params: &GroupParams) -> Result<Vec<FieldElement>> {
    let work = check_matrix_gate(params)? as u64;
    let spec = params.spec;
    let n = params.n as usize;
    let inverses = spec.inverse_table();
    const CHUNK: u64 = 1 << 12;
    let chunks: Vec<Vec<FieldElement>> = (0..work.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut entries = vec![FieldElement::ZERO; n * n];
            let mut scratch = vec![FieldElement::ZERO; n * n];
            let mut traces = Vec::new();
            for idx in chunk * CHUNK..((chunk + 1) * CHUNK).min(work) {
                decode_matrix(idx, n, spec.degree(), &mut entries);
                scratch.copy_from_slice(&entries);
                if determinant(&spec, &inverses, &mut scratch, n) == FieldElement::ONE {
                    let tr = (0..n).fold(FieldElement::ZERO, |acc, i| {
                        spec.add(acc, entries[i * n + i])
                    });
                    traces.push(tr);
                }
            }
            traces
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Trace distribution by sweeping every `n x n` matrix and keeping those of
/// determinant one. Refuses instances with more than [`MATRIX_GATE`] matrices.
pub fn trace_distribution_oracle(params: &GroupParams) -> Result<TraceDistribution> {
    let work = check_matrix_gate(params)? as u64;
    let spec = params.spec;
    let n = params.n as usize;
    let q = params.q() as usize;
    let inverses = spec.inverse_table();
    let hist = (0..work)
        .into_par_iter()
        .fold(
            || {
                (
                    vec![0u64; q],
                    vec![FieldElement::ZERO; n * n],
                    vec![FieldElement::ZERO; n * n],
                )
            },
            |(mut hist, mut entries, mut scratch), idx| {
                decode_matrix(idx, n, spec.degree(), &mut entries);
                scratch.copy_from_slice(&entries);
                if determinant(&spec, &inverses, &mut scratch, n) == FieldElement::ONE {
                    let tr = (0..n).fold(FieldElement::ZERO, |acc, i| {
                        spec.add(acc, entries[i * n + i])
                    });
                    hist[tr.bits() as usize] += 1;
                }
                (hist, entries, scratch)
            },
        )
        .map(|(hist, _, _)| hist)
        .reduce(
            || vec![0u64; q],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    TraceDistribution::from_counts(
        params.clone(),
        hist.into_iter().map(BigUint::from).collect(),
    )
}

/// `delta(n-1, q; beta)`: tuples in `(F_q^*)^{n-1}` with
/// `x_1 + ... + x_{n-1} + (x_1 ... x_{n-1})^{-1} = beta`, in closed form.
pub fn delta_count(n_minus_1: u32, spec: &FieldSpec, beta: FieldElement) -> Result<BigUint> {
    let n = n_minus_1 + 1;
    GroupParams::new(n, *spec)?;
    spec.element(beta.bits())?;
    let q = BigInt::from(spec.order());
    let numerator: BigInt = tuple_count(spec, n_minus_1) + 1;
    let (base, rem) = numerator.div_rem(&q);
    ensure_invariant!(
        rem.is_zero(),
        "(q-1)^{n_minus_1} + 1 is not divisible by q = {q}"
    );
    let value = if beta.is_zero() {
        base
    } else {
        let theta = KloostermanTable::new(spec, n - 2)?.get(spec.inv(beta)?)?;
        base + theta
    };
    to_unsigned(value, "delta")
}

/// All delta counts by sweeping `(F_q^*)^{n-1}`, indexed by `beta` bits.
pub fn delta_counts_oracle(n_minus_1: u32, spec: &FieldSpec) -> Result<Vec<BigUint>> {
    let work = (spec.order() as u128 - 1).saturating_pow(n_minus_1);
    if work > DELTA_GATE {
        return Err(Error::GateExceeded {
            work,
            gate: DELTA_GATE,
        });
    }
    let inverses = spec.inverse_table();
    let mut hist = vec![0u64; spec.order() as usize];
    for_each_tuple(spec, n_minus_1 as usize, |sum, prod| {
        let value = spec.add(sum, inverses[prod.bits() as usize]);
        hist[value.bits() as usize] += 1;
    });
    Ok(hist.into_iter().map(BigUint::from).collect())
}

/// Both sides of `sum_g psi(Tr g) = q^binom(n,2) K_{n-1}(psi; 1)` for
/// `psi(x) = lambda(c x)`. The left side comes from the enumeration oracle,
/// the right from the Kloosterman tables via `K_{n-1}(psi; 1) = K_{n-1}(lambda; c^n)`.
pub fn gauss_sum_check(params: &GroupParams, c: FieldElement) -> Result<(BigInt, BigInt)> {
    let spec = params.spec;
    if c.is_zero() {
        return Err(Error::Domain(
            "the character must be nontrivial (c != 0)".into(),
        ));
    }
    spec.element(c.bits())?;
    let dist = trace_distribution_oracle(params)?;
    let lhs: BigInt = dist
        .iter()
        .map(|(beta, n)| BigInt::from(n.clone()) * spec.lambda(spec.mul(c, beta)))
        .sum();
    let arg = spec.pow(c, params.n as u64);
    let k = KloostermanTable::new(&spec, params.n - 1)?.get(arg)?;
    let rhs = BigInt::from(params.scale()) * k;
    Ok((lhs, rhs))
}

/// Binomial bases for SL(4, q): `m_0 = n_0` and `m_t`, the common value of
/// `n_beta` over all `beta` with `K(beta^{-1}) = t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl4WeightParams {
    pub m0: BigUint,
    pub mt: BTreeMap<i64, BigUint>,
}

impl Sl4WeightParams {
    /// `m_0 + sum_t mult(t) m_t` for a histogram of `K(a)` over `F_q^*`.
    pub fn total_mass(&self, histogram: &BTreeMap<i64, u64>) -> Result<BigUint> {
        let mut total = self.m0.clone();
        for (t, mult) in histogram {
            let m = self
                .mt
                .get(t)
                .ok_or_else(|| Error::Invariant(format!("K value {t} is not admissible")))?;
            total += m * *mult;
        }
        Ok(total)
    }
}

/// `m_0 = q^5 (prod_{j=2}^{4} (q^j - 1) + 1)` and
/// `m_t = q^6 (q^2 (q^2 - 1)(q^4 - q - 1) + t^2)` for each admissible `t`.
pub fn sl4_weight_params(spec: &FieldSpec) -> Result<Sl4WeightParams> {
    if spec.degree() < 2 {
        return Err(Error::NotApplicable(
            "SL(4, q) weight parameters need r >= 2".into(),
        ));
    }
    let params = GroupParams::new(4, *spec)?;
    let q = BigUint::from(spec.order());
    let m0 = Pow::pow(&q, 5u32) * (params.cyclotomic_product() + 1u32);
    let q2 = &q * &q;
    let base = &q2 * (&q2 - 1u32) * (Pow::pow(&q, 4u32) - &q - 1u32);
    let q6 = Pow::pow(&q, 6u32);
    let mt = crate::kloosterman::admissible_values(spec.order())
        .into_iter()
        .map(|t| {
            let t2 = BigUint::from(t.unsigned_abs()).pow(2u32);
            (t, &q6 * (&base + t2))
        })
        .collect();
    Ok(Sl4WeightParams { m0, mt })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, r: u32) -> GroupParams {
        GroupParams::new(n, FieldSpec::with_default_poly(r).unwrap()).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn orders() {
        assert_eq!(params(2, 3).order(), &big(504));
        assert_eq!(params(2, 4).order(), &big(4080));
        assert_eq!(params(4, 1).order(), &big(20160));
        assert_eq!(params(2, 2).order(), &big(60));
        let gf8 = FieldSpec::with_default_poly(3).unwrap();
        assert!(matches!(group_order(3, &gf8), Err(Error::Usage(_))));
        assert!(matches!(group_order(1, &gf8), Err(Error::Usage(_))));
        assert!(group_order(6, &gf8).is_err());
    }

    #[test]
    fn sl2_q8_closed_form() {
        let p = params(2, 3);
        let dist = trace_distribution_closed(&p).unwrap();
        dist.check().unwrap();
        let spec = *p.spec();
        assert_eq!(dist.count(FieldElement::ZERO), &big(64));
        for beta in spec.nonzero() {
            let expected = if spec.trace(spec.inv(beta).unwrap()) == 0 {
                72
            } else {
                56
            };
            assert_eq!(dist.count(beta), &big(expected));
        }
        let n72 = dist.counts().iter().filter(|n| **n == big(72)).count();
        assert_eq!(n72, 3);
        assert_eq!(
            trace_distribution_closed(&params(2, 4))
                .unwrap()
                .count(FieldElement::ZERO),
            &big(256)
        );
    }

    #[test]
    fn closed_form_matches_oracle_small() {
        for (n, r) in [(2, 1), (2, 2), (2, 3), (4, 1)] {
            let p = params(n, r);
            let closed = trace_distribution_closed(&p).unwrap();
            let oracle = trace_distribution_oracle(&p).unwrap();
            assert_eq!(closed, oracle, "SL({n}, 2^{r})");
            oracle.check().unwrap();
        }
        let oracle = trace_distribution_oracle(&params(2, 2)).unwrap();
        assert_eq!(oracle.total(), big(60));
    }

    #[test]
    fn oracle_gate() {
        assert!(matches!(
            trace_distribution_oracle(&params(4, 2)),
            Err(Error::GateExceeded { work, gate }) if work == 1 << 32 && gate == MATRIX_GATE
        ));
    }

    #[test]
    fn trace_vector_is_consistent() {
        let p = params(2, 2);
        let v = trace_vector(&p).unwrap();
        assert_eq!(v.len(), 60);
        let dist = trace_distribution_oracle(&p).unwrap();
        for beta in p.spec().elements() {
            let c = v.iter().filter(|&&t| t == beta).count();
            assert_eq!(&big(c as u64), dist.count(beta));
        }
        // identity matrix of SL(2,4) sits after every matrix with a smaller first entry
        assert!(v.contains(&FieldElement::ZERO));
    }

    #[test]
    fn deltas() {
        let gf8 = FieldSpec::with_default_poly(3).unwrap();
        assert_eq!(delta_count(1, &gf8, FieldElement::ZERO).unwrap(), big(1));
        for beta in gf8.nonzero() {
            let expected = if gf8.trace(gf8.inv(beta).unwrap()) == 0 {
                2
            } else {
                0
            };
            assert_eq!(delta_count(1, &gf8, beta).unwrap(), big(expected));
        }
        let gf4 = FieldSpec::with_default_poly(2).unwrap();
        assert_eq!(delta_count(3, &gf4, FieldElement::ZERO).unwrap(), big(7));
        assert!(delta_count(2, &gf4, FieldElement::ZERO).is_err());
        for (m, r) in [(1, 2), (1, 3), (1, 4), (3, 1), (3, 2), (3, 3), (7, 1)] {
            let spec = FieldSpec::with_default_poly(r).unwrap();
            let oracle = delta_counts_oracle(m, &spec).unwrap();
            for beta in spec.elements() {
                assert_eq!(
                    delta_count(m, &spec, beta).unwrap(),
                    oracle[beta.bits() as usize],
                    "m={m} r={r} beta={beta}"
                );
            }
        }
    }

    #[test]
    fn delta_form_matches_closed_form() {
        for (n, r) in [(2, 2), (2, 3), (2, 4), (4, 1), (4, 2), (4, 3), (8, 1)] {
            let p = params(n, r);
            let deltas = delta_counts_oracle(n - 1, p.spec()).unwrap();
            assert_eq!(
                trace_distribution_from_deltas(&p, &deltas).unwrap(),
                trace_distribution_closed(&p).unwrap()
            );
        }
    }

    #[test]
    fn gauss_sums() {
        for (n, r) in [(2, 2), (2, 3), (4, 1)] {
            let p = params(n, r);
            for c in p.spec().nonzero() {
                let (lhs, rhs) = gauss_sum_check(&p, c).unwrap();
                assert_eq!(lhs, rhs, "SL({n}, 2^{r}), c={c}");
            }
        }
        let p = params(2, 3);
        let (lhs, _) = gauss_sum_check(&p, FieldElement::ONE).unwrap();
        let k1 = crate::kloosterman::kloosterman(p.spec(), 1, FieldElement::ONE).unwrap();
        assert_eq!(lhs, BigInt::from(8 * k1));
        assert!(gauss_sum_check(&p, FieldElement::ZERO).is_err());
    }

    #[test]
    fn sl4_params_q4() {
        let spec = FieldSpec::with_default_poly(2).unwrap();
        let w = sl4_weight_params(&spec).unwrap();
        assert_eq!(w.m0, big(4u64.pow(5) * (15 * 63 * 255 + 1)));
        assert_eq!(w.mt.keys().copied().collect::<Vec<_>>(), vec![-1, 3]);
        for (t, m) in &w.mt {
            assert_eq!(*m, big(4u64.pow(6) * (16 * 15 * 251 + (t * t) as u64)));
        }
        let hist = KloostermanTable::new(&spec, 1).unwrap().histogram();
        let p = params(4, 2);
        assert_eq!(&w.total_mass(&hist).unwrap(), p.order());

        let closed = trace_distribution_closed(&p).unwrap();
        let k1 = KloostermanTable::new(&spec, 1).unwrap();
        assert_eq!(closed.count(FieldElement::ZERO), &w.m0);
        for beta in spec.nonzero() {
            let t = k1.get(spec.inv(beta).unwrap()).unwrap();
            assert_eq!(closed.count(beta), &w.mt[&t]);
        }
        assert!(matches!(
            sl4_weight_params(&FieldSpec::with_default_poly(1).unwrap()),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn distributions_satisfy_invariants() {
        for (n, r) in [
            (2, 1),
            (2, 2),
            (2, 5),
            (2, 6),
            (4, 2),
            (4, 3),
            (4, 4),
            (8, 1),
            (8, 2),
        ] {
            trace_distribution_closed(&params(n, r))
                .unwrap()
                .check()
                .unwrap();
        }
    }
}
