//! Weight distributions of the binary code `C(SL(n, q))` and of its dual.
//!
//! `C` is the set of binary words of length `N` orthogonal to the vector of
//! matrix traces; its dual is `{ c(a) = (tr(a Tr g))_g : a in F_q }`.
//!
//! Three independent routes produce `C_0..C_W`:
//! * a dynamic program over the additive group of `F_q` that tracks the parity
//!   of the number of chosen coordinates in each trace class,
//! * the MacWilliams transform of the `q` dual weights,
//! * the `n = 2` specialization with binomial bases `q^2`, `q^2 + q`, `q^2 - q`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{ensure_invariant, Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::kloosterman::KloostermanTable;
use crate::poly::{binomial, binomial_row, even_odd_split, krawtchouk_row, mul_add_truncated};
use crate::sl_group::{trace_distribution_closed, GroupParams, TraceDistribution};

/// Weights of the `q` dual codewords `c(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualWeights {
    params: GroupParams,
    /// Indexed by `a` bits; slot 0 is the zero word.
    weights: Vec<BigUint>,
}

impl DualWeights {
    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn weight(&self, a: FieldElement) -> &BigUint {
        &self.weights[a.bits() as usize]
    }

    pub fn weights(&self) -> &[BigUint] {
        &self.weights
    }

    /// Distinct weights with multiplicities, zero word included.
    pub fn spectrum(&self) -> BTreeMap<BigUint, u64> {
        let mut out = BTreeMap::new();
        for w in &self.weights {
            *out.entry(w.clone()).or_insert(0) += 1;
        }
        out
    }

    fn check(&self) -> Result<()> {
        let n = self.params.order();
        ensure_invariant!(
            self.weights.len() == self.params.q() as usize,
            "expected q dual weights"
        );
        ensure_invariant!(self.weights[0].is_zero(), "c(0) must be the zero word");
        for (a, w) in self.weights.iter().enumerate().skip(1) {
            ensure_invariant!(
                !w.is_zero() && w < n,
                "dual weight of c({a}) = {w} outside (0, N)"
            );
        }
        Ok(())
    }
}

/// Dual weights `w(c(a)) = (N - q^binom(n,2) K_{n-1}(a)) / 2`, each cross-checked
/// against the direct count `sum_{beta : tr(a beta) = 1} n_beta`.
pub fn dual_weights(params: &GroupParams) -> Result<DualWeights> {
    let spec = params.spec();
    let table = KloostermanTable::new(spec, params.n() - 1)?;
    let n = BigInt::from(params.order().clone());
    let scale = BigInt::from(params.scale());
    let mut weights = vec![BigUint::zero()];
    for (a, k) in table.iter() {
        let (w, rem) = (&n - &scale * k).div_rem(&BigInt::from(2));
        ensure_invariant!(rem.is_zero(), "N - q^binom(n,2) K(a) is odd for a = {a}");
        ensure_invariant!(w.sign() != Sign::Minus, "negative dual weight for a = {a}");
        weights.push(w.magnitude().clone());
    }
    let dw = DualWeights {
        params: params.clone(),
        weights,
    };
    let counted = dual_weights_from_distribution(&trace_distribution_closed(params)?);
    for a in spec.nonzero() {
        ensure_invariant!(
            dw.weight(a) == counted.weight(a),
            "dual weight formula {} disagrees with coordinate count {} at a = {a}",
            dw.weight(a),
            counted.weight(a)
        );
    }
    dw.check()?;
    Ok(dw)
}

/// Dual weights by counting nonzero coordinates: `sum_{beta : tr(a beta) = 1} n_beta`.
pub fn dual_weights_from_distribution(dist: &TraceDistribution) -> DualWeights {
    let spec = dist.params().spec();
    let weights = spec
        .elements()
        .map(|a| {
            dist.iter()
                .filter(|(beta, _)| spec.trace(spec.mul(a, *beta)) == 1)
                .map(|(_, n)| n)
                .sum()
        })
        .collect();
    DualWeights {
        params: dist.params().clone(),
        weights,
    }
}

/// `C_0..C_W` for the code of length `N`. `full` when `W = N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDistribution {
    params: GroupParams,
    counts: Vec<BigUint>,
}

impl WeightDistribution {
    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    /// Truncation bound `W`.
    pub fn max_weight(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn get(&self, i: usize) -> Option<&BigUint> {
        self.counts.get(i)
    }

    pub fn is_full(&self) -> bool {
        BigUint::from(self.max_weight()) == *self.params.order()
    }

    /// Keeps `C_0..C_w`.
    pub fn truncated(&self, w: usize) -> Result<WeightDistribution> {
        if w > self.max_weight() {
            return Err(Error::Usage(format!(
                "cannot truncate to {w}, only {} weights known",
                self.max_weight()
            )));
        }
        Ok(WeightDistribution {
            params: self.params.clone(),
            counts: self.counts[..=w].to_vec(),
        })
    }

    /// `C_0 = 1`; on full distributions also `sum C_i = 2^(N - r)` and `C_i = C_{N-i}`.
    pub fn check(&self) -> Result<()> {
        ensure_invariant!(
            self.counts[0].is_one(),
            "C_0 = {} instead of 1",
            self.counts[0]
        );
        if self.is_full() {
            let total: BigUint = self.counts.iter().sum();
            let dim = self.max_weight() - self.params.spec().degree() as usize;
            ensure_invariant!(
                total == BigUint::one() << dim,
                "sum of C_i is not 2^(N - r)"
            );
            let len = self.counts.len();
            for i in 0..len / 2 {
                ensure_invariant!(
                    self.counts[i] == self.counts[len - 1 - i],
                    "C_{i} != C_(N-{i})"
                );
            }
        }
        Ok(())
    }
}

fn check_truncation(params: &GroupParams, w: usize) -> Result<()> {
    if BigUint::from(w) > *params.order() {
        return Err(Error::Usage(format!(
            "max weight {w} exceeds code length N = {}",
            params.order()
        )));
    }
    Ok(())
}

/// The parity DP shared by the direct and `n = 2` routes.
///
/// In characteristic two `sum nu_beta beta` depends only on the parity of each
/// `nu_beta`, so the constraint is tracked in `q` slots indexed by the running
/// XOR; each class contributes its even part in place and its odd part shifted
/// by `beta`.
fn parity_dp(spec: &FieldSpec, counts: &[BigUint], max_weight: usize) -> Result<Vec<BigUint>> {
    let q = spec.order() as usize;
    let mut slots: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); max_weight + 1]; q];
    slots[0][0] = BigUint::one();
    for beta in spec.elements() {
        let row = binomial_row(&counts[beta.bits() as usize], max_weight);
        let (even, odd) = even_odd_split(&row)?;
        let b = beta.bits() as usize;
        let prev = &slots;
        slots = (0..q)
            .into_par_iter()
            .map(|s| {
                let mut acc = vec![BigUint::zero(); max_weight + 1];
                mul_add_truncated(&mut acc, &prev[s], &even);
                mul_add_truncated(&mut acc, &prev[s ^ b], &odd);
                acc
            })
            .collect();
    }
    Ok(slots.swap_remove(0))
}

/// `C_i = sum prod_beta binom(n_beta, nu_beta)` over `sum nu_beta = i`,
/// `sum nu_beta beta = 0`, via the parity DP.
pub fn weight_distribution_direct(
    dist: &TraceDistribution,
    max_weight: usize,
) -> Result<WeightDistribution> {
    let params = dist.params();
    check_truncation(params, max_weight)?;
    let counts = parity_dp(params.spec(), dist.counts(), max_weight)?;
    let wd = WeightDistribution {
        params: params.clone(),
        counts,
    };
    wd.check()?;
    Ok(wd)
}

/// `C_i = (1/q) sum_a [x^i] (1 + x)^(N - w(c(a))) (1 - x)^w(c(a))`.
pub fn weight_distribution_macwilliams(
    dw: &DualWeights,
    max_weight: usize,
) -> Result<WeightDistribution> {
    let params = dw.params();
    check_truncation(params, max_weight)?;
    let len = params.order();
    let spectrum: Vec<(BigUint, u64)> = dw.spectrum().into_iter().collect();
    let terms = spectrum
        .par_iter()
        .map(|(w, mult)| {
            krawtchouk_row(len, w, max_weight)
                .map(|row| row.into_iter().map(|c| c * *mult).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let q = BigInt::from(params.q());
    let mut counts = Vec::with_capacity(max_weight + 1);
    for i in 0..=max_weight {
        let total: BigInt = terms.iter().map(|t| &t[i]).sum();
        let (c, rem) = total.div_rem(&q);
        ensure_invariant!(
            rem.is_zero(),
            "MacWilliams sum for C_{i} not divisible by q"
        );
        ensure_invariant!(c.sign() != Sign::Minus, "MacWilliams gives negative C_{i}");
        counts.push(c.magnitude().clone());
    }
    let wd = WeightDistribution {
        params: params.clone(),
        counts,
    };
    wd.check()?;
    Ok(wd)
}

/// `n = 2`: bases `q^2` at `beta = 0`, `q^2 + q` where `tr(beta^{-1}) = 0`,
/// `q^2 - q` where `tr(beta^{-1}) = 1`.
pub fn weight_distribution_sl2_form(
    spec: &FieldSpec,
    max_weight: usize,
) -> Result<WeightDistribution> {
    let params = GroupParams::new(2, *spec)?;
    check_truncation(&params, max_weight)?;
    let q = BigUint::from(spec.order());
    let q2 = &q * &q;
    let counts: Vec<BigUint> = spec
        .elements()
        .map(|beta| {
            if beta.is_zero() {
                Ok(q2.clone())
            } else if spec.trace(spec.inv(beta)?) == 0 {
                Ok(&q2 + &q)
            } else {
                Ok(&q2 - &q)
            }
        })
        .collect::<Result<_>>()?;
    let wd = WeightDistribution {
        params,
        counts: parity_dp(spec, &counts, max_weight)?,
    };
    wd.check()?;
    Ok(wd)
}

/// Largest `q` accepted by [`weight_distribution_compositions`].
pub const COMPOSITION_MAX_Q: u32 = 4;
/// Largest `W` accepted by [`weight_distribution_compositions`].
pub const COMPOSITION_MAX_W: usize = 6;

/// Literal sum over all tuples `(nu_beta)`; tiny instances only.
pub fn weight_distribution_compositions(
    dist: &TraceDistribution,
    max_weight: usize,
) -> Result<WeightDistribution> {
    let params = dist.params();
    if params.q() > COMPOSITION_MAX_Q || max_weight > COMPOSITION_MAX_W {
        return Err(Error::Usage(format!(
            "composition enumeration needs q <= {COMPOSITION_MAX_Q} and W <= {COMPOSITION_MAX_W}"
        )));
    }
    check_truncation(params, max_weight)?;
    let spec = params.spec();
    let q = params.q() as usize;
    let mut counts = vec![BigUint::zero(); max_weight + 1];
    let mut nu = vec![0usize; q];
    loop {
        let total: usize = nu.iter().sum();
        if total <= max_weight {
            let xor = spec
                .elements()
                .filter(|b| nu[b.bits() as usize] % 2 == 1)
                .fold(FieldElement::ZERO, |acc, b| spec.add(acc, b));
            if xor.is_zero() {
                let term: BigUint = nu
                    .iter()
                    .zip(dist.counts())
                    .map(|(&k, n)| binomial(n, k as u64))
                    .product();
                counts[total] += term;
            }
        }
        // odometer over [0, W]^q
        let mut pos = 0;
        loop {
            if pos == q {
                return Ok(WeightDistribution {
                    params: params.clone(),
                    counts,
                });
            }
            nu[pos] += 1;
            if nu[pos] <= max_weight {
                break;
            }
            nu[pos] = 0;
            pos += 1;
        }
    }
}

/// Weight distribution computed directly from an explicit coordinate vector
/// of traces, by the parity DP applied to its class sizes. Used to confirm
/// that reordering coordinates leaves the distribution unchanged.
pub fn weight_distribution_from_coordinates(
    params: &GroupParams,
    coordinates: &[FieldElement],
    max_weight: usize,
) -> Result<WeightDistribution> {
    let spec = params.spec();
    ensure_invariant!(
        BigUint::from(coordinates.len()) == *params.order(),
        "coordinate vector has wrong length"
    );
    let mut sizes = vec![BigUint::zero(); spec.order() as usize];
    for c in coordinates {
        sizes[c.bits() as usize] += 1u32;
    }
    let dist = TraceDistribution::from_counts(params.clone(), sizes)?;
    weight_distribution_direct(&dist, max_weight)
}

/// `N` as a machine-sized truncation bound, for full distributions.
pub fn full_length(params: &GroupParams) -> Result<usize> {
    params.order().to_usize().ok_or_else(|| {
        Error::Usage(format!(
            "N = {} is too large for a full distribution",
            params.order()
        ))
    })
}

/// `2^(N - r)`, the size of the code.
pub fn code_size(params: &GroupParams) -> Result<BigUint> {
    let n = full_length(params)?;
    Ok(Pow::pow(
        BigUint::from(2u32),
        n - params.spec().degree() as usize,
    ))
}
