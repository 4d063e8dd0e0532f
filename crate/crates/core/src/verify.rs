//! End-to-end verification: every reference table, every oracle equivalence
//! and every structural identity, plus checks specific to one configuration.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::Serialize;

use crate::error::Error;
use crate::field::{FieldElement, FieldSpec};
use crate::kloosterman::{
    brute_moments, k2_via_square, kloosterman_direct, range_report, KloostermanTable,
};
use crate::moments::{
    check_u_sequences, moisio_moments, moments_via_code, pless_lhs_check, salie_counts,
};
use crate::sl_group::{
    delta_count, delta_counts_oracle, gauss_sum_check, sl4_weight_params,
    trace_distribution_closed, trace_distribution_from_deltas, trace_distribution_oracle,
    GroupParams, MATRIX_GATE,
};
use crate::tables::{reproduce, reproduce_with, TableId};
use crate::weights::{
    dual_weights, full_length, weight_distribution_direct, weight_distribution_macwilliams,
    weight_distribution_sl2_form, WeightDistribution,
};

type Outcome = std::result::Result<String, String>;
type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

/// Instance-specific part of the suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub n: u32,
    pub spec: FieldSpec,
    pub max_h: u32,
    pub max_weight: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n: 2,
            spec: FieldSpec::with_default_poly(3).expect("default field"),
            max_h: 29,
            max_weight: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn lib<T>(r: crate::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e: Error| e.to_string())
}

fn field(r: u32) -> std::result::Result<FieldSpec, String> {
    lib(FieldSpec::with_default_poly(r))
}

fn group(n: u32, r: u32) -> std::result::Result<GroupParams, String> {
    lib(GroupParams::new(n, field(r)?))
}

fn compare(what: &str, got: &[BigInt], want: &[BigInt]) -> std::result::Result<(), String> {
    if got.len() != want.len() {
        return Err(format!(
            "{what}: {} rows, expected {}",
            got.len(),
            want.len()
        ));
    }
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        if g != w {
            return Err(format!("{what}: row {i} is {g}, expected {w}"));
        }
    }
    Ok(())
}

fn check_table(id: TableId) -> Outcome {
    let got = lib(reproduce(id))?;
    compare(&format!("table {id}"), &got, &id.reference())?;
    Ok(format!("{} rows equal", got.len()))
}

fn recursion_vs_brute_sl2() -> Outcome {
    for r in 1..=4 {
        let spec = field(r)?;
        let rec = lib(moments_via_code(&lib(GroupParams::new(2, spec))?, 12))?;
        let brute = lib(brute_moments(&spec, 1, 12))?;
        compare(&format!("q = {}", spec.order()), rec.values(), &brute)?;
    }
    Ok("q in {2,4,8,16}, h <= 12".into())
}

fn recursion_vs_brute_sl4() -> Outcome {
    let params = group(4, 1)?;
    let rec = lib(moments_via_code(&params, 8))?;
    let brute = lib(brute_moments(params.spec(), 3, 8))?;
    compare("SL(4,2)", rec.values(), &brute)?;
    Ok("MK_3^h, h <= 8".into())
}

fn weight_routes(r: u32, w: Option<usize>) -> std::result::Result<WeightDistribution, String> {
    let params = group(2, r)?;
    let w = match w {
        Some(w) => w,
        None => lib(full_length(&params))?,
    };
    let direct = lib(weight_distribution_direct(
        &lib(trace_distribution_closed(&params))?,
        w,
    ))?;
    let mw = lib(weight_distribution_macwilliams(
        &lib(dual_weights(&params))?,
        w,
    ))?;
    let sl2 = lib(weight_distribution_sl2_form(params.spec(), w))?;
    if direct != mw {
        return Err(format!("q = {}: direct and MacWilliams differ", params.q()));
    }
    if direct != sl2 {
        return Err(format!("q = {}: direct and SL(2) form differ", params.q()));
    }
    Ok(direct)
}

fn weight_algorithms_agree() -> Outcome {
    weight_routes(2, None)?;
    weight_routes(3, None)?;
    weight_routes(4, Some(32))?;
    Ok("full for q in {4,8}, W = 32 for q = 16".into())
}

fn full_distribution_invariants() -> Outcome {
    for r in [2, 3, 4] {
        let params = group(2, r)?;
        let n = lib(full_length(&params))?;
        // The MacWilliams route is the cheap one at full length.
        let wd = lib(weight_distribution_macwilliams(
            &lib(dual_weights(&params))?,
            n,
        ))?;
        lib(wd.check())?;
        let n0 = lib(trace_distribution_closed(&params))?
            .count(FieldElement::ZERO)
            .clone();
        if wd.counts()[1] != n0 {
            return Err(format!(
                "q = {}: C_1 = {} but n_0 = {n0}",
                params.q(),
                wd.counts()[1]
            ));
        }
        let total: BigUint = wd.counts().iter().sum();
        if total != BigUint::one() << (n - r as usize) {
            return Err(format!("q = {}: sum C_i != 2^(N-r)", params.q()));
        }
    }
    Ok("C_0 = 1, C_1 = n_0, C_i = C_(N-i), sum = 2^(N-r) for q in {4,8,16}".into())
}

const ORACLE_GROUPS: [(u32, u32); 4] = [(2, 2), (2, 3), (2, 4), (4, 1)];

fn trace_oracle() -> Outcome {
    for (n, r) in ORACLE_GROUPS {
        let params = group(n, r)?;
        let closed = lib(trace_distribution_closed(&params))?;
        let oracle = lib(trace_distribution_oracle(&params))?;
        if closed != oracle {
            return Err(format!(
                "SL({n}, {}) closed form differs from enumeration",
                params.q()
            ));
        }
        lib(oracle.check())?;
    }
    Ok("SL(2,4), SL(2,8), SL(2,16), SL(4,2)".into())
}

fn gauss_sums() -> Outcome {
    for (n, r) in ORACLE_GROUPS {
        let params = group(n, r)?;
        let (lhs, rhs) = lib(gauss_sum_check(&params, FieldElement::ONE))?;
        if lhs != rhs {
            return Err(format!("SL({n}, {}): {lhs} != {rhs}", params.q()));
        }
    }
    Ok("sum_g lambda(Tr g) = q^binom(n,2) K_{n-1}(1) on all four groups".into())
}

fn salie_and_closed_forms() -> Outcome {
    for r in [2, 3, 4] {
        let spec = field(r)?;
        let rec = lib(moments_via_code(&lib(GroupParams::new(2, spec))?, 12))?;
        let salie = lib(salie_counts(&spec, 11))?.moments();
        compare(
            &format!("Salie, q = {}", spec.order()),
            &salie,
            rec.values(),
        )?;
        let closed = lib(moisio_moments(&spec, 10))?;
        compare(
            &format!("closed forms, q = {}", spec.order()),
            &closed,
            &rec.values()[..=10],
        )?;
    }
    Ok("q in {4,8,16}: Salie h <= 12, closed forms h <= 10".into())
}

fn u_radicals() -> Outcome {
    let checks = check_u_sequences(12);
    let mut u3_branches = 0;
    for c in &checks {
        if c.matching_signs.is_empty() {
            return Err(format!(
                "{:?}({}) matches no radical branch",
                c.sequence, c.k
            ));
        }
        if c.sequence == crate::moments::USequence::U3 && c.k == 1 {
            u3_branches = c.matching_signs.len();
        }
    }
    Ok(format!(
        "{} values within 1e-12; u3 matches on {u3_branches}/8 branch choices",
        checks.len()
    ))
}

fn square_identity_and_range() -> Outcome {
    for r in [2, 3, 4] {
        let spec = field(r)?;
        let k2 = lib(KloostermanTable::new(&spec, 2))?;
        for a in spec.nonzero() {
            if lib(k2_via_square(&spec, a))? != lib(k2.get(a))? {
                return Err(format!("K_2 != K^2 - q at a = {a}, q = {}", spec.order()));
            }
        }
        lib(range_report(&spec))?;
    }
    Ok("q in {4,8,16}".into())
}

fn polynomial_independence() -> Outcome {
    let a = lib(FieldSpec::new(4, 0b1_0011))?;
    let b = lib(FieldSpec::new(4, 0b1_1001))?;
    for id in [TableId::III, TableId::IV] {
        let ra = lib(reproduce_with(id, &a))?;
        let rb = lib(reproduce_with(id, &b))?;
        compare(&format!("table {id} across polynomials"), &ra, &rb)?;
    }
    Ok("x^4+x+1 and x^4+x^3+1 agree on tables III and IV".into())
}

fn delta_counts() -> Outcome {
    for (n, r) in [(2, 2), (2, 3), (2, 4), (4, 1), (4, 2), (4, 3)] {
        let params = group(n, r)?;
        let oracle = lib(delta_counts_oracle(n - 1, params.spec()))?;
        for beta in params.spec().elements() {
            let closed = lib(delta_count(n - 1, params.spec(), beta))?;
            if closed != oracle[beta.bits() as usize] {
                return Err(format!("delta({}, {}; {beta}) mismatch", n - 1, params.q()));
            }
        }
        let via = lib(trace_distribution_from_deltas(&params, &oracle))?;
        if via != lib(trace_distribution_closed(&params))? {
            return Err(format!(
                "SL({n}, {}): delta form of n_beta disagrees",
                params.q()
            ));
        }
    }
    Ok("closed delta counts and the delta form of n_beta agree with enumeration".into())
}

fn pless_identity() -> Outcome {
    for (n, r, h) in [(2, 2, 8), (2, 3, 8), (2, 4, 6), (4, 1, 6)] {
        let params = group(n, r)?;
        for row in lib(pless_lhs_check(&params, h))? {
            if !row.holds() {
                return Err(format!(
                    "SL({n}, {}), h = {}: {} != {}",
                    params.q(),
                    row.h,
                    row.lhs,
                    row.rhs
                ));
            }
        }
    }
    Ok("dual-code power sums equal the Pless right side".into())
}

fn kloosterman_paths() -> Outcome {
    for r in [2, 3] {
        let spec = field(r)?;
        for m in [2, 3] {
            let table = lib(KloostermanTable::new(&spec, m))?;
            for a in spec.nonzero() {
                if lib(table.get(a))? != lib(kloosterman_direct(&spec, m, a))? {
                    return Err(format!("K_{m}({a}) over GF({}) differs", spec.order()));
                }
            }
        }
    }
    Ok("memoized recursion equals enumeration, m in {2,3}, q in {4,8}".into())
}

fn sl4_params() -> Outcome {
    for r in [2, 3] {
        let spec = field(r)?;
        let w = lib(sl4_weight_params(&spec))?;
        let hist = lib(KloostermanTable::new(&spec, 1))?.histogram();
        let params = lib(GroupParams::new(4, spec))?;
        if &lib(w.total_mass(&hist))? != params.order() {
            return Err(format!("SL(4, {}) mass mismatch", spec.order()));
        }
        let closed = lib(trace_distribution_closed(&params))?;
        let k1 = lib(KloostermanTable::new(&spec, 1))?;
        for beta in spec.nonzero() {
            let t = lib(k1.get(lib(spec.inv(beta))?))?;
            if closed.count(beta) != &w.mt[&t] {
                return Err(format!("m_t differs from n_beta at beta = {beta}"));
            }
        }
    }
    Ok("m_0 + sum m_t = N and m_t = n_beta for q in {4,8}".into())
}

fn config_recursion(config: &VerifyConfig) -> Outcome {
    let params = lib(GroupParams::new(config.n, config.spec))?;
    let rec = lib(moments_via_code(&params, config.max_h))?;
    let brute = lib(brute_moments(&config.spec, config.n - 1, config.max_h))?;
    compare("recursion vs brute force", rec.values(), &brute)?;
    let reference = match (config.n, config.spec.degree()) {
        (2, 3) => Some(TableId::II),
        (2, 4) => Some(TableId::IV),
        _ => None,
    };
    match reference {
        Some(id) => {
            let want = id.reference();
            let k = want.len().min(rec.values().len());
            compare(&format!("table {id}"), &rec.values()[..k], &want[..k])?;
            Ok(format!(
                "{} rows equal brute force; {k} equal rows of table {id}",
                rec.values().len()
            ))
        }
        None => Ok(format!("{} rows equal brute force", rec.values().len())),
    }
}

fn config_weights(config: &VerifyConfig) -> Outcome {
    let params = lib(GroupParams::new(config.n, config.spec))?;
    let w = match params.order_usize() {
        Some(n) => config.max_weight.min(n),
        None => config.max_weight,
    };
    let dist = lib(trace_distribution_closed(&params))?;
    lib(dist.check())?;
    let direct = lib(weight_distribution_direct(&dist, w))?;
    let mw = lib(weight_distribution_macwilliams(
        &lib(dual_weights(&params))?,
        w,
    ))?;
    if direct != mw {
        return Err("direct and MacWilliams weight distributions differ".into());
    }
    let mut detail = format!("C_0..C_{w} agree across routes");
    let work = (config.n as u128 * config.n as u128) * config.spec.degree() as u128;
    if work < 127 && (1u128 << work) <= MATRIX_GATE {
        let oracle = lib(trace_distribution_oracle(&params))?;
        if oracle != dist {
            return Err("trace distribution differs from enumeration".into());
        }
        detail.push_str("; trace distribution matches enumeration");
    }
    Ok(detail)
}

/// Runs the fixed suite and the checks for `config`.
pub fn run_all(config: &VerifyConfig) -> Report {
    let mut suite: Vec<Check<'_>> = vec![
        ("table-I", Box::new(|| check_table(TableId::I))),
        ("table-II", Box::new(|| check_table(TableId::II))),
        ("table-III", Box::new(|| check_table(TableId::III))),
        ("table-IV", Box::new(|| check_table(TableId::IV))),
        ("recursion-vs-brute-sl2", Box::new(recursion_vs_brute_sl2)),
        (
            "recursion-vs-brute-sl4-q2",
            Box::new(recursion_vs_brute_sl4),
        ),
        ("weight-algorithms-agree", Box::new(weight_algorithms_agree)),
        (
            "full-distribution-invariants",
            Box::new(full_distribution_invariants),
        ),
        ("trace-distribution-oracle", Box::new(trace_oracle)),
        ("gauss-sum", Box::new(gauss_sums)),
        ("salie-and-closed-forms", Box::new(salie_and_closed_forms)),
        ("u-sequence-radicals", Box::new(u_radicals)),
        (
            "square-identity-and-range",
            Box::new(square_identity_and_range),
        ),
        ("polynomial-independence", Box::new(polynomial_independence)),
        ("delta-counts", Box::new(delta_counts)),
        ("pless-identity", Box::new(pless_identity)),
        (
            "kloosterman-recursion-vs-direct",
            Box::new(kloosterman_paths),
        ),
        ("sl4-weight-params", Box::new(sl4_params)),
    ];
    suite.push(("config-moments", Box::new(move || config_recursion(config))));
    suite.push(("config-weights", Box::new(move || config_weights(config))));

    let checks: Vec<CheckResult> = suite
        .into_iter()
        .map(|(name, check)| {
            let (passed, detail) = match check() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect();
    let passed = checks.iter().filter(|c| c.passed).count();
    Report {
        passed,
        failed: checks.len() - passed,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let report = run_all(&VerifyConfig::default());
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(report.failed, 0);
    }

    #[test]
    fn sl4_config_suite_passes() {
        let config = VerifyConfig {
            n: 4,
            spec: FieldSpec::with_default_poly(1).unwrap(),
            max_h: 6,
            max_weight: 8,
        };
        let report = run_all(&config);
        assert!(report.all_passed(), "{report:?}");
    }
}
