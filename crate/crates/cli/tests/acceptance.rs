//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails the
//! test if any criterion failed.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use klooster_core::field::{FieldElement, FieldSpec};
use klooster_core::kloosterman::{brute_moments, k2_via_square, KloostermanTable};
use klooster_core::moments::{moisio_moments, moments_via_code, salie_counts};
use klooster_core::sl_group::{
    gauss_sum_check, trace_distribution_closed, trace_distribution_oracle, GroupParams,
};
use klooster_core::tables::{reproduce_with, TableId};
use klooster_core::weights::{
    dual_weights, full_length, weight_distribution_direct, weight_distribution_macwilliams,
    weight_distribution_sl2_form,
};
use num_bigint::{BigInt, BigUint};
use serde_json::Value;

const TABLE_I: [&str; 22] = [
    "1",
    "64",
    "15844",
    "2650560",
    "332067914",
    "33207770816",
    "2761774095732",
    "196480443747136",
    "12206347634256355",
    "672705382226871680",
    "33298916433035363704",
    "1495424065262442956416",
    "61437005346735099526740",
    "2325154356197975713774208",
    "81546484920999191101202360",
    "2663851840752718923500482944",
    "81413971883002952517354367429",
    "2337059898759141068388769445824",
    "63230453927539041393172170525052",
    "1617368453093893435845237341156928",
    "39221184987526914436447793737809822",
    "903954930188715550538753640492641088",
];

const TABLE_II: [&str; 30] = [
    "7",
    "1",
    "55",
    "-47",
    "871",
    "-2399",
    "17815",
    "-71567",
    "410311",
    "-1894079",
    "9942775",
    "-48296687",
    "245734951",
    "-1215920159",
    "6117864535",
    "-30474531407",
    "152717030791",
    "-762552032639",
    "3815859527095",
    "-19069999543727",
    "95377891993831",
    "-476805777143519",
    "2384279934194455",
    "-11920646525541647",
    "59605492064000071",
    "-298020682011124799",
    "1490123744982250615",
    "-7450557720131373167",
    "37252971614996505511",
    "-186264309031963608479",
];

const TABLE_III: [&str; 12] = [
    "1",
    "256",
    "520072",
    "706962176",
    "720560061732",
    "587401078798592",
    "398943240589827320",
    "232184965775802188544",
    "118211170698394115200330",
    "53483987453818691622983424",
    "21773331292449548118228026776",
    "8056132578206330016084726166784",
];

const TABLE_IV: [&str; 12] = [
    "15",
    "1",
    "239",
    "289",
    "7631",
    "22081",
    "300719",
    "1343329",
    "13118351",
    "72973441",
    "604249199",
    "3760049569",
];

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn field(r: u32) -> FieldSpec {
    FieldSpec::with_default_poly(r).unwrap()
}

fn group(n: u32, r: u32) -> GroupParams {
    GroupParams::new(n, field(r)).unwrap()
}

fn klooster(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_klooster"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn strings(v: &Value, key: &str) -> Result<Vec<String>, String> {
    v[key]
        .as_array()
        .ok_or_else(|| format!("missing array {key:?}"))?
        .iter()
        .map(|x| {
            x.as_str()
                .map(str::to_string)
                .ok_or_else(|| format!("non-string in {key:?}"))
        })
        .collect()
}

fn exact(got: &[String], want: &[&str]) -> Outcome {
    if got.len() != want.len() {
        return Err(format!("{} values, expected {}", got.len(), want.len()));
    }
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        if g != w {
            return Err(format!("row {i}: {g} != {w}"));
        }
    }
    Ok(format!(
        "{} values exact, last {}",
        got.len(),
        got[got.len() - 1]
    ))
}

fn same<T: PartialEq + std::fmt::Debug>(what: &str, a: &T, b: &T) -> Result<(), String> {
    if a == b {
        Ok(())
    } else {
        Err(format!("{what}: {a:?} != {b:?}"))
    }
}

fn table_i() -> Outcome {
    let v = klooster(&["weights", "--n", "2", "--r", "3", "--max-weight", "21"])?;
    exact(&strings(&v, "counts")?, &TABLE_I)
}

fn table_ii() -> Outcome {
    let v = klooster(&[
        "moments",
        "--n",
        "2",
        "--r",
        "3",
        "--max-h",
        "29",
        "--method",
        "recursion",
    ])?;
    exact(&strings(&v, "values")?, &TABLE_II)
}

fn table_iii() -> Outcome {
    let v = klooster(&["weights", "--n", "2", "--r", "4", "--max-weight", "11"])?;
    exact(&strings(&v, "counts")?, &TABLE_III)
}

fn table_iv() -> Outcome {
    let v = klooster(&[
        "moments",
        "--n",
        "2",
        "--r",
        "4",
        "--max-h",
        "11",
        "--method",
        "recursion",
    ])?;
    exact(&strings(&v, "values")?, &TABLE_IV)
}

fn recursion_vs_brute() -> Outcome {
    for r in 1..=4 {
        let rec = moments_via_code(&group(2, r), 12).map_err(|e| e.to_string())?;
        let brute = brute_moments(&field(r), 1, 12).map_err(|e| e.to_string())?;
        same(&format!("q = {}", 1 << r), &rec.values().to_vec(), &brute)?;
    }
    Ok("q in {2,4,8,16}, h = 0..=12".into())
}

fn sl4_q2() -> Outcome {
    let rec = moments_via_code(&group(4, 1), 8).map_err(|e| e.to_string())?;
    let brute = brute_moments(&field(1), 3, 8).map_err(|e| e.to_string())?;
    same("SL(4,2)", &rec.values().to_vec(), &brute)?;
    Ok(format!(
        "MK_3^0..8 = {:?}",
        brute.iter().map(BigInt::to_string).collect::<Vec<_>>()
    ))
}

fn algorithm_agreement() -> Outcome {
    for (r, w) in [(2, None), (3, None), (4, Some(32))] {
        let params = group(2, r);
        let w = w.unwrap_or_else(|| full_length(&params).unwrap());
        let dist = trace_distribution_closed(&params).unwrap();
        let direct = weight_distribution_direct(&dist, w).map_err(|e| e.to_string())?;
        let mw = weight_distribution_macwilliams(&dual_weights(&params).unwrap(), w)
            .map_err(|e| e.to_string())?;
        let sl2 = weight_distribution_sl2_form(params.spec(), w).map_err(|e| e.to_string())?;
        same(
            &format!("direct/macwilliams q = {}", params.q()),
            &direct,
            &mw,
        )?;
        same(&format!("direct/sl2 q = {}", params.q()), &direct, &sl2)?;
    }
    Ok("full for q = 4, 8; W = 32 for q = 16".into())
}

fn structural_invariants() -> Outcome {
    for r in [2, 3, 4] {
        let params = group(2, r);
        let n = full_length(&params).unwrap();
        let c = weight_distribution_macwilliams(&dual_weights(&params).unwrap(), n)
            .map_err(|e| e.to_string())?;
        let c = c.counts();
        let n0 = trace_distribution_closed(&params)
            .unwrap()
            .count(FieldElement::ZERO)
            .clone();
        same("C_0", &c[0], &BigUint::from(1u32))?;
        same("C_1", &c[1], &n0)?;
        for i in 0..=n {
            same(&format!("C_{i} vs C_N-{i}"), &c[i], &c[n - i])?;
        }
        let total: BigUint = c.iter().sum();
        same("sum", &total, &(BigUint::from(1u32) << (n - r as usize)))?;
    }
    Ok("q in {4,8,16}, N = 60, 504, 4080".into())
}

const ORACLE_GROUPS: [(u32, u32); 4] = [(2, 2), (2, 3), (2, 4), (4, 1)];

fn trace_oracle() -> Outcome {
    for (n, r) in ORACLE_GROUPS {
        let params = group(n, r);
        let closed = trace_distribution_closed(&params).unwrap();
        let oracle = trace_distribution_oracle(&params).map_err(|e| e.to_string())?;
        same(&format!("SL({n}, {})", params.q()), &closed, &oracle)?;
    }
    Ok("SL(2,4), SL(2,8), SL(2,16), SL(4,2)".into())
}

fn gauss_sum() -> Outcome {
    let mut detail = Vec::new();
    for (n, r) in ORACLE_GROUPS {
        let params = group(n, r);
        let (lhs, rhs) = gauss_sum_check(&params, FieldElement::ONE).map_err(|e| e.to_string())?;
        same(&format!("SL({n}, {})", params.q()), &lhs, &rhs)?;
        detail.push(format!("SL({n},{})={lhs}", params.q()));
    }
    Ok(detail.join(", "))
}

fn salie_and_closed_forms() -> Outcome {
    for r in [2, 3, 4] {
        let rec = moments_via_code(&group(2, r), 12).unwrap().into_values();
        let salie = salie_counts(&field(r), 11)
            .map_err(|e| e.to_string())?
            .moments();
        same(&format!("Salie q = {}", 1 << r), &salie, &rec)?;
        let closed = moisio_moments(&field(r), 10).map_err(|e| e.to_string())?;
        same(
            &format!("closed q = {}", 1 << r),
            &closed,
            &rec[..=10].to_vec(),
        )?;
    }
    Ok("q in {4,8,16}".into())
}

fn square_identity_and_range() -> Outcome {
    for r in [2, 3, 4] {
        let spec = field(r);
        let q = spec.order() as i64;
        let k1 = KloostermanTable::new(&spec, 1).unwrap();
        let k2 = KloostermanTable::new(&spec, 2).unwrap();
        for a in spec.nonzero() {
            let t = k1.get(a).unwrap();
            same(
                &format!("K_2({a}), q = {q}"),
                &k2.get(a).unwrap(),
                &(t * t - q),
            )?;
            same(
                "square helper",
                &k2_via_square(&spec, a).unwrap(),
                &(t * t - q),
            )?;
            if t * t >= 4 * q || t.rem_euclid(4) != 3 {
                return Err(format!("K({a}) = {t} out of range for q = {q}"));
            }
        }
    }
    Ok("every a in F_q^*, q in {4,8,16}".into())
}

fn polynomial_independence() -> Outcome {
    let a = FieldSpec::new(4, 0b1_0011).unwrap();
    let b = FieldSpec::new(4, 0b1_1001).unwrap();
    for id in [TableId::III, TableId::IV] {
        let ra = reproduce_with(id, &a).map_err(|e| e.to_string())?;
        let rb = reproduce_with(id, &b).map_err(|e| e.to_string())?;
        same(&format!("table {id}"), &ra, &rb)?;
    }
    Ok("x^4+x+1 vs x^4+x^3+1".into())
}

fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 13] = [
        ("1 table I exact", Duration::from_secs(10), table_i),
        ("2 table II exact", Duration::from_secs(10), table_ii),
        ("3 table III exact", Duration::from_secs(30), table_iii),
        ("4 table IV exact", Duration::from_secs(30), table_iv),
        (
            "5 recursion equals brute force, n = 2",
            Duration::MAX,
            recursion_vs_brute,
        ),
        (
            "6 recursion equals brute force, SL(4,2)",
            Duration::MAX,
            sl4_q2,
        ),
        (
            "7 weight algorithms agree",
            Duration::MAX,
            algorithm_agreement,
        ),
        (
            "8 structural invariants",
            Duration::MAX,
            structural_invariants,
        ),
        (
            "9 trace distribution oracle",
            Duration::from_secs(60),
            trace_oracle,
        ),
        ("10 gauss sum identity", Duration::MAX, gauss_sum),
        (
            "11 salie and closed forms",
            Duration::MAX,
            salie_and_closed_forms,
        ),
        (
            "12 square identity and range",
            Duration::MAX,
            square_identity_and_range,
        ),
        (
            "13 polynomial independence",
            Duration::MAX,
            polynomial_independence,
        ),
    ];
    let mut failed = Vec::new();
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > limit => Err(format!("{d}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => report(&format!("PASS  {name} ({elapsed:.2?}): {detail}")),
            Err(detail) => {
                report(&format!("FAIL  {name} ({elapsed:.2?}): {detail}"));
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
