//! The four reference tables: weight distributions of `C(SL(2, 8))` and
//! `C(SL(2, 16))`, and the Kloosterman power moments over GF(8) and GF(16).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::moments::moments_via_code;
use crate::sl_group::{trace_distribution_closed, GroupParams};
use crate::weights::weight_distribution_direct;

/// `C_0..C_21` of `C(SL(2, 8))`.
pub const TABLE_I: [&str; 22] = [
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

/// `MK^0..MK^29` over GF(8).
pub const TABLE_II: [&str; 30] = [
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

/// `C_0..C_11` of `C(SL(2, 16))`.
pub const TABLE_III: [&str; 12] = [
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

/// `MK^0..MK^11` over GF(16).
pub const TABLE_IV: [&str; 12] = [
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

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TableId {
    I,
    II,
    III,
    IV,
}

impl TableId {
    pub const ALL: [TableId; 4] = [TableId::I, TableId::II, TableId::III, TableId::IV];

    /// Extension degree `r` of the field the table is computed over.
    pub fn degree(self) -> u32 {
        match self {
            TableId::I | TableId::II => 3,
            TableId::III | TableId::IV => 4,
        }
    }

    /// `true` for weight distributions, `false` for moment tables.
    pub fn is_weight_table(self) -> bool {
        matches!(self, TableId::I | TableId::III)
    }

    /// Column header for the row index.
    pub fn index_label(self) -> &'static str {
        if self.is_weight_table() {
            "w"
        } else {
            "i"
        }
    }

    /// Column header for the value.
    pub fn value_label(self) -> &'static str {
        if self.is_weight_table() {
            "frequency"
        } else {
            "MK"
        }
    }

    pub fn reference(self) -> Vec<BigInt> {
        let rows: &[&str] = match self {
            TableId::I => &TABLE_I,
            TableId::II => &TABLE_II,
            TableId::III => &TABLE_III,
            TableId::IV => &TABLE_IV,
        };
        rows.iter()
            .map(|s| s.parse().expect("table literal is a decimal integer"))
            .collect()
    }

    /// Number of rows.
    pub fn row_count(self) -> usize {
        match self {
            TableId::I => TABLE_I.len(),
            TableId::II => TABLE_II.len(),
            TableId::III => TABLE_III.len(),
            TableId::IV => TABLE_IV.len(),
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TableId::I => "I",
            TableId::II => "II",
            TableId::III => "III",
            TableId::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(TableId::I),
            "II" | "2" => Ok(TableId::II),
            "III" | "3" => Ok(TableId::III),
            "IV" | "4" => Ok(TableId::IV),
            other => Err(Error::Usage(format!("unknown table id {other:?}"))),
        }
    }
}

/// Recomputes a table from scratch with the default field for its degree.
pub fn reproduce(id: TableId) -> Result<Vec<BigInt>> {
    reproduce_with(id, &FieldSpec::with_default_poly(id.degree())?)
}

/// Recomputes a table over a caller-chosen model of the field.
pub fn reproduce_with(id: TableId, spec: &FieldSpec) -> Result<Vec<BigInt>> {
    if spec.degree() != id.degree() {
        return Err(Error::Usage(format!(
            "table {id} is over GF(2^{}), got {spec}",
            id.degree()
        )));
    }
    let params = GroupParams::new(2, *spec)?;
    let last = id.row_count() - 1;
    if id.is_weight_table() {
        let dist = trace_distribution_closed(&params)?;
        let wd = weight_distribution_direct(&dist, last)?;
        Ok(wd.counts().iter().cloned().map(BigInt::from).collect())
    } else {
        Ok(moments_via_code(&params, last as u32)?.into_values())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ids() {
        assert_eq!("ii".parse::<TableId>().unwrap(), TableId::II);
        assert_eq!("4".parse::<TableId>().unwrap(), TableId::IV);
        assert!("V".parse::<TableId>().is_err());
        for id in TableId::ALL {
            assert_eq!(id.to_string().parse::<TableId>().unwrap(), id);
        }
    }

    #[test]
    fn reference_rows() {
        assert_eq!(TableId::I.reference()[2], BigInt::from(15844));
        assert_eq!(TableId::IV.reference()[11], BigInt::from(3760049569u64));
        assert_eq!(TableId::II.reference()[0], BigInt::from(7));
    }

    #[test]
    fn wrong_degree_rejected() {
        let gf16 = FieldSpec::with_default_poly(4).unwrap();
        assert!(reproduce_with(TableId::I, &gf16).is_err());
    }

    #[test]
    fn reproduces_all_tables() {
        for id in TableId::ALL {
            assert_eq!(reproduce(id).unwrap(), id.reference(), "table {id}");
        }
    }
}
