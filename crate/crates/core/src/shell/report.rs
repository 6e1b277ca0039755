use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::exactcore::PrimePower;
use crate::qseries::q_valuation;

pub const SCHEMA_VERSION: u32 = 1;

/// Exact rational `num / (q^den_exp * cofactor)` with `cofactor` coprime to q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QValue {
    #[serde(with = "crate::num_json")]
    pub num: BigInt,
    pub den_exp: u32,
    #[serde(with = "crate::num_json", skip_serializing_if = "One::is_one")]
    pub cofactor: BigInt,
}

impl QValue {
    pub fn integer(n: impl Into<BigInt>) -> Self {
        QValue {
            num: n.into(),
            den_exp: 0,
            cofactor: BigInt::one(),
        }
    }

    /// Split the denominator into a power of q and a cofactor coprime to p.
    pub fn from_rational(x: &BigRational, q: Option<PrimePower>) -> Self {
        let Some(q) = q else {
            return QValue {
                num: x.numer().clone(),
                den_exp: 0,
                cofactor: x.denom().clone(),
            };
        };
        let p = BigInt::from(q.p());
        let mut d = x.denom().clone();
        let mut s = 0u32;
        while (&d % &p).is_zero() {
            d /= &p;
            s += 1;
        }
        let den_exp = s.div_ceil(q.f());
        let lift = Pow::pow(&p, den_exp * q.f() - s);
        QValue {
            num: x.numer() * lift,
            den_exp,
            cofactor: d,
        }
    }

    pub fn to_rational(&self, q: Option<PrimePower>) -> BigRational {
        let qpow = match q {
            Some(q) => Pow::pow(BigInt::from(q.q()), self.den_exp),
            None => BigInt::one(),
        };
        BigRational::new(self.num.clone(), qpow * &self.cofactor)
    }

    fn num_field(&self) -> String {
        if self.cofactor.is_one() {
            self.num.to_string()
        } else {
            format!("{}/{}", self.num, self.cofactor)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "true",
            Status::Fail => "false",
            Status::Skip => "skipped",
        }
    }
}

/// One executed (or skipped) check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<PrimePower>,
    pub lhs: Option<QValue>,
    pub rhs: Option<QValue>,
    /// q-adic valuation of `lhs - rhs`; `None` when they are equal or absent.
    pub congruence_exp: Option<i64>,
    pub status: Status,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
    pub runtime_ms: u64,
    /// Inputs needed to rerun a failing check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repro: Option<Value>,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, params: impl Into<String>) -> Self {
        CheckRecord {
            check: check.into(),
            params: params.into(),
            q: None,
            lhs: None,
            rhs: None,
            congruence_exp: None,
            status: Status::Pass,
            note: String::new(),
            runtime_ms: 0,
            repro: None,
        }
    }

    pub fn at_q(mut self, q: PrimePower) -> Self {
        self.q = Some(q);
        self
    }

    /// Exact equality check.
    pub fn equality(self, lhs: &BigRational, rhs: &BigRational) -> Self {
        self.compare(lhs, rhs, None)
    }

    /// `lhs = rhs (mod q^n)`; requires `q` to be set.
    pub fn congruence(self, lhs: &BigRational, rhs: &BigRational, n: i64) -> Self {
        self.compare(lhs, rhs, Some(n))
    }

    fn compare(mut self, lhs: &BigRational, rhs: &BigRational, modulus_exp: Option<i64>) -> Self {
        self.lhs = Some(QValue::from_rational(lhs, self.q));
        self.rhs = Some(QValue::from_rational(rhs, self.q));
        let diff = lhs - rhs;
        self.congruence_exp = match self.q {
            Some(q) => q_valuation(&diff, q),
            None => None,
        };
        let ok = match modulus_exp {
            None => diff.is_zero(),
            Some(n) => self.congruence_exp.map_or(true, |v| v >= n),
        };
        self.status = if ok { Status::Pass } else { Status::Fail };
        self
    }

    pub fn boolean(mut self, ok: bool, note: impl Into<String>) -> Self {
        self.status = if ok { Status::Pass } else { Status::Fail };
        self.note = note.into();
        self
    }

    pub fn skipped(mut self, why: impl Into<String>) -> Self {
        self.status = Status::Skip;
        self.note = why.into();
        self
    }

    pub fn failed(mut self, why: impl Into<String>) -> Self {
        self.status = Status::Fail;
        self.note = why.into();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if self.note.is_empty() {
            self.note = note;
        } else if !note.is_empty() {
            self.note = format!("{}; {note}", self.note);
        }
        self
    }

    pub fn with_repro(mut self, repro: Value) -> Self {
        self.repro = Some(repro);
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Collection of check records, kept sorted by check name then parameters.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub records: Vec<CheckRecord>,
}

impl Default for VerificationReport {
    fn default() -> Self {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            records: Vec::new(),
        }
    }
}

impl VerificationReport {
    pub fn new(mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(|a, b| (&a.check, &a.params).cmp(&(&b.check, &b.params)));
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            records,
        }
    }

    pub fn extend(&mut self, other: VerificationReport) {
        let mut all = std::mem::take(&mut self.records);
        all.extend(other.records);
        *self = VerificationReport::new(all);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(CheckRecord::passed)
    }

    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Columns: check, params, lhs_num, lhs_den_exp, rhs_num, rhs_den_exp,
    /// congruence_exp, pass.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "check",
            "params",
            "lhs_num",
            "lhs_den_exp",
            "rhs_num",
            "rhs_den_exp",
            "congruence_exp",
            "pass",
        ])?;
        for r in &self.records {
            let side = |v: &Option<QValue>| match v {
                Some(v) => (v.num_field(), v.den_exp.to_string()),
                None => (String::new(), String::new()),
            };
            let (ln, ld) = side(&r.lhs);
            let (rn, rd) = side(&r.rhs);
            let cong = match (&r.lhs, r.congruence_exp) {
                (_, Some(k)) => k.to_string(),
                (Some(_), None) => "inf".into(),
                (None, None) => String::new(),
            };
            w.write_record([
                r.check.as_str(),
                r.params.as_str(),
                &ln,
                &ld,
                &rn,
                &rd,
                &cong,
                r.status.as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Human-readable table plus a one-line summary.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let show = |v: &Option<QValue>| match v {
            Some(v) if v.den_exp == 0 => v.num_field(),
            Some(v) => format!("{} /q^{}", v.num_field(), v.den_exp),
            None => "-".into(),
        };
        let _ = writeln!(s, "{:<34} {:<40} {:>22} {:>22} {:>6}  status", "check", "params", "lhs", "rhs", "cong");
        for r in &self.records {
            let cong = match (&r.lhs, r.congruence_exp) {
                (_, Some(k)) => k.to_string(),
                (Some(_), None) => "inf".into(),
                (None, None) => "-".into(),
            };
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = write!(s, "{:<34} {:<40} {:>22} {:>22} {:>6}  {status}", r.check, r.params, show(&r.lhs), show(&r.rhs), cong);
            if !r.note.is_empty() {
                let _ = write!(s, "  ({})", r.note);
            }
            s.push('\n');
        }
        let _ = writeln!(
            s,
            "{} checks: {} passed, {} failed, {} skipped",
            self.records.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip)
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn qvalue_splits_denominators() {
        let q = PrimePower::from_q(4).unwrap();
        // 3/2 = 6/4
        let v = QValue::from_rational(&rat(3, 2), Some(q));
        assert_eq!((v.num.clone(), v.den_exp, v.cofactor.clone()), (BigInt::from(6), 1, BigInt::one()));
        assert_eq!(v.to_rational(Some(q)), rat(3, 2));
        let q3 = PrimePower::from_q(3).unwrap();
        let v = QValue::from_rational(&rat(-1, 18), Some(q3));
        assert_eq!((v.den_exp, v.cofactor.clone()), (2, BigInt::from(2)));
        assert_eq!(v.to_rational(Some(q3)), rat(-1, 18));
    }

    #[test]
    fn records_and_csv() {
        let q = PrimePower::from_q(3).unwrap();
        let a = CheckRecord::new("b", "x").at_q(q).equality(&rat(11, 3), &rat(33, 9));
        assert_eq!(a.status, Status::Pass);
        let b = CheckRecord::new("a", "y").at_q(q).congruence(&rat(29, 1), &rat(2, 1), 4);
        assert_eq!(b.status, Status::Fail);
        assert_eq!(b.congruence_exp, Some(3));
        let report = VerificationReport::new(vec![a, b]);
        assert_eq!(report.records[0].check, "a");
        assert!(!report.passed());
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "check,params,lhs_num,lhs_den_exp,rhs_num,rhs_den_exp,congruence_exp,pass"
        );
        assert_eq!(lines.next().unwrap(), "a,y,29,0,2,0,3,false");
        assert_eq!(lines.next().unwrap(), "b,x,11,1,11,1,inf,true");
        let json: Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["schema_version"], 1);
    }
}
