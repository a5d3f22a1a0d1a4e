use igusa_core::modular::verify_d_identity;

use crate::report::SuiteResult;

pub const SUITE: &str = "verify-identity";

pub fn run_pair(p: u64, n: u64) -> SuiteResult {
    let case = format!("p={p} N={n}");
    match verify_d_identity(p, n) {
        Ok(table) => SuiteResult::ok(SUITE, case, table.holds, &table),
        Err(e) => SuiteResult::failed(SUITE, case, e),
    }
}
