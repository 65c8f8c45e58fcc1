//! Generate an extremal zero-sum family and verify the bound it meets.
//! This is the snippet from the README, kept compiling.

use ranklab::{tight_example, verify_two_dim_case, FieldSpec, VerdictStatus};

fn main() -> ranklab::Result<()> {
    let family = tight_example(6, FieldSpec::PrimeField(3))?;
    let verdict = verify_two_dim_case(&family)?;
    assert_eq!(verdict.status, VerdictStatus::Holds);
    println!("n = {}, m = {}, status = holds", verdict.n, verdict.m);
    Ok(())
}
