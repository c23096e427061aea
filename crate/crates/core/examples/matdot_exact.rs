//! Exact MatDot: any 2p-1 of N answers reconstruct UV with no error.

use std::collections::BTreeSet;

use cdmm::{run_cluster, ExactRational, Precision, RationalMatrix, SchemeSpec};

fn main() -> cdmm::Result<()> {
    let u = RationalMatrix::from_integers(2, 4, &[1, 2, 3, 4, 5, 6, 7, 8])?;
    let v = RationalMatrix::from_integers(4, 2, &[1, 0, 0, 1, 2, -1, -3, 2])?;
    let p = 2;
    let points: Vec<ExactRational> = (1..=5)
        .map(|i| ExactRational::from_integer(i.into()))
        .collect();
    let spec = SchemeSpec::matdot(p, points, Precision::Exact, Precision::Exact, 10)?;

    let stragglers = BTreeSet::from([2, 4]);
    let run = run_cluster(&u, &v, &spec, &stragglers)?;
    let decoded = run.decode()?;
    println!("recovery threshold: {}", spec.recovery_threshold());
    println!("servers used: {:?}", decoded.servers_used);
    println!("C_hat:\n{}", decoded.c_hat);
    println!("matches UV: {}", decoded.c_hat == u.matmul(&v)?);
    Ok(())
}
