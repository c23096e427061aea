//! Simulated `N`-server cluster with explicit stragglers and digit accounting.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::coding::{
    encode_matdot, encode_repetition, partition, EncodedTask, SchemeKind, SchemeSpec, Share,
};
use crate::decoding::{
    decode_exact_matdot, decode_min_norm, decode_repetition, DecodeResult, ServerAnswer,
};
use crate::error::{Error, Result};
use crate::fixedpoint::{fp_add, fp_mul, Precision, TruncatedValue};
use crate::matrix::{Matrix, RationalMatrix};

/// Abstract digit operations for one `n`-digit by `n`-digit multiplication:
/// `n * ceil(log2(n + 1))`, a concrete stand-in for `O~(n log n)`.
pub fn digit_mul_cost(n: u64) -> u64 {
    n * u64::from(u64::BITS - n.leading_zeros())
}

/// Work done by one server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ComputeStats {
    pub multiplications: u64,
    /// `None` when the operands are untruncated.
    pub digit_ops: Option<u64>,
}

/// Per-link digit traffic and per-server compute for one run.
///
/// Digit counts are `None` for untruncated (`Precision::Exact`) links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrafficLedger {
    pub upload_entries_per_server: u64,
    pub upload_digits_per_server: Option<u64>,
    /// Entries the user downloads from the first `R` responders.
    pub download_entries_total: u64,
    pub download_digits_total: Option<u64>,
    /// Scalar multiplications at each server.
    pub multiplications_count: u64,
    /// Digit operations at each server under [`digit_mul_cost`].
    pub digit_mul_cost: Option<u64>,
}

fn fixed_matmul(
    f: &Matrix<TruncatedValue>,
    g: &Matrix<TruncatedValue>,
) -> Result<Matrix<TruncatedValue>> {
    let mut data = Vec::with_capacity(f.rows() * g.cols());
    for r in 0..f.rows() {
        for c in 0..g.cols() {
            let mut acc = fp_mul(&f[(r, 0)], &g[(0, c)])?;
            for k in 1..f.cols() {
                acc = fp_add(&acc, &fp_mul(&f[(r, k)], &g[(k, c)])?)?;
            }
            data.push(acc);
        }
    }
    Matrix::from_vec(f.rows(), g.cols(), data)
}

/// Multiply the two shares exactly, then truncate the product to the download
/// budget.
pub fn server_compute(
    task: &EncodedTask,
    alpha: Option<crate::fixedpoint::ExactRational>,
    download: Precision,
    base: u32,
) -> Result<(ServerAnswer, ComputeStats)> {
    let (fr, fc) = task.f.shape();
    let (gr, gc) = task.g.shape();
    if fc != gr || fc == 0 {
        return Err(Error::Dimension(format!(
            "server {}: cannot multiply {fr}x{fc} by {gr}x{gc}",
            task.server_id
        )));
    }
    let upload = task.f.precision();
    if let (Some(u), Some(d)) = (upload.digits(), download.digits()) {
        if d > u {
            log::warn!(
                "download budget {d} exceeds the {u} meaningful digits of the uploads \
                 (product carries {} digits)",
                2 * u
            );
        }
    }
    let y = match (&task.f, &task.g, download) {
        (Share::Fixed(f), Share::Fixed(g), Precision::Digits(d)) => {
            Share::Fixed(fixed_matmul(f, g)?.map(|x| x.truncate_to(d)))
        }
        (Share::Fixed(f), Share::Fixed(g), Precision::Exact) => Share::Fixed(fixed_matmul(f, g)?),
        _ => Share::quantize(task.f.values().matmul(&task.g.values())?, download, base)?,
    };
    let multiplications = (fr * fc * gc) as u64;
    let digit_ops = match (task.f.precision(), task.g.precision()) {
        (Precision::Digits(a), Precision::Digits(b)) => {
            Some(multiplications * digit_mul_cost(u64::from(a.max(b))))
        }
        _ => None,
    };
    Ok((
        ServerAnswer {
            server_id: task.server_id,
            y,
            alpha,
            available: true,
        },
        ComputeStats {
            multiplications,
            digit_ops,
        },
    ))
}

/// Everything observable about one simulated run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterRun {
    pub spec: SchemeSpec,
    pub tasks: Vec<EncodedTask>,
    pub answers: Vec<ServerAnswer>,
    pub straggler_ids: BTreeSet<usize>,
    pub traffic: TrafficLedger,
}

/// Encode `(U, V)` for every server, compute all non-straggler answers and
/// fill the traffic ledger. Server ids are 1-based.
pub fn run_cluster(
    u: &RationalMatrix,
    v: &RationalMatrix,
    spec: &SchemeSpec,
    stragglers: &BTreeSet<usize>,
) -> Result<ClusterRun> {
    let n = spec.n_servers();
    if let Some(bad) = stragglers.iter().find(|&&id| id == 0 || id > n) {
        return Err(Error::InvalidParameter(format!(
            "straggler id {bad} is outside 1..={n}"
        )));
    }
    let responsive = n - stragglers.len();
    let required = spec.recovery_threshold();
    if responsive < required {
        return Err(Error::ThresholdViolation {
            required,
            available: responsive,
        });
    }

    let tasks: Vec<EncodedTask> = match spec.kind() {
        SchemeKind::Repetition => {
            let (f, g) = encode_repetition(u, v, spec.upload(), spec.base())?;
            (1..=n)
                .map(|server_id| EncodedTask {
                    server_id,
                    f: f.clone(),
                    g: g.clone(),
                })
                .collect()
        }
        SchemeKind::MatDot | SchemeKind::Amd => {
            let bp = partition(u, v, spec.p())?;
            spec.eval_points()
                .iter()
                .enumerate()
                .map(|(i, alpha)| {
                    let (f, g) = encode_matdot(&bp, alpha, spec.upload(), spec.base())?;
                    Ok(EncodedTask {
                        server_id: i + 1,
                        f,
                        g,
                    })
                })
                .collect::<Result<_>>()?
        }
    };

    let computed: Vec<(ServerAnswer, ComputeStats)> = tasks
        .par_iter()
        .filter(|t| !stragglers.contains(&t.server_id))
        .map(|t| {
            server_compute(
                t,
                spec.point(t.server_id).cloned(),
                spec.download(),
                spec.base(),
            )
        })
        .collect::<Result<_>>()?;

    let upload_entries = (tasks[0].f.len() + tasks[0].g.len()) as u64;
    let answer_entries = computed[0].0.y.len() as u64;
    let download_entries = answer_entries * required as u64;
    let stats = computed[0].1;
    let traffic = TrafficLedger {
        upload_entries_per_server: upload_entries,
        upload_digits_per_server: spec
            .upload()
            .digits()
            .map(|g| upload_entries * u64::from(g)),
        download_entries_total: download_entries,
        download_digits_total: spec
            .download()
            .digits()
            .map(|g| download_entries * u64::from(g)),
        multiplications_count: stats.multiplications,
        digit_mul_cost: stats.digit_ops,
    };

    Ok(ClusterRun {
        spec: spec.clone(),
        tasks,
        answers: computed.into_iter().map(|(a, _)| a).collect(),
        straggler_ids: stragglers.clone(),
        traffic,
    })
}

impl ClusterRun {
    /// Decode with the scheme's own decoder: interpolation for MatDot,
    /// minimum norm for approximate MatDot, passthrough for repetition.
    pub fn decode(&self) -> Result<DecodeResult> {
        match self.spec.kind() {
            SchemeKind::MatDot => decode_exact_matdot(&self.answers, self.spec.p()),
            SchemeKind::Amd => decode_min_norm(&self.answers, self.spec.p()),
            SchemeKind::Repetition => decode_repetition(&self.answers),
        }
    }

    /// Flat `key = value` transcript with per-server sections.
    pub fn transcript(&self) -> String {
        let spec = &self.spec;
        let opt = |v: Option<u64>| v.map_or_else(|| "exact".to_string(), |d| d.to_string());
        let mut out = String::new();
        let _ = writeln!(out, "kind = {}", spec.kind());
        let _ = writeln!(out, "p = {}", spec.p());
        let _ = writeln!(out, "N = {}", spec.n_servers());
        let _ = writeln!(out, "base = {}", spec.base());
        let _ = writeln!(out, "gamma_u = {}", spec.upload());
        let _ = writeln!(out, "gamma_y = {}", spec.download());
        let _ = writeln!(out, "recovery_threshold = {}", spec.recovery_threshold());
        let ids: Vec<String> = self.straggler_ids.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "stragglers = {}", ids.join(","));
        let t = &self.traffic;
        let _ = writeln!(
            out,
            "upload_entries_per_server = {}",
            t.upload_entries_per_server
        );
        let _ = writeln!(
            out,
            "upload_digits_per_server = {}",
            opt(t.upload_digits_per_server)
        );
        let _ = writeln!(out, "download_entries_total = {}", t.download_entries_total);
        let _ = writeln!(
            out,
            "download_digits_total = {}",
            opt(t.download_digits_total)
        );
        let _ = writeln!(
            out,
            "multiplications_per_server = {}",
            t.multiplications_count
        );
        let _ = writeln!(out, "digit_mul_cost_per_server = {}", opt(t.digit_mul_cost));
        for task in &self.tasks {
            let _ = writeln!(out, "\n[server {}]", task.server_id);
            if let Some(a) = spec.point(task.server_id) {
                let _ = writeln!(out, "alpha = {a}");
            }
            let _ = writeln!(out, "upload_digits = {}", opt(t.upload_digits_per_server));
            let _ = writeln!(
                out,
                "F = {}",
                task.f.render().trim_end().replace('\n', "; ")
            );
            let _ = writeln!(
                out,
                "G = {}",
                task.g.render().trim_end().replace('\n', "; ")
            );
            match self.answers.iter().find(|a| a.server_id == task.server_id) {
                Some(a) => {
                    let _ = writeln!(out, "Y = {}", a.y.render().trim_end().replace('\n', "; "));
                }
                None => {
                    let _ = writeln!(out, "Y = straggler");
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::equispaced_points;
    use crate::fixedpoint::{parse_rational, ExactRational};

    fn q(s: &str) -> ExactRational {
        parse_rational(s).unwrap()
    }

    fn fixed_task(f: &str, g: &str) -> EncodedTask {
        let tv =
            |s: &str| Matrix::from_vec(1, 1, vec![s.parse::<TruncatedValue>().unwrap()]).unwrap();
        EncodedTask {
            server_id: 1,
            f: Share::Fixed(tv(f)),
            g: Share::Fixed(tv(g)),
        }
    }

    #[test]
    fn compute_then_truncate() {
        let (a, s) =
            server_compute(&fixed_task("0.2", "0.3"), None, Precision::Digits(2), 10).unwrap();
        assert_eq!(a.y.render().trim(), "0.06");
        assert_eq!(s.multiplications, 1);
        let (a, _) = server_compute(
            &fixed_task("0.1234", "0.5678"),
            None,
            Precision::Digits(4),
            10,
        )
        .unwrap();
        assert_eq!(a.y.render().trim(), "0.0700");
    }

    #[test]
    fn compute_rejects_bad_shapes() {
        let mut t = fixed_task("0.2", "0.3");
        t.g = Share::Exact(RationalMatrix::zeros(2, 1));
        assert!(matches!(
            server_compute(&t, None, Precision::Digits(2), 10),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn digit_cost_model() {
        assert_eq!(digit_mul_cost(0), 0);
        assert_eq!(digit_mul_cost(1), 1);
        assert_eq!(digit_mul_cost(4), 12);
        assert_eq!(digit_mul_cost(12), 48);
    }

    fn uv() -> (RationalMatrix, RationalMatrix) {
        (
            RationalMatrix::from_rows(vec![vec![q("0.12"), q("0.5"), q("0.77")]]).unwrap(),
            RationalMatrix::from_rows(vec![vec![q("0.3")], vec![q("0.25")], vec![q("0.9")]])
                .unwrap(),
        )
    }

    #[test]
    fn repetition_tolerates_two_stragglers() {
        let (u, v) = uv();
        let spec =
            SchemeSpec::repetition(3, Precision::Digits(4), Precision::Digits(4), 10).unwrap();
        let run = run_cluster(&u, &v, &spec, &BTreeSet::from([2, 3])).unwrap();
        assert_eq!(run.answers.len(), 1);
        assert_eq!(run.decode().unwrap().c_hat, u.matmul(&v).unwrap());
    }

    #[test]
    fn amd_needs_p_answers() {
        let (u, v) = uv();
        let spec = SchemeSpec::amd(
            3,
            equispaced_points(&q("1e-4"), 3),
            Precision::Digits(12),
            Precision::Digits(12),
            10,
        )
        .unwrap();
        assert_eq!(
            run_cluster(&u, &v, &spec, &BTreeSet::from([1])),
            Err(Error::ThresholdViolation {
                required: 3,
                available: 2
            })
        );
        assert!(run_cluster(&u, &v, &spec, &BTreeSet::from([4])).is_err());
    }

    #[test]
    fn matdot_end_to_end() {
        let u = RationalMatrix::from_integers(2, 4, &[1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        let v = RationalMatrix::from_integers(4, 2, &[1, -1, 2, 0, 0, 3, -2, 1]).unwrap();
        let pts = vec![q("1"), q("2"), q("3")];
        let spec =
            SchemeSpec::matdot(2, pts, Precision::Digits(0), Precision::Digits(0), 10).unwrap();
        let run = run_cluster(&u, &v, &spec, &BTreeSet::new()).unwrap();
        assert_eq!(run.answers.len(), 3);
        assert_eq!(run.decode().unwrap().c_hat, u.matmul(&v).unwrap());
    }

    #[test]
    fn ledger_parity_amd_vs_repetition() {
        // AMD at gamma_u = p nu uploads as many digits as repetition at nu.
        let (p, nu) = (3u32, 4u32);
        let u = RationalMatrix::from_integers(2, 6, &[1; 12]).unwrap();
        let v = RationalMatrix::from_integers(6, 2, &[1; 12]).unwrap();
        let amd = SchemeSpec::amd(
            p as usize,
            equispaced_points(&q("1e-4"), 3),
            Precision::Digits(p * nu),
            Precision::Digits(p * nu),
            10,
        )
        .unwrap();
        let rep =
            SchemeSpec::repetition(3, Precision::Digits(nu), Precision::Digits(nu), 10).unwrap();
        let a = run_cluster(&u, &v, &amd, &BTreeSet::new()).unwrap().traffic;
        let r = run_cluster(&u, &v, &rep, &BTreeSet::new()).unwrap().traffic;
        assert_eq!(a.upload_digits_per_server, r.upload_digits_per_server);
        assert_eq!(
            a.upload_entries_per_server * u64::from(p),
            r.upload_entries_per_server
        );
        assert_eq!(
            a.multiplications_count * u64::from(p),
            r.multiplications_count
        );
        // AMD downloads p answers at p nu digits: p^2 times repetition
        assert_eq!(
            a.download_digits_total.unwrap(),
            u64::from(p * p) * r.download_digits_total.unwrap()
        );
        assert!(a.digit_mul_cost.unwrap() > r.digit_mul_cost.unwrap());
    }

    #[test]
    fn run_is_deterministic_and_transcribed() {
        let (u, v) = uv();
        let spec = SchemeSpec::amd(
            3,
            equispaced_points(&q("1e-2"), 3),
            Precision::Digits(6),
            Precision::Digits(6),
            10,
        )
        .unwrap();
        let a = run_cluster(&u, &v, &spec, &BTreeSet::new()).unwrap();
        let b = run_cluster(&u, &v, &spec, &BTreeSet::new()).unwrap();
        assert_eq!(a, b);
        let t = a.transcript();
        assert!(t.contains("kind = amd"));
        assert!(t.contains("upload_digits_per_server = 12"));
        assert!(t.contains("[server 3]"));
        assert_eq!(t, b.transcript());
    }

    #[test]
    fn exact_links_have_no_digit_counts() {
        let (u, v) = uv();
        let spec = SchemeSpec::repetition(1, Precision::Exact, Precision::Exact, 10).unwrap();
        let run = run_cluster(&u, &v, &spec, &BTreeSet::new()).unwrap();
        assert_eq!(run.traffic.upload_digits_per_server, None);
        assert_eq!(run.traffic.digit_mul_cost, None);
        assert_eq!(run.decode().unwrap().c_hat, u.matmul(&v).unwrap());
    }
}
