use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::score::Counts;
use crate::exec::{self, Execution};

/// Largest sentence count accepted by [`sig_test_exhaustive`].
pub const MAX_EXHAUSTIVE: usize = 24;

/// Shuffled differences within this distance of the observed one count as
/// reaching it, so that exact ties survive floating-point noise.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigTestResult {
    /// `F1(X) - F1(Y)` on the unshuffled data.
    pub observed: f64,
    /// Shuffles whose difference reached the observed one.
    pub at_least_as_extreme: u64,
    pub shuffles: u64,
    /// One-tailed `(at_least_as_extreme + 1) / (shuffles + 1)`.
    pub p_value: f64,
}

impl SigTestResult {
    fn new(observed: f64, at_least_as_extreme: u64, shuffles: u64) -> Self {
        SigTestResult {
            observed,
            at_least_as_extreme,
            shuffles,
            p_value: (at_least_as_extreme + 1) as f64 / (shuffles + 1) as f64,
        }
    }
}

fn check(x: &[Counts], y: &[Counts]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Invalid("significance test needs at least one sentence".into()));
    }
    if x.len() != y.len() {
        return Err(Error::SentenceMismatch(format!("{} sentences vs {}", x.len(), y.len())));
    }
    Ok(())
}

fn diff_with(x: &[Counts], y: &[Counts], swapped: impl Fn(usize) -> bool) -> f64 {
    let (mut sx, mut sy) = (Counts::default(), Counts::default());
    for (n, (&a, &b)) in x.iter().zip(y).enumerate() {
        if swapped(n) {
            sx = sx + b;
            sy = sy + a;
        } else {
            sx = sx + a;
            sy = sy + b;
        }
    }
    sx.f1() - sy.f1()
}

/// Random generator for shuffle `iteration`; independent of scheduling.
pub fn shuffle_rng(seed: u64, iteration: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    rng
}

/// One-tailed sentence-stratified randomized shuffling test of whether
/// system X has higher F1 than system Y. `x[n]` and `y[n]` must describe
/// the same sentence.
pub fn sig_test(x: &[Counts], y: &[Counts], iterations: u64, seed: u64, mode: Execution) -> Result<SigTestResult> {
    check(x, y)?;
    let observed = diff_with(x, y, |_| false);
    let hits = exec::count_range(mode, 0..iterations, |it| {
        let mut rng = shuffle_rng(seed, it);
        let flips: Vec<bool> = (0..x.len()).map(|_| rng.gen::<bool>()).collect();
        diff_with(x, y, |n| flips[n]) >= observed - TIE_TOLERANCE
    });
    Ok(SigTestResult::new(observed, hits, iterations))
}

/// The same test over all `2^n` swap patterns instead of a random sample.
pub fn sig_test_exhaustive(x: &[Counts], y: &[Counts], mode: Execution) -> Result<SigTestResult> {
    check(x, y)?;
    if x.len() > MAX_EXHAUSTIVE {
        return Err(Error::Invalid(format!(
            "exhaustive test limited to {} sentences",
            MAX_EXHAUSTIVE
        )));
    }
    let observed = diff_with(x, y, |_| false);
    let total = 1u64 << x.len();
    let hits = exec::count_range(mode, 0..total, |mask| {
        diff_with(x, y, |n| mask >> n & 1 == 1) >= observed - TIE_TOLERANCE
    });
    Ok(SigTestResult::new(observed, hits, total))
}

/// Formats a p-value to four decimals, or `<.0001` below that.
pub fn format_p(p: f64) -> String {
    if p < 0.0001 {
        "<.0001".to_string()
    } else {
        format!("{:.4}", p)
    }
}
