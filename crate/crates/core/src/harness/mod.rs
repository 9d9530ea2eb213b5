//! Experiment plumbing: distribution files and corpora, seeded tester runs
//! with aggregate rows, and the verification suites.

pub mod corpus;
pub mod experiment;
pub mod verify;

/// SplitMix64 step, used to derive independent seeds from one base seed.
pub fn mix_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Thread pool sized by `HGUT_THREADS` (rayon's default when unset or 0).
pub fn thread_pool() -> crate::Result<rayon::ThreadPool> {
    let threads = match std::env::var("HGUT_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| crate::Error::Config(format!("HGUT_THREADS = {v:?} is not a count")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_by_stream() {
        let a = mix_seed(7, 0, 0);
        assert_ne!(a, mix_seed(7, 0, 1));
        assert_ne!(a, mix_seed(7, 1, 0));
        assert_eq!(a, mix_seed(7, 0, 0));
    }
}
