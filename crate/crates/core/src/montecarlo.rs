//! Index-ordered parallel Monte Carlo.
//!
//! Replica `i` always draws from `derive_seed(master, i)` and results come
//! back in index order, so a run is bitwise identical for any worker count.

use rayon::prelude::*;

use crate::ensemble::{sample_gue_standard, sample_wigner, Convention, EntryLaw};
use crate::rng::derive_seed;
use crate::spectra::{hermitian_eigenvalues, SpectralSample};
use crate::{Error, Result};

/// Master seed plus worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Harness {
    pub master: u64,
    /// 0 means the rayon default.
    pub workers: usize,
}

impl Harness {
    pub fn new(master: u64, workers: usize) -> Self {
        Harness { master, workers }
    }

    pub fn seed(&self, index: u64) -> u64 {
        derive_seed(self.master, index)
    }

    /// Seeds of replicas `0..count`.
    pub fn seeds(&self, count: usize) -> Vec<u64> {
        (0..count as u64).map(|i| self.seed(i)).collect()
    }

    /// Runs `f(index, seed)` for every replica and returns the results in
    /// index order. The first error (lowest index) wins.
    pub fn run<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, u64) -> Result<T> + Sync,
    {
        let job = || {
            (0..count as u64)
                .into_par_iter()
                .map(|i| f(i, self.seed(i)))
                .collect::<Vec<_>>()
        };
        let out = if self.workers == 0 {
            job()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.workers)
                .build()
                .map_err(|e| Error::input(format!("cannot start worker pool: {e}")))?
                .install(job)
        };
        out.into_iter().collect()
    }

    /// Spectra of `count` standard GUE matrices of size `n`.
    pub fn gue_spectra(&self, n: usize, count: usize) -> Result<Vec<SpectralSample>> {
        self.run(count, |_, seed| hermitian_eigenvalues(&sample_gue_standard(n, seed)?))
    }

    /// Spectra of `count` Wigner matrices of size `n`.
    pub fn wigner_spectra(
        &self,
        n: usize,
        off_diag: &EntryLaw,
        diag: &EntryLaw,
        convention: Convention,
        count: usize,
    ) -> Result<Vec<SpectralSample>> {
        off_diag.prepare_sampler()?;
        diag.prepare_sampler()?;
        self.run(count, |_, seed| {
            hermitian_eigenvalues(&sample_wigner(n, off_diag, diag, convention, seed)?)
        })
    }
}
