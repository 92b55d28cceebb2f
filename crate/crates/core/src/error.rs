use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The time grid is too coarse to follow the Loschmidt phase.
    #[error(
        "time step {step:.3e} between t = {t0} and t = {t1} is too coarse to follow the Loschmidt phase; refine to dt < {required_dt:.3e}"
    )]
    RefineGrid {
        t0: f64,
        t1: f64,
        step: f64,
        required_dt: f64,
    },

    #[error("winding number is not quantized: residue {residue:.3e} at t = {t}")]
    WindingResidue { t: f64, residue: f64 },

    #[error("critical mode k = {k} is gapless after the quench; its critical time diverges")]
    GaplessCritical { k: f64 },

    #[error("ground state of the {n_sites}-site chain has odd fermion parity (E_even = {even_energy}, E_odd = {odd_energy})")]
    SectorMismatch {
        n_sites: usize,
        even_energy: f64,
        odd_energy: f64,
    },

    #[error("quadrature did not converge: last two estimates differ by {difference:.3e} with {panels} panels")]
    Quadrature { panels: usize, difference: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical guard failures, as opposed to bad input.
    pub fn is_numerical_guard(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_) | Error::Io(_))
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
