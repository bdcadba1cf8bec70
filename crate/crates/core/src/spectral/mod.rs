//! Killed-walk spectral gaps, spectral and isoperimetric profiles, and the
//! decay and escape estimates built from them.

mod checks;
mod gap;
mod profile;

pub use checks::{
    cheeger_check, decay_threshold, escape_bound_rhs, escape_check, escape_threshold,
    inputs_digest, key_lemma_check, l2_decay_check, CheckMode, CheckReport, CheegerReport,
    CheegerRow, DecayOptions, EscapeVariant, KEY_LEMMA_SLACK,
};
pub use gap::{components, lambda_a, lambda_a_with, GapEstimate, PowerConfig};
pub use profile::{
    boundary_ratio, enumerate_subsets, graph_ref, iso_profile, spectral_profile,
    spectral_profile_with, write_profile_csv, IsoProfile, ProfileMode, ProfileModel,
    ProfilePoint, ProfileSpec, SpectralProfile, SubsetRecord, EXHAUSTIVE_MAX_VERTICES,
};

use crate::error::{Error, Result};
use crate::graph::{Domain, Graph};
use crate::walk::{killed_apply, MassVector};

/// `E_A(phi) = <(I_A - P_A^2) phi, phi>_pi`
pub fn dirichlet_form(g: &Graph, domain: &Domain, phi: &MassVector) -> Result<f64> {
    phi.require_support(domain)?;
    let once = killed_apply(g, domain, phi.values());
    let twice = killed_apply(g, domain, &once);
    Ok(domain
        .iter()
        .map(|v| g.pi(v) * (phi.values()[v] - twice[v]) * phi.values()[v])
        .sum())
}

/// `E_A(phi) / ||phi||_{2,pi}^2` for non-negative, non-zero `phi`.
pub fn rayleigh_quotient(g: &Graph, domain: &Domain, phi: &MassVector) -> Result<f64> {
    if !phi.is_nonnegative() || phi.is_zero() {
        return Err(Error::NotPositive);
    }
    Ok(dirichlet_form(g, domain, phi)? / phi.norm_2_pi_sq(g))
}
