//! Noncoherent error probability by 2-D integration over the decision regions,
//! the route that also covers OOBPSK.

use peaky::analytic::{pe_noncoherent_region_quadrature, pe_ooqpsk_noncoherent};
use peaky::channel::Rician;
use peaky::modem::Scheme;
use peaky::numerics::QuadratureSpec;

fn main() -> peaky::Result<()> {
    let spec = Rician::from_k_factor(5.0, 1.0)?;
    let quad = QuadratureSpec::with_rel_tol(1e-9)?;
    for n0 in [1.0, 0.1, 0.01] {
        let b = pe_noncoherent_region_quadrature(Scheme::Oobpsk, &spec, 0.3, 1.0, n0, &quad)?;
        let q2 = pe_noncoherent_region_quadrature(Scheme::Ooqpsk, &spec, 0.3, 1.0, n0, &quad)?;
        let q1 = pe_ooqpsk_noncoherent(&spec, 0.3, 1.0, n0, &QuadratureSpec::default())?;
        println!(
            "N0={n0:<5} OOBPSK {:.8e}   OOQPSK 2-D {:.10e}  1-D {:.10e}",
            b.value, q2.value, q1.value
        );
    }
    Ok(())
}
