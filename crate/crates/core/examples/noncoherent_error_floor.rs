//! Noncoherent OOQPSK over Rician fading: the error probability levels off at
//! `nu (1 - (1 - Q(sqrt K))^2)` however large the SNR.

use peaky::analytic::{pe_ooqpsk_noncoherent, pe_ooqpsk_noncoherent_floor};
use peaky::channel::Rician;
use peaky::detect::noncoherent_thresholds;
use peaky::modem::{build_constellation, snr_from_eb_n0_db, Scheme};
use peaky::numerics::QuadratureSpec;

fn main() -> peaky::Result<()> {
    let k = 5.0;
    let spec = Rician::from_k_factor(k, 1.0)?;
    let quad = QuadratureSpec::default();
    for nu in [0.8, 0.5, 0.1] {
        let c = build_constellation(Scheme::Ooqpsk, nu, 1.0)?;
        println!(
            "nu = {nu}: floor {:.6e}",
            pe_ooqpsk_noncoherent_floor(k, nu)?
        );
        for eb in [-10.0, 0.0, 10.0, 20.0, 40.0, 60.0] {
            let n0 = 1.0 / snr_from_eb_n0_db(eb, &c)?;
            let th = noncoherent_thresholds(&c, &spec, n0)?;
            let pe = pe_ooqpsk_noncoherent(&spec, nu, 1.0, n0, &quad)?;
            println!(
                "  {eb:>5} dB  Pe {:.6e}  A={:.3e} C={:?} D={:?}",
                pe.value,
                th.a_q(),
                th.c_q(),
                th.d_q()
            );
        }
    }
    Ok(())
}
